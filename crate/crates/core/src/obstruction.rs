//! Thurston matrices of invariant multicurves, exact spectral comparison
//! against 1, and Levy cycles.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::cover::{CoverError, CoverPresentation};
use crate::freegroup::ConjClass;
use crate::perm::{orbit, Perm};
use crate::sphere::{CurveClass, CurveType, DisjointnessProvenance, Multicurve};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ObstructionError {
    #[error("multicurve is not invariant: {0} preimage classes fall outside it")]
    NotStable(usize),
    #[error("saturation exceeds {limit} curves")]
    Overflow { limit: usize },
    #[error(transparent)]
    Cover(#[from] CoverError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub stable: bool,
    /// `(curve index, essential preimage class outside the multicurve)`.
    pub offending: Vec<(usize, ConjClass)>,
}

pub fn is_stable(c: &CoverPresentation, gamma: &Multicurve) -> Result<StabilityReport, ObstructionError> {
    let mut offending = Vec::new();
    for (k, g) in gamma.curves().iter().enumerate() {
        for comp in c.pullback_curve(g)? {
            if comp.kind == CurveType::Essential && !gamma.curves().iter().any(|d| *d.class() == comp.class) {
                offending.push((k, comp.class));
            }
        }
    }
    Ok(StabilityReport { stable: offending.is_empty(), offending })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThurstonMatrix {
    pub curves: Multicurve,
    /// `entries[γ][δ] = Σ 1/deg(α → δ)` over components `α` of `f⁻¹(δ)` homotopic to `γ`.
    pub entries: Vec<Vec<BigRational>>,
}

impl ThurstonMatrix {
    pub fn from_entries(curves: Multicurve, entries: Vec<Vec<BigRational>>) -> Self {
        ThurstonMatrix { curves, entries }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }
}

impl fmt::Display for ThurstonMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

pub fn thurston_matrix(c: &CoverPresentation, gamma: &Multicurve) -> Result<ThurstonMatrix, ObstructionError> {
    let report = is_stable(c, gamma)?;
    if !report.stable {
        return Err(ObstructionError::NotStable(report.offending.len()));
    }
    let k = gamma.len();
    let mut entries = vec![vec![BigRational::zero(); k]; k];
    for (d, delta) in gamma.curves().iter().enumerate() {
        for comp in c.pullback_curve(delta)? {
            if let Some(g) = gamma.curves().iter().position(|x| *x.class() == comp.class) {
                entries[g][d] += BigRational::new(BigInt::one(), BigInt::from(comp.degree));
            }
        }
    }
    Ok(ThurstonMatrix { curves: gamma.clone(), entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spectral {
    Less,
    Equal,
    Greater,
}

impl fmt::Display for Spectral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spectral::Less => "LESS",
            Spectral::Equal => "EQUAL",
            Spectral::Greater => "GREATER",
        })
    }
}

/// Bound on the spectral radius of one irreducible diagonal block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockBound {
    /// `u > 0`, `B u ≤ θ u`, `θ < 1`.
    Below { u: Vec<BigRational>, theta: BigRational },
    /// `v > 0`, `B v = v`.
    Fixed { v: Vec<BigRational> },
    /// `v > 0`, `B v ≥ θ v`, `θ > 1`.
    Above { v: Vec<BigRational>, theta: BigRational },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCertificate {
    pub indices: Vec<usize>,
    pub bound: BlockBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCertificate {
    pub verdict: Spectral,
    pub blocks: Vec<BlockCertificate>,
    /// For `Equal`/`Greater`: `v ≥ 0`, `v ≠ 0`, `M v ≥ v`.
    pub witness: Option<Vec<BigRational>>,
    pub lambda: f64,
}

fn strongly_connected(m: &[Vec<BigRational>]) -> Vec<Vec<usize>> {
    let k = m.len();
    let reach = |from: usize| {
        let mut seen = vec![false; k];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            for w in 0..k {
                if !seen[w] && !m[v][w].is_zero() {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    };
    let r: Vec<Vec<bool>> = (0..k).map(reach).collect();
    let mut assigned = vec![false; k];
    let mut out = Vec::new();
    for v in 0..k {
        if !assigned[v] {
            let comp: Vec<usize> = (0..k).filter(|&w| r[v][w] && r[w][v]).collect();
            for &w in &comp {
                assigned[w] = true;
            }
            out.push(comp);
        }
    }
    out
}

fn sub(m: &[Vec<BigRational>], idx: &[usize]) -> Vec<Vec<BigRational>> {
    idx.iter().map(|&i| idx.iter().map(|&j| m[i][j].clone()).collect()).collect()
}

fn mat_vec(m: &[Vec<BigRational>], v: &[BigRational]) -> Vec<BigRational> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Solves `a x = b`; `None` when singular.
fn solve(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let k = a.len();
    let mut m: Vec<Vec<BigRational>> = a.iter().zip(b).map(|(r, x)| r.iter().cloned().chain([x.clone()]).collect()).collect();
    for col in 0..k {
        let piv = (col..k).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col].clone();
        for x in &mut m[col] {
            *x = &*x / &p;
        }
        for r in 0..k {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..=k {
                    let t = &m[col][c] * &f;
                    m[r][c] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[k].clone()).collect())
}

/// A vector spanning the kernel of `a` when it is one-dimensional.
fn kernel_line(a: &[Vec<BigRational>]) -> Option<Vec<BigRational>> {
    let k = a.len();
    let mut m = a.to_vec();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..k {
        let Some(piv) = (row..k).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, piv);
        let p = m[row][col].clone();
        for x in &mut m[row] {
            *x = &*x / &p;
        }
        for r in 0..k {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..k {
                    let t = &m[row][c] * &f;
                    m[r][c] -= t;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if pivots.len() + 1 != k {
        return None;
    }
    let free = (0..k).find(|c| !pivots.contains(c))?;
    let mut v = vec![BigRational::zero(); k];
    v[free] = BigRational::one();
    for (r, &c) in pivots.iter().enumerate() {
        v[c] = -m[r][free].clone();
    }
    Some(v)
}

fn identity_minus(b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    b.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter().enumerate().map(|(j, x)| if i == j { BigRational::one() - x } else { -x.clone() }).collect()
        })
        .collect()
}

fn float_radius(b: &[Vec<BigRational>]) -> f64 {
    let k = b.len();
    let m: Vec<Vec<f64>> = b.iter().map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::MAX)).collect()).collect();
    let mut v = vec![1.0f64; k];
    let mut est = 0.0;
    for _ in 0..100_000 {
        let w: Vec<f64> = (0..k).map(|i| v[i] + (0..k).map(|j| m[i][j] * v[j]).sum::<f64>()).collect();
        let norm = w.iter().cloned().fold(0.0, f64::max);
        if norm == 0.0 {
            return 0.0;
        }
        let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
        let delta = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        est = norm - 1.0;
        if delta < 1e-15 {
            break;
        }
    }
    est
}

fn block_bound(b: &[Vec<BigRational>]) -> BlockBound {
    let k = b.len();
    let one = BigRational::one();
    if k == 1 && b[0][0].is_zero() {
        return BlockBound::Below { u: vec![one], theta: BigRational::zero() };
    }
    let a = identity_minus(b);
    if let Some(u) = solve(&a, &vec![one.clone(); k]) {
        if u.iter().all(|x| x.is_positive()) {
            let theta = u.iter().map(|x| (x - &one) / x).max().expect("nonempty");
            return BlockBound::Below { u, theta };
        }
    }
    if let Some(mut v) = kernel_line(&a) {
        if v.iter().all(|x| x.is_negative()) {
            v = v.into_iter().map(|x| -x).collect();
        }
        if v.iter().all(|x| x.is_positive()) {
            return BlockBound::Fixed { v };
        }
    }
    // ρ(B) > 1: iterate (I + B) on the positive cone until B v ≥ θ v with θ > 1.
    let mut v = vec![one.clone(); k];
    for _ in 0..100_000 {
        let bv = mat_vec(b, &v);
        if v.iter().all(|x| x.is_positive()) {
            let theta = bv.iter().zip(&v).map(|(a, x)| a / x).min().expect("nonempty");
            if theta > one {
                return BlockBound::Above { v, theta };
            }
        }
        let next: Vec<BigRational> = v.iter().zip(&bv).map(|(a, c)| a + c).collect();
        let top = next.iter().max().cloned().expect("nonempty");
        v = next.into_iter().map(|x| rounded(&(x / &top))).collect();
    }
    let bv = mat_vec(b, &v);
    let theta = bv.iter().zip(&v).map(|(a, x)| a / x).min().expect("nonempty");
    BlockBound::Above { v, theta }
}

/// Keeps denominators small; the iteration only needs to stay in the positive cone.
fn rounded(x: &BigRational) -> BigRational {
    let scale = BigInt::from(1u64 << 40);
    let num = (x * BigRational::from_integer(scale.clone())).ceil().to_integer();
    BigRational::new(num, scale)
}

/// Exact comparison of the leading eigenvalue with 1, blockwise on the
/// strongly connected components of the support graph.
pub fn leading_eigenvalue_geq_1(m: &ThurstonMatrix) -> SpectralCertificate {
    spectral_certificate(&m.entries)
}

pub fn spectral_certificate(m: &[Vec<BigRational>]) -> SpectralCertificate {
    let k = m.len();
    let mut blocks = Vec::new();
    let mut lambda = 0.0f64;
    let mut verdict = Spectral::Less;
    let mut witness: Option<Vec<BigRational>> = None;
    for idx in strongly_connected(m) {
        let b = sub(m, &idx);
        lambda = lambda.max(float_radius(&b));
        let bound = block_bound(&b);
        let (rank, vec) = match &bound {
            BlockBound::Below { .. } => (Spectral::Less, None),
            BlockBound::Fixed { v } => (Spectral::Equal, Some(v)),
            BlockBound::Above { v, .. } => (Spectral::Greater, Some(v)),
        };
        if let Some(v) = vec {
            if rank_order(rank) > rank_order(verdict) || witness.is_none() {
                let mut full = vec![BigRational::zero(); k];
                for (pos, &i) in idx.iter().enumerate() {
                    full[i] = v[pos].clone();
                }
                witness = Some(full);
            }
        }
        if rank_order(rank) > rank_order(verdict) {
            verdict = rank;
        }
        blocks.push(BlockCertificate { indices: idx, bound });
    }
    if k == 0 {
        lambda = 0.0;
    }
    SpectralCertificate { verdict, blocks, witness, lambda }
}

fn rank_order(s: Spectral) -> u8 {
    match s {
        Spectral::Less => 0,
        Spectral::Equal => 1,
        Spectral::Greater => 2,
    }
}

impl SpectralCertificate {
    /// Re-checks every inequality exactly against `m`.
    pub fn verify(&self, m: &[Vec<BigRational>]) -> bool {
        let k = m.len();
        let mut covered = vec![0usize; k];
        let one = BigRational::one();
        let mut worst = Spectral::Less;
        for blk in &self.blocks {
            for &i in &blk.indices {
                if i >= k {
                    return false;
                }
                covered[i] += 1;
            }
            let b = sub(m, &blk.indices);
            let ok = match &blk.bound {
                BlockBound::Below { u, theta } => {
                    theta < &one
                        && u.iter().all(|x| x.is_positive())
                        && mat_vec(&b, u).iter().zip(u).all(|(bu, x)| bu <= &(theta * x))
                }
                BlockBound::Fixed { v } => v.iter().all(|x| x.is_positive()) && mat_vec(&b, v) == *v,
                BlockBound::Above { v, theta } => {
                    theta > &one
                        && v.iter().all(|x| x.is_positive())
                        && mat_vec(&b, v).iter().zip(v).all(|(bv, x)| bv >= &(theta * x))
                }
            };
            if !ok {
                return false;
            }
            let r = match blk.bound {
                BlockBound::Below { .. } => Spectral::Less,
                BlockBound::Fixed { .. } => Spectral::Equal,
                BlockBound::Above { .. } => Spectral::Greater,
            };
            if rank_order(r) > rank_order(worst) {
                worst = r;
            }
        }
        // every index in exactly one block, and blocks closed under mutual reachability
        if covered.iter().any(|&c| c != 1) || strongly_connected(m).len() != self.blocks.len() {
            return false;
        }
        if worst != self.verdict {
            return false;
        }
        match (&self.witness, self.verdict) {
            (None, Spectral::Less) => true,
            (Some(v), Spectral::Equal | Spectral::Greater) => {
                v.len() == k
                    && v.iter().all(|x| !x.is_negative())
                    && v.iter().any(|x| x.is_positive())
                    && mat_vec(m, v).iter().zip(v).all(|(mv, x)| mv >= x)
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevyCycle {
    /// Curve indices; each curve has a degree-1 preimage homotopic to the next.
    pub curves: Vec<usize>,
    pub degenerate: bool,
}

/// Simple cycles of the graph with an edge `γ → δ` whenever `γ` has a
/// degree-1 essential preimage homotopic to `δ` (so `f` carries `δ` onto `γ`).
pub fn find_levy_cycles(c: &CoverPresentation, gamma: &Multicurve) -> Result<Vec<LevyCycle>, ObstructionError> {
    let k = gamma.len();
    // edges[γ] = (δ, sheet) for each degree-1 preimage
    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); k];
    for (g, curve) in gamma.curves().iter().enumerate() {
        for comp in c.pullback_curve(curve)? {
            if comp.degree == 1 && comp.kind == CurveType::Essential {
                if let Some(d) = gamma.curves().iter().position(|x| *x.class() == comp.class) {
                    edges[g].push((d, comp.sheet));
                }
            }
        }
    }
    let mut cycles = Vec::new();
    for start in 0..k {
        let mut path = vec![start];
        let mut sheets = Vec::new();
        simple_cycles(&edges, start, &mut path, &mut sheets, &mut |p, s| {
            let degenerate = p.iter().zip(s).all(|(&g, &sheet)| homeomorphic_side(c, &gamma.curves()[g], sheet));
            cycles.push(LevyCycle { curves: p.to_vec(), degenerate });
        });
    }
    Ok(cycles)
}

fn simple_cycles(
    edges: &[Vec<(usize, usize)>],
    start: usize,
    path: &mut Vec<usize>,
    sheets: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize], &[usize]),
) {
    let v = *path.last().expect("nonempty");
    for &(w, sheet) in &edges[v] {
        sheets.push(sheet);
        if w == start {
            emit(path, sheets);
        } else if w > start && !path.contains(&w) {
            path.push(w);
            simple_cycles(edges, start, path, sheets, emit);
            path.pop();
        }
        sheets.pop();
    }
}

/// Some complementary disk of the standard curve `γ` has a preimage at `sheet`
/// that maps to it with degree 1.
fn homeomorphic_side(c: &CoverPresentation, gamma: &CurveClass, sheet: usize) -> bool {
    let Some((i, j)) = gamma.standard() else { return false };
    let n = c.punctures();
    let base = c.base();
    let side = |inside: bool| {
        let gens: Vec<Perm> = (1..=n)
            .filter(|k| (i..=j).contains(k) == inside)
            .map(|k| c.monodromy_of(&base.loop_word(k).expect("in range")))
            .collect();
        let refs: Vec<&Perm> = gens.iter().collect();
        orbit(&refs, c.degree(), sheet).len() == 1
    };
    side(true) || side(false)
}

/// Adds essential preimage classes until the family is invariant.
pub fn stable_saturation(c: &CoverPresentation, seed: &Multicurve, budget: usize) -> Result<Multicurve, ObstructionError> {
    let limit = c.punctures().saturating_sub(3);
    let mut curves: Vec<CurveClass> = seed.curves().to_vec();
    for _ in 0..=budget {
        let mut added = false;
        let mut next = curves.clone();
        for g in &curves {
            for comp in c.pullback_curve(g)? {
                if comp.kind == CurveType::Essential && !next.iter().any(|d| *d.class() == comp.class) {
                    let curve = CurveClass::image_of(c.base(), comp.class.word(), g.declared_simple())
                        .map_err(|_| ObstructionError::Overflow { limit })?;
                    next.push(curve);
                    added = true;
                }
            }
        }
        if next.len() > limit {
            return Err(ObstructionError::Overflow { limit });
        }
        curves = next;
        if !added {
            let provenance = if curves.len() == seed.len() { seed.provenance() } else { DisjointnessProvenance::Pullback };
            return Ok(Multicurve::new(curves, provenance).expect("classes are distinct"));
        }
    }
    Err(ObstructionError::Overflow { limit })
}
