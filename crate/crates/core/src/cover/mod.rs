//! Thurston maps as combinatorial branched covers.
//!
//! A presentation lists, for every puncture `q_i`, the monodromy `ρ(x_i)` (a
//! right action on sheets) and, for every sheet `s`, the restriction word: the
//! lift of `x_i` starting at sheet `s`, closed up with the connecting paths and
//! read in the same π₁ basis as the base (marked points upstairs are the same
//! set `Q`). Restrictions extend to all words by
//! `res(uv, s) = res(u, s) · res(v, s·ρ(u))`.

mod decompose;
mod hurwitz;
mod lift;

pub use decompose::{decompose, Component, ComponentCycle, DecompositionData};
pub use hurwitz::{hurwitz_orbit, same_hurwitz_class, HurwitzDecision, HurwitzMove, HurwitzTuple, HurwitzWitness};
pub use lift::{lift_mapping_class, lifts_through, LiftError};

use num::rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::freegroup::{ConjClass, OrientedClass, ReducedWord};
use crate::mapping_class::MappingClass;
use crate::perm::{is_transitive, Perm};
use crate::sphere::{CurveClass, CurveType, PuncturedSphere};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoverError {
    #[error("degree must be at least 2")]
    DegreeTooSmall,
    #[error("malformed presentation: {0}")]
    Shape(String),
    #[error("invalid presentation: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("curve lives on a different surface")]
    SurfaceMismatch,
}

/// A named invariant failure found by [`CoverPresentation::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
pub enum Violation {
    #[error("MonodromyProductViolation: product of monodromy is not the identity")]
    MonodromyProductViolation,
    #[error("DisconnectedCover: monodromy is not transitive")]
    DisconnectedCover,
    #[error("RiemannHurwitz: total branching {sum}, expected {expected}")]
    RiemannHurwitz { sum: usize, expected: usize },
    #[error("RelatorLift: lift of x1⋯xn at sheet {sheet} is not trivial")]
    RelatorLift { sheet: usize },
    #[error("PeripheralCycle: cycle of q{puncture} at sheet {sheet} lifts to a non-peripheral loop")]
    PeripheralCycle { puncture: usize, sheet: usize },
    #[error("PointMap: cycle of q{puncture} encircles q{point}, but q{point} maps to q{image}")]
    PointMap { point: usize, puncture: usize, image: usize },
    #[error("LocalDegree: q{point} has local degree {declared}, cycle length {found}")]
    LocalDegree { point: usize, declared: usize, found: usize },
    #[error("MarkedPointCount: q{point} is encircled by {count} cycles (expected 1)")]
    MarkedPointCount { point: usize, count: usize },
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoverPresentation {
    degree: usize,
    base: PuncturedSphere,
    monodromy: Vec<Perm>,
    restrictions: Vec<Vec<ReducedWord>>,
    point_map: Vec<usize>,
    local_degrees: Vec<usize>,
}

/// One component of the preimage of a curve.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PullbackComponent {
    pub class: ConjClass,
    pub degree: usize,
    pub kind: CurveType,
    /// First sheet of the cycle of `ρ(w)` this component comes from.
    pub sheet: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrbifoldType {
    Hyperbolic,
    Parabolic2222,
    ParabolicOther,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Weight {
    Finite(u64),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbifold {
    pub kind: OrbifoldType,
    /// Weight of each marked point.
    pub weights: Vec<Weight>,
    pub euler_characteristic: Ratio<i64>,
}

impl CoverPresentation {
    /// Structural construction; `restrictions` has `n` rows of `d` words, or
    /// `n − 1` rows with the last puncture's row derived from the relation.
    pub fn new(
        degree: usize,
        base: PuncturedSphere,
        monodromy: Vec<Perm>,
        mut restrictions: Vec<Vec<ReducedWord>>,
        point_map: Vec<usize>,
        local_degrees: Vec<usize>,
    ) -> Result<Self, CoverError> {
        let n = base.punctures();
        let r = base.rank();
        if degree < 2 {
            return Err(CoverError::DegreeTooSmall);
        }
        if monodromy.len() != n || monodromy.iter().any(|p| p.degree() != degree) {
            return Err(CoverError::Shape(format!("need {n} monodromy permutations of degree {degree}")));
        }
        if point_map.len() != n || point_map.iter().any(|&q| q >= n) {
            return Err(CoverError::Shape("point map must send each puncture to a puncture".into()));
        }
        if local_degrees.len() != n || local_degrees.iter().any(|&k| k == 0 || k > degree) {
            return Err(CoverError::Shape(format!("local degrees must lie in 1..={degree}")));
        }
        if restrictions.len() != n && restrictions.len() != n - 1 {
            return Err(CoverError::Shape(format!("need restriction rows for {} or {n} punctures", n - 1)));
        }
        for row in &restrictions {
            if row.len() != degree || row.iter().any(|w| w.rank() != r) {
                return Err(CoverError::Shape(format!("each restriction row needs {degree} words of rank {r}")));
            }
        }
        let derive_last = restrictions.len() == n - 1;
        if derive_last {
            restrictions.push(vec![ReducedWord::identity(r); degree]);
        }
        let mut c = CoverPresentation { degree, base, monodromy, restrictions, point_map, local_degrees };
        if derive_last {
            c.restrictions[n - 1] = c.derived_last_row();
        }
        Ok(c)
    }

    /// Row for `x_n` forced by `res(x₁⋯x_n, s) = 1`.
    fn derived_last_row(&self) -> Vec<ReducedWord> {
        let n = self.base.punctures();
        let mut row = vec![ReducedWord::identity(self.base.rank()); self.degree];
        for s in 0..self.degree {
            let mut acc = ReducedWord::identity(self.base.rank());
            let mut t = s;
            for i in 0..n - 1 {
                acc = acc.mul(&self.restrictions[i][t]);
                t = self.monodromy[i].apply(t);
            }
            row[t] = acc.inverse();
        }
        row
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> &PuncturedSphere {
        &self.base
    }

    pub fn punctures(&self) -> usize {
        self.base.punctures()
    }

    /// `ρ(x_i)`, 0-based puncture index.
    pub fn monodromy(&self) -> &[Perm] {
        &self.monodromy
    }

    pub fn restriction(&self, puncture: usize, sheet: usize) -> &ReducedWord {
        &self.restrictions[puncture][sheet]
    }

    pub fn restrictions(&self) -> &[Vec<ReducedWord>] {
        &self.restrictions
    }

    pub fn point_map(&self) -> &[usize] {
        &self.point_map
    }

    pub fn local_degrees(&self) -> &[usize] {
        &self.local_degrees
    }

    /// `ρ(w)` for a word in the free basis `x₁..x_{n−1}`.
    pub fn monodromy_of(&self, w: &ReducedWord) -> Perm {
        let mut p = Perm::identity(self.degree);
        for l in w.letters() {
            let g = &self.monodromy[l.generator() - 1];
            p = if l.is_positive() { p.then(g) } else { p.then(&g.inverse()) };
        }
        p
    }

    /// Restriction of `w` at sheet `s` and the end sheet `s·ρ(w)`.
    pub fn restrict(&self, w: &ReducedWord, sheet: usize) -> (ReducedWord, usize) {
        let mut acc = ReducedWord::identity(self.base.rank());
        let mut s = sheet;
        for l in w.letters() {
            let k = l.generator() - 1;
            if l.is_positive() {
                acc = acc.mul(&self.restrictions[k][s]);
                s = self.monodromy[k].apply(s);
            } else {
                let t = self.monodromy[k].inverse().apply(s);
                acc = acc.mul(&self.restrictions[k][t].inverse());
                s = t;
            }
        }
        (acc, s)
    }

    /// The loop around the preimage point met by the cycle of `ρ(x_i)` through `s`.
    pub fn cycle_restriction(&self, puncture: usize, sheet: usize) -> (ReducedWord, usize) {
        let mut acc = ReducedWord::identity(self.base.rank());
        let mut s = sheet;
        let mut len = 0;
        loop {
            acc = acc.mul(&self.restrictions[puncture][s]);
            s = self.monodromy[puncture].apply(s);
            len += 1;
            if s == sheet {
                return (acc, len);
            }
        }
    }

    /// Marked point encircled by each cycle of each `ρ(x_i)`: `(puncture, first sheet, length, point)`.
    pub fn fiber_points(&self) -> Vec<(usize, usize, usize, Option<usize>)> {
        let n = self.punctures();
        let loops: Vec<OrientedClass> =
            (1..=n).map(|k| OrientedClass::of(&self.base.loop_word(k).expect("in range"))).collect();
        let mut out = Vec::new();
        for q in 0..n {
            for cycle in self.monodromy[q].cycles() {
                let (w, len) = self.cycle_restriction(q, cycle[0]);
                let point = if w.is_identity() {
                    None
                } else {
                    let oc = OrientedClass::of(&w);
                    loops.iter().position(|l| *l == oc)
                };
                out.push((q, cycle[0], len, point));
            }
        }
        out
    }

    /// All violated invariants (empty when valid).
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.punctures();
        let d = self.degree;
        let mut v = Vec::new();
        let product = self.monodromy.iter().fold(Perm::identity(d), |acc, p| acc.then(p));
        if !product.is_identity() {
            v.push(Violation::MonodromyProductViolation);
        }
        let gens: Vec<&Perm> = self.monodromy.iter().collect();
        if !is_transitive(&gens, d) {
            v.push(Violation::DisconnectedCover);
        }
        let sum: usize = self.monodromy.iter().map(|p| d - p.cycle_count()).sum();
        if sum != 2 * d - 2 {
            v.push(Violation::RiemannHurwitz { sum, expected: 2 * d - 2 });
        }
        if product.is_identity() {
            let derived = self.derived_last_row();
            for (s, w) in derived.iter().enumerate() {
                if *w != self.restrictions[n - 1][s] {
                    v.push(Violation::RelatorLift { sheet: s + 1 });
                }
            }
        }
        let mut claims = vec![0usize; n];
        for q in 0..n {
            for cycle in self.monodromy[q].cycles() {
                let (w, len) = self.cycle_restriction(q, cycle[0]);
                if w.is_identity() {
                    continue;
                }
                let oc = OrientedClass::of(&w);
                let hit = (1..=n).position(|k| OrientedClass::of(&self.base.loop_word(k).expect("in range")) == oc);
                match hit {
                    None => v.push(Violation::PeripheralCycle { puncture: q + 1, sheet: cycle[0] + 1 }),
                    Some(p) => {
                        claims[p] += 1;
                        if self.point_map[p] != q {
                            v.push(Violation::PointMap { point: p + 1, puncture: q + 1, image: self.point_map[p] + 1 });
                        }
                        if self.local_degrees[p] != len {
                            v.push(Violation::LocalDegree { point: p + 1, declared: self.local_degrees[p], found: len });
                        }
                    }
                }
            }
        }
        for (p, &count) in claims.iter().enumerate() {
            if count != 1 {
                v.push(Violation::MarkedPointCount { point: p + 1, count });
            }
        }
        v
    }

    pub fn validated(self) -> Result<Self, CoverError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(CoverError::Invalid(v))
        }
    }

    /// Punctures over which some cycle of the monodromy is nontrivial.
    pub fn critical_values(&self) -> Vec<usize> {
        (0..self.punctures()).filter(|&q| !self.monodromy[q].is_identity()).collect()
    }

    /// Forward orbits (after at least one step) of the critical values, sorted.
    pub fn postcritical_set(&self) -> Vec<usize> {
        let mut seen = vec![false; self.punctures()];
        let mut stack: Vec<usize> = self.critical_values();
        for &q in &stack {
            seen[q] = true;
        }
        while let Some(q) = stack.pop() {
            let next = self.point_map[q];
            if !seen[next] {
                seen[next] = true;
                stack.push(next);
            }
        }
        (0..self.punctures()).filter(|&q| seen[q]).collect()
    }

    /// Preimage components of `γ`: one per cycle of `ρ(w)`, with degree the cycle length.
    pub fn pullback_curve(&self, gamma: &CurveClass) -> Result<Vec<PullbackComponent>, CoverError> {
        if gamma.punctures() != self.punctures() {
            return Err(CoverError::SurfaceMismatch);
        }
        Ok(self.pullback_word(gamma.word()))
    }

    pub fn pullback_word(&self, w: &ReducedWord) -> Vec<PullbackComponent> {
        let rho = self.monodromy_of(w);
        let mut out = Vec::new();
        for cycle in rho.cycles() {
            let m = cycle.len();
            let (lift, end) = self.restrict(&w.pow(m as i64), cycle[0]);
            debug_assert_eq!(end, cycle[0]);
            let class = ConjClass::of(&lift);
            let kind = self.base.classify(&class);
            out.push(PullbackComponent { class, degree: m, kind, sheet: cycle[0] });
        }
        out
    }

    pub fn orbifold(&self) -> Orbifold {
        let n = self.punctures();
        const CAP: u64 = 1 << 40;
        let mut nu: Vec<Weight> = vec![Weight::Finite(1); n];
        let fibers = self.fiber_points();
        for _ in 0..(64 * n + 4) {
            let mut next = vec![Weight::Finite(1); n];
            for &(q, _, len, point) in &fibers {
                let above = point.map_or(Weight::Finite(1), |p| nu[p]);
                let contrib = match above {
                    Weight::Infinite => Weight::Infinite,
                    Weight::Finite(k) => {
                        let v = k.saturating_mul(len as u64);
                        if v > CAP {
                            Weight::Infinite
                        } else {
                            Weight::Finite(v)
                        }
                    }
                };
                next[q] = match (next[q], contrib) {
                    (Weight::Infinite, _) | (_, Weight::Infinite) => Weight::Infinite,
                    (Weight::Finite(a), Weight::Finite(b)) => {
                        let l = num::integer::lcm(a, b);
                        if l > CAP {
                            Weight::Infinite
                        } else {
                            Weight::Finite(l)
                        }
                    }
                };
            }
            if next == nu {
                break;
            }
            nu = next;
        }
        let mut chi = Ratio::from_integer(2i64);
        for w in &nu {
            chi -= match w {
                Weight::Infinite => Ratio::from_integer(1),
                Weight::Finite(k) => Ratio::new(*k as i64 - 1, *k as i64),
            };
        }
        let ramified: Vec<Weight> = nu.iter().copied().filter(|w| *w != Weight::Finite(1)).collect();
        let kind = if chi < Ratio::from_integer(0) {
            OrbifoldType::Hyperbolic
        } else if ramified == vec![Weight::Finite(2); 4] {
            OrbifoldType::Parabolic2222
        } else {
            OrbifoldType::ParabolicOther
        };
        Orbifold { kind, weights: nu, euler_characteristic: chi }
    }

    pub fn orbifold_type(&self) -> OrbifoldType {
        self.orbifold().kind
    }

    /// Same map with sheet `s` renamed `τ(s)`.
    pub fn relabel_sheets(&self, tau: &Perm) -> CoverPresentation {
        let monodromy = self.monodromy.iter().map(|p| p.conjugate_by(tau)).collect();
        let restrictions = self
            .restrictions
            .iter()
            .map(|row| {
                let mut out = row.clone();
                for (s, w) in row.iter().enumerate() {
                    out[tau.apply(s)] = w.clone();
                }
                out
            })
            .collect();
        CoverPresentation { monodromy, restrictions, ..self.clone() }
    }

    /// Presentation of `h ∘ f ∘ h⁻¹`; `h` lifts to itself by construction.
    pub fn conjugate_by(&self, h: &MappingClass) -> CoverPresentation {
        let n = self.punctures();
        let sigma = h.puncture_perm();
        let hinv = h.inverse();
        let mut monodromy = Vec::with_capacity(n);
        let mut restrictions = Vec::with_capacity(n);
        for k in 1..=n {
            let pre = hinv.act_on_word(&self.base.loop_word(k).expect("in range"));
            monodromy.push(self.monodromy_of(&pre));
            restrictions.push((0..self.degree).map(|s| h.act_on_word(&self.restrict(&pre, s).0)).collect());
        }
        let mut point_map = vec![0; n];
        let mut local_degrees = vec![1; n];
        for p in 0..n {
            point_map[sigma.apply(p)] = sigma.apply(self.point_map[p]);
            local_degrees[sigma.apply(p)] = self.local_degrees[p];
        }
        CoverPresentation { degree: self.degree, base: self.base.clone(), monodromy, restrictions, point_map, local_degrees }
    }

    /// Sheet stabiliser coset graph (sheet `s` as base coset).
    pub fn stabilizer_graph(&self, sheet: usize) -> crate::freegroup::CosetGraph {
        let r = self.base.rank();
        crate::freegroup::CosetGraph::from_action(self.monodromy[..r].to_vec(), sheet)
    }
}

impl std::fmt::Debug for CoverPresentation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Cover(d={}, n={}, ρ=[", self.degree, self.punctures())?;
        for (k, p) in self.monodromy.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "])")
    }
}
