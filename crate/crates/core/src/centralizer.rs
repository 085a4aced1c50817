//! Bounded centralizer and conjugator searches over the twist generating set,
//! multitwist and assembly helpers, and commutants in GL(2,ℤ).

use num::rational::Ratio;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::freegroup::{Decision, ReducedWord};
use crate::mapping_class::{commute, mc_equal, word_length, Ball, GeneratorSet, MappingClass, McError, WordLength};
use crate::sphere::Multicurve;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CentralizerError {
    #[error("multicurve is not invariant: image of curve {0} is not in the multicurve")]
    NotInvariant(usize),
    #[error("part `{part}` element {index} does not commute with the target")]
    ContractViolation { part: String, index: usize },
    #[error("matrix has determinant {0}, expected ±1")]
    NotUnimodular(i64),
    #[error("fundamental solution exceeds the search limit")]
    PellOverflow,
    #[error(transparent)]
    MappingClass(#[from] McError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Completeness {
    /// The full radius `ceil(M0·‖φ‖)` was enumerated.
    CertifiedUpTo(String),
    HeuristicBudget,
}

#[derive(Debug, Clone)]
pub struct CommutingGenerator {
    pub class: MappingClass,
    /// `g` with `(gen∘φ)(x) = g · (φ∘gen)(x) · g⁻¹`.
    pub witness: ReducedWord,
}

#[derive(Debug, Clone)]
pub struct CentralizerResult {
    pub target: MappingClass,
    pub generators: Vec<CommutingGenerator>,
    pub search_radius: usize,
    pub target_length: usize,
    pub completeness: Completeness,
    /// Elements kept only because an equality test was undecided.
    pub kept_undecided: usize,
}

pub fn ceil_ratio(r: &Ratio<u64>, k: usize) -> usize {
    let p = r * Ratio::from_integer(k as u64);
    p.ceil().to_integer() as usize
}

fn length_of(phi: &MappingClass, gens: &GeneratorSet, budget: usize) -> (usize, bool) {
    match word_length(phi, gens, budget) {
        WordLength::Exact { length, .. } => (length, true),
        WordLength::UpperBoundOnly(l) => (l, false),
    }
}

/// Elements of `ball` reachable from the identity through products of `gens`
/// without leaving the ball.
struct Closure {
    reached: Vec<bool>,
    undecided: bool,
}

impl Closure {
    fn new(size: usize) -> Self {
        let mut reached = vec![false; size];
        reached[0] = true;
        Closure { reached, undecided: false }
    }

    fn extend(&mut self, ball: &Ball, all_gens: &[MappingClass]) {
        let mut queue: Vec<usize> = (0..self.reached.len()).filter(|&k| self.reached[k]).collect();
        while let Some(k) = queue.pop() {
            for g in all_gens {
                for step in [g.clone(), g.inverse()] {
                    let next = ball.entries()[k].compose(&step).expect("same surface");
                    match locate(ball, &next) {
                        Located::At(j) if !self.reached[j] => {
                            self.reached[j] = true;
                            queue.push(j);
                        }
                        Located::Undecided => self.undecided = true,
                        _ => {}
                    }
                }
            }
        }
    }
}

enum Located {
    At(usize),
    Absent,
    Undecided,
}

fn locate(ball: &Ball, m: &MappingClass) -> Located {
    let mut undecided = false;
    for k in ball.candidates(m) {
        match mc_equal(&ball.entries()[k], m, None) {
            Ok(Decision::Yes(_)) => return Located::At(k),
            Ok(Decision::Undecided { .. }) => undecided = true,
            _ => {}
        }
    }
    if undecided {
        Located::Undecided
    } else {
        Located::Absent
    }
}

/// Enumerates the ball of radius `min(max(1, ceil(M0·‖φ‖)), budget)`, keeps the
/// elements commuting with `φ`, and greedily drops those already generated
/// (inside the ball) by earlier ones.
pub fn centralizer_search(
    phi: &MappingClass,
    gens: &GeneratorSet,
    m0: &Ratio<u64>,
    budget: usize,
) -> Result<CentralizerResult, CentralizerError> {
    let (len, exact) = length_of(phi, gens, budget);
    let full = ceil_ratio(m0, len).max(1);
    let radius = full.min(budget);
    let mut ball = Ball::new(gens);
    let mut enumerated = true;
    while ball.radius() < radius {
        if !ball.grow(usize::MAX) {
            enumerated = false;
            break;
        }
    }
    let mut generators: Vec<CommutingGenerator> = Vec::new();
    let mut closure = Closure::new(ball.entries().len());
    let mut kept_undecided = 0;
    for k in 1..ball.entries().len() {
        if closure.reached[k] {
            continue;
        }
        let g = &ball.entries()[k];
        match commute(g, phi)? {
            Decision::Yes(witness) => {
                if closure.undecided {
                    kept_undecided += 1;
                }
                generators.push(CommutingGenerator { class: g.clone(), witness });
                let classes: Vec<MappingClass> = generators.iter().map(|c| c.class.clone()).collect();
                closure.extend(&ball, &classes);
            }
            Decision::No => {}
            Decision::Undecided { .. } => kept_undecided += 1,
        }
    }
    let completeness = if exact && enumerated && radius == full {
        Completeness::CertifiedUpTo(m0.to_string())
    } else {
        Completeness::HeuristicBudget
    };
    Ok(CentralizerResult {
        target: phi.clone(),
        generators,
        search_radius: radius,
        target_length: len,
        completeness,
        kept_undecided,
    })
}

/// Exponent sum of each generator in a word. For the full-twist generating set
/// the standard twists map to a basis of the abelianized pure mapping class
/// group, so these sums are conjugacy invariants.
pub fn twist_exponents(word: &[i32], generators: usize) -> Vec<i64> {
    let mut v = vec![0i64; generators];
    for &g in word {
        v[g.unsigned_abs() as usize - 1] += i64::from(g.signum());
    }
    v
}

#[derive(Debug, Clone)]
pub enum ConjugatorOutcome {
    /// `η∘φ = φ′∘η`, with outer-equality witness.
    Found { eta: MappingClass, witness: ReducedWord },
    /// A conjugacy invariant differs.
    NotConjugate { reason: String },
    /// No conjugator of length at most `radius`; `certified` when the radius is the full bound.
    NotConjugateWithin { radius: usize, certified: bool },
    Inconclusive { radius: usize, undecided: usize },
}

pub fn conjugator_search(
    phi: &MappingClass,
    phi2: &MappingClass,
    gens: &GeneratorSet,
    k: &Ratio<u64>,
    budget: usize,
) -> Result<ConjugatorOutcome, CentralizerError> {
    if phi.puncture_perm().cycle_type() != phi2.puncture_perm().cycle_type() {
        return Ok(ConjugatorOutcome::NotConjugate { reason: "puncture permutation cycle types differ".into() });
    }
    if gens.kind() == crate::mapping_class::TwistKind::Full && phi.is_pure() && phi2.is_pure() {
        if let (Some(a), Some(b)) = (phi.word(), phi2.word()) {
            if twist_exponents(a, gens.len()) != twist_exponents(b, gens.len()) {
                return Ok(ConjugatorOutcome::NotConjugate { reason: "abelianized twist exponents differ".into() });
            }
        }
    }
    let (l1, e1) = length_of(phi, gens, budget);
    let (l2, e2) = length_of(phi2, gens, budget);
    let full = ceil_ratio(k, l1 + l2);
    let radius = full.min(budget);
    let mut ball = Ball::new(gens);
    let mut undecided = 0;
    let mut r = 0;
    loop {
        for eta in ball.level(r) {
            let lhs = eta.compose(phi)?;
            let rhs = phi2.compose(eta)?;
            if lhs.fingerprint() != rhs.fingerprint() {
                continue;
            }
            match mc_equal(&lhs, &rhs, None)? {
                Decision::Yes(witness) => return Ok(ConjugatorOutcome::Found { eta: eta.clone(), witness }),
                Decision::Undecided { .. } => undecided += 1,
                Decision::No => {}
            }
        }
        if r >= radius {
            break;
        }
        if !ball.grow(usize::MAX) {
            break;
        }
        r += 1;
    }
    if undecided > 0 || ball.undecided() > 0 {
        return Ok(ConjugatorOutcome::Inconclusive { radius: r, undecided: undecided + ball.undecided() });
    }
    Ok(ConjugatorOutcome::NotConjugateWithin { radius: r, certified: e1 && e2 && r == full })
}

/// One multitwist per φ-orbit of curves in `gamma`, skipping orbits whose
/// return map reverses orientation. `twists[k]` is the twist about curve `k`.
pub fn admissible_multitwists(
    phi: &MappingClass,
    gamma: &Multicurve,
    twists: &[MappingClass],
    reversing: &[bool],
) -> Result<Vec<MappingClass>, CentralizerError> {
    let orbits = curve_orbits(phi, gamma)?;
    let mut out = Vec::new();
    for (k, orbit) in orbits.iter().enumerate() {
        if reversing.get(k).copied().unwrap_or(false) {
            continue;
        }
        let mut m = MappingClass::identity(phi.surface());
        for &c in orbit {
            m = m.compose(&twists[c])?;
        }
        out.push(m);
    }
    Ok(out)
}

/// φ-orbits on the curves of `gamma`, each listed from its least index along
/// the dynamics; orbits ordered by least index.
pub fn curve_orbits(phi: &MappingClass, gamma: &Multicurve) -> Result<Vec<Vec<usize>>, CentralizerError> {
    let curves = gamma.curves();
    let mut next = Vec::with_capacity(curves.len());
    for (k, c) in curves.iter().enumerate() {
        let img = phi.act_on_curve(c)?;
        next.push(gamma.position(&img).ok_or(CentralizerError::NotInvariant(k))?);
    }
    let mut seen = vec![false; curves.len()];
    let mut orbits = Vec::new();
    for start in 0..curves.len() {
        if seen[start] {
            continue;
        }
        let mut orbit = vec![start];
        seen[start] = true;
        let mut c = next[start];
        while c != start {
            seen[c] = true;
            orbit.push(c);
            c = next[c];
        }
        orbits.push(orbit);
    }
    Ok(orbits)
}

/// Whether `φ^j` returns the oriented curve `w` to itself with its orientation.
pub fn orientation_preserved(phi: &MappingClass, w: &ReducedWord, j: usize) -> bool {
    let pj = phi.pow(j as i64);
    pj.act_on_oriented(w) == crate::freegroup::OrientedClass::of(w)
}

/// Union of generator families, each checked to commute with `φ`; identities
/// and repeats are dropped.
pub fn assemble_centralizer_generators(
    phi: &MappingClass,
    parts: &[(String, Vec<MappingClass>)],
) -> Result<Vec<CommutingGenerator>, CentralizerError> {
    let id = MappingClass::identity(phi.surface());
    let mut out: Vec<CommutingGenerator> = Vec::new();
    for (name, elems) in parts {
        for (index, g) in elems.iter().enumerate() {
            let witness = match commute(g, phi)? {
                Decision::Yes(w) => w,
                _ => return Err(CentralizerError::ContractViolation { part: name.clone(), index }),
            };
            if mc_equal(g, &id, None)?.is_yes() {
                continue;
            }
            let mut dup = false;
            for e in &out {
                if mc_equal(&e.class, g, None)?.is_yes() {
                    dup = true;
                    break;
                }
            }
            if !dup {
                out.push(CommutingGenerator { class: g.clone(), witness });
            }
        }
    }
    Ok(out)
}

/// Subgroup of the ball generated (without leaving the ball) by `gens`, as entry indices.
pub fn generated_within(ball: &Ball, gens: &[MappingClass]) -> HashSet<usize> {
    let mut c = Closure::new(ball.entries().len());
    c.extend(ball, gens);
    c.reached.iter().enumerate().filter(|(_, &r)| r).map(|(k, _)| k).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntMatrix2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IntMatrix2 {
    pub const IDENTITY: IntMatrix2 = IntMatrix2 { a: 1, b: 0, c: 0, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        IntMatrix2 { a, b, c, d }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    pub fn mul(&self, o: &IntMatrix2) -> IntMatrix2 {
        IntMatrix2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn neg(&self) -> IntMatrix2 {
        IntMatrix2 { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    /// Inverse of a unimodular matrix.
    pub fn inverse(&self) -> IntMatrix2 {
        let e = self.det();
        IntMatrix2 { a: self.d * e, b: -self.b * e, c: -self.c * e, d: self.a * e }
    }

    pub fn commutes_with(&self, o: &IntMatrix2) -> bool {
        self.mul(o) == o.mul(self)
    }

    pub fn max_abs(&self) -> i64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }
}

impl std::fmt::Display for IntMatrix2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CommutantCase {
    Hyperbolic,
    Parabolic,
    EllipticOrCentral,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commutant {
    pub generators: Vec<IntMatrix2>,
    pub case: CommutantCase,
    /// `A = ±I`: every unimodular matrix commutes.
    pub whole_group: bool,
}

fn isqrt(x: i128) -> Option<i128> {
    if x < 0 {
        return None;
    }
    let mut r = (x as f64).sqrt() as i128;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    (r * r == x).then_some(r)
}

/// Unimodular integer matrices commuting with `A` (determinant ±1 allowed).
///
/// Writing a commuting matrix as `wI + vB` with `B = [[p, q], [r, 0]]` the
/// primitive traceless-shifted part of `A`, unimodularity reads
/// `s² − D v² = ±4` with `s = 2w + pv` and `D = p² + 4qr`.
pub fn sl2z_commutant(m: &IntMatrix2) -> Result<Commutant, CentralizerError> {
    let det = m.det();
    if det.abs() != 1 {
        return Err(CentralizerError::NotUnimodular(det));
    }
    let minus = IntMatrix2::IDENTITY.neg();
    if m.b == 0 && m.c == 0 && m.a == m.d {
        let gens = vec![
            IntMatrix2::new(0, -1, 1, 0),
            IntMatrix2::new(1, 1, 0, 1),
            IntMatrix2::new(1, 0, 0, -1),
        ];
        return Ok(Commutant { generators: gens, case: CommutantCase::EllipticOrCentral, whole_group: true });
    }
    let g = num::integer::gcd(num::integer::gcd(m.b, m.c), m.a - m.d);
    let (p, q, r) = ((m.a - m.d) / g, m.b / g, m.c / g);
    let disc = i128::from(p * p + 4 * q * r);
    let build = |s: i128, v: i128| -> Option<IntMatrix2> {
        let twice_w = s - i128::from(p) * v;
        if twice_w % 2 != 0 {
            return None;
        }
        let w = (twice_w / 2) as i64;
        let v = v as i64;
        Some(IntMatrix2::new(w + v * p, v * q, v * r, w))
    };
    if disc == 0 {
        let x = build(2, 1).or_else(|| build(2, 2)).expect("parabolic generator");
        return Ok(Commutant { generators: vec![minus, x], case: CommutantCase::Parabolic, whole_group: false });
    }
    let square = isqrt(disc).filter(|_| disc > 0);
    if disc < 0 || square.is_some() {
        let mut out = Vec::new();
        for v in -4i128..=4 {
            for s in -4i128..=4 {
                let lhs = s * s - disc * v * v;
                if lhs.abs() != 4 {
                    continue;
                }
                if let Some(x) = build(s, v) {
                    if x.det().abs() == 1 && !out.contains(&x) {
                        out.push(x);
                    }
                }
            }
        }
        out.sort();
        return Ok(Commutant { generators: out, case: CommutantCase::EllipticOrCentral, whole_group: false });
    }
    const LIMIT: i128 = 10_000_000;
    for v in 1..=LIMIT {
        for sign in [-4i128, 4] {
            if let Some(s) = isqrt(disc * v * v + sign) {
                if let Some(x) = build(s, v) {
                    debug_assert!(x.commutes_with(m) && x.det().abs() == 1);
                    return Ok(Commutant { generators: vec![minus, x], case: CommutantCase::Hyperbolic, whole_group: false });
                }
            }
        }
    }
    Err(CentralizerError::PellOverflow)
}
