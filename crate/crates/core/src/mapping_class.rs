//! Mapping classes of punctured spheres as outer automorphisms of π₁.
//!
//! Composition is right-to-left: `a.compose(&b)` applies `b` first. A word
//! `[g₁, …, g_k]` of signed generator indices denotes `g₁ ∘ ⋯ ∘ g_k`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

use crate::freegroup::{outer_equal, ConjClass, Decision, FreeAutomorphism, FreeGroupError, OrientedClass, ReducedWord};
use crate::perm::Perm;
use crate::sphere::{CurveClass, PuncturedSphere, SphereError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum McError {
    #[error("automorphism does not permute peripheral classes (x{0} has no peripheral image)")]
    NotPeripheral(usize),
    #[error("no twist formula for non-standard curve {0}")]
    UnsupportedCurve(String),
    #[error("mapping classes live on different surfaces")]
    SurfaceMismatch,
    #[error("generator index {0} out of range")]
    UnknownGenerator(i32),
    #[error(transparent)]
    Sphere(#[from] SphereError),
    #[error(transparent)]
    FreeGroup(#[from] FreeGroupError),
}

#[derive(Clone, Serialize, Deserialize)]
pub struct MappingClass {
    surface: PuncturedSphere,
    auto: FreeAutomorphism,
    word: Option<Vec<i32>>,
    puncture_perm: Perm,
}

fn induced_permutation(s: &PuncturedSphere, auto: &FreeAutomorphism) -> Result<Perm, McError> {
    let n = s.punctures();
    let loops: Vec<OrientedClass> =
        (1..=n).map(|k| OrientedClass::of(&s.loop_word(k).expect("in range"))).collect();
    let mut images = Vec::with_capacity(n);
    for k in 1..=n {
        let img = OrientedClass::of(&auto.apply(&s.loop_word(k)?));
        let j = loops.iter().position(|l| *l == img).ok_or(McError::NotPeripheral(k))?;
        images.push(j as u32);
    }
    Perm::from_images(images).map_err(|_| McError::NotPeripheral(0))
}

impl MappingClass {
    pub fn identity(s: &PuncturedSphere) -> Self {
        MappingClass {
            surface: s.clone(),
            auto: FreeAutomorphism::identity(s.rank()),
            word: Some(Vec::new()),
            puncture_perm: Perm::identity(s.punctures()),
        }
    }

    /// Wraps an automorphism, checking that it permutes the peripheral classes
    /// preserving orientation.
    pub fn from_auto(s: &PuncturedSphere, auto: FreeAutomorphism, word: Option<Vec<i32>>) -> Result<Self, McError> {
        if auto.rank() != s.rank() {
            return Err(McError::FreeGroup(FreeGroupError::RankMismatch { left: s.rank(), right: auto.rank() }));
        }
        let puncture_perm = induced_permutation(s, &auto)?;
        Ok(MappingClass { surface: s.clone(), auto, word, puncture_perm })
    }

    /// Full right-handed twist about `c_{i,j}`: `x_k ↦ W x_k W⁻¹` for `i ≤ k ≤ j`, `W = x_i⋯x_j`.
    pub fn standard_twist(s: &PuncturedSphere, i: usize, j: usize) -> Result<Self, McError> {
        let c = s.standard_curve(i, j)?;
        let r = s.rank();
        let w = s.interval_word(i, j);
        let wi = w.inverse();
        let mut images = Vec::with_capacity(r);
        let mut inverse = Vec::with_capacity(r);
        for k in 1..=r {
            let x = ReducedWord::generator(r, k);
            if (i..=j).contains(&k) {
                images.push(x.conjugated_by(&w));
                inverse.push(x.conjugated_by(&wi));
            } else {
                images.push(x.clone());
                inverse.push(x);
            }
        }
        let index = s
            .filling_system()?
            .iter()
            .position(|d| *d == c)
            .expect("standard curves belong to the filling system") as i32
            + 1;
        Self::from_auto(s, FreeAutomorphism::new(images, inverse)?, Some(vec![index]))
    }

    /// Half-twist `σ_i` exchanging punctures `i` and `i+1`:
    /// `x_i ↦ x_i x_{i+1} x_i⁻¹`, `x_{i+1} ↦ x_i`; its square is the full twist about `c_{i,i+1}`.
    pub fn half_twist(s: &PuncturedSphere, i: usize) -> Result<Self, McError> {
        let n = s.punctures();
        if i == 0 || i >= n {
            return Err(McError::Sphere(SphereError::IndexOutOfRange { index: i, n }));
        }
        let r = s.rank();
        let x = |k: usize| s.loop_word(k).expect("in range");
        let mut images: Vec<ReducedWord> = (1..=r).map(|k| ReducedWord::generator(r, k)).collect();
        let mut inverse = images.clone();
        images[i - 1] = x(i + 1).conjugated_by(&x(i));
        inverse[i - 1] = x(i + 1);
        if i < r {
            images[i] = x(i);
            inverse[i] = x(i).conjugated_by(&x(i + 1).inverse());
        }
        Self::from_auto(s, FreeAutomorphism::new(images, inverse)?, Some(vec![i as i32]))
    }

    /// Twist about `c` when `c` is standard.
    pub fn dehn_twist(s: &PuncturedSphere, c: &CurveClass) -> Result<Self, McError> {
        match c.standard() {
            Some((i, j)) => Self::standard_twist(s, i, j),
            None => Err(McError::UnsupportedCurve(c.to_string())),
        }
    }

    pub fn surface(&self) -> &PuncturedSphere {
        &self.surface
    }

    pub fn auto(&self) -> &FreeAutomorphism {
        &self.auto
    }

    pub fn word(&self) -> Option<&[i32]> {
        self.word.as_deref()
    }

    pub fn with_word(mut self, word: Option<Vec<i32>>) -> Self {
        self.word = word;
        self
    }

    pub fn puncture_perm(&self) -> &Perm {
        &self.puncture_perm
    }

    pub fn is_pure(&self) -> bool {
        self.puncture_perm.is_identity()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MappingClass) -> Result<MappingClass, McError> {
        if !self.surface.same_shape(&other.surface) {
            return Err(McError::SurfaceMismatch);
        }
        let word = match (&self.word, &other.word) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
            _ => None,
        };
        Ok(MappingClass {
            surface: self.surface.clone(),
            auto: self.auto.compose(&other.auto)?,
            word,
            puncture_perm: other.puncture_perm.then(&self.puncture_perm),
        })
    }

    pub fn inverse(&self) -> MappingClass {
        MappingClass {
            surface: self.surface.clone(),
            auto: self.auto.invert(),
            word: self.word.as_ref().map(|w| w.iter().rev().map(|g| -g).collect()),
            puncture_perm: self.puncture_perm.inverse(),
        }
    }

    pub fn pow(&self, e: i64) -> MappingClass {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut acc = MappingClass::identity(&self.surface);
        for _ in 0..e.unsigned_abs() {
            acc = acc.compose(&base).expect("same surface");
        }
        acc
    }

    /// `by ∘ self ∘ by⁻¹`; for a twist this is the twist about the image curve.
    pub fn conjugate(&self, by: &MappingClass) -> Result<MappingClass, McError> {
        by.compose(self)?.compose(&by.inverse())
    }

    pub fn act_on_word(&self, w: &ReducedWord) -> ReducedWord {
        self.auto.apply(w)
    }

    pub fn act_on_curve(&self, c: &CurveClass) -> Result<CurveClass, McError> {
        if c.punctures() != self.surface.punctures() {
            return Err(McError::SurfaceMismatch);
        }
        Ok(CurveClass::image_of(&self.surface, &self.auto.apply(c.word()), c.declared_simple())?)
    }

    pub fn act_on_oriented(&self, w: &ReducedWord) -> OrientedClass {
        OrientedClass::of(&self.auto.apply(w))
    }

    /// Images of the filling system together with the puncture permutation.
    pub fn fingerprint(&self) -> Fingerprint {
        let curves = match self.surface.filling_system() {
            Ok(f) => f.iter().map(|c| ConjClass::of(&self.auto.apply(c.word()))).collect(),
            Err(_) => Vec::new(),
        };
        Fingerprint { perm: self.puncture_perm.clone(), curves }
    }
}

impl fmt::Debug for MappingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.word {
            Some(w) => write!(f, "MC{w:?}"),
            None => write!(f, "MC{:?}", self.auto),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint {
    perm: Perm,
    curves: Vec<ConjClass>,
}

/// Equality of mapping classes: outer equality of the automorphisms plus equal
/// puncture permutations. The witness `g` satisfies `a(x) = g·b(x)·g⁻¹`.
pub fn mc_equal(a: &MappingClass, b: &MappingClass, budget: Option<usize>) -> Result<Decision<ReducedWord>, McError> {
    if !a.surface.same_shape(&b.surface) {
        return Err(McError::SurfaceMismatch);
    }
    if a.puncture_perm != b.puncture_perm {
        return Ok(Decision::No);
    }
    Ok(outer_equal(&a.auto, &b.auto, budget)?)
}

/// `mc_equal(g∘φ, φ∘g)`.
pub fn commute(g: &MappingClass, phi: &MappingClass) -> Result<Decision<ReducedWord>, McError> {
    mc_equal(&g.compose(phi)?, &phi.compose(g)?, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TwistKind {
    /// Full twists about every standard curve (generates the pure group).
    Full,
    /// Half-twists `σ_1..σ_{n−1}` (generates the full group).
    Half,
}

#[derive(Clone, Debug)]
pub struct GeneratorSet {
    surface: PuncturedSphere,
    kind: TwistKind,
    gens: Vec<MappingClass>,
    curves: Vec<Option<CurveClass>>,
    names: Vec<String>,
}

impl GeneratorSet {
    pub fn new(s: &PuncturedSphere, kind: TwistKind) -> Result<Self, McError> {
        let (gens, curves, names) = match kind {
            TwistKind::Full => {
                let wide = s.punctures() > 10;
                let mut gens = Vec::new();
                let mut curves = Vec::new();
                let mut names = Vec::new();
                for c in s.filling_system()? {
                    let (i, j) = c.standard().expect("standard");
                    gens.push(MappingClass::standard_twist(s, i, j)?);
                    names.push(if wide { format!("T{i}_{j}") } else { format!("T{i}{j}") });
                    curves.push(Some(c));
                }
                (gens, curves, names)
            }
            TwistKind::Half => {
                let mut gens = Vec::new();
                let mut names = Vec::new();
                for i in 1..s.punctures() {
                    gens.push(MappingClass::half_twist(s, i)?);
                    names.push(format!("s{i}"));
                }
                let curves = vec![None; gens.len()];
                (gens, curves, names)
            }
        };
        Ok(GeneratorSet { surface: s.clone(), kind, gens, curves, names })
    }

    pub fn full_twists(s: &PuncturedSphere) -> Result<Self, McError> {
        Self::new(s, TwistKind::Full)
    }

    pub fn surface(&self) -> &PuncturedSphere {
        &self.surface
    }

    pub fn kind(&self) -> TwistKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generator(&self, index: usize) -> &MappingClass {
        &self.gens[index - 1]
    }

    pub fn curve(&self, index: usize) -> Option<&CurveClass> {
        self.curves[index - 1].as_ref()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name).map(|k| k + 1)
    }

    /// Letters in shortlex order: `1, −1, 2, −2, …`.
    pub fn letters(&self) -> Vec<i32> {
        (1..=self.gens.len() as i32).flat_map(|g| [g, -g]).collect()
    }

    pub fn letter(&self, g: i32) -> Result<MappingClass, McError> {
        let k = g.unsigned_abs() as usize;
        if g == 0 || k > self.gens.len() {
            return Err(McError::UnknownGenerator(g));
        }
        let m = self.gens[k - 1].clone().with_word(Some(vec![k as i32]));
        Ok(if g > 0 { m } else { m.inverse() })
    }

    pub fn evaluate(&self, word: &[i32]) -> Result<MappingClass, McError> {
        let mut acc = MappingClass::identity(&self.surface);
        for &g in word {
            acc = acc.compose(&self.letter(g)?)?;
        }
        Ok(acc)
    }

    pub fn format_word(&self, word: &[i32]) -> String {
        if word.is_empty() {
            return "1".to_string();
        }
        word.iter()
            .map(|&g| {
                let name = &self.names[g.unsigned_abs() as usize - 1];
                if g > 0 {
                    name.clone()
                } else {
                    format!("{name}^-1")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn shortlex_key(g: i32) -> (u32, bool) {
    (g.unsigned_abs(), g < 0)
}

pub fn shortlex_cmp(a: &[i32], b: &[i32]) -> std::cmp::Ordering {
    a.len()
        .cmp(&b.len())
        .then_with(|| a.iter().map(|&g| shortlex_key(g)).cmp(b.iter().map(|&g| shortlex_key(g))))
}

/// Ball in the Cayley graph of the mapping class group, one representative per
/// element, each carrying its shortlex-least word.
pub struct Ball<'a> {
    gens: &'a GeneratorSet,
    entries: Vec<MappingClass>,
    levels: Vec<usize>,
    index: HashMap<Fingerprint, Vec<usize>>,
    undecided: usize,
}

impl<'a> Ball<'a> {
    pub fn new(gens: &'a GeneratorSet) -> Self {
        let id = MappingClass::identity(gens.surface());
        let mut index = HashMap::new();
        index.insert(id.fingerprint(), vec![0]);
        Ball { gens, entries: vec![id], levels: vec![0, 1], index, undecided: 0 }
    }

    pub fn radius(&self) -> usize {
        self.levels.len() - 2
    }

    pub fn entries(&self) -> &[MappingClass] {
        &self.entries
    }

    pub fn level(&self, r: usize) -> &[MappingClass] {
        &self.entries[self.levels[r]..self.levels[r + 1]]
    }

    /// Equality tests that came back undecided while deduplicating.
    pub fn undecided(&self) -> usize {
        self.undecided
    }

    /// Entries sharing `m`'s fingerprint, in shortlex order.
    pub fn candidates(&self, m: &MappingClass) -> Vec<usize> {
        self.index.get(&m.fingerprint()).cloned().unwrap_or_default()
    }

    pub fn find(&self, m: &MappingClass) -> Option<&MappingClass> {
        let hits = self.index.get(&m.fingerprint())?;
        hits.iter()
            .map(|&k| &self.entries[k])
            .find(|e| matches!(mc_equal(e, m, None), Ok(Decision::Yes(_))))
    }

    /// Adds the next sphere. Returns false (adding nothing) if that would
    /// exceed `max_elements` entries in total.
    pub fn grow(&mut self, max_elements: usize) -> bool {
        let r = self.radius();
        let frontier = self.level(r).to_vec();
        let letters = self.gens.letters();
        let candidates: Vec<(MappingClass, Fingerprint)> = frontier
            .par_iter()
            .flat_map_iter(|m| {
                let last = m.word().and_then(|w| w.last().copied());
                letters
                    .iter()
                    .filter(move |&&g| Some(-g) != last)
                    .map(|&g| {
                        let next = m.compose(&self.gens.letter(g).expect("valid letter")).expect("same surface");
                        let fp = next.fingerprint();
                        (next, fp)
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        let start = self.entries.len();
        let mut added: Vec<MappingClass> = Vec::new();
        let mut new_index: HashMap<Fingerprint, Vec<usize>> = HashMap::new();
        for (m, fp) in candidates {
            let known = self.index.get(&fp).into_iter().flatten().map(|&k| &self.entries[k]);
            let fresh = new_index.get(&fp).into_iter().flatten().map(|&k| &added[k - start]);
            let mut duplicate = false;
            for e in known.chain(fresh) {
                match mc_equal(e, &m, None) {
                    Ok(Decision::Yes(_)) => {
                        duplicate = true;
                        break;
                    }
                    Ok(Decision::Undecided { .. }) => self.undecided += 1,
                    _ => {}
                }
            }
            if !duplicate {
                new_index.entry(fp).or_default().push(start + added.len());
                added.push(m);
            }
            if start + added.len() > max_elements {
                return false;
            }
        }
        for (fp, ks) in new_index {
            self.index.entry(fp).or_default().extend(ks);
        }
        self.entries.extend(added);
        self.levels.push(self.entries.len());
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum WordLength {
    Exact { length: usize, word: Vec<i32> },
    UpperBoundOnly(usize),
}

pub fn word_length(m: &MappingClass, gens: &GeneratorSet, budget: usize) -> WordLength {
    let mut ball = Ball::new(gens);
    loop {
        if let Some(e) = ball.find(m) {
            let word = e.word().expect("ball entries carry words").to_vec();
            return WordLength::Exact { length: word.len(), word };
        }
        if ball.radius() >= budget || !ball.grow(usize::MAX) {
            return WordLength::UpperBoundOnly(m.word().map_or(usize::MAX, <[i32]>::len));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexDecoration {
    pub orbit: usize,
    pub delta: String,
    pub first_return: usize,
}

/// Dual graph of a multicurve's complementary components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoratedGraph {
    pub vertices: Vec<VertexDecoration>,
    pub edges: Vec<(usize, usize)>,
}

impl DecoratedGraph {
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let v = self.vertices.len();
        let mut a = vec![vec![0usize; v]; v];
        for &(x, y) in &self.edges {
            a[x][y] += 1;
            if x != y {
                a[y][x] += 1;
            }
        }
        a
    }

    /// All decoration- and edge-preserving vertex bijections, `out[k][v]` the image of `v`.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let v = self.vertices.len();
        let adj = self.adjacency();
        let mut out = Vec::new();
        let mut image = Vec::with_capacity(v);
        let mut used = vec![false; v];
        self.extend(&adj, &mut image, &mut used, &mut out);
        out
    }

    fn extend(&self, adj: &[Vec<usize>], image: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let k = image.len();
        if k == self.vertices.len() {
            out.push(image.clone());
            return;
        }
        for t in 0..self.vertices.len() {
            if used[t] || self.vertices[t] != self.vertices[k] {
                continue;
            }
            if (0..k).any(|u| adj[u][k] != adj[image[u]][t]) || adj[k][k] != adj[t][t] {
                continue;
            }
            used[t] = true;
            image.push(t);
            self.extend(adj, image, used, out);
            image.pop();
            used[t] = false;
        }
    }
}

pub fn decorated_graph_autos(g: &DecoratedGraph) -> Vec<Vec<usize>> {
    g.automorphisms()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(n: usize) -> PuncturedSphere {
        PuncturedSphere::new(n).unwrap()
    }

    #[test]
    fn twist_formula() {
        let s = sphere(4);
        let t = MappingClass::standard_twist(&s, 1, 2).unwrap();
        let w = |v: &[i32]| ReducedWord::from_signed(v, 3).unwrap();
        assert_eq!(t.auto().images()[0], w(&[1, 2, 1, -2, -1]));
        assert_eq!(t.auto().images()[2], w(&[3]));
        assert!(t.is_pure());
    }

    #[test]
    fn half_twist_squares_to_twist() {
        for n in 4..=6 {
            let s = sphere(n);
            for i in 1..n - 1 {
                let h = MappingClass::half_twist(&s, i).unwrap();
                assert!(!h.is_pure());
                let t = MappingClass::standard_twist(&s, i, i + 1).unwrap();
                assert!(mc_equal(&h.pow(2), &t, None).unwrap().is_yes());
            }
            assert!(MappingClass::half_twist(&s, n - 1).is_ok());
        }
    }

    #[test]
    fn word_lengths() {
        let s = sphere(4);
        let g = GeneratorSet::full_twists(&s).unwrap();
        let t = g.evaluate(&[1, 1]).unwrap();
        assert_eq!(word_length(&t, &g, 3), WordLength::Exact { length: 2, word: vec![1, 1] });
        assert_eq!(word_length(&MappingClass::identity(&s), &g, 3), WordLength::Exact { length: 0, word: vec![] });
    }

    #[test]
    fn graph_autos() {
        let d = |delta: &str| VertexDecoration { orbit: 0, delta: delta.into(), first_return: 0 };
        let one = DecoratedGraph { vertices: vec![d("a")], edges: vec![] };
        assert_eq!(one.automorphisms().len(), 1);
        let two = DecoratedGraph { vertices: vec![d("a"), d("a")], edges: vec![(0, 1)] };
        assert_eq!(two.automorphisms().len(), 2);
        let mixed = DecoratedGraph { vertices: vec![d("a"), d("b")], edges: vec![(0, 1)] };
        assert_eq!(mixed.automorphisms(), vec![vec![0, 1]]);
    }
}
