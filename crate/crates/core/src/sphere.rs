//! The n-punctured sphere: π₁ generators, peripheral classes, standard curves.
//!
//! Punctures sit on a horizontal line; `x_i` is a counterclockwise loop around
//! puncture `i` joined to a basepoint below the line, so `x₁⋯x_n = 1` and
//! `x_n = (x₁⋯x_{n−1})⁻¹`. The standard curve `c_{i,j}` is the round curve
//! around punctures `i..=j`.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::freegroup::{ConjClass, ReducedWord};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SphereError {
    #[error("a punctured sphere needs at least 3 punctures, got {0}")]
    TooFewPunctures(usize),
    #[error("puncture index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("c_{{{i},{j}}} is not an essential curve on the {n}-punctured sphere")]
    NotEssential { i: usize, j: usize, n: usize },
    #[error("the {0}-punctured sphere has no essential curves")]
    NoEssentialCurves(usize),
    #[error("class {0} is trivial or peripheral")]
    TrivialOrPeripheral(String),
    #[error("curve {0} listed twice in a multicurve")]
    DuplicateCurve(String),
    #[error("curve lives on a different surface")]
    SurfaceMismatch,
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PuncturedSphere {
    n: usize,
    labels: Vec<String>,
}

impl PuncturedSphere {
    pub fn new(n: usize) -> Result<Self, SphereError> {
        Self::with_labels((1..=n).map(|i| format!("q{i}")).collect())
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self, SphereError> {
        if labels.len() < 3 {
            return Err(SphereError::TooFewPunctures(labels.len()));
        }
        Ok(PuncturedSphere { n: labels.len(), labels })
    }

    pub fn punctures(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.n - 1
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Same puncture count; labels are presentation detail.
    pub fn same_shape(&self, other: &PuncturedSphere) -> bool {
        self.n == other.n
    }

    /// The loop `x_i` as a word in the free basis `x₁..x_{n−1}`.
    pub fn loop_word(&self, i: usize) -> Result<ReducedWord, SphereError> {
        if i == 0 || i > self.n {
            return Err(SphereError::IndexOutOfRange { index: i, n: self.n });
        }
        let r = self.rank();
        Ok(if i < self.n {
            ReducedWord::generator(r, i)
        } else {
            self.interval_word(1, r).inverse()
        })
    }

    /// `x_i x_{i+1} ⋯ x_j` for `1 ≤ i ≤ j ≤ n`.
    pub fn interval_word(&self, i: usize, j: usize) -> ReducedWord {
        let r = self.rank();
        (i..=j).fold(ReducedWord::identity(r), |acc, k| {
            acc.mul(&self.loop_word(k).expect("index in range"))
        })
    }

    pub fn peripheral(&self, i: usize) -> Result<ConjClass, SphereError> {
        Ok(ConjClass::of(&self.loop_word(i)?))
    }

    pub fn classify(&self, cls: &ConjClass) -> CurveType {
        if cls.is_trivial() {
            return CurveType::Trivial;
        }
        for i in 1..=self.n {
            if &ConjClass::of(&self.loop_word(i).expect("index in range")) == cls {
                return CurveType::Peripheral(i);
            }
        }
        CurveType::Essential
    }

    pub fn is_trivial_or_peripheral(&self, cls: &ConjClass) -> CurveType {
        self.classify(cls)
    }

    pub fn standard_admissible(&self, i: usize, j: usize) -> bool {
        i >= 1 && i <= j && j < self.n && (2..=self.n - 2).contains(&(j - i + 1))
    }

    pub fn standard_curve(&self, i: usize, j: usize) -> Result<CurveClass, SphereError> {
        if !self.standard_admissible(i, j) {
            return Err(SphereError::NotEssential { i, j, n: self.n });
        }
        let mut c = CurveClass::from_word(self, &self.interval_word(i, j))?;
        c.declared_simple = true;
        c.standard = Some((i, j));
        Ok(c)
    }

    /// All standard curves, ordered by span then left end.
    pub fn filling_system(&self) -> Result<Vec<CurveClass>, SphereError> {
        if self.n < 4 {
            return Err(SphereError::NoEssentialCurves(self.n));
        }
        let mut out = Vec::new();
        for span in 2..=self.n - 2 {
            for i in 1..=self.n - span {
                out.push(self.standard_curve(i, i + span - 1)?);
            }
        }
        Ok(out)
    }

    /// The standard curve `c_{i,j}` with this class, if any.
    pub fn standard_indices(&self, cls: &ConjClass) -> Option<(usize, usize)> {
        for span in 2..=self.n.saturating_sub(2) {
            for i in 1..=self.n - span {
                let j = i + span - 1;
                if &ConjClass::of(&self.interval_word(i, j)) == cls {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

impl fmt::Debug for PuncturedSphere {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S(0,{})", self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CurveType {
    Trivial,
    Peripheral(usize),
    Essential,
}

/// An essential, non-peripheral free homotopy class of closed curves.
#[derive(Clone, Serialize, Deserialize)]
pub struct CurveClass {
    n: usize,
    cls: ConjClass,
    /// Punctures with nonzero winding, drawn from `1..n` (never `n`).
    enclosure: Vec<usize>,
    declared_simple: bool,
    standard: Option<(usize, usize)>,
}

impl CurveClass {
    pub fn from_word(s: &PuncturedSphere, w: &ReducedWord) -> Result<Self, SphereError> {
        let cls = ConjClass::of(w);
        if s.classify(&cls) != CurveType::Essential {
            return Err(SphereError::TrivialOrPeripheral(w.to_string()));
        }
        let enclosure = w
            .abelianization()
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(k, _)| k + 1)
            .collect();
        let standard = s.standard_indices(&cls);
        Ok(CurveClass { n: s.n, cls, enclosure, declared_simple: false, standard })
    }

    /// Image of a known-simple curve under a homeomorphism: simplicity carries over.
    pub(crate) fn image_of(s: &PuncturedSphere, w: &ReducedWord, simple: bool) -> Result<Self, SphereError> {
        let mut c = Self::from_word(s, w)?;
        c.declared_simple = simple;
        Ok(c)
    }

    pub fn declare_simple(mut self) -> Self {
        self.declared_simple = true;
        self
    }

    pub fn class(&self) -> &ConjClass {
        &self.cls
    }

    pub fn word(&self) -> &ReducedWord {
        self.cls.word()
    }

    pub fn punctures(&self) -> usize {
        self.n
    }

    pub fn enclosure(&self) -> &[usize] {
        &self.enclosure
    }

    pub fn declared_simple(&self) -> bool {
        self.declared_simple
    }

    pub fn standard(&self) -> Option<(usize, usize)> {
        self.standard
    }
}

impl PartialEq for CurveClass {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.cls == other.cls
    }
}

impl Eq for CurveClass {}

impl std::hash::Hash for CurveClass {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.cls.hash(state);
    }
}

impl PartialOrd for CurveClass {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CurveClass {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n, &self.cls).cmp(&(other.n, &other.cls))
    }
}

impl fmt::Debug for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.standard {
            Some((i, j)) => write!(f, "c{i},{j}"),
            None => write!(f, "{:?}", self.cls),
        }
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cls)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DisjointnessProvenance {
    StandardFamily,
    Pullback,
    UserAsserted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multicurve {
    curves: Vec<CurveClass>,
    provenance: DisjointnessProvenance,
}

impl Multicurve {
    pub fn new(curves: Vec<CurveClass>, provenance: DisjointnessProvenance) -> Result<Self, SphereError> {
        for (k, c) in curves.iter().enumerate() {
            if curves[..k].contains(c) {
                return Err(SphereError::DuplicateCurve(c.to_string()));
            }
            if c.n != curves[0].n {
                return Err(SphereError::SurfaceMismatch);
            }
        }
        Ok(Multicurve { curves, provenance })
    }

    pub fn curves(&self) -> &[CurveClass] {
        &self.curves
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn provenance(&self) -> DisjointnessProvenance {
        self.provenance
    }

    pub fn position(&self, c: &CurveClass) -> Option<usize> {
        self.curves.iter().position(|d| d == c)
    }
}
