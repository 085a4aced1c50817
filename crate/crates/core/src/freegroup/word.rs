use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

use super::FreeGroupError;

/// A generator `x_i` (1-based) or its inverse.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter(i32);

impl Letter {
    pub fn new(generator: usize, positive: bool) -> Self {
        assert!(generator >= 1, "generators are 1-based");
        let g = generator as i32;
        Letter(if positive { g } else { -g })
    }

    pub fn from_signed(v: i32) -> Option<Self> {
        (v != 0).then_some(Letter(v))
    }

    pub fn generator(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn signed(self) -> i32 {
        self.0
    }

    #[inline]
    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    /// Dense index in `0..2*rank`: `x1, x1⁻¹, x2, x2⁻¹, ...`.
    #[inline]
    pub fn key(self) -> usize {
        2 * (self.generator() - 1) + usize::from(self.0 < 0)
    }

    pub fn from_key(key: usize) -> Self {
        Letter::new(key / 2 + 1, key % 2 == 0)
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "x{}", self.generator())
        } else {
            write!(f, "x{}^-1", self.generator())
        }
    }
}

/// A freely reduced word in the free group of the given rank.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReducedWord {
    rank: usize,
    letters: Vec<Letter>,
}

impl ReducedWord {
    pub fn identity(rank: usize) -> Self {
        ReducedWord { rank, letters: Vec::new() }
    }

    pub fn generator(rank: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= rank, "generator {i} outside rank {rank}");
        ReducedWord { rank, letters: vec![Letter::new(i, true)] }
    }

    /// Free reduction with a stack.
    pub fn reduce(raw: &[Letter], rank: usize) -> Result<Self, FreeGroupError> {
        if let Some(bad) = raw.iter().find(|l| l.generator() > rank) {
            return Err(FreeGroupError::InvalidLetter { letter: bad.signed(), rank });
        }
        Ok(Self::reduce_unchecked(raw.iter().copied(), rank))
    }

    pub fn from_signed(raw: &[i32], rank: usize) -> Result<Self, FreeGroupError> {
        let mut letters = Vec::with_capacity(raw.len());
        for &v in raw {
            match Letter::from_signed(v) {
                Some(l) => letters.push(l),
                None => return Err(FreeGroupError::InvalidLetter { letter: 0, rank }),
            }
        }
        Self::reduce(&letters, rank)
    }

    pub(crate) fn reduce_unchecked(raw: impl IntoIterator<Item = Letter>, rank: usize) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in raw {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        ReducedWord { rank, letters: out }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn mul(&self, other: &ReducedWord) -> ReducedWord {
        debug_assert_eq!(self.rank, other.rank);
        let mut cancel = 0;
        let a = &self.letters;
        let b = &other.letters;
        while cancel < a.len() && cancel < b.len() && a[a.len() - 1 - cancel] == b[cancel].inverse() {
            cancel += 1;
        }
        let mut letters = Vec::with_capacity(a.len() + b.len() - 2 * cancel);
        letters.extend_from_slice(&a[..a.len() - cancel]);
        letters.extend_from_slice(&b[cancel..]);
        ReducedWord { rank: self.rank, letters }
    }

    pub fn inverse(&self) -> ReducedWord {
        ReducedWord {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn pow(&self, e: i64) -> ReducedWord {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut acc = ReducedWord::identity(self.rank);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// `g · self · g⁻¹`.
    pub fn conjugated_by(&self, g: &ReducedWord) -> ReducedWord {
        g.mul(self).mul(&g.inverse())
    }

    pub fn commutes_with(&self, other: &ReducedWord) -> bool {
        self.mul(other) == other.mul(self)
    }

    /// The homomorphic image under `x_i ↦ images[i-1]`.
    pub fn substitute(&self, images: &[ReducedWord]) -> ReducedWord {
        let rank = images.first().map_or(self.rank, |w| w.rank);
        let mut out: Vec<Letter> = Vec::new();
        for l in &self.letters {
            let img = &images[l.generator() - 1];
            if l.is_positive() {
                for &m in &img.letters {
                    push_reduced(&mut out, m);
                }
            } else {
                for &m in img.letters.iter().rev() {
                    push_reduced(&mut out, m.inverse());
                }
            }
        }
        ReducedWord { rank, letters: out }
    }

    /// Re-embeds the word into a free group of larger (or equal) rank.
    pub fn with_rank(&self, rank: usize) -> Result<ReducedWord, FreeGroupError> {
        ReducedWord::reduce(&self.letters, rank)
    }

    /// Exponent sums of `x_1..x_rank`.
    pub fn abelianization(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.rank];
        for l in &self.letters {
            v[l.generator() - 1] += if l.is_positive() { 1 } else { -1 };
        }
        v
    }

    /// Splits `self = u · core · u⁻¹` with `core` cyclically reduced.
    pub fn cyclic_decomposition(&self) -> (ReducedWord, ReducedWord) {
        let n = self.letters.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.letters[k] == self.letters[n - 1 - k].inverse() {
            k += 1;
        }
        let u = ReducedWord { rank: self.rank, letters: self.letters[..k].to_vec() };
        let core = ReducedWord { rank: self.rank, letters: self.letters[k..n - k].to_vec() };
        (u, core)
    }

    pub fn cyclically_reduced(&self) -> ReducedWord {
        self.cyclic_decomposition().1
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(a), Some(b)) => self.letters.len() == 1 || *a != b.inverse(),
            _ => true,
        }
    }

    /// Writes `self = u · c^m · u⁻¹` with `c` cyclically reduced and not a proper power.
    /// Returns `(u, c, m)`; the identity yields `(ε, ε, 0)`.
    pub fn primitive_root(&self) -> (ReducedWord, ReducedWord, usize) {
        let (u, core) = self.cyclic_decomposition();
        if core.is_empty() {
            return (u, core, 0);
        }
        let l = core.len();
        let period = (1..=l)
            .find(|&q| l % q == 0 && (q..l).all(|i| core.letters[i] == core.letters[i - q]))
            .unwrap_or(l);
        let c = ReducedWord { rank: self.rank, letters: core.letters[..period].to_vec() };
        (u, c, l / period)
    }

    /// Rotation `letters[k..] ++ letters[..k]` of a cyclically reduced word.
    pub(crate) fn rotate(&self, k: usize) -> ReducedWord {
        let mut letters = self.letters[k..].to_vec();
        letters.extend_from_slice(&self.letters[..k]);
        ReducedWord { rank: self.rank, letters }
    }

    pub(crate) fn prefix(&self, k: usize) -> ReducedWord {
        ReducedWord { rank: self.rank, letters: self.letters[..k].to_vec() }
    }

    pub(crate) fn from_reduced_letters(letters: Vec<Letter>, rank: usize) -> ReducedWord {
        debug_assert!(letters.windows(2).all(|w| w[0] != w[1].inverse()));
        ReducedWord { rank, letters }
    }

    pub(crate) fn first_letter(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub(crate) fn last_letter(&self) -> Option<Letter> {
        self.letters.last().copied()
    }
}

#[inline]
fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&l.inverse()) {
        out.pop();
    } else {
        out.push(l);
    }
}

impl Ord for ReducedWord {
    /// Shortlex.
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for ReducedWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l:?}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[i32]) -> ReducedWord {
        ReducedWord::from_signed(v, 3).unwrap()
    }

    #[test]
    fn cancellation() {
        assert!(w(&[1, -1]).is_identity());
        assert_eq!(w(&[1, 2, -2, 1]), w(&[1, 1]));
        assert_eq!(w(&[1, 2]).mul(&w(&[-2, -1, 3])), w(&[3]));
    }

    #[test]
    fn invalid_letter() {
        assert_eq!(
            ReducedWord::from_signed(&[1, 4], 3),
            Err(FreeGroupError::InvalidLetter { letter: 4, rank: 3 })
        );
    }

    #[test]
    fn primitive_roots() {
        let (u, c, m) = w(&[3, 1, 2, 1, 2, -3]).primitive_root();
        assert_eq!((u, c, m), (w(&[3]), w(&[1, 2]), 2));
        let (_, c, m) = w(&[1, 1, 1]).primitive_root();
        assert_eq!((c, m), (w(&[1]), 3));
    }

    #[test]
    fn cyclic_decomposition_recombines() {
        let x = w(&[2, 1, 3, -1, -2]);
        let (u, core) = x.cyclic_decomposition();
        assert_eq!(core.conjugated_by(&u), x);
        assert_eq!(core, w(&[3]));
    }
}
