use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use super::word::{Letter, ReducedWord};

/// Conjugacy class of a free-group element, up to inversion.
///
/// The stored word is the lexicographically least rotation among the
/// rotations of the cyclic reduction and of its inverse. `inverted` records
/// whether that minimum came from the inverse; it does not take part in
/// equality, hashing or ordering.
#[derive(Clone, Serialize, Deserialize)]
pub struct ConjClass {
    word: ReducedWord,
    inverted: bool,
}

/// Conjugacy class without folding in inversion (an oriented curve).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct OrientedClass(ReducedWord);

impl ConjClass {
    pub fn of(w: &ReducedWord) -> ConjClass {
        let core = w.cyclically_reduced();
        let fwd = least_rotation(&core);
        let bwd = least_rotation(&core.inverse());
        if bwd.letters() < fwd.letters() {
            ConjClass { word: bwd, inverted: true }
        } else {
            ConjClass { word: fwd, inverted: false }
        }
    }

    pub fn word(&self) -> &ReducedWord {
        &self.word
    }

    pub fn inverted(&self) -> bool {
        self.inverted
    }

    pub fn is_trivial(&self) -> bool {
        self.word.is_identity()
    }

    pub fn rank(&self) -> usize {
        self.word.rank()
    }
}

impl OrientedClass {
    pub fn of(w: &ReducedWord) -> OrientedClass {
        OrientedClass(least_rotation(&w.cyclically_reduced()))
    }

    pub fn word(&self) -> &ReducedWord {
        &self.0
    }

    pub fn reversed(&self) -> OrientedClass {
        OrientedClass::of(&self.0.inverse())
    }
}

impl PartialEq for ConjClass {
    fn eq(&self, other: &Self) -> bool {
        self.word == other.word
    }
}

impl Eq for ConjClass {}

impl Hash for ConjClass {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.word.hash(state);
    }
}

impl Ord for ConjClass {
    fn cmp(&self, other: &Self) -> Ordering {
        self.word.cmp(&other.word)
    }
}

impl PartialOrd for ConjClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ConjClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.word)
    }
}

impl fmt::Display for ConjClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.word)
    }
}

/// Least rotation of a cyclically reduced word (Booth's algorithm).
pub(crate) fn least_rotation(w: &ReducedWord) -> ReducedWord {
    let s: &[Letter] = w.letters();
    let n = s.len();
    if n <= 1 {
        return w.clone();
    }
    let at = |idx: isize| s[idx as usize % n];
    let mut f: Vec<isize> = vec![-1; 2 * n];
    let mut k: isize = 0;
    for j in 1..(2 * n) as isize {
        let sj = at(j);
        let mut i = f[(j - k - 1) as usize];
        while i != -1 && sj != at(k + i + 1) {
            if sj < at(k + i + 1) {
                k = j - i - 1;
            }
            i = f[i as usize];
        }
        if sj != at(k + i + 1) {
            if sj < at(k) {
                k = j;
            }
            f[(j - k) as usize] = -1;
        } else {
            f[(j - k) as usize] = i + 1;
        }
    }
    let k = k as usize;
    w.rotate(k % n)
}

/// Finds the rotation offset `k` with `a.rotate(k) == b` (both cyclically reduced).
pub(crate) fn rotation_offset(a: &ReducedWord, b: &ReducedWord) -> Option<usize> {
    let n = a.len();
    if n != b.len() {
        return None;
    }
    if n == 0 {
        return Some(0);
    }
    // KMP search of b in a·a.
    let pat = b.letters();
    let mut fail = vec![0usize; n];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && pat[i] != pat[k] {
            k = fail[k - 1];
        }
        if pat[i] == pat[k] {
            k += 1;
        }
        fail[i] = k;
    }
    let text = a.letters();
    let mut q = 0;
    for i in 0..(2 * n - 1) {
        let c = text[i % n];
        while q > 0 && c != pat[q] {
            q = fail[q - 1];
        }
        if c == pat[q] {
            q += 1;
        }
        if q == n {
            return Some(i + 1 - n);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[i32]) -> ReducedWord {
        ReducedWord::from_signed(v, 3).unwrap()
    }

    fn naive_least(w: &ReducedWord) -> ReducedWord {
        (0..w.len().max(1))
            .map(|k| if w.is_empty() { w.clone() } else { w.rotate(k) })
            .min_by(|a, b| a.letters().cmp(b.letters()))
            .unwrap()
    }

    #[test]
    fn booth_matches_naive() {
        for v in [
            vec![2, 1, 2, 1, 1],
            vec![3, 3, 1, 3, 3, 1, 3],
            vec![1, 2, 1, 2],
            vec![-1, -2, 3, 1, 2],
            vec![2, 2, 2, -3, 2, 2, 2, -3, 1],
        ] {
            let x = w(&v);
            assert_eq!(least_rotation(&x), naive_least(&x), "{v:?}");
        }
    }

    #[test]
    fn rotation_and_inverse_fold() {
        assert_eq!(ConjClass::of(&w(&[1, 2])), ConjClass::of(&w(&[2, 1])));
        assert_ne!(ConjClass::of(&w(&[1])), ConjClass::of(&w(&[2])));
        assert_eq!(ConjClass::of(&w(&[1, 2])), ConjClass::of(&w(&[-2, -1])));
        assert_ne!(OrientedClass::of(&w(&[1, 2])), OrientedClass::of(&w(&[-2, -1])));
        assert!(ConjClass::of(&w(&[2, 1, -2])).word() == &w(&[1]));
    }

    #[test]
    fn offsets() {
        let a = w(&[1, 2, 3, -2]);
        for k in 0..4 {
            let b = a.rotate(k);
            let off = rotation_offset(&a, &b).unwrap();
            assert_eq!(a.rotate(off), b);
        }
        assert_eq!(rotation_offset(&a, &w(&[1, 2, 3, 2])), None);
    }
}
