//! Permutations of `{0, .., d-1}` acting on the right.
//!
//! Sheets are stored 0-based and printed 1-based in cycle notation. The
//! product `p.then(q)` applies `p` first, matching the right action
//! `s·(pq) = (s·p)·q` used for monodromy.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Perm(Vec<u32>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PermError {
    #[error("not a bijection of 1..{0}")]
    NotBijection(usize),
    #[error("point {point} out of range 1..{degree}")]
    OutOfRange { point: usize, degree: usize },
    #[error("malformed cycle notation: {0}")]
    Syntax(String),
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm((0..degree as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self, PermError> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &i in &images {
            let i = i as usize;
            if i >= d || seen[i] {
                return Err(PermError::NotBijection(d));
            }
            seen[i] = true;
        }
        Ok(Perm(images))
    }

    /// Builds a permutation from 0-based cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self, PermError> {
        let mut images: Vec<Option<u32>> = vec![None; degree];
        for cycle in cycles {
            for (k, &p) in cycle.iter().enumerate() {
                if p >= degree {
                    return Err(PermError::OutOfRange { point: p + 1, degree });
                }
                let next = cycle[(k + 1) % cycle.len()];
                if images[p].is_some() {
                    return Err(PermError::NotBijection(degree));
                }
                images[p] = Some(next as u32);
            }
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, x)| x.unwrap_or(i as u32))
            .collect();
        Perm::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.0[point] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Perm(inv)
    }

    /// `c⁻¹ · self · c`, i.e. the permutation `self` with points renamed by `c`.
    pub fn conjugate_by(&self, c: &Perm) -> Perm {
        c.inverse().then(self).then(c)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// Cycles (0-based), each starting at its least element, ordered by that element.
    /// Fixed points are included.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let d = self.0.len();
        let mut seen = vec![false; d];
        let mut out = Vec::new();
        for start in 0..d {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut p = self.apply(start);
            while p != start {
                seen[p] = true;
                cycle.push(p);
                p = self.apply(p);
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }

    /// Sorted cycle lengths.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable();
        t
    }

    pub fn order(&self) -> usize {
        self.cycles()
            .iter()
            .map(Vec::len)
            .fold(1, |acc, l| num::integer::lcm(acc, l))
    }

    /// Parses 1-based cycle notation such as `(1 2)(3 4 5)` or `()`.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self, PermError> {
        let mut cycles = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let Some(body) = rest.strip_prefix('(') else {
                return Err(PermError::Syntax(text.to_string()));
            };
            let Some(close) = body.find(')') else {
                return Err(PermError::Syntax(text.to_string()));
            };
            let inner = &body[..close];
            let mut cycle = Vec::new();
            for tok in inner.split(|c: char| c.is_whitespace() || c == ',') {
                if tok.is_empty() {
                    continue;
                }
                let p: usize = tok
                    .parse()
                    .map_err(|_| PermError::Syntax(text.to_string()))?;
                if p == 0 || p > degree {
                    return Err(PermError::OutOfRange { point: p, degree });
                }
                cycle.push(p - 1);
            }
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = body[close + 1..].trim_start();
        }
        Perm::from_cycles(degree, &cycles)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for c in self.cycles() {
            if c.len() < 2 {
                continue;
            }
            any = true;
            write!(f, "(")?;
            for (k, p) in c.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", p + 1)?;
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{}", self)
    }
}

/// Orbits of the group generated by `gens` on `{0..degree}`; orbit of `start` first.
pub fn orbit(gens: &[&Perm], degree: usize, start: usize) -> Vec<usize> {
    let mut seen = vec![false; degree];
    let mut out = vec![start];
    seen[start] = true;
    let mut head = 0;
    while head < out.len() {
        let p = out[head];
        head += 1;
        for g in gens {
            for q in [g.apply(p), g.inverse_apply(p)] {
                if !seen[q] {
                    seen[q] = true;
                    out.push(q);
                }
            }
        }
    }
    out
}

impl Perm {
    fn inverse_apply(&self, point: usize) -> usize {
        self.0.iter().position(|&j| j as usize == point).unwrap()
    }
}

pub fn is_transitive(gens: &[&Perm], degree: usize) -> bool {
    degree == 0 || orbit(gens, degree, 0).len() == degree
}
