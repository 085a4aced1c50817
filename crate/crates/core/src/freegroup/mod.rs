//! Free groups: reduced words, conjugacy classes, automorphisms, coset graphs.

mod automorphism;
mod conj;
mod coset;
mod word;

pub use automorphism::{conjugator, outer_equal, simultaneous_conjugator, Decision, FreeAutomorphism};
pub use conj::{ConjClass, OrientedClass};
pub use coset::{coset_graph, CosetGraph, FoldedSubgroup};
pub use word::{Letter, ReducedWord};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FreeGroupError {
    #[error("letter {letter} is not a generator of the rank-{rank} free group")]
    InvalidLetter { letter: i32, rank: usize },
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("images do not define an automorphism")]
    NotAnAutomorphism,
    #[error("subgroup index exceeds bound {bound}")]
    IndexOverflow { bound: usize },
}
