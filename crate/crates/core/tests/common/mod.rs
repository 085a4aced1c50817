#![allow(dead_code)]

use thurston_core::cover::CoverPresentation;
use thurston_core::freegroup::ReducedWord;
use thurston_core::perm::Perm;
use thurston_core::sphere::PuncturedSphere;

pub fn build(n: usize, rho: &[&str], res: &[[&[i32]; 2]], point_map: &[usize], local: &[usize]) -> CoverPresentation {
    let base = PuncturedSphere::new(n).unwrap();
    let mono = rho.iter().map(|s| Perm::parse_cycles(s, 2).unwrap()).collect();
    let rows = res
        .iter()
        .map(|row| row.iter().map(|v| ReducedWord::from_signed(v, n - 1).unwrap()).collect())
        .collect();
    CoverPresentation::new(2, base, mono, rows, point_map.iter().map(|p| p - 1).collect(), local.to_vec()).unwrap()
}

pub fn half() -> CoverPresentation {
    build(4, &["(1 2)", "()", "(1 2)", "()"], &[[&[], &[1]], [&[2], &[]], [&[3], &[]]], &[1, 2, 3, 4], &[2, 1, 2, 1])
}

/// `c_{1,2} → c_{3,4}` by degree 2, `c_{3,4} → c_{1,2}` by degree 1.
pub fn two_cycle_half() -> CoverPresentation {
    build(
        5,
        &["(1 2)", "()", "()", "()", "(1 2)"],
        &[[&[], &[]], [&[3], &[4]], [&[], &[1]], [&[], &[2]]],
        &[3, 4, 2, 2, 5],
        &[1, 1, 1, 1, 2],
    )
}

/// `c_{1,2} ↔ c_{3,4}`, both by degree 1.
pub fn levy_two_cycle() -> CoverPresentation {
    build(
        5,
        &["(1 2)", "(1 2)", "()", "()", "()"],
        &[[&[3], &[]], [&[], &[4]], [&[1], &[]], [&[2], &[]]],
        &[3, 4, 1, 2, 5],
        &[1, 1, 2, 2, 1],
    )
}

/// Degree 2, `c_{2,3}` pulls back to itself by degree 1.
pub fn levy() -> CoverPresentation {
    build(4, &["(1 2)", "()", "()", "(1 2)"], &[[&[], &[1]], [&[2], &[]], [&[3], &[]]], &[1, 2, 3, 4], &[2, 1, 1, 2])
}
