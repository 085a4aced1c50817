mod common;

use common::{half, levy, levy_two_cycle, two_cycle_half};
use num::BigRational;
use thurston_core::obstruction::{
    find_levy_cycles, is_stable, leading_eigenvalue_geq_1, stable_saturation, thurston_matrix, ObstructionError, Spectral,
};
use thurston_core::sphere::{DisjointnessProvenance, Multicurve};

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn gamma(f: &thurston_core::cover::CoverPresentation, curves: &[(usize, usize)]) -> Multicurve {
    let s = f.base();
    Multicurve::new(curves.iter().map(|&(i, j)| s.standard_curve(i, j).unwrap()).collect(), DisjointnessProvenance::UserAsserted)
        .unwrap()
}

#[test]
fn single_curve_matrices() {
    let f = half();
    let g = gamma(&f, &[(1, 2)]);
    let m = thurston_matrix(&f, &g).unwrap();
    assert_eq!(m.entries, vec![vec![q(1, 2)]]);
    let c = leading_eigenvalue_geq_1(&m);
    assert_eq!(c.verdict, Spectral::Less);
    assert!(c.verify(&m.entries));
    assert!(find_levy_cycles(&f, &g).unwrap().is_empty());

    let f = levy();
    let g = gamma(&f, &[(2, 3)]);
    let m = thurston_matrix(&f, &g).unwrap();
    assert_eq!(m.entries, vec![vec![q(1, 1)]]);
    let cycles = find_levy_cycles(&f, &g).unwrap();
    assert_eq!(cycles.len(), 1);
    assert!(cycles[0].degenerate);
    assert_eq!(leading_eigenvalue_geq_1(&m).verdict, Spectral::Equal);
}

#[test]
fn two_curve_cycles() {
    let f = two_cycle_half();
    let g = gamma(&f, &[(1, 2), (3, 4)]);
    let m = thurston_matrix(&f, &g).unwrap();
    assert_eq!(m.entries, vec![vec![q(0, 1), q(1, 1)], vec![q(1, 2), q(0, 1)]]);
    let c = leading_eigenvalue_geq_1(&m);
    assert_eq!(c.verdict, Spectral::Less);
    assert!(c.verify(&m.entries));

    let f = levy_two_cycle();
    let g = gamma(&f, &[(1, 2), (3, 4)]);
    let m = thurston_matrix(&f, &g).unwrap();
    assert_eq!(m.entries, vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]]);
    let cycles = find_levy_cycles(&f, &g).unwrap();
    assert_eq!(cycles.len(), 1);
    assert_eq!(cycles[0].curves.len(), 2);
    let c = leading_eigenvalue_geq_1(&m);
    assert_eq!(c.verdict, Spectral::Equal);
    assert!(c.verify(&m.entries));
}

#[test]
fn stability_and_saturation() {
    let f = two_cycle_half();
    let partial = gamma(&f, &[(1, 2)]);
    let report = is_stable(&f, &partial).unwrap();
    assert!(!report.stable);
    assert_eq!(report.offending.len(), 1);
    assert!(matches!(thurston_matrix(&f, &partial), Err(ObstructionError::NotStable(1))));
    let sat = stable_saturation(&f, &partial, 8).unwrap();
    assert_eq!(sat.len(), 2);
    assert!(is_stable(&f, &sat).unwrap().stable);
    let full = gamma(&f, &[(1, 2), (3, 4)]);
    assert_eq!(stable_saturation(&f, &full, 8).unwrap().len(), 2);
    assert!(is_stable(&half(), &Multicurve::new(vec![], DisjointnessProvenance::StandardFamily).unwrap()).unwrap().stable);
}
