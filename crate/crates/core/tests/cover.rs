mod common;

use common::{half, levy_two_cycle, two_cycle_half};
use thurston_core::cover::{
    decompose, lift_mapping_class, lifts_through, same_hurwitz_class, CoverPresentation, HurwitzDecision, HurwitzTuple,
};
use thurston_core::mapping_class::{mc_equal, GeneratorSet, MappingClass, TwistKind};
use thurston_core::perm::Perm;
use thurston_core::sphere::{CurveType, DisjointnessProvenance, Multicurve};

fn essential(f: &CoverPresentation, i: usize, j: usize) -> Vec<(String, usize)> {
    let c = f.base().standard_curve(i, j).unwrap();
    f.pullback_curve(&c)
        .unwrap()
        .into_iter()
        .filter(|p| p.kind == CurveType::Essential)
        .map(|p| (format!("{:?}", f.base().standard_indices(&p.class)), p.degree))
        .collect()
}

#[test]
fn five_point_examples_validate_and_pull_back() {
    let f = two_cycle_half();
    assert_eq!(f.validate(), vec![]);
    assert_eq!(essential(&f, 3, 4), vec![("Some((1, 2))".to_string(), 1)]);
    assert_eq!(essential(&f, 1, 2), vec![("Some((3, 4))".to_string(), 2)]);
    let g = levy_two_cycle();
    assert_eq!(g.validate(), vec![]);
    assert_eq!(essential(&g, 3, 4), vec![("Some((1, 2))".to_string(), 1)]);
    assert_eq!(essential(&g, 1, 2), vec![("Some((3, 4))".to_string(), 1)]);
}

#[test]
fn decomposition_of_invariant_curve() {
    let f = half();
    let s = f.base();
    let gamma = Multicurve::new(vec![s.standard_curve(1, 2).unwrap()], DisjointnessProvenance::StandardFamily).unwrap();
    let d = decompose(&f, &gamma).unwrap();
    assert_eq!(d.components.len(), 2);
    assert_eq!(d.components.iter().map(|c| c.capped).sum::<usize>(), 4 + 2);
    assert_eq!(d.map, vec![Some((0, 2)), Some((1, 2))]);
    assert_eq!(d.cycles.len(), 2);
    assert!(d.cycles.iter().all(|c| c.return_degree == 2 && !c.homeomorphism));
}

#[test]
fn crossing_curves_rejected() {
    let f = levy_two_cycle();
    let s = f.base();
    let gamma = Multicurve::new(
        vec![s.standard_curve(1, 2).unwrap(), s.standard_curve(2, 3).unwrap()],
        DisjointnessProvenance::UserAsserted,
    )
    .unwrap();
    assert!(decompose(&f, &gamma).is_err());
}

#[test]
fn hurwitz_search_recovers_relabelled_conjugate() {
    let f = levy_two_cycle();
    let s = f.base().clone();
    let gens = GeneratorSet::new(&s, TwistKind::Half).unwrap();
    let h = gens.evaluate(&[2, -3, 1]).unwrap();
    let tau = Perm::parse_cycles("(1 2)", 2).unwrap();
    let g = f.conjugate_by(&h).relabel_sheets(&tau);
    assert_eq!(g.validate(), vec![]);
    let tf = HurwitzTuple(f.monodromy().to_vec());
    let tg = HurwitzTuple(g.monodromy().to_vec());
    let labels = h.puncture_perm().clone();
    match same_hurwitz_class(&tg, &tf, Some(&labels), 100_000) {
        HurwitzDecision::Equivalent(w) => {
            let word: Vec<i32> = w.moves.iter().map(|m| m.signed()).collect();
            let k = gens.evaluate(&word).unwrap();
            assert_eq!(k.puncture_perm(), &labels);
            let pis = lifts_through(&f, &g, &k).unwrap();
            assert!(!pis.is_empty());
        }
        other => panic!("{other:?}"),
    }
    let pis = lifts_through(&f, &g, &h).unwrap();
    let found = pis.iter().any(|pi| {
        lift_mapping_class(&f, &g, &h, pi).map_or(false, |lift| mc_equal(&lift, &h, None).unwrap().is_yes())
    });
    assert!(found);
    let id = MappingClass::identity(&s);
    assert!(lifts_through(&f, &g, &id).unwrap().is_empty() || h.is_pure());
}
