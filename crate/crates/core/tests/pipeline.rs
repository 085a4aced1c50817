mod common;

use common::{half, levy, levy_two_cycle, two_cycle_half};
use thurston_core::cover::CoverPresentation;
use thurston_core::perm::Perm;
use thurston_core::pipeline::{
    check_equivalence, choose_probes, curve_twist, twist_defect, verify_certificate, Alphabet, Gate, MixedWord,
    NoOracle, PipelineConfig, Verdict,
};
use thurston_core::sphere::{DisjointnessProvenance, Multicurve};

fn gamma(f: &CoverPresentation, curves: &[(usize, usize)]) -> Multicurve {
    let s = f.base();
    Multicurve::new(curves.iter().map(|&(i, j)| s.standard_curve(i, j).unwrap()).collect(), DisjointnessProvenance::UserAsserted)
        .unwrap()
}

fn scrambled(f: &CoverPresentation, word: &[i32]) -> CoverPresentation {
    let alpha = Alphabet::new(f.base()).unwrap();
    let h = alpha.evaluate(&MixedWord::half(word)).unwrap();
    f.conjugate_by(&h).relabel_sheets(&Perm::parse_cycles("(1 2)", 2).unwrap())
}

#[test]
fn map_is_equivalent_to_itself() {
    let f = levy_two_cycle();
    let cert = check_equivalence(&f, &f, &NoOracle, None, &PipelineConfig::default());
    assert_eq!(cert.verdict, Verdict::Equivalent, "{cert:?}");
    verify_certificate(&f, &f, &cert).unwrap();
}

#[test]
fn conjugate_copy_is_found() {
    for f in [half(), levy_two_cycle()] {
        let g = scrambled(&f, &[2, -3, 1]);
        let cert = check_equivalence(&f, &g, &NoOracle, None, &PipelineConfig::default());
        assert_eq!(cert.verdict, Verdict::Equivalent, "{cert:?}");
        verify_certificate(&f, &g, &cert).unwrap();
    }
}

#[test]
fn different_matrices_refute() {
    let (f, g) = (half(), levy());
    let (gf, gg) = (gamma(&f, &[(1, 2)]), gamma(&g, &[(2, 3)]));
    let cert = check_equivalence(&f, &g, &NoOracle, Some((&gf, &gg)), &PipelineConfig::default());
    assert_eq!(cert.verdict, Verdict::NotEquivalent);
    assert_eq!(cert.gate, Some(Gate::ThurstonMatrix));
    verify_certificate(&f, &g, &cert).unwrap();

    let (f, g) = (two_cycle_half(), levy_two_cycle());
    let cert = check_equivalence(&f, &g, &NoOracle, None, &PipelineConfig::default());
    assert_eq!(cert.verdict, Verdict::NotEquivalent, "{cert:?}");
}

#[test]
fn hurwitz_overflow_is_inconclusive() {
    let f = levy_two_cycle();
    let g = scrambled(&f, &[1, 2, -4]);
    let config = PipelineConfig { hurwitz_states: 1, ..PipelineConfig::default() };
    let cert = check_equivalence(&f, &g, &NoOracle, None, &config);
    assert_eq!(cert.verdict, Verdict::Inconclusive, "{cert:?}");
    assert!(!cert.undecided.is_empty());
}

#[test]
fn twist_defect_reads_exponents() {
    let f = levy_two_cycle();
    let alpha = Alphabet::new(f.base()).unwrap();
    let g = gamma(&f, &[(1, 2), (3, 4)]);
    let twists: Vec<_> = g.curves().iter().map(|c| curve_twist(&alpha, c, 3).unwrap()).collect();
    let probes = choose_probes(&alpha, &twists, 3).unwrap();
    for a in -2..=2 {
        for b in -2..=2 {
            let w = twists[0].word(a).then(&twists[1].word(b));
            let x = alpha.evaluate(&w).unwrap();
            assert_eq!(twist_defect(&alpha, &x, &twists, &probes).unwrap(), vec![a, b]);
        }
    }
    let x = alpha.evaluate(&MixedWord::half(&[2])).unwrap();
    assert!(twist_defect(&alpha, &x, &twists, &probes).is_err());
}

#[test]
fn twist_lattice_recovers_high_powers() {
    let f = levy_two_cycle();
    let g = scrambled(&f, &[2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 3, 3, 3, 3, 3, 3]);
    let (gf, gg) = (gamma(&f, &[(1, 2), (3, 4)]), gamma(&f, &[(1, 2), (3, 4)]));
    let gg = {
        let alpha = Alphabet::new(f.base()).unwrap();
        let h = alpha.evaluate(&MixedWord::half(&[2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 3, 3, 3, 3, 3, 3])).unwrap();
        Multicurve::new(gg.curves().iter().map(|c| h.act_on_curve(c).unwrap()).collect(), DisjointnessProvenance::UserAsserted)
            .unwrap()
    };
    let config = PipelineConfig { search_radius: 1, ..PipelineConfig::default() };
    let cert = check_equivalence(&f, &g, &NoOracle, Some((&gf, &gg)), &config);
    assert_eq!(cert.verdict, Verdict::Equivalent, "{cert:?}");
    verify_certificate(&f, &g, &cert).unwrap();
}
