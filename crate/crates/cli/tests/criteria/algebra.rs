use std::collections::HashSet;

use num::rational::Ratio;
use rand::Rng;
use thurston_core::centralizer::{
    centralizer_search, conjugator_search, generated_within, sl2z_commutant, ConjugatorOutcome, IntMatrix2,
};
use thurston_core::freegroup::{ConjClass, FreeAutomorphism, OrientedClass, ReducedWord};
use thurston_core::mapping_class::{commute, mc_equal, Ball, GeneratorSet, MappingClass, TwistKind};
use thurston_core::sphere::PuncturedSphere;

use super::{ensure, rng};

const CASES: usize = 10_000;

fn random_raw(r: &mut impl Rng, rank: usize, max: usize) -> Vec<i32> {
    let len = r.gen_range(0..=max);
    (0..len).map(|_| r.gen_range(1..=rank as i32) * if r.gen_bool(0.5) { 1 } else { -1 }).collect()
}

fn naive_reduce(raw: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::new();
    for &x in raw {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

fn naive_cyclic(raw: &[i32]) -> Vec<i32> {
    let mut w = naive_reduce(raw);
    while w.len() > 1 && w[0] == -w[w.len() - 1] {
        w = w[1..w.len() - 1].to_vec();
    }
    w
}

fn naive_inverse(w: &[i32]) -> Vec<i32> {
    w.iter().rev().map(|x| -x).collect()
}

/// Conjugate (up to inversion) iff cyclic reductions are rotations of each other.
fn naive_conjugate(a: &[i32], b: &[i32]) -> bool {
    let (a, b) = (naive_cyclic(a), naive_cyclic(b));
    let rotations = |x: &[i32], y: &[i32]| x.len() == y.len() && (x.is_empty() || (0..x.len()).any(|k| x[k..].iter().chain(&x[..k]).eq(y)));
    rotations(&a, &b) || rotations(&a, &naive_inverse(&b))
}

fn signed(w: &ReducedWord) -> Vec<i32> {
    w.letters().iter().map(|l| l.signed()).collect()
}

pub fn free_group() -> Result<String, String> {
    let mut r = rng(1);
    let rank = 3;
    for _ in 0..CASES {
        let raw = random_raw(&mut r, rank, 24);
        let w = ReducedWord::from_signed(&raw, rank).unwrap();
        ensure(signed(&w) == naive_reduce(&raw), || format!("reduction of {raw:?}"))?;
        ensure(ReducedWord::from_signed(&signed(&w), rank).unwrap() == w, || format!("idempotence on {raw:?}"))?;
    }
    let mut agreements = 0;
    for k in 0..CASES {
        let a = random_raw(&mut r, rank, 8);
        let wa = ReducedWord::from_signed(&a, rank).unwrap();
        let g = ReducedWord::from_signed(&random_raw(&mut r, rank, 6), rank).unwrap();
        let ca = ConjClass::of(&wa);
        ensure(ConjClass::of(&wa.conjugated_by(&g)) == ca, || format!("conjugation changed the class of {wa}"))?;
        ensure(ConjClass::of(&wa.inverse()) == ca, || format!("inversion changed the class of {wa}"))?;
        ensure(OrientedClass::of(&wa.conjugated_by(&g)) == OrientedClass::of(&wa), || format!("oriented class of {wa}"))?;
        // alternate unrelated words with perturbed conjugates so both answers occur
        let b = if k % 2 == 0 {
            random_raw(&mut r, rank, 8)
        } else {
            let mut c = signed(&wa.conjugated_by(&g));
            if !c.is_empty() && r.gen_bool(0.5) {
                let i = r.gen_range(0..c.len());
                c[i] = -c[i];
            }
            c
        };
        let wb = ReducedWord::from_signed(&b, rank).unwrap();
        let lib = ConjClass::of(&wa) == ConjClass::of(&wb);
        ensure(lib == naive_conjugate(&a, &b), || format!("conjugacy of {wa} and {wb}"))?;
        agreements += usize::from(lib);
    }
    let s = PuncturedSphere::new(5).unwrap();
    let gens = GeneratorSet::new(&s, TwistKind::Half).unwrap();
    let pool: Vec<FreeAutomorphism> = (0..200)
        .map(|_| {
            let len = r.gen_range(1..=6);
            let word: Vec<i32> = (0..len).map(|_| r.gen_range(1..=gens.len() as i32) * if r.gen_bool(0.5) { 1 } else { -1 }).collect();
            gens.evaluate(&word).unwrap().auto().clone()
        })
        .collect();
    let rank = s.rank();
    let id = FreeAutomorphism::identity(rank);
    for _ in 0..CASES {
        let a = &pool[r.gen_range(0..pool.len())];
        let b = &pool[r.gen_range(0..pool.len())];
        let w = ReducedWord::from_signed(&random_raw(&mut r, rank, 10), rank).unwrap();
        ensure(a.apply(&a.apply_inverse(&w)) == w && a.apply_inverse(&a.apply(&w)) == w, || format!("inverse law on {w}"))?;
        ensure(a.compose(&a.invert()).unwrap() == id, || "a∘a⁻¹ is not the identity".into())?;
        let ab = a.compose(b).unwrap();
        ensure(ab.invert() == b.invert().compose(&a.invert()).unwrap(), || "(ab)⁻¹ ≠ b⁻¹a⁻¹".into())?;
        ensure(ab.apply(&w) == a.apply(&b.apply(&w)), || "composition order".into())?;
    }
    Ok(format!("3 × {CASES} cases; {agreements} conjugate pairs among {CASES}"))
}

fn nested_or_disjoint(a: (usize, usize), b: (usize, usize)) -> bool {
    a.1 < b.0 || b.1 < a.0 || (a.0 <= b.0 && b.1 <= a.1) || (b.0 <= a.0 && a.1 <= b.1)
}

pub fn relations() -> Result<String, String> {
    let (mut commuting, mut braids, mut free) = (0, 0, 0);
    for n in 4..=6 {
        let s = PuncturedSphere::new(n).unwrap();
        let curves: Vec<(usize, usize)> = s.filling_system().unwrap().iter().map(|c| c.standard().unwrap()).collect();
        let twists: Vec<MappingClass> = curves.iter().map(|&(i, j)| MappingClass::standard_twist(&s, i, j).unwrap()).collect();
        for (x, &a) in curves.iter().enumerate() {
            for (y, &b) in curves.iter().enumerate().skip(x + 1) {
                let ab = twists[x].compose(&twists[y]).unwrap();
                let ba = twists[y].compose(&twists[x]).unwrap();
                let d = mc_equal(&ab, &ba, None).unwrap();
                if nested_or_disjoint(a, b) {
                    ensure(d.is_yes(), || format!("n={n}: T{a:?} and T{b:?} do not commute"))?;
                    commuting += 1;
                } else {
                    ensure(d.is_no(), || format!("n={n}: crossing T{a:?}, T{b:?} reported {d:?}"))?;
                    free += 1;
                }
            }
        }
        for i in 1..n - 1 {
            let a = MappingClass::half_twist(&s, i).unwrap();
            let b = MappingClass::half_twist(&s, i + 1).unwrap();
            let lhs = a.compose(&b).unwrap().compose(&a).unwrap();
            let rhs = b.compose(&a).unwrap().compose(&b).unwrap();
            ensure(mc_equal(&lhs, &rhs, None).unwrap().is_yes(), || format!("n={n}: braid relation at {i}"))?;
            braids += 1;
        }
        for i in 1..n - 1 {
            for j in i + 2..n {
                let a = MappingClass::half_twist(&s, i).unwrap();
                let b = MappingClass::half_twist(&s, j).unwrap();
                let d = mc_equal(&a.compose(&b).unwrap(), &b.compose(&a).unwrap(), None).unwrap();
                ensure(d.is_yes(), || format!("n={n}: far half twists {i},{j}"))?;
                commuting += 1;
            }
        }
    }
    Ok(format!("{commuting} commutations, {braids} braid relations, {free} crossing pairs non-commuting"))
}

pub fn centralizer() -> Result<String, String> {
    let s = PuncturedSphere::new(5).unwrap();
    let g = GeneratorSet::full_twists(&s).unwrap();
    let (t12, t34) = (g.index_of("T12").unwrap() as i32, g.index_of("T34").unwrap() as i32);
    let mut ball = Ball::new(&g);
    for _ in 0..3 {
        ball.grow(usize::MAX);
    }
    let mut sizes = Vec::new();
    for word in [vec![t12], vec![t12, t34]] {
        let phi = g.evaluate(&word).unwrap();
        let r = centralizer_search(&phi, &g, &Ratio::from_integer(4), 3).map_err(|e| e.to_string())?;
        ensure(r.search_radius == 3, || format!("radius {}", r.search_radius))?;
        let brute: HashSet<usize> =
            (0..ball.entries().len()).filter(|&k| commute(&ball.entries()[k], &phi).unwrap().is_yes()).collect();
        let gens: Vec<MappingClass> = r.generators.iter().map(|c| c.class.clone()).collect();
        let generated = generated_within(&ball, &gens);
        ensure(generated == brute, || {
            format!("{}: generated {} of the ball, brute force commutant {}", g.format_word(&word), generated.len(), brute.len())
        })?;
        sizes.push(format!("{}: {} generators, commutant {} of {}", g.format_word(&word), gens.len(), brute.len(), ball.entries().len()));
    }
    Ok(sizes.join("; "))
}

pub fn conjugators() -> Result<String, String> {
    let s = PuncturedSphere::new(4).unwrap();
    let g = GeneratorSet::full_twists(&s).unwrap();
    let mut r = rng(4);
    let letter = |r: &mut rand_chacha::ChaCha8Rng| r.gen_range(1..=g.len() as i32) * if r.gen_bool(0.5) { 1 } else { -1 };
    let k = Ratio::from_integer(2);
    for case in 0..50 {
        let phi_w: Vec<i32> = (0..r.gen_range(1..=3)).map(|_| letter(&mut r)).collect();
        let eta_w: Vec<i32> = (0..r.gen_range(0..=4)).map(|_| letter(&mut r)).collect();
        let inv: Vec<i32> = eta_w.iter().rev().map(|x| -x).collect();
        let conj_w: Vec<i32> = eta_w.iter().chain(&phi_w).chain(&inv).copied().collect();
        let (phi, phi2) = (g.evaluate(&phi_w).unwrap(), g.evaluate(&conj_w).unwrap());
        match conjugator_search(&phi, &phi2, &g, &k, 4).map_err(|e| e.to_string())? {
            ConjugatorOutcome::Found { eta, .. } => {
                let ok = mc_equal(&eta.compose(&phi).unwrap(), &phi2.compose(&eta).unwrap(), None).unwrap().is_yes();
                ensure(ok, || format!("case {case}: returned conjugator fails"))?;
            }
            other => return Err(format!("case {case}: {} ~ {}: {other:?}", g.format_word(&phi_w), g.format_word(&conj_w))),
        }
    }
    for case in 0..20 {
        let a: Vec<i32> = (0..r.gen_range(1..=3)).map(|_| letter(&mut r)).collect();
        let mut b = a.clone();
        b.push(b[0].signum() * b[0].abs());
        let eta: Vec<i32> = (0..r.gen_range(0..=2)).map(|_| letter(&mut r)).collect();
        let inv: Vec<i32> = eta.iter().rev().map(|x| -x).collect();
        let b: Vec<i32> = eta.iter().chain(&b).chain(&inv).copied().collect();
        let (phi, phi2) = (g.evaluate(&a).unwrap(), g.evaluate(&b).unwrap());
        match conjugator_search(&phi, &phi2, &g, &k, 4).map_err(|e| e.to_string())? {
            ConjugatorOutcome::NotConjugate { .. } => {}
            other => return Err(format!("non-conjugate case {case}: {other:?}")),
        }
    }
    Ok("50 conjugate pairs solved, 20 non-conjugate pairs refuted".into())
}

pub fn commutant() -> Result<String, String> {
    let mats = [
        IntMatrix2::new(2, 1, 1, 1),
        IntMatrix2::new(3, 2, 1, 1),
        IntMatrix2::new(2, 3, 1, 2),
        IntMatrix2::new(5, 2, 2, 1),
        IntMatrix2::new(1, 1, 1, 0),
    ];
    let mut found = 0;
    for a in mats {
        let c = sl2z_commutant(&a).map_err(|e| e.to_string())?;
        for g in &c.generators {
            ensure(g.commutes_with(&a) && g.det().abs() == 1, || format!("{g} does not commute with {a}"))?;
        }
        let mut group: HashSet<IntMatrix2> = HashSet::from([IntMatrix2::IDENTITY]);
        let mut frontier = vec![IntMatrix2::IDENTITY];
        let steps: Vec<IntMatrix2> = c.generators.iter().flat_map(|g| [*g, g.inverse()]).collect();
        while let Some(m) = frontier.pop() {
            for s in &steps {
                let p = m.mul(s);
                if p.max_abs() <= 100_000 && group.insert(p) {
                    frontier.push(p);
                }
            }
        }
        for b2 in -50..=50i64 {
            if (a.c * b2) % a.b != 0 || (a.a - a.d) * b2 % a.b != 0 {
                continue;
            }
            let c2 = a.c * b2 / a.b;
            let diff = (a.a - a.d) * b2 / a.b;
            for d2 in -50..=50i64 {
                let m = IntMatrix2::new(d2 + diff, b2, c2, d2);
                if m.max_abs() > 50 || m.det().abs() != 1 {
                    continue;
                }
                ensure(m.commutes_with(&a), || format!("oracle produced non-commuting {m}"))?;
                ensure(group.contains(&m), || format!("{m} commutes with {a} but is not generated"))?;
                found += 1;
            }
        }
    }
    Ok(format!("5 matrices, {found} commuting unimodular matrices with entries ≤ 50, all generated"))
}
