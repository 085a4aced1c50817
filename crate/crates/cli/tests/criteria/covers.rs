use std::collections::HashMap;

use num::{BigInt, BigRational, One};
use rand::seq::SliceRandom;
use rand::Rng;
use thurston_core::cover::{hurwitz_orbit, CoverPresentation, HurwitzTuple};
use thurston_core::format::parse_multicurve;
use thurston_core::freegroup::{ConjClass, ReducedWord};
use thurston_core::mapping_class::{GeneratorSet, MappingClass, TwistKind};
use thurston_core::obstruction::{find_levy_cycles, spectral_certificate, thurston_matrix, Spectral};
use thurston_core::perm::Perm;
use thurston_core::sphere::CurveType;

use super::{ensure, load, rng};

type P3 = [usize; 3];

/// `p` then `q`, acting on the right.
fn then(p: P3, q: P3) -> P3 {
    [q[p[0]], q[p[1]], q[p[2]]]
}

fn inv(p: P3) -> P3 {
    let mut r = [0; 3];
    for i in 0..3 {
        r[p[i]] = i;
    }
    r
}

fn all_s3() -> Vec<P3> {
    vec![[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]]
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    parent[x] = r;
    r
}

pub fn hurwitz() -> Result<String, String> {
    let transpositions: Vec<P3> = vec![[1, 0, 2], [0, 2, 1], [2, 1, 0]];
    let mut tuples: Vec<[P3; 4]> = Vec::new();
    for &a in &transpositions {
        for &b in &transpositions {
            for &c in &transpositions {
                for &d in &transpositions {
                    if then(then(a, b), then(c, d)) == [0, 1, 2] {
                        tuples.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    let index: HashMap<[P3; 4], usize> = tuples.iter().enumerate().map(|(k, t)| (*t, k)).collect();
    let mut parent: Vec<usize> = (0..tuples.len()).collect();
    for (k, t) in tuples.iter().enumerate() {
        let mut images = Vec::new();
        for i in 0..3 {
            let (a, b) = (t[i], t[i + 1]);
            let mut fwd = *t;
            fwd[i] = then(then(a, b), inv(a));
            fwd[i + 1] = a;
            let mut back = *t;
            back[i] = b;
            back[i + 1] = then(then(inv(b), a), b);
            images.extend([fwd, back]);
        }
        for c in all_s3() {
            images.push(t.map(|p| then(then(inv(c), p), c)));
        }
        for img in images {
            let (x, y) = (find(&mut parent, k), find(&mut parent, index[&img]));
            parent[x] = y;
        }
    }
    let to_tuple = |t: &[P3; 4]| HurwitzTuple(t.iter().map(|p| Perm::from_images(p.iter().map(|&x| x as u32).collect()).unwrap()).collect());
    let library: Vec<HurwitzTuple> =
        tuples.iter().map(|t| hurwitz_orbit(&to_tuple(t), 10_000).map(|o| o[0].clone())).collect::<Result<_, _>>().map_err(|e| format!("orbit overflow at {e}"))?;
    for i in 0..tuples.len() {
        for j in 0..tuples.len() {
            let oracle = find(&mut parent, i) == find(&mut parent, j);
            ensure(oracle == (library[i] == library[j]), || format!("tuples {i} and {j}: oracle {oracle}"))?;
        }
    }
    let mut classes: Vec<usize> = (0..tuples.len()).map(|k| find(&mut parent, k)).collect();
    classes.sort();
    classes.dedup();
    let swap = Perm::from_images(vec![1, 0]).unwrap();
    let deg2 = hurwitz_orbit(&HurwitzTuple(vec![swap.clone(), swap]), 100).map_err(|e| e.to_string())?;
    ensure(deg2.len() == 1, || format!("degree 2 pair gives {} classes", deg2.len()))?;
    Ok(format!("{} tuples, {} classes agree with the union-find oracle", tuples.len(), classes.len()))
}

type Profile = Vec<(ConjClass, usize, CurveType)>;

fn profile(f: &CoverPresentation, w: &ReducedWord) -> Profile {
    let mut v: Profile = f.pullback_word(w).into_iter().map(|c| (c.class, c.degree, c.kind)).collect();
    v.sort();
    v
}

fn random_perm(r: &mut impl Rng, d: usize) -> Perm {
    let mut images: Vec<u32> = (0..d as u32).collect();
    images.shuffle(r);
    Perm::from_images(images).unwrap()
}

fn random_word(r: &mut impl Rng, rank: usize, max: usize) -> ReducedWord {
    let raw: Vec<i32> = (0..r.gen_range(0..=max)).map(|_| r.gen_range(1..=rank as i32) * if r.gen_bool(0.5) { 1 } else { -1 }).collect();
    ReducedWord::from_signed(&raw, rank).unwrap()
}

/// `res′(x, s) = c_s · res(x, s) · c_{s·ρ(x)}⁻¹`.
fn change_transversal(f: &CoverPresentation, c: &[ReducedWord]) -> CoverPresentation {
    let rows = (0..f.punctures())
        .map(|x| (0..f.degree()).map(|s| c[s].mul(f.restriction(x, s)).mul(&c[f.monodromy()[x].apply(s)].inverse())).collect())
        .collect();
    CoverPresentation::new(
        f.degree(),
        f.base().clone(),
        f.monodromy().to_vec(),
        rows,
        f.point_map().to_vec(),
        f.local_degrees().to_vec(),
    )
    .unwrap()
}

pub fn pullback() -> Result<String, String> {
    let names = ["half.tm", "levy.tm", "levy_cycle.tm", "two_cycle.tm", "cube.tm", "cubic.tm", "simple_cubic.tm", "quartic.tm"];
    let mut r = rng(6);
    let mut checked = 0;
    for round in 0..520 {
        let base = load(names[round % names.len()]);
        let s = base.base().clone();
        let half = GeneratorSet::new(&s, TwistKind::Half).unwrap();
        let word = |r: &mut rand_chacha::ChaCha8Rng, max: usize| -> MappingClass {
            let w: Vec<i32> = (0..r.gen_range(0..=max)).map(|_| r.gen_range(1..=half.len() as i32) * if r.gen_bool(0.5) { 1 } else { -1 }).collect();
            half.evaluate(&w).unwrap()
        };
        let h = word(&mut r, 3);
        let f = base.conjugate_by(&h).relabel_sheets(&random_perm(&mut r, base.degree()));
        let c: Vec<ReducedWord> = (0..f.degree()).map(|_| random_word(&mut r, s.rank(), 3)).collect();
        let f2 = change_transversal(&f, &c);
        for (tag, p) in [("conjugated", &f), ("transversal", &f2)] {
            let v = p.validate();
            ensure(v.is_empty(), || format!("round {round}: {tag} presentation invalid: {v:?}"))?;
        }
        let fill = s.filling_system().unwrap();
        let curve = word(&mut r, 4).act_on_curve(&fill[r.gen_range(0..fill.len())]).map_err(|e| e.to_string())?;
        let w = curve.word();
        let comps = f.pullback_word(w);
        let total: usize = comps.iter().map(|c| c.degree).sum();
        ensure(total == f.degree(), || format!("round {round}: degrees sum to {total}, not {}", f.degree()))?;
        let g = random_word(&mut r, s.rank(), 4);
        let reference = profile(&f, w);
        for (tag, other) in [
            ("conjugate", profile(&f, &w.conjugated_by(&g))),
            ("inverse", profile(&f, &w.inverse())),
            ("transversal", profile(&f2, w)),
        ] {
            ensure(other == reference, || format!("round {round}: {tag} pullback differs for {w}"))?;
        }
        checked += 1;
    }
    Ok(format!("{checked} presentation/curve pairs over 8 base maps"))
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn obstruction() -> Result<String, String> {
    let cases: Vec<(Vec<Vec<BigRational>>, Spectral)> = vec![
        (vec![vec![q(1, 2)]], Spectral::Less),
        (vec![vec![q(1, 1)]], Spectral::Equal),
        (vec![vec![q(0, 1), q(2, 1)], vec![q(1, 2), q(0, 1)]], Spectral::Equal),
    ];
    for (m, want) in &cases {
        let cert = spectral_certificate(m);
        ensure(cert.verdict == *want, || format!("{m:?}: got {}, want {want}", cert.verdict))?;
        ensure(cert.verify(m), || format!("{m:?}: certificate does not verify"))?;
        if *want == Spectral::Equal {
            ensure((cert.lambda - 1.0).abs() < 1e-9, || format!("{m:?}: λ = {}", cert.lambda))?;
        }
    }
    let single = spectral_certificate(&cases[1].0);
    ensure(single.witness == Some(vec![BigRational::one()]), || format!("witness {:?}", single.witness))?;
    Ok("[1/2] LESS, [1] EQUAL, [[0,2],[1/2,0]] EQUAL, all certificates verified".into())
}

pub fn levy() -> Result<String, String> {
    let f = load("levy_cycle.tm");
    let gamma = parse_multicurve(f.base(), "standard 1 2\nstandard 3 4").map_err(|e| e.to_string())?;
    let cycles = find_levy_cycles(&f, &gamma).map_err(|e| e.to_string())?;
    let m = thurston_matrix(&f, &gamma).map_err(|e| e.to_string())?;
    let full = cycles.iter().find(|c| c.curves.len() == 2).ok_or_else(|| format!("no two-curve Levy cycle in {cycles:?}"))?;
    let sub: Vec<Vec<BigRational>> = full.curves.iter().map(|&i| full.curves.iter().map(|&j| m.entries[i][j].clone()).collect()).collect();
    let cert = spectral_certificate(&sub);
    ensure(cert.verdict != Spectral::Less && cert.verify(&sub), || format!("cycle submatrix verdict {}", cert.verdict))?;
    let g = load("levy.tm");
    let c23 = parse_multicurve(g.base(), "standard 2 3").map_err(|e| e.to_string())?;
    let degenerate = find_levy_cycles(&g, &c23).map_err(|e| e.to_string())?;
    ensure(degenerate.iter().any(|c| c.degenerate), || format!("c23 cycles {degenerate:?} not degenerate"))?;
    Ok(format!("cycle {:?} with verdict {}, c23 flagged degenerate", full.curves, cert.verdict))
}
