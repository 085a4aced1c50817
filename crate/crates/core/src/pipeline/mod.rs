//! Deciding Thurston equivalence of two presentations.
//!
//! Invariant gates run first (degree, dynamics, orbifold, obstruction
//! matrices). Then, for every puncture bijection `σ` compatible with the
//! dynamics, a Hurwitz search produces a liftable `h_σ`, and the pure ball
//! around it is searched for `h` whose lift is isotopic to `h`. When an
//! obstruction is present, candidates whose lift differs from `h` by twists
//! along it are corrected by solving the twist equations over ℤ.

mod glue;

pub use glue::{
    choose_probes, curve_twist, twist_defect, Alphabet, CurveTwist, DefectError, GlueContext, GlueOutcome, MixedWord,
};

use num::integer::lcm;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::cover::{
    decompose, lift_mapping_class, lifts_through, same_hurwitz_class, CoverPresentation, HurwitzDecision, HurwitzTuple,
};
use crate::freegroup::ReducedWord;
use crate::centralizer::generated_within;
use crate::mapping_class::{mc_equal, Ball, MappingClass};
use crate::obstruction::{leading_eigenvalue_geq_1, stable_saturation, thurston_matrix, Spectral, ThurstonMatrix};
use crate::perm::Perm;
use crate::sphere::{DisjointnessProvenance, Multicurve};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OracleAnswer {
    Token(String),
    Unavailable,
}

/// Fingerprints geometrized pieces; equal tokens assert equivalence.
pub trait GeometrizationOracle: Sync {
    fn fingerprint(&self, piece: &CoverPresentation) -> OracleAnswer;
}

pub struct NoOracle;

impl GeometrizationOracle for NoOracle {
    fn fingerprint(&self, _: &CoverPresentation) -> OracleAnswer {
        OracleAnswer::Unavailable
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Radius of the pure-twist ball searched around each `h_σ`.
    pub search_radius: usize,
    pub max_ball: usize,
    pub hurwitz_states: usize,
    pub saturation_budget: usize,
    /// Radius of half-twist balls used for charts and probe curves.
    pub chart_radius: usize,
    pub modulus: Option<u64>,
    pub centralizer_radius: usize,
    /// Candidates per `σ` handed to the twist-lattice solver.
    pub glue_attempts: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            search_radius: 3,
            max_ball: 20_000,
            hurwitz_states: 200_000,
            saturation_budget: 8,
            chart_radius: 3,
            modulus: None,
            centralizer_radius: 2,
            glue_attempts: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    Degree,
    Punctures,
    Dynamics,
    Orbifold,
    ObstructionSize,
    ThurstonMatrix,
    Realizability,
    Hurwitz,
    Oracle,
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Equivalent,
    NotEquivalent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// `h` in half-twist and full-twist generators; its lift is isotopic to it.
    pub h: String,
    /// Cycle notation on punctures, 1-based.
    pub puncture_map: String,
    /// Cycle notation on sheets: sheet of `f` to sheet of `g`.
    pub sheet_map: String,
    /// Images of `x1..x{n-1}` under the lift.
    pub lift: Vec<String>,
    /// `c` with `lift(x) = c · h(x) · c⁻¹`.
    pub conjugator: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionSummary {
    pub curves: Vec<String>,
    pub matrix: Option<String>,
    pub spectral: Option<Spectral>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceCertificate {
    pub verdict: Verdict,
    pub gate: Option<Gate>,
    pub reason: String,
    pub witness: Option<Witness>,
    pub obstruction_f: ObstructionSummary,
    pub obstruction_g: ObstructionSummary,
    /// Obstructions were supplied rather than found by saturation.
    pub canonical: bool,
    pub modulus: Option<u64>,
    pub modulus_derivation: String,
    pub permutations_tried: usize,
    pub undecided: Vec<String>,
    pub events: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateReport {
    pub pass: bool,
    /// `perm[i]` is the index in `Γ_g` matched with curve `i` of `Γ_f`.
    pub permutation: Option<Vec<usize>>,
    pub detail: String,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Compares `|Γ|` and the Thurston matrices up to simultaneous reordering.
pub fn gate_obstruction_invariants(mf: &ThurstonMatrix, mg: &ThurstonMatrix) -> GateReport {
    let k = mf.size();
    if k != mg.size() {
        return GateReport { pass: false, permutation: None, detail: format!("|Γ_f| = {k}, |Γ_g| = {}", mg.size()) };
    }
    for p in permutations(k) {
        if (0..k).all(|i| (0..k).all(|j| mf.entries[i][j] == mg.entries[p[i]][p[j]])) {
            return GateReport { pass: true, permutation: Some(p), detail: "matrices agree".into() };
        }
    }
    GateReport { pass: false, permutation: None, detail: format!("{mf} and {mg} differ under every reordering") }
}

/// Side of each curve away from the last puncture, as a sorted set.
fn curve_sides(gamma: &Multicurve) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = gamma.curves().iter().map(|c| c.enclosure().to_vec()).collect();
    out.sort();
    out
}

fn sides_under(sigma: &Perm, sides: &[Vec<usize>], n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = sides
        .iter()
        .map(|s| {
            let mut img: Vec<usize> = s.iter().map(|&p| sigma.apply(p - 1) + 1).collect();
            if img.contains(&n) {
                img = (1..=n).filter(|q| !img.contains(q)).collect();
            }
            img.sort();
            img
        })
        .collect();
    out.sort();
    out
}

/// Puncture bijections `σ` (f-puncture `p` to g-puncture `σ(p)`) respecting
/// the marked-point dynamics, local degrees and monodromy cycle types.
pub fn compatible_bijections(f: &CoverPresentation, g: &CoverPresentation) -> Vec<Perm> {
    let n = f.punctures();
    permutations(n)
        .into_iter()
        .filter(|s| {
            (0..n).all(|p| {
                s[f.point_map()[p]] == g.point_map()[s[p]]
                    && f.local_degrees()[p] == g.local_degrees()[s[p]]
                    && f.monodromy()[p].cycle_type() == g.monodromy()[s[p]].cycle_type()
            })
        })
        .map(|s| Perm::from_images(s.into_iter().map(|x| x as u32).collect()).expect("bijection"))
        .collect()
}

/// A multicurve with leading eigenvalue at least 1 found by saturating single
/// standard curves, or the empty multicurve.
pub fn fallback_obstruction(f: &CoverPresentation, budget: usize) -> Multicurve {
    if let Ok(filling) = f.base().filling_system() {
        for c in filling {
            let seed = Multicurve::new(vec![c], DisjointnessProvenance::StandardFamily).expect("single curve");
            if let Ok(gamma) = stable_saturation(f, &seed, budget) {
                if let Ok(m) = thurston_matrix(f, &gamma) {
                    if leading_eigenvalue_geq_1(&m).verdict != Spectral::Less {
                        return gamma;
                    }
                }
            }
        }
    }
    Multicurve::new(Vec::new(), DisjointnessProvenance::Pullback).expect("empty")
}

fn summary(f: &CoverPresentation, gamma: &Multicurve) -> (ObstructionSummary, Option<ThurstonMatrix>) {
    let curves = gamma.curves().iter().map(|c| format!("{c}")).collect();
    match thurston_matrix(f, gamma) {
        Ok(m) => {
            let s = leading_eigenvalue_geq_1(&m).verdict;
            (ObstructionSummary { curves, matrix: Some(m.to_string()), spectral: Some(s) }, Some(m))
        }
        Err(_) => (ObstructionSummary { curves, matrix: None, spectral: None }, None),
    }
}

/// `N`: least common multiple of the degrees of all preimage components of the curves.
pub fn glue_modulus(f: &CoverPresentation, gamma: &Multicurve) -> (u64, String) {
    let mut degrees = Vec::new();
    for c in gamma.curves() {
        if let Ok(pb) = f.pullback_curve(c) {
            degrees.extend(pb.iter().map(|p| p.degree as u64));
        }
    }
    degrees.sort();
    degrees.dedup();
    let n = degrees.iter().fold(1u64, |a, &b| lcm(a, b));
    (n, format!("lcm of preimage component degrees {degrees:?}"))
}

fn realize_witness(f: &CoverPresentation, g: &CoverPresentation, alpha: &Alphabet, w: &MixedWord) -> Option<Witness> {
    let h = alpha.evaluate(w).ok()?;
    for pi in lifts_through(f, g, &h).ok()? {
        let Ok(lift) = lift_mapping_class(f, g, &h, &pi) else { continue };
        if let Ok(crate::freegroup::Decision::Yes(c)) = mc_equal(&lift, &h, None) {
            return Some(Witness {
                h: alpha.format(w),
                puncture_map: h.puncture_perm().to_string(),
                sheet_map: pi.to_string(),
                lift: lift.auto().images().iter().map(ToString::to_string).collect(),
                conjugator: c.to_string(),
            });
        }
    }
    None
}

/// Re-checks a certificate against the two presentations.
pub fn verify_certificate(
    f: &CoverPresentation,
    g: &CoverPresentation,
    cert: &EquivalenceCertificate,
) -> Result<(), String> {
    match cert.verdict {
        Verdict::Equivalent => {
            let w = cert.witness.as_ref().ok_or("equivalent verdict without witness")?;
            let alpha = Alphabet::new(f.base()).map_err(|e| e.to_string())?;
            let word = alpha.parse(&w.h).ok_or("witness word does not parse")?;
            let h = alpha.evaluate(&word).map_err(|e| e.to_string())?;
            let sigma = Perm::parse_cycles(&w.puncture_map, f.punctures()).map_err(|e| e.to_string())?;
            if h.puncture_perm() != &sigma {
                return Err("puncture map mismatch".into());
            }
            let pi = Perm::parse_cycles(&w.sheet_map, f.degree()).map_err(|e| e.to_string())?;
            let pis = lifts_through(f, g, &h).map_err(|e| e.to_string())?;
            if !pis.contains(&pi) {
                return Err("sheet map is not a correspondence".into());
            }
            let lift = lift_mapping_class(f, g, &h, &pi).map_err(|e| e.to_string())?;
            let recorded: Vec<String> = lift.auto().images().iter().map(ToString::to_string).collect();
            if recorded != w.lift {
                return Err("recorded lift differs".into());
            }
            let r = f.base().rank();
            let c = crate::format::parse_word(&w.conjugator, r)?;
            let ci = c.inverse();
            for k in 1..=r {
                let x = ReducedWord::generator(r, k);
                if lift.act_on_word(&x) != c.mul(&h.act_on_word(&x)).mul(&ci) {
                    return Err(format!("lift and h differ on x{k}"));
                }
            }
            Ok(())
        }
        Verdict::NotEquivalent => {
            if cert.gate.is_none() {
                return Err("refutation without a gate".into());
            }
            if !cert.undecided.is_empty() {
                return Err("refutation with undecided branches".into());
            }
            Ok(())
        }
        Verdict::Inconclusive => Ok(()),
    }
}

struct Run {
    cert: EquivalenceCertificate,
}

impl Run {
    fn refute(mut self, gate: Gate, reason: String) -> EquivalenceCertificate {
        if self.cert.undecided.is_empty() {
            self.cert.verdict = Verdict::NotEquivalent;
            self.cert.gate = Some(gate);
        } else {
            self.cert.verdict = Verdict::Inconclusive;
            self.cert.gate = None;
        }
        self.cert.reason = reason;
        self.cert
    }
}

/// Runs the full decision procedure. `obstructions` are treated as canonical;
/// without them a saturation fallback is used and matrix gates become advisory.
pub fn check_equivalence(
    f: &CoverPresentation,
    g: &CoverPresentation,
    oracle: &dyn GeometrizationOracle,
    obstructions: Option<(&Multicurve, &Multicurve)>,
    config: &PipelineConfig,
) -> EquivalenceCertificate {
    let empty = ObstructionSummary { curves: Vec::new(), matrix: None, spectral: None };
    let mut run = Run {
        cert: EquivalenceCertificate {
            verdict: Verdict::Inconclusive,
            gate: None,
            reason: String::new(),
            witness: None,
            obstruction_f: empty.clone(),
            obstruction_g: empty,
            canonical: obstructions.is_some(),
            modulus: None,
            modulus_derivation: String::new(),
            permutations_tried: 0,
            undecided: Vec::new(),
            events: Vec::new(),
        },
    };
    if f.degree() != g.degree() {
        return run.refute(Gate::Degree, format!("degrees {} and {}", f.degree(), g.degree()));
    }
    if f.punctures() != g.punctures() {
        return run.refute(Gate::Punctures, format!("{} and {} marked points", f.punctures(), g.punctures()));
    }
    let canonical = obstructions.is_some();
    let (gf, gg) = match obstructions {
        Some((a, b)) => (a.clone(), b.clone()),
        None => (fallback_obstruction(f, config.saturation_budget), fallback_obstruction(g, config.saturation_budget)),
    };
    let (sf, mf) = summary(f, &gf);
    let (sg, mg) = summary(g, &gg);
    run.cert.obstruction_f = sf;
    run.cert.obstruction_g = sg;
    match (&mf, &mg) {
        (Some(mf), Some(mg)) => {
            let report = gate_obstruction_invariants(mf, mg);
            if !report.pass {
                let gate = if mf.size() != mg.size() { Gate::ObstructionSize } else { Gate::ThurstonMatrix };
                if canonical {
                    return run.refute(gate, report.detail);
                }
                run.cert.events.push(format!("advisory {gate} gate failed on saturated multicurves: {}", report.detail));
            } else {
                run.cert.events.push(format!("obstruction gate passed: {}", report.detail));
            }
        }
        _ => run.cert.events.push("obstruction is not invariant; matrix gate skipped".into()),
    }
    let (of, og) = (f.orbifold_type(), g.orbifold_type());
    if of != og {
        return run.refute(Gate::Orbifold, format!("orbifolds {of:?} and {og:?}"));
    }
    let sigmas = compatible_bijections(f, g);
    if sigmas.is_empty() {
        return run.refute(Gate::Dynamics, "no puncture bijection respects the dynamics".into());
    }
    if gf.is_empty() && gg.is_empty() {
        match (oracle.fingerprint(f), oracle.fingerprint(g)) {
            (OracleAnswer::Token(a), OracleAnswer::Token(b)) => {
                if a != b {
                    return run.refute(Gate::Oracle, format!("oracle tokens {a} and {b} differ"));
                }
                run.cert.events.push("oracle tokens agree".into());
            }
            _ => run.cert.events.push("oracle unavailable".into()),
        }
    }
    let (modulus, derivation) = match config.modulus {
        Some(m) => (m, "configured".to_string()),
        None => glue_modulus(f, &gf),
    };
    run.cert.modulus = Some(modulus);
    run.cert.modulus_derivation = derivation;

    let alpha = match Alphabet::new(f.base()) {
        Ok(a) => a,
        Err(e) => {
            run.cert.undecided.push(format!("no generating set: {e}"));
            run.cert.reason = "surface too small for twist search".into();
            return run.cert;
        }
    };
    let glue = if gf.is_empty() {
        None
    } else {
        let twists: Option<Vec<CurveTwist>> = gf.curves().iter().map(|c| curve_twist(&alpha, c, config.chart_radius)).collect();
        match twists {
            Some(t) => match choose_probes(&alpha, &t, config.chart_radius) {
                Ok(p) => {
                    let psi = compute_thick_centralizer(g, &gg, canonical, oracle, config).words;
                    Some((t, p, psi))
                }
                Err(e) => {
                    run.cert.events.push(format!("twist coordinates unavailable: {e}"));
                    None
                }
            },
            None => {
                run.cert.events.push("no chart for an obstruction curve".into());
                None
            }
        }
    };
    let mut ball = Ball::new(&alpha.full);
    while ball.radius() < config.search_radius && ball.grow(config.max_ball) {}
    let pure: Vec<MixedWord> = ball.entries().iter().map(|m| MixedWord::full(m.word().expect("ball words"))).collect();
    let sides_f = curve_sides(&gf);
    let sides_g = curve_sides(&gg);
    let tf = HurwitzTuple(f.monodromy().to_vec());
    let tg = HurwitzTuple(g.monodromy().to_vec());
    let mut refuted_by = Gate::Hurwitz;
    for sigma in sigmas {
        run.cert.permutations_tried += 1;
        if canonical && sides_under(&sigma, &sides_f, f.punctures()) != sides_g {
            refuted_by = Gate::Realizability;
            run.cert.events.push(format!("σ={sigma}: obstruction curves not matched"));
            continue;
        }
        let base = match same_hurwitz_class(&tg, &tf, Some(&sigma), config.hurwitz_states) {
            HurwitzDecision::Equivalent(w) => MixedWord::half(&w.moves.iter().map(|m| m.signed()).collect::<Vec<_>>()),
            HurwitzDecision::NotEquivalent => {
                run.cert.events.push(format!("σ={sigma}: Hurwitz classes differ"));
                continue;
            }
            HurwitzDecision::Overflow { explored } => {
                run.cert.undecided.push(format!("σ={sigma}: Hurwitz search stopped after {explored} states"));
                continue;
            }
        };
        let ctx = glue.as_ref().map(|(t, p, psi)| GlueContext { f, g, alpha: &alpha, twists: t, probes: p, psi, modulus });
        match thick_equivalence_search(f, g, &alpha, &base, &pure, ctx.as_ref(), config.glue_attempts) {
            Some(w) => {
                if let Some(witness) = realize_witness(f, g, &alpha, &w) {
                    run.cert.verdict = Verdict::Equivalent;
                    run.cert.reason = format!("σ={sigma}");
                    run.cert.witness = Some(witness);
                    run.cert.undecided.clear();
                    return run.cert;
                }
            }
            None => run.cert.undecided.push(format!(
                "σ={sigma}: no equivalence within pure radius {} around {}",
                ball.radius(),
                alpha.format(&base)
            )),
        }
    }
    let reason = format!("every compatible bijection refuted ({} tried)", run.cert.permutations_tried);
    run.refute(refuted_by, reason)
}

/// Searches `h_σ ∘ p` over the pure ball for a lift isotopic to itself,
/// handing up to `attempts` twist-defect candidates to the lattice solver.
pub fn thick_equivalence_search(
    f: &CoverPresentation,
    g: &CoverPresentation,
    alpha: &Alphabet,
    base: &MixedWord,
    pure: &[MixedWord],
    glue: Option<&GlueContext>,
    attempts: usize,
) -> Option<MixedWord> {
    let mut tried = 0;
    for p in pure {
        let w = base.then(p);
        let Ok(h) = alpha.evaluate(&w) else { continue };
        let Ok(pis) = lifts_through(f, g, &h) else { continue };
        if pis.is_empty() {
            continue;
        }
        for pi in &pis {
            if let Ok(lift) = lift_mapping_class(f, g, &h, pi) {
                if mc_equal(&lift, &h, None).is_ok_and(|d| d.is_yes()) {
                    return Some(w);
                }
            }
        }
        if let Some(ctx) = glue {
            if tried < attempts && ctx.defect_of(&w).is_some() {
                tried += 1;
                if let GlueOutcome::Success(found) = ctx.lattice_glue(&w) {
                    return Some(found);
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThickCentralizer {
    pub case: String,
    pub generators: Vec<String>,
    #[serde(skip)]
    pub words: Vec<MixedWord>,
    pub pieces: Vec<String>,
    pub search_radius: usize,
    pub complete: bool,
}

/// Pure mapping classes whose lift agrees with them off the multicurve,
/// reduced to a generating list within the search ball.
pub fn compute_thick_centralizer(
    g: &CoverPresentation,
    gamma: &Multicurve,
    canonical: bool,
    oracle: &dyn GeometrizationOracle,
    config: &PipelineConfig,
) -> ThickCentralizer {
    let mut pieces = Vec::new();
    if let Ok(d) = decompose(g, gamma) {
        for c in &d.cycles {
            let kind = if c.homeomorphism { "homeomorphism" } else { "covering" };
            pieces.push(format!("components {:?}: first return of degree {} ({kind})", c.members, c.return_degree));
        }
    }
    let hyperbolic = g.orbifold_type() == crate::cover::OrbifoldType::Hyperbolic;
    if gamma.is_empty() && hyperbolic && canonical {
        let token = match oracle.fingerprint(g) {
            OracleAnswer::Token(t) => format!(" (token {t})"),
            OracleAnswer::Unavailable => String::new(),
        };
        return ThickCentralizer {
            case: format!("unobstructed hyperbolic: trivial{token}"),
            generators: Vec::new(),
            words: Vec::new(),
            pieces,
            search_radius: 0,
            complete: true,
        };
    }
    let Ok(alpha) = Alphabet::new(g.base()) else {
        return ThickCentralizer {
            case: "no essential curves".into(),
            generators: Vec::new(),
            words: Vec::new(),
            pieces,
            search_radius: 0,
            complete: true,
        };
    };
    let twists: Option<Vec<CurveTwist>> = gamma.curves().iter().map(|c| curve_twist(&alpha, c, config.chart_radius)).collect();
    let probes = twists.as_ref().and_then(|t| choose_probes(&alpha, t, config.chart_radius).ok());
    let mut ball = Ball::new(&alpha.full);
    while ball.radius() < config.centralizer_radius && ball.grow(config.max_ball) {}
    let mut kept: Vec<MappingClass> = Vec::new();
    let mut words = Vec::new();
    for (idx, m) in ball.entries().iter().enumerate().skip(1) {
        let w = MixedWord::full(m.word().expect("ball words"));
        let ok = match (&twists, &probes) {
            _ if gamma.is_empty() => realize_witness(g, g, &alpha, &w).is_some(),
            (Some(t), Some(p)) => {
                let ctx = GlueContext { f: g, g, alpha: &alpha, twists: t, probes: p, psi: &[], modulus: 1 };
                ctx.defect_of(&w).is_some()
            }
            _ => false,
        };
        if ok && !generated_within(&ball, &kept).contains(&idx) {
            kept.push(m.clone());
            words.push(w);
        }
    }
    ThickCentralizer {
        case: if gamma.is_empty() { "self-equivalences".into() } else { "twist-compatible self-maps".into() },
        generators: words.iter().map(|w| alpha.format(w)).collect(),
        words,
        pieces,
        search_radius: ball.radius(),
        complete: false,
    }
}
