mod cache;
mod oracle;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num::rational::Ratio;

use thurston_core::centralizer::{centralizer_search, conjugator_search, ConjugatorOutcome};
use thurston_core::cover::{same_hurwitz_class, CoverPresentation, HurwitzDecision, HurwitzTuple};
use thurston_core::format::{parse_curve, parse_multicurve, parse_unvalidated};
use thurston_core::mapping_class::{GeneratorSet, MappingClass, TwistKind};
use thurston_core::obstruction::{find_levy_cycles, leading_eigenvalue_geq_1, thurston_matrix, BlockBound, Spectral};
use thurston_core::perm::Perm;
use thurston_core::pipeline::{
    check_equivalence, compute_thick_centralizer, fallback_obstruction, verify_certificate, Alphabet,
    GeometrizationOracle, NoOracle, PipelineConfig, Verdict,
};
use thurston_core::sphere::{Multicurve, PuncturedSphere};

use cache::OrbitCache;
use oracle::SubprocessOracle;

#[derive(Parser)]
#[command(name = "thurston", version, about = "Thurston maps: validation, obstructions, equivalence")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for the Hurwitz orbit cache.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a presentation; exit 1 on any violation.
    Validate { file: PathBuf },
    /// Components of the preimage of a curve.
    Pullback {
        file: PathBuf,
        #[arg(long)]
        curve: String,
    },
    /// Thurston matrix, eigenvalue comparison and Levy cycles.
    Matrix {
        file: PathBuf,
        /// Curves separated by `;`, or `@path` to a multicurve file.
        #[arg(long)]
        multicurve: String,
    },
    /// Commuting generators within the bounded ball.
    Centralizer {
        punctures: usize,
        #[arg(long)]
        word: String,
        #[arg(long, default_value = "4")]
        m0: String,
        #[arg(long, default_value_t = 4)]
        budget: usize,
    },
    /// Conjugator between two mapping classes, or a bounded refutation.
    Conjugate {
        punctures: usize,
        #[arg(long, num_args = 1, required = true)]
        word: Vec<String>,
        #[arg(long, default_value = "4")]
        k: String,
        #[arg(long, default_value_t = 4)]
        budget: usize,
    },
    /// Hurwitz equivalence of the monodromy tuples.
    Hurwitz {
        f: PathBuf,
        g: PathBuf,
        /// Puncture bijection from `f` to `g` in cycle notation.
        #[arg(long)]
        h0: Option<String>,
        #[arg(long, default_value_t = 200_000)]
        max_states: usize,
    },
    /// Decide Thurston equivalence and print a certificate.
    Equiv {
        f: PathBuf,
        g: PathBuf,
        #[arg(long)]
        oracle: Option<String>,
        /// Obstruction multicurve files, for `f` then `g`.
        #[arg(long)]
        obstruction: Vec<PathBuf>,
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long)]
        modulus: Option<u64>,
        #[arg(long)]
        hurwitz_states: Option<usize>,
    },
    /// Generators of the self-equivalences compatible with the obstruction.
    Selfeq {
        f: PathBuf,
        #[arg(long)]
        oracle: Option<String>,
        #[arg(long)]
        obstruction: Option<PathBuf>,
        #[arg(long)]
        radius: Option<usize>,
    },
}

enum Failure {
    Usage(String),
    Internal(String),
}

type Outcome = Result<(String, u8), Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<CoverPresentation, Failure> {
    let (f, _) = parse_unvalidated(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    f.validated().map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn multicurve_arg(s: &PuncturedSphere, spec: &str) -> Result<Multicurve, Failure> {
    let text = match spec.strip_prefix('@') {
        Some(p) => read(Path::new(p))?,
        None => spec.to_string(),
    };
    parse_multicurve(s, &text).map_err(usage)
}

fn oracle_of(cmd: &Option<String>) -> Box<dyn GeometrizationOracle> {
    match cmd {
        Some(c) => Box::new(SubprocessOracle { command: c.clone() }),
        None => Box::new(NoOracle),
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn validate(file: &Path) -> Outcome {
    let (f, _) = parse_unvalidated(&read(file)?).map_err(|e| usage(format!("{}: {e}", file.display())))?;
    let v = f.validate();
    if v.is_empty() {
        return Ok(("valid\n".into(), 0));
    }
    Ok((v.iter().map(|x| format!("violation: {x}\n")).collect(), 1))
}

fn pullback(file: &Path, curve: &str) -> Outcome {
    let f = load(file)?;
    let c = parse_curve(f.base(), curve).map_err(usage)?;
    let comps = f.pullback_curve(&c).map_err(|e| Failure::Internal(e.to_string()))?;
    let mut out = format!("curve: {c}\n");
    for p in &comps {
        let std = f.base().standard_indices(&p.class).map_or(String::new(), |(i, j)| format!(" standard=({i},{j})"));
        writeln!(out, "component sheet={} degree={} kind={:?} class={}{std}", p.sheet + 1, p.degree, p.kind, p.class).unwrap();
    }
    writeln!(out, "total degree: {}", comps.iter().map(|p| p.degree).sum::<usize>()).unwrap();
    Ok((out, 0))
}

fn vector(v: &[num::BigRational]) -> String {
    format!("({})", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
}

fn matrix(file: &Path, spec: &str) -> Outcome {
    let f = load(file)?;
    let gamma = multicurve_arg(f.base(), spec)?;
    let m = thurston_matrix(&f, &gamma).map_err(usage)?;
    let cert = leading_eigenvalue_geq_1(&m);
    if !cert.verify(&m.entries) {
        return Err(Failure::Internal("spectral certificate failed exact re-check".into()));
    }
    let mut out = String::from("curves:\n");
    for (k, c) in gamma.curves().iter().enumerate() {
        writeln!(out, "  [{}] {c}", k + 1).unwrap();
    }
    writeln!(out, "matrix: {m}").unwrap();
    let thetas = |above: bool| {
        cert.blocks
            .iter()
            .filter_map(|b| match (&b.bound, above) {
                (BlockBound::Below { theta, .. }, false) | (BlockBound::Above { theta, .. }, true) => Some(theta.clone()),
                _ => None,
            })
            .max()
    };
    let headline = match cert.verdict {
        Spectral::Less => format!("theta={}", thetas(false).map_or("0".into(), |t| t.to_string())),
        Spectral::Equal => format!("v={}", vector(cert.witness.as_deref().unwrap_or(&[]))),
        Spectral::Greater => format!("theta={}", thetas(true).map_or("?".into(), |t| t.to_string())),
    };
    writeln!(out, "lambda: {}, {headline}", cert.verdict).unwrap();
    writeln!(out, "lambda approx: {:.12}", cert.lambda).unwrap();
    for b in &cert.blocks {
        let idx: Vec<String> = b.indices.iter().map(|i| (i + 1).to_string()).collect();
        let bound = match &b.bound {
            BlockBound::Below { u, theta } => format!("below u={} theta={theta}", vector(u)),
            BlockBound::Fixed { v } => format!("fixed v={}", vector(v)),
            BlockBound::Above { v, theta } => format!("above v={} theta={theta}", vector(v)),
        };
        writeln!(out, "block [{}]: {bound}", idx.join(",")).unwrap();
    }
    writeln!(out, "certificate: verified").unwrap();
    let levy = find_levy_cycles(&f, &gamma).map_err(usage)?;
    if levy.is_empty() {
        writeln!(out, "levy cycles: none").unwrap();
    }
    for c in levy {
        let idx: Vec<String> = c.curves.iter().map(|i| (i + 1).to_string()).collect();
        let tag = if c.degenerate { " degenerate" } else { "" };
        writeln!(out, "levy cycle: [{}]{tag}", idx.join(" -> ")).unwrap();
    }
    Ok((out, 0))
}

fn ratio(s: &str) -> Result<Ratio<u64>, Failure> {
    s.parse::<Ratio<u64>>().map_err(|_| usage(format!("bad ratio `{s}`")))
}

/// A mapping class from a word; pure full-twist words keep their letters.
fn class_of(alpha: &Alphabet, text: &str) -> Result<MappingClass, Failure> {
    let w = alpha.parse(text).ok_or_else(|| usage(format!("bad word `{text}`")))?;
    if w.0.iter().all(|(k, _)| *k == TwistKind::Full) {
        let letters: Vec<i32> = w.0.iter().map(|(_, g)| *g).collect();
        return alpha.full.evaluate(&letters).map_err(usage);
    }
    alpha.evaluate(&w).map_err(usage)
}

fn describe(gens: &GeneratorSet, m: &MappingClass) -> String {
    match m.word() {
        Some(w) => gens.format_word(w),
        None => format!("{:?}", m.auto().images()),
    }
}

fn centralizer(n: usize, word: &str, m0: &str, budget: usize) -> Outcome {
    let s = PuncturedSphere::new(n).map_err(usage)?;
    let alpha = Alphabet::new(&s).map_err(usage)?;
    let phi = class_of(&alpha, word)?;
    let r = centralizer_search(&phi, &alpha.full, &ratio(m0)?, budget).map_err(|e| Failure::Internal(e.to_string()))?;
    let mut out = format!("target: {word}\ntarget length: {}\nsearch radius: {}\n", r.target_length, r.search_radius);
    writeln!(out, "completeness: {:?}", r.completeness).unwrap();
    writeln!(out, "undecided kept: {}", r.kept_undecided).unwrap();
    for g in &r.generators {
        writeln!(out, "generator: {}  witness: {}", describe(&alpha.full, &g.class), g.witness).unwrap();
    }
    Ok((out, 0))
}

fn conjugate(n: usize, words: &[String], k: &str, budget: usize) -> Outcome {
    let [w1, w2] = words else { return Err(usage("expected exactly two --word arguments")) };
    let s = PuncturedSphere::new(n).map_err(usage)?;
    let alpha = Alphabet::new(&s).map_err(usage)?;
    let (a, b) = (class_of(&alpha, w1)?, class_of(&alpha, w2)?);
    match conjugator_search(&a, &b, &alpha.full, &ratio(k)?, budget).map_err(|e| Failure::Internal(e.to_string()))? {
        ConjugatorOutcome::Found { eta, witness } => {
            Ok((format!("conjugate: yes\nconjugator: {}\nwitness: {witness}\n", describe(&alpha.full, &eta)), 0))
        }
        ConjugatorOutcome::NotConjugate { reason } => Ok((format!("conjugate: no\nreason: {reason}\n"), 1)),
        ConjugatorOutcome::NotConjugateWithin { radius, certified } => Ok((
            format!("conjugate: no conjugator within radius {radius}\ncertified: {certified}\n"),
            if certified { 1 } else { 2 },
        )),
        ConjugatorOutcome::Inconclusive { radius, undecided } => {
            Ok((format!("conjugate: inconclusive\nradius: {radius}\nundecided: {undecided}\n"), 2))
        }
    }
}

fn hurwitz(f: &Path, g: &Path, h0: &Option<String>, max_states: usize, cache: &OrbitCache) -> Outcome {
    let (f, g) = (load(f)?, load(g)?);
    let (tf, tg) = (HurwitzTuple(f.monodromy().to_vec()), HurwitzTuple(g.monodromy().to_vec()));
    if tf.len() != tg.len() || tf.degree() != tg.degree() {
        return Ok(("hurwitz: NOT EQUIVALENT\ngate: shape (degree or branch count)\n".into(), 1));
    }
    let Some(h0) = h0 else {
        let (orbit, hit) = cache.orbit(&tf, max_states).map_err(|n| Failure::Internal(format!("orbit exceeds {n} states")))?;
        let found = orbit.binary_search(&tg.canonical().0).is_ok();
        eprintln!("orbit cache: {}", if hit { "hit" } else { "miss" });
        let mut out = format!("orbit size: {}\n", orbit.len());
        if found {
            out.insert_str(0, "hurwitz: EQUIVALENT\n");
            return Ok((out, 0));
        }
        out.insert_str(0, "hurwitz: NOT EQUIVALENT\ngate: Hurwitz (target outside the orbit)\n");
        return Ok((out, 1));
    };
    let sigma = Perm::parse_cycles(h0, f.punctures()).map_err(usage)?;
    let names: Vec<String> = f.base().labels().to_vec();
    match same_hurwitz_class(&tg, &tf, Some(&sigma), max_states) {
        HurwitzDecision::Equivalent(w) => {
            let moves: Vec<String> = w.moves.iter().map(|m| {
                if m.inverse { format!("s{}^-1", m.slot) } else { format!("s{}", m.slot) }
            }).collect();
            let moves = if moves.is_empty() { "1".into() } else { moves.join(" ") };
            Ok((format!("hurwitz: EQUIVALENT\nh0: {sigma}\npunctures: {}\nmoves: {moves}\nconjugator: {}\n", names.join(" "), w.conjugator), 0))
        }
        HurwitzDecision::NotEquivalent => {
            Ok((format!("hurwitz: NOT EQUIVALENT\nh0: {sigma}\ngate: Hurwitz (no braid with this puncture map relates the tuples)\n"), 1))
        }
        HurwitzDecision::Overflow { explored } => Ok((format!("hurwitz: INCONCLUSIVE\nexplored: {explored}\n"), 2)),
    }
}

fn run(cli: Cli) -> Outcome {
    let cache = OrbitCache::new(cli.cache.as_deref());
    match cli.cmd {
        Cmd::Validate { file } => validate(&file),
        Cmd::Pullback { file, curve } => pullback(&file, &curve),
        Cmd::Matrix { file, multicurve } => matrix(&file, &multicurve),
        Cmd::Centralizer { punctures, word, m0, budget } => centralizer(punctures, &word, &m0, budget),
        Cmd::Conjugate { punctures, word, k, budget } => conjugate(punctures, &word, &k, budget),
        Cmd::Hurwitz { f, g, h0, max_states } => hurwitz(&f, &g, &h0, max_states, &cache),
        Cmd::Equiv { f, g, oracle, obstruction, verify, radius, modulus, hurwitz_states } => {
            let (pf, pg) = (load(&f)?, load(&g)?);
            let mut config = PipelineConfig { modulus, ..PipelineConfig::default() };
            if let Some(r) = radius {
                config.search_radius = r;
            }
            if let Some(h) = hurwitz_states {
                config.hurwitz_states = h;
            }
            let obs = match obstruction.as_slice() {
                [] => None,
                [a, b] => Some((multicurve_arg(pf.base(), &format!("@{}", a.display()))?, multicurve_arg(pg.base(), &format!("@{}", b.display()))?)),
                _ => return Err(usage("--obstruction takes one file for each map")),
            };
            let oracle = oracle_of(&oracle);
            let cert = check_equivalence(&pf, &pg, oracle.as_ref(), obs.as_ref().map(|(a, b)| (a, b)), &config);
            if verify {
                verify_certificate(&pf, &pg, &cert).map_err(|e| Failure::Internal(format!("certificate audit failed: {e}")))?;
            }
            let code = match cert.verdict {
                Verdict::Equivalent => 0,
                Verdict::NotEquivalent => 1,
                Verdict::Inconclusive => 2,
            };
            Ok((json(&cert), code))
        }
        Cmd::Selfeq { f, oracle, obstruction, radius } => {
            let pf = load(&f)?;
            let mut config = PipelineConfig::default();
            if let Some(r) = radius {
                config.centralizer_radius = r;
            }
            let (gamma, canonical) = match obstruction {
                Some(p) => (multicurve_arg(pf.base(), &format!("@{}", p.display()))?, true),
                None => (fallback_obstruction(&pf, config.saturation_budget), false),
            };
            let oracle = oracle_of(&oracle);
            Ok((json(&compute_thick_centralizer(&pf, &gamma, canonical, oracle.as_ref(), &config)), 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global().is_err() {
            eprintln!("thread pool already initialised");
        }
    }
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok((out, code))) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Ok(Err(Failure::Usage(m))) => {
            eprintln!("error: {m}");
            ExitCode::from(64)
        }
        Ok(Err(Failure::Internal(m))) => {
            eprintln!("internal error: {m}");
            ExitCode::from(70)
        }
        Err(_) => ExitCode::from(70),
    }
}
