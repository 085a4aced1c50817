use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use thurston_core::format::{emit_presentation, parse_multicurve};
use thurston_core::mapping_class::{GeneratorSet, TwistKind};
use thurston_core::perm::Perm;
use thurston_core::pipeline::{check_equivalence, verify_certificate, NoOracle, PipelineConfig, Verdict};

use super::{data, ensure, load};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thurston")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Result<Value, String> {
    serde_json::from_slice(&out.stdout).map_err(|e| format!("stdout is not JSON: {e}"))
}

pub fn pipeline() -> Result<String, String> {
    let half = data("half.tm");
    let out = run(&["equiv", path(&half), path(&half), "--verify"]);
    ensure(out.status.code() == Some(0), || format!("self equivalence exit {:?}", out.status.code()))?;
    let v = json(&out)?;
    ensure(v["witness"]["h"] == "1", || format!("self witness {}", v["witness"]))?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut scrambled = Vec::new();
    for name in ["half.tm", "levy_cycle.tm"] {
        let f = load(name);
        let gens = GeneratorSet::new(f.base(), TwistKind::Half).unwrap();
        let h = gens.evaluate(&[2, -3, 1]).unwrap();
        ensure(!h.is_pure(), || "scrambling class should move punctures".into())?;
        let g = f.conjugate_by(&h).relabel_sheets(&Perm::parse_cycles("(1 2)", f.degree()).unwrap());
        let p = dir.path().join(name);
        std::fs::write(&p, emit_presentation(&g, &[])).map_err(|e| e.to_string())?;
        let out = run(&["equiv", path(&data(name)), path(&p), "--verify"]);
        ensure(out.status.code() == Some(0), || format!("{name}: scrambled copy exit {:?}", out.status.code()))?;
        let v = json(&out)?;
        ensure(v["witness"]["h"] != "1", || format!("{name}: identity witness for a scrambled copy"))?;
        scrambled.push(format!("{name} via {}", v["witness"]["h"]));
    }

    let out = run(&[
        "equiv",
        path(&half),
        path(&data("levy.tm")),
        "--obstruction",
        path(&data("half.gamma")),
        "--obstruction",
        path(&data("levy.gamma")),
        "--verify",
    ]);
    ensure(out.status.code() == Some(1), || format!("half vs levy exit {:?}", out.status.code()))?;
    let v = json(&out)?;
    ensure(v["gate"] == "ThurstonMatrix", || format!("half vs levy refuted at {}", v["gate"]))?;

    let pairs = [
        ("half.tm", "half.tm"),
        ("half.tm", "levy.tm"),
        ("levy_cycle.tm", "two_cycle.tm"),
        ("levy_cycle.tm", "levy_cycle.tm"),
        ("cubic.tm", "simple_cubic.tm"),
        ("cube.tm", "cubic.tm"),
    ];
    let mut runs = 0;
    let mut inconclusive = 0;
    for (a, b) in pairs {
        let (f, g0) = (load(a), load(b));
        let gens = GeneratorSet::new(g0.base(), TwistKind::Half).unwrap();
        let g = g0.conjugate_by(&gens.evaluate(&[1, 2]).unwrap());
        for (radius, states) in [(0, 1), (0, 50), (1, 200_000)] {
            let config = PipelineConfig { search_radius: radius, hurwitz_states: states, glue_attempts: 1, ..PipelineConfig::default() };
            let cert = check_equivalence(&f, &g, &NoOracle, None, &config);
            ensure(cert.undecided.is_empty() || cert.verdict != Verdict::NotEquivalent, || {
                format!("{a} vs {b}: refuted with open branches {:?}", cert.undecided)
            })?;
            verify_certificate(&f, &g, &cert).map_err(|e| format!("{a} vs {b}: {e}"))?;
            inconclusive += usize::from(cert.verdict == Verdict::Inconclusive);
            runs += 1;
        }
    }
    let levy = load("levy.tm");
    let gamma = parse_multicurve(levy.base(), "standard 2 3").map_err(|e| e.to_string())?;
    let cert = check_equivalence(&levy, &levy, &NoOracle, Some((&gamma, &gamma)), &PipelineConfig::default());
    verify_certificate(&levy, &levy, &cert)?;
    Ok(format!("self, {}, matrix refutation; {runs} budgeted runs ({inconclusive} inconclusive) sound", scrambled.join(", ")))
}

pub fn determinism() -> Result<String, String> {
    let cache = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = |n: &str| data(n).to_str().unwrap().to_string();
    let commands: Vec<Vec<String>> = vec![
        vec!["validate".into(), d("cubic.tm")],
        vec!["pullback".into(), d("half.tm"), "--curve".into(), "standard 2 3".into()],
        vec!["matrix".into(), d("levy_cycle.tm"), "--multicurve".into(), format!("@{}", d("levy_cycle.gamma"))],
        vec!["centralizer".into(), "5".into(), "--word".into(), "T12 T34".into(), "--budget".into(), "2".into()],
        vec!["conjugate".into(), "4".into(), "--word".into(), "T12".into(), "--word".into(), "T23 T12 T23^-1".into()],
        vec!["hurwitz".into(), d("cube.tm"), d("cubic.tm")],
        vec!["hurwitz".into(), d("cubic.tm"), d("simple_cubic.tm")],
        vec!["equiv".into(), d("half.tm"), d("levy.tm")],
        vec!["equiv".into(), d("levy_cycle.tm"), d("levy_cycle.tm"), "--verify".into()],
        vec!["selfeq".into(), d("half.tm"), "--radius".into(), "1".into()],
    ];
    let mut bytes = 0;
    for cmd in &commands {
        let mut outputs = Vec::new();
        for threads in ["1", "4", "1", "4"] {
            let mut args = vec!["--threads", threads, "--cache", cache.path().to_str().unwrap()];
            args.extend(cmd.iter().map(String::as_str));
            let out = run(&args);
            ensure(matches!(out.status.code(), Some(0..=2)), || {
                format!("{}: exit {:?}: {}", cmd.join(" "), out.status.code(), String::from_utf8_lossy(&out.stderr))
            })?;
            outputs.push((out.status.code(), out.stdout));
        }
        ensure(outputs.windows(2).all(|w| w[0] == w[1]), || format!("{}: output differs between runs", cmd.join(" ")))?;
        bytes += outputs[0].1.len();
    }
    Ok(format!("{} commands × 4 runs byte-identical ({bytes} bytes each pass)", commands.len()))
}
