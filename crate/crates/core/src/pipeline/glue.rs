use serde::{Deserialize, Serialize};

use crate::cover::{lift_mapping_class, lifts_through, CoverPresentation};
use crate::freegroup::{ConjClass, ReducedWord};
use crate::lattice::solve_integer;
use crate::mapping_class::{mc_equal, Ball, GeneratorSet, McError, MappingClass, TwistKind};
use crate::sphere::{CurveClass, PuncturedSphere};

/// A word mixing half-twists `s_i` and full twists about standard curves.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct MixedWord(pub Vec<(TwistKind, i32)>);

impl MixedWord {
    pub fn half(word: &[i32]) -> Self {
        MixedWord(word.iter().map(|&g| (TwistKind::Half, g)).collect())
    }

    pub fn full(word: &[i32]) -> Self {
        MixedWord(word.iter().map(|&g| (TwistKind::Full, g)).collect())
    }

    pub fn then(&self, other: &MixedWord) -> MixedWord {
        MixedWord(self.0.iter().chain(&other.0).copied().collect())
    }

    pub fn inverse(&self) -> MixedWord {
        MixedWord(self.0.iter().rev().map(|&(k, g)| (k, -g)).collect())
    }

    pub fn pow(&self, e: i64) -> MixedWord {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        MixedWord((0..e.unsigned_abs()).flat_map(|_| base.0.iter().copied()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Both generating sets of one surface.
#[derive(Clone, Debug)]
pub struct Alphabet {
    pub full: GeneratorSet,
    pub half: GeneratorSet,
}

impl Alphabet {
    pub fn new(s: &PuncturedSphere) -> Result<Self, McError> {
        Ok(Alphabet { full: GeneratorSet::new(s, TwistKind::Full)?, half: GeneratorSet::new(s, TwistKind::Half)? })
    }

    pub fn surface(&self) -> &PuncturedSphere {
        self.half.surface()
    }

    pub fn evaluate(&self, w: &MixedWord) -> Result<MappingClass, McError> {
        let mut acc = MappingClass::identity(self.surface());
        for &(kind, g) in &w.0 {
            let set = match kind {
                TwistKind::Full => &self.full,
                TwistKind::Half => &self.half,
            };
            acc = acc.compose(&set.letter(g)?)?;
        }
        Ok(acc.with_word(None))
    }

    pub fn format(&self, w: &MixedWord) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.0.iter()
            .map(|&(kind, g)| {
                let set = match kind {
                    TwistKind::Full => &self.full,
                    TwistKind::Half => &self.half,
                };
                set.format_word(&[g])
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses space-separated generator names, each optionally followed by `^-1`.
    pub fn parse(&self, text: &str) -> Option<MixedWord> {
        let mut out = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => (n, e.parse::<i32>().ok().filter(|e| e.unsigned_abs() <= 4096)?),
                None => (tok, 1),
            };
            let letter = if let Some(k) = self.full.index_of(name) {
                (TwistKind::Full, k as i32)
            } else if let Some(k) = self.half.index_of(name) {
                (TwistKind::Half, k as i32)
            } else {
                return None;
            };
            let step = (letter.0, exp.signum() * letter.1);
            out.extend(std::iter::repeat(step).take(exp.unsigned_abs() as usize));
        }
        Some(MixedWord(out))
    }
}

/// Twist about a curve, written as `chart ∘ T_c ∘ chart⁻¹` with `c` standard.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveTwist {
    pub curve: CurveClass,
    pub chart: MixedWord,
    pub letter: i32,
}

impl CurveTwist {
    pub fn word(&self, e: i64) -> MixedWord {
        self.chart.then(&MixedWord::full(&[self.letter]).pow(e)).then(&self.chart.inverse())
    }
}

/// Finds a half-twist chart carrying a standard curve to `c`, within `radius`.
pub fn curve_twist(alpha: &Alphabet, c: &CurveClass, radius: usize) -> Option<CurveTwist> {
    let filling = alpha.surface().filling_system().ok()?;
    let letter_of = |d: &CurveClass| filling.iter().position(|x| x == d).map(|k| k as i32 + 1);
    if c.standard().is_some() {
        return Some(CurveTwist { curve: c.clone(), chart: MixedWord::default(), letter: letter_of(c)? });
    }
    let mut ball = Ball::new(&alpha.half);
    loop {
        for m in ball.entries() {
            for d in &filling {
                if let Ok(img) = m.act_on_curve(d) {
                    if img == *c {
                        let chart = MixedWord::half(m.word().expect("ball words"));
                        return Some(CurveTwist { curve: c.clone(), chart, letter: letter_of(d)? });
                    }
                }
            }
        }
        if ball.radius() >= radius || !ball.grow(200_000) {
            return None;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DefectError {
    #[error("no probe curve crosses curve {0} alone")]
    NoProbe(usize),
    #[error("probe image is not a twist of the probe along curve {0}")]
    NotTwisted(usize),
    #[error("difference is not a multitwist along the multicurve")]
    NotMultitwist,
    #[error(transparent)]
    MappingClass(#[from] McError),
}

/// One probe per curve: it crosses that curve and is disjoint from the others.
pub fn choose_probes(alpha: &Alphabet, twists: &[CurveTwist], radius: usize) -> Result<Vec<ReducedWord>, DefectError> {
    let maps: Vec<MappingClass> = twists.iter().map(|t| alpha.evaluate(&t.word(1))).collect::<Result<_, _>>()?;
    let filling = alpha.surface().filling_system().map_err(McError::from)?;
    let mut pool: Vec<ReducedWord> = Vec::new();
    let mut ball = Ball::new(&alpha.half);
    let mut out = vec![None; twists.len()];
    loop {
        for m in &ball.entries()[pool.len() / filling.len().max(1)..] {
            for d in &filling {
                pool.push(m.act_on_word(d.word()));
            }
        }
        for (i, slot) in out.iter_mut().enumerate() {
            if slot.is_some() {
                continue;
            }
            *slot = pool
                .iter()
                .find(|b| {
                    let cls = ConjClass::of(b);
                    maps.iter().enumerate().all(|(j, t)| (ConjClass::of(&t.act_on_word(b)) == cls) == (i != j))
                })
                .cloned();
        }
        if out.iter().all(Option::is_some) {
            return Ok(out.into_iter().map(|b| b.expect("filled")).collect());
        }
        if ball.radius() >= radius || !ball.grow(200_000) {
            let missing = out.iter().position(Option::is_none).expect("some probe missing");
            return Err(DefectError::NoProbe(missing));
        }
    }
}

/// Exponents `k` with `x = Π T_γ^{k_γ}`, read from probe images and then verified.
pub fn twist_defect(
    alpha: &Alphabet,
    x: &MappingClass,
    twists: &[CurveTwist],
    probes: &[ReducedWord],
) -> Result<Vec<i64>, DefectError> {
    let mut k = Vec::with_capacity(twists.len());
    for (i, (t, beta)) in twists.iter().zip(probes).enumerate() {
        let target = ConjClass::of(&x.act_on_word(beta));
        let fwd = alpha.evaluate(&t.word(1))?;
        let back = fwd.inverse();
        let bound = 8 + 4 * target.word().len() as i64;
        let (mut up, mut down) = (beta.clone(), beta.clone());
        let mut found = None;
        for e in 0..=bound {
            if ConjClass::of(&up) == target {
                found = Some(e);
                break;
            }
            if ConjClass::of(&down) == target {
                found = Some(-e);
                break;
            }
            up = fwd.act_on_word(&up);
            down = back.act_on_word(&down);
        }
        k.push(found.ok_or(DefectError::NotTwisted(i))?);
    }
    let mut w = MixedWord::default();
    for (t, &e) in twists.iter().zip(&k) {
        w = w.then(&t.word(e));
    }
    let y = alpha.evaluate(&w)?;
    if mc_equal(x, &y, None)?.is_yes() {
        Ok(k)
    } else {
        Err(DefectError::NotMultitwist)
    }
}

/// Data shared by every gluing attempt for one pair of maps.
pub struct GlueContext<'a> {
    pub f: &'a CoverPresentation,
    pub g: &'a CoverPresentation,
    pub alpha: &'a Alphabet,
    /// Twists about the curves of the multicurve on the source side.
    pub twists: &'a [CurveTwist],
    pub probes: &'a [ReducedWord],
    /// Self-equivalence generators on the target side, composed on the left.
    pub psi: &'a [MixedWord],
    pub modulus: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GlueOutcome {
    Success(MixedWord),
    /// No residue `m₁ ∈ {0..N−1}^Γ` gives a lift differing by a multitwist.
    NoLift,
    /// Every admissible residue leaves the defect outside the image lattice.
    Unsolvable { residues: usize },
}

impl GlueContext<'_> {
    /// The defect of the first sheet correspondence whose lift differs from `h` by a multitwist.
    pub fn defect_of(&self, w: &MixedWord) -> Option<Vec<i64>> {
        let h = self.alpha.evaluate(w).ok()?;
        for pi in lifts_through(self.f, self.g, &h).ok()? {
            let Ok(lift) = lift_mapping_class(self.f, self.g, &h, &pi) else { continue };
            let x = h.inverse().compose(&lift).ok()?;
            if let Ok(d) = twist_defect(self.alpha, &x, self.twists, self.probes) {
                return Some(d);
            }
        }
        None
    }

    pub fn is_equivalence(&self, w: &MixedWord) -> bool {
        let Ok(h) = self.alpha.evaluate(w) else { return false };
        let Ok(pis) = lifts_through(self.f, self.g, &h) else { return false };
        pis.iter().any(|pi| {
            lift_mapping_class(self.f, self.g, &h, pi)
                .ok()
                .and_then(|lift| mc_equal(&lift, &h, None).ok())
                .is_some_and(|d| d.is_yes())
        })
    }

    fn twist_word(&self, k: &[i64]) -> MixedWord {
        self.twists.iter().zip(k).fold(MixedWord::default(), |acc, (t, &e)| acc.then(&t.word(e)))
    }

    /// Solves `defect(ψ ∘ h ∘ T^{m₁ + N t}) = 0` for each residue `m₁`.
    pub fn lattice_glue(&self, h: &MixedWord) -> GlueOutcome {
        let k = self.twists.len();
        let n = self.modulus.max(1) as i64;
        let mut residues = 0;
        let total = (n as u128).saturating_pow(k as u32).min(1 << 16) as u64;
        for code in 0..total {
            let mut m1 = vec![0i64; k];
            let mut c = code;
            for slot in m1.iter_mut().rev() {
                *slot = (c % n as u64) as i64;
                c /= n as u64;
            }
            let w1 = h.then(&self.twist_word(&m1));
            let Some(d0) = self.defect_of(&w1) else { continue };
            residues += 1;
            if d0.iter().all(|&x| x == 0) && self.is_equivalence(&w1) {
                return GlueOutcome::Success(w1);
            }
            let mut cols: Vec<(MixedWord, MixedWord)> = Vec::new();
            let mut images: Vec<Vec<i64>> = Vec::new();
            for i in 0..k {
                let mut e = vec![0i64; k];
                e[i] = n;
                let step = self.twist_word(&e);
                if let Some(d) = self.defect_of(&w1.then(&step)) {
                    images.push(d.iter().zip(&d0).map(|(a, b)| a - b).collect());
                    cols.push((MixedWord::default(), step));
                }
            }
            for p in self.psi {
                if let Some(d) = self.defect_of(&p.then(&w1)) {
                    images.push(d.iter().zip(&d0).map(|(a, b)| a - b).collect());
                    cols.push((p.clone(), MixedWord::default()));
                }
            }
            let a: Vec<Vec<i64>> = (0..k).map(|r| images.iter().map(|col| col[r]).collect()).collect();
            let rhs: Vec<i64> = d0.iter().map(|x| -x).collect();
            if let Ok(Some(y)) = solve_integer(&a, images.len(), &rhs) {
                let mut left = MixedWord::default();
                let mut right = MixedWord::default();
                for ((l, r), &e) in cols.iter().zip(&y) {
                    left = left.then(&l.pow(e));
                    right = right.then(&r.pow(e));
                }
                let candidate = left.then(&w1).then(&right);
                if self.is_equivalence(&candidate) {
                    return GlueOutcome::Success(candidate);
                }
            }
        }
        if residues == 0 {
            GlueOutcome::NoLift
        } else {
            GlueOutcome::Unsolvable { residues }
        }
    }
}
