use serde::{Deserialize, Serialize};

use super::conj::rotation_offset;
use super::word::ReducedWord;
use super::FreeGroupError;

/// Three-valued answer of a bounded search. `Undecided` is never coerced to `No`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision<W> {
    Yes(W),
    No,
    Undecided { budget: usize },
}

impl<W> Decision<W> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Decision::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Decision::No)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Decision::Yes(w) => Some(w),
            _ => None,
        }
    }

    pub fn map<V>(self, f: impl FnOnce(W) -> V) -> Decision<V> {
        match self {
            Decision::Yes(w) => Decision::Yes(f(w)),
            Decision::No => Decision::No,
            Decision::Undecided { budget } => Decision::Undecided { budget },
        }
    }
}

/// An automorphism of a free group, stored with the images of its inverse.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FreeAutomorphism {
    rank: usize,
    images: Vec<ReducedWord>,
    inverse_images: Vec<ReducedWord>,
}

impl FreeAutomorphism {
    /// Checks that both composites fix every generator.
    pub fn new(
        images: Vec<ReducedWord>,
        inverse_images: Vec<ReducedWord>,
    ) -> Result<Self, FreeGroupError> {
        let rank = images.len();
        if inverse_images.len() != rank
            || images.iter().chain(&inverse_images).any(|w| w.rank() != rank)
        {
            return Err(FreeGroupError::RankMismatch { left: rank, right: inverse_images.len() });
        }
        let a = FreeAutomorphism { rank, images, inverse_images };
        for i in 1..=rank {
            let x = ReducedWord::generator(rank, i);
            if a.apply(&a.apply_inverse(&x)) != x || a.apply_inverse(&a.apply(&x)) != x {
                return Err(FreeGroupError::NotAnAutomorphism);
            }
        }
        Ok(a)
    }

    pub fn identity(rank: usize) -> Self {
        let gens: Vec<_> = (1..=rank).map(|i| ReducedWord::generator(rank, i)).collect();
        FreeAutomorphism { rank, images: gens.clone(), inverse_images: gens }
    }

    /// `x ↦ g x g⁻¹`.
    pub fn inner(g: &ReducedWord) -> Self {
        let rank = g.rank();
        let gi = g.inverse();
        let images = (1..=rank).map(|i| ReducedWord::generator(rank, i).conjugated_by(g)).collect();
        let inverse_images =
            (1..=rank).map(|i| ReducedWord::generator(rank, i).conjugated_by(&gi)).collect();
        FreeAutomorphism { rank, images, inverse_images }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[ReducedWord] {
        &self.images
    }

    pub fn inverse_images(&self) -> &[ReducedWord] {
        &self.inverse_images
    }

    pub fn apply(&self, w: &ReducedWord) -> ReducedWord {
        w.substitute(&self.images)
    }

    pub fn apply_inverse(&self, w: &ReducedWord) -> ReducedWord {
        w.substitute(&self.inverse_images)
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &FreeAutomorphism) -> Result<FreeAutomorphism, FreeGroupError> {
        if self.rank != other.rank {
            return Err(FreeGroupError::RankMismatch { left: self.rank, right: other.rank });
        }
        Ok(FreeAutomorphism {
            rank: self.rank,
            images: other.images.iter().map(|w| self.apply(w)).collect(),
            inverse_images: self.inverse_images.iter().map(|w| other.apply_inverse(w)).collect(),
        })
    }

    pub fn invert(&self) -> FreeAutomorphism {
        FreeAutomorphism {
            rank: self.rank,
            images: self.inverse_images.clone(),
            inverse_images: self.images.clone(),
        }
    }

    pub fn total_length(&self) -> usize {
        self.images.iter().map(ReducedWord::len).sum()
    }

    pub fn default_budget(a: &FreeAutomorphism, b: &FreeAutomorphism) -> usize {
        2 * (a.total_length() + b.total_length())
    }
}

impl std::fmt::Debug for FreeAutomorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, w) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "x{} ↦ {}", i + 1, w)?;
        }
        write!(f, "}}")
    }
}

/// Some `g` with `g · u · g⁻¹ = v`, if one exists.
pub fn conjugator(u: &ReducedWord, v: &ReducedWord) -> Option<ReducedWord> {
    let (p, uc) = u.cyclic_decomposition();
    let (q, vc) = v.cyclic_decomposition();
    // uc.rotate(k) = s⁻¹ uc s with s = uc[..k]
    let k = rotation_offset(&uc, &vc)?;
    let s = uc.prefix(k);
    Some(q.mul(&s.inverse()).mul(&p.inverse()))
}

/// Decides whether one `g` satisfies `g · us[k] · g⁻¹ = vs[k]` for every `k`.
///
/// Solutions of the first nontrivial equation form the coset `g₀·⟨r⟩` with `r`
/// the primitive root of `us[k]`; the search walks the exponent of `r` in both
/// directions until the conjugates of a non-commuting element grow without bound.
/// `budget` caps the number of exponent steps per direction.
pub fn simultaneous_conjugator(
    us: &[ReducedWord],
    vs: &[ReducedWord],
    budget: usize,
) -> Result<Decision<ReducedWord>, FreeGroupError> {
    if us.len() != vs.len() {
        return Err(FreeGroupError::RankMismatch { left: us.len(), right: vs.len() });
    }
    let rank = match us.first().or(vs.first()) {
        Some(w) => w.rank(),
        None => return Ok(Decision::Yes(ReducedWord::identity(0))),
    };
    for (u, v) in us.iter().zip(vs) {
        if u.is_identity() != v.is_identity() || u.len() % 2 != v.len() % 2 {
            return Ok(Decision::No);
        }
    }
    let Some(anchor) = us.iter().position(|u| !u.is_identity()) else {
        return Ok(Decision::Yes(ReducedWord::identity(rank)));
    };
    let Some(g0) = conjugator(&us[anchor], &vs[anchor]) else {
        return Ok(Decision::No);
    };
    let (p, c, _) = us[anchor].primitive_root();
    let pi = p.inverse();
    let g0i = g0.inverse();
    // Reduced problem: find t with c^t · ws[j] · c^-t = es[j].
    let ws: Vec<ReducedWord> = us.iter().map(|u| pi.mul(u).mul(&p)).collect();
    let es: Vec<ReducedWord> =
        vs.iter().map(|v| pi.mul(&g0i).mul(v).mul(&g0).mul(&p)).collect();
    let finish = |t: i64| g0.mul(&p).mul(&c.pow(t)).mul(&pi);
    let check = |t: i64| {
        let ct = c.pow(t);
        let cti = ct.inverse();
        ws.iter().zip(&es).all(|(w, e)| &ct.mul(w).mul(&cti) == e)
    };

    let Some(probe) = ws.iter().position(|w| !w.commutes_with(&c)) else {
        return Ok(if ws == es { Decision::Yes(finish(0)) } else { Decision::No });
    };
    let w = &ws[probe];
    let target = &es[probe];
    if w == target {
        // t ↦ c^t w c^-t is injective, so t = 0 is the only candidate.
        return Ok(if check(0) { Decision::Yes(finish(0)) } else { Decision::No });
    }
    let c_first = c.first_letter().expect("root of nontrivial word");
    let c_last = c.last_letter().expect("root of nontrivial word");
    let ci = c.inverse();
    let mut exhausted = true;
    for dir in [1i64, -1] {
        let (step, stepi, head, tail) = if dir > 0 {
            (&c, &ci, c_first, c_first.inverse())
        } else {
            (&ci, &c, c_last.inverse(), c_last)
        };
        let mut z = w.clone();
        let mut found = false;
        for t in 1..=budget as i64 {
            z = step.mul(&z).mul(stepi);
            if &z == target {
                return Ok(if check(dir * t) { Decision::Yes(finish(dir * t)) } else { Decision::No });
            }
            let grows = z.first_letter() == Some(head) && z.last_letter() == Some(tail);
            if grows && z.len() > target.len() {
                found = true;
                break;
            }
        }
        if !found {
            exhausted = false;
        }
    }
    Ok(if exhausted { Decision::No } else { Decision::Undecided { budget } })
}

/// Outer equality: some `g` with `a(x) = g · b(x) · g⁻¹` for every generator `x`.
pub fn outer_equal(
    a: &FreeAutomorphism,
    b: &FreeAutomorphism,
    budget: Option<usize>,
) -> Result<Decision<ReducedWord>, FreeGroupError> {
    if a.rank != b.rank {
        return Err(FreeGroupError::RankMismatch { left: a.rank, right: b.rank });
    }
    let budget = budget.unwrap_or_else(|| FreeAutomorphism::default_budget(a, b));
    simultaneous_conjugator(&b.images, &a.images, budget)
}
