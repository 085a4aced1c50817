use super::CoverPresentation;
use crate::freegroup::{CosetGraph, FoldedSubgroup, FreeAutomorphism, ReducedWord};
use crate::mapping_class::{McError, MappingClass};
use crate::perm::Perm;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LiftError {
    #[error("covers have different degree or base")]
    ShapeMismatch,
    #[error("sheet {0} does not give a sheet correspondence")]
    NotLiftable(usize),
    #[error("restriction words do not generate the free group")]
    NotSurjective,
    #[error("lift is not a homomorphism on the sheet stabiliser")]
    Inconsistent,
    #[error(transparent)]
    MappingClass(#[from] McError),
}

/// Sheet correspondences `π` with `π(s·ρ_f(x)) = π(s)·ρ_g(h₀(x))`, ordered by `π(0)`.
///
/// Empty when `h₀` is not compatible with the two covers, including the
/// marked-point dynamics `h₀∘f = g∘h₀` and local degrees.
pub fn lifts_through(f: &CoverPresentation, g: &CoverPresentation, h0: &MappingClass) -> Result<Vec<Perm>, LiftError> {
    if f.degree() != g.degree() || f.punctures() != g.punctures() || h0.surface().punctures() != f.punctures() {
        return Err(LiftError::ShapeMismatch);
    }
    let sigma = h0.puncture_perm();
    for p in 0..f.punctures() {
        let q = sigma.apply(p);
        if sigma.apply(f.point_map()[p]) != g.point_map()[q] || f.local_degrees()[p] != g.local_degrees()[q] {
            return Ok(Vec::new());
        }
    }
    let r = f.base().rank();
    let target: Vec<Perm> = (1..=r).map(|k| g.monodromy_of(&h0.act_on_word(&ReducedWord::generator(r, k)))).collect();
    let d = f.degree();
    let mut out = Vec::new();
    for t in 0..d {
        if let Some(pi) = correspondence(&f.monodromy()[..r], &target, t) {
            out.push(pi);
        }
    }
    Ok(out)
}

fn correspondence(src: &[Perm], dst: &[Perm], t: usize) -> Option<Perm> {
    let d = src[0].degree();
    let mut map = vec![usize::MAX; d];
    map[0] = t;
    let mut stack = vec![0usize];
    while let Some(s) = stack.pop() {
        for (a, b) in src.iter().zip(dst) {
            for (u, v) in [(a.apply(s), b.apply(map[s])), (a.inverse().apply(s), b.inverse().apply(map[s]))] {
                if map[u] == usize::MAX {
                    map[u] = v;
                    stack.push(u);
                } else if map[u] != v {
                    return None;
                }
            }
        }
    }
    if map.contains(&usize::MAX) {
        return None;
    }
    Perm::from_images(map.into_iter().map(|v| v as u32).collect()).ok()
}

/// Images of the generators under the lift of `h` from `f` at sheet `sf` to `g` at sheet `sg`.
fn lift_images(
    f: &CoverPresentation,
    sf: usize,
    g: &CoverPresentation,
    sg: usize,
    h: &MappingClass,
) -> Result<Vec<ReducedWord>, LiftError> {
    let r = f.base().rank();
    let u = CosetGraph::from_action(f.monodromy()[..r].to_vec(), sf).schreier_generators();
    let y: Vec<ReducedWord> = u.iter().map(|w| f.restrict(w, sf).0).collect();
    let hu: Vec<ReducedWord> = u
        .iter()
        .map(|w| {
            let (img, end) = g.restrict(&h.act_on_word(w), sg);
            if end == sg {
                Ok(img)
            } else {
                Err(LiftError::NotLiftable(sg))
            }
        })
        .collect::<Result<_, _>>()?;
    let folded = FoldedSubgroup::new(&y, r).map_err(|_| LiftError::NotSurjective)?;
    let mut images = Vec::with_capacity(r);
    for j in 1..=r {
        let wj = folded.express(&ReducedWord::generator(r, j)).ok_or(LiftError::NotSurjective)?;
        images.push(wj.substitute(&hu));
    }
    for (yk, hk) in y.iter().zip(&hu) {
        if &yk.substitute(&images) != hk {
            return Err(LiftError::Inconsistent);
        }
    }
    Ok(images)
}

/// The lift `h̃` with `g∘h̃ = h₀∘f` sending sheet 0 of `f` to sheet `π(0)` of `g`.
pub fn lift_mapping_class(
    f: &CoverPresentation,
    g: &CoverPresentation,
    h0: &MappingClass,
    pi: &Perm,
) -> Result<MappingClass, LiftError> {
    let t = pi.apply(0);
    let images = lift_images(f, 0, g, t, h0)?;
    let inverse = lift_images(g, t, f, 0, &h0.inverse())?;
    let auto = FreeAutomorphism::new(images, inverse).map_err(|_| LiftError::Inconsistent)?;
    Ok(MappingClass::from_auto(h0.surface(), auto, None)?)
}
