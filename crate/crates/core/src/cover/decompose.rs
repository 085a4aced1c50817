use serde::{Deserialize, Serialize};

use super::{CoverError, CoverPresentation};
use crate::freegroup::ReducedWord;
use crate::perm::{orbit, Perm};
use crate::sphere::Multicurve;

/// A complementary region of a multicurve of standard curves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    /// Curve bounding it from outside (`None` for the outer region).
    pub outer_curve: Option<usize>,
    /// Curves bounding it from inside.
    pub inner_curves: Vec<usize>,
    /// Marked points lying in it (1-based).
    pub punctures: Vec<usize>,
    /// Punctures after capping each boundary curve with a marked disk.
    pub capped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentCycle {
    pub members: Vec<usize>,
    pub return_degree: usize,
    pub homeomorphism: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionData {
    pub components: Vec<Component>,
    /// Image component and degree, where the marked points determine it.
    pub map: Vec<Option<(usize, usize)>>,
    pub cycles: Vec<ComponentCycle>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecomposeError {
    #[error("curve {0} is not a standard curve")]
    NotStandard(String),
    #[error("standard curves {0} and {1} intersect")]
    Crossing(usize, usize),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

/// Splits the sphere along `gamma` (standard curves only) and reads off the
/// induced map on complementary components.
pub fn decompose(f: &CoverPresentation, gamma: &Multicurve) -> Result<DecompositionData, DecomposeError> {
    let n = f.punctures();
    let base = f.base();
    let mut iv = Vec::with_capacity(gamma.len());
    for c in gamma.curves() {
        if c.punctures() != n {
            return Err(CoverError::SurfaceMismatch.into());
        }
        iv.push(c.standard().ok_or_else(|| DecomposeError::NotStandard(c.to_string()))?);
    }
    for a in 0..iv.len() {
        for b in a + 1..iv.len() {
            let ((i, j), (k, l)) = (iv[a], iv[b]);
            let disjoint = j < k || l < i;
            let nested = (i <= k && l <= j) || (k <= i && j <= l);
            if !disjoint && !nested {
                return Err(DecomposeError::Crossing(a, b));
            }
        }
    }
    let contains = |outer: usize, inner: (usize, usize)| iv[outer].0 <= inner.0 && inner.1 <= iv[outer].1;
    let span = |k: usize| iv[k].1 - iv[k].0;
    let smallest_containing = |target: (usize, usize), skip: Option<usize>| {
        (0..iv.len())
            .filter(|&k| Some(k) != skip && contains(k, target))
            .min_by_key(|&k| span(k))
    };
    // region 0 is outer, region k+1 lies just inside curve k
    let parent: Vec<usize> = (0..iv.len()).map(|k| smallest_containing(iv[k], Some(k)).map_or(0, |p| p + 1)).collect();
    let region_of = |p: usize| if p == n { 0 } else { smallest_containing((p, p), None).map_or(0, |k| k + 1) };
    let mut components: Vec<Component> = (0..=iv.len())
        .map(|r| Component { outer_curve: r.checked_sub(1), inner_curves: Vec::new(), punctures: Vec::new(), capped: 0 })
        .collect();
    for (k, &p) in parent.iter().enumerate() {
        components[p].inner_curves.push(k);
    }
    for p in 1..=n {
        components[region_of(p)].punctures.push(p);
    }
    for c in &mut components {
        c.capped = c.punctures.len() + c.inner_curves.len() + usize::from(c.outer_curve.is_some());
    }
    debug_assert_eq!(components.iter().map(|c| c.capped).sum::<usize>(), n + 2 * iv.len());

    let r = base.rank();
    let subgroup = |c: &Component| -> Vec<ReducedWord> {
        let mut gens: Vec<ReducedWord> = c.punctures.iter().map(|&p| base.loop_word(p).expect("in range")).collect();
        gens.extend(c.inner_curves.iter().map(|&k| base.interval_word(iv[k].0, iv[k].1)));
        gens.retain(|w| !w.is_identity() && w.rank() == r);
        gens
    };
    let orbits: Vec<Vec<usize>> = components
        .iter()
        .map(|c| {
            let perms: Vec<Perm> = subgroup(c).iter().map(|w| f.monodromy_of(w)).collect();
            let refs: Vec<&Perm> = perms.iter().collect();
            let mut label = vec![usize::MAX; f.degree()];
            for s in 0..f.degree() {
                if label[s] == usize::MAX {
                    for t in orbit(&refs, f.degree(), s) {
                        label[t] = s;
                    }
                }
            }
            label
        })
        .collect();
    let fibers = f.fiber_points();
    let mut map = Vec::with_capacity(components.len());
    for c in &components {
        let mut found: Option<(usize, usize, usize)> = None;
        let mut consistent = !c.punctures.is_empty();
        for &p in &c.punctures {
            let q = f.point_map()[p - 1];
            let target = region_of(q + 1);
            let Some(&(_, sheet, _, _)) = fibers.iter().find(|(qq, _, _, pt)| *qq == q && *pt == Some(p - 1)) else {
                consistent = false;
                break;
            };
            let label = orbits[target][sheet];
            let degree = orbits[target].iter().filter(|&&l| l == label).count();
            match found {
                None => found = Some((target, label, degree)),
                Some(prev) if prev == (target, label, degree) => {}
                Some(_) => consistent = false,
            }
        }
        map.push(if consistent { found.map(|(t, _, d)| (t, d)) } else { None });
    }
    let cycles = periodic_cycles(&map);
    Ok(DecompositionData { components, map, cycles })
}

fn periodic_cycles(map: &[Option<(usize, usize)>]) -> Vec<ComponentCycle> {
    let mut seen = vec![false; map.len()];
    let mut out = Vec::new();
    for start in 0..map.len() {
        let mut path = Vec::new();
        let mut v = start;
        loop {
            if seen[v] {
                break;
            }
            if let Some(k) = path.iter().position(|&u| u == v) {
                let members: Vec<usize> = path[k..].to_vec();
                let return_degree = members.iter().map(|&u| map[u].expect("on cycle").1).product();
                out.push(ComponentCycle { members, return_degree, homeomorphism: return_degree == 1 });
                break;
            }
            path.push(v);
            match map[v] {
                Some((t, _)) => v = t,
                None => break,
            }
        }
        for u in path {
            seen[u] = true;
        }
    }
    out
}
