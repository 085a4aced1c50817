use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};

use crate::perm::Perm;

/// Monodromy tuple `(ρ(x₁), …, ρ(x_n))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HurwitzTuple(pub Vec<Perm>);

/// Half-twist move on slots `i, i+1` (1-based `i`), or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HurwitzMove {
    pub slot: usize,
    pub inverse: bool,
}

impl HurwitzMove {
    /// Signed half-twist generator index.
    pub fn signed(self) -> i32 {
        if self.inverse {
            -(self.slot as i32)
        } else {
            self.slot as i32
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HurwitzWitness {
    pub moves: Vec<HurwitzMove>,
    /// `c` with `target[k] = moved[k]` after renaming sheets by `c`.
    pub conjugator: Perm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum HurwitzDecision {
    Equivalent(HurwitzWitness),
    NotEquivalent,
    Overflow { explored: usize },
}

impl HurwitzTuple {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.first().map_or(0, Perm::degree)
    }

    /// Tuple precomposed with the half-twist: `(a, b) ↦ (a b a⁻¹, a)`; inverse `(a, b) ↦ (b, b⁻¹ a b)`.
    pub fn apply(&self, m: HurwitzMove) -> HurwitzTuple {
        let i = m.slot - 1;
        let mut out = self.0.clone();
        let (a, b) = (&self.0[i], &self.0[i + 1]);
        if m.inverse {
            out[i] = b.clone();
            out[i + 1] = b.inverse().then(a).then(b);
        } else {
            out[i] = a.then(b).then(&a.inverse());
            out[i + 1] = a.clone();
        }
        HurwitzTuple(out)
    }

    pub fn conjugate_by(&self, c: &Perm) -> HurwitzTuple {
        HurwitzTuple(self.0.iter().map(|p| p.conjugate_by(c)).collect())
    }

    /// Least relabelling over breadth-first numberings from each sheet, and the renaming used.
    pub fn canonical(&self) -> (HurwitzTuple, Perm) {
        let d = self.degree();
        let mut best: Option<(HurwitzTuple, Perm)> = None;
        for start in 0..d {
            let mut label = vec![usize::MAX; d];
            let mut order = vec![start];
            label[start] = 0;
            let mut head = 0;
            while head < order.len() {
                let v = order[head];
                head += 1;
                for p in &self.0 {
                    let t = p.apply(v);
                    if label[t] == usize::MAX {
                        label[t] = order.len();
                        order.push(t);
                    }
                }
            }
            if order.len() < d {
                for (v, l) in label.iter_mut().enumerate() {
                    if *l == usize::MAX {
                        *l = order.len();
                        order.push(v);
                    }
                }
            }
            let c = Perm::from_images(label.iter().map(|&l| l as u32).collect()).expect("bijection");
            let t = self.conjugate_by(&c);
            if best.as_ref().map_or(true, |(b, _)| t < *b) {
                best = Some((t, c));
            }
        }
        best.unwrap_or_else(|| (self.clone(), Perm::identity(d)))
    }
}

fn all_moves(n: usize) -> Vec<HurwitzMove> {
    (1..n).flat_map(|slot| [HurwitzMove { slot, inverse: false }, HurwitzMove { slot, inverse: true }]).collect()
}

/// Canonical forms reachable by moves; `Err(explored)` past `max_size`.
pub fn hurwitz_orbit(t: &HurwitzTuple, max_size: usize) -> Result<Vec<HurwitzTuple>, usize> {
    let start = t.canonical().0;
    let moves = all_moves(t.len());
    let mut seen = vec![start.clone()];
    let mut index: HashMap<HurwitzTuple, ()> = HashMap::from([(start.clone(), ())]);
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        for &m in &moves {
            let next = cur.apply(m).canonical().0;
            if !index.contains_key(&next) {
                if seen.len() >= max_size {
                    return Err(seen.len());
                }
                index.insert(next.clone(), ());
                seen.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    seen.sort();
    Ok(seen)
}

/// Moves taking `source` to a sheet-relabelling of `target` whose composite
/// half-twist moves puncture `k` to `labels[k]`.
///
/// With `labels = None` any puncture permutation is accepted.
pub fn same_hurwitz_class(
    source: &HurwitzTuple,
    target: &HurwitzTuple,
    labels: Option<&Perm>,
    max_states: usize,
) -> HurwitzDecision {
    let n = source.len();
    if target.len() != n || source.degree() != target.degree() {
        return HurwitzDecision::NotEquivalent;
    }
    let goal = target.canonical().0;
    let track = labels.is_some();
    let start_labels = Perm::identity(if track { n } else { 1 });
    let moves = all_moves(n);
    let start = (source.canonical().0, start_labels.clone());
    let mut parent: HashMap<(HurwitzTuple, Perm), Option<(usize, HurwitzMove)>> = HashMap::new();
    let mut states = vec![(source.clone(), start_labels)];
    parent.insert(start, None);
    let mut keys = vec![parent.keys().next().cloned().expect("start")];
    let mut head = 0;
    while head < states.len() {
        let (tuple, perm) = states[head].clone();
        let key_now = keys[head].clone();
        let done = key_now.0 == goal && labels.map_or(true, |l| &perm == l);
        if done {
            let mut path = Vec::new();
            let mut k = key_now;
            while let Some(Some((prev, m))) = parent.get(&k).cloned() {
                path.push(m);
                k = keys[prev].clone();
            }
            path.reverse();
            let (_, c1) = tuple.canonical();
            let (_, c2) = target.canonical();
            let conjugator = c1.then(&c2.inverse());
            debug_assert_eq!(tuple.conjugate_by(&conjugator), *target);
            return HurwitzDecision::Equivalent(HurwitzWitness { moves: path, conjugator });
        }
        for &m in &moves {
            let next = tuple.apply(m);
            let next_perm = if track {
                let swap = Perm::from_cycles(n, &[vec![m.slot - 1, m.slot]]).expect("transposition");
                swap.then(&perm)
            } else {
                perm.clone()
            };
            let key = (next.canonical().0, next_perm.clone());
            if !parent.contains_key(&key) {
                if states.len() >= max_states {
                    return HurwitzDecision::Overflow { explored: states.len() };
                }
                parent.insert(key.clone(), Some((head, m)));
                keys.push(key);
                states.push((next, next_perm));
            }
        }
        head += 1;
    }
    HurwitzDecision::NotEquivalent
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: &[&str], d: usize) -> HurwitzTuple {
        HurwitzTuple(v.iter().map(|s| Perm::parse_cycles(s, d).unwrap()).collect())
    }

    #[test]
    fn moves_invert() {
        let a = t(&["(1 2)", "(2 3)", "(1 2)", "(2 3)"], 3);
        for slot in 1..4 {
            let m = HurwitzMove { slot, inverse: false };
            let back = a.apply(m).apply(HurwitzMove { slot, inverse: true });
            assert_eq!(back, a);
        }
    }

    #[test]
    fn orbit_preserves_cycle_type_multiset() {
        let a = t(&["(1 2)", "(1 2)", "(1 2)", "(1 2)"], 2);
        let orbit = hurwitz_orbit(&a, 100).unwrap();
        assert_eq!(orbit.len(), 1);
        let b = t(&["(1 2)", "(2 3)", "(2 3)", "(1 2)"], 3);
        let orbit = hurwitz_orbit(&b, 1000).unwrap();
        assert!(orbit.len() > 1);
        for o in &orbit {
            let mut types: Vec<_> = o.0.iter().map(Perm::cycle_type).collect();
            types.sort();
            let mut base: Vec<_> = b.0.iter().map(Perm::cycle_type).collect();
            base.sort();
            assert_eq!(types, base);
        }
    }

    #[test]
    fn witness_replays() {
        let a = t(&["(1 2)", "(2 3)", "(2 3)", "(1 2)"], 3);
        let b = a.apply(HurwitzMove { slot: 2, inverse: false }).apply(HurwitzMove { slot: 1, inverse: true });
        let b = b.conjugate_by(&Perm::parse_cycles("(1 3)", 3).unwrap());
        match same_hurwitz_class(&a, &b, None, 10_000) {
            HurwitzDecision::Equivalent(w) => {
                let moved = w.moves.iter().fold(a.clone(), |acc, &m| acc.apply(m));
                assert_eq!(moved.conjugate_by(&w.conjugator), b);
            }
            other => panic!("{other:?}"),
        }
        let c = t(&["(1 2 3)", "(1 3 2)", "()", "()"], 3);
        assert_eq!(same_hurwitz_class(&a, &c, None, 10_000), HurwitzDecision::NotEquivalent);
    }
}
