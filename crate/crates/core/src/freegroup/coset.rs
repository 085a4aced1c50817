use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use super::word::{Letter, ReducedWord};
use super::FreeGroupError;
use crate::perm::Perm;

/// Folded core graph of a finitely generated subgroup, with each edge
/// labelled by a word in the subgroup generators.
///
/// Every vertex `v` carries an (implicit) element `p(v)` with `p(base) = 1`;
/// the edge `v -a-> w` stores a word that evaluates to `p(v)·a·p(w)⁻¹`. Reading
/// a closed loop at the base therefore expresses its label in the generators.
#[derive(Clone, Debug)]
pub struct FoldedSubgroup {
    rank: usize,
    gens: Vec<ReducedWord>,
    // out[v][key] = (target, witness)
    out: Vec<Vec<Option<(usize, ReducedWord)>>>,
}

struct RawEdge {
    src: usize,
    letter: Letter,
    dst: usize,
    wit: ReducedWord,
}

impl FoldedSubgroup {
    pub fn new(gens: &[ReducedWord], rank: usize) -> Result<Self, FreeGroupError> {
        if let Some(g) = gens.iter().find(|g| g.rank() != rank) {
            return Err(FreeGroupError::RankMismatch { left: rank, right: g.rank() });
        }
        let k = gens.len();
        let mut edges: Vec<RawEdge> = Vec::new();
        let mut vertices = 1;
        for (i, g) in gens.iter().enumerate() {
            let letters = g.letters();
            let m = letters.len();
            if m == 0 {
                continue;
            }
            let mut prev = 0;
            for (j, &l) in letters.iter().enumerate() {
                let (dst, wit) = if j + 1 == m {
                    (0, ReducedWord::generator(k, i + 1))
                } else {
                    vertices += 1;
                    (vertices - 1, ReducedWord::identity(k))
                };
                edges.push(RawEdge { src: prev, letter: l, dst, wit });
                prev = dst;
            }
        }
        for e in &mut edges {
            if !e.letter.is_positive() {
                std::mem::swap(&mut e.src, &mut e.dst);
                e.letter = e.letter.inverse();
                e.wit = e.wit.inverse();
            }
        }
        fold(&mut edges, vertices, rank, k);
        Ok(Self::compact(edges, rank, gens.to_vec()))
    }

    fn compact(edges: Vec<RawEdge>, rank: usize, gens: Vec<ReducedWord>) -> Self {
        let keys = 2 * rank;
        let max_v = edges.iter().map(|e| e.src.max(e.dst)).max().unwrap_or(0);
        let mut raw: Vec<Vec<Option<(usize, ReducedWord)>>> = vec![vec![None; keys]; max_v + 1];
        for e in edges {
            raw[e.src][e.letter.key()] = Some((e.dst, e.wit.clone()));
            raw[e.dst][e.letter.inverse().key()] = Some((e.src, e.wit.inverse()));
        }
        // Renumber in breadth-first order from the base.
        let mut index = vec![usize::MAX; max_v + 1];
        let mut order = vec![0];
        index[0] = 0;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for slot in raw[v].iter().flatten() {
                if index[slot.0] == usize::MAX {
                    index[slot.0] = order.len();
                    order.push(slot.0);
                }
            }
        }
        let out = order
            .iter()
            .map(|&v| {
                raw[v]
                    .iter()
                    .map(|s| s.as_ref().map(|(t, w)| (index[*t], w.clone())))
                    .collect()
            })
            .collect();
        FoldedSubgroup { rank, gens, out }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[ReducedWord] {
        &self.gens
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    /// Every vertex has every outgoing label: the subgroup has finite index
    /// equal to the vertex count.
    pub fn is_complete(&self) -> bool {
        self.out.iter().all(|row| row.iter().all(Option::is_some))
    }

    /// Follows `w` from the base; returns the end vertex and the accumulated witness.
    pub fn read(&self, w: &ReducedWord) -> Option<(usize, ReducedWord)> {
        let mut v = 0;
        let mut acc = ReducedWord::identity(self.gens.len());
        for l in w.letters() {
            let (t, wit) = self.out[v][l.key()].as_ref()?;
            acc = acc.mul(wit);
            v = *t;
        }
        Some((v, acc))
    }

    pub fn contains(&self, w: &ReducedWord) -> bool {
        matches!(self.read(w), Some((0, _)))
    }

    /// Writes a subgroup element as a word in the generators (formal letters
    /// `x_i` stand for `gens[i-1]`).
    pub fn express(&self, w: &ReducedWord) -> Option<ReducedWord> {
        match self.read(w) {
            Some((0, acc)) => Some(acc),
            _ => None,
        }
    }

    pub fn coset_graph(&self, degree_bound: usize) -> Result<CosetGraph, FreeGroupError> {
        if !self.is_complete() || self.vertex_count() > degree_bound {
            return Err(FreeGroupError::IndexOverflow { bound: degree_bound });
        }
        let actions = (1..=self.rank)
            .map(|g| {
                let key = Letter::new(g, true).key();
                let images = self.out.iter().map(|row| row[key].as_ref().unwrap().0 as u32).collect();
                Perm::from_images(images).expect("complete folded graph is a covering")
            })
            .collect();
        Ok(CosetGraph { actions })
    }
}

fn fold(edges: &mut Vec<RawEdge>, vertices: usize, rank: usize, k: usize) {
    let keys = 2 * rank;
    loop {
        // (vertex, key) -> (edge index, target, outgoing witness)
        let mut slots: Vec<Option<(usize, usize, ReducedWord)>> = vec![None; vertices * keys];
        let mut action = None;
        'scan: for (idx, e) in edges.iter().enumerate() {
            let halves = [
                (e.src, e.letter.key(), e.dst, e.wit.clone()),
                (e.dst, e.letter.inverse().key(), e.src, e.wit.inverse()),
            ];
            for (v, key, t, wit) in halves {
                let slot = &mut slots[v * keys + key];
                match slot {
                    None => *slot = Some((idx, t, wit)),
                    Some((other, t0, w0)) => {
                        if *other == idx {
                            continue;
                        }
                        action = Some(if *t0 == t {
                            Fold::Drop(idx)
                        } else {
                            Fold::Merge { a: (*t0, w0.clone()), b: (t, wit) }
                        });
                        break 'scan;
                    }
                }
            }
        }
        match action {
            None => return,
            Some(Fold::Drop(idx)) => {
                edges.swap_remove(idx);
            }
            Some(Fold::Merge { a, b }) => {
                let ((r, wr), (w, ww)) = if b.0 == 0 || (a.0 != 0 && b.0 < a.0) { (b, a) } else { (a, b) };
                // p(w)·p(r)⁻¹
                let delta = ww.inverse().mul(&wr);
                let delta_inv = delta.inverse();
                for e in edges.iter_mut() {
                    if e.src == w {
                        e.src = r;
                        e.wit = delta_inv.mul(&e.wit);
                    }
                    if e.dst == w {
                        e.dst = r;
                        e.wit = e.wit.mul(&delta);
                    }
                }
                debug_assert!(delta.rank() == k);
            }
        }
    }
}

enum Fold {
    Drop(usize),
    Merge { a: (usize, ReducedWord), b: (usize, ReducedWord) },
}

/// Action of the free generators on the cosets of a finite-index subgroup.
/// Coset `0` is the subgroup itself; actions are on the right.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CosetGraph {
    actions: Vec<Perm>,
}

impl CosetGraph {
    /// Point stabiliser of `base` for a transitive right action.
    pub fn from_action(actions: Vec<Perm>, base: usize) -> Self {
        let d = actions.first().map_or(1, Perm::degree);
        let mut index = vec![usize::MAX; d];
        let mut order = vec![base];
        index[base] = 0;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for p in &actions {
                for t in [p.apply(v), p.inverse().apply(v)] {
                    if index[t] == usize::MAX {
                        index[t] = order.len();
                        order.push(t);
                    }
                }
            }
        }
        let relabel = |p: &Perm| {
            let images = order.iter().map(|&v| index[p.apply(v)] as u32).collect();
            Perm::from_images(images).expect("transitive action")
        };
        CosetGraph { actions: actions.iter().map(relabel).collect() }
    }

    pub fn index(&self) -> usize {
        self.actions.first().map_or(1, Perm::degree)
    }

    pub fn actions(&self) -> &[Perm] {
        &self.actions
    }

    pub fn coset_of(&self, w: &ReducedWord) -> usize {
        let inv: Vec<Perm> = self.actions.iter().map(Perm::inverse).collect();
        w.letters().iter().fold(0, |v, l| {
            let g = l.generator() - 1;
            if l.is_positive() {
                self.actions[g].apply(v)
            } else {
                inv[g].apply(v)
            }
        })
    }

    pub fn contains(&self, w: &ReducedWord) -> bool {
        self.coset_of(w) == 0
    }

    /// Schreier generators of the subgroup from a breadth-first spanning tree.
    pub fn schreier_generators(&self) -> Vec<ReducedWord> {
        let rank = self.actions.len();
        let d = self.index();
        let mut tree: Vec<Option<ReducedWord>> = vec![None; d];
        tree[0] = Some(ReducedWord::identity(rank));
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            let tv = tree[v].clone().unwrap();
            for key in 0..2 * rank {
                let l = Letter::from_key(key);
                let t = self.step(v, l);
                if tree[t].is_none() {
                    tree[t] = Some(tv.mul(&ReducedWord::from_reduced_letters(vec![l], rank)));
                    queue.push_back(t);
                }
            }
        }
        let mut out = Vec::new();
        for v in 0..d {
            for g in 1..=rank {
                let x = ReducedWord::generator(rank, g);
                let t = self.actions[g - 1].apply(v);
                let tv = tree[v].as_ref().unwrap();
                let s = tv.mul(&x).mul(&tree[t].as_ref().unwrap().inverse());
                if !s.is_identity() && !out.contains(&s) {
                    out.push(s);
                }
            }
        }
        out
    }

    fn step(&self, v: usize, l: Letter) -> usize {
        let p = &self.actions[l.generator() - 1];
        if l.is_positive() {
            p.apply(v)
        } else {
            p.inverse().apply(v)
        }
    }
}

/// Coset graph of `⟨gens⟩`, or `IndexOverflow` if the index is infinite or above the bound.
pub fn coset_graph(
    gens: &[ReducedWord],
    rank: usize,
    degree_bound: usize,
) -> Result<CosetGraph, FreeGroupError> {
    FoldedSubgroup::new(gens, rank)?.coset_graph(degree_bound)
}
