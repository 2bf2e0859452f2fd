//! Backtracking automorphism search over a multiplication table.
//!
//! An automorphism is determined by the images of a generating set. Images
//! are assigned one generator at a time; after each assignment the partial
//! map is extended to the generated subgroup and checked for consistency and
//! injectivity, so a branch dies as soon as a relation breaks.

use num_bigint::BigUint;
use rayon::prelude::*;

use super::GroupMap;
use crate::table::TableGroup;

const NONE: u32 = u32::MAX;

/// A homomorphism defined on the subgroup generated by the first few
/// generators, with an undo log.
#[derive(Clone)]
struct Partial<'a> {
    g: &'a TableGroup,
    img: Vec<u32>,
    pre: Vec<u32>,
    /// Elements with an assigned image, in assignment order.
    known: Vec<usize>,
}

impl<'a> Partial<'a> {
    fn new(g: &'a TableGroup) -> Self {
        let m = g.order();
        let e = g.identity();
        let mut img = vec![NONE; m];
        let mut pre = vec![NONE; m];
        img[e] = e as u32;
        pre[e] = e as u32;
        Self { g, img, pre, known: vec![e] }
    }

    fn assign(&mut self, x: usize, v: usize) -> bool {
        match self.img[x] {
            NONE if self.pre[v] == NONE => {
                self.img[x] = v as u32;
                self.pre[v] = x as u32;
                self.known.push(x);
                true
            }
            NONE => false,
            w => w as usize == v,
        }
    }

    fn rollback(&mut self, mark: usize) {
        for x in self.known.drain(mark..) {
            let v = self.img[x] as usize;
            self.img[x] = NONE;
            self.pre[v] = NONE;
        }
    }

    /// Sends `gens[k]` to `c` and extends to `<gens[..=k]>`. Old elements are
    /// only checked against the new generator, new ones against all of
    /// `gens[..=k]`. On failure the state is restored and `None` returned;
    /// on success the returned mark undoes the extension.
    fn extend(&mut self, gens: &[usize], k: usize, c: usize) -> Option<usize> {
        let mark = self.known.len();
        let s = gens[k];
        if self.img[s] != NONE {
            return (self.img[s] as usize == c).then_some(mark);
        }
        let ok = (|| {
            for i in 0..mark {
                let x = self.known[i];
                let v = self.g.mul(self.img[x] as usize, c);
                if !self.assign(self.g.mul(x, s), v) {
                    return false;
                }
            }
            let mut i = mark;
            while i < self.known.len() {
                let x = self.known[i];
                let fx = self.img[x] as usize;
                for &t in &gens[..=k] {
                    let v = self.g.mul(fx, self.img[t] as usize);
                    if !self.assign(self.g.mul(x, t), v) {
                        return false;
                    }
                }
                i += 1;
            }
            true
        })();
        if ok {
            Some(mark)
        } else {
            self.rollback(mark);
            None
        }
    }

    fn to_map(&self) -> GroupMap {
        GroupMap { image: self.img.iter().map(|&v| v as usize).collect() }
    }
}

/// Generating set chosen greedily so that each new generator enlarges the
/// subgroup generated so far as much as possible (ties to higher element
/// order, then lower index). Large steps keep the partial maps rigid, so
/// wrong images are refuted early.
pub fn growth_generators(g: &TableGroup) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut sub = vec![g.identity()];
    while sub.len() < g.order() {
        let mut inside = vec![false; g.order()];
        for &x in &sub {
            inside[x] = true;
        }
        let best = (0..g.order())
            .filter(|&x| !inside[x])
            .map(|x| {
                gens.push(x);
                let size = g.closure(&gens).len();
                gens.pop();
                (size, g.element_order(x), std::cmp::Reverse(x))
            })
            .max()
            .expect("proper subgroup has an outside element");
        gens.push(best.2 .0);
        sub = g.closure(&gens);
    }
    gens
}

/// Automorphism search on a fixed generating set.
pub struct AutSearch<'a> {
    g: &'a TableGroup,
    gens: Vec<usize>,
    /// Candidate images of each generator: the elements of equal order, the
    /// generator itself first.
    candidates: Vec<Vec<usize>>,
}

impl<'a> AutSearch<'a> {
    pub fn new(g: &'a TableGroup) -> Self {
        let gens = growth_generators(g);
        let candidates = gens
            .iter()
            .map(|&s| {
                let o = g.element_order(s);
                std::iter::once(s)
                    .chain((0..g.order()).filter(|&c| c != s && g.element_order(c) == o))
                    .collect()
            })
            .collect();
        Self { g, gens, candidates }
    }

    pub fn generators(&self) -> &[usize] {
        &self.gens
    }

    fn exists(&self, state: &mut Partial<'a>, k: usize) -> bool {
        if k == self.gens.len() {
            return true;
        }
        for &c in &self.candidates[k] {
            if let Some(mark) = state.extend(&self.gens, k, c) {
                let found = self.exists(state, k + 1);
                state.rollback(mark);
                if found {
                    return true;
                }
            }
        }
        false
    }

    fn walk(&self, state: &mut Partial<'a>, k: usize, f: &mut dyn FnMut(GroupMap) -> bool) -> bool {
        if k == self.gens.len() {
            return f(state.to_map());
        }
        for &c in &self.candidates[k] {
            if let Some(mark) = state.extend(&self.gens, k, c) {
                let go_on = self.walk(state, k + 1, f);
                state.rollback(mark);
                if !go_on {
                    return false;
                }
            }
        }
        true
    }

    /// `|Aut(G)|` as a product of orbit lengths along the stabilizer chain of
    /// the generators: the k-th factor counts the images of `gens[k]` that
    /// occur in an automorphism fixing `gens[..k]`.
    pub fn count(&self) -> BigUint {
        let mut prefix = Partial::new(self.g);
        let mut total = BigUint::from(1u32);
        for k in 0..self.gens.len() {
            let orbit = self.candidates[k]
                .par_iter()
                .filter(|&&c| {
                    let mut state = prefix.clone();
                    state.extend(&self.gens, k, c).is_some() && self.exists(&mut state, k + 1)
                })
                .count();
            total *= BigUint::from(orbit);
            prefix.extend(&self.gens, k, self.gens[k]).expect("identity prefix extends");
        }
        total
    }

    /// Visits every automorphism until `f` returns false.
    pub fn for_each(&self, mut f: impl FnMut(GroupMap) -> bool) {
        let mut state = Partial::new(self.g);
        self.walk(&mut state, 0, &mut f);
    }

    /// Every automorphism, or `None` if there are more than `limit`.
    pub fn collect(&self, limit: usize) -> Option<Vec<GroupMap>> {
        let mut out = Vec::new();
        let mut overflow = false;
        self.for_each(|m| {
            if out.len() == limit {
                overflow = true;
                return false;
            }
            out.push(m);
            true
        });
        (!overflow).then_some(out)
    }

    /// Whether `map` is one of the automorphisms this search produces: its
    /// generator images pass every extension step and the resulting map is
    /// `map` itself.
    pub fn contains(&self, map: &GroupMap) -> bool {
        if map.image.len() != self.g.order() {
            return false;
        }
        let mut state = Partial::new(self.g);
        for k in 0..self.gens.len() {
            let c = map.image[self.gens[k]];
            if c >= self.g.order() || state.extend(&self.gens, k, c).is_none() {
                return false;
            }
        }
        state.to_map() == *map
    }
}
