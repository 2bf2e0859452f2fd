//! Brute-force ground truth over explicit multiplication tables.

mod corpus;
mod search;

pub use corpus::*;
pub use search::AutSearch;

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::abelian::{is_prime, AbelianElement, AbelianPGroup};
use crate::error::{Error, Result};
use crate::extension::{CentralExtensionGroup, CocycleTable, GAutomorphism};
use crate::table::TableGroup;

/// A self-map of a table group, `x -> image[x]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GroupMap {
    pub image: Vec<usize>,
}

impl GroupMap {
    pub fn identity(m: usize) -> Self {
        Self { image: (0..m).collect() }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    /// `self o other`.
    pub fn compose(&self, other: &GroupMap) -> GroupMap {
        GroupMap { image: other.image.iter().map(|&x| self.image[x]).collect() }
    }

    pub fn inverse(&self) -> GroupMap {
        let mut image = vec![0; self.image.len()];
        for (x, &y) in self.image.iter().enumerate() {
            image[y] = x;
        }
        GroupMap { image }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Bijective and multiplicative, checked on every pair.
    pub fn is_automorphism(&self, g: &TableGroup) -> bool {
        let m = g.order();
        if self.image.len() != m {
            return false;
        }
        let mut hit = vec![false; m];
        for &y in &self.image {
            if y >= m || std::mem::replace(&mut hit[y], true) {
                return false;
            }
        }
        (0..m).all(|a| (0..m).all(|b| self.image[g.mul(a, b)] == g.mul(self.image[a], self.image[b])))
    }
}

fn check_bound(order: usize, bound: u64) -> Result<()> {
    if order as u64 > bound {
        return Err(Error::GroupTooLarge { order: order.to_string(), bound });
    }
    Ok(())
}

/// The table of an extension; element `i` is `g.element_at(i)`.
pub fn table_from_extension(g: &CentralExtensionGroup, bound: u64) -> Result<TableGroup> {
    let m = g.within(bound)?;
    let elems: Vec<_> = g.elements().collect();
    let labels = elems.iter().map(|a| g.label(a)).collect();
    TableGroup::from_fn(m, Some(labels), |a, b| g.index_of(&g.mul(&elems[a], &elems[b])))
}

/// The table of an abelian p-group; element `i` is `h.element_at(i)`.
pub fn table_from_abelian(h: &AbelianPGroup, bound: u64) -> Result<TableGroup> {
    let m = match h.order_usize() {
        Some(m) if m as u64 <= bound => m,
        _ => return Err(Error::GroupTooLarge { order: h.order().to_string(), bound }),
    };
    let elems: Vec<AbelianElement> = h.elements().collect();
    let labels = elems.iter().map(|a| a.to_string()).collect();
    TableGroup::from_fn(m, Some(labels), |a, b| h.index_of(&h.add(&elems[a], &elems[b]).expect("same group")))
}

/// `A x B` with `(a, b)` at index `a * |B| + b`.
pub fn direct_product(a: &TableGroup, b: &TableGroup) -> Result<TableGroup> {
    let nb = b.order();
    let labels = (0..a.order() * nb).map(|i| format!("({},{})", a.label(i / nb), b.label(i % nb))).collect();
    TableGroup::from_fn(a.order() * nb, Some(labels), |x, y| {
        a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb)
    })
}

/// Transports a lifted automorphism to the extension's table.
pub fn map_from_lift(g: &CentralExtensionGroup, gamma: &GAutomorphism) -> GroupMap {
    GroupMap { image: g.elements().map(|a| g.index_of(&gamma.apply(g, &a))).collect() }
}

pub fn brute_aut(t: &TableGroup, bound: u64) -> Result<AutSearch<'_>> {
    check_bound(t.order(), bound)?;
    Ok(AutSearch::new(t))
}

pub fn center(t: &TableGroup) -> Vec<usize> {
    (0..t.order())
        .filter(|&z| (0..t.order()).all(|x| t.mul(z, x) == t.mul(x, z)))
        .collect()
}

/// The center and one conjugation map `x -> g x g^-1` per coset of it.
pub fn center_and_inn(t: &TableGroup, bound: u64) -> Result<(Vec<usize>, Vec<GroupMap>)> {
    check_bound(t.order(), bound)?;
    let z = center(t);
    let mut covered = vec![false; t.order()];
    let mut inner = Vec::new();
    for g in 0..t.order() {
        if covered[g] {
            continue;
        }
        for &c in &z {
            covered[t.mul(g, c)] = true;
        }
        let gi = t.inv(g);
        inner.push(GroupMap { image: (0..t.order()).map(|x| t.mul(t.mul(g, x), gi)).collect() });
    }
    Ok((z, inner))
}

/// Largest power of `p` dividing `n`.
pub fn p_part(n: &BigUint, p: u64) -> BigUint {
    let p = BigUint::from(p);
    let mut n = n.clone();
    let mut out = BigUint::one();
    while !n.is_zero() && (&n % &p).is_zero() {
        n /= &p;
        out *= &p;
    }
    out
}

/// `|Out(T)|_p`.
pub fn out_p_part(t: &TableGroup, p: u64, bound: u64) -> Result<BigUint> {
    let aut = brute_aut(t, bound)?.count();
    let (_, inn) = center_and_inn(t, bound)?;
    Ok(p_part(&(aut / BigUint::from(inn.len())), p))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    /// Non-cyclic of order `p^n` with `n >= 3`.
    pub applicable: bool,
    /// Whether `|G|` divides `|Aut(G)|`; `None` when not applicable.
    pub holds: Option<bool>,
    pub group_order: String,
    pub aut_order: String,
    pub reason: String,
}

/// `log_p m` if `m` is a power of `p`.
fn log_p(m: usize, p: u64) -> Option<u32> {
    let (mut m, p) = (m, p as usize);
    let mut k = 0;
    while m > 1 {
        if m % p != 0 {
            return None;
        }
        m /= p;
        k += 1;
    }
    Some(k)
}

/// Whether `|T|` divides `|Aut(T)|`, for non-cyclic `T` of order `p^n`, `n >= 3`.
pub fn check_conjecture_a(t: &TableGroup, p: u64, bound: u64) -> Result<Verdict> {
    if !is_prime(p) {
        return Err(Error::NonPrime(p));
    }
    let n = log_p(t.order(), p).ok_or(Error::NotAPGroup(t.order(), p))?;
    let aut = brute_aut(t, bound)?.count();
    let order = BigUint::from(t.order());
    let cyclic = (0..t.order()).any(|x| t.element_order(x) == t.order());
    let (applicable, holds, reason) = if cyclic {
        (false, None, "cyclic".to_string())
    } else if n < 3 {
        (false, None, format!("order p^{n} with n < 3"))
    } else {
        let holds = (&aut % &order).is_zero();
        let reason = if holds { "|G| divides |Aut(G)|" } else { "|G| does not divide |Aut(G)|" };
        (true, Some(holds), reason.to_string())
    };
    Ok(Verdict { applicable, holds, group_order: order.to_string(), aut_order: aut.to_string(), reason })
}

/// Rewrites `T` as a central extension of `<z>` by `T/<z>`, for a central
/// element `z` of p-power order. Cosets are ordered by their least element,
/// the transversal picks that least element (the identity for the trivial
/// coset) and the cocycle is read off as a discrete log in `<z>`.
pub fn extension_from_table(t: &TableGroup, z: usize, p: u64) -> Result<CentralExtensionGroup> {
    if !(0..t.order()).all(|x| t.mul(z, x) == t.mul(x, z)) {
        return Err(Error::InvalidInput(format!("element {} is not central", t.label(z))));
    }
    let ord = t.element_order(z);
    let e = log_p(ord, p).filter(|&e| e > 0).ok_or(Error::NotAPGroup(ord, p))?;
    let zgroup = AbelianPGroup::new(p, &[e])?;
    let mut dlog = HashMap::new();
    let mut acc = t.identity();
    for k in 0..ord {
        dlog.insert(acc, k as i128);
        acc = t.mul(acc, z);
    }
    let m = t.order();
    let mut coset = vec![usize::MAX; m];
    let mut reps = vec![t.identity()];
    let mut x = t.identity();
    for _ in 0..ord {
        coset[x] = 0;
        x = t.mul(x, z);
    }
    for a in 0..m {
        if coset[a] != usize::MAX {
            continue;
        }
        let id = reps.len();
        reps.push(a);
        let mut x = a;
        for _ in 0..ord {
            coset[x] = id;
            x = t.mul(x, z);
        }
    }
    let qn = reps.len();
    let labels = reps.iter().map(|&r| t.label(r).to_string()).collect();
    let q = TableGroup::from_fn(qn, Some(labels), |a, b| coset[t.mul(reps[a], reps[b])])?;
    let mu = CocycleTable::from_fn(qn, |a, b| {
        let ab = t.mul(reps[a], reps[b]);
        let w = t.mul(t.inv(reps[coset[ab]]), ab);
        zgroup.element(&[dlog[&w]]).expect("in range")
    });
    CentralExtensionGroup::new(q, zgroup, mu)
}
