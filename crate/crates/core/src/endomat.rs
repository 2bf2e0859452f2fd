//! Endomorphisms of a finite abelian p-group as integer matrices.
//!
//! With `H = Z/p^e_1 x ... x Z/p^e_n` (ascending exponents), an integer
//! matrix `A` induces an endomorphism `a -> A a (mod p^e_i rowwise)` exactly
//! when `p^(e_i - e_j) | a_ij` for `j <= i`. Every endomorphism arises this
//! way, and two matrices induce the same map iff `p^e_i` divides every entry
//! of row `i` of their difference. [`EndoMatrix`] stores the representative
//! with row `i` reduced mod `p^e_i`, so equality of endomorphisms is plain
//! equality of entries.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::abelian::{valuation, AbelianElement, AbelianPGroup, GroupDescriptor};
use crate::error::{Error, Result};

pub const DEFAULT_ENUMERATION_BOUND: u64 = 1 << 20;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EndoMatrix {
    group: AbelianPGroup,
    entries: Vec<Vec<u64>>,
}

/// `a_ii = 1 + s_i p^r_i` for one diagonal entry of a restricted matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalParam {
    pub s: u64,
    pub r: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RestrictedParams {
    pub diagonal: Vec<DiagonalParam>,
}

/// Matrix JSON: `{"group": {"p": 3, "exponents": [1, 2]}, "entries": [[1, 0], [3, 1]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub group: GroupDescriptor,
    pub entries: Vec<Vec<i64>>,
}

impl MatrixJson {
    pub fn build(&self) -> Result<EndoMatrix> {
        let g = self.group.build()?;
        let raw: Vec<Vec<i128>> =
            self.entries.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        canonicalize(&g, &raw)
    }
}

fn pow(p: u64, e: u32) -> u64 {
    p.pow(e)
}

fn check_square(n: usize, raw: &[Vec<i128>]) -> Result<()> {
    if raw.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: raw.len() });
    }
    if let Some(row) = raw.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: row.len() });
    }
    Ok(())
}

/// First `(i, j)` with `j <= i` violating `p^(e_i - e_j) | a_ij`.
fn rp_violation(g: &AbelianPGroup, raw: &[Vec<i128>]) -> Option<(usize, usize)> {
    let e = g.exponents();
    for i in 0..g.rank() {
        for j in 0..=i {
            let q = pow(g.p(), e[i] - e[j]) as i128;
            if raw[i][j].rem_euclid(q) != 0 {
                return Some((i, j));
            }
        }
    }
    None
}

/// Membership in the matrix ring `R_p`.
pub fn in_rp(g: &AbelianPGroup, raw: &[Vec<i128>]) -> Result<bool> {
    check_square(g.rank(), raw)?;
    Ok(rp_violation(g, raw).is_none())
}

pub fn canonicalize(g: &AbelianPGroup, raw: &[Vec<i128>]) -> Result<EndoMatrix> {
    check_square(g.rank(), raw)?;
    if let Some((row, col)) = rp_violation(g, raw) {
        return Err(Error::NotInRp { row, col });
    }
    let entries = raw
        .iter()
        .zip(g.moduli())
        .map(|(row, &m)| row.iter().map(|&x| x.rem_euclid(m as i128) as u64).collect())
        .collect();
    Ok(EndoMatrix { group: g.clone(), entries })
}

impl EndoMatrix {
    pub fn identity(g: &AbelianPGroup) -> Self {
        let n = g.rank();
        let entries = (0..n)
            .map(|i| (0..n).map(|j| u64::from(i == j) % g.moduli()[i]).collect())
            .collect();
        Self { group: g.clone(), entries }
    }

    /// Build from entries that are already canonical; used by enumeration.
    pub(crate) fn from_canonical(g: &AbelianPGroup, entries: Vec<Vec<u64>>) -> Self {
        debug_assert!(entries.iter().zip(g.moduli()).all(|(r, &m)| r.iter().all(|&x| x < m)));
        Self { group: g.clone(), entries }
    }

    pub fn group(&self) -> &AbelianPGroup {
        &self.group
    }

    pub fn entries(&self) -> &[Vec<u64>] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.entries[i][j]
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            group: self.group.descriptor(),
            entries: self.entries.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.group)
    }

    fn same_group(&self, other: &AbelianPGroup) -> Result<()> {
        if self.group != *other {
            return Err(Error::DimensionMismatch { expected: self.group.rank(), found: other.rank() });
        }
        Ok(())
    }

    /// The induced endomorphism: `coords[i] = sum_j a_ij alpha_j mod p^e_i`.
    pub fn apply(&self, a: &AbelianElement) -> Result<AbelianElement> {
        if a.coords.len() != self.group.rank() || !self.group.contains(a) {
            return Err(Error::DimensionMismatch { expected: self.group.rank(), found: a.coords.len() });
        }
        Ok(self.apply_unchecked(a))
    }

    pub(crate) fn apply_unchecked(&self, a: &AbelianElement) -> AbelianElement {
        let coords = self
            .entries
            .iter()
            .zip(self.group.moduli())
            .map(|(row, &m)| {
                let m = m as u128;
                row.iter()
                    .zip(&a.coords)
                    .fold(0u128, |acc, (&x, &y)| (acc + (x as u128 * y as u128) % m) % m) as u64
            })
            .collect();
        AbelianElement { coords }
    }

    /// Matrix product `self * other`, i.e. apply `other` first.
    pub fn compose(&self, other: &EndoMatrix) -> Result<EndoMatrix> {
        other.same_group(&self.group)?;
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &EndoMatrix) -> EndoMatrix {
        let n = self.group.rank();
        let entries = (0..n)
            .map(|i| {
                let m = self.group.moduli()[i] as u128;
                (0..n)
                    .map(|j| {
                        (0..n).fold(0u128, |acc, k| {
                            (acc + (self.entries[i][k] as u128 * other.entries[k][j] as u128) % m) % m
                        }) as u64
                    })
                    .collect()
            })
            .collect();
        EndoMatrix { group: self.group.clone(), entries }
    }

    /// Determinant of `A mod p` over `F_p`.
    pub fn det_mod_p(&self) -> u64 {
        let p = self.group.p();
        let n = self.group.rank();
        let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
        let inv = |a: u64| {
            // a^(p-2) by square-and-multiply
            let (mut base, mut exp, mut acc) = (a, p - 2, 1u64);
            while exp > 0 {
                if exp & 1 == 1 {
                    acc = mulmod(acc, base);
                }
                base = mulmod(base, base);
                exp >>= 1;
            }
            acc
        };
        let mut m: Vec<Vec<u64>> =
            self.entries.iter().map(|r| r.iter().map(|&x| x % p).collect()).collect();
        let mut det = 1u64;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| m[r][col] != 0) else {
                return 0;
            };
            if piv != col {
                m.swap(piv, col);
                det = (p - det) % p;
            }
            det = mulmod(det, m[col][col]);
            let pinv = inv(m[col][col]);
            for r in col + 1..n {
                let f = mulmod(m[r][col], pinv);
                if f == 0 {
                    continue;
                }
                for c in col..n {
                    let sub = mulmod(f, m[col][c]);
                    m[r][c] = (m[r][c] + p - sub) % p;
                }
            }
        }
        det
    }

    /// Automorphism iff `A mod p` is invertible over `F_p`.
    pub fn is_automorphism(&self) -> bool {
        self.det_mod_p() != 0
    }

    /// Conditions (b) and (c): `A = I mod p`, diagonal `= 1 mod p^2`, and
    /// `a_ij = 0 mod p^(e_i - e_j + 2)` off the diagonal when `e_i >= e_j`.
    /// Evaluated on the canonical entries.
    pub fn satisfies_abc(&self) -> bool {
        self.abc_violation().is_none()
    }

    fn abc_violation(&self) -> Option<String> {
        let n = self.group.rank();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .find(|&(i, j)| !restricted_entry_ok(&self.group, i, j, self.entries[i][j]))
            .map(|(i, j)| format!("entry ({},{}) = {}", i + 1, j + 1, self.entries[i][j]))
    }

    pub fn decompose_diagonal(&self) -> Result<RestrictedParams> {
        if let Some(why) = self.abc_violation() {
            return Err(Error::NotRestricted(why));
        }
        let p = self.group.p();
        let diagonal = (0..self.group.rank())
            .map(|i| {
                let e = self.group.exponents()[i];
                let a = self.entries[i][i];
                match valuation(p, a - 1) {
                    None => DiagonalParam { s: 0, r: e.max(2) },
                    Some(v) => {
                        let r = v.clamp(2, e);
                        DiagonalParam { s: (a - 1) / pow(p, r), r }
                    }
                }
            })
            .collect();
        Ok(RestrictedParams { diagonal })
    }

    /// Multiplicative order of the induced endomorphism, if it is at most `cap`.
    pub fn order(&self, cap: u64) -> Option<u64> {
        let id = Self::identity(&self.group);
        let mut acc = self.clone();
        for k in 1..=cap {
            if acc == id {
                return Some(k);
            }
            acc = acc.compose_unchecked(self);
        }
        None
    }
}

/// Entry predicate behind [`EndoMatrix::satisfies_abc`] for a canonical value
/// `v` of entry `(i, j)` (0-based).
pub(crate) fn restricted_entry_ok(g: &AbelianPGroup, i: usize, j: usize, v: u64) -> bool {
    let p = g.p();
    let e = g.exponents();
    let divisible = |v: u64, k: u32| match p.checked_pow(k) {
        Some(q) => v % q == 0,
        None => v == 0,
    };
    if i == j {
        // (b) and (c) together: a_ii = 1 mod p^2
        v >= 1 && divisible(v - 1, 2)
    } else if e[i] >= e[j] {
        divisible(v, e[i] - e[j] + 2)
    } else {
        divisible(v, 1)
    }
}

fn canonical_entry_choices(g: &AbelianPGroup, i: usize, j: usize) -> (u64, u64) {
    // (step, count): canonical values are step * k for k in 0..count
    let e = g.exponents();
    let m = g.moduli()[i];
    let step = if i >= j { pow(g.p(), e[i] - e[j]) } else { 1 };
    (step, m / step)
}

/// `|End(H)|` = the number of canonical matrices, `prod_ij p^min(e_i, e_j)`.
pub fn residue_class_count(g: &AbelianPGroup) -> BigUint {
    let e = g.exponents();
    let log: u32 = e.iter().flat_map(|&a| e.iter().map(move |&b| a.min(b))).sum();
    BigUint::from(g.p()).pow(log)
}

fn check_bound(size: &BigUint, bound: u64) -> Result<()> {
    if *size > BigUint::from(bound) {
        return Err(Error::EnumerationTooLarge { size: size.to_string(), bound });
    }
    Ok(())
}

/// Odometer over a product of per-entry value lists.
struct Odometer {
    group: AbelianPGroup,
    choices: Vec<Vec<u64>>,
    digits: Vec<usize>,
    done: bool,
}

impl Odometer {
    fn new(group: AbelianPGroup, choices: Vec<Vec<u64>>) -> Self {
        let done = choices.iter().any(|c| c.is_empty());
        let digits = vec![0; choices.len()];
        Self { group, choices, digits, done }
    }
}

impl Iterator for Odometer {
    type Item = EndoMatrix;

    fn next(&mut self) -> Option<EndoMatrix> {
        if self.done {
            return None;
        }
        let n = self.group.rank();
        let entries = (0..n)
            .map(|i| (0..n).map(|j| self.choices[i * n + j][self.digits[i * n + j]]).collect())
            .collect();
        let out = EndoMatrix::from_canonical(&self.group, entries);
        // advance, last entry fastest
        let mut k = self.digits.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.digits[k] += 1;
            if self.digits[k] < self.choices[k].len() {
                break;
            }
            self.digits[k] = 0;
        }
        Some(out)
    }
}

/// Every canonical endomorphism matrix exactly once.
pub fn enumerate_endos(g: &AbelianPGroup, bound: u64) -> Result<impl Iterator<Item = EndoMatrix>> {
    check_bound(&residue_class_count(g), bound)?;
    let n = g.rank();
    let choices = (0..n * n)
        .map(|k| {
            let (step, count) = canonical_entry_choices(g, k / n, k % n);
            (0..count).map(|t| t * step).collect()
        })
        .collect();
    Ok(Odometer::new(g.clone(), choices))
}

pub fn enumerate_autos(g: &AbelianPGroup, bound: u64) -> Result<impl Iterator<Item = EndoMatrix>> {
    Ok(enumerate_endos(g, bound)?.filter(EndoMatrix::is_automorphism))
}

/// The set of canonical matrices satisfying (a)-(c), as a product of
/// per-entry admissible values.
#[derive(Clone, Debug)]
pub struct RestrictedSpace {
    group: AbelianPGroup,
    choices: Vec<Vec<u64>>,
}

impl RestrictedSpace {
    /// Scans every canonical value of every entry through the entry predicate.
    pub fn new(g: &AbelianPGroup) -> Self {
        let n = g.rank();
        let choices = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                let (step, count) = canonical_entry_choices(g, i, j);
                (0..count).map(|t| t * step).filter(|&v| restricted_entry_ok(g, i, j, v)).collect()
            })
            .collect();
        Self { group: g.clone(), choices }
    }

    pub fn size(&self) -> BigUint {
        self.choices.iter().map(|c| BigUint::from(c.len())).product()
    }

    pub fn iter(&self) -> impl Iterator<Item = EndoMatrix> {
        Odometer::new(self.group.clone(), self.choices.clone())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> EndoMatrix {
        let n = self.group.rank();
        let entries = (0..n)
            .map(|i| (0..n).map(|j| {
                let c = &self.choices[i * n + j];
                c[rng.gen_range(0..c.len())]
            }).collect())
            .collect();
        EndoMatrix::from_canonical(&self.group, entries)
    }
}

/// `|Aut(H)| = prod_k (p^d_k - p^(k-1)) * prod_j (p^e_j)^(n - d_j) * prod_i (p^(e_i - 1))^(n - c_i + 1)`.
pub fn aut_order(g: &AbelianPGroup) -> BigUint {
    let p = BigUint::from(g.p());
    let n = g.rank();
    let e = g.exponents();
    let prof = g.index_profile();
    let mut total = BigUint::one();
    for k in 1..=n {
        total *= p.pow(prof.d[k - 1] as u32) - p.pow(k as u32 - 1);
    }
    for j in 1..=n {
        total *= p.pow(e[j - 1] * (n - prof.d[j - 1]) as u32);
    }
    for i in 1..=n {
        total *= p.pow((e[i - 1] - 1) * (n - prof.c[i - 1] + 1) as u32);
    }
    total
}

/// `log_p` of the number of matrices satisfying (a)-(c):
/// `|Z| / p^2n * prod_i (p^(e'_i - 1))^((n - C_(i+1) + 1)(C_(i+1) - C_i)) * prod_i (p^(e'_i - 2))^((n - C_i)(C_(i+1) - C_i))`.
pub fn count_abc_log(g: &AbelianPGroup) -> Result<u64> {
    let e1 = g.exponents()[0];
    if e1 < 2 {
        return Err(Error::ExponentTooSmall(e1));
    }
    let n = g.rank() as i64;
    let prof = g.index_profile();
    let c = &prof.block_start;
    let mut log = g.log_order() as i64 - 2 * n;
    for i in 0..prof.l {
        let ep = prof.e_prime[i] as i64;
        let (ci, cnext) = (c[i] as i64, c[i + 1] as i64);
        let size = cnext - ci;
        log += (ep - 1) * (n - cnext + 1) * size;
        log += (ep - 2) * (n - ci) * size;
    }
    let log = u64::try_from(log).expect("restricted count exponent is non-negative");
    Ok(log)
}

pub fn count_abc(g: &AbelianPGroup) -> Result<BigUint> {
    let log = count_abc_log(g)?;
    Ok(BigUint::from(g.p()).pow(log as u32))
}

/// `|Z| p^(n^2 - 3n)`, defined for `n >= 3` and `e_1 >= 3`.
pub fn theorem_lower_bound(g: &AbelianPGroup) -> Result<BigUint> {
    let n = g.rank();
    let e1 = g.exponents()[0];
    let mut failed = Vec::new();
    if n < 3 {
        failed.push(format!("n >= 3 (n = {n})"));
    }
    if e1 < 3 {
        failed.push(format!("e_1 >= 3 (e_1 = {e1})"));
    }
    if !failed.is_empty() {
        return Err(Error::HypothesisViolation(failed));
    }
    let log = g.log_order() as usize + n * n - 3 * n;
    Ok(BigUint::from(g.p()).pow(log as u32))
}

impl fmt::Debug for EndoMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EndoMatrix({:?}, {:?})", self.group, self.entries)
    }
}

impl fmt::Display for EndoMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn g(p: u64, e: &[u32]) -> AbelianPGroup {
        AbelianPGroup::new(p, e).unwrap()
    }

    fn m(g: &AbelianPGroup, rows: &[&[i128]]) -> EndoMatrix {
        let raw: Vec<Vec<i128>> = rows.iter().map(|r| r.to_vec()).collect();
        canonicalize(g, &raw).unwrap()
    }

    fn el(c: &[u64]) -> AbelianElement {
        AbelianElement { coords: c.to_vec() }
    }

    #[test]
    fn rp_membership() {
        let h = g(3, &[1, 2]);
        assert!(in_rp(&h, &[vec![1, 0], vec![0, 1]]).unwrap());
        assert!(!in_rp(&h, &[vec![1, 0], vec![1, 1]]).unwrap());
        assert!(in_rp(&h, &[vec![1, 0], vec![3, 1]]).unwrap());
        assert!(matches!(in_rp(&h, &[vec![1, 0]]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(
            canonicalize(&h, &[vec![1, 0], vec![1, 1]]),
            Err(Error::NotInRp { row: 1, col: 0 })
        ));
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(m(&g(3, &[2]), &[&[10]]).entries(), &[vec![1]]);
        let h = g(3, &[1, 2]);
        assert_eq!(m(&h, &[&[1, 0], &[9, 1]]).entry(1, 0), 0);
        let h = g(3, &[1, 1]);
        assert_eq!(m(&h, &[&[4, 3], &[3, 4]]), EndoMatrix::identity(&h));
        // negative representatives reduce too
        assert_eq!(m(&g(3, &[2]), &[&[-1]]).entries(), &[vec![8]]);
    }

    #[test]
    fn apply_examples() {
        let h = g(3, &[1, 2]);
        let a = el(&[2, 7]);
        assert_eq!(EndoMatrix::identity(&h).apply(&a).unwrap(), a);
        assert_eq!(m(&h, &[&[1, 0], &[3, 1]]).apply(&el(&[1, 0])).unwrap(), el(&[1, 3]));
        let c9 = g(3, &[2]);
        let ten = m(&c9, &[&[10]]);
        assert_eq!(ten.apply(&el(&[4])).unwrap(), el(&[4]));
        // z -> z^10 evaluated by repeated addition
        for x in c9.elements() {
            let mut acc = c9.zero();
            for _ in 0..10 {
                acc = c9.add(&acc, &x).unwrap();
            }
            assert_eq!(ten.apply(&x).unwrap(), acc);
        }
        assert!(matches!(ten.apply(&el(&[1, 1])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn compose_examples() {
        let h = g(3, &[1, 1]);
        let swap = m(&h, &[&[0, 1], &[1, 0]]);
        assert!(swap.compose(&swap).unwrap().is_identity());
        let x = m(&h, &[&[2, 1], &[0, 1]]);
        assert_eq!(x.compose(&EndoMatrix::identity(&h)).unwrap(), x);
        let other = g(3, &[1, 2]);
        assert!(x.compose(&EndoMatrix::identity(&other)).is_err());
    }

    #[test]
    fn automorphism_examples() {
        let h = g(3, &[1, 1]);
        assert!(EndoMatrix::identity(&h).is_automorphism());
        assert!(!m(&h, &[&[1, 1], &[1, 1]]).is_automorphism());
        let h = g(2, &[1, 2]);
        let a = m(&h, &[&[1, 1], &[0, 1]]);
        assert!(a.is_automorphism());
        let images: HashSet<_> = h.elements().map(|x| a.apply(&x).unwrap()).collect();
        assert_eq!(images.len(), 8);
    }

    /// Units mod p^e by direct gcd test.
    fn unit_count(p: u64, e: u32) -> u64 {
        let m = p.pow(e);
        (0..m).filter(|x| x % p != 0).count() as u64
    }

    #[test]
    fn aut_order_examples() {
        assert_eq!(unit_count(5, 2), 20);
        assert_eq!(aut_order(&g(5, &[2])), BigUint::from(20u32));
        assert_eq!(aut_order(&g(3, &[1, 1])), BigUint::from(48u32));
        assert_eq!(aut_order(&g(2, &[1, 2])), BigUint::from(8u32));
        assert_eq!(aut_order(&g(3, &[1, 2])), BigUint::from(108u32));
    }

    #[test]
    fn enumeration_counts() {
        let c3 = g(3, &[1]);
        assert_eq!(enumerate_endos(&c3, DEFAULT_ENUMERATION_BOUND).unwrap().count(), 3);
        assert_eq!(enumerate_autos(&c3, DEFAULT_ENUMERATION_BOUND).unwrap().count(), 2);
        let v = g(2, &[1, 1]);
        assert_eq!(enumerate_endos(&v, DEFAULT_ENUMERATION_BOUND).unwrap().count(), 16);
        assert_eq!(enumerate_autos(&v, DEFAULT_ENUMERATION_BOUND).unwrap().count(), 6);
        let h = g(3, &[1, 2]);
        assert_eq!(enumerate_autos(&h, DEFAULT_ENUMERATION_BOUND).unwrap().count(), 108);
        let big = g(3, &[3, 3, 3]);
        assert!(matches!(
            enumerate_endos(&big, DEFAULT_ENUMERATION_BOUND),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn enumeration_yields_distinct_matrices() {
        let h = g(2, &[1, 2]);
        let all: Vec<_> = enumerate_endos(&h, DEFAULT_ENUMERATION_BOUND).unwrap().collect();
        let set: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(all.len(), set.len());
        assert_eq!(BigUint::from(all.len()), residue_class_count(&h));
    }

    #[test]
    fn restricted_examples() {
        assert!(EndoMatrix::identity(&g(3, &[2, 3])).satisfies_abc());
        assert!(m(&g(3, &[3]), &[&[10]]).satisfies_abc());
        assert!(!m(&g(3, &[2, 2]), &[&[1, 3], &[0, 1]]).satisfies_abc());
        assert!(!m(&g(3, &[3]), &[&[4]]).satisfies_abc());
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_abc(&g(3, &[2, 2])).unwrap(), BigUint::from(1u32));
        assert_eq!(count_abc(&g(3, &[3])).unwrap(), BigUint::from(3u32));
        assert_eq!(count_abc(&g(3, &[3, 3, 3])).unwrap(), BigUint::from(19683u32));
        assert!(matches!(count_abc(&g(3, &[1, 1])), Err(Error::ExponentTooSmall(1))));
        // Z/27 restricted values are {1, 10, 19}
        let vals: Vec<u64> = RestrictedSpace::new(&g(3, &[3])).iter().map(|x| x.entry(0, 0)).collect();
        assert_eq!(vals, vec![1, 10, 19]);
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(theorem_lower_bound(&g(3, &[3, 3, 3])).unwrap(), BigUint::from(3u32).pow(9));
        assert_eq!(theorem_lower_bound(&g(3, &[3, 3, 3, 3])).unwrap(), BigUint::from(3u32).pow(16));
        match theorem_lower_bound(&g(3, &[2, 2, 2])) {
            Err(Error::HypothesisViolation(v)) => assert!(v[0].contains("e_1")),
            other => panic!("unexpected {other:?}"),
        }
        match theorem_lower_bound(&g(3, &[2, 2])) {
            Err(Error::HypothesisViolation(v)) => assert_eq!(v.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn diagonal_decomposition() {
        let d = m(&g(3, &[3]), &[&[10]]).decompose_diagonal().unwrap();
        assert_eq!(d.diagonal, vec![DiagonalParam { s: 1, r: 2 }]);
        let d = EndoMatrix::identity(&g(3, &[2, 3])).decompose_diagonal().unwrap();
        assert_eq!(d.diagonal.iter().map(|x| x.s).collect::<Vec<_>>(), vec![0, 0]);
        let d = m(&g(3, &[4]), &[&[28]]).decompose_diagonal().unwrap();
        assert_eq!(d.diagonal, vec![DiagonalParam { s: 1, r: 3 }]);
        assert!(matches!(
            m(&g(3, &[3]), &[&[4]]).decompose_diagonal(),
            Err(Error::NotRestricted(_))
        ));
        // reconstruction for every restricted matrix of a mixed group
        let h = g(3, &[2, 4]);
        for a in RestrictedSpace::new(&h).iter() {
            let d = a.decompose_diagonal().unwrap();
            for (i, dp) in d.diagonal.iter().enumerate() {
                assert!(dp.r >= 2);
                let rec = (1 + dp.s * 3u64.pow(dp.r)) % h.moduli()[i];
                assert_eq!(rec, a.entry(i, i));
            }
        }
    }

    #[test]
    fn ring_action_exhaustive() {
        for h in [g(2, &[1, 2]), g(3, &[1, 1]), g(2, &[1, 1, 1])] {
            let mats: Vec<_> = enumerate_endos(&h, DEFAULT_ENUMERATION_BOUND).unwrap().step_by(7).collect();
            for a in mats.iter().take(40) {
                for b in mats.iter().take(40) {
                    let ab = a.compose(b).unwrap();
                    for x in h.elements() {
                        assert_eq!(ab.apply(&x).unwrap(), a.apply(&b.apply(&x).unwrap()).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let h = g(3, &[1, 2]);
        let a = m(&h, &[&[2, 1], &[3, 4]]);
        let s = serde_json::to_string(&a.to_json()).unwrap();
        let back: MatrixJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.build().unwrap(), a);
    }
}
