//! Finite abelian p-groups `Z/p^e_1 x ... x Z/p^e_n`, written additively.
//!
//! Elements are coordinate vectors with `coords[i]` a canonical residue
//! modulo `p^e_i`. Exponents are always kept in ascending order.

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus `p^e` accepted for coordinate arithmetic.
const MAX_MODULUS: u64 = 1 << 62;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `p`-adic valuation of a nonzero integer; `None` for zero.
pub fn valuation(p: u64, mut x: u64) -> Option<u32> {
    if x == 0 {
        return None;
    }
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    Some(v)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AbelianPGroup {
    p: u64,
    exponents: Vec<u32>,
    moduli: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AbelianElement {
    pub coords: Vec<u64>,
}

/// Bookkeeping for repeated exponents. All indices are 1-based, matching the
/// usual presentation of the counting formulas.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexProfile {
    /// `d_k = max{m : e_m = e_k}`
    pub d: Vec<usize>,
    /// `c_k = min{m : e_m = e_k}`
    pub c: Vec<usize>,
    /// The distinct exponents `e'_1 < ... < e'_l`.
    pub e_prime: Vec<u32>,
    /// `C_1, ..., C_l, C_{l+1} = n + 1`: first index of each block of equal exponents.
    pub block_start: Vec<usize>,
    /// `D_1, ..., D_l`: last index of each block.
    pub block_end: Vec<usize>,
    pub l: usize,
}

impl IndexProfile {
    /// Size `C_{i+1} - C_i` of block `i` (1-based).
    pub fn block_len(&self, i: usize) -> usize {
        self.block_start[i] - self.block_start[i - 1]
    }
}

/// JSON group descriptor: `{"p": 3, "exponents": [1, 2]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDescriptor {
    pub p: u64,
    pub exponents: Vec<i64>,
}

impl GroupDescriptor {
    pub fn build(&self) -> Result<AbelianPGroup> {
        let mut exps = Vec::with_capacity(self.exponents.len());
        for &e in &self.exponents {
            if e <= 0 || e > u32::MAX as i64 {
                return Err(Error::NonPositiveExponent(e));
            }
            exps.push(e as u32);
        }
        AbelianPGroup::new(self.p, &exps)
    }
}

impl AbelianPGroup {
    pub fn new(p: u64, exponents: &[u32]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if exponents.is_empty() {
            return Err(Error::EmptyExponents);
        }
        let mut exponents = exponents.to_vec();
        exponents.sort_unstable();
        if exponents[0] == 0 {
            return Err(Error::NonPositiveExponent(0));
        }
        let moduli = exponents
            .iter()
            .map(|&e| match p.checked_pow(e) {
                Some(m) if m <= MAX_MODULUS => Ok(m),
                _ => Err(Error::ModulusTooLarge { p, e }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { p, exponents, moduli })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Number of cyclic factors.
    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// `p^e_i` for each factor.
    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.p).pow(self.log_order())
    }

    /// `log_p |H| = e_1 + ... + e_n`.
    pub fn log_order(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// The order as a machine integer, when it fits.
    pub fn order_usize(&self) -> Option<usize> {
        self.moduli
            .iter()
            .try_fold(1usize, |acc, &m| acc.checked_mul(usize::try_from(m).ok()?))
    }

    pub fn descriptor(&self) -> GroupDescriptor {
        GroupDescriptor {
            p: self.p,
            exponents: self.exponents.iter().map(|&e| e as i64).collect(),
        }
    }

    pub fn zero(&self) -> AbelianElement {
        AbelianElement { coords: vec![0; self.rank()] }
    }

    /// Basis element `z_i` (0-based `i`).
    pub fn basis(&self, i: usize) -> AbelianElement {
        let mut e = self.zero();
        e.coords[i] = 1 % self.moduli[i];
        e
    }

    /// Reduce arbitrary integer coordinates into canonical residues.
    pub fn element(&self, coords: &[i128]) -> Result<AbelianElement> {
        self.check_len(coords.len())?;
        let coords = coords
            .iter()
            .zip(&self.moduli)
            .map(|(&c, &m)| c.rem_euclid(m as i128) as u64)
            .collect();
        Ok(AbelianElement { coords })
    }

    pub fn contains(&self, a: &AbelianElement) -> bool {
        a.coords.len() == self.rank() && a.coords.iter().zip(&self.moduli).all(|(&c, &m)| c < m)
    }

    fn check_len(&self, found: usize) -> Result<()> {
        if found != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), found });
        }
        Ok(())
    }

    fn check(&self, a: &AbelianElement) -> Result<()> {
        self.check_len(a.coords.len())?;
        if !self.contains(a) {
            return Err(Error::InvalidInput(format!("{a} is not in canonical form")));
        }
        Ok(())
    }

    pub fn add(&self, a: &AbelianElement, b: &AbelianElement) -> Result<AbelianElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_unchecked(a, b))
    }

    pub(crate) fn add_unchecked(&self, a: &AbelianElement, b: &AbelianElement) -> AbelianElement {
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .zip(&self.moduli)
            .map(|((&x, &y), &m)| ((x as u128 + y as u128) % m as u128) as u64)
            .collect();
        AbelianElement { coords }
    }

    pub(crate) fn add_assign_unchecked(&self, a: &mut AbelianElement, b: &AbelianElement) {
        for ((x, &y), &m) in a.coords.iter_mut().zip(&b.coords).zip(&self.moduli) {
            *x = ((*x as u128 + y as u128) % m as u128) as u64;
        }
    }

    pub fn neg(&self, a: &AbelianElement) -> Result<AbelianElement> {
        self.check(a)?;
        Ok(self.neg_unchecked(a))
    }

    pub(crate) fn neg_unchecked(&self, a: &AbelianElement) -> AbelianElement {
        let coords = a
            .coords
            .iter()
            .zip(&self.moduli)
            .map(|(&x, &m)| if x == 0 { 0 } else { m - x })
            .collect();
        AbelianElement { coords }
    }

    pub fn sub(&self, a: &AbelianElement, b: &AbelianElement) -> Result<AbelianElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_unchecked(a, &self.neg_unchecked(b)))
    }

    /// `k * a` for any integer `k`.
    pub fn scale(&self, k: i128, a: &AbelianElement) -> Result<AbelianElement> {
        self.check(a)?;
        Ok(self.scale_unchecked(k, a))
    }

    pub(crate) fn scale_unchecked(&self, k: i128, a: &AbelianElement) -> AbelianElement {
        let coords = a
            .coords
            .iter()
            .zip(&self.moduli)
            .map(|(&x, &m)| {
                let k = k.rem_euclid(m as i128) as u128;
                ((k * x as u128) % m as u128) as u64
            })
            .collect();
        AbelianElement { coords }
    }

    /// Least `m >= 1` with `m * a = 0`. Always a power of `p`.
    pub fn order_of(&self, a: &AbelianElement) -> Result<u64> {
        self.check(a)?;
        let mut order = 1u64;
        for (&x, &m) in a.coords.iter().zip(&self.moduli) {
            // order of x in Z/m is m / gcd(x, m) = m / p^v(x)
            let o = match valuation(self.p, x) {
                None => 1,
                Some(v) => m / self.p.pow(v),
            };
            order = order.max(o);
        }
        Ok(order)
    }

    pub fn is_zero(a: &AbelianElement) -> bool {
        a.coords.iter().all(|&c| c == 0)
    }

    /// Mixed-radix index in `0..|H|`, first coordinate least significant.
    pub fn index_of(&self, a: &AbelianElement) -> usize {
        let mut idx = 0usize;
        for (&c, &m) in a.coords.iter().zip(&self.moduli).rev() {
            idx = idx * m as usize + c as usize;
        }
        idx
    }

    pub fn element_at(&self, mut idx: usize) -> AbelianElement {
        let coords = self
            .moduli
            .iter()
            .map(|&m| {
                let c = (idx % m as usize) as u64;
                idx /= m as usize;
                c
            })
            .collect();
        AbelianElement { coords }
    }

    /// Every element in index order. Intended for small groups.
    pub fn elements(&self) -> impl Iterator<Item = AbelianElement> + '_ {
        let n = self.order_usize().expect("group too large to list");
        (0..n).map(move |i| self.element_at(i))
    }

    pub fn index_profile(&self) -> IndexProfile {
        let n = self.rank();
        let e = &self.exponents;
        let d = (0..n)
            .map(|k| (0..n).filter(|&m| e[m] == e[k]).max().unwrap() + 1)
            .collect();
        let c = (0..n)
            .map(|k| (0..n).filter(|&m| e[m] == e[k]).min().unwrap() + 1)
            .collect();
        let mut e_prime = e.clone();
        e_prime.dedup();
        let mut block_start: Vec<usize> = e_prime
            .iter()
            .map(|ep| e.iter().position(|x| x == ep).unwrap() + 1)
            .collect();
        let block_end = e_prime
            .iter()
            .map(|ep| e.iter().rposition(|x| x == ep).unwrap() + 1)
            .collect();
        block_start.push(n + 1);
        IndexProfile { d, c, l: e_prime.len(), e_prime, block_start, block_end }
    }
}

impl fmt::Debug for AbelianPGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AbelianPGroup({}, {:?})", self.p, self.exponents)
    }
}

impl fmt::Display for AbelianPGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.exponents.iter().map(|e| format!("Z/{}^{}", self.p, e)).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

impl fmt::Display for AbelianElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(p: u64, e: &[u32]) -> AbelianPGroup {
        AbelianPGroup::new(p, e).unwrap()
    }

    fn el(c: &[u64]) -> AbelianElement {
        AbelianElement { coords: c.to_vec() }
    }

    #[test]
    fn construction() {
        assert_eq!(g(3, &[3, 3, 3]).order(), BigUint::from(19683u32));
        assert!(matches!(AbelianPGroup::new(4, &[1]), Err(Error::NonPrime(4))));
        let h = g(3, &[2, 1]);
        assert_eq!(h.exponents(), &[1, 2]);
        assert_eq!(h.order(), BigUint::from(27u32));
        assert!(matches!(AbelianPGroup::new(3, &[]), Err(Error::EmptyExponents)));
        assert!(matches!(AbelianPGroup::new(3, &[0, 1]), Err(Error::NonPositiveExponent(0))));
        let desc = GroupDescriptor { p: 5, exponents: vec![2, -1] };
        assert!(matches!(desc.build(), Err(Error::NonPositiveExponent(-1))));
        assert!(matches!(AbelianPGroup::new(2, &[70]), Err(Error::ModulusTooLarge { .. })));
    }

    #[test]
    fn descriptor_json() {
        let d: GroupDescriptor = serde_json::from_str(r#"{"p": 3, "exponents": [2, 1]}"#).unwrap();
        let h = d.build().unwrap();
        assert_eq!(h.exponents(), &[1, 2]);
        assert_eq!(serde_json::to_string(&h.descriptor()).unwrap(), r#"{"p":3,"exponents":[1,2]}"#);
    }

    #[test]
    fn arithmetic() {
        let h = g(3, &[2]);
        assert_eq!(h.add(&el(&[5]), &el(&[6])).unwrap(), el(&[2]));
        let a = el(&[7]);
        assert_eq!(h.add(&a, &h.zero()).unwrap(), a);
        let h2 = g(3, &[1, 2]);
        assert_eq!(h2.add(&el(&[2, 8]), &el(&[1, 1])).unwrap(), el(&[0, 0]));
        assert!(matches!(h2.add(&el(&[1]), &el(&[1, 1])), Err(Error::DimensionMismatch { .. })));
        assert_eq!(h2.order_of(&h2.basis(1)).unwrap(), 9);
        assert_eq!(h2.order_of(&h2.zero()).unwrap(), 1);
        assert_eq!(h.scale(9, &el(&[1])).unwrap(), el(&[0]));
        assert_eq!(h.scale(-1, &el(&[1])).unwrap(), el(&[8]));
        assert_eq!(h.neg(&el(&[1])).unwrap(), el(&[8]));
        assert_eq!(h2.element(&[-1, 10]).unwrap(), el(&[2, 1]));
    }

    #[test]
    fn profiles() {
        let p = g(3, &[1, 1, 2]).index_profile();
        assert_eq!(p.d, vec![2, 2, 3]);
        assert_eq!(p.c, vec![1, 1, 3]);
        assert_eq!(p.e_prime, vec![1, 2]);
        assert_eq!(p.block_start, vec![1, 3, 4]);
        assert_eq!(p.block_end, vec![2, 3]);
        assert_eq!(p.l, 2);

        let p = g(5, &[2]).index_profile();
        assert_eq!((p.d, p.c, p.e_prime, p.block_start, p.block_end, p.l), (
            vec![1],
            vec![1],
            vec![2],
            vec![1, 2],
            vec![1],
            1
        ));

        let p = g(3, &[3, 3, 3]).index_profile();
        assert_eq!((p.d, p.c, p.e_prime, p.block_start, p.block_end, p.l), (
            vec![3, 3, 3],
            vec![1, 1, 1],
            vec![3],
            vec![1, 4],
            vec![3],
            1
        ));
    }

    #[test]
    fn index_round_trip() {
        let h = g(2, &[1, 2, 3]);
        for (i, a) in h.elements().enumerate() {
            assert_eq!(h.index_of(&a), i);
        }
    }

    fn arb_group() -> impl Strategy<Value = AbelianPGroup> {
        (prop::sample::select(vec![2u64, 3, 5, 7]), prop::collection::vec(1u32..5, 1..6))
            .prop_map(|(p, e)| AbelianPGroup::new(p, &e).unwrap())
    }

    proptest! {
        #[test]
        fn profile_invariants(h in arb_group()) {
            let n = h.rank();
            let pr = h.index_profile();
            for k in 1..=n {
                prop_assert!(pr.d[k - 1] >= k);
                prop_assert!(pr.c[k - 1] <= k);
            }
            prop_assert!(pr.e_prime.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(pr.block_start[0], 1);
            prop_assert_eq!(pr.block_end[pr.l - 1], n);
            prop_assert_eq!(pr.block_start[pr.l], n + 1);
            for i in 1..pr.l {
                prop_assert_eq!(pr.block_start[i], pr.block_end[i - 1] + 1);
            }
            for i in 0..pr.l {
                let ci = pr.block_start[i];
                prop_assert_eq!(pr.c[ci - 1], ci);
                prop_assert_eq!(pr.d[ci - 1], pr.block_end[i]);
            }
            // c is constant on each block and strictly increases between blocks
            for k in 1..n {
                if pr.d[k - 1] == k {
                    prop_assert!(pr.c[k - 1] < pr.c[k]);
                } else {
                    prop_assert_eq!(pr.c[k - 1], pr.c[k]);
                }
            }
            let total: usize = (1..=pr.l).map(|i| pr.block_len(i)).sum();
            prop_assert_eq!(total, n);
        }

        #[test]
        fn add_laws(h in arb_group(), seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut pick = || AbelianElement {
                coords: h.moduli().iter().map(|&m| rng.gen_range(0..m)).collect(),
            };
            let (a, b, c) = (pick(), pick(), pick());
            let ab = h.add(&a, &b).unwrap();
            prop_assert_eq!(&ab, &h.add(&b, &a).unwrap());
            prop_assert_eq!(
                h.add(&ab, &c).unwrap(),
                h.add(&a, &h.add(&b, &c).unwrap()).unwrap()
            );
            let o = h.order_of(&a).unwrap();
            prop_assert!(h.moduli()[h.rank() - 1] % o == 0);
            prop_assert!(AbelianPGroup::is_zero(&h.scale(o as i128, &a).unwrap()));
        }
    }

    #[test]
    fn orders_exhaustive() {
        for (p, e) in [(2u64, vec![1u32, 2, 3]), (3, vec![1, 2, 2]), (5, vec![1, 2])] {
            let h = g(p, &e);
            let top = *h.moduli().last().unwrap();
            for a in h.elements() {
                let o = h.order_of(&a).unwrap();
                assert_eq!(top % o, 0);
                // least m with m * a = 0
                let brute = (1..=top).find(|&m| AbelianPGroup::is_zero(&h.scale_unchecked(m as i128, &a))).unwrap();
                assert_eq!(o, brute);
            }
        }
    }
}
