//! Central extensions `1 -> Z -> G -> Q -> 1` given by a normalized 2-cocycle,
//! and the lifting of restricted automorphisms of `Z` to automorphisms of `G`
//! that act trivially on `G/Z`.
//!
//! `Z` is written additively. Elements of `G` are pairs `(x, n)` with the law
//! `(x, n)(y, m) = (xy, mu(x, y) + n + m)`. The transversal is `t(x) = (x, 0)`,
//! so `t(x)t(y) = t(xy) + mu(x, y)` and `mu` is normalized.
//!
//! An automorphism of `G` fixing every coset of `Z` and acting as `theta` on
//! `Z` has the shape `gamma(x, n) = (x, chi(x) + theta(n))`. It is a
//! homomorphism iff for all `x, y`
//!
//! ```text
//! mu(x, y) - theta(mu(x, y)) = chi(xy) - chi(x) - chi(y)        (star)
//! ```
//!
//! For `theta = I + p B` satisfying the restricted congruences, setting
//! `chi(x) = B beta(x)` with `beta(x)` the coordinates of `t(x)^p` solves
//! (star) whenever `G` is p-central and p^2-abelian.

use std::collections::HashSet;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::abelian::{AbelianElement, AbelianPGroup, GroupDescriptor};
use crate::config::Bounds;
use crate::endomat::{count_abc, EndoMatrix, MatrixJson, RestrictedSpace};
use crate::error::{Error, Result};
use crate::table::TableGroup;

/// The quotient `Q = G/Z`, a validated multiplication table.
pub type QGroup = TableGroup;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GElement {
    pub x: usize,
    pub n: AbelianElement,
}

/// `mu: Q x Q -> Z` stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleTable {
    order: usize,
    values: Vec<AbelianElement>,
}

impl CocycleTable {
    pub fn new(order: usize, values: Vec<AbelianElement>) -> Result<Self> {
        if values.len() != order * order {
            return Err(Error::DimensionMismatch { expected: order * order, found: values.len() });
        }
        Ok(Self { order, values })
    }

    pub fn from_fn(order: usize, f: impl Fn(usize, usize) -> AbelianElement) -> Self {
        let values = (0..order * order).map(|k| f(k / order, k % order)).collect();
        Self { order, values }
    }

    pub fn zero(order: usize, z: &AbelianPGroup) -> Self {
        Self::from_fn(order, |_, _| z.zero())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> &AbelianElement {
        &self.values[x * self.order + y]
    }

    pub fn set(&mut self, x: usize, y: usize, v: AbelianElement) {
        self.values[x * self.order + y] = v;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum CheckMode {
    /// Every element or pair of `G` was examined.
    Exhaustive,
    /// Exact, but evaluated on coset representatives using that `Z` is central.
    QuotientReduced,
    /// Random pairs only.
    Sampled { pairs: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    pub p_central: bool,
    pub p2_abelian: bool,
    pub center_is_z: bool,
    pub mode: CheckMode,
}

impl Hypotheses {
    pub fn all_hold(&self) -> bool {
        self.p_central && self.p2_abelian && self.center_is_z
    }

    fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.p_central {
            out.push("G is not p-central".to_string());
        }
        if !self.p2_abelian {
            out.push("G is not p^2-abelian".to_string());
        }
        if !self.center_is_z {
            out.push("Z(G) is larger than the central factor".to_string());
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct CenterReport {
    pub elements: Vec<GElement>,
    /// Whether the center is exactly `{(1, n)}`.
    pub equals_z_factor: bool,
}

/// Coordinates of the terms in `alpha p^2 = (beta + gamma + delta) p + k p^e`,
/// where `alpha = mu(x, y)`, `beta, gamma` are `t(x)^p, t(y)^p` and `delta`
/// is `t(xy)^(-p)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarCoefficients {
    pub alpha: Vec<u64>,
    pub beta: Vec<u64>,
    pub gamma: Vec<u64>,
    pub delta: Vec<u64>,
    pub k: Vec<i128>,
}

impl StarCoefficients {
    /// The integer identity, checked coordinatewise without reduction.
    pub fn holds(&self, z: &AbelianPGroup) -> bool {
        let p = z.p() as i128;
        (0..z.rank()).all(|i| {
            let lhs = self.alpha[i] as i128 * p * p;
            let sum = self.beta[i] as i128 + self.gamma[i] as i128 + self.delta[i] as i128;
            lhs == sum * p + self.k[i] * z.moduli()[i] as i128
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AutVerification {
    pub star_identity: bool,
    pub homomorphism: bool,
    pub bijective: bool,
    pub identity_on_quotient: bool,
    pub restricts_to_theta: bool,
    pub mode: CheckMode,
}

impl AutVerification {
    pub fn passed(&self) -> bool {
        self.star_identity
            && self.homomorphism
            && self.bijective
            && self.identity_on_quotient
            && self.restricts_to_theta
    }
}

/// `gamma(x, n) = (x, chi(x) + theta(n))`.
#[derive(Clone)]
pub struct GAutomorphism {
    pub theta: EndoMatrix,
    pub chi: Vec<AbelianElement>,
    pub verification: Option<AutVerification>,
}

impl PartialEq for GAutomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.theta == other.theta && self.chi == other.chi
    }
}

impl Eq for GAutomorphism {}

impl std::hash::Hash for GAutomorphism {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.theta.hash(state);
        self.chi.hash(state);
    }
}

impl fmt::Debug for GAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GAutomorphism").field("theta", &self.theta).field("chi", &self.chi).finish()
    }
}

impl GAutomorphism {
    pub fn identity(g: &CentralExtensionGroup) -> Self {
        Self {
            theta: EndoMatrix::identity(&g.z),
            chi: vec![g.z.zero(); g.q.order()],
            verification: None,
        }
    }

    pub fn apply(&self, g: &CentralExtensionGroup, a: &GElement) -> GElement {
        let mut n = self.theta.apply_unchecked(&a.n);
        g.z.add_assign_unchecked(&mut n, &self.chi[a.x]);
        GElement { x: a.x, n }
    }

    /// `self o other`: apply `other` first.
    pub fn compose(&self, g: &CentralExtensionGroup, other: &GAutomorphism) -> GAutomorphism {
        let chi = self
            .chi
            .iter()
            .zip(&other.chi)
            .map(|(c1, c2)| g.z.add_unchecked(c1, &self.theta.apply_unchecked(c2)))
            .collect();
        GAutomorphism { theta: self.theta.compose_unchecked(&other.theta), chi, verification: None }
    }

    pub fn is_identity(&self) -> bool {
        self.theta.is_identity() && self.chi.iter().all(AbelianPGroup::is_zero)
    }

    /// Order under composition, if at most `cap`.
    pub fn order(&self, g: &CentralExtensionGroup, cap: u64) -> Option<u64> {
        let mut acc = self.clone();
        for k in 1..=cap {
            if acc.is_identity() {
                return Some(k);
            }
            acc = acc.compose(g, self);
        }
        None
    }
}

/// Extension JSON, e.g.
/// `{"p": 3, "q": {"type": "elementary", "rank": 2}, "z": {"p": 3, "exponents": [3]},
///   "cocycle": {"type": "bilinear", "scale": 9, "matrix": [[0, 0], [1, 0]]}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtensionJson {
    pub p: u64,
    pub q: QSpec,
    pub z: GroupDescriptor,
    pub cocycle: CocycleSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum QSpec {
    /// `(Z/p)^rank`; element `i` has coordinates the base-`p` digits of `i`,
    /// least significant first.
    Elementary { rank: usize },
    Cyclic { order: usize },
    Table {
        table: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum CocycleSpec {
    /// `mu(x, y) = (x^T B y) * scale` for `Q` elementary abelian.
    Bilinear { scale: ElementSpec, matrix: Vec<Vec<i64>> },
    Table { entries: Vec<Vec<ElementSpec>> },
    Zero,
}

/// An element of `Z`: a coordinate list, or an integer meaning that value in
/// every coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementSpec {
    Scalar(i64),
    Coords(Vec<i64>),
}

impl ElementSpec {
    fn build(&self, z: &AbelianPGroup) -> Result<AbelianElement> {
        match self {
            ElementSpec::Scalar(s) => z.element(&vec![*s as i128; z.rank()]),
            ElementSpec::Coords(c) => z.element(&c.iter().map(|&x| x as i128).collect::<Vec<_>>()),
        }
    }
}

/// Digits of `i` in base `p`, least significant first.
pub fn elementary_coords(p: u64, rank: usize, mut i: usize) -> Vec<u64> {
    (0..rank)
        .map(|_| {
            let d = (i % p as usize) as u64;
            i /= p as usize;
            d
        })
        .collect()
}

/// `(Z/p)^rank` as a table.
pub fn elementary_abelian(p: u64, rank: usize) -> Result<QGroup> {
    let order = (p as usize).pow(rank as u32);
    let labels = (0..order)
        .map(|i| {
            let c: Vec<String> = elementary_coords(p, rank, i).iter().map(|d| d.to_string()).collect();
            format!("({})", c.join(","))
        })
        .collect();
    TableGroup::from_fn(order, Some(labels), |a, b| {
        let (ca, cb) = (elementary_coords(p, rank, a), elementary_coords(p, rank, b));
        ca.iter().zip(&cb).rev().fold(0, |acc, (x, y)| acc * p as usize + ((x + y) % p) as usize)
    })
}

impl ExtensionJson {
    pub fn build(&self) -> Result<CentralExtensionGroup> {
        let z = self.z.build()?;
        if z.p() != self.p {
            return Err(Error::InvalidInput(format!("p = {} but Z has p = {}", self.p, z.p())));
        }
        let q = match &self.q {
            QSpec::Elementary { rank } => elementary_abelian(self.p, *rank)?,
            QSpec::Cyclic { order } => TableGroup::from_fn(*order, None, |a, b| (a + b) % order)?,
            QSpec::Table { table, labels } => TableGroup::new(table.clone(), labels.clone())?,
        };
        let qn = q.order();
        let mu = match &self.cocycle {
            CocycleSpec::Zero => CocycleTable::zero(qn, &z),
            CocycleSpec::Table { entries } => {
                if entries.len() != qn {
                    return Err(Error::DimensionMismatch { expected: qn, found: entries.len() });
                }
                let mut values = Vec::with_capacity(qn * qn);
                for row in entries {
                    if row.len() != qn {
                        return Err(Error::DimensionMismatch { expected: qn, found: row.len() });
                    }
                    for e in row {
                        values.push(e.build(&z)?);
                    }
                }
                CocycleTable::new(qn, values)?
            }
            CocycleSpec::Bilinear { scale, matrix } => {
                let QSpec::Elementary { rank } = self.q else {
                    return Err(Error::InvalidInput("bilinear cocycle needs an elementary abelian Q".into()));
                };
                if matrix.len() != rank || matrix.iter().any(|r| r.len() != rank) {
                    return Err(Error::DimensionMismatch { expected: rank, found: matrix.len() });
                }
                let scale = scale.build(&z)?;
                let p = self.p;
                CocycleTable::from_fn(qn, |a, b| {
                    let (x, y) = (elementary_coords(p, rank, a), elementary_coords(p, rank, b));
                    let mut form = 0i128;
                    for i in 0..rank {
                        for j in 0..rank {
                            form += x[i] as i128 * matrix[i][j] as i128 * y[j] as i128;
                        }
                    }
                    z.scale_unchecked(form, &scale)
                })
            }
        };
        CentralExtensionGroup::new(q, z, mu)
    }
}

/// A central extension of `Z` by `Q` with normalized cocycle `mu`.
#[derive(Clone)]
pub struct CentralExtensionGroup {
    q: QGroup,
    z: AbelianPGroup,
    mu: CocycleTable,
    hypotheses: OnceLock<Hypotheses>,
}

impl fmt::Debug for CentralExtensionGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CentralExtensionGroup(|Q| = {}, Z = {})", self.q.order(), self.z)
    }
}

impl CentralExtensionGroup {
    /// Validates normalization and the 2-cocycle identity
    /// `mu(x, y) + mu(xy, w) = mu(y, w) + mu(x, yw)` on all triples.
    pub fn new(q: QGroup, z: AbelianPGroup, mu: CocycleTable) -> Result<Self> {
        let qn = q.order();
        if mu.order() != qn {
            return Err(Error::DimensionMismatch { expected: qn, found: mu.order() });
        }
        if let Some(bad) = mu.values.iter().find(|v| !z.contains(v)) {
            return Err(Error::InvalidInput(format!("cocycle value {bad} is not an element of {z}")));
        }
        let e = q.identity();
        for x in 0..qn {
            if !AbelianPGroup::is_zero(mu.get(e, x)) {
                return Err(Error::NotNormalized { x: e, y: x });
            }
            if !AbelianPGroup::is_zero(mu.get(x, e)) {
                return Err(Error::NotNormalized { x, y: e });
            }
        }
        for x in 0..qn {
            for y in 0..qn {
                let xy = q.mul(x, y);
                for w in 0..qn {
                    let lhs = z.add_unchecked(mu.get(x, y), mu.get(xy, w));
                    let rhs = z.add_unchecked(mu.get(y, w), mu.get(x, q.mul(y, w)));
                    if lhs != rhs {
                        return Err(Error::CocycleIdentityFailed { x, y, z: w });
                    }
                }
            }
        }
        Ok(Self { q, z, mu, hypotheses: OnceLock::new() })
    }

    pub fn p(&self) -> u64 {
        self.z.p()
    }

    pub fn quotient(&self) -> &QGroup {
        &self.q
    }

    pub fn center_factor(&self) -> &AbelianPGroup {
        &self.z
    }

    pub fn cocycle(&self) -> &CocycleTable {
        &self.mu
    }

    pub fn order(&self) -> BigUint {
        self.z.order() * BigUint::from(self.q.order())
    }

    pub fn order_usize(&self) -> Option<usize> {
        self.z.order_usize()?.checked_mul(self.q.order())
    }

    fn z_order(&self) -> usize {
        self.z.order_usize().expect("Z too large to index")
    }

    /// `|G|` if it is at most `bound`.
    pub fn within(&self, bound: u64) -> Result<usize> {
        match self.order_usize() {
            Some(m) if m as u64 <= bound => Ok(m),
            _ => Err(Error::GroupTooLarge { order: self.order().to_string(), bound }),
        }
    }

    pub fn identity(&self) -> GElement {
        GElement { x: self.q.identity(), n: self.z.zero() }
    }

    /// Transversal element `t(x) = (x, 0)`.
    pub fn t(&self, x: usize) -> GElement {
        GElement { x, n: self.z.zero() }
    }

    pub fn central(&self, n: AbelianElement) -> GElement {
        GElement { x: self.q.identity(), n }
    }

    pub fn mul(&self, a: &GElement, b: &GElement) -> GElement {
        let mut n = self.z.add_unchecked(self.mu.get(a.x, b.x), &a.n);
        self.z.add_assign_unchecked(&mut n, &b.n);
        GElement { x: self.q.mul(a.x, b.x), n }
    }

    pub fn inv(&self, a: &GElement) -> GElement {
        let xi = self.q.inv(a.x);
        let s = self.z.add_unchecked(&a.n, self.mu.get(a.x, xi));
        GElement { x: xi, n: self.z.neg_unchecked(&s) }
    }

    pub fn pow(&self, a: &GElement, mut k: u64) -> GElement {
        let mut acc = self.identity();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    pub fn is_central_factor(&self, a: &GElement) -> bool {
        a.x == self.q.identity()
    }

    pub fn index_of(&self, a: &GElement) -> usize {
        a.x * self.z_order() + self.z.index_of(&a.n)
    }

    pub fn element_at(&self, i: usize) -> GElement {
        let zo = self.z_order();
        GElement { x: i / zo, n: self.z.element_at(i % zo) }
    }

    pub fn elements(&self) -> impl Iterator<Item = GElement> + '_ {
        let m = self.order_usize().expect("group too large to list");
        (0..m).map(move |i| self.element_at(i))
    }

    pub fn label(&self, a: &GElement) -> String {
        format!("({}, {})", self.q.label(a.x), a.n)
    }

    /// Exact center by testing every pair for commutation.
    pub fn center_of(&self, bound: u64) -> Result<CenterReport> {
        self.within(bound)?;
        let all: Vec<GElement> = self.elements().collect();
        let elements: Vec<GElement> = all
            .iter()
            .filter(|a| all.iter().all(|b| self.mul(a, b) == self.mul(b, a)))
            .cloned()
            .collect();
        let equals_z_factor =
            elements.len() == self.z_order() && elements.iter().all(|a| self.is_central_factor(a));
        Ok(CenterReport { elements, equals_z_factor })
    }

    /// `g^p` lies in the center for every `g`, with the center computed exactly.
    pub fn is_p_central(&self, bound: u64) -> Result<bool> {
        let center: HashSet<GElement> = self.center_of(bound)?.elements.into_iter().collect();
        Ok(self.elements().all(|g| center.contains(&self.pow(&g, self.p()))))
    }

    /// `(ab)^(p^2) = a^(p^2) b^(p^2)` for every ordered pair.
    pub fn is_p2_abelian(&self, bound: u64) -> Result<bool> {
        self.within(bound)?;
        let p2 = self.p() * self.p();
        let all: Vec<GElement> = self.elements().collect();
        let powers: Vec<GElement> = all.iter().map(|a| self.pow(a, p2)).collect();
        Ok(all.iter().zip(&powers).all(|(a, ap)| {
            all.iter()
                .zip(&powers)
                .all(|(b, bp)| self.pow(&self.mul(a, b), p2) == self.mul(ap, bp))
        }))
    }

    fn t_commutes_with_all(&self, x: usize) -> bool {
        let tx = self.t(x);
        (0..self.q.order()).all(|y| {
            let ty = self.t(y);
            self.mul(&tx, &ty) == self.mul(&ty, &tx)
        })
    }

    /// The three hypotheses computed from coset representatives. Since
    /// `(1, n)` is central by construction, `(x, n)` is central iff `t(x)`
    /// is, `(x, n)^p` is central iff `t(x)^p` is, and the p^2-abelian
    /// identity reduces to pairs of representatives.
    fn hypotheses_reduced(&self) -> Hypotheses {
        let qn = self.q.order();
        let p = self.p();
        let central: Vec<bool> = (0..qn).map(|x| self.t_commutes_with_all(x)).collect();
        let center_is_z = (0..qn).all(|x| x == self.q.identity() || !central[x]);
        let p_central = (0..qn).all(|x| central[self.pow(&self.t(x), p).x]);
        let p2 = p * p;
        let tp2: Vec<GElement> = (0..qn).map(|x| self.pow(&self.t(x), p2)).collect();
        let p2_abelian = (0..qn).all(|x| {
            (0..qn).all(|y| {
                self.pow(&self.mul(&self.t(x), &self.t(y)), p2) == self.mul(&tp2[x], &tp2[y])
            })
        });
        Hypotheses { p_central, p2_abelian, center_is_z, mode: CheckMode::QuotientReduced }
    }

    fn hypotheses_exhaustive(&self, bound: u64) -> Result<Hypotheses> {
        Ok(Hypotheses {
            p_central: self.is_p_central(bound)?,
            p2_abelian: self.is_p2_abelian(bound)?,
            center_is_z: self.center_of(bound)?.equals_z_factor,
            mode: CheckMode::Exhaustive,
        })
    }

    /// Computes and caches p-central, p^2-abelian and `Z(G) = Z`: exhaustively
    /// when `|G|` is within the exhaustion bound, on coset representatives
    /// otherwise.
    pub fn verify_hypotheses(&self, bounds: &Bounds) -> &Hypotheses {
        self.hypotheses.get_or_init(|| match self.hypotheses_exhaustive(bounds.exhaustion) {
            Ok(h) => h,
            Err(_) => self.hypotheses_reduced(),
        })
    }

    /// Cached hypotheses, if [`Self::verify_hypotheses`] has run.
    pub fn hypotheses(&self) -> Option<&Hypotheses> {
        self.hypotheses.get()
    }

    /// Reduced-mode hypotheses regardless of size; used to cross-check the
    /// exhaustive route.
    pub fn hypotheses_from_representatives(&self) -> Hypotheses {
        self.hypotheses_reduced()
    }

    fn require_verified(&self) -> Result<&Hypotheses> {
        let h = self.hypotheses().ok_or(Error::PreconditionNotChecked)?;
        if !(h.p_central && h.p2_abelian) {
            return Err(Error::HypothesisViolation(h.failures()));
        }
        Ok(h)
    }

    /// First pair violating `mu(x,y)^(p^2) = t(x)^(p^2) t(y)^(p^2) t(xy)^(-p^2)`,
    /// all evaluated as powers in `G`.
    pub fn dagger_witness(&self) -> Result<Option<(usize, usize)>> {
        self.require_verified()?;
        let qn = self.q.order();
        let p2 = self.p() * self.p();
        let tp2: Vec<GElement> = (0..qn).map(|x| self.pow(&self.t(x), p2)).collect();
        for x in 0..qn {
            for y in 0..qn {
                let lhs = self.pow(&self.central(self.mu.get(x, y).clone()), p2);
                let xy = self.q.mul(x, y);
                let rhs = self.mul(&self.mul(&tp2[x], &tp2[y]), &self.inv(&tp2[xy]));
                if lhs != rhs {
                    return Ok(Some((x, y)));
                }
            }
        }
        Ok(None)
    }

    pub fn dagger_check(&self) -> Result<bool> {
        Ok(self.dagger_witness()?.is_none())
    }

    /// Coordinates `beta(x)` of `t(x)^p`, which must lie in the central factor.
    pub fn p_power_coords(&self, x: usize) -> Result<AbelianElement> {
        let tp = self.pow(&self.t(x), self.p());
        if !self.is_central_factor(&tp) {
            return Err(Error::NotPCentral(format!("t({})^p = {} is not in Z", self.q.label(x), self.label(&tp))));
        }
        Ok(tp.n)
    }

    pub fn star_coefficients(&self, x: usize, y: usize) -> Result<StarCoefficients> {
        let xy = self.q.mul(x, y);
        let alpha = self.mu.get(x, y).coords.clone();
        let beta = self.p_power_coords(x)?.coords;
        let gamma = self.p_power_coords(y)?.coords;
        let delta = self.z.neg_unchecked(&self.p_power_coords(xy)?).coords;
        let p = self.p() as i128;
        let k = (0..self.z.rank())
            .map(|i| {
                let lhs = alpha[i] as i128 * p * p;
                let sum = (beta[i] + gamma[i] + delta[i]) as i128 * p;
                (lhs - sum).div_euclid(self.z.moduli()[i] as i128)
            })
            .collect();
        Ok(StarCoefficients { alpha, beta, gamma, delta, k })
    }

    fn check_theta(&self, theta: &EndoMatrix) -> Result<()> {
        if theta.group() != &self.z {
            return Err(Error::DimensionMismatch { expected: self.z.rank(), found: theta.group().rank() });
        }
        Ok(())
    }

    fn require_odd(&self) -> Result<()> {
        if self.p() == 2 {
            return Err(Error::EvenPrime(2));
        }
        Ok(())
    }

    /// `chi(x) = B beta(x)` with `B = (A - I)/p`: diagonal `s_i p^(r_i - 1)`,
    /// off-diagonal `a_ij / p`, and `beta(x)` the coordinates of `t(x)^p`.
    pub fn construct_chi(&self, theta: &EndoMatrix) -> Result<Vec<AbelianElement>> {
        self.require_odd()?;
        self.check_theta(theta)?;
        let params = theta.decompose_diagonal()?;
        let p = self.p();
        let n = self.z.rank();
        let mut b = vec![vec![0u64; n]; n];
        for i in 0..n {
            for j in 0..n {
                let a = theta.entry(i, j);
                b[i][j] = if i == j {
                    let d = params.diagonal[i];
                    let v = d.s * p.pow(d.r - 1);
                    assert_eq!(v * p, a - 1, "diagonal decomposition disagrees with entry");
                    v
                } else if a % p == 0 {
                    a / p
                } else {
                    return Err(Error::DivisionImpossible(format!("a_{}{} = {a}", i + 1, j + 1)));
                };
            }
        }
        (0..self.q.order())
            .map(|x| {
                let beta = self.p_power_coords(x)?;
                let coords = (0..n)
                    .map(|i| {
                        let m = self.z.moduli()[i] as u128;
                        (0..n).fold(0u128, |acc, j| (acc + (b[i][j] as u128 * beta.coords[j] as u128) % m) % m) as u64
                    })
                    .collect();
                Ok(AbelianElement { coords })
            })
            .collect()
    }

    /// First pair violating `mu - theta(mu) = chi(xy) - chi(x) - chi(y)`;
    /// `Some((1, 1))`-style witnesses are also returned for malformed input.
    pub fn star_witness(&self, theta: &EndoMatrix, chi: &[AbelianElement]) -> Option<(usize, usize)> {
        let e = self.q.identity();
        if theta.group() != &self.z || chi.len() != self.q.order() || !AbelianPGroup::is_zero(&chi[e]) {
            return Some((e, e));
        }
        let qn = self.q.order();
        for x in 0..qn {
            for y in 0..qn {
                let mu = self.mu.get(x, y);
                let lhs = self.z.add_unchecked(mu, &self.z.neg_unchecked(&theta.apply_unchecked(mu)));
                let rhs = self.z.add_unchecked(
                    &chi[self.q.mul(x, y)],
                    &self.z.neg_unchecked(&self.z.add_unchecked(&chi[x], &chi[y])),
                );
                if lhs != rhs {
                    return Some((x, y));
                }
            }
        }
        None
    }

    pub fn verify_star(&self, theta: &EndoMatrix, chi: &[AbelianElement]) -> bool {
        self.star_witness(theta, chi).is_none()
    }

    /// Checks `gamma` as a map on `G`; exhaustive over pairs when `|G|` is
    /// within the exhaustion bound, otherwise `bounds.sample_pairs` random pairs.
    pub fn verify_automorphism(&self, gamma: &GAutomorphism, bounds: &Bounds) -> AutVerification {
        let star_identity = self.verify_star(&gamma.theta, &gamma.chi);
        let on_z = |n: AbelianElement| {
            gamma.apply(self, &self.central(n.clone())) == self.central(gamma.theta.apply_unchecked(&n))
        };
        // gamma is additive on the central factor once (star) holds, so the
        // basis suffices beyond the exhaustion bound
        let restricts_to_theta = if self.z.order() <= BigUint::from(bounds.exhaustion) {
            self.z.elements().all(on_z)
        } else {
            (0..self.z.rank()).all(|i| on_z(self.z.basis(i)))
        };
        match self.within(bounds.exhaustion) {
            Ok(_) => {
                let all: Vec<GElement> = self.elements().collect();
                let images: Vec<GElement> = all.iter().map(|a| gamma.apply(self, a)).collect();
                let identity_on_quotient = all.iter().zip(&images).all(|(a, b)| a.x == b.x);
                let bijective = images.iter().collect::<HashSet<_>>().len() == all.len();
                let homomorphism = (0..all.len()).all(|i| {
                    (0..all.len()).all(|j| {
                        gamma.apply(self, &self.mul(&all[i], &all[j])) == self.mul(&images[i], &images[j])
                    })
                });
                AutVerification {
                    star_identity,
                    homomorphism,
                    bijective,
                    identity_on_quotient,
                    restricts_to_theta,
                    mode: CheckMode::Exhaustive,
                }
            }
            Err(_) => {
                let mut rng = ChaCha8Rng::seed_from_u64(bounds.seed);
                let random = |rng: &mut ChaCha8Rng| GElement {
                    x: rng.gen_range(0..self.q.order()),
                    n: AbelianElement {
                        coords: self.z.moduli().iter().map(|&m| rng.gen_range(0..m)).collect(),
                    },
                };
                let mut homomorphism = true;
                let mut identity_on_quotient = true;
                for _ in 0..bounds.sample_pairs {
                    let (a, b) = (random(&mut rng), random(&mut rng));
                    let (ga, gb) = (gamma.apply(self, &a), gamma.apply(self, &b));
                    identity_on_quotient &= ga.x == a.x;
                    homomorphism &= gamma.apply(self, &self.mul(&a, &b)) == self.mul(&ga, &gb);
                }
                AutVerification {
                    star_identity,
                    homomorphism,
                    // the first coordinate is fixed, so gamma is bijective iff theta is
                    bijective: gamma.theta.is_automorphism(),
                    identity_on_quotient,
                    restricts_to_theta,
                    mode: CheckMode::Sampled { pairs: bounds.sample_pairs },
                }
            }
        }
    }

    fn require_hypotheses(&self, bounds: &Bounds) -> Result<()> {
        let h = self.verify_hypotheses(bounds);
        if !h.all_hold() {
            return Err(Error::HypothesisViolation(h.failures()));
        }
        Ok(())
    }

    /// Lifts a restricted `theta` to `gamma(x, n) = (x, chi(x) + theta(n))`.
    pub fn extend_automorphism(&self, theta: &EndoMatrix, bounds: &Bounds) -> Result<GAutomorphism> {
        self.require_odd()?;
        self.check_theta(theta)?;
        if !theta.satisfies_abc() {
            theta.decompose_diagonal()?;
        }
        self.require_hypotheses(bounds)?;
        let chi = self.construct_chi(theta)?;
        let mut gamma = GAutomorphism { theta: theta.clone(), chi, verification: None };
        let v = self.verify_automorphism(&gamma, bounds);
        if !v.passed() {
            return Err(Error::HomomorphismCheckFailed(format!("{v:?} for theta = {theta}")));
        }
        gamma.verification = Some(v);
        Ok(gamma)
    }

    /// One lift per restricted `theta`, in enumeration order (identity first).
    pub fn extension_family(&self, bounds: &Bounds) -> Result<Vec<GAutomorphism>> {
        self.require_odd()?;
        let size = count_abc(&self.z)?;
        if size > BigUint::from(bounds.enumeration) {
            return Err(Error::EnumerationTooLarge { size: size.to_string(), bound: bounds.enumeration });
        }
        self.require_hypotheses(bounds)?;
        // per-member whole-group checks are expensive beyond the exhaustion
        // bound, so sampled members get a proportionally smaller budget
        let per_member = Bounds {
            sample_pairs: (bounds.sample_pairs / size.to_u64_digits().first().copied().unwrap_or(1) as usize).max(16),
            ..*bounds
        };
        let mut family: Vec<GAutomorphism> = RestrictedSpace::new(&self.z)
            .iter()
            .map(|theta| self.extend_automorphism(&theta, &per_member))
            .collect::<Result<_>>()?;
        if let Some(pos) = family.iter().position(|g| g.theta.is_identity()) {
            family.swap(0, pos);
        }
        Ok(family)
    }

    pub fn to_json(&self) -> ExtensionJson {
        let qn = self.q.order();
        let table = (0..qn).map(|a| (0..qn).map(|b| self.q.mul(a, b)).collect()).collect();
        let entries = (0..qn)
            .map(|x| {
                (0..qn)
                    .map(|y| ElementSpec::Coords(self.mu.get(x, y).coords.iter().map(|&c| c as i64).collect()))
                    .collect()
            })
            .collect();
        ExtensionJson {
            p: self.p(),
            q: QSpec::Table { table, labels: Some(self.q.labels().to_vec()) },
            z: self.z.descriptor(),
            cocycle: CocycleSpec::Table { entries },
        }
    }
}

/// JSON report for one lifted automorphism.
#[derive(Clone, Debug, Serialize)]
pub struct AutomorphismReport {
    pub theta: MatrixJson,
    pub chi: Vec<Vec<u64>>,
    pub verified: VerifiedFlags,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifiedFlags {
    pub homomorphism: bool,
    pub identity_on_quotient: bool,
    /// `None` when no inner-automorphism list was available.
    pub non_inner: Option<bool>,
    pub star_identity: bool,
    pub mode: CheckMode,
}

impl GAutomorphism {
    pub fn report(&self, non_inner: Option<bool>) -> AutomorphismReport {
        let v = self.verification.clone().unwrap_or(AutVerification {
            star_identity: false,
            homomorphism: false,
            bijective: false,
            identity_on_quotient: false,
            restricts_to_theta: false,
            mode: CheckMode::Sampled { pairs: 0 },
        });
        AutomorphismReport {
            theta: self.theta.to_json(),
            chi: self.chi.iter().map(|c| c.coords.clone()).collect(),
            verified: VerifiedFlags {
                homomorphism: v.homomorphism && v.bijective,
                identity_on_quotient: v.identity_on_quotient,
                non_inner,
                star_identity: v.star_identity,
                mode: v.mode,
            },
        }
    }
}
