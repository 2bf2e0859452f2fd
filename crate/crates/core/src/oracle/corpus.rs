//! Bundled test groups with their constructions.

use crate::abelian::{AbelianPGroup, GroupDescriptor};
use crate::error::{Error, Result};
use crate::extension::{
    elementary_abelian, CentralExtensionGroup, CocycleSpec, CocycleTable, ElementSpec, ExtensionJson, QSpec,
};
use crate::table::TableGroup;

use super::{direct_product, table_from_abelian, table_from_extension};

pub fn cyclic(n: usize) -> TableGroup {
    TableGroup::from_fn(n, None, |a, b| (a + b) % n).expect("cyclic group")
}

pub fn elementary(p: u64, rank: usize) -> TableGroup {
    elementary_abelian(p, rank).expect("elementary abelian group")
}

/// Unitriangular 3x3 matrices over F_p as triples `(a, b, c)` with
/// `(a, b, c)(a', b', c') = (a + a', b + b', c + c' + a b')`.
pub fn heisenberg(p: usize) -> TableGroup {
    let enc = |a: usize, b: usize, c: usize| (a % p) + p * (b % p) + p * p * (c % p);
    let dec = |x: usize| (x % p, (x / p) % p, x / (p * p));
    let labels = (0..p * p * p)
        .map(|x| {
            let (a, b, c) = dec(x);
            format!("[{a},{b},{c}]")
        })
        .collect();
    TableGroup::from_fn(p * p * p, Some(labels), |x, y| {
        let ((a, b, c), (d, e, f)) = (dec(x), dec(y));
        enc(a + d, b + e, c + f + a * e)
    })
    .expect("heisenberg group")
}

/// `<a, b | a^(p^2), b^p, b a b^-1 = a^(1+p)>` as pairs `a^i b^j` with
/// `(a^i b^j)(a^k b^l) = a^(i + k(1+p)^j) b^(j+l)`.
pub fn modular(p: usize) -> TableGroup {
    let n = p * p;
    let twist: Vec<usize> = (0..p).scan(1usize, |acc, _| {
        let v = *acc;
        *acc = *acc * (1 + p) % n;
        Some(v)
    })
    .collect();
    let labels = (0..n * p).map(|x| format!("a^{} b^{}", x % n, x / n)).collect();
    TableGroup::from_fn(n * p, Some(labels), |x, y| {
        let ((i, j), (k, l)) = ((x % n, x / n), (y % n, y / n));
        (i + k * twist[j]) % n + n * ((j + l) % p)
    })
    .expect("modular group")
}

/// `<r, s | r^m, s^2, s r s = r^-1>` as pairs `r^i s^j`.
pub fn dihedral(m: usize) -> TableGroup {
    let labels = (0..2 * m).map(|x| format!("r^{} s^{}", x % m, x / m)).collect();
    TableGroup::from_fn(2 * m, Some(labels), |x, y| {
        let ((i, j), (k, l)) = ((x % m, x / m), (y % m, y / m));
        let k = if j == 1 { (m - k) % m } else { k };
        (i + k) % m + m * ((j + l) % 2)
    })
    .expect("dihedral group")
}

/// `<a, b | a^(2m), b^2 = a^m, b a b^-1 = a^-1>` as pairs `a^i b^j`.
pub fn quaternion(m: usize) -> TableGroup {
    let n = 2 * m;
    let labels = (0..2 * n).map(|x| format!("a^{} b^{}", x % n, x / n)).collect();
    TableGroup::from_fn(2 * n, Some(labels), |x, y| {
        let ((i, j), (k, l)) = ((x % n, x / n), (y % n, y / n));
        let k = if j == 1 { (n - k) % n } else { k };
        if j == 1 && l == 1 {
            (i + k + m) % n
        } else {
            (i + k) % n + n * (j + l)
        }
    })
    .expect("generalized quaternion group")
}

/// `C_p wr C_p`: pairs `(v, s)` with `v` in `(Z/p)^p` and `s` a cyclic
/// shift, `(v, s)(w, t) = (v + s.w, s + t)` where `(s.w)_i = w_(i-s)`.
pub fn wreath(p: usize) -> TableGroup {
    let base = p.pow(p as u32);
    let digits = |mut v: usize| -> Vec<usize> {
        (0..p)
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    };
    TableGroup::from_fn(base * p, None, |x, y| {
        let (v, s) = (digits(x % base), x / base);
        let (w, t) = (digits(y % base), y / base);
        let sum = (0..p).rev().fold(0, |acc, i| acc * p + (v[i] + w[(i + p - s) % p]) % p);
        sum + base * ((s + t) % p)
    })
    .expect("wreath product")
}

/// `p = 3`, `Q = (Z/3)^2`, `Z = Z/27`, `mu(x, y) = 9 x_2 y_1`.
pub fn e1_json() -> ExtensionJson {
    ExtensionJson {
        p: 3,
        q: QSpec::Elementary { rank: 2 },
        z: GroupDescriptor { p: 3, exponents: vec![3] },
        cocycle: CocycleSpec::Bilinear { scale: ElementSpec::Scalar(9), matrix: vec![vec![0, 0], vec![1, 0]] },
    }
}

pub fn e1() -> CentralExtensionGroup {
    e1_json().build().expect("E1 is a valid extension")
}

/// Same `Q` and `Z` as [`e1`], with the carry cocycle on the first
/// coordinate added, so that `t((1,0))^3` is a generator of `Z`:
/// `mu(x, y) = [x_1 + y_1 >= 3] + 9 x_2 y_1`.
pub fn e2() -> CentralExtensionGroup {
    let q = elementary(3, 2);
    let z = AbelianPGroup::new(3, &[3]).expect("Z/27");
    let mu = CocycleTable::from_fn(9, |a, b| {
        let (x1, x2, y1) = (a % 3, a / 3, b % 3);
        let carry = (x1 + y1 >= 3) as i128;
        z.element(&[carry + 9 * (x2 * y1) as i128]).expect("in range")
    });
    CentralExtensionGroup::new(q, z, mu).expect("E2 is a valid extension")
}

pub fn e2_json() -> ExtensionJson {
    e2().to_json()
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &[
    "cyclic8", "cyclic9", "cyclic27", "elementary8", "elementary9", "elementary27", "q8", "dihedral8", "d16",
    "q16", "heisenberg27", "modular27", "heisenberg125", "modular125", "wreath81", "heisenberg27xc3",
    "modular27xc3", "q8xc2", "dihedral8xc2", "e1", "e2",
];

pub fn builtin(name: &str) -> Result<TableGroup> {
    let t = match name {
        "cyclic8" => cyclic(8),
        "cyclic9" => cyclic(9),
        "cyclic27" => cyclic(27),
        "elementary8" => elementary(2, 3),
        "elementary9" => elementary(3, 2),
        "elementary27" => elementary(3, 3),
        "q8" => quaternion(2),
        "dihedral8" | "d8" => dihedral(4),
        "d16" => dihedral(8),
        "q16" => quaternion(4),
        "heisenberg27" => heisenberg(3),
        "modular27" => modular(3),
        "heisenberg125" => heisenberg(5),
        "modular125" => modular(5),
        "wreath81" => wreath(3),
        "heisenberg27xc3" => direct_product(&heisenberg(3), &cyclic(3))?,
        "modular27xc3" => direct_product(&modular(3), &cyclic(3))?,
        "q8xc2" => direct_product(&quaternion(2), &cyclic(2))?,
        "dihedral8xc2" => direct_product(&dihedral(4), &cyclic(2))?,
        "e1" => table_from_extension(&e1(), 750)?,
        "e2" => table_from_extension(&e2(), 750)?,
        _ => return Err(Error::InvalidInput(format!("unknown builtin group {name:?}"))),
    };
    Ok(t)
}

/// The prime of a bundled group.
pub fn builtin_prime(name: &str) -> Option<u64> {
    let t = builtin(name).ok()?;
    [2u64, 3, 5].into_iter().find(|&p| {
        let mut m = t.order();
        while m % p as usize == 0 {
            m /= p as usize;
        }
        m == 1
    })
}

/// Every exponent list, ascending, with entries summing to `total`.
pub fn partitions(total: u32) -> Vec<Vec<u32>> {
    fn go(rest: u32, min: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for e in min..=rest {
            cur.push(e);
            go(rest - e, e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(total, 1, &mut Vec::new(), &mut out);
    out
}

/// Abelian p-groups of order at most `bound`, one per isomorphism type.
pub fn abelian_groups(primes: &[u64], bound: u64) -> Vec<AbelianPGroup> {
    let mut out = Vec::new();
    for &p in primes {
        let mut total = 1;
        while p.pow(total) <= bound {
            out.extend(partitions(total).iter().map(|e| AbelianPGroup::new(p, e).expect("valid exponents")));
            total += 1;
        }
    }
    out
}

/// Bundled non-cyclic groups of order `p^3` to `p^5` within `bound`, each
/// with its name and prime: the non-abelian builtins plus every non-cyclic
/// abelian type.
pub fn conjecture_corpus(bound: u64) -> Result<Vec<(String, u64, TableGroup)>> {
    let mut out = Vec::new();
    for &name in BUILTIN_NAMES {
        let t = builtin(name)?;
        let p = builtin_prime(name).expect("bundled groups are p-groups");
        let n = super::log_p(t.order(), p).expect("p-group");
        let cyclic = (0..t.order()).any(|x| t.element_order(x) == t.order());
        if !cyclic && (3..=5).contains(&n) && t.order() as u64 <= bound {
            out.push((name.to_string(), p, t));
        }
    }
    for h in abelian_groups(&[2, 3, 5], bound) {
        let n = h.log_order();
        if h.rank() > 1 && (3..=5).contains(&n) {
            out.push((format!("abelian {}", h), h.p(), table_from_abelian(&h, bound)?));
        }
    }
    Ok(out)
}
