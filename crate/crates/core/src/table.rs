//! Finite groups given by an explicit multiplication table.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite group as a validated Cayley table. Elements are `0..order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableGroup {
    order: usize,
    table: Vec<u32>,
    identity: usize,
    inverses: Vec<u32>,
    orders: Vec<u32>,
    labels: Vec<String>,
}

/// Table JSON: `{"order": m, "table": [[...], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableJson {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl TableJson {
    pub fn build(&self) -> Result<TableGroup> {
        if self.table.len() != self.order {
            return Err(Error::InvalidTable(format!(
                "declared order {} but table has {} rows",
                self.order,
                self.table.len()
            )));
        }
        TableGroup::new(self.table.clone(), self.labels.clone())
    }
}

impl TableGroup {
    /// Validates identity, unique inverses (Latin square) and associativity.
    ///
    /// Associativity is checked with Light's test against a generating set:
    /// the elements `a` with `(xa)y = x(ay)` for all `x, y` are closed under
    /// multiplication, so it suffices that every generator is one of them.
    pub fn new(rows: Vec<Vec<usize>>, labels: Option<Vec<String>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        if m > u32::MAX as usize / 2 {
            return Err(Error::InvalidTable("table too large".into()));
        }
        let mut table = Vec::with_capacity(m * m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidTable(format!("row {i} has length {}", row.len())));
            }
            for &x in row {
                if x >= m {
                    return Err(Error::InvalidTable(format!("entry {x} out of range in row {i}")));
                }
                table.push(x as u32);
            }
        }
        Self::from_flat(m, table, labels)
    }

    /// Table of `f` on `0..order`.
    pub fn from_fn(order: usize, labels: Option<Vec<String>>, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let rows = (0..order).map(|a| (0..order).map(|b| f(a, b)).collect()).collect();
        Self::new(rows, labels)
    }

    fn from_flat(m: usize, table: Vec<u32>, labels: Option<Vec<String>>) -> Result<Self> {
        let at = |a: usize, b: usize| table[a * m + b] as usize;
        let identity = (0..m)
            .find(|&e| (0..m).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| Error::InvalidTable("no identity element".into()))?;

        // Latin square: every row and column is a permutation
        let mut seen = vec![usize::MAX; m];
        for a in 0..m {
            for b in 0..m {
                let x = at(a, b);
                if seen[x] == a {
                    return Err(Error::InvalidTable(format!("row {a} repeats {x}")));
                }
                seen[x] = a;
            }
        }
        seen.fill(usize::MAX);
        for b in 0..m {
            for a in 0..m {
                let x = at(a, b);
                if seen[x] == b {
                    return Err(Error::InvalidTable(format!("column {b} repeats {x}")));
                }
                seen[x] = b;
            }
        }

        let labels = match labels {
            Some(l) if l.len() != m => {
                return Err(Error::InvalidTable(format!("{} labels for {m} elements", l.len())))
            }
            Some(l) => l,
            None => (0..m).map(|i| i.to_string()).collect(),
        };
        let mut inverses = vec![0u32; m];
        for a in 0..m {
            let b = (0..m).find(|&b| at(a, b) == identity).unwrap();
            inverses[a] = b as u32;
        }

        let mut g = Self { order: m, table, identity, inverses, orders: vec![0; m], labels };
        for a in 0..m {
            let mut x = a;
            let mut k = 1u32;
            while x != identity {
                x = g.mul(x, a);
                k += 1;
                if k as usize > m {
                    return Err(Error::InvalidTable(format!("powers of {a} never reach the identity")));
                }
            }
            g.orders[a] = k;
        }

        let gens = g.generators();
        if g.closure(&gens).len() != m {
            return Err(Error::InvalidTable("generating set does not reach every element".into()));
        }
        for &s in &gens {
            for x in 0..m {
                let xs = g.mul(x, s);
                for y in 0..m {
                    if g.mul(xs, y) != g.mul(x, g.mul(s, y)) {
                        return Err(Error::InvalidTable(format!(
                            "associativity fails at ({x}, {s}, {y})"
                        )));
                    }
                }
            }
        }
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a] as usize
    }

    pub fn pow(&self, a: usize, k: u64) -> usize {
        let k = k % self.orders[a] as u64;
        (0..k).fold(self.identity, |acc, _| self.mul(acc, a))
    }

    pub fn element_order(&self, a: usize) -> usize {
        self.orders[a] as usize
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn to_json(&self) -> TableJson {
        let table = (0..self.order).map(|a| (0..self.order).map(|b| self.mul(a, b)).collect()).collect();
        TableJson { order: self.order, table, labels: Some(self.labels.clone()) }
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Subgroup generated by `gens`, as a sorted list.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.order];
        inside[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let y = self.mul(x, s);
                if !inside[y] {
                    inside[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order).filter(|&x| inside[x]).collect()
    }

    /// Greedy generating set: scan elements by descending order and keep
    /// each one not already in the subgroup generated so far.
    pub fn generators(&self) -> Vec<usize> {
        let mut candidates: Vec<usize> = (0..self.order).collect();
        candidates.sort_by_key(|&a| (std::cmp::Reverse(self.orders[a]), a));
        let mut gens = Vec::new();
        let mut inside = vec![false; self.order];
        inside[self.identity] = true;
        let mut size = 1;
        for a in candidates {
            if size == self.order {
                break;
            }
            if inside[a] {
                continue;
            }
            gens.push(a);
            let sub = self.closure(&gens);
            size = sub.len();
            for x in sub {
                inside[x] = true;
            }
        }
        gens
    }

    /// O(m^3) associativity check, kept as an independent cross-check of
    /// the generator-based test in [`TableGroup::new`].
    pub fn is_associative_naive(&self) -> bool {
        let m = self.order;
        (0..m).all(|a| {
            (0..m).all(|b| {
                let ab = self.mul(a, b);
                (0..m).all(|c| self.mul(ab, c) == self.mul(a, self.mul(b, c)))
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(n: usize) -> TableGroup {
        TableGroup::from_fn(n, None, |a, b| (a + b) % n).unwrap()
    }

    #[test]
    fn cyclic_basics() {
        let c = cyclic(9);
        assert_eq!(c.identity(), 0);
        assert_eq!(c.inv(2), 7);
        assert_eq!(c.element_order(3), 3);
        assert_eq!(c.element_order(1), 9);
        assert_eq!(c.generators().len(), 1);
        assert!(c.is_abelian());
        assert_eq!(c.pow(2, 5), 1);
    }

    #[test]
    fn rejects_non_groups() {
        // no identity
        assert!(TableGroup::new(vec![vec![0, 2, 1], vec![2, 1, 0], vec![1, 0, 2]], None).is_err());
        // repeated row entry
        assert!(TableGroup::new(vec![vec![0, 1], vec![1, 1]], None).is_err());
        // out of range
        assert!(TableGroup::new(vec![vec![0, 2], vec![1, 0]], None).is_err());
        // Latin square with identity that is not associative (order 5 loop)
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = TableGroup::new(loop5.clone(), None).unwrap_err();
        assert!(matches!(err, Error::InvalidTable(_)), "{err}");
        let json = TableJson { order: 4, table: loop5, labels: None };
        assert!(json.build().is_err());
    }

    #[test]
    fn light_test_agrees_with_naive() {
        // S3 as permutations of {0, 1, 2}, composed left to right
        let perms: Vec<[usize; 3]> =
            vec![[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
        let idx = |q: [usize; 3]| perms.iter().position(|&r| r == q).unwrap();
        let s3 = TableGroup::from_fn(6, None, |a, b| {
            let (x, y) = (perms[a], perms[b]);
            idx([y[x[0]], y[x[1]], y[x[2]]])
        })
        .unwrap();
        assert!(s3.is_associative_naive());
        assert!(!s3.is_abelian());
        assert!(cyclic(12).is_associative_naive());
    }

    #[test]
    fn json_round_trip() {
        let c = cyclic(5);
        let s = serde_json::to_string(&c.to_json()).unwrap();
        let back: TableJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.build().unwrap(), c);
    }
}
