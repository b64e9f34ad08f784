//! Exact linear algebra over ℚ: sparse column echelon with lowest-key pivots
//! and fraction-free (Bareiss) rank over ℤ.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::scalar::Coeff;

/// Sparse vector with strictly increasing keys and no zero entries.
pub type SparseVec = Vec<(usize, Coeff)>;

/// `v - c * w`, merging by key.
pub fn sub_scaled(v: &[(usize, Coeff)], c: &Coeff, w: &[(usize, Coeff)]) -> SparseVec {
    let mut out = Vec::with_capacity(v.len() + w.len());
    let (mut a, mut b) = (0, 0);
    while a < v.len() || b < w.len() {
        let ka = v.get(a).map_or(usize::MAX, |e| e.0);
        let kb = w.get(b).map_or(usize::MAX, |e| e.0);
        if ka < kb {
            out.push(v[a].clone());
            a += 1;
        } else if kb < ka {
            out.push((kb, c.mul(&w[b].1).neg()));
            b += 1;
        } else {
            let x = v[a].1.sub_mul(c, &w[b].1);
            if !x.is_zero() {
                out.push((ka, x));
            }
            a += 1;
            b += 1;
        }
    }
    out
}

/// Column echelon basis in which every column's pivot is its smallest key
/// and pivots are pairwise distinct. Pivot entries are normalized to 1.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    columns: Vec<SparseVec>,
    pivot_column: HashMap<usize, usize>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.columns.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivot_column.keys().copied()
    }

    pub fn column_with_pivot(&self, key: usize) -> Option<&SparseVec> {
        self.pivot_column.get(&key).map(|&c| &self.columns[c])
    }

    /// Cancels leading terms against existing pivots until the leading key
    /// is not a pivot. Returns the remainder (empty iff `v` is in the span).
    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        while let Some((key, coeff)) = v.first() {
            match self.pivot_column.get(key) {
                Some(&c) => {
                    let coeff = coeff.clone();
                    v = sub_scaled(&v, &coeff, &self.columns[c]);
                }
                None => break,
            }
        }
        v
    }

    /// Adds `v` to the span. Returns `false` if it was already dependent.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let mut v = self.reduce(v);
        let Some((key, lead)) = v.first().cloned() else {
            return false;
        };
        if !lead.is_one() {
            let inv = lead.recip();
            for e in v.iter_mut() {
                e.1 = e.1.mul(&inv);
            }
        }
        self.pivot_column.insert(key, self.columns.len());
        self.columns.push(v);
        true
    }

    pub fn contains(&self, v: SparseVec) -> bool {
        self.reduce(v).is_empty()
    }
}

/// Columns with designated pivot rows, each column free of the pivot rows
/// of every older column and normalized to 1 at its own pivot. Reduction
/// clears pivot rows oldest-first, which never reintroduces an older one.
#[derive(Debug, Clone, Default)]
pub struct PivotBasis {
    columns: Vec<SparseVec>,
    pivot_rows: Vec<usize>,
    age_of_row: HashMap<usize, usize>,
}

impl PivotBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn is_pivot(&self, row: usize) -> bool {
        self.age_of_row.contains_key(&row)
    }

    pub fn pivot_rows(&self) -> &[usize] {
        &self.pivot_rows
    }

    /// The unique vector in `v + span(columns)` with no pivot-row entries.
    pub fn reduce(&self, v: &[(usize, Coeff)]) -> SparseVec {
        let mut acc: BTreeMap<usize, Coeff> = v.iter().cloned().collect();
        let mut heap: BinaryHeap<Reverse<usize>> = v
            .iter()
            .filter_map(|(r, _)| self.age_of_row.get(r).map(|&a| Reverse(a)))
            .collect();
        while let Some(Reverse(age)) = heap.pop() {
            let Some(c) = acc.remove(&self.pivot_rows[age]) else {
                continue;
            };
            for (r, x) in &self.columns[age][1..] {
                let e = acc.entry(*r).or_insert_with(Coeff::zero);
                if e.is_zero() {
                    if let Some(&a) = self.age_of_row.get(r) {
                        heap.push(Reverse(a));
                    }
                }
                *e = e.sub_mul(&c, x);
                if e.is_zero() {
                    acc.remove(r);
                }
            }
        }
        acc.into_iter().collect()
    }

    /// Adds a column already reduced by [`PivotBasis::reduce`], pivoting on
    /// `row`. The pivot entry is stored first.
    pub fn push(&mut self, v: SparseVec, row: usize) {
        debug_assert!(!self.is_pivot(row));
        let lead = v
            .iter()
            .find(|e| e.0 == row)
            .expect("pivot row present")
            .1
            .clone();
        let inv = lead.recip();
        let mut col: SparseVec = vec![(row, Coeff::one())];
        col.extend(v.into_iter().filter(|e| e.0 != row).map(|(r, x)| (r, x.mul(&inv))));
        self.age_of_row.insert(row, self.columns.len());
        self.pivot_rows.push(row);
        self.columns.push(col);
    }
}

/// Rank of a dense integer matrix (row-major) by fraction-free elimination.
pub fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let (top, rest) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let pivot = pivot_row[col].clone();
        for row in rest.iter_mut() {
            let factor = row[col].clone();
            for c in col..cols {
                let v = &pivot * &row[c] - &factor * &pivot_row[c];
                debug_assert!((&v % &prev).is_zero());
                row[c] = v / &prev;
            }
        }
        prev = pivot.abs();
        if prev.is_zero() {
            prev = BigInt::one();
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> Coeff {
        Coeff::from_i64(n)
    }

    fn sv(entries: &[(usize, i64)]) -> SparseVec {
        entries.iter().map(|&(k, x)| (k, q(x))).collect()
    }

    #[test]
    fn echelon_basic() {
        let mut e = Echelon::new();
        assert!(e.insert(sv(&[(0, 2), (3, 1)])));
        assert!(e.insert(sv(&[(0, 1), (1, 1)])));
        assert!(!e.insert(sv(&[(0, 4), (3, 2)])));
        assert_eq!(e.rank(), 2);
        let mut pivots: Vec<_> = e.pivots().collect();
        pivots.sort();
        assert_eq!(pivots, vec![0, 1]);
        assert!(e.contains(sv(&[(1, 2), (3, -1)])));
        assert!(!e.contains(sv(&[(2, 1)])));
        assert!(e.column_with_pivot(0).unwrap()[0].1.is_one());
    }

    #[test]
    fn bareiss_small() {
        let m = |rows: &[&[i64]]| -> Vec<Vec<BigInt>> {
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
        };
        assert_eq!(bareiss_rank(m(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(bareiss_rank(m(&[&[0, 1, 0], &[1, 0, 0], &[1, 1, 0]])), 2);
        assert_eq!(bareiss_rank(m(&[&[2, 1, 1], &[1, 3, 2], &[1, 0, 0]])), 3);
        assert_eq!(bareiss_rank(Vec::new()), 0);
    }

    #[test]
    fn pivot_basis_reduction() {
        let mut b = PivotBasis::new();
        let c0 = b.reduce(&sv(&[(0, 2), (1, 2), (4, 1)]));
        b.push(c0, 1);
        let c1 = b.reduce(&sv(&[(1, 1), (2, 3)]));
        let half = Coeff::Small(-1, 2);
        assert_eq!(c1, vec![(0, q(-1)), (2, q(3)), (4, half)]);
        b.push(c1, 0);
        let r = b.reduce(&sv(&[(0, 1), (1, 1), (3, 5)]));
        assert!(r.iter().all(|e| !b.is_pivot(e.0)));
        assert_eq!(b.pivot_rows(), &[1, 0]);
        assert_eq!(b.len(), 2);
    }

    proptest! {
        #[test]
        fn pivot_basis_spans(cols in prop::collection::vec(
            prop::collection::vec(-2i64..=2, 6), 1..6), probe in prop::collection::vec(-2i64..=2, 6)) {
            let to_sv = |c: &Vec<i64>| -> SparseVec { c.iter().enumerate()
                .filter(|(_, &x)| x != 0).map(|(k, &x)| (k, q(x))).collect() };
            let mut b = PivotBasis::new();
            let mut e = Echelon::new();
            for c in &cols {
                e.insert(to_sv(c));
                let v = b.reduce(&to_sv(c));
                if let Some(&(row, _)) = v.last() {
                    b.push(v, row);
                }
            }
            let r = b.reduce(&to_sv(&probe));
            prop_assert!(r.iter().all(|x| !b.is_pivot(x.0)));
            prop_assert_eq!(r.is_empty(), e.contains(to_sv(&probe)));
            prop_assert_eq!(b.len(), e.rank());
        }

        #[test]
        fn echelon_rank_matches_bareiss(cols in prop::collection::vec(
            prop::collection::vec(-2i64..=2, 5), 0..7)) {
            let mut e = Echelon::new();
            for c in &cols {
                let v: SparseVec = c.iter().enumerate()
                    .filter(|(_, &x)| x != 0).map(|(k, &x)| (k, q(x))).collect();
                e.insert(v);
            }
            let dense: Vec<Vec<BigInt>> = (0..5)
                .map(|r| cols.iter().map(|c| BigInt::from(c[r])).collect())
                .collect();
            let dense = if cols.is_empty() { Vec::new() } else { dense };
            prop_assert_eq!(e.rank(), bareiss_rank(dense));
        }
    }
}
