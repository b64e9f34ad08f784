//! The annular Khovanov-Lee complex of a braid closure.
//!
//! The Lee differential is stored as four sparse integer matrices per
//! homological degree, split by their `(j, k)` shift:
//!
//! | piece      | (i, j, k) degree |
//! |------------|------------------|
//! | `D0`       | (1, 0, 0)        |
//! | `DMinus`   | (1, 0, -2)       |
//! | `Phi0`     | (1, 4, 0)        |
//! | `PhiPlus`  | (1, 4, 2)        |
//!
//! Edge maps use `v₊ = 1`, `v₋ = x` in `ℚ[x]/(x² - 1)`: the Khovanov part is
//! the `x² = 0` truncation and the Lee part the remaining `x·x ↦ 1` terms.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::braid::BraidWord;
use crate::statecube::{mark_rank, marks_of_rank, CubeError, Generator, StateCube};
use crate::scalar::Coeff;
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error(transparent)]
    Cube(#[from] CubeError),
    #[error("chain vector has support outside the braid-like resolution")]
    OutsideBraidlike,
    #[error("no generator {index} in degree {degree}")]
    BadIndex { degree: i32, index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Piece {
    D0,
    DMinus,
    Phi0,
    PhiPlus,
}

impl Piece {
    pub const ALL: [Piece; 4] = [Piece::D0, Piece::DMinus, Piece::Phi0, Piece::PhiPlus];

    /// `(i, j, k)` degree of the piece.
    pub fn degree(self) -> (i32, i32, i32) {
        match self {
            Piece::D0 => (1, 0, 0),
            Piece::DMinus => (1, 0, -2),
            Piece::Phi0 => (1, 4, 0),
            Piece::PhiPlus => (1, 4, 2),
        }
    }

    fn from_shift(dj: i32, dk: i32) -> Option<Piece> {
        Piece::ALL.into_iter().find(|p| {
            let (_, j, k) = p.degree();
            j == dj && k == dk
        })
    }

    fn slot(self) -> usize {
        self as usize
    }

    pub fn is_khovanov(self) -> bool {
        matches!(self, Piece::D0 | Piece::DMinus)
    }
}

/// Column-major sparse integer matrix; each column sorted by row.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub columns: Vec<Vec<(u32, i64)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            columns: vec![Vec::new(); cols],
        }
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |&(r, x)| (r as usize, c, x)))
    }

    /// Sparse triplets `[row, col, value]` as JSON.
    pub fn to_triplet_json(&self) -> String {
        let triplets: Vec<[i64; 3]> = self
            .entries()
            .map(|(r, c, x)| [r as i64, c as i64, x])
            .collect();
        serde_json::json!({
            "rows": self.rows,
            "cols": self.cols(),
            "entries": triplets,
        })
        .to_string()
    }

    fn apply_int(&self, col: usize, out: &mut BTreeMap<usize, i64>, scale: i64) {
        for &(r, x) in &self.columns[col] {
            *out.entry(r as usize).or_insert(0) += scale * x;
        }
    }
}

/// Sparse rational combination of generators of a single degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainVector {
    pub degree: i32,
    coeffs: BTreeMap<usize, Rational>,
}

impl ChainVector {
    pub fn zero(degree: i32) -> Self {
        ChainVector {
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn unit(degree: i32, index: usize) -> Self {
        let mut v = Self::zero(degree);
        v.coeffs.insert(index, Rational::one());
        v
    }

    pub fn from_terms(degree: i32, terms: impl IntoIterator<Item = (usize, Rational)>) -> Self {
        let mut v = Self::zero(degree);
        for (i, x) in terms {
            v.add_term(i, &x);
        }
        v
    }

    pub fn add_term(&mut self, index: usize, x: &Rational) {
        if x.is_zero() {
            return;
        }
        let e = self.coeffs.entry(index).or_insert_with(Rational::zero);
        *e += x;
        if e.is_zero() {
            self.coeffs.remove(&index);
        }
    }

    pub fn coeff(&self, index: usize) -> Rational {
        self.coeffs.get(&index).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        self.coeffs.iter().map(|(&i, x)| (i, x))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scaled(&self, c: &Rational) -> ChainVector {
        ChainVector::from_terms(self.degree, self.terms().map(|(i, x)| (i, x * c)))
    }

    pub fn add(&self, other: &ChainVector) -> ChainVector {
        assert_eq!(self.degree, other.degree);
        let mut v = self.clone();
        for (i, x) in other.terms() {
            v.add_term(i, x);
        }
        v
    }

    pub fn sub(&self, other: &ChainVector) -> ChainVector {
        self.add(&other.scaled(&-Rational::one()))
    }
}

/// Matrices from degree `i` to `i + 1`, one per piece.
#[derive(Debug, Clone, Default)]
pub struct DegreeMaps {
    pieces: [SparseMatrix; 4],
}

impl DegreeMaps {
    pub fn piece(&self, p: Piece) -> &SparseMatrix {
        &self.pieces[p.slot()]
    }
}

#[derive(Debug, Clone)]
pub struct LeeComplex {
    cube: StateCube,
    maps: BTreeMap<i32, DegreeMaps>,
}

/// Orientation of the braid closure for the canonical Lee class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Down,
}

pub fn build_complex(word: &BraidWord, cap: usize) -> Result<LeeComplex, ComplexError> {
    LeeComplex::build(word, cap)
}

/// One matrix entry produced by a cube edge.
struct EdgeEntry {
    col: usize,
    row: usize,
    piece: Piece,
    value: i64,
}

fn edge_entries(cube: &StateCube, mask: u64, r: usize) -> Vec<EdgeEntry> {
    let word = cube.word();
    let src = cube.state(mask);
    let tgt_mask = mask | 1 << r;
    let tgt = cube.state(tgt_mask);
    let q = word.letters()[r].unsigned_abs() as usize - 1;
    let sign: i64 = if (mask & ((1u64 << r) - 1)).count_ones() % 2 == 1 {
        -1
    } else {
        1
    };

    let sc = &src.circles;
    let tc = &tgt.circles;
    // Circles through the two local arcs at crossing r.
    let a = sc.circle_at(r, q);
    let b = sc.circle_at(r + 1, q + 1);
    let mut rep = vec![usize::MAX; sc.circle_count];
    for (s, &c) in sc.circle_of_segment.iter().enumerate() {
        if rep[c as usize] == usize::MAX {
            rep[c as usize] = s;
        }
    }
    let image: Vec<usize> = rep.iter().map(|&s| tc.circle_of_segment[s] as usize).collect();

    let mut out = Vec::new();
    let src_gens = &cube.table(src.degree).expect("source degree").generators;
    let tgt_nc = tc.circle_count;
    let mut emit = |col: usize, g: &Generator, tmarks: u64, value: i64| {
        let row = tgt.offset + mark_rank(tmarks, tgt_nc);
        let h = cube.generator(tgt.degree, row);
        let piece = Piece::from_shift(h.j - g.j, h.k - g.k).unwrap_or_else(|| {
            panic!(
                "edge entry with shift ({}, {}) fits no piece",
                h.j - g.j,
                h.k - g.k
            )
        });
        out.push(EdgeEntry {
            col,
            row,
            piece,
            value: sign * value,
        });
    };

    for rank in 0..1usize << sc.circle_count {
        let marks = marks_of_rank(rank, sc.circle_count);
        let col = src.offset + rank;
        let g = &src_gens[col];
        let mut base = 0u64;
        for c in 0..sc.circle_count {
            if c != a && c != b && marks >> c & 1 == 1 {
                base |= 1 << image[c];
            }
        }
        let minus_a = marks >> a & 1 == 1;
        if a != b {
            let merged = image[a];
            debug_assert_eq!(merged, image[b]);
            let minus_b = marks >> b & 1 == 1;
            // x·x = 1 (Lee), 1·1 = 1, 1·x = x·1 = x.
            let result_minus = minus_a != minus_b;
            let t = if result_minus { base | 1 << merged } else { base };
            emit(col, g, t, 1);
        } else {
            let c1 = tc.circle_at(r, q);
            let c2 = tc.circle_at(r + 1, q + 1);
            debug_assert_ne!(c1, c2);
            if minus_a {
                // Δx = x⊗x + 1⊗1
                emit(col, g, base | 1 << c1 | 1 << c2, 1);
                emit(col, g, base, 1);
            } else {
                // Δ1 = 1⊗x + x⊗1
                emit(col, g, base | 1 << c2, 1);
                emit(col, g, base | 1 << c1, 1);
            }
        }
    }
    out
}

impl LeeComplex {
    pub fn build(word: &BraidWord, cap: usize) -> Result<LeeComplex, ComplexError> {
        let cube = StateCube::build(word, cap)?;
        let c = word.len();
        let degrees: Vec<i32> = cube.degrees().collect();
        let mut maps = BTreeMap::new();
        for &d in &degrees {
            let Some(next) = cube.table(d + 1) else {
                continue;
            };
            let table = cube.table(d).expect("degree exists");
            let cube_ref = &cube;
            let entries: Vec<EdgeEntry> = table
                .states
                .par_iter()
                .flat_map_iter(|&mask| {
                    (0..c)
                        .filter(move |&r| mask >> r & 1 == 0)
                        .flat_map(move |r| edge_entries(cube_ref, mask, r))
                })
                .collect();
            let mut dm = DegreeMaps {
                pieces: std::array::from_fn(|_| SparseMatrix::zeros(next.len(), table.len())),
            };
            for e in entries {
                dm.pieces[e.piece.slot()].columns[e.col].push((e.row as u32, e.value));
            }
            for m in dm.pieces.iter_mut() {
                for col in m.columns.iter_mut() {
                    col.sort_unstable_by_key(|e| e.0);
                    // Merge duplicate rows (cannot occur for distinct circles,
                    // kept for safety of the sum).
                    col.dedup_by(|x, y| {
                        if x.0 == y.0 {
                            y.1 += x.1;
                            true
                        } else {
                            false
                        }
                    });
                    col.retain(|e| e.1 != 0);
                }
            }
            maps.insert(d, dm);
        }
        let complex = LeeComplex { cube, maps };
        if cfg!(debug_assertions) && complex.cube.generator_count() <= 1 << 12 {
            let audit = complex.audit();
            assert!(audit.all_pass(), "complex audit failed: {audit:?}");
        }
        Ok(complex)
    }

    pub fn cube(&self) -> &StateCube {
        &self.cube
    }

    pub fn word(&self) -> &BraidWord {
        self.cube.word()
    }

    pub fn maps(&self, degree: i32) -> Option<&DegreeMaps> {
        self.maps.get(&degree)
    }

    pub fn piece(&self, degree: i32, p: Piece) -> Option<&SparseMatrix> {
        self.maps.get(&degree).map(|m| m.piece(p))
    }

    /// Full Lee differential out of `degree` as one integer matrix.
    pub fn full_matrix(&self, degree: i32) -> SparseMatrix {
        self.sum_matrix(degree, &Piece::ALL)
    }

    /// Sum of the given pieces out of `degree`; empty if there is no
    /// next degree.
    pub fn sum_matrix(&self, degree: i32, pieces: &[Piece]) -> SparseMatrix {
        let rows = self.cube.degree_len(degree + 1);
        let cols = self.cube.degree_len(degree);
        let Some(m) = self.maps.get(&degree) else {
            return SparseMatrix::zeros(rows, cols);
        };
        let mut out = SparseMatrix::zeros(rows, cols);
        for (c, col) in out.columns.iter_mut().enumerate() {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for &p in pieces {
                m.piece(p).apply_int(c, &mut acc, 1);
            }
            *col = acc
                .into_iter()
                .filter(|e| e.1 != 0)
                .map(|(r, x)| (r as u32, x))
                .collect();
        }
        out
    }

    fn apply_pieces(&self, v: &ChainVector, pieces: &[Piece]) -> ChainVector {
        let mut out = ChainVector::zero(v.degree + 1);
        let Some(m) = self.maps.get(&v.degree) else {
            return out;
        };
        for &p in pieces {
            let mat = m.piece(p);
            for (c, x) in v.terms() {
                for &(r, y) in &mat.columns[c] {
                    out.add_term(r as usize, &(x * Rational::from_integer(y.into())));
                }
            }
        }
        out
    }

    /// The full Lee differential `∂₀ + ∂₋ + Φ₀ + Φ₊`.
    pub fn full(&self, v: &ChainVector) -> ChainVector {
        self.apply_pieces(v, &Piece::ALL)
    }

    /// Khovanov part `∂₀ + ∂₋`.
    pub fn khovanov(&self, v: &ChainVector) -> ChainVector {
        self.apply_pieces(v, &[Piece::D0, Piece::DMinus])
    }

    pub fn apply_piece(&self, p: Piece, v: &ChainVector) -> ChainVector {
        self.apply_pieces(v, &[p])
    }

    fn braidlike_index(&self, marks: u64) -> usize {
        let (deg, idx) = self.cube.index_of(self.cube.braidlike_mask(), marks);
        debug_assert_eq!(deg, 0);
        idx
    }

    /// Circles of the braid-like resolution ordered from innermost outward.
    fn braidlike_circles_by_nesting(&self) -> Vec<usize> {
        let cs = &self.cube.state(self.cube.braidlike_mask()).circles;
        let mut by_nest = vec![0usize; cs.circle_count];
        for (c, nest) in cs.nesting_index.iter().enumerate() {
            by_nest[nest.expect("braid-like circles are nontrivial") as usize] = c;
        }
        by_nest
    }

    /// Canonical Lee cycle of the braid-like orientation (`Up`) or its
    /// reverse (`Down`): outermost circle `b = v₋ - v₊`, alternating with
    /// `a = v₋ + v₊` inward (swapped for `Down`).
    pub fn canonical_class(&self, dir: Direction) -> ChainVector {
        let circles = self.braidlike_circles_by_nesting();
        let n = circles.len();
        // is_b[c] for each circle id
        let mut is_b = vec![false; n];
        for (nest, &c) in circles.iter().enumerate() {
            let from_outside = n - 1 - nest;
            is_b[c] = (from_outside % 2 == 0) == (dir == Direction::Up);
        }
        let mut v = ChainVector::zero(0);
        for plus_set in 0..1u64 << n {
            // bit c of plus_set: circle c takes its v₊ term.
            let minus_marks = !plus_set & ((1u64 << n) - 1);
            let negatives = (0..n)
                .filter(|&c| plus_set >> c & 1 == 1 && is_b[c])
                .count();
            let x = if negatives % 2 == 0 {
                Rational::one()
            } else {
                -Rational::one()
            };
            v.add_term(self.braidlike_index(minus_marks), &x);
        }
        v
    }

    /// Plamenevskaya's generator: every braid-like circle marked `v₋`.
    pub fn plamenevskaya_class(&self) -> ChainVector {
        let n = self.word().strands();
        ChainVector::unit(0, self.braidlike_index((1u64 << n) - 1))
    }

    /// Whether `[v₋]` survives in Khovanov homology, i.e. `v₋` is not in the
    /// image of `∂₀ + ∂₋` from degree -1.
    pub fn psi_is_nonzero(&self) -> bool {
        let v = self.plamenevskaya_class();
        let (idx, _) = v.terms().next().expect("unit vector");
        let target_j = self.cube.generator(0, idx).j;
        let Some(m) = self.maps.get(&-1) else {
            return true;
        };
        let src = &self.cube.table(-1).expect("degree -1").generators;
        let mut ech = crate::linalg::Echelon::new();
        for (c, g) in src.iter().enumerate() {
            if g.j != target_j {
                continue;
            }
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            m.piece(Piece::D0).apply_int(c, &mut acc, 1);
            m.piece(Piece::DMinus).apply_int(c, &mut acc, 1);
            let col: crate::linalg::SparseVec = acc
                .into_iter()
                .filter(|e| e.1 != 0)
                .map(|(r, x)| (r, Coeff::from_i64(x)))
                .collect();
            if !col.is_empty() {
                ech.insert(col);
            }
        }
        !ech.contains(vec![(idx, Coeff::one())])
    }

    fn nontrivial_mask(&self, g: &Generator) -> u64 {
        let cs = self.cube.circles_of(g);
        cs.nontrivial
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .fold(0u64, |m, (c, _)| m | 1 << c)
    }

    /// Index of `Θ(g)`: `v₊ ↔ v₋` on nontrivial circles.
    pub fn theta_index(&self, degree: i32, index: usize) -> usize {
        let g = self.cube.generator(degree, index);
        let flipped = g.marks ^ self.nontrivial_mask(g);
        self.cube.index_of(g.resolution.mask(), flipped).1
    }

    pub fn theta(&self, v: &ChainVector) -> ChainVector {
        ChainVector::from_terms(
            v.degree,
            v.terms().map(|(i, x)| (self.theta_index(v.degree, i), x.clone())),
        )
    }

    /// The sl₂ raising operator on chains supported in the braid-like
    /// resolution. On the circle of nesting index `m`, `e(v₋) = (-1)^m v₊`
    /// and `e(v₊) = 0`; `e` acts on tensor products as a derivation.
    pub fn apply_e(&self, v: &ChainVector) -> Result<ChainVector, ComplexError> {
        let bl = self.cube.braidlike_mask();
        let cs = &self.cube.state(bl).circles;
        let mut out = ChainVector::zero(v.degree);
        for (i, x) in v.terms() {
            let g = self
                .cube
                .table(v.degree)
                .and_then(|t| t.generators.get(i))
                .ok_or(ComplexError::BadIndex {
                    degree: v.degree,
                    index: i,
                })?;
            if g.resolution.mask() != bl || v.degree != 0 {
                return Err(ComplexError::OutsideBraidlike);
            }
            for c in 0..cs.circle_count {
                if g.marks >> c & 1 == 1 {
                    let nest = cs.nesting_index[c].expect("nontrivial");
                    let y = if nest % 2 == 0 { x.clone() } else { -x.clone() };
                    out.add_term(self.braidlike_index(g.marks & !(1 << c)), &y);
                }
            }
        }
        Ok(out)
    }

    /// Divided power `e^(k) = e^k / k!`.
    pub fn divided_power_e(&self, v: &ChainVector, k: usize) -> Result<ChainVector, ComplexError> {
        let mut cur = v.clone();
        for step in 1..=k {
            cur = self
                .apply_e(&cur)?
                .scaled(&Rational::new(1.into(), (step as i64).into()));
        }
        Ok(cur)
    }

    /// `Σ_{k=0}^{n} (±1)^k e^(k)(v₋)`; `alternating` selects the minus sign.
    pub fn sl2_orbit_sum(&self, alternating: bool) -> ChainVector {
        let n = self.word().strands();
        let mut cur = self.plamenevskaya_class();
        let mut sum = cur.clone();
        for k in 1..=n {
            cur = self
                .apply_e(&cur)
                .expect("support stays on the braid-like resolution")
                .scaled(&Rational::new(1.into(), (k as i64).into()));
            let term = if alternating && k % 2 == 1 {
                cur.scaled(&-Rational::one())
            } else {
                cur.clone()
            };
            sum = sum.add(&term);
        }
        sum
    }

    /// Checks the algebraic identities of the complex.
    pub fn audit(&self) -> AuditReport {
        let mut report = AuditReport {
            degree_table: true,
            full_square_zero: true,
            khovanov_square_zero: true,
            lee_square_zero: true,
            anticommute: true,
            theta_commutes: true,
        };
        let kh = [Piece::D0, Piece::DMinus];
        let lee = [Piece::Phi0, Piece::PhiPlus];
        for (&d, m) in &self.maps {
            for p in Piece::ALL {
                let (_, dj, dk) = p.degree();
                for (r, c, _) in m.piece(p).entries() {
                    let g = self.cube.generator(d, c);
                    let h = self.cube.generator(d + 1, r);
                    if h.i - g.i != 1 || h.j - g.j != dj || h.k - g.k != dk {
                        report.degree_table = false;
                    }
                }
            }
            let Some(next) = self.maps.get(&(d + 1)) else {
                continue;
            };
            let cols = self.cube.degree_len(d);
            for c in 0..cols {
                let compose = |first: &[Piece], second: &[Piece]| {
                    let mut mid: BTreeMap<usize, i64> = BTreeMap::new();
                    for &p in first {
                        m.piece(p).apply_int(c, &mut mid, 1);
                    }
                    let mut out: BTreeMap<usize, i64> = BTreeMap::new();
                    for (&r, &x) in &mid {
                        if x == 0 {
                            continue;
                        }
                        for &p in second {
                            next.piece(p).apply_int(r, &mut out, x);
                        }
                    }
                    out.retain(|_, x| *x != 0);
                    out
                };
                if !compose(&Piece::ALL, &Piece::ALL).is_empty() {
                    report.full_square_zero = false;
                }
                if !compose(&kh, &kh).is_empty() {
                    report.khovanov_square_zero = false;
                }
                if !compose(&lee, &lee).is_empty() {
                    report.lee_square_zero = false;
                }
                let mut cross = compose(&kh, &lee);
                for (r, x) in compose(&lee, &kh) {
                    *cross.entry(r).or_insert(0) += x;
                }
                if cross.values().any(|&x| x != 0) {
                    report.anticommute = false;
                }
            }
        }
        // Θ ∘ ∂ = ∂ ∘ Θ on every generator.
        for (&d, m) in &self.maps {
            let full: Vec<&SparseMatrix> = Piece::ALL.iter().map(|&p| m.piece(p)).collect();
            let image = |c: usize| {
                let mut acc: HashMap<usize, i64> = HashMap::new();
                for mat in &full {
                    for &(r, x) in &mat.columns[c] {
                        *acc.entry(r as usize).or_insert(0) += x;
                    }
                }
                acc.retain(|_, x| *x != 0);
                acc
            };
            for c in 0..self.cube.degree_len(d) {
                let lhs = image(self.theta_index(d, c));
                let rhs: HashMap<usize, i64> = image(c)
                    .into_iter()
                    .map(|(r, x)| (self.theta_index(d + 1, r), x))
                    .collect();
                if lhs != rhs {
                    report.theta_commutes = false;
                }
            }
        }
        report
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub degree_table: bool,
    pub full_square_zero: bool,
    pub khovanov_square_zero: bool,
    pub lee_square_zero: bool,
    pub anticommute: bool,
    pub theta_commutes: bool,
}

impl AuditReport {
    pub fn all_pass(&self) -> bool {
        self.degree_table
            && self.full_square_zero
            && self.khovanov_square_zero
            && self.lee_square_zero
            && self.anticommute
            && self.theta_commutes
    }
}
