//! Cube of resolutions of the annular closure of a braid word.
//!
//! The closure diagram is cut into strand segments: segment `(level, pos)`
//! is the piece of the strand at position `pos` (0-based) between crossing
//! `level - 1` and crossing `level`, for `level` in `0..=c`. The closure arc
//! at position `pos` joins `(c, pos)` back to `(0, pos)` and is the only
//! place a state circle meets the seam running from the braid axis to the
//! outer boundary. Position 0 is innermost, closest to the axis.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::braid::BraidWord;

pub const DEFAULT_GENERATOR_CAP: usize = 1 << 26;

/// Largest supported crossing count; resolutions are stored as `u64` masks.
pub const MAX_CROSSINGS: usize = 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CubeError {
    #[error("resolution has {got} bits but the word has {expected} letters")]
    LengthMismatch { expected: usize, got: usize },
    #[error("complex would have {count} generators, above the cap of {cap}")]
    ResourceCap { count: u128, cap: usize },
}

/// A choice of 0- or 1-smoothing at every crossing; bit `r` is crossing `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Resolution {
    mask: u64,
    len: u8,
}

impl Resolution {
    pub fn from_bits(bits: &[bool]) -> Resolution {
        assert!(bits.len() <= MAX_CROSSINGS);
        let mask = bits
            .iter()
            .enumerate()
            .fold(0u64, |m, (r, &b)| if b { m | (1 << r) } else { m });
        Resolution {
            mask,
            len: bits.len() as u8,
        }
    }

    pub fn from_mask(mask: u64, len: usize) -> Resolution {
        assert!(len <= MAX_CROSSINGS);
        debug_assert!(len == 64 || mask >> len == 0);
        Resolution {
            mask,
            len: len as u8,
        }
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, r: usize) -> bool {
        self.mask >> r & 1 == 1
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.len()).map(|r| self.bit(r)).collect()
    }

    /// Number of 1-smoothings.
    pub fn ones(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Key whose numeric order is the lexicographic order of the bit-vector
    /// read from crossing 0.
    pub fn lex_key(&self) -> u64 {
        if self.len == 0 {
            0
        } else {
            self.mask.reverse_bits() >> (64 - self.len as u32)
        }
    }
}

/// Circles of one resolution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CircleSet {
    pub circle_count: usize,
    /// Circle id of every segment, indexed by `level * strands + pos`.
    pub circle_of_segment: Vec<u32>,
    /// Odd number of seam crossings.
    pub nontrivial: Vec<bool>,
    /// 0 for the innermost nontrivial circle; `None` on trivial circles.
    pub nesting_index: Vec<Option<u32>>,
    #[serde(skip)]
    strands: usize,
}

impl CircleSet {
    pub fn circle_at(&self, level: usize, pos: usize) -> usize {
        self.circle_of_segment[level * self.strands + pos] as usize
    }

    pub fn nontrivial_count(&self) -> usize {
        self.nontrivial.iter().filter(|&&b| b).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("circle set serializes")
    }
}

/// Whether crossing `r` is smoothed in the braid-like (identity) way.
pub(crate) fn is_braidlike_smoothing(letter: i32, bit: bool) -> bool {
    (letter > 0) != bit
}

pub fn resolve(word: &BraidWord, res: Resolution) -> Result<CircleSet, CubeError> {
    if res.len() != word.len() {
        return Err(CubeError::LengthMismatch {
            expected: word.len(),
            got: res.len(),
        });
    }
    Ok(resolve_unchecked(word, res))
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

fn union(parent: &mut [u32], a: u32, b: u32) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb) as usize] = ra.min(rb);
    }
}

fn resolve_unchecked(word: &BraidWord, res: Resolution) -> CircleSet {
    let n = word.strands();
    let c = word.len();
    let seg = |level: usize, pos: usize| (level * n + pos) as u32;
    let total = (c + 1) * n;
    let mut parent: Vec<u32> = (0..total as u32).collect();

    for (level, &letter) in word.letters().iter().enumerate() {
        let q = letter.unsigned_abs() as usize - 1;
        for pos in 0..n {
            if pos != q && pos != q + 1 {
                union(&mut parent, seg(level, pos), seg(level + 1, pos));
            }
        }
        if is_braidlike_smoothing(letter, res.bit(level)) {
            union(&mut parent, seg(level, q), seg(level + 1, q));
            union(&mut parent, seg(level, q + 1), seg(level + 1, q + 1));
        } else {
            union(&mut parent, seg(level, q), seg(level, q + 1));
            union(&mut parent, seg(level + 1, q), seg(level + 1, q + 1));
        }
    }
    for pos in 0..n {
        union(&mut parent, seg(c, pos), seg(0, pos));
    }

    // Circle ids in order of first appearance among segments.
    let mut id_of_root = vec![u32::MAX; total];
    let mut circle_of_segment = vec![0u32; total];
    let mut count = 0u32;
    for s in 0..total as u32 {
        let root = find(&mut parent, s) as usize;
        if id_of_root[root] == u32::MAX {
            id_of_root[root] = count;
            count += 1;
        }
        circle_of_segment[s as usize] = id_of_root[root];
    }

    let mut seam_crossings = vec![0u32; count as usize];
    for pos in 0..n {
        seam_crossings[circle_of_segment[pos] as usize] += 1;
    }
    let nontrivial: Vec<bool> = seam_crossings.iter().map(|&x| x % 2 == 1).collect();

    // Walking the seam outward meets nontrivial circles in nesting order.
    let mut nesting_index = vec![None; count as usize];
    let mut next = 0u32;
    for pos in 0..n {
        let id = circle_of_segment[pos] as usize;
        if nontrivial[id] && nesting_index[id].is_none() {
            nesting_index[id] = Some(next);
            next += 1;
        }
    }

    CircleSet {
        circle_count: count as usize,
        circle_of_segment,
        nontrivial,
        nesting_index,
        strands: n,
    }
}

/// The oriented resolution of the braid-like orientation: 0-smoothing at
/// positive letters, 1-smoothing at negative ones.
pub fn braidlike_resolution(word: &BraidWord) -> Resolution {
    let bits: Vec<bool> = word.letters().iter().map(|&l| l < 0).collect();
    Resolution::from_bits(&bits)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Mark {
    Plus,
    Minus,
}

/// An oriented Kauffman state. `marks` has bit `c` set when circle `c` is
/// marked `v₋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Generator {
    pub resolution: Resolution,
    pub marks: u64,
    pub i: i32,
    pub j: i32,
    pub k: i32,
}

impl Generator {
    pub fn mark(&self, circle: usize) -> Mark {
        if self.marks >> circle & 1 == 1 {
            Mark::Minus
        } else {
            Mark::Plus
        }
    }

    /// Lattice point `(j₀, j₂) = (j, j - 2k)`.
    pub fn lattice(&self) -> (i64, i64) {
        (self.j as i64, self.j as i64 - 2 * self.k as i64)
    }
}

/// Rank of a marking in the lexicographic order over circles `0..nc`
/// (circle 0 most significant, `v₊ < v₋`).
pub(crate) fn mark_rank(marks: u64, nc: usize) -> usize {
    if nc == 0 {
        0
    } else {
        (marks.reverse_bits() >> (64 - nc)) as usize
    }
}

pub(crate) fn marks_of_rank(rank: usize, nc: usize) -> u64 {
    mark_rank(rank as u64, nc) as u64
}

/// Per-resolution data of the cube.
#[derive(Debug, Clone)]
pub struct State {
    pub resolution: Resolution,
    pub circles: CircleSet,
    pub degree: i32,
    /// Index of the first generator of this state inside its degree table.
    pub offset: usize,
}

#[derive(Debug, Clone, Default)]
pub struct DegreeTable {
    pub degree: i32,
    pub generators: Vec<Generator>,
    /// Resolution masks of this degree, in table order.
    pub states: Vec<u64>,
}

impl DegreeTable {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

/// All generators of the closure diagram, bucketed by homological degree.
#[derive(Debug, Clone)]
pub struct StateCube {
    word: BraidWord,
    states: Vec<State>,
    tables: BTreeMap<i32, DegreeTable>,
}

pub fn enumerate_generators(word: &BraidWord, cap: usize) -> Result<StateCube, CubeError> {
    StateCube::build(word, cap)
}

impl StateCube {
    pub fn build(word: &BraidWord, cap: usize) -> Result<StateCube, CubeError> {
        let c = word.len();
        if c > MAX_CROSSINGS {
            return Err(CubeError::ResourceCap {
                count: 1u128 << c,
                cap,
            });
        }
        let n_minus = word.negative_count() as i32;
        let n_plus = word.positive_count() as i32;

        let states: Vec<State> = (0..1u64 << c)
            .into_par_iter()
            .map(|mask| {
                let resolution = Resolution::from_mask(mask, c);
                let circles = resolve_unchecked(word, resolution);
                State {
                    resolution,
                    degree: resolution.ones() as i32 - n_minus,
                    circles,
                    offset: 0,
                }
            })
            .collect();

        let count: u128 = states.iter().map(|s| 1u128 << s.circles.circle_count).sum();
        if count > cap as u128 {
            return Err(CubeError::ResourceCap { count, cap });
        }

        let mut order: Vec<usize> = (0..states.len()).collect();
        order.sort_by_key(|&m| states[m].resolution.lex_key());

        let mut states = states;
        let mut tables: BTreeMap<i32, DegreeTable> = BTreeMap::new();
        for m in order {
            let st = &mut states[m];
            let table = tables.entry(st.degree).or_insert_with(|| DegreeTable {
                degree: st.degree,
                ..Default::default()
            });
            st.offset = table.generators.len();
            table.states.push(st.resolution.mask());
            let nc = st.circles.circle_count;
            let r = st.resolution.ones() as i32;
            for rank in 0..1usize << nc {
                let marks = marks_of_rank(rank, nc);
                let minus = marks.count_ones() as i32;
                let plus = nc as i32 - minus;
                let k: i32 = (0..nc)
                    .filter(|&ci| st.circles.nontrivial[ci])
                    .map(|ci| if marks >> ci & 1 == 1 { -1 } else { 1 })
                    .sum();
                table.generators.push(Generator {
                    resolution: st.resolution,
                    marks,
                    i: st.degree,
                    j: (plus - minus) + r + n_plus - 2 * n_minus,
                    k,
                });
            }
        }

        Ok(StateCube {
            word: word.clone(),
            states,
            tables,
        })
    }

    pub fn word(&self) -> &BraidWord {
        &self.word
    }

    pub fn state(&self, mask: u64) -> &State {
        &self.states[mask as usize]
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn table(&self, degree: i32) -> Option<&DegreeTable> {
        self.tables.get(&degree)
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.tables.keys().copied()
    }

    pub fn generator_count(&self) -> usize {
        self.tables.values().map(DegreeTable::len).sum()
    }

    /// Number of generators in `degree` (0 if the degree is empty).
    pub fn degree_len(&self, degree: i32) -> usize {
        self.tables.get(&degree).map_or(0, DegreeTable::len)
    }

    pub fn generator(&self, degree: i32, index: usize) -> &Generator {
        &self.tables[&degree].generators[index]
    }

    /// Position of the generator `(mask, marks)` within its degree table.
    pub fn index_of(&self, mask: u64, marks: u64) -> (i32, usize) {
        let st = &self.states[mask as usize];
        (st.degree, st.offset + mark_rank(marks, st.circles.circle_count))
    }

    pub fn circles_of(&self, g: &Generator) -> &CircleSet {
        &self.states[g.resolution.mask() as usize].circles
    }

    pub fn braidlike_mask(&self) -> u64 {
        braidlike_resolution(&self.word).mask()
    }
}
