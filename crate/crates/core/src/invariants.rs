//! The `d_t` profile of a braid closure and the reports derived from it.

use std::collections::HashMap;
use std::sync::Mutex;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::braid::{BraidError, BraidWord, Sign};
use crate::filtgrade::{class_grading_oracle, GradeCache, GradeError};
use crate::leecomplex::{build_complex, ChainVector, ComplexError, Direction, LeeComplex};
use crate::statecube::CubeError;
use crate::Rational;

pub const DEFAULT_DENOMINATOR: u32 = 24;
pub const DEFAULT_MAX_REFINE: u32 = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Grade(#[from] GradeError),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("denominator must be at least 1")]
    BadDenominator,
}

impl InvariantError {
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, InvariantError::Complex(ComplexError::Cube(CubeError::ResourceCap { .. })))
    }
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn frac(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub t: Rational,
    pub d: Rational,
}

/// A linear piece `d = slope · t + intercept` on `[t0, t1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub t0: Rational,
    pub t1: Rational,
    pub slope: Rational,
    pub intercept: Rational,
    pub certified: bool,
}

impl Segment {
    pub fn value_at(&self, t: &Rational) -> Rational {
        &self.slope * t + &self.intercept
    }

    fn mirrored(&self) -> Segment {
        let two = int(2);
        Segment {
            t0: &two - &self.t1,
            t1: &two - &self.t0,
            slope: -self.slope.clone(),
            intercept: &two * &self.slope + &self.intercept,
            certified: self.certified,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DtProfile {
    pub strands: usize,
    pub writhe: i64,
    /// Samples on `[0, 2]`, ascending; those past 1 are mirror images.
    pub samples: Vec<Sample>,
    /// Segments on `[0, 2]`, ascending.
    pub segments: Vec<Segment>,
}

impl DtProfile {
    pub fn value_at(&self, t: &Rational) -> Option<Rational> {
        self.samples.iter().find(|s| &s.t == t).map(|s| s.d.clone())
    }

    pub fn fully_certified(&self) -> bool {
        self.segments.iter().all(|s| s.certified)
    }

    /// Segments lying in `[0, 1]`.
    pub fn left_segments(&self) -> impl Iterator<Item = &Segment> + '_ {
        self.segments.iter().filter(|s| s.t1 <= Rational::one())
    }

    /// Segment carrying the right-hand slope at `t ∈ [0, 1)`.
    pub fn segment_right_of(&self, t: &Rational) -> Option<&Segment> {
        self.segments.iter().find(|s| &s.t0 <= t && t < &s.t1)
    }

    /// Points where the slope changes between certified neighbours, plus any
    /// boundary of an uncertified segment.
    pub fn breakpoints(&self) -> Vec<Rational> {
        self.segments
            .windows(2)
            .filter(|w| w[0].slope != w[1].slope || !w[0].certified || !w[1].certified)
            .map(|w| w[0].t1.clone())
            .collect()
    }
}

/// An integer `m` with `|m| ≤ n` and `m ≡ n (mod 2)`.
pub fn slope_allowed(slope: &Rational, n: usize) -> bool {
    slope.is_integer() && {
        let m = slope.to_integer();
        let n = num_bigint::BigInt::from(n);
        m.abs() <= n && ((&m - &n) % 2u32).is_zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QpObstruction {
    Consistent,
    NotQuasipositive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RightVeering {
    /// The final segment before `t = 1` has slope `n`: the braid is
    /// right-veering.
    RightVeering,
    /// Certified final slope below `n`; no conclusion.
    CriterionNotMet,
    /// The final segment is not certified.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandRank {
    pub value: Rational,
    pub ceiling: i64,
    /// `false` when the profile has uncertified gaps, so the maximum is only
    /// over samples.
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Memberships {
    pub in_s: bool,
    /// `None` when an uncertified segment meets `[0, t0]`.
    pub in_m: Vec<(Rational, Option<bool>)>,
    /// Slope-`n` status on `[t0, 1)` for each `t0`.
    pub max_slope_until_one: Vec<(Rational, Option<bool>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BraidReport {
    pub word: BraidWord,
    pub s_invariant: i64,
    pub self_linking: i64,
    pub profile: DtProfile,
    pub qp: QpObstruction,
    pub rv: RightVeering,
    pub band_rank: BandRank,
    pub memberships: Memberships,
}

/// A braid with its complex built once; `d_t` values are cached.
pub struct BraidInvariants {
    word: BraidWord,
    complex: LeeComplex,
    up: ChainVector,
    grades: GradeCache,
    values: Mutex<HashMap<Rational, Rational>>,
}

impl BraidInvariants {
    pub fn new(word: &BraidWord, cap: usize) -> Result<Self, InvariantError> {
        let complex = build_complex(word, cap)?;
        let up = complex.canonical_class(Direction::Up);
        Ok(BraidInvariants {
            word: word.clone(),
            complex,
            up,
            grades: GradeCache::new(),
            values: Mutex::new(HashMap::new()),
        })
    }

    pub fn word(&self) -> &BraidWord {
        &self.word
    }

    pub fn complex(&self) -> &LeeComplex {
        &self.complex
    }

    fn n(&self) -> i64 {
        self.word.strands() as i64
    }

    /// `d_t` computed at `t` itself, without the mirror symmetry.
    pub fn dt_direct(&self, t: &Rational) -> Result<Rational, InvariantError> {
        if let Some(d) = self.values.lock().expect("value cache").get(t) {
            return Ok(d.clone());
        }
        let d = self.grades.class_grading(&self.complex, &self.up, t)?;
        self.values
            .lock()
            .expect("value cache")
            .insert(t.clone(), d.clone());
        Ok(d)
    }

    /// `d_t`; values with `t > 1` are read off at `2 - t`.
    pub fn dt_at(&self, t: &Rational) -> Result<Rational, InvariantError> {
        if t.is_negative() || *t > int(2) {
            return Err(GradeError::TOutOfRange(t.clone()).into());
        }
        if *t > Rational::one() {
            self.dt_direct(&(int(2) - t))
        } else {
            self.dt_direct(t)
        }
    }

    /// `min(gr[𝔰₊], gr[𝔰₋])` with `𝔰± = 𝔰↑ ∓ 𝔰↓`.
    pub fn dt_span(&self, t: &Rational) -> Result<Rational, InvariantError> {
        let down = self.complex.canonical_class(Direction::Down);
        let zs = [self.up.sub(&down), self.up.add(&down)];
        let gr = self.grades.class_gradings(&self.complex, &zs, t)?;
        Ok(gr.into_iter().min().expect("two gradings"))
    }

    /// `d_t` from the rank-based oracle instead of greedy reduction.
    pub fn dt_oracle(&self, t: &Rational) -> Result<Rational, InvariantError> {
        Ok(class_grading_oracle(&self.complex, &self.up, t)?)
    }

    /// `d_t` at many points, in parallel.
    pub fn dt_many(&self, ts: &[Rational]) -> Result<Vec<Rational>, InvariantError> {
        ts.par_iter().map(|t| self.dt_at(t)).collect()
    }

    pub fn s_invariant(&self) -> Result<i64, InvariantError> {
        let d0 = self.dt_at(&Rational::zero())?;
        if !d0.is_integer() {
            return Err(InvariantError::Consistency(format!("d_0 = {d0} is not an integer")));
        }
        let s = d0.to_integer() + 1;
        i64::try_from(s).map_err(|_| InvariantError::Consistency("s out of range".into()))
    }

    pub fn qp_obstruction(&self) -> Result<QpObstruction, InvariantError> {
        let d0 = self.dt_at(&Rational::zero())?;
        Ok(if d0 == int(self.word.self_linking()) {
            QpObstruction::Consistent
        } else {
            QpObstruction::NotQuasipositive
        })
    }

    pub fn psi_is_nonzero(&self) -> bool {
        self.complex.psi_is_nonzero()
    }

    /// Samples `d_t` at `k / denominator` on `[0, 1]`, refines gaps that are
    /// not yet certified, and mirrors the result to `[1, 2]`.
    pub fn profile(&self, denominator: u32, max_refine: u32) -> Result<DtProfile, InvariantError> {
        if denominator == 0 {
            return Err(InvariantError::BadDenominator);
        }
        let n = self.word.strands();
        let ts: Vec<Rational> = (0..=denominator as i64)
            .map(|k| frac(k, denominator as i64))
            .collect();
        let ds = self.dt_many(&ts)?;
        let mut pts: Vec<Sample> = ts
            .into_iter()
            .zip(ds)
            .map(|(t, d)| Sample { t, d })
            .collect();

        for _ in 0..max_refine {
            let certified = certify_gaps(&pts, n);
            let new_ts: Vec<Rational> = (0..pts.len() - 1)
                .filter(|&i| !certified[i])
                .map(|i| refinement_point(&pts, i))
                .collect();
            if new_ts.is_empty() {
                break;
            }
            let new_ds = self.dt_many(&new_ts)?;
            pts.extend(new_ts.into_iter().zip(new_ds).map(|(t, d)| Sample { t, d }));
            pts.sort_by(|a, b| a.t.cmp(&b.t));
            pts.dedup_by(|a, b| a.t == b.t);
        }

        let certified = certify_gaps(&pts, n);
        let mut left: Vec<Segment> = Vec::new();
        for i in 0..pts.len().saturating_sub(1) {
            let (a, b) = (&pts[i], &pts[i + 1]);
            let slope = gap_slope(a, b);
            let intercept = &a.d - &slope * &a.t;
            match left.last_mut() {
                Some(last) if certified[i] && last.certified && last.slope == slope => {
                    last.t1 = b.t.clone();
                }
                _ => left.push(Segment {
                    t0: a.t.clone(),
                    t1: b.t.clone(),
                    slope,
                    intercept,
                    certified: certified[i],
                }),
            }
        }

        let mut segments = left.clone();
        segments.extend(left.iter().rev().map(Segment::mirrored));
        let mut samples = pts.clone();
        samples.extend(pts.iter().rev().skip(1).map(|s| Sample {
            t: int(2) - &s.t,
            d: s.d.clone(),
        }));
        Ok(DtProfile {
            strands: n,
            writhe: self.word.writhe(),
            samples,
            segments,
        })
    }

    pub fn rv_sufficient(&self, profile: &DtProfile) -> RightVeering {
        match profile.left_segments().last() {
            Some(seg) if seg.certified => {
                if seg.slope == int(self.n()) {
                    RightVeering::RightVeering
                } else {
                    RightVeering::CriterionNotMet
                }
            }
            Some(_) => RightVeering::Indeterminate,
            None => RightVeering::RightVeering,
        }
    }

    /// `max |d_t + n|1 - t||` over the profile's sample points.
    pub fn band_rank_lower_bound(&self, profile: &DtProfile) -> BandRank {
        let n = int(self.n());
        let value = profile
            .samples
            .iter()
            .map(|s| (&s.d + &n * (Rational::one() - &s.t).abs()).abs())
            .max()
            .unwrap_or_else(Rational::zero);
        let ceiling = i64::try_from(value.ceil().to_integer()).expect("band rank fits i64");
        BandRank {
            value,
            ceiling,
            certified: profile.fully_certified(),
        }
    }

    pub fn monoid_memberships(
        &self,
        profile: &DtProfile,
        t0s: &[Rational],
    ) -> Result<Memberships, InvariantError> {
        let n = int(self.n());
        let in_s = self.qp_obstruction()? == QpObstruction::Consistent;
        let slope_n_on = |lo: &Rational, hi: &Rational, closed: bool| -> Option<bool> {
            let mut all = true;
            for seg in profile.left_segments() {
                let meets = &seg.t0 < hi || (closed && &seg.t0 == hi && hi < &Rational::one());
                if seg.t1 > *lo && meets {
                    if !seg.certified {
                        return None;
                    }
                    all &= seg.slope == n;
                }
            }
            Some(all)
        };
        let mut in_m = Vec::new();
        let mut until_one = Vec::new();
        for t0 in t0s {
            if t0.is_negative() || *t0 >= Rational::one() {
                return Err(GradeError::TOutOfRange(t0.clone()).into());
            }
            let m = slope_n_on(&Rational::zero(), t0, true);
            if let Some(m) = m {
                if m != in_s {
                    return Err(InvariantError::Consistency(format!(
                        "slope-n membership on [0, {t0}] is {m} but d_0 = sl is {in_s}"
                    )));
                }
            }
            in_m.push((t0.clone(), m));
            until_one.push((t0.clone(), slope_n_on(t0, &Rational::one(), false)));
        }
        Ok(Memberships {
            in_s,
            in_m,
            max_slope_until_one: until_one,
        })
    }

    pub fn report(
        &self,
        denominator: u32,
        max_refine: u32,
        t0s: &[Rational],
    ) -> Result<BraidReport, InvariantError> {
        let profile = self.profile(denominator, max_refine)?;
        check_profile(&profile)?;
        let mut t0s = t0s.to_vec();
        if !t0s.contains(&Rational::zero()) {
            t0s.insert(0, Rational::zero());
        }
        Ok(BraidReport {
            word: self.word.clone(),
            s_invariant: self.s_invariant()?,
            self_linking: self.word.self_linking(),
            qp: self.qp_obstruction()?,
            rv: self.rv_sufficient(&profile),
            band_rank: self.band_rank_lower_bound(&profile),
            memberships: self.monoid_memberships(&profile, &t0s)?,
            profile,
        })
    }
}

fn gap_slope(a: &Sample, b: &Sample) -> Rational {
    (&b.d - &a.d) / (&b.t - &a.t)
}

/// A gap is certified when its slope is allowed and it is collinear with a
/// neighbouring gap.
fn certify_gaps(pts: &[Sample], n: usize) -> Vec<bool> {
    let gaps = pts.len().saturating_sub(1);
    let slopes: Vec<Rational> = (0..gaps).map(|i| gap_slope(&pts[i], &pts[i + 1])).collect();
    (0..gaps)
        .map(|i| {
            slope_allowed(&slopes[i], n)
                && ((i > 0 && slopes[i - 1] == slopes[i])
                    || (i + 1 < gaps && slopes[i + 1] == slopes[i]))
        })
        .collect()
}

/// Where to sample inside gap `i`: the crossing of the neighbouring lines
/// when it falls strictly inside, otherwise the midpoint.
fn refinement_point(pts: &[Sample], i: usize) -> Rational {
    let (a, b) = (&pts[i], &pts[i + 1]);
    let mid = (&a.t + &b.t) / int(2);
    if i == 0 || i + 2 >= pts.len() {
        return mid;
    }
    let s1 = gap_slope(&pts[i - 1], a);
    let s2 = gap_slope(b, &pts[i + 2]);
    if s1 == s2 {
        return mid;
    }
    let c1 = &a.d - &s1 * &a.t;
    let c2 = &b.d - &s2 * &b.t;
    let x = (&c2 - &c1) / (&s1 - &s2);
    if a.t < x && x < b.t {
        x
    } else {
        mid
    }
}

/// Structural checks every computed profile must pass.
pub fn check_profile(p: &DtProfile) -> Result<(), InvariantError> {
    let fail = |m: String| Err(InvariantError::Consistency(m));
    let w = int(p.writhe);
    if p.value_at(&Rational::one()) != Some(w.clone()) {
        return fail(format!("d_1 differs from the writhe {w}"));
    }
    let n = int(p.strands as i64);
    for s in &p.samples {
        let lower = &w - &n * (Rational::one() - &s.t).abs();
        if s.d < lower {
            return fail(format!("d_{} = {} is below {lower}", s.t, s.d));
        }
    }
    for seg in p.segments.iter().filter(|s| s.certified) {
        if !slope_allowed(&seg.slope, p.strands) {
            return fail(format!("certified slope {} is not allowed", seg.slope));
        }
    }
    let left: Vec<&Segment> = p.left_segments().collect();
    if let Some(first) = left.iter().position(|s| s.certified && s.slope == n) {
        if left[first..].iter().any(|s| s.certified && s.slope != n) {
            return fail("slope n does not persist up to t = 1".into());
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct SuiteOptions {
    pub denominator: u32,
    pub max_refine: u32,
    pub conjugators: Vec<BraidWord>,
    pub stabilize: bool,
    pub compose_with: Option<BraidWord>,
    /// Also compare greedy gradings with the rank oracle at every sample.
    pub oracle: bool,
    pub cap: usize,
}

fn check(name: &str, result: Result<Option<String>, InvariantError>) -> PropertyCheck {
    match result {
        Ok(None) => PropertyCheck {
            name: name.into(),
            passed: true,
            witness: None,
        },
        Ok(Some(w)) => PropertyCheck {
            name: name.into(),
            passed: false,
            witness: Some(w),
        },
        Err(e) => PropertyCheck {
            name: name.into(),
            passed: false,
            witness: Some(e.to_string()),
        },
    }
}

/// Compares `f(t)` with `expect(t)` at each `t`, reporting the first miss.
fn compare_at(
    ts: &[Rational],
    actual: &[Rational],
    expect: impl Fn(&Rational, &Rational) -> bool,
) -> Option<String> {
    ts.iter()
        .zip(actual)
        .find(|(t, d)| !expect(t, d))
        .map(|(t, d)| format!("t = {t}: d = {d}"))
}

/// Evaluates every structural property of `d_t` on one braid.
pub fn property_suite(word: &BraidWord, opts: &SuiteOptions) -> Vec<PropertyCheck> {
    let base = match BraidInvariants::new(word, opts.cap) {
        Ok(b) => b,
        Err(e) => return vec![check("build", Err(e))],
    };
    let n = word.strands();
    let w = int(word.writhe());
    let den = opts.denominator.max(1) as i64;
    let ts: Vec<Rational> = (0..=den).map(|k| frac(k, den)).collect();
    let mut out = Vec::new();

    let profile = base.profile(opts.denominator.max(1), opts.max_refine);
    let left = base.dt_many(&ts);
    out.push(check(
        "d_1 equals writhe",
        base.dt_at(&Rational::one())
            .map(|d| (d != w).then(|| format!("d_1 = {d}, w = {w}"))),
    ));
    out.push(check(
        "d_0 equals d_2",
        (|| {
            let d0 = base.dt_direct(&Rational::zero())?;
            let d2 = base.dt_direct(&int(2))?;
            Ok((d0 != d2).then(|| format!("d_0 = {d0}, d_2 = {d2}")))
        })(),
    ));
    out.push(check(
        "mirror symmetry",
        (|| {
            let left = left.clone()?;
            let mirrored: Vec<Rational> = ts
                .par_iter()
                .map(|t| base.dt_direct(&(int(2) - t)))
                .collect::<Result<_, _>>()?;
            Ok(ts
                .iter()
                .zip(left.iter().zip(&mirrored))
                .find(|(_, (a, b))| a != b)
                .map(|(t, (a, b))| format!("d at {t} is {a}, at {} is {b}", int(2) - t)))
        })(),
    ));
    out.push(check(
        "span cross-check",
        (|| {
            let left = left.clone()?;
            let span: Vec<Rational> = ts
                .par_iter()
                .map(|t| base.dt_span(t))
                .collect::<Result<_, _>>()?;
            Ok(compare_at(&ts, &span, |t, d| {
                left[ts.iter().position(|x| x == t).expect("sample")] == *d
            }))
        })(),
    ));
    out.push(check(
        "slope quantization",
        profile.clone().map(|p| {
            p.segments
                .iter()
                .find(|s| s.certified && !slope_allowed(&s.slope, n))
                .map(|s| format!("slope {} on [{}, {}]", s.slope, s.t0, s.t1))
        }),
    ));
    out.push(check(
        "lower bound",
        left.clone().map(|left| {
            compare_at(&ts, &left, |t, d| {
                *d >= &w - int(n as i64) * (Rational::one() - t).abs()
            })
        }),
    ));
    out.push(check(
        "profile consistency",
        profile.clone().and_then(|p| check_profile(&p).map(|_| None)),
    ));
    out.push(check(
        "M_0 equals S",
        profile.clone().and_then(|p| {
            let in_s = base.qp_obstruction()? == QpObstruction::Consistent;
            let first = p.segment_right_of(&Rational::zero()).cloned();
            Ok(match first {
                Some(seg) if seg.certified => {
                    let m0 = seg.slope == int(n as i64);
                    (m0 != in_s).then(|| format!("in_S = {in_s}, slope at 0 = {}", seg.slope))
                }
                _ => None,
            })
        }),
    ));
    out.push(check(
        "qp consistency",
        profile.clone().and_then(|p| {
            let qp = base.qp_obstruction()?;
            let all_n = p
                .left_segments()
                .all(|s| s.certified && s.slope == int(n as i64));
            let uncertified = p.left_segments().any(|s| !s.certified);
            Ok((!uncertified && (qp == QpObstruction::Consistent) != all_n)
                .then(|| format!("qp = {qp:?}, slope n throughout = {all_n}")))
        }),
    ));
    for g in &opts.conjugators {
        out.push(check(
            &format!("conjugation by {g}"),
            (|| {
                let left = left.clone()?;
                let conj = BraidInvariants::new(&word.conjugate(g)?, opts.cap)?;
                let other = conj.dt_many(&ts)?;
                Ok(compare_at(&ts, &other, |t, d| {
                    left[ts.iter().position(|x| x == t).expect("sample")] == *d
                }))
            })(),
        ));
    }
    if opts.stabilize {
        for sign in [Sign::Positive, Sign::Negative] {
            out.push(check(
                &format!("stabilization {sign:?}"),
                (|| {
                    let left = left.clone()?;
                    let st = BraidInvariants::new(&word.stabilize(sign), opts.cap)?;
                    let other = st.dt_many(&ts)?;
                    Ok(compare_at(&ts, &other, |t, d| {
                        let base = &left[ts.iter().position(|x| x == t).expect("sample")];
                        base - t <= *d && *d <= base + t
                    }))
                })(),
            ));
        }
    }
    if let Some(inner) = &opts.compose_with {
        out.push(check(
            &format!("additivity with {inner}"),
            (|| {
                let left = left.clone()?;
                let other = BraidInvariants::new(inner, opts.cap)?.dt_many(&ts)?;
                let both =
                    BraidInvariants::new(&word.annular_compose(inner), opts.cap)?.dt_many(&ts)?;
                Ok(compare_at(&ts, &both, |t, d| {
                    let i = ts.iter().position(|x| x == t).expect("sample");
                    *d == &left[i] + &other[i]
                }))
            })(),
        ));
    }
    if opts.oracle {
        out.push(check(
            "greedy equals oracle",
            (|| {
                let left = left.clone()?;
                let oracle: Vec<Rational> = ts
                    .par_iter()
                    .map(|t| base.dt_oracle(t))
                    .collect::<Result<_, _>>()?;
                Ok(compare_at(&ts, &oracle, |t, d| {
                    left[ts.iter().position(|x| x == t).expect("sample")] == *d
                }))
            })(),
        ));
    }
    out
}
