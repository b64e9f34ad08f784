//! Acceptance run: one PASS/FAIL line per criterion. All comparisons are
//! exact rational equality (tolerance 0).

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use annular_rasmussen::braid::{parse_braid, BraidWord};
use annular_rasmussen::invariants::{
    property_suite, BraidInvariants, DtProfile, PropertyCheck, QpObstruction, RightVeering,
    SuiteOptions,
};
use annular_rasmussen::leecomplex::{build_complex, Direction};
use annular_rasmussen::statecube::DEFAULT_GENERATOR_CAP;
use annular_rasmussen::Rational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CAP: usize = DEFAULT_GENERATOR_CAP;

fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn word(text: &str) -> BraidWord {
    parse_braid(text).expect("valid braid")
}

struct Ledger {
    failures: usize,
    /// Braids whose M_0 = S status has been checked, with any mismatch.
    m0: Vec<(String, Result<(), String>)>,
    /// Words already audited.
    audited: BTreeSet<String>,
    audit_failures: Vec<String>,
}

impl Ledger {
    fn report(&mut self, id: &str, title: &str, start: Instant, result: Result<String, String>) {
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {id} {title} [tolerance 0, {secs:.1}s] {detail}"),
            Err(why) => {
                self.failures += 1;
                println!("FAIL {id} {title} [tolerance 0, {secs:.1}s] {why}");
            }
        }
    }

    fn audit(&mut self, w: &BraidWord) {
        if !self.audited.insert(w.to_string()) {
            return;
        }
        let c = match build_complex(w, CAP) {
            Ok(c) => c,
            Err(e) => {
                self.audit_failures.push(format!("{w}: {e}"));
                return;
            }
        };
        let a = c.audit();
        if !a.all_pass() {
            self.audit_failures.push(format!("{w}: {a:?}"));
        }
        let n = w.strands();
        let (up, down) = (c.canonical_class(Direction::Up), c.canonical_class(Direction::Down));
        let (plain, alt) = if n % 2 == 0 { (&up, &down) } else { (&down, &up) };
        if c.sl2_orbit_sum(false) != *plain || c.sl2_orbit_sum(true) != *alt {
            self.audit_failures.push(format!("{w}: sl2 orbit sum differs from canonical class"));
        }
    }

    /// Records whether `d_0 = -n + w` agrees with a certified slope `n` at 0.
    fn m0(&mut self, w: &BraidWord, inv: &BraidInvariants, p: &DtProfile) {
        let n = int(w.strands() as i64);
        let result = (|| {
            let in_s = inv.qp_obstruction().map_err(|e| e.to_string())? == QpObstruction::Consistent;
            let d0 = p.value_at(&Rational::zero()).ok_or("no sample at 0")?;
            if (d0 == int(w.writhe()) - &n) != in_s {
                return Err("qp report disagrees with d_0".to_string());
            }
            match p.segment_right_of(&Rational::zero()) {
                Some(seg) if seg.certified => {
                    if (seg.slope == n) != in_s {
                        Err(format!("in_S = {in_s} but slope at 0 is {}", seg.slope))
                    } else {
                        Ok(())
                    }
                }
                _ => Err("first segment uncertified".to_string()),
            }
        })();
        self.m0.push((w.to_string(), result));
    }

    fn suite_m0(&mut self, w: &BraidWord, checks: &[PropertyCheck]) {
        let r = checks
            .iter()
            .find(|c| c.name == "M_0 equals S")
            .map_or(Err("missing check".to_string()), |c| {
                if c.passed {
                    Ok(())
                } else {
                    Err(c.witness.clone().unwrap_or_default())
                }
            });
        self.m0.push((w.to_string(), r));
    }
}

/// `d_0`, `d_1`, `d_2` of `p`, provided every sample lies on the tent
/// through them.
fn tent(p: &DtProfile) -> Result<(Rational, Rational, Rational), String> {
    let at = |t: Rational| p.value_at(&t).ok_or(format!("no sample at {t}"));
    let (d0, d1, d2) = (at(int(0))?, at(int(1))?, at(int(2))?);
    let slope = &d1 - &d0;
    for s in &p.samples {
        let expect = &d1 - &slope * (Rational::one() - &s.t).abs();
        if s.d != expect {
            return Err(format!("not a tent: d({}) = {}, expected {expect}", s.t, s.d));
        }
    }
    Ok((d0, d1, d2))
}

fn expect_tent(
    ledger: &mut Ledger,
    text: &str,
    den: u32,
    expected: (i64, i64, i64),
) -> Result<String, String> {
    let w = word(text);
    let inv = BraidInvariants::new(&w, CAP).map_err(|e| e.to_string())?;
    let p = inv.profile(den, 4).map_err(|e| e.to_string())?;
    ledger.m0(&w, &inv, &p);
    let (d0, d1, d2) = tent(&p)?;
    let want = (int(expected.0), int(expected.1), int(expected.2));
    if (d0.clone(), d1.clone(), d2.clone()) != want {
        return Err(format!("{text}: got ({d0}, {d1}, {d2}), want {expected:?}"));
    }
    if !p.fully_certified() {
        return Err(format!("{text}: profile not fully certified"));
    }
    Ok(format!("({d0}, {d1}, {d2})"))
}

fn random_braid(rng: &mut ChaCha8Rng, max_strands: usize, max_len: usize) -> BraidWord {
    let n = rng.gen_range(2..=max_strands);
    let len = rng.gen_range(0..=max_len);
    let letters = (0..len)
        .map(|_| {
            let g = rng.gen_range(1..n as i32);
            if rng.gen_bool(0.5) {
                g
            } else {
                -g
            }
        })
        .collect();
    BraidWord::new(n, letters).expect("valid")
}

fn random_conjugator(rng: &mut ChaCha8Rng, n: usize) -> BraidWord {
    let len = rng.gen_range(1..=2);
    let letters = (0..len)
        .map(|_| {
            let g = rng.gen_range(1..n as i32);
            if rng.gen_bool(0.5) {
                g
            } else {
                -g
            }
        })
        .collect();
    BraidWord::new(n, letters).expect("valid")
}

/// A product of conjugated positive generators `w σ_i w⁻¹`, at most 9 letters.
fn random_qp(rng: &mut ChaCha8Rng) -> BraidWord {
    let n = rng.gen_range(2..=4);
    let mut letters: Vec<i32> = Vec::new();
    loop {
        let clen = rng.gen_range(0..=2);
        let conj: Vec<i32> = (0..clen)
            .map(|_| {
                let g = rng.gen_range(1..n as i32);
                if rng.gen_bool(0.5) {
                    g
                } else {
                    -g
                }
            })
            .collect();
        let band = 2 * clen + 1;
        if letters.len() + band > 9 {
            break;
        }
        letters.extend(&conj);
        letters.push(rng.gen_range(1..n as i32));
        letters.extend(conj.iter().rev().map(|g| -g));
        if rng.gen_bool(0.3) {
            break;
        }
    }
    if letters.is_empty() {
        letters.push(1);
    }
    BraidWord::new(n, letters).expect("valid")
}

fn first_failure(checks: &[PropertyCheck], names: &[&str]) -> Option<String> {
    checks
        .iter()
        .filter(|c| names.iter().any(|n| c.name.starts_with(n)))
        .find(|c| !c.passed)
        .map(|c| format!("{}: {}", c.name, c.witness.clone().unwrap_or_default()))
}

fn main() -> ExitCode {
    let mut ledger = Ledger {
        failures: 0,
        m0: Vec::new(),
        audited: BTreeSet::new(),
        audit_failures: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    // 1
    let start = Instant::now();
    let text = "3: -1 -1 -1 -1 -1 2 1 1 1 2";
    let r = expect_tent(&mut ledger, text, 8, (-3, 0, -3));
    ledger.audit(&word(text));
    ledger.report("1", "tent (-3, 0, -3) at denominator 8", start, r);

    // 2
    let start = Instant::now();
    let r = (|| {
        let mut got = Vec::new();
        for (k, want) in [(5, (0, 1, 0)), (6, (-1, 0, -1)), (7, (-2, -1, -2))] {
            let text = format!("3: 1 2 1 2 1 2{}", " -2".repeat(k));
            got.push(expect_tent(&mut ledger, &text, 8, want)?);
            ledger.audit(&word(&text));
        }
        for (k, want) in [(4, true), (5, false)] {
            let text = format!("3: 1 2 1 2 1 2{}", " -2".repeat(k));
            let c = build_complex(&word(&text), CAP).map_err(|e| e.to_string())?;
            if c.psi_is_nonzero() != want {
                return Err(format!("psi nonvanishing for k = {k} is not {want}"));
            }
        }
        Ok(format!("{} and psi (k=4 true, k=5 false)", got.join(" ")))
    })();
    ledger.report("2", "twisted torus tents for k = 5, 6, 7 and psi", start, r);

    // 3
    let start = Instant::now();
    let r = (|| {
        let mut got = Vec::new();
        for text in ["4: 1 1 2 -1 -3 2 -3", "4: 1 -2 1 -2 3 -2 3"] {
            got.push(expect_tent(&mut ledger, text, 8, (-1, 1, -1))?);
            ledger.audit(&word(text));
        }
        Ok(got.join(" "))
    })();
    ledger.report("3", "both 4-braids give (-1, 1, -1)", start, r);

    // 4
    let start = Instant::now();
    let text = "4: 3 -2 -2 3 3 2 -3 -1 2 1 1";
    let r = (|| {
        let w = word(text);
        let inv = BraidInvariants::new(&w, CAP).map_err(|e| e.to_string())?;
        let report = inv.report(24, 4, &[q(2, 3)]).map_err(|e| e.to_string())?;
        let p = &report.profile;
        ledger.m0(&w, &inv, p);
        for (t, d) in [(q(0, 1), q(1, 1)), (q(1, 2), q(2, 1)), (q(2, 3), q(5, 3)), (q(1, 1), q(3, 1))] {
            let got = p.value_at(&t).ok_or(format!("no sample at {t}"))?;
            if got != d {
                return Err(format!("d_{t} = {got}, want {d}"));
            }
        }
        if report.s_invariant != 2 {
            return Err(format!("s = {}", report.s_invariant));
        }
        let kinks: Vec<Rational> = p
            .breakpoints()
            .into_iter()
            .filter(|t| *t <= Rational::one())
            .collect();
        if kinks != vec![q(1, 2), q(2, 3), q(1, 1)] || !p.fully_certified() {
            return Err(format!("breakpoints {kinks:?}"));
        }
        if report.rv != RightVeering::RightVeering || report.qp != QpObstruction::NotQuasipositive {
            return Err(format!("rv {:?}, qp {:?}", report.rv, report.qp));
        }
        Ok("d_0 = 1, d_1/2 = 2, d_2/3 = 5/3, d_1 = 3, kinks {1/2, 2/3, 1}, right-veering, not QP".into())
    })();
    ledger.audit(&word(text));
    ledger.report("4", "A(0,0) profile at denominator 24", start, r);

    // 5
    let start = Instant::now();
    let r = (|| {
        for _ in 0..20 {
            let w = random_qp(&mut rng);
            let inv = BraidInvariants::new(&w, CAP).map_err(|e| e.to_string())?;
            let p = inv.profile(12, 4).map_err(|e| e.to_string())?;
            ledger.m0(&w, &inv, &p);
            ledger.audit(&w);
            let n = int(w.strands() as i64);
            for s in &p.samples {
                let expect = int(w.writhe()) - &n * (Rational::one() - &s.t).abs();
                if s.d != expect {
                    return Err(format!("{w}: d_{} = {}, want {expect}", s.t, s.d));
                }
            }
        }
        Ok("20 words".to_string())
    })();
    ledger.report("5", "quasipositive tent law", start, r);

    // 6 and 8 (oracle part)
    let start = Instant::now();
    let mut oracle_words = 0;
    let mut oracle_failure = None;
    let r = (|| {
        for _ in 0..50 {
            let w = random_braid(&mut rng, 4, 7);
            let conj: Vec<BraidWord> = (0..3).map(|_| random_conjugator(&mut rng, w.strands())).collect();
            for g in &conj {
                ledger.audit(&w.conjugate(g).expect("same strands"));
            }
            ledger.audit(&w);
            let oracle = w.len() <= 6;
            let opts = SuiteOptions {
                denominator: 12,
                max_refine: 4,
                conjugators: conj,
                stabilize: false,
                compose_with: None,
                oracle,
                cap: CAP,
            };
            let checks = property_suite(&w, &opts);
            ledger.suite_m0(&w, &checks);
            if oracle {
                oracle_words += 1;
                if let Some(f) = first_failure(&checks, &["greedy equals oracle"]) {
                    oracle_failure.get_or_insert(format!("{w}: {f}"));
                }
            }
            let names = [
                "build",
                "d_1 equals writhe",
                "d_0 equals d_2",
                "mirror symmetry",
                "span cross-check",
                "slope quantization",
                "lower bound",
                "profile consistency",
                "qp consistency",
                "conjugation",
            ];
            if let Some(f) = first_failure(&checks, &names) {
                return Err(format!("{w}: {f}"));
            }
        }
        Ok("50 braids, 3 conjugators each".to_string())
    })();
    ledger.report("6", "property suite on random braids", start, r);

    // 7
    let start = Instant::now();
    let r = (|| {
        for _ in 0..20 {
            let w = random_braid(&mut rng, 4, 7);
            for sign in [annular_rasmussen::braid::Sign::Positive, annular_rasmussen::braid::Sign::Negative] {
                ledger.audit(&w.stabilize(sign));
            }
            let opts = SuiteOptions {
                denominator: 12,
                max_refine: 4,
                stabilize: true,
                cap: CAP,
                ..SuiteOptions::default()
            };
            let checks = property_suite(&w, &opts);
            ledger.suite_m0(&w, &checks);
            if let Some(f) = first_failure(&checks, &["build", "stabilization"]) {
                return Err(format!("{w}: {f}"));
            }
        }
        for _ in 0..10 {
            let a = random_braid(&mut rng, 3, 5);
            let b = random_braid(&mut rng, 2, 4);
            ledger.audit(&a.annular_compose(&b));
            let opts = SuiteOptions {
                denominator: 12,
                max_refine: 4,
                compose_with: Some(b.clone()),
                cap: CAP,
                ..SuiteOptions::default()
            };
            let checks = property_suite(&a, &opts);
            ledger.suite_m0(&a, &checks);
            if let Some(f) = first_failure(&checks, &["build", "additivity"]) {
                return Err(format!("{a} with {b}: {f}"));
            }
        }
        Ok("20 stabilized braids, 10 composed pairs".to_string())
    })();
    ledger.report("7", "stabilization bounds and additivity", start, r);

    // 8
    let start = Instant::now();
    let r = if let Some(f) = ledger.audit_failures.first() {
        Err(format!("{} audit failures, first {f}", ledger.audit_failures.len()))
    } else if let Some(f) = &oracle_failure {
        Err(f.clone())
    } else if oracle_words == 0 {
        Err("no braid of at most 6 letters was compared with the oracle".into())
    } else {
        Ok(format!(
            "{} complexes audited, {} braids compared with the oracle",
            ledger.audited.len(),
            oracle_words
        ))
    };
    ledger.report("8", "algebraic audits and greedy = oracle", start, r);

    // 9
    let start = Instant::now();
    let bad: Vec<String> = ledger
        .m0
        .iter()
        .filter_map(|(w, r)| r.as_ref().err().map(|e| format!("{w}: {e}")))
        .collect();
    let r = match bad.first() {
        Some(f) => Err(format!("{} mismatches, first {f}", bad.len())),
        None => Ok(format!("{} braids", ledger.m0.len())),
    };
    ledger.report("9", "M_0 = S on every computed braid", start, r);

    if ledger.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
