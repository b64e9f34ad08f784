//! Command-line front end.
//!
//! [`run`] is the whole program minus process plumbing: it takes a parsed
//! [`RunConfig`] and returns the exit status together with the document to
//! print, so tests can drive it directly.

use std::fmt::Write as _;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::braid::{parse_braid, BraidWord};
use crate::invariants::{
    property_suite, BraidInvariants, BraidReport, DtProfile, InvariantError, PropertyCheck,
    QpObstruction, RightVeering, SuiteOptions, DEFAULT_DENOMINATOR, DEFAULT_MAX_REFINE,
};
use crate::leecomplex::ComplexError;
use crate::statecube::{CubeError, DEFAULT_GENERATOR_CAP};
use crate::Rational;

/// Environment variable holding the default generator cap.
pub const CAP_ENV: &str = "ANNULAR_RASMUSSEN_CAP";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_RESOURCE: i32 = 2;
pub const EXIT_CONSISTENCY: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    /// `d_t` at a single `t`.
    Dt { t: Rational },
    Profile,
    /// The profile plus the derived reports, with `ℳ_{t0}` queried at each `t0`.
    Report { t0s: Vec<Rational> },
    Verify { oracle: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub braid: String,
    pub denominator: u32,
    pub max_refine: u32,
    pub format: Format,
    pub cap: usize,
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(command: Command, braid: impl Into<String>) -> Self {
        RunConfig {
            command,
            braid: braid.into(),
            denominator: DEFAULT_DENOMINATOR,
            max_refine: DEFAULT_MAX_REFINE,
            format: Format::Json,
            cap: default_cap(),
            threads: None,
        }
    }
}

/// The cap from [`CAP_ENV`], or the built-in default.
pub fn default_cap() -> usize {
    std::env::var(CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_GENERATOR_CAP)
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.125`, exactly.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let s = text.trim();
    let bad = || format!("not a rational number: {text:?}");
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let numer = BigInt::from_str(&format!("{digits}{frac}")).map_err(|_| bad())?;
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        let value = Rational::new(numer, denom);
        return Ok(if negative { -value } else { value });
    }
    let value = Rational::from_str(s).map_err(|_| bad())?;
    if value.denom().is_zero() {
        return Err(bad());
    }
    Ok(value)
}

fn rational_arg(text: &str) -> Result<Rational, String> {
    parse_rational(text)
}

#[derive(Debug, Parser)]
#[command(name = "annular-rasmussen", version, about = "Annular Rasmussen invariants d_t of braid closures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Print d_t of the closure at one t in [0, 2].
    Dt {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_parser = rational_arg)]
        t: Rational,
    },
    /// Print the sampled profile and its linear segments on [0, 2].
    Profile {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Print the profile together with the derived reports.
    Report {
        #[command(flatten)]
        common: CommonArgs,
        /// Right ends t0 in [0, 1) of the slope-n membership queries.
        #[arg(long = "t0", value_parser = rational_arg)]
        t0: Vec<Rational>,
    },
    /// Run the structural property checks on the braid.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Also compare every sample against the dense rank computation.
        #[arg(long)]
        oracle: bool,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Braid word such as "3: 1 -2 1".
    pub braid: String,
    #[arg(long, default_value_t = DEFAULT_DENOMINATOR)]
    pub den: u32,
    #[arg(long, default_value_t = DEFAULT_MAX_REFINE)]
    pub refine: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Maximum number of generators; defaults to $ANNULAR_RASMUSSEN_CAP.
    #[arg(long)]
    pub cap: Option<usize>,
    #[arg(long)]
    pub threads: Option<usize>,
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        let (command, common) = match cli.command {
            CliCommand::Dt { common, t } => (Command::Dt { t }, common),
            CliCommand::Profile { common } => (Command::Profile, common),
            CliCommand::Report { common, t0 } => (Command::Report { t0s: t0 }, common),
            CliCommand::Verify { common, oracle } => (Command::Verify { oracle }, common),
        };
        RunConfig {
            command,
            braid: common.braid,
            denominator: common.den,
            max_refine: common.refine,
            format: common.format,
            cap: common.cap.unwrap_or_else(default_cap),
            threads: common.threads,
        }
    }
}

/// Exit status and the document to emit (on stdout when the status is 0,
/// on stderr otherwise).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
    extra: Option<Value>,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            kind: "invalid_input",
            message: message.into(),
            extra: None,
        }
    }
}

impl From<InvariantError> for Failure {
    fn from(e: InvariantError) -> Self {
        let message = e.to_string();
        match e {
            InvariantError::Complex(ComplexError::Cube(CubeError::ResourceCap { count, cap })) => {
                Failure {
                    code: EXIT_RESOURCE,
                    kind: "resource_cap",
                    message,
                    extra: Some(json!({ "generators": count.to_string(), "cap": cap })),
                }
            }
            InvariantError::Braid(_)
            | InvariantError::BadDenominator
            | InvariantError::Grade(crate::filtgrade::GradeError::TOutOfRange(_)) => {
                Failure::input(message)
            }
            _ => Failure {
                code: EXIT_CONSISTENCY,
                kind: "consistency",
                message,
                extra: None,
            },
        }
    }
}

/// Runs one command to completion.
pub fn run(config: &RunConfig) -> Outcome {
    let result = match config.threads {
        Some(0) => Err(Failure::input("thread count must be at least 1")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(config)),
            Err(e) => Err(Failure::input(e.to_string())),
        },
        None => dispatch(config),
    };
    match result {
        Ok(outcome) => outcome,
        Err(f) => Outcome {
            code: f.code,
            output: render_failure(&f, config.format),
        },
    }
}

fn render_failure(f: &Failure, format: Format) -> String {
    match format {
        Format::Json => {
            let mut doc = json!({ "error": f.kind, "message": f.message });
            if let Some(Value::Object(extra)) = &f.extra {
                doc.as_object_mut().expect("object").extend(extra.clone());
            }
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
        }
        _ => format!("error ({}): {}\n", f.kind, f.message),
    }
}

fn dispatch(config: &RunConfig) -> Result<Outcome, Failure> {
    if config.denominator == 0 {
        return Err(Failure::input("denominator must be at least 1"));
    }
    let word = parse_braid(&config.braid).map_err(|e| Failure::input(e.to_string()))?;
    match &config.command {
        Command::Dt { t } => {
            if t.is_negative() || *t > Rational::from_integer(2.into()) {
                return Err(Failure::input(format!("t = {t} lies outside [0, 2]")));
            }
            let inv = BraidInvariants::new(&word, config.cap)?;
            let d = inv.dt_at(t)?;
            ok(render_dt(&word, t, &d, config.format)?)
        }
        Command::Profile => {
            let inv = BraidInvariants::new(&word, config.cap)?;
            let profile = inv.profile(config.denominator, config.max_refine)?;
            crate::invariants::check_profile(&profile)?;
            let s = inv.s_invariant()?;
            ok(render_profile(&word, s, &profile, None, config.format))
        }
        Command::Report { t0s } => {
            for t0 in t0s {
                if t0.is_negative() || *t0 >= Rational::one() {
                    return Err(Failure::input(format!("t0 = {t0} lies outside [0, 1)")));
                }
            }
            let inv = BraidInvariants::new(&word, config.cap)?;
            let report = inv.report(config.denominator, config.max_refine, t0s)?;
            let extras = ReportExtras {
                report: &report,
                psi_nonzero: inv.psi_is_nonzero(),
            };
            ok(render_profile(
                &word,
                report.s_invariant,
                &report.profile,
                Some(&extras),
                config.format,
            ))
        }
        Command::Verify { oracle } => {
            let opts = SuiteOptions {
                denominator: config.denominator,
                max_refine: config.max_refine,
                conjugators: default_conjugators(&word),
                stabilize: true,
                compose_with: BraidWord::trivial(1).ok(),
                oracle: *oracle,
                cap: config.cap,
            };
            let checks = property_suite(&word, &opts);
            if let Some(c) = checks.iter().find(|c| c.name == "build" && !c.passed) {
                if let Some(w) = &c.witness {
                    if w.contains("above the cap") {
                        return Err(Failure {
                            code: EXIT_RESOURCE,
                            kind: "resource_cap",
                            message: w.clone(),
                            extra: None,
                        });
                    }
                }
            }
            let passed = checks.iter().all(|c| c.passed);
            Ok(Outcome {
                code: if passed { EXIT_OK } else { EXIT_CONSISTENCY },
                output: render_checks(&word, &checks, config.format)?,
            })
        }
    }
}

fn ok(output: String) -> Result<Outcome, Failure> {
    Ok(Outcome {
        code: EXIT_OK,
        output,
    })
}

/// Each single generator, plus the full product `σ_1 ⋯ σ_{n-1}`.
fn default_conjugators(word: &BraidWord) -> Vec<BraidWord> {
    let n = word.strands();
    let mut out: Vec<BraidWord> = (1..n as i32)
        .filter_map(|i| BraidWord::new(n, vec![i]).ok())
        .collect();
    if n > 2 {
        out.extend(BraidWord::new(n, (1..n as i32).collect()).ok());
    }
    out
}

fn q(x: &Rational) -> Value {
    Value::String(x.to_string())
}

fn braid_json(word: &BraidWord) -> Value {
    json!({ "strands": word.strands(), "letters": word.letters() })
}

fn render_dt(word: &BraidWord, t: &Rational, d: &Rational, format: Format) -> Result<String, Failure> {
    Ok(match format {
        Format::Json => pretty(&json!({
            "braid": braid_json(word),
            "writhe": word.writhe(),
            "sl": word.self_linking(),
            "t": q(t),
            "d": q(d),
        })),
        Format::Csv => format!("t,d\n{t},{d}\n"),
        Format::Text => format!("d_{t} = {d}\n"),
        Format::Svg => return Err(Failure::input("svg output needs a profile; use the profile command")),
    })
}

struct ReportExtras<'a> {
    report: &'a BraidReport,
    psi_nonzero: bool,
}

fn qp_name(qp: QpObstruction) -> &'static str {
    match qp {
        QpObstruction::Consistent => "consistent",
        QpObstruction::NotQuasipositive => "not_quasipositive",
    }
}

fn rv_value(rv: RightVeering) -> Value {
    match rv {
        RightVeering::RightVeering => Value::Bool(true),
        RightVeering::CriterionNotMet => Value::String("criterion_not_met".into()),
        RightVeering::Indeterminate => Value::String("indeterminate".into()),
    }
}

fn tri(x: Option<bool>) -> Value {
    x.map_or(Value::String("indeterminate".into()), Value::Bool)
}

fn reports_json(extras: &ReportExtras) -> Value {
    let r = extras.report;
    json!({
        "qp": qp_name(r.qp),
        "rv": rv_value(r.rv),
        "band_rank": {
            "value": q(&r.band_rank.value),
            "ceiling": r.band_rank.ceiling,
            "certified": r.band_rank.certified,
        },
        "in_S": r.memberships.in_s,
        "in_M": r.memberships.in_m.iter()
            .map(|(t0, m)| json!({ "t0": q(t0), "value": tri(*m) }))
            .collect::<Vec<_>>(),
        "slope_n_until_one": r.memberships.max_slope_until_one.iter()
            .map(|(t0, m)| json!({ "t0": q(t0), "value": tri(*m) }))
            .collect::<Vec<_>>(),
        "psi_nonzero": extras.psi_nonzero,
    })
}

fn render_profile(
    word: &BraidWord,
    s: i64,
    p: &DtProfile,
    extras: Option<&ReportExtras>,
    format: Format,
) -> String {
    match format {
        Format::Json => {
            let mut doc = json!({
                "braid": braid_json(word),
                "writhe": word.writhe(),
                "sl": word.self_linking(),
                "s_invariant": s,
                "samples": p.samples.iter()
                    .map(|x| json!({ "t": q(&x.t), "d": q(&x.d) }))
                    .collect::<Vec<_>>(),
                "segments": p.segments.iter()
                    .map(|g| json!({
                        "t0": q(&g.t0),
                        "t1": q(&g.t1),
                        "slope": q(&g.slope),
                        "intercept": q(&g.intercept),
                        "certified": g.certified,
                    }))
                    .collect::<Vec<_>>(),
            });
            if let Some(e) = extras {
                doc["reports"] = reports_json(e);
            }
            pretty(&doc)
        }
        Format::Csv => {
            let mut out = String::from("t,d\n");
            for x in &p.samples {
                let _ = writeln!(out, "{},{}", x.t, x.d);
            }
            out
        }
        Format::Text => render_text(word, s, p, extras),
        Format::Svg => render_svg(word, p),
    }
}

fn render_text(word: &BraidWord, s: i64, p: &DtProfile, extras: Option<&ReportExtras>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "braid {word}");
    let _ = writeln!(out, "writhe {}  sl {}  s {}", word.writhe(), word.self_linking(), s);
    for g in &p.segments {
        let mark = if g.certified { "" } else { "  (uncertified)" };
        let _ = writeln!(
            out,
            "[{}, {}]  d = {}·t + {}{}",
            g.t0, g.t1, g.slope, g.intercept, mark
        );
    }
    if let Some(e) = extras {
        let r = e.report;
        let _ = writeln!(out, "qp {}", qp_name(r.qp));
        let _ = writeln!(out, "rv {}", rv_value(r.rv));
        let _ = writeln!(
            out,
            "band_rank >= {} (value {}{})",
            r.band_rank.ceiling,
            r.band_rank.value,
            if r.band_rank.certified { "" } else { ", samples only" }
        );
        let _ = writeln!(out, "in_S {}", r.memberships.in_s);
        for (t0, m) in &r.memberships.in_m {
            let _ = writeln!(out, "in_M[{t0}] {}", tri(*m));
        }
        let _ = writeln!(out, "psi_nonzero {}", e.psi_nonzero);
    }
    out
}

/// A polyline of the profile. Coordinates are scaled by the common
/// denominator of every sample, so each one is an exact integer.
fn render_svg(word: &BraidWord, p: &DtProfile) -> String {
    let mut scale = BigInt::one();
    for x in &p.samples {
        for v in [&x.t, &x.d] {
            scale = num_integer::Integer::lcm(&scale, v.denom());
        }
    }
    let sc = Rational::from_integer(scale.clone());
    let px = |t: &Rational| (t * &sc).to_integer();
    let py = |d: &Rational| (-(d * &sc)).to_integer();
    let (mut ymin, mut ymax) = (BigInt::zero(), BigInt::zero());
    for x in &p.samples {
        let y = py(&x.d);
        ymin = ymin.min(y.clone());
        ymax = ymax.max(y);
    }
    let width = px(&Rational::from_integer(2.into()));
    let pad = scale.clone();
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" preserveAspectRatio="none">"#,
        -&pad,
        &ymin - &pad,
        &width + &pad * 2,
        &ymax - &ymin + &pad * 2
    );
    let _ = writeln!(out, "<title>d_t for {word}</title>");
    let _ = writeln!(
        out,
        r#"<line x1="0" y1="0" x2="{width}" y2="0" stroke="gray" vector-effect="non-scaling-stroke"/>"#
    );
    let points: Vec<String> = p
        .samples
        .iter()
        .map(|x| format!("{},{}", px(&x.t), py(&x.d)))
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="black" vector-effect="non-scaling-stroke" points="{}"/>"#,
        points.join(" ")
    );
    for b in p.breakpoints() {
        let d = p
            .segments
            .iter()
            .find(|g| g.t1 == b)
            .map(|g| g.value_at(&b))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            r#"<circle cx="{}" cy="{}" r="2" vector-effect="non-scaling-stroke"/><text x="{}" y="{}">({b}, {d})</text>"#,
            px(&b),
            py(&d),
            px(&b),
            py(&d)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn render_checks(word: &BraidWord, checks: &[PropertyCheck], format: Format) -> Result<String, Failure> {
    Ok(match format {
        Format::Json => pretty(&json!({
            "braid": braid_json(word),
            "passed": checks.iter().all(|c| c.passed),
            "checks": checks.iter()
                .map(|c| json!({ "name": c.name, "passed": c.passed, "witness": c.witness }))
                .collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut out = String::from("name,passed,witness\n");
            for c in checks {
                let witness = c.witness.clone().unwrap_or_default().replace('"', "\"\"");
                let _ = writeln!(out, "\"{}\",{},\"{}\"", c.name, c.passed, witness);
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for c in checks {
                let status = if c.passed { "ok  " } else { "FAIL" };
                let _ = match &c.witness {
                    Some(w) => writeln!(out, "{status} {}: {w}", c.name),
                    None => writeln!(out, "{status} {}", c.name),
                };
            }
            out
        }
        Format::Svg => return Err(Failure::input("svg output needs a profile; use the profile command")),
    })
}

fn pretty(v: &Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("json"))
}

/// Entry point shared by the binary: parses `args` and runs.
pub fn main_with_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&RunConfig::from(cli)),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            Outcome {
                code,
                output: e.to_string(),
            }
        }
    }
}
