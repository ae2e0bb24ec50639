//! Test-vector files and containment reports.
//!
//! A vector file has one header line and one line per case:
//!
//! ```text
//! vectors 1 atan 1
//! 53 0x1p+0 0x1.921fb54442d18469898cc51701b839a2p-1
//! ```
//!
//! Each case line holds `p x y_ref`, where `y_ref` is the reference value
//! computed independently at `p + 64` bits. Lines starting with `#` are
//! comments. A results file, as written by `eval --batch`, starts with
//! `results 1 <function> <count>` and has one `p x mid rad` line per case
//! (`p x error <message>` where the evaluation failed).

use crate::functions::{eval, Ball, BigFloat, Error, Func, Mag};
use std::fmt::{self, Write as _};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum VectorError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Mismatch(String),
}

fn perr(line: usize, msg: impl Into<String>) -> VectorError {
    VectorError::Parse { line, msg: msg.into() }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    pub p: u64,
    pub x: BigFloat,
    pub y: BigFloat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorFile {
    pub func: Func,
    pub cases: Vec<Vector>,
}

/// Header `<word> <version> <function> <count>`, `word` being `vectors` or
/// `results`; returns the function and count.
fn parse_header(word: &str, line: &str) -> Result<(Func, usize), VectorError> {
    let f: Vec<&str> = line.split_whitespace().collect();
    if f.len() != 4 || f[0] != word {
        return Err(perr(1, format!("expected `{word} <version> <function> <count>`, found `{line}`")));
    }
    if f[1] != FORMAT_VERSION.to_string() {
        return Err(perr(1, format!("unsupported format version {}", f[1])));
    }
    let func = f[2].parse::<Func>().map_err(|e| perr(1, e))?;
    let count = f[3].parse().map_err(|_| perr(1, format!("bad count `{}`", f[3])))?;
    Ok((func, count))
}

/// Non-comment lines split into fields, with their 1-based line numbers.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i, l.split_whitespace().collect()))
}

fn parse_prec(s: &str, line: usize) -> Result<u64, VectorError> {
    s.parse().map_err(|_| perr(line, format!("bad precision `{s}`")))
}

fn parse_float(s: &str, line: usize) -> Result<BigFloat, VectorError> {
    s.parse().map_err(|e: crate::functions::ParseError| perr(line, e.to_string()))
}

impl VectorFile {
    pub fn parse(text: &str) -> Result<VectorFile, VectorError> {
        let mut recs = records(text);
        let (_, head) = recs.next().ok_or_else(|| perr(1, "empty file"))?;
        let (func, count) = parse_header("vectors", &head.join(" "))?;
        let mut cases = Vec::with_capacity(count);
        for (line, f) in recs {
            if f.len() != 3 {
                return Err(perr(line, format!("expected `p x y_ref`, found {} fields", f.len())));
            }
            cases.push(Vector {
                p: parse_prec(f[0], line)?,
                x: parse_float(f[1], line)?,
                y: parse_float(f[2], line)?,
            });
        }
        if cases.len() != count {
            return Err(VectorError::Mismatch(format!("header declares {count} cases, found {}", cases.len())));
        }
        Ok(VectorFile { func, cases })
    }
}

impl fmt::Display for VectorFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vectors {FORMAT_VERSION} {} {}", self.func, self.cases.len())?;
        for c in &self.cases {
            writeln!(f, "{} {} {}", c.p, c.x.to_hex(), c.y.to_hex())?;
        }
        Ok(())
    }
}

/// One evaluated case of a results file.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultLine {
    pub p: u64,
    pub x: BigFloat,
    /// The error message when evaluation failed.
    pub ball: Result<Ball, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultFile {
    pub func: Func,
    pub lines: Vec<ResultLine>,
}

impl ResultFile {
    /// Evaluates every case of `v`.
    pub fn evaluate(v: &VectorFile) -> ResultFile {
        let lines = v
            .cases
            .iter()
            .map(|c| ResultLine {
                p: c.p,
                x: c.x.clone(),
                ball: eval(v.func, &c.x, c.p).map_err(|e| e.to_string()),
            })
            .collect();
        ResultFile { func: v.func, lines }
    }

    pub fn parse(text: &str) -> Result<ResultFile, VectorError> {
        let mut recs = records(text);
        let (_, head) = recs.next().ok_or_else(|| perr(1, "empty file"))?;
        let (func, count) = parse_header("results", &head.join(" "))?;
        let mut lines = Vec::with_capacity(count);
        for (line, f) in recs {
            if f.len() < 3 {
                return Err(perr(line, "expected `p x mid rad` or `p x error <message>`"));
            }
            let p = parse_prec(f[0], line)?;
            let x = parse_float(f[1], line)?;
            let ball = if f[2] == "error" {
                Err(f[3..].join(" "))
            } else if f.len() == 4 {
                let mid = parse_float(f[2], line)?;
                let rad = parse_float(f[3], line)?;
                if rad.is_negative() || rad.is_nan() {
                    return Err(perr(line, "negative radius"));
                }
                Ok(Ball::new(mid, Mag::from_bigfloat_up(&rad)))
            } else {
                return Err(perr(line, format!("expected 4 fields, found {}", f.len())));
            };
            lines.push(ResultLine { p, x, ball });
        }
        if lines.len() != count {
            return Err(VectorError::Mismatch(format!("header declares {count} results, found {}", lines.len())));
        }
        Ok(ResultFile { func, lines })
    }
}

impl fmt::Display for ResultFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "results {FORMAT_VERSION} {} {}", self.func, self.lines.len())?;
        for l in &self.lines {
            match &l.ball {
                Ok(b) => writeln!(f, "{} {} {} {}", l.p, l.x.to_hex(), b.mid.to_hex(), b.rad.to_bigfloat().to_hex())?,
                Err(e) => writeln!(f, "{} {} error {}", l.p, l.x.to_hex(), e)?,
            }
        }
        Ok(())
    }
}

/// How the radius of a ball was judged.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadiusCheck {
    /// `z ≤ 2^(1−p)·|y|`.
    Relative(bool),
    /// sin and cos at `|x| ≥ 1`: `z ≤ 2^−p`.
    Absolute(bool),
    /// No bound applies (sin or cos beyond the reduction range).
    Skipped,
}

impl RadiusCheck {
    pub fn passed(self) -> bool {
        !matches!(self, RadiusCheck::Relative(false) | RadiusCheck::Absolute(false))
    }
}

/// The radius bound for `f(x)` at precision `p`. For sin and cos at `|x| ≥ 1`
/// the tolerance is absolute, and where the argument cannot be reduced (the
/// whole-range ball, radius above 1) no bound applies.
pub fn radius_check(f: Func, x: &BigFloat, b: &Ball, p: u64) -> RadiusCheck {
    let pi = p as i64;
    let trig = matches!(f, Func::Sin | Func::Cos);
    if trig && x.exponent().is_some_and(|e| e > 0) {
        if b.rad > Mag::pow2(0) {
            return RadiusCheck::Skipped;
        }
        let rel = b.rad.to_bigfloat() <= b.mid.abs().mul_2exp(1 - pi);
        return RadiusCheck::Absolute(rel || b.rad <= Mag::pow2(-pi));
    }
    let ok = match b.mid.exponent() {
        None => b.rad.is_zero() || !b.mid.is_finite(),
        Some(_) => b.rad.to_bigfloat() <= b.mid.abs().mul_2exp(1 - pi),
    };
    RadiusCheck::Relative(ok)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseReport {
    pub line: usize,
    pub contained: bool,
    /// `y_ref` lies outside, but within its own rounding error of the ball.
    pub within_reference: bool,
    pub radius: RadiusCheck,
    pub error: Option<String>,
}

impl CaseReport {
    pub fn passed(&self) -> bool {
        (self.contained || self.within_reference) && self.radius.passed()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ContainmentReport {
    pub cases: Vec<CaseReport>,
}

impl ContainmentReport {
    pub fn contained(&self) -> usize {
        self.cases.iter().filter(|c| c.contained).count()
    }

    pub fn radius_failures(&self) -> usize {
        self.cases.iter().filter(|c| !c.radius.passed()).count()
    }

    pub fn within_reference(&self) -> usize {
        self.cases.iter().filter(|c| c.within_reference).count()
    }

    pub fn skipped(&self) -> usize {
        self.cases.iter().filter(|c| c.radius == RadiusCheck::Skipped).count()
    }

    pub fn passed(&self) -> bool {
        self.cases.iter().all(CaseReport::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseReport> {
        self.cases.iter().filter(|c| !c.passed())
    }
}

impl fmt::Display for ContainmentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.cases.len();
        let mut s = String::new();
        for c in self.failures().take(20) {
            let _ = write!(s, "case {}: ", c.line);
            if let Some(e) = &c.error {
                let _ = writeln!(s, "error {e}");
            } else if !(c.contained || c.within_reference) {
                let _ = writeln!(s, "reference outside the ball");
            } else {
                let _ = writeln!(s, "radius bound violated ({:?})", c.radius);
            }
        }
        write!(
            f,
            "{s}{} of {n} contained, {} within reference rounding, {} radius failures, {} radius checks skipped: {}",
            self.contained(),
            self.within_reference(),
            self.radius_failures(),
            self.skipped(),
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

/// Per-case check of `y_ref ∈ [y − z, y + z]` and the radius bound.
/// `y_ref` is itself rounded at `p + 64` bits, so a ball tighter than that
/// (a midpoint that happens to be nearly exact) may miss it while holding
/// the true value; such a case passes only if the ball meets
/// `y_ref ± 2^−(p+63)|y_ref|`, and is counted separately.
/// A failed evaluation counts as not contained, except an
/// `UnsupportedPrecision` refusal, which the vector generator should avoid.
pub fn check_containment(v: &VectorFile, r: &ResultFile) -> Result<ContainmentReport, VectorError> {
    if v.func != r.func {
        return Err(VectorError::Mismatch(format!("vectors for {}, results for {}", v.func, r.func)));
    }
    if v.cases.len() != r.lines.len() {
        return Err(VectorError::Mismatch(format!("{} vectors, {} results", v.cases.len(), r.lines.len())));
    }
    let mut out = ContainmentReport::default();
    for (i, (c, l)) in v.cases.iter().zip(&r.lines).enumerate() {
        if c.p != l.p || c.x != l.x {
            return Err(VectorError::Mismatch(format!("case {}: inputs differ", i + 1)));
        }
        out.cases.push(match &l.ball {
            Ok(b) => CaseReport {
                line: i + 1,
                contained: b.contains(&c.y),
                within_reference: !b.contains(&c.y) && b.overlaps(&reference_ball(&c.y, c.p)),
                radius: radius_check(v.func, &c.x, b, c.p),
                error: None,
            },
            Err(e) => CaseReport {
                line: i + 1,
                contained: false,
                within_reference: false,
                radius: RadiusCheck::Skipped,
                error: Some(e.clone()),
            },
        });
    }
    Ok(out)
}

/// `y_ref` with the error the generator guarantees for it.
fn reference_ball(y: &BigFloat, p: u64) -> Ball {
    match y.exponent() {
        Some(e) => Ball::new(y.clone(), Mag::pow2(e - p as i64 - 63)),
        None => Ball::exact(y.clone()),
    }
}

/// Whether an evaluation error is a refusal rather than a wrong answer.
pub fn is_refusal(e: &Error) -> bool {
    matches!(e, Error::UnsupportedPrecision(_) | Error::UnsupportedArgument(_))
}
