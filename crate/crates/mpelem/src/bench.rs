//! Timing loop behind `mpelem bench`: each (function, precision) pair runs
//! in a loop for at least the minimum time, and the best average of the
//! repetitions is reported. Repetitions sweep the whole grid in turn, so a
//! slow stretch of the machine spreads over all pairs instead of one.

use crate::functions::{eval, BigFloat, Func, Round};
use std::fmt::Write as _;
use std::hint::black_box;
use std::time::{Duration, Instant};

pub const DEFAULT_LADDER: [u64; 9] = [32, 53, 64, 128, 256, 512, 1024, 2048, 4096];

pub const CSV_HEADER: &str = "function,precision_bits,ns_per_call";

/// `√2 + 1` rounded to 4608 bits, the default input.
pub fn default_input() -> BigFloat {
    // ⌊√2·2^4700⌋ is far more precise than the rounding below
    let s = (num_bigint::BigUint::from(2u32) << 9400u32).sqrt();
    BigFloat::from_parts(false, s, -4700)
        .add(&BigFloat::one())
        .round(4608, Round::Nearest)
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub functions: Vec<Func>,
    pub precisions: Vec<u64>,
    pub x: BigFloat,
    pub min_time: Duration,
    pub repetitions: u32,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            functions: Func::ALL.to_vec(),
            precisions: DEFAULT_LADDER.to_vec(),
            x: default_input(),
            min_time: Duration::from_millis(100),
            repetitions: 3,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.min_time.is_zero() {
            return Err("minimum loop time must be positive".into());
        }
        if self.repetitions == 0 {
            return Err("at least one repetition is needed".into());
        }
        if let Some(p) = self.precisions.iter().find(|&&p| !(2..=4096).contains(&p)) {
            return Err(format!("precision {p} outside 2..=4096"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub func: Func,
    pub precision: u64,
    pub ns_per_call: f64,
}

/// Mean time per call of one loop running for at least `min`.
fn time_loop(f: Func, x: &BigFloat, p: u64, min: Duration) -> f64 {
    let mut calls = 0u64;
    let start = Instant::now();
    loop {
        for _ in 0..8 {
            let _ = black_box(eval(f, black_box(x), p));
        }
        calls += 8;
        let t = start.elapsed();
        if t >= min {
            return t.as_nanos() as f64 / calls as f64;
        }
    }
}

pub fn run(cfg: &BenchConfig) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    let mut inputs = Vec::new();
    for &f in &cfg.functions {
        for &p in &cfg.precisions {
            // round the input to the precision, as a caller at p would pass it
            inputs.push(cfg.x.round(p, Round::Nearest));
            rows.push(BenchRow {
                func: f,
                precision: p,
                ns_per_call: f64::INFINITY,
            });
        }
    }
    for _ in 0..cfg.repetitions {
        for (r, x) in rows.iter_mut().zip(&inputs) {
            r.ns_per_call = r.ns_per_call.min(time_loop(r.func, x, r.precision, cfg.min_time));
        }
    }
    rows
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut s = format!("{CSV_HEADER}\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{:.1}", r.func, r.precision, r.ns_per_call);
    }
    s
}

pub fn parse_csv(text: &str) -> Result<Vec<BenchRow>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err("missing CSV header".into());
    }
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 3 {
                return Err(format!("bad row `{l}`"));
            }
            Ok(BenchRow {
                func: f[0].parse()?,
                precision: f[1].parse().map_err(|_| format!("bad precision in `{l}`"))?,
                ns_per_call: f[2].parse().map_err(|_| format!("bad time in `{l}`"))?,
            })
        })
        .collect()
}
