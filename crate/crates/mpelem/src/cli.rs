//! Command-line front end. Exit status: 0 success, 1 verification failure,
//! 2 usage, parse or evaluation error.

use crate::argtables::{self, gen_argred_table, golden_dir, verify_tables, write_tables, TableError, TableParams, TableSource};
use crate::bench::{self, BenchConfig};
use crate::functions::{eval, BigFloat, Error, Func};
use crate::prover::prove_all_with;
use crate::vectors::{check_containment, ResultFile, VectorFile};
use clap::{Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "mpelem", version, about = "Medium-precision elementary functions with rigorous error balls")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate one function, or every case of a vector file with --batch.
    Eval {
        /// exp, log, sin, cos or atan.
        function: Option<String>,
        /// Hex-float (0x1.8p+1) or decimal argument.
        #[arg(allow_hyphen_values = true)]
        x: Option<String>,
        /// Output precision in bits.
        p: Option<u64>,
        /// Vector file (`vectors 1 <function> <count>` then `p x y_ref` lines).
        #[arg(long, conflicts_with_all = ["function", "x", "p"])]
        batch: Option<PathBuf>,
        /// With --batch: check each ball against the reference value.
        #[arg(long, requires = "batch")]
        check: bool,
    },
    /// Time each function along a precision ladder; CSV on stdout.
    Bench {
        /// Comma-separated subset of exp,sin,cos,log,atan.
        #[arg(long, value_delimiter = ',')]
        functions: Option<Vec<String>>,
        /// Comma-separated precisions in bits.
        #[arg(long, value_delimiter = ',')]
        precisions: Option<Vec<u64>>,
        /// Input value (default √2 + 1).
        #[arg(long)]
        x: Option<String>,
        /// Minimum loop time in seconds.
        #[arg(long, default_value_t = 0.1)]
        min_time: f64,
        /// Repetitions; the best average is reported.
        #[arg(long, default_value_t = 3)]
        reps: u32,
    },
    /// Regenerate the argument-reduction tables and constants.
    GenTables {
        /// Print the full table dumps instead of a summary.
        #[arg(long)]
        dump: bool,
        /// Write the dumps into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the series prover and/or audit the tables against golden dumps.
    Verify {
        #[arg(value_enum, default_value_t = Target::All)]
        target: Target,
        /// Largest term count proven.
        #[arg(long, default_value_t = 300)]
        n_max: usize,
    },
    /// Quick internal consistency run (no golden files needed).
    Selftest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Target {
    All,
    Tables,
    Series,
}

/// Runs the command line `args` (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let r = match cli.cmd {
        Cmd::Eval {
            function,
            x,
            p,
            batch: Some(path),
            check,
        } => {
            let _ = (function, x, p);
            cmd_batch(&path, check, out)
        }
        Cmd::Eval { function, x, p, .. } => match (function, x, p) {
            (Some(f), Some(x), Some(p)) => cmd_eval(&f, &x, p, out),
            _ => Err((EXIT_USAGE, "eval needs <function> <x> <p> or --batch <file>".into())),
        },
        Cmd::Bench {
            functions,
            precisions,
            x,
            min_time,
            reps,
        } => cmd_bench(functions, precisions, x, min_time, reps, out),
        Cmd::GenTables { dump, out: dir } => cmd_gen_tables(dump, dir, out),
        Cmd::Verify { target, n_max } => cmd_verify(target, n_max, out),
        Cmd::Selftest => cmd_selftest(out),
    };
    match r {
        Ok(code) => code,
        Err((code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

type CmdResult = Result<i32, (i32, String)>;

fn usage(msg: impl ToString) -> (i32, String) {
    (EXIT_USAGE, msg.to_string())
}

fn io(e: std::io::Error) -> (i32, String) {
    (EXIT_USAGE, e.to_string())
}

fn parse_func(s: &str) -> Result<Func, (i32, String)> {
    s.parse().map_err(usage)
}

fn parse_x(s: &str) -> Result<BigFloat, (i32, String)> {
    s.parse::<BigFloat>().map_err(usage)
}

/// Decimal digits that resolve `p` bits.
fn decimal_digits(p: u64) -> usize {
    (p as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
}

fn cmd_eval(f: &str, x: &str, p: u64, out: &mut dyn Write) -> CmdResult {
    let f = parse_func(f)?;
    let xv = parse_x(x)?;
    let b = eval(f, &xv, p).map_err(|e| usage(e.to_string()))?;
    writeln!(out, "function {f}").map_err(io)?;
    writeln!(out, "precision {p}").map_err(io)?;
    writeln!(out, "x {}", xv.to_hex()).map_err(io)?;
    writeln!(out, "mid {}", b.mid.to_hex()).map_err(io)?;
    writeln!(out, "mid_decimal {}", b.mid.to_decimal(decimal_digits(p))).map_err(io)?;
    writeln!(out, "rad {}", b.rad.to_bigfloat().to_hex()).map_err(io)?;
    Ok(EXIT_OK)
}

fn cmd_batch(path: &std::path::Path, check: bool, out: &mut dyn Write) -> CmdResult {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let v = VectorFile::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let r = ResultFile::evaluate(&v);
    if !check {
        write!(out, "{r}").map_err(io)?;
        return Ok(EXIT_OK);
    }
    let rep = check_containment(&v, &r).map_err(usage)?;
    writeln!(out, "{} {}: {rep}", v.func, path.display()).map_err(io)?;
    Ok(if rep.passed() { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_bench(
    functions: Option<Vec<String>>,
    precisions: Option<Vec<u64>>,
    x: Option<String>,
    min_time: f64,
    reps: u32,
    out: &mut dyn Write,
) -> CmdResult {
    let mut cfg = BenchConfig::default();
    if let Some(fs) = functions {
        cfg.functions = fs.iter().map(|s| parse_func(s)).collect::<Result<_, _>>()?;
    }
    if let Some(ps) = precisions {
        cfg.precisions = ps;
    }
    if let Some(x) = x {
        cfg.x = parse_x(&x)?;
    }
    if !(min_time.is_finite() && min_time > 0.0) {
        return Err(usage("--min-time must be positive"));
    }
    cfg.min_time = Duration::from_secs_f64(min_time);
    cfg.repetitions = reps;
    cfg.validate().map_err(usage)?;
    // every (function, precision) pair must be computable
    for &f in &cfg.functions {
        for &p in &cfg.precisions {
            eval(f, &cfg.x, p).map_err(|e| usage(format!("{f} at {p} bits: {}", e)))?;
        }
    }
    write!(out, "{}", bench::to_csv(&bench::run(&cfg))).map_err(io)?;
    Ok(EXIT_OK)
}

fn cmd_gen_tables(dump: bool, dir: Option<PathBuf>, out: &mut dyn Write) -> CmdResult {
    if let Some(d) = &dir {
        write_tables(d).map_err(|e| usage(e.to_string()))?;
    }
    let mut same = true;
    for p in TableParams::all() {
        let t = gen_argred_table(p.func, p.band);
        if dump {
            write!(out, "{}", t.dump()).map_err(io)?;
            continue;
        }
        let matches = t == *argtables::table(p.func, p.band);
        same &= matches;
        writeln!(
            out,
            "{:<44} {:>9.4} KiB  {}",
            p.header(),
            p.size_kib(),
            if matches { "matches embedded" } else { "DIFFERS from embedded" }
        )
        .map_err(io)?;
    }
    let pool = argtables::ConstantPool::generate();
    if dump {
        write!(out, "{}", pool.dump()).map_err(io)?;
        return Ok(EXIT_OK);
    }
    let matches = pool == *argtables::constants();
    same &= matches;
    writeln!(out, "{:<44} {}", "constants", if matches { "matches embedded" } else { "DIFFERS from embedded" })
        .map_err(io)?;
    let total: f64 = TableParams::all().map(|p| p.size_kib()).sum();
    writeln!(out, "total {total:.4} KiB").map_err(io)?;
    if let Some(d) = dir {
        writeln!(out, "wrote {}", d.display()).map_err(io)?;
    }
    Ok(if same { EXIT_OK } else { EXIT_FAIL })
}

fn verify_series(n_max: usize, out: &mut dyn Write) -> Result<bool, (i32, String)> {
    if n_max < 3 {
        return Err(usage("--n-max must be at least 3"));
    }
    let mut ok = true;
    for r in prove_all_with(n_max) {
        writeln!(out, "{r}").map_err(io)?;
        ok &= r.passed();
    }
    Ok(ok)
}

fn verify_tables_cmd(out: &mut dyn Write) -> Result<bool, (i32, String)> {
    let golden = golden_dir();
    match verify_tables(&TableSource::from_env(), &golden) {
        Ok(audits) => {
            let mut ok = true;
            for a in audits {
                writeln!(out, "{a}").map_err(io)?;
                ok &= a.passed();
            }
            Ok(ok)
        }
        Err(TableError::Missing(p)) => Err(usage(format!("missing golden or table file: {}", p.display()))),
        // a malformed or wrongly sized table is a failed audit
        Err(e) => {
            writeln!(out, "table audit failed: {e}").map_err(io)?;
            Ok(false)
        }
    }
}

fn cmd_verify(target: Target, n_max: usize, out: &mut dyn Write) -> CmdResult {
    let mut ok = true;
    if matches!(target, Target::All | Target::Series) {
        ok &= verify_series(n_max, out)?;
    }
    if matches!(target, Target::All | Target::Tables) {
        ok &= verify_tables_cmd(out)?;
    }
    writeln!(out, "verify: {}", if ok { "PASS" } else { "FAIL" }).map_err(io)?;
    Ok(if ok { EXIT_OK } else { EXIT_FAIL })
}

/// Inputs of the self-test: a spread of magnitudes and both signs.
fn selftest_inputs() -> Vec<BigFloat> {
    let mut v = Vec::new();
    for (num, den) in [(1, 3), (5, 7), (22, 7), (355, 113), (1, 1000), (99, 100), (101, 100), (7, 2)] {
        let x = BigFloat::from_ratio(false, &num_bigint::BigUint::from(num as u32), &num_bigint::BigUint::from(den as u32), 200);
        v.push(x.clone());
        v.push(x.neg().mul_2exp(3));
    }
    v.push(crate::bench::default_input());
    v
}

fn cmd_selftest(out: &mut dyn Write) -> CmdResult {
    let mut checks = 0usize;
    let mut fails = Vec::new();
    for f in Func::ALL {
        for x in selftest_inputs() {
            let x = if f == Func::Log { x.abs() } else { x };
            for p in [2, 24, 53, 113, 300, 600, 1000, 2500, 4000] {
                checks += 1;
                let (a, b, c) = (eval(f, &x, p), eval(f, &x, p + 32), eval(f, &x, p + 256));
                match (a, b, c) {
                    (Ok(a), Ok(b), Ok(c)) => {
                        if !(a.overlaps(&b) && a.overlaps(&c) && b.overlaps(&c)) {
                            fails.push(format!("{f}({}) at {p}: balls disjoint", x.to_decimal(8)));
                        } else if b.rad > a.rad {
                            fails.push(format!("{f}({}) at {p}: radius grew", x.to_decimal(8)));
                        }
                    }
                    (Err(Error::UnsupportedPrecision(_)), _, _) | (_, Err(Error::UnsupportedPrecision(_)), _) | (_, _, Err(Error::UnsupportedPrecision(_))) => {}
                    (a, b, c) => fails.push(format!(
                        "{f}({}) at {p}: {:?} {:?} {:?}",
                        x.to_decimal(8),
                        a.err(),
                        b.err(),
                        c.err()
                    )),
                }
            }
        }
    }
    let series_ok = prove_all_with(40).iter().all(|r| r.passed());
    checks += 1;
    if !series_ok {
        fails.push("series prover failed for N ≤ 40".into());
    }
    for m in fails.iter().take(20) {
        writeln!(out, "{m}").map_err(io)?;
    }
    writeln!(
        out,
        "selftest: {checks} checks, {} failures: {}",
        fails.len(),
        if fails.is_empty() { "PASS" } else { "FAIL" }
    )
    .map_err(io)?;
    Ok(if fails.is_empty() { EXIT_OK } else { EXIT_FAIL })
}
