//! Lookup tables for argument reduction.
//!
//! With `q = 2^r` and `i = ⌊q·x⌋`, one table lookup replaces `r` halvings:
//!
//! ```text
//! exp(x)     = exp(i/q) · exp(x − i/q)
//! sin(x)     = sin(i/q)·cos(x − i/q) + cos(i/q)·sin(x − i/q)
//! cos(x)     = cos(i/q)·cos(x − i/q) − sin(i/q)·sin(x − i/q)
//! log(1 + x) = log(1 + i/q) + log(1 + (q·x − i)/(i + q))
//! atan(x)    = atan(i/q) + atan((q·x − i)/(i·x + q))
//! ```
//!
//! A chained (bipartite) pair applies the same identity a second time with
//! grid `j/q²`. Each function has a fast table used up to 512 bits and an
//! economical one up to 4608 bits. Entries are stored correctly rounded to
//! nearest at the band precision as `mant · 2^exp` with a full-width
//! mantissa.

pub mod refmath;

use crate::fixedpoint::FixedPoint;
use crate::limb::Limb;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::OnceLock;

/// Error charged, in ulps at the working precision `2^−F`, for one
/// [`lookup`]. With stored value `mant·2^exp`: if bits below `2^−F` are cut,
/// the truncation loses less than `2^−F − 2^exp` and storage rounding adds at
/// most `2^(exp−1)`; otherwise only the storage error `≤ 2^(exp−1) ≤ 2^−P`
/// remains (all entries are below 2). Either way the total is under one ulp.
pub const LOOKUP_ULPS: u64 = 1;

/// Stored precision of the constants π/4, π/2 and log 2.
pub const CONST_PREC: u64 = 4672;

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("missing table file {0}")]
    Missing(PathBuf),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("header mismatch: expected `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("size mismatch: expected {expected} entries, found {found}")]
    SizeMismatch { expected: usize, found: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Log,
    Atan,
}

impl Func {
    pub const ALL: [Func; 5] = [Func::Exp, Func::Sin, Func::Cos, Func::Log, Func::Atan];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Log => "log",
            Func::Atan => "atan",
        }
    }

    /// Reference value at grid point `t` (scaled by `2^f`).
    fn reference(self, t: &BigUint, f: u64) -> BigUint {
        match self {
            Func::Exp => refmath::exp(t, f),
            Func::Sin => refmath::sin_cos(t, f).0,
            Func::Cos => refmath::sin_cos(t, f).1,
            Func::Log => refmath::log1p(t, f),
            Func::Atan => refmath::atan(t, f),
        }
    }

    /// Value at the grid point 0.
    fn at_zero(self) -> u64 {
        match self {
            Func::Exp | Func::Cos => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Func {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Func::ALL
            .into_iter()
            .find(|k| k.name() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown function `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Band {
    Fast,
    Economical,
}

impl Band {
    pub const ALL: [Band; 2] = [Band::Fast, Band::Economical];

    pub fn precision(self) -> u64 {
        match self {
            Band::Fast => 512,
            Band::Economical => 4608,
        }
    }

    /// Band serving working precision `w`, if any.
    pub fn for_bits(w: u64) -> Option<Band> {
        match w {
            0..=512 => Some(Band::Fast),
            513..=4608 => Some(Band::Economical),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Band::Fast => "fast",
            Band::Economical => "economical",
        }
    }
}

impl FromStr for Band {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Band::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| format!("unknown band `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableParams {
    pub func: Func,
    pub band: Band,
    /// Number of chained tables.
    pub chain: usize,
    /// Bits of reduction per table.
    pub r: u32,
    /// Entries per chained table (unused slots are zero).
    pub counts: [usize; 2],
}

impl TableParams {
    pub fn get(func: Func, band: Band) -> TableParams {
        use Band::*;
        use Func::*;
        let (chain, r, counts) = match (func, band) {
            (Exp, Fast) => (1, 8, [178, 0]),
            (Exp, Economical) => (2, 5, [23, 32]),
            (Sin | Cos, Fast) => (1, 8, [203, 0]),
            (Sin | Cos, Economical) => (2, 5, [26, 32]),
            (Log, Fast) => (2, 7, [128, 128]),
            (Log, Economical) => (2, 5, [32, 32]),
            (Atan, Fast) => (1, 8, [256, 0]),
            (Atan, Economical) => (2, 5, [32, 32]),
        };
        TableParams {
            func,
            band,
            chain,
            r,
            counts,
        }
    }

    pub fn all() -> impl Iterator<Item = TableParams> {
        Func::ALL
            .into_iter()
            .flat_map(|f| Band::ALL.into_iter().map(move |b| TableParams::get(f, b)))
    }

    pub fn precision(&self) -> u64 {
        self.band.precision()
    }

    pub fn entry_count(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn payload_bits(&self) -> u64 {
        self.entry_count() as u64 * self.precision()
    }

    pub fn size_kib(&self) -> f64 {
        self.payload_bits() as f64 / 8192.0
    }

    /// Grid of table `which` (1 or 2) is `index / 2^grid_bits(which)`.
    pub fn grid_bits(&self, which: usize) -> u32 {
        self.r * which as u32
    }

    pub fn counts_str(&self) -> String {
        self.counts[..self.chain]
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join("+")
    }

    /// `function band m r counts P`
    pub fn header(&self) -> String {
        format!(
            "{} {} {} {} {} {}",
            self.func,
            self.band.name(),
            self.chain,
            self.r,
            self.counts_str(),
            self.precision()
        )
    }

    pub fn file_name(&self) -> String {
        format!("{}_{}.tbl", self.func, self.band.name())
    }
}

/// `mant · 2^exp` with `mant` zero or exactly `prec` bits wide.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub mant: BigUint,
    pub exp: i64,
}

impl Entry {
    pub fn zero() -> Entry {
        Entry {
            mant: BigUint::zero(),
            exp: 0,
        }
    }

    /// Small integer `v` at `prec` bits.
    pub fn from_u64(v: u64, prec: u64) -> Entry {
        if v == 0 {
            return Entry::zero();
        }
        Entry::round_nearest(&BigUint::from(v), 0, prec)
    }

    /// `z / 2^f` rounded to nearest (ties away from zero) at `prec` bits.
    pub fn round_nearest(z: &BigUint, f: u64, prec: u64) -> Entry {
        if z.is_zero() {
            return Entry::zero();
        }
        let bits = z.bits();
        if bits <= prec {
            return Entry {
                mant: z << (prec - bits),
                exp: -(f as i64) - (prec - bits) as i64,
            };
        }
        let mut sh = bits - prec;
        let mut m = (z + (BigUint::one() << (sh - 1))) >> sh;
        if m.bits() > prec {
            m >>= 1u32;
            sh += 1;
        }
        Entry {
            mant: m,
            exp: sh as i64 - f as i64,
        }
    }

    /// `⌊value · 2^f⌋`.
    pub fn scaled_floor(&self, f: u64) -> BigUint {
        let s = self.exp + f as i64;
        if s >= 0 {
            &self.mant << s as u64
        } else {
            &self.mant >> (-s) as u64
        }
    }

    /// `<hexmantissa> p<exponent>`
    pub fn dump(&self) -> String {
        format!("{:x} p{}", self.mant, self.exp)
    }

    pub fn parse(s: &str, prec: u64) -> Result<Entry, String> {
        let (m, e) = s.split_once(" p").ok_or("expected `<hex> p<exp>`")?;
        let mant = BigUint::parse_bytes(m.trim().as_bytes(), 16).ok_or("bad hex mantissa")?;
        let exp = e.trim().parse::<i64>().map_err(|e| e.to_string())?;
        if !mant.is_zero() && mant.bits() != prec {
            return Err(format!("mantissa has {} bits, expected {prec}", mant.bits()));
        }
        Ok(Entry { mant, exp })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArgRedTable {
    pub params: TableParams,
    /// One entry list per chained table.
    pub tables: Vec<Vec<Entry>>,
}

impl ArgRedTable {
    pub fn entry(&self, which: usize, index: usize) -> &Entry {
        &self.tables[which - 1][index]
    }

    pub fn dump(&self) -> String {
        let mut s = self.params.header();
        s.push('\n');
        for e in self.tables.iter().flatten() {
            let _ = writeln!(s, "{}", e.dump());
        }
        s
    }

    /// Parses a dump whose header must describe `params`.
    pub fn parse(text: &str, params: TableParams) -> Result<ArgRedTable, TableError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().unwrap_or("").trim();
        if header != params.header() {
            // a well-formed header for another shape is a size error
            let f: Vec<&str> = header.split_whitespace().collect();
            let total = f.get(4).and_then(|c| c.split('+').map(|x| x.parse::<usize>().ok()).sum::<Option<usize>>());
            if let (Some(found), Some(&name)) = (total, f.first()) {
                if name == params.func.name() && found != params.entry_count() {
                    return Err(TableError::SizeMismatch {
                        expected: params.entry_count(),
                        found,
                    });
                }
            }
            return Err(TableError::Header {
                expected: params.header(),
                found: header.to_string(),
            });
        }
        let entries = lines
            .enumerate()
            .map(|(i, l)| Entry::parse(l, params.precision()).map_err(|msg| TableError::Parse { line: i + 2, msg }))
            .collect::<Result<Vec<_>, _>>()?;
        if entries.len() != params.entry_count() {
            return Err(TableError::SizeMismatch {
                expected: params.entry_count(),
                found: entries.len(),
            });
        }
        let mut rest = entries.into_iter();
        let tables = params.counts[..params.chain]
            .iter()
            .map(|&c| rest.by_ref().take(c).collect())
            .collect();
        Ok(ArgRedTable { params, tables })
    }

    pub fn read(dir: &Path, params: TableParams) -> Result<ArgRedTable, TableError> {
        ArgRedTable::parse(&read_file(&dir.join(params.file_name()))?, params)
    }
}

fn read_file(path: &Path) -> Result<String, TableError> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => TableError::Missing(path.to_path_buf()),
        _ => TableError::Io {
            path: path.to_path_buf(),
            source: e,
        },
    })
}

/// Builds the table from the reference functions, correctly rounded.
pub fn gen_argred_table(func: Func, band: Band) -> ArgRedTable {
    let params = TableParams::get(func, band);
    let prec = params.precision();
    let tables = (1..=params.chain)
        .map(|which| {
            let bits = params.grid_bits(which);
            (0..params.counts[which - 1] as u64)
                .map(|i| {
                    if i == 0 {
                        Entry::from_u64(func.at_zero(), prec)
                    } else {
                        refmath::correctly_rounded(prec, |f| func.reference(&refmath::grid(i, bits, f), f))
                    }
                })
                .collect()
        })
        .collect();
    ArgRedTable { params, tables }
}

macro_rules! embedded {
    ($($f:ident $b:ident $file:literal),* $(,)?) => {
        fn embedded_text(func: Func, band: Band) -> &'static str {
            match (func, band) {
                $((Func::$f, Band::$b) => include_str!(concat!("../../data/", $file)),)*
            }
        }
    };
}

embedded! {
    Exp Fast "exp_fast.tbl", Exp Economical "exp_economical.tbl",
    Sin Fast "sin_fast.tbl", Sin Economical "sin_economical.tbl",
    Cos Fast "cos_fast.tbl", Cos Economical "cos_economical.tbl",
    Log Fast "log_fast.tbl", Log Economical "log_economical.tbl",
    Atan Fast "atan_fast.tbl", Atan Economical "atan_economical.tbl",
}

/// The table compiled into the library, parsed on first use.
pub fn table(func: Func, band: Band) -> &'static ArgRedTable {
    static CELLS: [OnceLock<ArgRedTable>; 10] = [const { OnceLock::new() }; 10];
    let slot = func as usize * 2 + band as usize;
    CELLS[slot].get_or_init(|| {
        ArgRedTable::parse(embedded_text(func, band), TableParams::get(func, band))
            .unwrap_or_else(|e| panic!("embedded {} {} table: {e}", func, band.name()))
    })
}

/// Raw text of the embedded table dump.
pub fn embedded_dump(func: Func, band: Band) -> &'static str {
    embedded_text(func, band)
}

/// Entry `index` of chained table `which` (1 or 2) truncated to `⌈w/B⌉`
/// fractional limbs, with one integer limb. The result is within
/// [`LOOKUP_ULPS`] ulp of the true function value.
pub fn lookup<L: Limb>(t: &ArgRedTable, which: usize, index: usize, w: u64) -> FixedPoint<L> {
    assert!(w <= t.params.precision(), "lookup beyond band precision");
    let n = w.div_ceil(L::BITS as u64) as usize;
    let v = t.entry(which, index).scaled_floor(n as u64 * L::BITS as u64);
    FixedPoint::from_biguint(&v, n, 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Constant {
    Pi4,
    Pi2,
    Log2,
}

impl Constant {
    pub const ALL: [Constant; 3] = [Constant::Pi4, Constant::Pi2, Constant::Log2];

    pub fn name(self) -> &'static str {
        match self {
            Constant::Pi4 => "pi/4",
            Constant::Pi2 => "pi/2",
            Constant::Log2 => "log2",
        }
    }
}

/// π/4, π/2 and log 2 correctly rounded at [`CONST_PREC`] bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantPool {
    pub values: [Entry; 3],
}

impl ConstantPool {
    pub fn generate() -> ConstantPool {
        let one = |f| BigUint::one() << f;
        let pi4 = refmath::correctly_rounded(CONST_PREC, |f| refmath::atan(&one(f), f));
        let pi2 = Entry {
            mant: pi4.mant.clone(),
            exp: pi4.exp + 1,
        };
        let log2 = refmath::correctly_rounded(CONST_PREC, |f| refmath::log1p(&one(f), f));
        ConstantPool {
            values: [pi4, pi2, log2],
        }
    }

    pub fn get(&self, c: Constant) -> &Entry {
        &self.values[c as usize]
    }

    /// One line per constant: `name <hexmantissa> p<exponent>`.
    pub fn dump(&self) -> String {
        let mut s = format!("constants {CONST_PREC}\n");
        for c in Constant::ALL {
            let _ = writeln!(s, "{} {}", c.name(), self.get(c).dump());
        }
        s
    }

    pub fn parse(text: &str) -> Result<ConstantPool, TableError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let expected = format!("constants {CONST_PREC}");
        let header = lines.next().unwrap_or("").trim();
        if header != expected {
            return Err(TableError::Header {
                expected,
                found: header.to_string(),
            });
        }
        let mut values = Vec::new();
        for (i, (c, line)) in Constant::ALL.iter().zip(lines.by_ref()).enumerate() {
            let err = |msg: String| TableError::Parse { line: i + 2, msg };
            let (name, rest) = line.split_once(' ').ok_or_else(|| err("missing fields".into()))?;
            if name != c.name() {
                return Err(err(format!("expected `{}`, found `{name}`", c.name())));
            }
            values.push(Entry::parse(rest, CONST_PREC).map_err(err)?);
        }
        let found = values.len() + lines.count();
        let values: [Entry; 3] = values
            .try_into()
            .map_err(|_| TableError::SizeMismatch { expected: 3, found })?;
        if found != 3 {
            return Err(TableError::SizeMismatch { expected: 3, found });
        }
        Ok(ConstantPool { values })
    }

    /// `⌊c · 2^w⌋`, within one unit of `c · 2^w` for `w ≤ CONST_PREC`.
    pub fn scaled(&self, c: Constant, w: u64) -> BigUint {
        self.get(c).scaled_floor(w)
    }
}

/// The constants compiled into the library.
pub fn constants() -> &'static ConstantPool {
    static POOL: OnceLock<ConstantPool> = OnceLock::new();
    POOL.get_or_init(|| ConstantPool::parse(CONSTANTS_TEXT).expect("embedded constants"))
}

pub const CONSTANTS_TEXT: &str = include_str!("../../data/constants.tbl");

/// Result of auditing one table against a golden dump.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableAudit {
    pub name: String,
    pub entries: usize,
    /// `(which, index)` of every differing entry.
    pub mismatches: Vec<(usize, usize)>,
}

impl TableAudit {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

impl fmt::Display for TableAudit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<16} {:>4} entries  {} mismatches  {}",
            self.name,
            self.entries,
            self.mismatches.len(),
            if self.passed() { "PASS" } else { "FAIL" }
        )?;
        for (w, i) in self.mismatches.iter().take(5) {
            write!(f, "  [table {w} entry {i}]")?;
        }
        Ok(())
    }
}

/// Entry-by-entry comparison of two tables with the same parameters.
pub fn compare(ours: &ArgRedTable, golden: &ArgRedTable) -> TableAudit {
    let mut mismatches = Vec::new();
    for (w, (a, b)) in ours.tables.iter().zip(&golden.tables).enumerate() {
        for (i, (x, y)) in a.iter().zip(b).enumerate() {
            if x != y {
                mismatches.push((w + 1, i));
            }
        }
    }
    TableAudit {
        name: format!("{} {}", ours.params.func, ours.params.band.name()),
        entries: ours.params.entry_count(),
        mismatches,
    }
}

/// Where [`verify_tables`] reads the tables under audit.
#[derive(Clone, Debug)]
pub enum TableSource {
    Embedded,
    Dir(PathBuf),
}

impl TableSource {
    /// `MPELEM_TABLE_DIR` if set, else the embedded tables.
    pub fn from_env() -> TableSource {
        match std::env::var_os("MPELEM_TABLE_DIR") {
            Some(d) => TableSource::Dir(d.into()),
            None => TableSource::Embedded,
        }
    }

    fn load(&self, params: TableParams) -> Result<ArgRedTable, TableError> {
        match self {
            TableSource::Embedded => Ok(table(params.func, params.band).clone()),
            TableSource::Dir(d) => ArgRedTable::read(d, params),
        }
    }

    fn load_constants(&self) -> Result<ConstantPool, TableError> {
        match self {
            TableSource::Embedded => Ok(constants().clone()),
            TableSource::Dir(d) => ConstantPool::parse(&read_file(&d.join("constants.tbl"))?),
        }
    }
}

/// Directory of the golden dumps: `MPELEM_GOLDEN_DIR` if set, else the
/// `golden/` directory of the source tree.
pub fn golden_dir() -> PathBuf {
    match std::env::var_os("MPELEM_GOLDEN_DIR") {
        Some(d) => d.into(),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("golden"),
    }
}

/// Audits all ten tables and the constants against golden dumps in
/// `golden`. Missing or malformed files are errors; differing entries are
/// reported per table.
pub fn verify_tables(source: &TableSource, golden: &Path) -> Result<Vec<TableAudit>, TableError> {
    let mut out = Vec::new();
    for params in TableParams::all() {
        let ours = source.load(params)?;
        let reference = ArgRedTable::read(golden, params)?;
        out.push(compare(&ours, &reference));
    }
    let ours = source.load_constants()?;
    let reference = ConstantPool::parse(&read_file(&golden.join("constants.tbl"))?)?;
    out.push(TableAudit {
        name: "constants".into(),
        entries: 3,
        mismatches: (0..3)
            .filter(|&i| ours.values[i] != reference.values[i])
            .map(|i| (1, i))
            .collect(),
    });
    Ok(out)
}

/// Writes every table dump and the constants into `dir`.
pub fn write_tables(dir: &Path) -> Result<(), TableError> {
    let io = |path: PathBuf| move |source| TableError::Io { path, source };
    std::fs::create_dir_all(dir).map_err(io(dir.to_path_buf()))?;
    for params in TableParams::all() {
        let path = dir.join(params.file_name());
        let text = gen_argred_table(params.func, params.band).dump();
        std::fs::write(&path, text).map_err(io(path.clone()))?;
    }
    let path = dir.join("constants.tbl");
    std::fs::write(&path, ConstantPool::generate().dump()).map_err(io(path.clone()))?;
    Ok(())
}
