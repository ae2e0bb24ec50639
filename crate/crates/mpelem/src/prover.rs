//! Symbolic replay of the series kernels for every term count `N`.
//!
//! The argument is known only through its precondition `0 ≤ X ≤ 2^−4`, so
//! every power `T_j` lies in `[0, τ^j]` with `τ = 2^−8` (powers of `X²`) or
//! `τ = 2^−4` (powers of `X`). Each program point carries an
//! [`AbstractValue`]: an interval `[lo, hi]` containing the exact
//! (untruncated) value of `S`, and an upper bound `err` on the distance
//! between the computed and the exact value, in ulps. Since `n ≥ 1`, one ulp
//! is at most `2^−B`, so the computed value lies in
//! `[lo − err·2^−B, hi + err·2^−B]` for every `n`.
//!
//! Transfer functions:
//!
//! - `S ± u·T_j`: interval widened by `u·[0, τ^j]` on the side of the sign,
//!   `err += u·e_j`.
//! - `S ± u` on the top limb: exact shift of the interval.
//! - `S ← S·T_m`: interval times `[0, τ^m]`,
//!   `err ← |S|·e_m + τ^m·err + err·e_m·2^−B + 1`.
//! - `S ← S·v/v'` (or `S/v'`): interval scaled, `err ← err·v/v' + 1`.
//!   The concrete code tests the sign bit of the top limb and, for a
//!   negative `S`, computes `((S + v')·v)/v' − v` (or `(S + v')/v' − 1`).
//!   Both branches produce `S·v/v'` minus one truncation, so they share the
//!   transfer function. Soundness needs `|S| < 2^(B−1)` so that the sign bit
//!   is the true sign, `S + v' ≥ 0` on the negative branch, and
//!   `S·v/v' < 2^B` on the positive one.
//! - `S ← S/v_0` and `S ← S·X` at the end: as above with `|X| ≤ 2^−4`.
//!
//! Multiplications and the final division additionally need
//! `0 ≤ S < 2^B` for the computed value. All bounds are exact rationals;
//! quotients by `v'` are rounded outward to dyadic rationals with 192
//! significant bits to keep the numbers small.

use crate::limb::Limb;
use crate::series::{splitting_param, DenomKind, DenomTable, Point, SeriesKind, TableLimb};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

pub type Q = BigRational;

/// Significant bits kept when a bound is rounded outward.
const KEEP: u64 = 192;

fn qi(x: u64) -> Q {
    Q::from_integer(BigInt::from(x))
}

fn qmax(a: &Q, b: &Q) -> Q {
    if a > b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Decimal rendering rounded up to `digits` fractional digits.
pub fn fmt_upper(q: &Q, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (q * Q::from_integer(scale.clone())).ceil().to_integer();
    let (int, frac) = scaled.div_mod_floor(&scale);
    format!("{}.{:0>width$}", int, frac, width = digits as usize)
}

/// Exact dyadic rational `m·2^e`, the working number type of the prover.
/// Sums and products are exact; quotients and explicit roundings are
/// directed.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Dy {
    m: BigInt,
    e: i64,
}

impl Dy {
    fn zero() -> Dy {
        Dy { m: BigInt::zero(), e: 0 }
    }

    fn int(x: u64) -> Dy {
        Dy { m: BigInt::from(x), e: 0 }
    }

    fn pow2(e: i64) -> Dy {
        Dy { m: BigInt::one(), e }
    }

    fn is_neg(&self) -> bool {
        self.m.is_negative()
    }

    fn add(&self, o: &Dy) -> Dy {
        if self.m.is_zero() {
            return o.clone();
        }
        if o.m.is_zero() {
            return self.clone();
        }
        let e = self.e.min(o.e);
        Dy {
            m: (&self.m << (self.e - e) as u64) + (&o.m << (o.e - e) as u64),
            e,
        }
    }

    fn neg(&self) -> Dy {
        Dy { m: -&self.m, e: self.e }
    }

    fn sub(&self, o: &Dy) -> Dy {
        self.add(&o.neg())
    }

    fn mul(&self, o: &Dy) -> Dy {
        Dy {
            m: &self.m * &o.m,
            e: self.e + o.e,
        }
    }

    fn abs(&self) -> Dy {
        Dy { m: self.m.abs(), e: self.e }
    }

    fn max(self, o: Dy) -> Dy {
        if self < o {
            o
        } else {
            self
        }
    }

    /// Rounds to `KEEP` significant bits, toward +∞ if `up` else −∞.
    fn round(self, up: bool) -> Dy {
        let bits = self.m.bits();
        if bits <= KEEP {
            return self;
        }
        let sh = bits - KEEP;
        let (q, r) = self.m.div_mod_floor(&(BigInt::one() << sh));
        let q = if up && !r.is_zero() { q + 1 } else { q };
        Dy { m: q, e: self.e + sh as i64 }
    }

    /// `self / d` rounded toward +∞ if `up` else −∞.
    fn div_int(&self, d: u64, up: bool) -> Dy {
        let d = BigInt::from(d);
        let sh = (KEEP + d.bits()).saturating_sub(self.m.bits());
        let (q, r) = (&self.m << sh).div_mod_floor(&d);
        let q = if up && !r.is_zero() { q + 1 } else { q };
        Dy { m: q, e: self.e - sh as i64 }
    }

    fn to_q(&self) -> Q {
        if self.e >= 0 {
            Q::from_integer(&self.m << self.e as u64)
        } else {
            Q::new(self.m.clone(), BigInt::one() << (-self.e) as u64)
        }
    }
}

impl PartialOrd for Dy {
    fn partial_cmp(&self, o: &Dy) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Dy {
    fn cmp(&self, o: &Dy) -> std::cmp::Ordering {
        self.sub(o).m.sign().cmp(&num_bigint::Sign::NoSign)
    }
}

/// Bounds for one fixed-point variable.
#[derive(Clone, Debug, PartialEq)]
pub struct AbstractValue {
    /// Interval containing the exact value.
    pub lo: Q,
    pub hi: Q,
    /// Accumulated error bound in ulps.
    pub err: Q,
}

impl AbstractValue {
    pub fn zero() -> Self {
        AbstractValue {
            lo: Q::zero(),
            hi: Q::zero(),
            err: Q::zero(),
        }
    }

    /// Upper bound on the absolute exact value.
    pub fn max_magnitude(&self) -> Q {
        qmax(&self.lo.abs(), &self.hi.abs())
    }

    /// Bounds on the computed value for any `n ≥ 1`.
    pub fn computed(&self, b: u32) -> (Q, Q) {
        let slack = &self.err * Dy::pow2(-(b as i64)).to_q();
        (&self.lo - &slack, &self.hi + &slack)
    }

    /// Upper bound on the absolute computed value.
    pub fn computed_magnitude(&self, b: u32) -> Q {
        let (lo, hi) = self.computed(b);
        qmax(&lo.abs(), &hi.abs())
    }
}

/// Flagged steps whose preconditions the prover checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Line {
    /// Entries satisfy the defining identities of the table.
    TableIdentity,
    /// The table covers every index the kernel reads.
    TableLength,
    /// `|S| < 2^(B−1)` where the sign bit is tested.
    SignTest,
    /// Denominator change stays within one limb and the two's-complement window.
    DenomChange,
    /// `0 ≤ S < 2^B` before `S ← S·T_m`.
    Horner,
    /// `0 ≤ S < 2^B` before the final division.
    FinalDiv,
    /// The product by `X` fits in `n` limbs.
    FinalMul,
    /// Final error at most 2 ulp.
    FinalError,
}

impl Line {
    pub const ALL: [Line; 8] = [
        Line::TableIdentity,
        Line::TableLength,
        Line::SignTest,
        Line::DenomChange,
        Line::Horner,
        Line::FinalDiv,
        Line::FinalMul,
        Line::FinalError,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Line::TableIdentity => "table-identity",
            Line::TableLength => "table-length",
            Line::SignTest => "sign-test",
            Line::DenomChange => "denominator-change",
            Line::Horner => "horner-multiply",
            Line::FinalDiv => "final-division",
            Line::FinalMul => "final-multiply",
            Line::FinalError => "final-error",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub n_terms: usize,
    pub k: usize,
    pub line: Line,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LineOutcome {
    pub checked: u64,
    pub failed: u64,
}

#[derive(Clone, Debug)]
pub struct ProofReport {
    pub kind: SeriesKind,
    pub limb_bits: u32,
    pub n_min: usize,
    pub n_max: usize,
    /// Worst final error bound (ulp) for each `N` in `n_min..=n_max`.
    pub worst_error: Vec<Q>,
    /// Outcomes per flagged step, in [`Line::ALL`] order.
    pub outcomes: Vec<(Line, LineOutcome)>,
    pub first_violation: Option<Violation>,
}

impl ProofReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
            && self.worst_error.iter().all(|e| *e <= qi(2))
            && self.outcomes.iter().all(|(_, o)| o.failed == 0)
    }

    pub fn max_error(&self) -> Q {
        self.worst_error.iter().fold(Q::zero(), |a, e| qmax(&a, e))
    }

    /// `N` attaining the largest final error bound.
    pub fn argmax_error(&self) -> Option<usize> {
        let m = self.max_error();
        self.worst_error.iter().position(|e| *e == m).map(|i| i + self.n_min)
    }
}

impl fmt::Display for ProofReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<6} {:>2}-bit  N={}..{}  max error {} ulp  {}",
            self.kind.name(),
            self.limb_bits,
            self.n_min,
            self.n_max,
            fmt_upper(&self.max_error(), 6),
            if self.passed() { "PASS" } else { "FAIL" }
        )?;
        if let Some(v) = &self.first_violation {
            write!(f, "  [{} at N={} k={}: {}]", v.line.name(), v.n_terms, v.k, v.detail)?;
        }
        Ok(())
    }
}

/// Individual kernels. The exp report also covers the hyperbolic sine
/// kernel used for exp at high precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kernel {
    Atan,
    Atanh,
    Exp,
    Sinh,
    Sin,
    Cos,
}

impl Kernel {
    pub fn for_kind(kind: SeriesKind) -> &'static [Kernel] {
        match kind {
            SeriesKind::Atan => &[Kernel::Atan],
            SeriesKind::Atanh => &[Kernel::Atanh],
            SeriesKind::Exp => &[Kernel::Exp, Kernel::Sinh],
            SeriesKind::Sin => &[Kernel::Sin],
            SeriesKind::Cos => &[Kernel::Cos],
        }
    }

    fn alternating(self) -> bool {
        matches!(self, Kernel::Atan | Kernel::Sin | Kernel::Cos)
    }

    /// (stride, offset) of the table index of term `k`.
    fn index_map(self) -> (usize, usize) {
        match self {
            Kernel::Atan | Kernel::Atanh | Kernel::Exp => (1, 0),
            Kernel::Sinh | Kernel::Sin => (2, 1),
            Kernel::Cos => (2, 0),
        }
    }

    fn square(self) -> bool {
        self != Kernel::Exp
    }

    fn final_mul_x(self) -> bool {
        matches!(self, Kernel::Atan | Kernel::Atanh | Kernel::Sinh | Kernel::Sin)
    }

    fn table_kind(self) -> DenomKind {
        match self {
            Kernel::Atan | Kernel::Atanh => DenomKind::Odd,
            _ => DenomKind::Factorial,
        }
    }
}

/// One bound at a program point, in the order a [`crate::series::Probe`]
/// observes them.
#[derive(Clone, Debug)]
pub struct TracePoint {
    pub point: Point,
    pub k: usize,
    pub value: AbstractValue,
}

struct Checks {
    outcomes: Vec<(Line, LineOutcome)>,
    first: Option<Violation>,
}

impl Checks {
    fn new() -> Self {
        Checks {
            outcomes: Line::ALL.iter().map(|&l| (l, LineOutcome::default())).collect(),
            first: None,
        }
    }

    fn check(&mut self, ok: bool, line: Line, n_terms: usize, k: usize, detail: impl FnOnce() -> String) {
        let o = &mut self.outcomes.iter_mut().find(|(l, _)| *l == line).unwrap().1;
        o.checked += 1;
        if !ok {
            o.failed += 1;
            if self.first.is_none() {
                self.first = Some(Violation {
                    n_terms,
                    k,
                    line,
                    detail: detail(),
                });
            }
        }
    }
}

/// Internal state of one fixed-point variable (see [`AbstractValue`]).
#[derive(Clone, Debug)]
struct Av {
    lo: Dy,
    hi: Dy,
    err: Dy,
}

impl Av {
    fn to_public(&self) -> AbstractValue {
        AbstractValue {
            lo: self.lo.to_q(),
            hi: self.hi.to_q(),
            err: self.err.to_q(),
        }
    }

    fn max_magnitude(&self) -> Dy {
        self.lo.abs().max(self.hi.abs())
    }
}

struct Machine<'a, L: Limb> {
    table: &'a DenomTable<L>,
    kernel: Kernel,
    n_terms: usize,
    two_b: Dy,
    half: Dy,
    eps: Dy,
    checks: &'a mut Checks,
    trace: Option<&'a mut Vec<TracePoint>>,
}

impl<'a, L: Limb> Machine<'a, L> {
    fn emit(&mut self, point: Point, k: usize, s: &Av) {
        if let Some(t) = self.trace.as_mut() {
            t.push(TracePoint {
                point,
                k,
                value: s.to_public(),
            });
        }
    }

    /// Bounds on the computed value.
    fn computed(&self, s: &Av) -> (Dy, Dy) {
        let slack = s.err.mul(&self.eps);
        (s.lo.sub(&slack), s.hi.add(&slack))
    }

    fn denom_step(&mut self, s: &mut Av, k: usize, v: Option<u64>, v1: u64) {
        let (clo, chi) = self.computed(s);
        let mag = clo.abs().max(chi.abs());
        let ok = mag < self.half;
        self.checks.check(ok, Line::SignTest, self.n_terms, k, || {
            format!("|S| may reach {} >= 2^(B-1)", fmt_upper(&mag.to_q(), 3))
        });
        let scale = |x: &Dy, up: bool| match v {
            Some(v) => x.mul(&Dy::int(v)).div_int(v1, up),
            None => x.div_int(v1, up),
        };
        if !chi.is_neg() {
            let top = scale(&chi, true);
            let ok = top < self.two_b;
            self.checks.check(ok, Line::DenomChange, self.n_terms, k, || {
                format!("S*v/v' may reach {} >= 2^B", fmt_upper(&top.to_q(), 3))
            });
        }
        if clo.is_neg() {
            let ok = !clo.add(&Dy::int(v1)).is_neg();
            self.checks.check(ok, Line::DenomChange, self.n_terms, k, || {
                "negative S exceeds v' in magnitude".to_string()
            });
        }
        s.lo = scale(&s.lo, false);
        s.hi = scale(&s.hi, true);
        s.err = scale(&s.err, true).add(&Dy::int(1));
    }

    fn run(&mut self) -> Av {
        let kernel = self.kernel;
        let n_terms = self.n_terms;
        let m = splitting_param(n_terms);
        let (stride, offset) = kernel.index_map();
        let idx = |k: usize| stride * k + offset;
        let tau_log = if kernel.square() { 8 } else { 4 };
        let eps = self.eps.clone();
        let one = Dy::int(1);

        // power table: magnitudes τ^j, errors e_j
        let tmag: Vec<Dy> = (0..=m).map(|j| Dy::pow2(-(tau_log * j as i64))).collect();
        let mut terr = vec![Dy::zero(); m + 1];
        let prod = |a: usize, b: usize, terr: &Vec<Dy>| -> Dy {
            tmag[a]
                .mul(&terr[b])
                .add(&tmag[b].mul(&terr[a]))
                .add(&terr[a].mul(&terr[b]).mul(&eps))
                .add(&one)
                .round(true)
        };
        terr[1] = if kernel.square() { one.clone() } else { Dy::zero() };
        terr[2] = prod(1, 1, &terr);
        let mut j = 4;
        while j <= m {
            terr[j - 1] = prod(j / 2, j / 2 - 1, &terr);
            terr[j] = prod(j / 2, j / 2, &terr);
            j += 2;
        }

        let table = self.table;
        let v = |i: usize| table.v[i].to_u64();
        let mul_div = table.kind == DenomKind::Odd;
        let mut s = Av {
            lo: Dy::zero(),
            hi: Dy::zero(),
            err: Dy::zero(),
        };
        for k in (0..n_terms).rev() {
            if k + 1 < n_terms {
                let (i, i1) = (idx(k), idx(k + 1));
                if (i..i1).any(|j| v(j) != v(j + 1)) {
                    self.emit(Point::BeforeDenom, k, &s);
                    if mul_div {
                        self.denom_step(&mut s, k, Some(v(i)), v(i1));
                    } else {
                        for j in (i + 1..=i1).rev() {
                            if v(j) != v(j - 1) {
                                self.denom_step(&mut s, k, None, v(j));
                            }
                        }
                    }
                    self.emit(Point::AfterDenom, k, &s);
                }
            }
            let u = Dy::int(table.u[idx(k)].to_u64());
            let neg = kernel.alternating() && k % 2 == 1;
            let j = k % m;
            if j == 0 {
                let c = if neg { u.neg() } else { u };
                s.lo = s.lo.add(&c).round(false);
                s.hi = s.hi.add(&c).round(true);
                self.emit(Point::Term, k, &s);
                if k != 0 {
                    self.emit(Point::BeforeHorner, k, &s);
                    let (clo, chi) = self.computed(&s);
                    let ok = !clo.is_neg() && chi < self.two_b;
                    self.checks.check(ok, Line::Horner, n_terms, k, || {
                        format!(
                            "S may leave [0, 2^B): [{}, {}]",
                            fmt_upper(&clo.to_q(), 3),
                            fmt_upper(&chi.to_q(), 3)
                        )
                    });
                    let mag = s.max_magnitude();
                    s.err = mag
                        .mul(&terr[m])
                        .add(&tmag[m].mul(&s.err))
                        .add(&s.err.mul(&terr[m]).mul(&eps))
                        .add(&one)
                        .round(true);
                    s.lo = if s.lo.is_neg() { s.lo.mul(&tmag[m]) } else { Dy::zero() };
                    s.hi = if s.hi.is_neg() { Dy::zero() } else { s.hi.mul(&tmag[m]) };
                    self.emit(Point::AfterHorner, k, &s);
                }
            } else {
                let c = u.mul(&tmag[j]);
                if neg {
                    s.lo = s.lo.sub(&c).round(false);
                } else {
                    s.hi = s.hi.add(&c).round(true);
                }
                s.err = s.err.add(&u.mul(&terr[j])).round(true);
                self.emit(Point::Term, k, &s);
            }
        }

        self.emit(Point::BeforeFinalDiv, 0, &s);
        let (clo, chi) = self.computed(&s);
        let ok = !clo.is_neg() && chi < self.two_b;
        self.checks.check(ok, Line::FinalDiv, n_terms, 0, || {
            format!(
                "S may leave [0, 2^B): [{}, {}]",
                fmt_upper(&clo.to_q(), 3),
                fmt_upper(&chi.to_q(), 3)
            )
        });
        let v0 = v(idx(0));
        s.lo = s.lo.div_int(v0, false);
        s.hi = s.hi.div_int(v0, true);
        s.err = s.err.div_int(v0, true).add(&one);
        if kernel.final_mul_x() {
            let xmax = Dy::pow2(-4);
            s.lo = if s.lo.is_neg() { s.lo.mul(&xmax) } else { Dy::zero() };
            s.hi = s.hi.mul(&xmax);
            s.err = xmax.mul(&s.err).add(&one);
            let (_, chi) = self.computed(&s);
            self.checks.check(chi < one, Line::FinalMul, n_terms, 0, || {
                "product with X may not fit in n limbs".to_string()
            });
        }
        self.emit(Point::Final, 0, &s);
        let ok = s.err <= Dy::int(2);
        let err = s.err.to_q();
        self.checks.check(ok, Line::FinalError, n_terms, 0, || {
            format!("final error bound {} ulp", fmt_upper(&err, 6))
        });
        s
    }
}

fn run_kernel<L: Limb>(
    kernel: Kernel,
    table: &DenomTable<L>,
    n_terms: usize,
    checks: &mut Checks,
    trace: Option<&mut Vec<TracePoint>>,
) -> Option<Q> {
    let (stride, offset) = kernel.index_map();
    let needed = stride * (n_terms - 1) + offset;
    if needed >= table.len() {
        checks.check(false, Line::TableLength, n_terms, n_terms - 1, || {
            format!("index {needed} beyond table length {}", table.len())
        });
        return None;
    }
    checks.check(true, Line::TableLength, n_terms, 0, String::new);
    let b = L::BITS as i64;
    let mut m = Machine {
        table,
        kernel,
        n_terms,
        two_b: Dy::pow2(b),
        half: Dy::pow2(b - 1),
        eps: Dy::pow2(-b),
        checks,
        trace,
    };
    Some(m.run().err.to_q())
}

/// Proves the kernel(s) of `kind` over `table` for every `N` in `3..=n_max`.
pub fn prove_series<L: Limb>(kind: SeriesKind, table: &DenomTable<L>, n_max: usize) -> ProofReport {
    let n_min = 3;
    let mut checks = Checks::new();
    let identity = table.check_identities();
    let kind_ok = table.kind == kind.table_kind();
    checks.check(identity.is_ok() && kind_ok, Line::TableIdentity, 0, identity.err().unwrap_or(0), || {
        if kind_ok {
            format!("entry {} violates the table identity", identity.unwrap_err())
        } else {
            "table kind does not match the series".to_string()
        }
    });
    let mut worst_error = Vec::new();
    for n_terms in n_min..=n_max.max(n_min) {
        let mut worst = Q::zero();
        for &kernel in Kernel::for_kind(kind) {
            match run_kernel(kernel, table, n_terms, &mut checks, None) {
                Some(e) => worst = qmax(&worst, &e),
                None => worst = qi(u64::MAX),
            }
        }
        worst_error.push(worst);
    }
    ProofReport {
        kind,
        limb_bits: L::BITS,
        n_min,
        n_max: n_max.max(n_min),
        worst_error,
        outcomes: checks.outcomes,
        first_violation: checks.first,
    }
}

/// Bounds at every program point of one kernel for one `N`, in probe order.
pub fn trace_kernel<L: Limb>(kernel: Kernel, table: &DenomTable<L>, n_terms: usize) -> Vec<TracePoint> {
    assert_eq!(table.kind, kernel.table_kind());
    let mut checks = Checks::new();
    let mut trace = Vec::new();
    run_kernel(kernel, table, n_terms, &mut checks, Some(&mut trace));
    trace
}

/// All five series kinds for both limb sizes, `N` up to `n_max`.
pub fn prove_all_with(n_max: usize) -> Vec<ProofReport> {
    let mut out = Vec::new();
    for kind in SeriesKind::ALL {
        out.push(prove_series(kind, u32::table(kind.table_kind()), n_max));
        out.push(prove_series(kind, u64::table(kind.table_kind()), n_max));
    }
    out
}

/// The default proof: ten reports covering `N = 3..=300`.
pub fn prove_all() -> Vec<ProofReport> {
    prove_all_with(300)
}
