//! Reference evaluation for table generation.
//!
//! Values are integers scaled by `2^f` (`f` a multiple of 64). Arguments in
//! `[0, 1]` are brought below `2^−4` by four halvings, the series kernels of
//! this crate do the rest, and the halvings are undone:
//!
//! - `exp(t) = exp(t/16)^16`
//! - `sin, cos(t)` from `t/16` by four double-angle steps
//! - `log(1+t) = 32·atanh((z−1)/(z+1))` with `z = (1+t)^(1/16)`
//! - `atan(t) = 16·atan(t₄)` with `t_{k+1} = t_k / (1 + √(1 + t_k²))`
//!
//! The results carry at most [`REF_ERR`] ulp of error. [`correctly_rounded`]
//! wraps them in a retry loop that raises `f` until rounding to the target
//! precision is decided.

use super::Entry;
use crate::fixedpoint::{biguint_to_limbs, FixedPoint};
use crate::series::{
    eval_atan_series, eval_atanh_series, eval_exp_series, eval_sin_cos_series, DenomKind, DenomTable, SeriesKind,
    Want,
};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::sync::OnceLock;

/// Error bound of every function here, in units of `2^−f`.
pub const REF_ERR: u64 = 1 << 14;

/// Denominator tables long enough for the term counts used at 4800 bits.
pub fn long_table(kind: DenomKind) -> &'static DenomTable<u64> {
    static ODD: OnceLock<DenomTable<u64>> = OnceLock::new();
    static FAC: OnceLock<DenomTable<u64>> = OnceLock::new();
    match kind {
        DenomKind::Odd => ODD.get_or_init(|| DenomTable::generate_len(kind, 800)),
        DenomKind::Factorial => FAC.get_or_init(|| DenomTable::generate_len(kind, 1200)),
    }
}

/// Smallest `N ≥ 3` whose truncation error is below `2^−(f+2)` for
/// `0 ≤ X < 2^−r`.
pub fn term_count(kind: SeriesKind, r: u64, f: u64) -> usize {
    let target = -(f as f64) - 2.0;
    let mut log_fact = 0.0f64; // log2((e_N)!)
    let mut last = 0u64;
    for n in 3usize.. {
        // exponent of the first omitted term
        let e = match kind {
            SeriesKind::Atan | SeriesKind::Atanh => 2 * n as u64 + 1,
            SeriesKind::Exp => n as u64,
            SeriesKind::Sin => 2 * n as u64 + 1,
            SeriesKind::Cos => 2 * n as u64,
        };
        if kind != SeriesKind::Atan && kind != SeriesKind::Atanh {
            while last < e {
                last += 1;
                log_fact += (last as f64).log2();
            }
        }
        // factor 2 covers the geometric tail
        let bound = 1.0 - (r * e) as f64 - log_fact;
        if bound <= target {
            return n;
        }
    }
    unreachable!()
}

fn to_fixed(x: &BigUint, f: u64) -> FixedPoint<u64> {
    let n = (f / 64) as usize;
    FixedPoint::from_limbs(biguint_to_limbs(x, n), n)
}

fn leading_r(x: &BigUint, f: u64) -> u64 {
    f - x.bits()
}

fn series(kind: SeriesKind, x: &BigUint, f: u64) -> BigUint {
    if x.is_zero() {
        return match kind {
            SeriesKind::Exp | SeriesKind::Cos => BigUint::one() << f,
            _ => BigUint::zero(),
        };
    }
    let n = term_count(kind, leading_r(x, f), f);
    let table = long_table(kind.table_kind());
    let xf = to_fixed(x, f);
    match kind {
        SeriesKind::Atan => eval_atan_series(&xf, n, table),
        SeriesKind::Atanh => eval_atanh_series(&xf, n, table),
        SeriesKind::Exp => eval_exp_series(&xf, n, table),
        SeriesKind::Sin => eval_sin_cos_series(&xf, n, table, Want::Sin).0.unwrap(),
        SeriesKind::Cos => eval_sin_cos_series(&xf, n, table, Want::Cos).1.unwrap(),
    }
    .to_biguint()
}

fn mul(a: &BigUint, b: &BigUint, f: u64) -> BigUint {
    (a * b) >> f
}

fn div(a: &BigUint, b: &BigUint, f: u64) -> BigUint {
    (a << f) / b
}

fn sqrt(a: &BigUint, f: u64) -> BigUint {
    (a << f).sqrt()
}

/// `exp(t)` for `0 ≤ t ≤ 1`.
pub fn exp(t: &BigUint, f: u64) -> BigUint {
    let mut y = series(SeriesKind::Exp, &(t >> 4u32), f);
    for _ in 0..4 {
        y = mul(&y, &y, f);
    }
    y
}

/// `(sin t, cos t)` for `0 ≤ t ≤ 1`.
pub fn sin_cos(t: &BigUint, f: u64) -> (BigUint, BigUint) {
    let x = t >> 4u32;
    let mut s = series(SeriesKind::Sin, &x, f);
    let mut c = series(SeriesKind::Cos, &x, f);
    let one = BigUint::one() << f;
    for _ in 0..4 {
        let s2 = mul(&s, &s, f) << 1u32;
        s = mul(&s, &c, f) << 1u32;
        c = &one - s2;
    }
    (s, c)
}

/// `log(1 + t)` for `0 ≤ t ≤ 1`.
pub fn log1p(t: &BigUint, f: u64) -> BigUint {
    let one = BigUint::one() << f;
    let mut z = &one + t;
    for _ in 0..4 {
        z = sqrt(&z, f);
    }
    let u = div(&(&z - &one), &(&z + &one), f);
    series(SeriesKind::Atanh, &u, f) << 5u32
}

/// `atan(t)` for `0 ≤ t ≤ 1`.
pub fn atan(t: &BigUint, f: u64) -> BigUint {
    let one = BigUint::one() << f;
    let mut t = t.clone();
    for _ in 0..4 {
        let h = &one + sqrt(&(&one + mul(&t, &t, f)), f);
        t = div(&t, &h, f);
    }
    series(SeriesKind::Atan, &t, f) << 4u32
}

/// Rounds `g(f)` (a value within [`REF_ERR`] ulp of the target at `f`
/// fractional bits) to nearest at `prec` significant bits, raising `f`
/// until both ends of the error interval round alike.
pub fn correctly_rounded(prec: u64, g: impl Fn(u64) -> BigUint) -> Entry {
    let mut f = (prec + 128).div_ceil(64) * 64;
    loop {
        let a = g(f);
        if a > BigUint::from(REF_ERR) {
            let lo = Entry::round_nearest(&(&a - REF_ERR), f, prec);
            let hi = Entry::round_nearest(&(&a + REF_ERR), f, prec);
            if lo == hi {
                return lo;
            }
        }
        f += 128;
        assert!(f < 4 * prec + 1024, "rounding undecided at {f} bits");
    }
}

/// Grid point `num / 2^bits` as a scaled integer at `f` fractional bits.
pub fn grid(num: u64, bits: u32, f: u64) -> BigUint {
    BigUint::from(num) << (f - bits as u64)
}
