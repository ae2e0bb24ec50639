//! Top-level evaluation of exp, log, sin, cos and atan on [`BigFloat`]
//! inputs, returning [`Ball`] enclosures.
//!
//! Each function reduces its argument with the lookup tables of
//! [`crate::argtables`], sums a Taylor series with the kernels of
//! [`crate::series`], and undoes the reductions, all in fixed point with
//! `n = ⌈w/B⌉` fractional limbs. Every truncation and table read is charged
//! in ulps (`2^−Bn`) to a running counter `Z`; the raw radius is
//! `Z·2^−Bn` plus the series truncation bound. Rounding the midpoint to `p`
//! bits and adding that error to the radius gives the public [`Ball`].
//!
//! Guard bits: atan uses `w = p − min(0, e) + 4`. exp, log, sin and cos use
//! `w = p + 8` plus an exponent compensation where the result can be much
//! smaller than the working scale (see each module). Their counters stay
//! below 160 ulp, so the internal error is at most `10·2^−(p+4)` relative
//! to the result scale.

mod atan;
mod ball;
mod bigfloat;
mod exp;
mod log;
mod sincos;

pub use atan::{atan_ball, atan_ball_with, atan_raw_with};
pub use ball::{Ball, Mag, MAG_BITS};
pub use bigfloat::{BigFloat, ParseError, Round, DECIMAL_PREC};
pub use exp::{exp_ball, exp_ball_with, exp_raw_with};
pub use log::{log_ball, log_ball_with, log_raw_with};
pub use sincos::{cos_ball, sin_ball, sin_cos_ball, sin_cos_ball_with, sin_cos_raw_with};

pub use crate::argtables::Func;
pub use crate::series::Want;

use crate::argtables::{constants, Constant, CONST_PREC};
use crate::fixedpoint::FixedPoint;
use crate::limb::{Limb, Word};
use crate::series::TableLimb;
use num_bigint::BigUint;
use std::sync::OnceLock;

/// Largest working precision served by the lookup tables.
pub const MAX_WORKING_BITS: u64 = 4608;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("working precision of {0} bits exceeds the supported {MAX_WORKING_BITS}")]
    UnsupportedPrecision(u64),
    #[error("unsupported argument: {0}")]
    UnsupportedArgument(String),
    #[error("argument outside the domain: {0}")]
    DomainError(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Parameters of one evaluation through the reduction pipeline.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReductionState {
    /// Working precision in bits.
    pub w: u64,
    /// Fractional limbs, and `B·n`.
    pub n: usize,
    pub bn: u64,
    /// Reduction bits of the first and second table.
    pub r1: u32,
    pub r2: u32,
    /// Table indices (0 when the lookup is skipped).
    pub p1: usize,
    pub p2: usize,
    /// The residual satisfies `0 ≤ X < 2^−r`.
    pub r: u64,
    /// Series terms.
    pub n_terms: usize,
    /// Accounted error in ulps of `2^−Bn`, in the units of the fixed-point
    /// result (before any final power-of-two scaling).
    pub z_ulps: u64,
    /// The series truncation error is at most `2^−tail_bits`.
    pub tail_bits: i64,
}

/// Enclosure before the midpoint is rounded to the target precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raw {
    pub mid: BigFloat,
    pub rad: Mag,
    /// `None` for the special-case branches.
    pub state: Option<ReductionState>,
}

impl Raw {
    pub fn exact(mid: BigFloat) -> Raw {
        Raw {
            mid,
            rad: Mag::zero(),
            state: None,
        }
    }

    pub fn special(mid: BigFloat, rad: Mag) -> Raw {
        Raw { mid, rad, state: None }
    }

    /// Rounds the midpoint to `p` bits and adds the rounding error.
    pub fn finish(&self, p: u64) -> Ball {
        Ball::new(self.mid.clone(), self.rad).round(p)
    }
}

fn check_prec(p: u64) -> Result<(), Error> {
    if p < 2 {
        return Err(Error::InvalidInput(format!("precision {p} is below 2")));
    }
    Ok(())
}

fn check_w(w: u64) -> Result<(), Error> {
    if w > MAX_WORKING_BITS {
        return Err(Error::UnsupportedPrecision(w));
    }
    Ok(())
}

/// `(n, B·n)` for working precision `w`.
fn limbs_for<L: Limb>(w: u64) -> (usize, u64) {
    let n = w.div_ceil(L::BITS as u64) as usize;
    (n, n as u64 * L::BITS as u64)
}

fn to_fixed<L: Limb>(v: &BigUint, n: usize) -> FixedPoint<L> {
    FixedPoint::from_biguint(v, n, 0)
}

/// Bits of `X < 2^−r`, given `X` scaled by `2^bn`; `bn` when `X = 0`.
fn leading_r(x: &BigUint, bn: u64) -> u64 {
    bn - x.bits()
}

/// `⌊log2 k!⌋` lower bound, from a cached table of `Σ log2 i`.
fn log2_fact_lower(k: u64) -> i64 {
    static SUMS: OnceLock<Vec<f64>> = OnceLock::new();
    let sums = SUMS.get_or_init(|| {
        let mut v = vec![0.0f64; 1400];
        for i in 2..v.len() {
            v[i] = v[i - 1] + (i as f64).log2();
        }
        v
    });
    // the margin covers the f64 rounding of the running sum
    (sums[k as usize] - 1e-6).floor().max(0.0) as i64
}

/// Series shapes with their truncation bounds for `0 ≤ X < 2^−r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tail {
    /// `|R| ≤ X^(2N+1)`.
    Atan,
    /// `R ≤ 2·X^(2N+1)`.
    Atanh,
    /// `R ≤ 2·X^N/N!`.
    Exp,
    /// `R ≤ 2·X^(2N+1)/(2N+1)!`.
    Sinh,
    /// Sine and cosine together: `|R| ≤ X^(2N)/(2N)!`.
    SinCos,
}

/// `b` with truncation error `≤ 2^−b` after `N` terms.
fn tail_bits(t: Tail, r: u64, n: u64) -> i64 {
    let r = r as i64;
    let n = n as i64;
    match t {
        Tail::Atan => r * (2 * n + 1),
        Tail::Atanh => r * (2 * n + 1) - 1,
        Tail::Exp => r * n + log2_fact_lower(n as u64) - 1,
        Tail::Sinh => r * (2 * n + 1) + log2_fact_lower(2 * n as u64 + 1) - 1,
        Tail::SinCos => 2 * r * n + log2_fact_lower(2 * n as u64),
    }
}

/// Smallest `N ≥ 1` with truncation error `≤ 2^−target`.
fn terms_for(t: Tail, r: u64, target: u64) -> (usize, i64) {
    assert!(r >= 4);
    let mut n = 1u64;
    loop {
        let b = tail_bits(t, r, n);
        if b >= target as i64 {
            return (n as usize, b);
        }
        n += 1;
    }
}

/// `|c − stored| ≤` this, for the constant stored at [`CONST_PREC`] bits
/// (half an ulp; π/2 lies in `[1, 2)`, the others in `[1/2, 1)`).
fn const_error(c: Constant) -> Mag {
    match c {
        Constant::Pi2 => Mag::pow2(-(CONST_PREC as i64)),
        _ => Mag::pow2(-(CONST_PREC as i64) - 1),
    }
}

/// The stored constant as a float.
fn const_float(c: Constant) -> BigFloat {
    let e = constants().get(c);
    BigFloat::from_parts(false, e.mant.clone(), e.exp)
}

/// `⌊c · 2^f⌋` with error `< 2^−f`.
fn const_scaled(c: Constant, f: u64) -> BigUint {
    assert!(f <= CONST_PREC);
    constants().scaled(c, f)
}

/// `c` truncated to `⌈w/B⌉` fractional limbs (one integral limb). The error
/// is below one ulp: the truncation and the storage rounding together stay
/// under `2^−Bn`.
pub fn get_constant(which: Constant, w: u64) -> Result<FixedPoint<Word>, Error> {
    get_constant_with::<Word>(which, w)
}

pub fn get_constant_with<L: Limb>(which: Constant, w: u64) -> Result<FixedPoint<L>, Error> {
    let (n, bn) = limbs_for::<L>(w);
    if bn > CONST_PREC {
        return Err(Error::UnsupportedPrecision(w));
    }
    Ok(FixedPoint::from_biguint(&const_scaled(which, bn), n, 1))
}

/// The working precision the pipeline of `f` would use for `(x, p)`, or
/// `None` when a special-case branch answers without it.
pub fn working_precision(f: Func, x: &BigFloat, p: u64) -> Option<u64> {
    let e = x.exponent()?;
    let p = p as i64;
    let w = match f {
        Func::Atan => {
            if 2 * e < -p - 4 || e > p + 2 || x.abs() == BigFloat::one() {
                return None;
            }
            p - e.min(0) + 4
        }
        Func::Exp => {
            if e > exp::MAX_EXPONENT || e < -p - 8 {
                return None;
            }
            p + 8
        }
        Func::Log => {
            if x.is_negative() {
                return None;
            }
            let ed = x.sub(&BigFloat::one()).exponent()?;
            if ed < -p - 2 {
                return None;
            }
            p + 8 - ed.min(0)
        }
        Func::Sin | Func::Cos => {
            if 2 * e < -p - 4 {
                return None;
            }
            p + 8 - e.min(0)
        }
    };
    Some(w as u64)
}

/// Raw enclosure of `f(x)` with limb type `L`.
pub fn eval_raw_with<L: TableLimb>(f: Func, x: &BigFloat, p: u64) -> Result<Raw, Error> {
    match f {
        Func::Exp => exp_raw_with::<L>(x, p),
        Func::Log => log_raw_with::<L>(x, p),
        Func::Atan => atan_raw_with::<L>(x, p),
        Func::Sin => Ok(sin_cos_raw_with::<L>(x, p, Want::Sin)?.0.unwrap()),
        Func::Cos => Ok(sin_cos_raw_with::<L>(x, p, Want::Cos)?.1.unwrap()),
    }
}

pub fn eval_with<L: TableLimb>(f: Func, x: &BigFloat, p: u64) -> Result<Ball, Error> {
    Ok(eval_raw_with::<L>(f, x, p)?.finish(p))
}

/// `f(x)` at precision `p` with the default limb size.
pub fn eval(f: Func, x: &BigFloat, p: u64) -> Result<Ball, Error> {
    eval_with::<Word>(f, x, p)
}
