//! atan: special cases, then `X = |x|` or `1/|x|`, up to two table
//! reductions `X ← (q·X − i)/(q + i·X)`, the series, and the table values
//! added back.

use super::{
    check_prec, check_w, const_error, const_float, const_scaled, leading_r, limbs_for, terms_for, to_fixed, Ball, BigFloat,
    Error, Mag, Raw, ReductionState, Tail,
};
use crate::argtables::{self, lookup, Band, Constant, Func, CONST_PREC};
use crate::limb::Word;
use crate::series::{eval_atan_series, TableLimb};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

pub fn atan_ball(x: &BigFloat, p: u64) -> Result<Ball, Error> {
    atan_ball_with::<Word>(x, p)
}

pub fn atan_ball_with<L: TableLimb>(x: &BigFloat, p: u64) -> Result<Ball, Error> {
    Ok(atan_raw_with::<L>(x, p)?.finish(p))
}

/// `X ← (2^q·X − i)/(2^q + i·X)`, truncated; `X` scaled by `2^bn`.
fn reduce(x: &BigUint, i: u64, q: u32, bn: u64) -> BigUint {
    let num = (x << q) - (BigUint::from(i) << bn);
    let den = (BigUint::one() << (bn + q as u64)) + x * i;
    (num << bn) / den
}

pub fn atan_raw_with<L: TableLimb>(x: &BigFloat, p: u64) -> Result<Raw, Error> {
    check_prec(p)?;
    if x.is_nan() {
        return Err(Error::InvalidInput("atan of NaN".into()));
    }
    let sign = |v: BigFloat| if x.is_negative() { v.neg() } else { v };
    if x.is_inf() {
        return Ok(Raw::special(sign(const_float(Constant::Pi2)), const_error(Constant::Pi2)));
    }
    if x.is_zero() {
        return Ok(Raw::exact(BigFloat::zero()));
    }
    let e = x.exponent().unwrap();
    let pi = p as i64;

    // atan(x) = x + O(x³)
    if 2 * e < -pi - 4 {
        return Ok(Raw::special(x.clone(), Mag::pow2(3 * e)));
    }
    // atan(x) = ±π/2 − atan(1/x), with 2^−e(1 − ε) < atan(1/|x|) < 2^(1−e).
    // The stored π/2 is within 2^−4672 of π/2, which the slack of 2^(−3e−2)
    // below 2^(1−e) absorbs while 3e + 2 ≤ 4672.
    if e > pi + 2 {
        let mut rad = Mag::pow2(1 - e);
        if 3 * e + 2 > CONST_PREC as i64 {
            rad = rad.add(&const_error(Constant::Pi2));
        }
        return Ok(Raw::special(sign(const_float(Constant::Pi2)), rad));
    }
    let big = e > 0;
    if x.abs() == BigFloat::one() {
        return Ok(Raw::special(sign(const_float(Constant::Pi4)), const_error(Constant::Pi4)));
    }

    let w = (pi - e.min(0) + 4) as u64;
    check_w(w)?;
    let (n, bn) = limbs_for::<L>(w);
    let mut z = 0u64;

    let mut xs = if !big {
        let (v, exact) = x.floor_scaled_abs(bn as i64);
        z += u64::from(!exact);
        v
    } else {
        // 1/|x| = 2^−s / m
        let s = x.shift();
        let num = BigUint::one() << (bn as i64 - s) as u64;
        let (q, r) = num.div_rem(x.mantissa());
        z += u64::from(!r.is_zero());
        q
    };

    let band = Band::for_bits(w).unwrap();
    let table = argtables::table(Func::Atan, band);
    let (r1, r2) = if w <= 512 { (8u32, 0u32) } else { (5, 5) };

    let p1 = (&xs >> (bn - r1 as u64)).iter_u64_digits().next().unwrap_or(0);
    if p1 != 0 {
        xs = reduce(&xs, p1, r1, bn);
        z += 1;
    }
    // the second grid is 2^−(r1+r2); after the first step X < 2^−r1
    let mut p2 = 0;
    if r2 > 0 {
        p2 = (&xs >> (bn - (r1 + r2) as u64)).iter_u64_digits().next().unwrap_or(0);
        if p2 != 0 {
            xs = reduce(&xs, p2, r1 + r2, bn);
            z += 1;
        }
    }

    let r = leading_r(&xs, bn);
    debug_assert!(r >= (r1 + r2) as u64);
    let n_terms = if w > r { terms_for(Tail::Atan, r, w).0 } else { 0 };
    let mut y = if n_terms <= 2 {
        z += 3;
        match n_terms {
            0 => BigUint::zero(),
            1 => xs.clone(),
            _ => {
                let x3 = ((((&xs * &xs) >> bn) * &xs) >> bn) / 3u32;
                &xs - x3
            }
        }
    } else {
        z += 2;
        eval_atan_series(&to_fixed::<L>(&xs, n), n_terms, L::odd_table()).to_biguint()
    };
    if p1 != 0 {
        y += lookup::<L>(table, 1, p1 as usize, bn).to_biguint();
        z += 1;
    }
    if p2 != 0 {
        y += lookup::<L>(table, 2, p2 as usize, bn).to_biguint();
        z += 1;
    }
    if big {
        y = const_scaled(Constant::Pi2, bn) - y;
        z += 1;
    }
    let tail_bits = r as i64 * (2 * n_terms as i64 + 1);
    let rad = Mag::pow2(-tail_bits).add(&Mag::ulps(z, -(bn as i64)));
    Ok(Raw {
        mid: sign(BigFloat::from_parts(false, y, -(bn as i64))),
        rad,
        state: Some(ReductionState {
            w,
            n,
            bn,
            r1,
            r2,
            p1: p1 as usize,
            p2: p2 as usize,
            r,
            n_terms,
            z_ulps: z,
            tail_bits,
        }),
    })
}
