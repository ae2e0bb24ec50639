//! exp: `x = m·log 2 + t` with `t ∈ [0, log 2)`, table reductions of `t`,
//! the series (or `s + √(1 + s²)` from the sinh series at high precision),
//! table values multiplied back, and a final scaling by `2^m`.
//!
//! Guard bits: `w = p + 8`. The result `exp(t)` lies in `[1, 2)`, so the
//! fixed-point error is already relative.

use super::{
    check_prec, check_w, const_scaled, leading_r, limbs_for, terms_for, to_fixed, Ball, BigFloat, Error, Mag, Raw,
    ReductionState, Tail,
};
use crate::argtables::{self, lookup, Band, Constant, Func};
use crate::limb::Word;
use crate::series::{eval_exp_series, eval_sinh_series, TableLimb};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

/// Largest accepted input exponent: `|x| < 2^24`.
pub const MAX_EXPONENT: i64 = 24;

/// Fixed-point width `B·n` from which `exp = s + √(1 + s²)` replaces the
/// exp series. Deciding on `B·n` rather than `w` keeps every `w` with the
/// same limb count on the same path, so raising `p` never widens the ball.
pub const SINH_THRESHOLD: u64 = 832;

pub fn exp_ball(x: &BigFloat, p: u64) -> Result<Ball, Error> {
    exp_ball_with::<Word>(x, p)
}

pub fn exp_ball_with<L: TableLimb>(x: &BigFloat, p: u64) -> Result<Ball, Error> {
    Ok(exp_raw_with::<L>(x, p)?.finish(p))
}

/// Error after multiplying values `< 2` carrying `ea` and `eb` ulp, with one
/// truncation: `2·ea + 2·eb`, one ulp for the cross term and one for the cut.
fn mul_err(ea: u64, eb: u64) -> u64 {
    2 * ea + 2 * eb + 2
}

pub fn exp_raw_with<L: TableLimb>(x: &BigFloat, p: u64) -> Result<Raw, Error> {
    check_prec(p)?;
    if x.is_nan() {
        return Err(Error::InvalidInput("exp of NaN".into()));
    }
    if x.is_inf() {
        return Ok(Raw::exact(if x.is_negative() {
            BigFloat::zero()
        } else {
            x.clone()
        }));
    }
    if x.is_zero() {
        return Ok(Raw::exact(BigFloat::one()));
    }
    let e = x.exponent().unwrap();
    if e > MAX_EXPONENT {
        return Err(Error::UnsupportedArgument(format!(
            "|x| ≥ 2^{MAX_EXPONENT} exceeds the stored precision of log 2"
        )));
    }
    // |exp(x) − 1| ≤ 2|x| < 2^(e+1) for |x| ≤ 1/2
    if e < -(p as i64) - 8 {
        return Ok(Raw::special(BigFloat::one(), Mag::pow2(e + 1)));
    }

    let w = p + 8;
    check_w(w)?;
    let (n, bn) = limbs_for::<L>(w);

    // t = x − m·log 2 at g extra bits. With |m| ≤ 2^(max(e,0)+1) + 1 the
    // error is below (|m| + 1)·2^−F < 2^−(Bn+4).
    let g = e.max(0) as u64 + 6;
    let f = bn + g;
    let xs = x.floor_scaled(f as i64);
    let l2 = BigInt::from(const_scaled(Constant::Log2, f));
    let m = xs.div_floor(&l2);
    let t = (xs - &m * &l2).to_biguint().unwrap();
    let m: i64 = i64::try_from(&m).unwrap();
    let x0 = t >> g;
    // |t − X0| < 2^−Bn + 2^−(Bn+4) and exp′ < 2 on [0, log 2]: 3 ulp at the end
    let z_t = 3;

    let band = Band::for_bits(w).unwrap();
    let table = argtables::table(Func::Exp, band);
    let (r1, r2) = if band == Band::Fast { (8u32, 0u32) } else { (5, 5) };
    let mut xr = x0;
    let cut = |v: &BigUint, bits: u32| -> u64 { (v >> (bn - bits as u64)).iter_u64_digits().next().unwrap_or(0) };
    let p1 = cut(&xr, r1);
    xr -= BigUint::from(p1) << (bn - r1 as u64);
    let mut p2 = 0;
    if r2 > 0 {
        p2 = cut(&xr, r1 + r2);
        xr -= BigUint::from(p2) << (bn - (r1 + r2) as u64);
    }
    debug_assert!((p1 as usize) < table.params.counts[0]);

    let r = leading_r(&xr, bn);
    let one = BigUint::one() << bn;
    let (mut y, mut z, n_terms, tail_bits) = if xr.is_zero() {
        (one.clone(), 0, 0, i64::MAX)
    } else if bn >= SINH_THRESHOLD {
        let (nt, tb) = terms_for(Tail::Sinh, r, bn);
        let (s, es) = if nt <= 2 {
            let s = if nt == 1 {
                xr.clone()
            } else {
                &xr + ((((&xr * &xr) >> bn) * &xr) >> bn) / 6u32
            };
            (s, 3 + 1)
        } else {
            let s = eval_sinh_series(&to_fixed::<L>(&xr, n), nt, L::factorial_table()).to_biguint();
            (s, 2 + 1)
        };
        // s < 2^−8: s² carries < 1 ulp of propagated error plus its cut, and
        // √(1 + ·) halves that before its own cut
        let s2 = (&s * &s) >> bn;
        let c = ((&one + s2) << bn).sqrt();
        (s + c, es + 2, nt, tb)
    } else {
        let (nt, tb) = terms_for(Tail::Exp, r, bn);
        match nt {
            1 => (one.clone(), 1, nt, tb),
            2 => (&one + &xr, 1, nt, tb),
            _ => {
                let y = eval_exp_series(&to_fixed::<L>(&xr, n), nt, L::factorial_table()).to_biguint();
                (y, 2 + 1, nt, tb)
            }
        }
    };
    for (which, idx) in [(2, p2), (1, p1)] {
        if idx != 0 {
            let v = lookup::<L>(table, which, idx as usize, bn).to_biguint();
            y = (y * v) >> bn;
            z = mul_err(z, 1);
        }
    }
    z += z_t;

    let shift = m - bn as i64;
    Ok(Raw {
        mid: BigFloat::from_parts(false, y, shift),
        rad: Mag::ulps(z, shift),
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_values() {
        let b = exp_ball(&BigFloat::zero(), 53).unwrap();
        assert_eq!((b.mid, b.rad), (BigFloat::one(), Mag::zero()));
        let b = exp_ball(&BigFloat::one(), 60).unwrap();
        let e = BigFloat::from_f64(std::f64::consts::E);
        assert!(b.lo() < e.add(&BigFloat::pow2(-50)) && e.sub(&BigFloat::pow2(-50)) < b.hi());
        assert!(matches!(exp_ball(&BigFloat::from_u64(1 << 24), 53), Err(Error::UnsupportedArgument(_))));
        assert!(exp_ball(&BigFloat::from_i64(-(1 << 23)), 53).is_ok());
    }

    #[test]
    fn counters_stay_small() {
        for x in [0.5, -0.3, 100.25, -1e6, 1e-30, 0.693] {
            for p in [2, 53, 500, 504, 505, 823, 824, 2000, 4600] {
                let r = exp_raw_with::<u32>(&BigFloat::from_f64(x), p).unwrap();
                if let Some(st) = r.state {
                    assert!(st.z_ulps <= 160 && st.tail_bits >= st.bn as i64, "{x} {p}: {st:?}");
                }
            }
        }
    }
}
