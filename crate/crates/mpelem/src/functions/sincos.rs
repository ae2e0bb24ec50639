//! sin and cos: `|x| = k·π/4 + t`, reflection to `v ∈ [0, π/4]` by octant,
//! table reductions of `v`, the joint series (or cos from sin above
//! [`COS_FROM_SIN_THRESHOLD`] bits), and the angle-addition formulas.
//!
//! Guard bits: `w = p + 8 − min(0, e)`, so sin keeps relative accuracy for
//! small `|x|`. For `|x| ≥ 1` the tolerance is absolute: results near a root
//! of sin or cos carry an error of about `2^−(p+4)`, not relative to the value.

use super::{
    check_prec, check_w, const_scaled, leading_r, limbs_for, terms_for, to_fixed, Ball, BigFloat, Error, Mag, Raw,
    ReductionState, Tail, Want,
};
use crate::argtables::{self, lookup, Band, Constant, Func, CONST_PREC};
use crate::limb::Word;
use crate::series::{eval_sin_cos_series, TableLimb};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Fixed-point width `B·n` from which `cos = √(1 − sin²)` (decided on `B·n`
/// for the same reason as the exp threshold).
pub const COS_FROM_SIN_THRESHOLD: u64 = 320;

pub fn sin_cos_ball(x: &BigFloat, p: u64, want: Want) -> Result<(Option<Ball>, Option<Ball>), Error> {
    sin_cos_ball_with::<Word>(x, p, want)
}

pub fn sin_cos_ball_with<L: TableLimb>(
    x: &BigFloat,
    p: u64,
    want: Want,
) -> Result<(Option<Ball>, Option<Ball>), Error> {
    let (s, c) = sin_cos_raw_with::<L>(x, p, want)?;
    Ok((s.map(|r| r.finish(p)), c.map(|r| r.finish(p))))
}

pub fn sin_ball(x: &BigFloat, p: u64) -> Result<Ball, Error> {
    Ok(sin_cos_ball(x, p, Want::Sin)?.0.unwrap())
}

pub fn cos_ball(x: &BigFloat, p: u64) -> Result<Ball, Error> {
    Ok(sin_cos_ball(x, p, Want::Cos)?.1.unwrap())
}

fn pick(s: Raw, c: Raw, want: Want) -> (Option<Raw>, Option<Raw>) {
    ((want != Want::Cos).then_some(s), (want != Want::Sin).then_some(c))
}

/// `X³/6` or `X²/2` style power over an integer, each step truncated.
fn pow_div(x: &BigUint, k: u32, d: u32, bn: u64) -> BigUint {
    let mut r = x.clone();
    for _ in 1..k {
        r = (r * x) >> bn;
    }
    r / d
}

pub fn sin_cos_raw_with<L: TableLimb>(x: &BigFloat, p: u64, want: Want) -> Result<(Option<Raw>, Option<Raw>), Error> {
    check_prec(p)?;
    if x.is_nan() {
        return Err(Error::InvalidInput("sin/cos of NaN".into()));
    }
    if x.is_inf() {
        return Err(Error::DomainError("sin/cos of an infinity".into()));
    }
    if x.is_zero() {
        return Ok(pick(Raw::exact(BigFloat::zero()), Raw::exact(BigFloat::one()), want));
    }
    let e = x.exponent().unwrap();
    let pi = p as i64;
    // |sin x − x| ≤ |x|³/6, |cos x − 1| ≤ x²/2
    if 2 * e < -pi - 4 {
        return Ok(pick(
            Raw::special(x.clone(), Mag::pow2(3 * e)),
            Raw::special(BigFloat::one(), Mag::pow2(2 * e)),
            want,
        ));
    }

    let w = (pi + 8 - e.min(0)) as u64;
    check_w(w)?;
    let (n, bn) = limbs_for::<L>(w);
    let g = e.max(0) as u64 + 6;
    let f = bn + g;
    if f > CONST_PREC {
        // π/4 is not stored precisely enough to place x in its octant
        let whole = Mag::pow2(0).add(&Mag::pow2(-pi));
        return Ok(pick(
            Raw::special(BigFloat::zero(), whole),
            Raw::special(BigFloat::zero(), whole),
            want,
        ));
    }

    // |x| = k·π/4 + t; the error of t is below (k + 1)·2^−F < 2^−(Bn+4)
    let (xs, _) = x.floor_scaled_abs(f as i64);
    let p4 = const_scaled(Constant::Pi4, f);
    let (k, t) = xs.div_rem(&p4);
    let j = (&k % 8u32).to_u32().unwrap();
    // odd octants reflect: v = π/4 − t, which costs one more 2^−F
    let u = if j % 2 == 1 { &p4 - t } else { t };
    let mut xr = u >> g;
    // argument error < 2^−Bn + 2^−(Bn+3), and sin, cos are 1-Lipschitz
    let z_arg = 2;

    let band = Band::for_bits(w).unwrap();
    let st = argtables::table(Func::Sin, band);
    let ct = argtables::table(Func::Cos, band);
    let (r1, r2) = if band == Band::Fast { (8u32, 0u32) } else { (5, 5) };
    let cut = |v: &BigUint, bits: u32| -> u64 { (v >> (bn - bits as u64)).iter_u64_digits().next().unwrap_or(0) };
    let p1 = cut(&xr, r1);
    xr -= BigUint::from(p1) << (bn - r1 as u64);
    let mut p2 = 0;
    if r2 > 0 {
        p2 = cut(&xr, r1 + r2);
        xr -= BigUint::from(p2) << (bn - (r1 + r2) as u64);
    }
    debug_assert!((p1 as usize) < st.params.counts[0]);

    let r = leading_r(&xr, bn);
    let one = BigUint::one() << bn;
    let (mut s, mut c, mut z, n_terms, tail_bits) = if xr.is_zero() {
        (BigUint::zero(), one.clone(), 0, 0, i64::MAX)
    } else {
        let (nt, tb) = terms_for(Tail::SinCos, r, bn);
        let sqrt_path = bn >= COS_FROM_SIN_THRESHOLD;
        let (s, c, charge) = match nt {
            1 => (xr.clone(), one.clone(), 0),
            2 => (
                &xr - pow_div(&xr, 3, 6, bn),
                &one - pow_div(&xr, 2, 2, bn),
                3,
            ),
            _ => {
                let fx = to_fixed::<L>(&xr, n);
                let want = if sqrt_path { Want::Sin } else { Want::Both };
                let (s, c) = eval_sin_cos_series(&fx, nt, L::factorial_table(), want);
                (s.unwrap().to_biguint(), c.map(|c| c.to_biguint()).unwrap_or_default(), 2)
            }
        };
        let es = charge + 1;
        if sqrt_path {
            // s < 2^−8: s² carries about one ulp, √ near 1 halves it, plus its cut
            let s2 = (&s * &s) >> bn;
            let c = ((&one - s2) << bn).sqrt();
            (s, c, es.max(2), nt, tb)
        } else {
            (s, c, es, nt, tb)
        }
    };
    for (which, idx) in [(2, p2), (1, p1)] {
        if idx != 0 {
            let a = lookup::<L>(st, which, idx as usize, bn).to_biguint();
            let b = lookup::<L>(ct, which, idx as usize, bn).to_biguint();
            // sin a + cos a ≤ √2 and all values are at most 1
            let s1 = (&a * &c + &b * &s) >> bn;
            let c1 = (&b * &c - &a * &s) >> bn;
            s = s1;
            c = c1;
            z = 2 * z + 3;
        }
    }
    z += z_arg;

    // |x| = q·π/2 ± v
    let (q, v_neg) = if j % 2 == 0 { (j / 2, false) } else { (((j + 1) / 2) % 4, true) };
    let sin_u = (v_neg, s);
    let cos_u = (false, c);
    let flip = |(neg, m): (bool, BigUint)| (!neg, m);
    let (sin_a, cos_a) = match q {
        0 => (sin_u, cos_u),
        1 => (cos_u, flip(sin_u)),
        2 => (flip(sin_u), flip(cos_u)),
        _ => (flip(cos_u), sin_u),
    };
    let sin_x = if x.is_negative() { flip(sin_a) } else { sin_a };

    let state = ReductionState {
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
    };
    let rad = Mag::ulps(z, -(bn as i64));
    let raw = |(neg, m): (bool, BigUint)| Raw {
        mid: BigFloat::from_parts(neg, m, -(bn as i64)),
        rad,
        state: Some(state.clone()),
    };
    Ok(pick(raw(sin_x), raw(cos_a), want))
}
