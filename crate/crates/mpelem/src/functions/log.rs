//! log: `x = 2^k·(1 + t)` with `t ∈ [0, 1)`, two chained reductions
//! `t ← (q·t − i)/(i + q)` (single-limb divisions only), then
//! `log(1 + u) = 2·atanh(u/(u + 2))`, table values and `k·log 2` added back.
//!
//! Guard bits: `w = p + 8 − min(0, e_d)` where `e_d` is the exponent of
//! `x − 1`. Near 1 the result is about `x − 1`, and for `x ∈ (1/2, 1)` the sum
//! `−log 2 + log(2x)` cancels by the same amount.

use super::{
    check_prec, check_w, const_scaled, leading_r, limbs_for, terms_for, to_fixed, Ball, BigFloat, Error, Mag, Raw,
    ReductionState, Tail,
};
use crate::argtables::{self, lookup, Band, Constant, Func, CONST_PREC};
use crate::fixedpoint::{fx_div_limb, FixedPoint};
use crate::limb::{Limb, Word};
use crate::series::{eval_atanh_series, TableLimb};
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

pub fn log_ball(x: &BigFloat, p: u64) -> Result<Ball, Error> {
    log_ball_with::<Word>(x, p)
}

pub fn log_ball_with<L: TableLimb>(x: &BigFloat, p: u64) -> Result<Ball, Error> {
    Ok(log_raw_with::<L>(x, p)?.finish(p))
}

/// `(2^q·X − i)/(i + 2^q)` with one `n × 1` division; adds < 1 ulp and
/// does not amplify the error of `X` since `2^q/(i + 2^q) ≤ 1`.
fn reduce<L: Limb>(x: &BigUint, i: u64, q: u32, n: usize, bn: u64) -> BigUint {
    let num = (x << q) - (BigUint::from(i) << bn);
    let d = L::from_u64(i + (1u64 << q));
    fx_div_limb(&FixedPoint::<L>::from_biguint(&num, n, 0), d).to_biguint()
}

pub fn log_raw_with<L: TableLimb>(x: &BigFloat, p: u64) -> Result<Raw, Error> {
    check_prec(p)?;
    if x.is_nan() {
        return Err(Error::InvalidInput("log of NaN".into()));
    }
    if x.is_negative() || x.is_zero() {
        return Err(Error::DomainError(format!("log of {}", x.to_hex())));
    }
    if x.is_inf() {
        return Ok(Raw::exact(x.clone()));
    }
    let one = BigFloat::one();
    if *x == one {
        return Ok(Raw::exact(BigFloat::zero()));
    }
    let d = x.sub(&one);
    let ed = d.exponent().unwrap();
    // |log(1 + d) − d| ≤ d² for |d| ≤ 1/2
    if ed < -(p as i64) - 2 {
        return Ok(Raw::special(d, Mag::pow2(2 * ed)));
    }

    let w = (p as i64 + 8 - ed.min(0)) as u64;
    check_w(w)?;
    let (n, bn) = limbs_for::<L>(w);

    let k = x.exponent().unwrap() - 1;
    let t = x.mul_2exp(-k).sub(&one);
    let (mut xs, exact) = t.floor_scaled_abs(bn as i64);
    let mut z = u64::from(!exact);

    let band = Band::for_bits(w).unwrap();
    let table = argtables::table(Func::Log, band);
    let r1 = table.params.r;
    let cut = |v: &BigUint, bits: u32| -> u64 { (v >> (bn - bits as u64)).iter_u64_digits().next().unwrap_or(0) };
    let p1 = cut(&xs, r1);
    if p1 != 0 {
        xs = reduce::<L>(&xs, p1, r1, n, bn);
        z += 1;
    }
    // after the first step X < 2^−r1, so the second index is below 2^r1
    let p2 = cut(&xs, 2 * r1);
    if p2 != 0 {
        xs = reduce::<L>(&xs, p2, 2 * r1, n, bn);
        z += 1;
    }

    // v = u/(u + 2): dv/du ≤ 1/2
    let v = (&xs << bn) / ((BigUint::from(2u32) << bn) + &xs);
    let ev = z.div_ceil(2) + 1;
    let r = leading_r(&v, bn);
    let (mut y, mut z, n_terms, tail_bits) = if v.is_zero() {
        (BigUint::zero(), 2 * ev, 0, i64::MAX)
    } else {
        let (nt, tb) = terms_for(Tail::Atanh, r, bn + 1);
        let (s, charge) = match nt {
            1 => (v.clone(), 0),
            2 => (&v + ((((&v * &v) >> bn) * &v) >> bn) / 3u32, 3),
            _ => (eval_atanh_series(&to_fixed::<L>(&v, n), nt, L::odd_table()).to_biguint(), 2),
        };
        // 2·(ev·atanh′ + charge + tail): atanh′ ≤ 1 + 2^−20 costs one ulp,
        // the doubled tail another
        (s << 1u32, 2 * ev + 2 * charge + 2, nt, tb)
    };
    for (which, idx) in [(1, p1), (2, p2)] {
        if idx != 0 {
            y += lookup::<L>(table, which, idx as usize, bn).to_biguint();
            z += 1;
        }
    }

    let mut total = BigInt::from(y);
    if k != 0 {
        // |k|·2^−F ≤ 2^−(Bn+2), plus the final cut
        let kb = k.unsigned_abs();
        let f = bn + (64 - kb.leading_zeros()) as u64 + 2;
        if f > CONST_PREC {
            return Err(Error::UnsupportedArgument("exponent too large for the stored log 2".into()));
        }
        let kl = BigInt::from((const_scaled(Constant::Log2, f) * kb) >> (f - bn));
        total += if k < 0 { -kl } else { kl };
        z += 2;
    }

    Ok(Raw {
        mid: BigFloat::from_bigint(&total, -(bn as i64)),
        rad: Mag::ulps(z, -(bn as i64)),
        state: Some(ReductionState {
            w,
            n,
            bn,
            r1,
            r2: r1,
            p1: p1 as usize,
            p2: p2 as usize,
            r,
            n_terms,
            z_ulps: z,
            tail_bits,
        }),
    })
}
