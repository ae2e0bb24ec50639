//! High-precision reference values through astro-float, independent of the
//! crate's own arithmetic. Values cross over as scaled integers.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

pub const RM: RoundingMode = RoundingMode::ToEven;

pub struct Reference {
    pub cc: Consts,
    /// Working precision in bits.
    pub prec: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fun {
    Exp,
    Log,
    Log1p,
    Sin,
    Cos,
    Atan,
}

impl Reference {
    pub fn new(prec: usize) -> Self {
        Reference {
            cc: Consts::new().expect("constants cache"),
            prec,
        }
    }

    pub fn eval(&mut self, f: Fun, x: &BigFloat) -> BigFloat {
        let p = self.prec;
        let cc = &mut self.cc;
        match f {
            Fun::Exp => x.exp(p, RM, cc),
            Fun::Log => x.ln(p, RM, cc),
            Fun::Log1p => x.add(&BigFloat::from_word(1, p), p, RM).ln(p, RM, cc),
            Fun::Sin => x.sin(p, RM, cc),
            Fun::Cos => x.cos(p, RM, cc),
            Fun::Atan => x.atan(p, RM, cc),
        }
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.prec, RM)
    }

    pub fn ln2(&mut self) -> BigFloat {
        self.cc.ln_2(self.prec, RM)
    }
}

/// `num / 2^f` as an exact BigFloat.
pub fn from_scaled(num: &BigInt, f: i64) -> BigFloat {
    if num.is_zero() {
        return BigFloat::from_word(0, 64);
    }
    let m = num.magnitude();
    let nb = m.bits();
    let words = nb.div_ceil(64);
    let shifted: BigUint = m << (words * 64 - nb);
    let mut digits = shifted.to_u64_digits();
    digits.resize(words as usize, 0);
    let sign = if num.is_negative() { Sign::Neg } else { Sign::Pos };
    let r = BigFloat::from_words(&digits, sign, (nb as i64 - f) as i32);
    assert!(!r.is_nan(), "exponent out of range");
    r
}

/// `⌊x · 2^f⌋`.
pub fn to_scaled(x: &BigFloat, f: i64) -> BigInt {
    if x.is_zero() {
        return BigInt::zero();
    }
    let (words, _, sign, e, _) = x.as_raw_parts().expect("finite value");
    let m = BigInt::from(BigUint::new(words.iter().flat_map(|w| [*w as u32, (*w >> 32) as u32]).collect()));
    let m = if sign == Sign::Neg { -m } else { m };
    let sh = e as i64 - 64 * words.len() as i64 + f;
    if sh >= 0 {
        m << sh as u64
    } else {
        // arithmetic shift floors
        m >> (-sh) as u64
    }
}

/// `|a − b|` for scaled integers, in units of the scale.
pub fn dist(a: &BigInt, b: &BigInt) -> BigUint {
    (a - b).magnitude().clone()
}

/// Exact conversion from the crate's BigFloat.
pub fn to_astro(x: &mpelem::functions::BigFloat) -> BigFloat {
    assert!(x.is_finite());
    if x.is_zero() {
        return BigFloat::from_word(0, 64);
    }
    let m = BigInt::from(x.mantissa().clone());
    from_scaled(&if x.is_negative() { -m } else { m }, -x.shift())
}

/// Exact conversion into the crate's BigFloat.
pub fn to_ours(x: &BigFloat) -> mpelem::functions::BigFloat {
    use mpelem::functions::BigFloat as Ours;
    if x.is_zero() {
        return Ours::zero();
    }
    if x.is_inf() {
        return Ours::inf(x.is_negative());
    }
    let (words, _, sign, e, _) = x.as_raw_parts().expect("finite value");
    let m = BigUint::new(words.iter().flat_map(|w| [*w as u32, (*w >> 32) as u32]).collect());
    Ours::from_parts(sign == Sign::Neg, m, e as i64 - 64 * words.len() as i64)
}
