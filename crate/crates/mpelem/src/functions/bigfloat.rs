//! Binary floating-point numbers with an arbitrary-precision mantissa.
//!
//! A finite nonzero value is stored as `±mant · 2^shift` with `mant` odd, so
//! equal values have equal representations. The exponent `e` of the API is
//! the one with `2^(e−1) ≤ |x| < 2^e`.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// Precision used to round decimal input.
pub const DECIMAL_PREC: u64 = 4608;

/// Largest decimal exponent accepted by the parser.
const MAX_DEC_EXP: i64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Kind {
    Finite,
    Inf,
    NaN,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    /// To nearest, ties to even.
    Nearest,
    Floor,
    Ceil,
    /// Toward zero.
    Down,
    /// Away from zero.
    Up,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BigFloat {
    kind: Kind,
    neg: bool,
    mant: BigUint,
    shift: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse `{input}` as a number: {reason}")]
pub struct ParseError {
    pub input: String,
    pub reason: String,
}

impl BigFloat {
    pub fn zero() -> BigFloat {
        BigFloat {
            kind: Kind::Finite,
            neg: false,
            mant: BigUint::zero(),
            shift: 0,
        }
    }

    pub fn one() -> BigFloat {
        BigFloat::from_u64(1)
    }

    pub fn inf(neg: bool) -> BigFloat {
        BigFloat {
            kind: Kind::Inf,
            neg,
            mant: BigUint::zero(),
            shift: 0,
        }
    }

    pub fn nan() -> BigFloat {
        BigFloat {
            kind: Kind::NaN,
            neg: false,
            mant: BigUint::zero(),
            shift: 0,
        }
    }

    /// `±mant · 2^shift`, normalized.
    pub fn from_parts(neg: bool, mant: BigUint, shift: i64) -> BigFloat {
        if mant.is_zero() {
            return BigFloat::zero();
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        BigFloat {
            kind: Kind::Finite,
            neg,
            mant: mant >> tz,
            shift: shift + tz as i64,
        }
    }

    /// `v · 2^shift` for a signed integer `v`.
    pub fn from_bigint(v: &BigInt, shift: i64) -> BigFloat {
        BigFloat::from_parts(v.sign() == Sign::Minus, v.magnitude().clone(), shift)
    }

    pub fn from_u64(v: u64) -> BigFloat {
        BigFloat::from_parts(false, BigUint::from(v), 0)
    }

    pub fn from_i64(v: i64) -> BigFloat {
        BigFloat::from_parts(v < 0, BigUint::from(v.unsigned_abs()), 0)
    }

    /// Exact conversion.
    pub fn from_f64(v: f64) -> BigFloat {
        if v.is_nan() {
            return BigFloat::nan();
        }
        if v.is_infinite() {
            return BigFloat::inf(v < 0.0);
        }
        if v == 0.0 {
            return BigFloat::zero();
        }
        let bits = v.to_bits();
        let neg = bits >> 63 == 1;
        let be = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1 << 52) - 1);
        let (m, s) = if be == 0 { (frac, -1074) } else { (frac | 1 << 52, be - 1075) };
        BigFloat::from_parts(neg, BigUint::from(m), s)
    }

    pub fn pow2(e: i64) -> BigFloat {
        BigFloat::from_parts(false, BigUint::one(), e)
    }

    pub fn is_zero(&self) -> bool {
        self.kind == Kind::Finite && self.mant.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.kind == Kind::Finite
    }

    pub fn is_nan(&self) -> bool {
        self.kind == Kind::NaN
    }

    pub fn is_inf(&self) -> bool {
        self.kind == Kind::Inf
    }

    /// Sign bit; false for zero and NaN.
    pub fn is_negative(&self) -> bool {
        self.neg && self.kind != Kind::NaN
    }

    /// `e` with `2^(e−1) ≤ |x| < 2^e`, for finite nonzero `x`.
    pub fn exponent(&self) -> Option<i64> {
        (self.kind == Kind::Finite && !self.mant.is_zero()).then(|| self.shift + self.mant.bits() as i64)
    }

    /// Odd mantissa (zero for zero and the special values).
    pub fn mantissa(&self) -> &BigUint {
        &self.mant
    }

    /// Power of two scaling the odd mantissa.
    pub fn shift(&self) -> i64 {
        self.shift
    }

    /// Significant bits of the mantissa.
    pub fn precision(&self) -> u64 {
        self.mant.bits()
    }

    pub fn neg(&self) -> BigFloat {
        let mut r = self.clone();
        if !r.is_zero() && !r.is_nan() {
            r.neg = !r.neg;
        }
        r
    }

    pub fn abs(&self) -> BigFloat {
        let mut r = self.clone();
        r.neg = false;
        r
    }

    pub fn mul_2exp(&self, k: i64) -> BigFloat {
        let mut r = self.clone();
        if r.kind == Kind::Finite && !r.mant.is_zero() {
            r.shift += k;
        }
        r
    }

    fn signed_mant(&self) -> BigInt {
        let m = BigInt::from(self.mant.clone());
        if self.neg {
            -m
        } else {
            m
        }
    }

    /// Exact sum.
    pub fn add(&self, other: &BigFloat) -> BigFloat {
        match (self.kind, other.kind) {
            (Kind::NaN, _) | (_, Kind::NaN) => BigFloat::nan(),
            (Kind::Inf, Kind::Inf) if self.neg != other.neg => BigFloat::nan(),
            (Kind::Inf, _) => self.clone(),
            (_, Kind::Inf) => other.clone(),
            _ => {
                if self.is_zero() {
                    return other.clone();
                }
                if other.is_zero() {
                    return self.clone();
                }
                let s = self.shift.min(other.shift);
                let a = self.signed_mant() << (self.shift - s) as usize;
                let b = other.signed_mant() << (other.shift - s) as usize;
                BigFloat::from_bigint(&(a + b), s)
            }
        }
    }

    pub fn sub(&self, other: &BigFloat) -> BigFloat {
        self.add(&other.neg())
    }

    /// Exact product.
    pub fn mul(&self, other: &BigFloat) -> BigFloat {
        match (self.kind, other.kind) {
            (Kind::NaN, _) | (_, Kind::NaN) => BigFloat::nan(),
            (Kind::Inf, _) | (_, Kind::Inf) => {
                if self.is_zero() || other.is_zero() {
                    BigFloat::nan()
                } else {
                    BigFloat::inf(self.neg != other.neg)
                }
            }
            _ => BigFloat::from_parts(self.neg != other.neg, &self.mant * &other.mant, self.shift + other.shift),
        }
    }

    /// Rounds to `prec ≥ 1` significant bits.
    pub fn round(&self, prec: u64, mode: Round) -> BigFloat {
        assert!(prec >= 1);
        let b = self.mant.bits();
        if self.kind != Kind::Finite || b <= prec {
            return self.clone();
        }
        let d = b - prec;
        let q = &self.mant >> d;
        let rem = &self.mant - (&q << d);
        let half = BigUint::one() << (d - 1);
        let up = match mode {
            Round::Nearest => rem > half || (rem == half && q.is_odd()),
            Round::Down => false,
            Round::Up => true,
            Round::Floor => self.neg,
            Round::Ceil => !self.neg,
        };
        // rem ≠ 0 since the mantissa is odd and d ≥ 1
        let q = if up { q + 1u32 } else { q };
        BigFloat::from_parts(self.neg, q, self.shift + d as i64)
    }

    /// `±num/den` rounded to nearest at `prec` bits.
    pub fn from_ratio(neg: bool, num: &BigUint, den: &BigUint, prec: u64) -> BigFloat {
        assert!(!den.is_zero());
        if num.is_zero() {
            return BigFloat::zero();
        }
        // a quotient of at least prec + 2 bits, then one sticky bit
        let s = (prec + 2 + den.bits()) as i64 - num.bits() as i64;
        let (q, r) = if s >= 0 {
            (num << s as u64).div_rem(den)
        } else {
            num.div_rem(&(den << (-s) as u64))
        };
        let sticky = u32::from(!r.is_zero());
        BigFloat::from_parts(neg, (q << 1u32) + sticky, -s - 1).round(prec, Round::Nearest)
    }

    /// `⌊x · 2^f⌋` for finite `x`.
    pub fn floor_scaled(&self, f: i64) -> BigInt {
        assert!(self.is_finite());
        let s = self.shift + f;
        let m = self.signed_mant();
        if s >= 0 {
            m << s as usize
        } else {
            m.div_floor(&(BigInt::one() << (-s) as usize))
        }
    }

    /// `⌊|x| · 2^f⌋` and whether it is exact.
    pub fn floor_scaled_abs(&self, f: i64) -> (BigUint, bool) {
        assert!(self.is_finite());
        let s = self.shift + f;
        if s >= 0 {
            (&self.mant << s as u64, true)
        } else {
            // the mantissa is odd, so a nonzero one always loses bits here
            (&self.mant >> (-s) as u64, self.mant.is_zero())
        }
    }

    /// Nearest `f64`.
    pub fn to_f64(&self) -> f64 {
        match self.kind {
            Kind::NaN => f64::NAN,
            Kind::Inf => {
                if self.neg {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }
            Kind::Finite => {
                if self.mant.is_zero() {
                    return 0.0;
                }
                let r = self.round(53, Round::Nearest);
                let m = r.mant.to_f64().unwrap();
                let v = scale_f64(m, r.shift);
                if self.neg {
                    -v
                } else {
                    v
                }
            }
        }
    }

    /// `0x1.8p+1` style; `inf`, `-inf`, `nan` for the special values.
    pub fn to_hex(&self) -> String {
        match self.kind {
            Kind::NaN => return "nan".into(),
            Kind::Inf => return if self.neg { "-inf".into() } else { "inf".into() },
            Kind::Finite => {}
        }
        if self.mant.is_zero() {
            return "0x0p+0".into();
        }
        let sign = if self.neg { "-" } else { "" };
        let b = self.mant.bits();
        let e = self.exponent().unwrap() - 1;
        if b == 1 {
            return format!("{sign}0x1p{e:+}");
        }
        let frac = &self.mant - (BigUint::one() << (b - 1));
        let pad = (4 - (b - 1) % 4) % 4;
        let digits = ((b - 1 + pad) / 4) as usize;
        let hex = format!("{:0digits$x}", frac << pad);
        let hex = hex.trim_end_matches('0');
        format!("{sign}0x1.{hex}p{e:+}")
    }

    /// Decimal rendering with `digits` significant digits, rounded to nearest.
    pub fn to_decimal(&self, digits: usize) -> String {
        let digits = digits.max(1);
        match self.kind {
            Kind::NaN => return "nan".into(),
            Kind::Inf => return if self.neg { "-inf".into() } else { "inf".into() },
            Kind::Finite => {}
        }
        if self.mant.is_zero() {
            return "0".into();
        }
        let (num, den) = if self.shift >= 0 {
            (&self.mant << self.shift as u64, BigUint::one())
        } else {
            (self.mant.clone(), BigUint::one() << (-self.shift) as u64)
        };
        let e2 = self.exponent().unwrap() as f64;
        let mut k = (e2 * std::f64::consts::LOG10_2).floor() as i64 - 1;
        let ten = BigUint::from(10u32);
        let lo = ten.pow(digits as u32 - 1);
        let hi = &lo * 10u32;
        loop {
            let s = digits as i64 - 1 - k;
            let (n, d) = if s >= 0 {
                (&num * ten.pow(s as u32), den.clone())
            } else {
                (num.clone(), &den * ten.pow((-s) as u32))
            };
            let q = ((n << 1u32) + &d) / (d << 1u32);
            if q >= hi {
                k += 1;
                continue;
            }
            if q < lo {
                k -= 1;
                continue;
            }
            let s = q.to_string();
            let sign = if self.neg { "-" } else { "" };
            let (head, tail) = s.split_at(1);
            let tail = tail.trim_end_matches('0');
            return if tail.is_empty() {
                format!("{sign}{head}e{k}")
            } else {
                format!("{sign}{head}.{tail}e{k}")
            };
        }
    }

    fn parse_hex(body: &str, neg: bool) -> Result<BigFloat, String> {
        let (m, p) = match body.find(['p', 'P']) {
            Some(i) => (&body[..i], Some(&body[i + 1..])),
            None => (body, None),
        };
        let (ip, fp) = m.split_once('.').unwrap_or((m, ""));
        if ip.is_empty() && fp.is_empty() {
            return Err("empty mantissa".into());
        }
        let all: String = [ip, fp].concat();
        let mant = if all.is_empty() {
            BigUint::zero()
        } else {
            BigUint::parse_bytes(all.as_bytes(), 16).ok_or("bad hex digit")?
        };
        let e: i64 = match p {
            Some(p) => p.parse().map_err(|_| "bad binary exponent")?,
            None => 0,
        };
        Ok(BigFloat::from_parts(neg, mant, e - 4 * fp.len() as i64))
    }

    fn parse_decimal(body: &str, neg: bool) -> Result<BigFloat, String> {
        let (m, e) = match body.find(['e', 'E']) {
            Some(i) => (&body[..i], Some(&body[i + 1..])),
            None => (body, None),
        };
        let (ip, fp) = m.split_once('.').unwrap_or((m, ""));
        if ip.is_empty() && fp.is_empty() {
            return Err("empty mantissa".into());
        }
        let all: String = [ip, fp].concat();
        if !all.bytes().all(|b| b.is_ascii_digit()) {
            return Err("bad decimal digit".into());
        }
        let mant = BigUint::parse_bytes(all.as_bytes(), 10).unwrap_or_default();
        let e: i64 = match e {
            Some(e) => e.parse().map_err(|_| "bad decimal exponent")?,
            None => 0,
        };
        let e = e - fp.len() as i64;
        if mant.is_zero() {
            return Ok(BigFloat::zero());
        }
        if e.abs() > MAX_DEC_EXP {
            return Err("decimal exponent out of range".into());
        }
        let p10 = BigUint::from(10u32).pow(e.unsigned_abs() as u32);
        Ok(if e >= 0 {
            BigFloat::from_parts(neg, mant * p10, 0).round(DECIMAL_PREC, Round::Nearest)
        } else {
            BigFloat::from_ratio(neg, &mant, &p10, DECIMAL_PREC)
        })
    }
}

fn scale_f64(m: f64, e: i64) -> f64 {
    // two steps keep intermediate powers in range
    let e = e.clamp(-2200, 2200) as i32;
    let h = e / 2;
    m * 2f64.powi(h) * 2f64.powi(e - h)
}

impl FromStr for BigFloat {
    type Err = ParseError;

    /// Hex-float (`0x1.5bp+3`, exact) or decimal (rounded to nearest at
    /// [`DECIMAL_PREC`] bits); also `inf`, `-inf` and `nan`.
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let t = s.trim();
        let err = |reason: String| ParseError {
            input: s.to_string(),
            reason,
        };
        let (neg, body) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        let lower = body.to_ascii_lowercase();
        match lower.as_str() {
            "inf" | "infinity" => return Ok(BigFloat::inf(neg)),
            "nan" => return Ok(BigFloat::nan()),
            "" => return Err(err("empty input".into())),
            _ => {}
        }
        if let Some(h) = lower.strip_prefix("0x") {
            BigFloat::parse_hex(h, neg).map_err(err)
        } else {
            BigFloat::parse_decimal(&lower, neg).map_err(err)
        }
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &BigFloat) -> Option<Ordering> {
        if self.is_nan() || other.is_nan() {
            return None;
        }
        let rank = |x: &BigFloat| match (x.kind, x.neg) {
            (Kind::Inf, true) => -1,
            (Kind::Inf, false) => 1,
            _ => 0,
        };
        let (a, b) = (rank(self), rank(other));
        if a != 0 || b != 0 {
            return Some(a.cmp(&b));
        }
        let d = self.sub(other);
        Some(if d.is_zero() {
            Ordering::Equal
        } else if d.neg {
            Ordering::Less
        } else {
            Ordering::Greater
        })
    }
}

impl From<f64> for BigFloat {
    fn from(v: f64) -> Self {
        BigFloat::from_f64(v)
    }
}

impl From<i64> for BigFloat {
    fn from(v: i64) -> Self {
        BigFloat::from_i64(v)
    }
}
