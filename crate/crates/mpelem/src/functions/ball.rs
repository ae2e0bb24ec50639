//! Midpoint–radius enclosures.

use super::bigfloat::{BigFloat, Round};
use num_bigint::BigUint;
use num_traits::Zero;
use std::cmp::Ordering;
use std::fmt;

/// Bits kept in a radius mantissa.
pub const MAG_BITS: u64 = 32;

/// Nonnegative low-precision upper bound `man · 2^exp`. Every operation
/// rounds up, so a `Mag` never understates the quantity it bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Mag {
    /// Zero, or with the top bit set.
    man: u32,
    exp: i64,
}

impl Mag {
    pub fn zero() -> Mag {
        Mag { man: 0, exp: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.man == 0
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Mag {
        Mag {
            man: 1 << 31,
            exp: e - 31,
        }
    }

    /// Smallest representable value `≥ m · 2^shift`.
    pub fn from_biguint_up(m: &BigUint, shift: i64) -> Mag {
        if m.is_zero() {
            return Mag::zero();
        }
        let b = m.bits();
        if b <= MAG_BITS {
            let v = m.iter_u32_digits().next().unwrap_or(0);
            let s = (MAG_BITS - b) as u32;
            return Mag {
                man: v << s,
                exp: shift - s as i64,
            };
        }
        let d = b - MAG_BITS;
        let q = m >> d;
        let exact = (&q << d) == *m;
        let mut man = q.iter_u32_digits().next().unwrap_or(0) as u64;
        let mut exp = shift + d as i64;
        if !exact {
            man += 1;
            if man == 1 << 32 {
                man = 1 << 31;
                exp += 1;
            }
        }
        Mag { man: man as u32, exp }
    }

    /// `k · 2^e` rounded up.
    pub fn ulps(k: u64, e: i64) -> Mag {
        Mag::from_biguint_up(&BigUint::from(k), e)
    }

    /// Upper bound for `|x|`; `x` must be finite.
    pub fn from_bigfloat_up(x: &BigFloat) -> Mag {
        assert!(x.is_finite(), "radius of a non-finite value");
        Mag::from_biguint_up(x.mantissa(), x.shift())
    }

    pub fn to_bigfloat(&self) -> BigFloat {
        BigFloat::from_parts(false, BigUint::from(self.man), self.exp)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_bigfloat().to_f64()
    }

    /// Upper bound for the sum.
    pub fn add(&self, other: &Mag) -> Mag {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        Mag::from_bigfloat_up(&self.to_bigfloat().add(&other.to_bigfloat()))
    }

    /// Upper bound for the product.
    pub fn mul(&self, other: &Mag) -> Mag {
        Mag::from_biguint_up(
            &(BigUint::from(self.man) * BigUint::from(other.man)),
            self.exp + other.exp,
        )
    }

    pub fn mul_2exp(&self, k: i64) -> Mag {
        if self.is_zero() {
            return *self;
        }
        Mag {
            man: self.man,
            exp: self.exp + k,
        }
    }

    /// `e` with `2^(e−1) ≤ self < 2^e`, or `None` for zero.
    pub fn exponent(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.exp + 32)
    }
}

impl Ord for Mag {
    fn cmp(&self, other: &Mag) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            // both normalized: compare exponents first
            _ => (self.exp, self.man).cmp(&(other.exp, other.man)),
        }
    }
}

impl PartialOrd for Mag {
    fn partial_cmp(&self, other: &Mag) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Mag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bigfloat().to_hex())
    }
}

/// `[mid − rad, mid + rad]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    pub mid: BigFloat,
    pub rad: Mag,
}

impl Ball {
    pub fn new(mid: BigFloat, rad: Mag) -> Ball {
        Ball { mid, rad }
    }

    pub fn exact(mid: BigFloat) -> Ball {
        Ball { mid, rad: Mag::zero() }
    }

    /// Lower end, exactly.
    pub fn lo(&self) -> BigFloat {
        self.mid.sub(&self.rad.to_bigfloat())
    }

    /// Upper end, exactly.
    pub fn hi(&self) -> BigFloat {
        self.mid.add(&self.rad.to_bigfloat())
    }

    pub fn contains(&self, v: &BigFloat) -> bool {
        if !self.mid.is_finite() || !v.is_finite() {
            return self.mid == *v;
        }
        self.lo() <= *v && *v <= self.hi()
    }

    /// Whether the two enclosures share a point.
    pub fn overlaps(&self, other: &Ball) -> bool {
        if !self.mid.is_finite() || !other.mid.is_finite() {
            return self.mid == other.mid;
        }
        self.lo() <= other.hi() && other.lo() <= self.hi()
    }

    /// Whether `other ⊆ self`.
    pub fn contains_ball(&self, other: &Ball) -> bool {
        self.lo() <= other.lo() && other.hi() <= self.hi()
    }

    pub fn neg(&self) -> Ball {
        Ball::new(self.mid.neg(), self.rad)
    }

    /// Enclosure of the sum with an exact midpoint.
    pub fn add(&self, other: &Ball) -> Ball {
        Ball::new(self.mid.add(&other.mid), self.rad.add(&other.rad))
    }

    pub fn sub(&self, other: &Ball) -> Ball {
        self.add(&other.neg())
    }

    /// Enclosure of the product with an exact midpoint:
    /// radius `|a|·s + |b|·r + r·s`.
    pub fn mul(&self, other: &Ball) -> Ball {
        let ma = Mag::from_bigfloat_up(&self.mid);
        let mb = Mag::from_bigfloat_up(&other.mid);
        let rad = ma.mul(&other.rad).add(&mb.mul(&self.rad)).add(&self.rad.mul(&other.rad));
        Ball::new(self.mid.mul(&other.mid), rad)
    }

    /// Rounds the midpoint to `p` bits, adding the rounding error to the radius.
    pub fn round(&self, p: u64) -> Ball {
        if !self.mid.is_finite() {
            return self.clone();
        }
        let m = self.mid.round(p, Round::Nearest);
        let err = Mag::from_bigfloat_up(&self.mid.sub(&m));
        Ball::new(m, self.rad.add(&err))
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} +/- {}]", self.mid, self.rad)
    }
}
