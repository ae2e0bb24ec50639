//! Machine words used as limbs of fixed-point numbers.

use std::fmt::Debug;
use std::hash::Hash;

/// A `B`-bit unsigned machine word. Implemented for `u32` and `u64`.
pub trait Limb:
    Copy + Clone + Eq + Ord + Hash + Default + Debug + Send + Sync + 'static
{
    const BITS: u32;
    const ZERO: Self;
    const ONE: Self;
    const MAX: Self;

    /// Truncating conversion.
    fn from_u64(x: u64) -> Self;
    fn to_u64(self) -> u64;

    /// `a + b + carry`, returning the sum and the carry out.
    fn adc(a: Self, b: Self, carry: bool) -> (Self, bool);
    /// `a - b - borrow`, returning the difference and the borrow out.
    fn sbb(a: Self, b: Self, borrow: bool) -> (Self, bool);
    /// `a + b * c + carry` as a (low, high) pair; never overflows two words.
    fn mac(a: Self, b: Self, c: Self, carry: Self) -> (Self, Self);
    /// `(hi * 2^B + lo) / d` and the remainder. Requires `hi < d`.
    fn div_wide(hi: Self, lo: Self, d: Self) -> (Self, Self);

    fn leading_zeros(self) -> u32;
    fn wrapping_add(self, other: Self) -> Self;
    fn wrapping_sub(self, other: Self) -> Self;

    #[inline]
    fn is_zero(self) -> bool {
        self == Self::ZERO
    }

    /// Top bit set, i.e. negative when read as two's complement.
    #[inline]
    fn high_bit(self) -> bool {
        self.leading_zeros() == 0
    }
}

macro_rules! impl_limb {
    ($t:ty, $wide:ty, $bits:expr) => {
        impl Limb for $t {
            const BITS: u32 = $bits;
            const ZERO: Self = 0;
            const ONE: Self = 1;
            const MAX: Self = <$t>::MAX;

            #[inline(always)]
            fn from_u64(x: u64) -> Self {
                x as $t
            }
            #[inline(always)]
            fn to_u64(self) -> u64 {
                self as u64
            }
            #[inline(always)]
            fn adc(a: Self, b: Self, carry: bool) -> (Self, bool) {
                let (s, c1) = a.overflowing_add(b);
                let (s, c2) = s.overflowing_add(carry as $t);
                (s, c1 | c2)
            }
            #[inline(always)]
            fn sbb(a: Self, b: Self, borrow: bool) -> (Self, bool) {
                let (d, b1) = a.overflowing_sub(b);
                let (d, b2) = d.overflowing_sub(borrow as $t);
                (d, b1 | b2)
            }
            #[inline(always)]
            fn mac(a: Self, b: Self, c: Self, carry: Self) -> (Self, Self) {
                let t = (a as $wide) + (b as $wide) * (c as $wide) + (carry as $wide);
                (t as $t, (t >> $bits) as $t)
            }
            #[inline(always)]
            fn div_wide(hi: Self, lo: Self, d: Self) -> (Self, Self) {
                debug_assert!(hi < d);
                let n = ((hi as $wide) << $bits) | (lo as $wide);
                ((n / d as $wide) as $t, (n % d as $wide) as $t)
            }
            #[inline(always)]
            fn leading_zeros(self) -> u32 {
                <$t>::leading_zeros(self)
            }
            #[inline(always)]
            fn wrapping_add(self, other: Self) -> Self {
                <$t>::wrapping_add(self, other)
            }
            #[inline(always)]
            fn wrapping_sub(self, other: Self) -> Self {
                <$t>::wrapping_sub(self, other)
            }
        }
    };
}

impl_limb!(u32, u64, 32);
impl_limb!(u64, u128, 64);

/// Limb type used by the top-level functions.
#[cfg(not(feature = "limb32"))]
pub type Word = u64;
#[cfg(feature = "limb32")]
pub type Word = u32;
