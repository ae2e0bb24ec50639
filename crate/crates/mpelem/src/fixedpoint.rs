//! Fixed-point arithmetic on little-endian limb arrays.
//!
//! A value with `nfrac` fractional limbs is `(Σ limbs[j]·2^(B·j)) · 2^(−B·nfrac)`.
//! Every rounding site truncates, so each operation adds at most one ulp of
//! error, `ulp = 2^(−B·nfrac)`. Error propagation for each operation:
//!
//! | operation          | resulting error (ulp)                   |
//! |--------------------|-----------------------------------------|
//! | `X ± Y`            | `ε₁ + ε₂`                               |
//! | `Y · c`            | `ε₁·c`                                  |
//! | `Y / c`            | `ε₁/c + 1`                              |
//! | `Y · Z` (trunc.)   | `|Z|ε₁ + |Y|ε₂ + ε₁ε₂·ulp + 1`          |
//!
//! The slice-level kernels at the top of this module are the building blocks
//! of the series evaluators; [`FixedPoint`] wraps them with shape checks.

use crate::limb::{Limb, Word};
use num_bigint::BigUint;
use num_traits::Zero;

// ---------------------------------------------------------------------------
// slice kernels

/// `r += a`, carrying through the limbs of `r` beyond `a.len()`.
/// Returns the carry out of `r`.
#[inline]
pub fn add_n<L: Limb>(r: &mut [L], a: &[L]) -> bool {
    debug_assert!(r.len() >= a.len());
    let mut carry = false;
    for (x, &y) in r.iter_mut().zip(a) {
        let (s, c) = L::adc(*x, y, carry);
        *x = s;
        carry = c;
    }
    if carry {
        add_1(&mut r[a.len()..], L::ONE)
    } else {
        false
    }
}

/// `r -= a`, borrowing through the limbs of `r` beyond `a.len()`.
/// Returns the borrow out of `r`.
#[inline]
pub fn sub_n<L: Limb>(r: &mut [L], a: &[L]) -> bool {
    debug_assert!(r.len() >= a.len());
    let mut borrow = false;
    for (x, &y) in r.iter_mut().zip(a) {
        let (d, b) = L::sbb(*x, y, borrow);
        *x = d;
        borrow = b;
    }
    if borrow {
        sub_1(&mut r[a.len()..], L::ONE)
    } else {
        false
    }
}

/// `r += c` for a single limb `c`. Returns the carry out.
#[inline]
pub fn add_1<L: Limb>(r: &mut [L], c: L) -> bool {
    let mut carry = c;
    for x in r.iter_mut() {
        if carry.is_zero() {
            return false;
        }
        let (s, c) = L::adc(*x, carry, false);
        *x = s;
        carry = if c { L::ONE } else { L::ZERO };
    }
    !carry.is_zero()
}

/// `r -= c` for a single limb `c`. Returns the borrow out.
#[inline]
pub fn sub_1<L: Limb>(r: &mut [L], c: L) -> bool {
    let mut borrow = c;
    for x in r.iter_mut() {
        if borrow.is_zero() {
            return false;
        }
        let (d, b) = L::sbb(*x, borrow, false);
        *x = d;
        borrow = if b { L::ONE } else { L::ZERO };
    }
    !borrow.is_zero()
}

/// `r = a · c` over `a.len()` limbs; returns the high limb.
#[inline]
pub fn mul_1<L: Limb>(r: &mut [L], a: &[L], c: L) -> L {
    debug_assert!(r.len() >= a.len());
    let mut carry = L::ZERO;
    for (x, &y) in r.iter_mut().zip(a) {
        let (lo, hi) = L::mac(L::ZERO, y, c, carry);
        *x = lo;
        carry = hi;
    }
    carry
}

/// `r[..a.len()] += a · c`; returns the limb carried out of that window.
#[inline]
pub fn addmul_1<L: Limb>(r: &mut [L], a: &[L], c: L) -> L {
    debug_assert!(r.len() >= a.len());
    let mut carry = L::ZERO;
    for (x, &y) in r.iter_mut().zip(a) {
        let (lo, hi) = L::mac(*x, y, c, carry);
        *x = lo;
        carry = hi;
    }
    carry
}

/// `r[..a.len()] -= a · c`; returns the limb borrowed out of that window.
#[inline]
pub fn submul_1<L: Limb>(r: &mut [L], a: &[L], c: L) -> L {
    debug_assert!(r.len() >= a.len());
    let mut borrow = L::ZERO;
    for (x, &y) in r.iter_mut().zip(a) {
        let (lo, hi) = L::mac(L::ZERO, y, c, borrow);
        let (d, b) = L::sbb(*x, lo, false);
        *x = d;
        borrow = if b { hi.wrapping_add(L::ONE) } else { hi };
    }
    borrow
}

/// Schoolbook product: `r = a · b` with `r.len() == a.len() + b.len()`.
pub fn mul_full<L: Limb>(r: &mut [L], a: &[L], b: &[L]) {
    debug_assert_eq!(r.len(), a.len() + b.len());
    r.iter_mut().for_each(|x| *x = L::ZERO);
    for (i, &bi) in b.iter().enumerate() {
        if bi.is_zero() {
            continue;
        }
        let hi = addmul_1(&mut r[i..i + a.len()], a, bi);
        r[i + a.len()] = hi;
    }
}

/// Full product of `a` and `b` with the lowest `drop` limbs discarded.
pub fn mul_high<L: Limb>(a: &[L], b: &[L], drop: usize) -> Vec<L> {
    let mut r = vec![L::ZERO; a.len() + b.len()];
    mul_full(&mut r, a, b);
    r.drain(..drop);
    r
}

/// `a = floor(a / c)` in place; returns the remainder.
#[inline]
pub fn div_1<L: Limb>(a: &mut [L], c: L) -> L {
    assert!(!c.is_zero(), "division by zero limb");
    let mut rem = L::ZERO;
    for x in a.iter_mut().rev() {
        let (q, r) = L::div_wide(rem, *x, c);
        *x = q;
        rem = r;
    }
    rem
}

/// Two's-complement negation in place.
pub fn negate<L: Limb>(a: &mut [L]) {
    let mut carry = true;
    for x in a.iter_mut() {
        let (s, c) = L::adc(L::MAX.wrapping_sub(*x), L::ZERO, carry);
        *x = s;
        carry = c;
    }
}

/// Reads a limb slice as an unsigned integer.
pub fn limbs_to_biguint<L: Limb>(a: &[L]) -> BigUint {
    let mut digits = Vec::with_capacity(a.len() * 2);
    for &x in a {
        let v = x.to_u64();
        digits.push(v as u32);
        if L::BITS == 64 {
            digits.push((v >> 32) as u32);
        }
    }
    BigUint::new(digits)
}

/// Writes `x mod 2^(B·len)` as a limb vector of length `len`.
pub fn biguint_to_limbs<L: Limb>(x: &BigUint, len: usize) -> Vec<L> {
    let digits = x.to_u32_digits();
    let per = (L::BITS / 32) as usize;
    (0..len)
        .map(|i| {
            let lo = digits.get(i * per).copied().unwrap_or(0) as u64;
            let hi = if per == 2 {
                digits.get(i * per + 1).copied().unwrap_or(0) as u64
            } else {
                0
            };
            L::from_u64(lo | (hi << 32))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// FixedPoint

/// Fixed-point number with `nfrac` fractional limbs and
/// `limbs.len() - nfrac` integral limbs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FixedPoint<L: Limb = Word> {
    pub limbs: Vec<L>,
    pub nfrac: usize,
}

/// How [`fx_mul_limb`] combines the product with the destination.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MulMode {
    Set,
    Add,
    Sub,
}

impl<L: Limb> FixedPoint<L> {
    pub fn zero(nfrac: usize, nint: usize) -> Self {
        FixedPoint {
            limbs: vec![L::ZERO; nfrac + nint],
            nfrac,
        }
    }

    /// The value 1 with one integral limb.
    pub fn one(nfrac: usize) -> Self {
        let mut x = Self::zero(nfrac, 1);
        x.limbs[nfrac] = L::ONE;
        x
    }

    pub fn from_limbs(limbs: Vec<L>, nfrac: usize) -> Self {
        assert!(limbs.len() >= nfrac);
        FixedPoint { limbs, nfrac }
    }

    /// The value `m · 2^(−B·nfrac)`, reduced modulo the array width.
    pub fn from_biguint(m: &BigUint, nfrac: usize, nint: usize) -> Self {
        FixedPoint {
            limbs: biguint_to_limbs(m, nfrac + nint),
            nfrac,
        }
    }

    pub fn nint(&self) -> usize {
        self.limbs.len() - self.nfrac
    }

    pub fn len(&self) -> usize {
        self.limbs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.limbs.is_empty()
    }

    /// Number of fractional bits, `B·nfrac`.
    pub fn frac_bits(&self) -> u64 {
        L::BITS as u64 * self.nfrac as u64
    }

    /// The limb array read as an unsigned integer (value in ulps).
    pub fn to_biguint(&self) -> BigUint {
        limbs_to_biguint(&self.limbs)
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|x| x.is_zero())
    }

    /// Top bit of the top limb; meaningful only for transient two's complement.
    pub fn is_negative(&self) -> bool {
        self.limbs.last().map_or(false, |x| x.high_bit())
    }

    /// Keeps the `nfrac` most significant fractional limbs (truncation).
    pub fn truncate_frac(&self, nfrac: usize) -> Self {
        assert!(nfrac <= self.nfrac);
        FixedPoint {
            limbs: self.limbs[self.nfrac - nfrac..].to_vec(),
            nfrac,
        }
    }

    /// Appends zero limbs below the current fractional part.
    pub fn extend_frac(&self, nfrac: usize) -> Self {
        assert!(nfrac >= self.nfrac);
        let mut limbs = vec![L::ZERO; nfrac - self.nfrac];
        limbs.extend_from_slice(&self.limbs);
        FixedPoint { limbs, nfrac }
    }

    /// Changes the number of integral limbs, dropping or zero-filling on top.
    pub fn with_nint(mut self, nint: usize) -> Self {
        self.limbs.resize(self.nfrac + nint, L::ZERO);
        self
    }
}

/// `X + Y`. `X` may be one limb longer than `Y`; the carry then propagates
/// into the extra limb. Exact modulo the width of `X`.
pub fn fx_add<L: Limb>(x: &FixedPoint<L>, y: &FixedPoint<L>) -> (FixedPoint<L>, bool) {
    check_addable(x, y);
    let mut r = x.clone();
    let c = add_n(&mut r.limbs, &y.limbs);
    (r, c)
}

/// `X − Y`, mirror of [`fx_add`]; a borrow means the result is a two's
/// complement negative.
pub fn fx_sub<L: Limb>(x: &FixedPoint<L>, y: &FixedPoint<L>) -> (FixedPoint<L>, bool) {
    check_addable(x, y);
    let mut r = x.clone();
    let b = sub_n(&mut r.limbs, &y.limbs);
    (r, b)
}

fn check_addable<L: Limb>(x: &FixedPoint<L>, y: &FixedPoint<L>) {
    assert_eq!(x.nfrac, y.nfrac, "fractional limb counts differ");
    assert!(
        x.len() == y.len() || x.len() == y.len() + 1,
        "operand widths incompatible"
    );
}

/// `X ← Y·c`, `X ← X + Y·c` or `X ← X − Y·c` over the limbs of `Y`.
/// The product is exact; the returned limb is the carry (or borrow) out of
/// the `Y.len()` window, which the caller may propagate into higher limbs of `X`.
pub fn fx_mul_limb<L: Limb>(x: &mut FixedPoint<L>, y: &FixedPoint<L>, c: L, mode: MulMode) -> L {
    assert_eq!(x.nfrac, y.nfrac);
    assert!(x.len() >= y.len());
    match mode {
        MulMode::Set => {
            x.limbs.iter_mut().for_each(|l| *l = L::ZERO);
            mul_1(&mut x.limbs, &y.limbs, c)
        }
        MulMode::Add => addmul_1(&mut x.limbs, &y.limbs, c),
        MulMode::Sub => submul_1(&mut x.limbs, &y.limbs, c),
    }
}

/// Truncated product `Y·Z`. Both operands must share `nfrac`; the result
/// has the same `nfrac` and `nint(Y) + nint(Z)` integral limbs. Adds < 1 ulp.
pub fn fx_mul<L: Limb>(y: &FixedPoint<L>, z: &FixedPoint<L>) -> FixedPoint<L> {
    assert_eq!(y.nfrac, z.nfrac);
    FixedPoint {
        limbs: mul_high(&y.limbs, &z.limbs, y.nfrac),
        nfrac: y.nfrac,
    }
}

/// Truncated quotient `Y / c`. Adds < 1 ulp. Panics if `c = 0`.
pub fn fx_div_limb<L: Limb>(y: &FixedPoint<L>, c: L) -> FixedPoint<L> {
    assert!(!c.is_zero(), "fx_div_limb: division by zero");
    let mut r = y.clone();
    div_1(&mut r.limbs, c);
    r
}

/// Square root of `Y ∈ [0, 4)`, truncated; the result has one integral limb.
/// Error < 1 ulp (the contract allows 2).
pub fn fx_sqrt<L: Limb>(y: &FixedPoint<L>) -> FixedPoint<L> {
    let n = y.nfrac;
    let shifted = y.to_biguint() << (L::BITS as usize * n);
    FixedPoint::from_biguint(&shifted.sqrt(), n, 1)
}

/// Truncated quotient `Y / Z` of two fixed-point numbers with equal `nfrac`,
/// returned with `nint` integral limbs. Adds < 1 ulp. Panics if `Z = 0`.
pub fn fx_div<L: Limb>(y: &FixedPoint<L>, z: &FixedPoint<L>, nint: usize) -> FixedPoint<L> {
    assert_eq!(y.nfrac, z.nfrac);
    let d = z.to_biguint();
    assert!(!d.is_zero(), "fx_div: division by zero");
    let q = (y.to_biguint() << (L::BITS as usize * y.nfrac)) / d;
    FixedPoint::from_biguint(&q, y.nfrac, nint)
}

/// Running error bound in ulps, checked against overflow of its word.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct UlpErrorBound(pub u64);

impl UlpErrorBound {
    /// Adds `k` ulps (one per truncation, table lookup, ...).
    pub fn add(&mut self, k: u64) {
        self.0 = self.0.checked_add(k).expect("ulp error counter overflow");
    }

    /// Error after multiplying by an exact integer `c`: `ε·c`.
    pub fn scale(&mut self, c: u64) {
        self.0 = self.0.checked_mul(c).expect("ulp error counter overflow");
    }

    /// Error after a truncated division by an integer `c ≥ 1`: `⌈ε/c⌉ + 1`.
    pub fn div(&mut self, c: u64) {
        assert!(c > 0);
        self.0 = self.0.div_ceil(c);
        self.add(1);
    }

    pub fn count(self) -> u64 {
        self.0
    }
}
