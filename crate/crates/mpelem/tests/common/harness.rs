//! Randomized inputs and the checks shared by the function tests and the
//! acceptance suite. Reference values come from astro-float only.

use super::reference::{to_astro, to_ours, Fun, Reference};
use mpelem::functions::{eval, working_precision, Ball, BigFloat, Error, Func, Mag};
use num_bigint::BigUint;
use rand::Rng;

pub const REF_EXTRA: u64 = 64;

fn fun(f: Func) -> Fun {
    match f {
        Func::Exp => Fun::Exp,
        Func::Log => Fun::Log,
        Func::Sin => Fun::Sin,
        Func::Cos => Fun::Cos,
        Func::Atan => Fun::Atan,
    }
}

/// `f(x)` from astro-float at `prec` bits.
pub fn reference(f: Func, x: &BigFloat, prec: u64) -> BigFloat {
    thread_local! {
        static REF: std::cell::RefCell<Reference> = std::cell::RefCell::new(Reference::new(64));
    }
    REF.with(|r| {
        let mut r = r.borrow_mut();
        r.prec = prec as usize;
        to_ours(&r.eval(fun(f), &to_astro(x)))
    })
}

/// Precision in `[2, 4096]`: log-uniform, uniform, small, or at a band edge.
pub fn gen_prec(rng: &mut impl Rng) -> u64 {
    const EDGES: [u64; 14] = [2, 3, 31, 32, 53, 64, 113, 256, 312, 504, 505, 824, 2048, 4096];
    match rng.gen_range(0..10) {
        0..=3 => (2f64.powf(rng.gen_range(1.0..12.0)) as u64).clamp(2, 4096),
        4..=5 => rng.gen_range(2..=4096),
        6..=7 => rng.gen_range(2..=128),
        _ => EDGES[rng.gen_range(0..EDGES.len())],
    }
}

/// Random mantissa of `bits` bits with top bit set, as a value in `[1/2, 1)`.
fn mantissa(rng: &mut impl Rng, bits: u64) -> BigFloat {
    let bits = bits.max(1);
    let words: Vec<u32> = (0..bits.div_ceil(32)).map(|_| rng.gen()).collect();
    let m = BigUint::new(words) >> (bits.div_ceil(32) * 32 - bits);
    let m = m | (BigUint::from(1u32) << (bits - 1));
    BigFloat::from_parts(false, m, -(bits as i64))
}

/// Exponent range of the generic stratum for `f` at precision `p`.
fn exp_range(f: Func, p: u64) -> (i64, i64) {
    let p = p as i64;
    match f {
        Func::Exp => (-p - 12, 24),
        Func::Log => (-2000, 2000),
        Func::Sin | Func::Cos => (-p / 2 - 6, 40),
        Func::Atan => (-p / 2 - 6, p + 6),
    }
}

/// Corner-biased input for `f` at precision `p`: generic mantissas,
/// values next to powers of two, next to 1, next to multiples of π/4 or
/// log 2, and the far ends of the exponent range.
pub fn gen_input(rng: &mut impl Rng, f: Func, p: u64) -> BigFloat {
    let bits = match rng.gen_range(0..4) {
        0 => rng.gen_range(1..=8),
        1 => p,
        _ => rng.gen_range(1..=p + 16),
    };
    let (lo, hi) = exp_range(f, p);
    let x = match rng.gen_range(0..10) {
        0..=4 => mantissa(rng, bits).mul_2exp(rng.gen_range(lo..=hi)),
        // 2^k·(1 ± 2^−j)
        5 => {
            let k = rng.gen_range(lo.max(-64)..=hi.min(64));
            let j = rng.gen_range(1..=p as i64 + 8);
            let d = BigFloat::pow2(-j);
            let one = BigFloat::one();
            let v = if rng.gen() { one.add(&d) } else { one.sub(&d) };
            v.mul_2exp(k)
        }
        // 1 ± tiny
        6 => {
            let d = mantissa(rng, bits).mul_2exp(-rng.gen_range(1..=p as i64 + 16));
            if rng.gen() { BigFloat::one().add(&d) } else { BigFloat::one().sub(&d) }
        }
        // next to k·π/4 or m·log 2, rounded to a random precision
        7 => {
            let q = rng.gen_range(2..=p + 64);
            let k = rng.gen_range(1..=64i64);
            let base = match f {
                Func::Exp | Func::Log => Reference::new(q as usize + 8).ln2(),
                _ => Reference::new(q as usize + 8).pi().div(
                    &astro_float::BigFloat::from_word(4, 64),
                    q as usize + 8,
                    super::reference::RM,
                ),
            };
            to_ours(&base).mul(&BigFloat::from_i64(k)).round(q, mpelem::functions::Round::Nearest)
        }
        // exact small integers and halves
        8 => BigFloat::from_i64(rng.gen_range(1..=8)).mul_2exp(rng.gen_range(-1..=0)),
        // ends of the range
        _ => {
            let e = if rng.gen() { lo } else { hi };
            mantissa(rng, bits).mul_2exp(e)
        }
    };
    let x = match f {
        Func::Exp if x.exponent().unwrap_or(0) > 24 => x.mul_2exp(24 - x.exponent().unwrap()),
        _ => x,
    };
    if f != Func::Log && rng.gen() {
        x.neg()
    } else {
        x
    }
}

#[derive(Debug)]
pub enum Outcome {
    Pass,
    /// Legitimately refused: working precision beyond the supported maximum.
    Refused,
    Fail(String),
}

/// Starting reference precision for checking `b`: at least `p + 64` bits,
/// and finer than the radius (a lucky output rounding can leave a ball
/// much tighter than `2^−p`).
pub fn reference_prec(b: &Ball, p: u64) -> u64 {
    let base = p + REF_EXTRA;
    match (b.mid.exponent(), b.rad.exponent()) {
        (Some(ey), Some(er)) => base.max((ey - er + 16).clamp(0, 20_000) as u64),
        _ => base,
    }
}

/// Largest reference precision tried before a case counts as undecided.
pub const REF_CAP: u64 = 1 << 16;

/// Whether the value of `f(x)` lies in `b`, decided against the reference
/// with its own rounding error `δ ≤ ulp`: the reference interval has to lie
/// entirely inside or entirely outside `b`, otherwise precision doubles.
pub fn reference_contains(f: Func, x: &BigFloat, b: &Ball, p: u64) -> Result<bool, String> {
    let mut q = reference_prec(b, p);
    loop {
        let y = reference(f, x, q);
        let Some(ey) = y.exponent() else {
            // exact zero
            return Ok(b.contains(&y));
        };
        let r = Ball::new(y.clone(), Mag::pow2(ey - q as i64));
        if b.contains_ball(&r) {
            return Ok(true);
        }
        if !b.overlaps(&r) {
            return Ok(false);
        }
        if q >= REF_CAP {
            return Err(format!("undecided at {q} bits: {} vs {}", b, y.to_hex()));
        }
        q *= 2;
    }
}

/// `f(x)` at `p` against the reference.
pub fn check_containment(f: Func, x: &BigFloat, p: u64) -> Outcome {
    match eval(f, x, p) {
        Ok(b) => match reference_contains(f, x, &b, p) {
            Ok(true) => Outcome::Pass,
            Ok(false) => Outcome::Fail(format!("{} {} p={p}: {} excludes the reference", f.name(), x.to_hex(), b)),
            Err(m) => Outcome::Fail(format!("{} {} p={p}: {m}", f.name(), x.to_hex())),
        },
        Err(Error::UnsupportedPrecision(w)) if working_precision(f, x, p).is_some_and(|v| v > 4608) && w > 4608 => {
            Outcome::Refused
        }
        Err(e) => Outcome::Fail(format!("{} {} p={p}: {e}", f.name(), x.to_hex())),
    }
}

/// Balls at `p` and `p + 32` intersect and the second is no wider.
pub fn check_self_consistency(f: Func, x: &BigFloat, p: u64) -> Outcome {
    match (eval(f, x, p), eval(f, x, p + 32)) {
        (Ok(a), Ok(b)) => {
            if !a.overlaps(&b) {
                Outcome::Fail(format!("{} {} p={p}: {a} and {b} are disjoint", f.name(), x.to_hex()))
            } else if b.rad > a.rad {
                Outcome::Fail(format!("{} {} p={p}: radius grew from {} to {}", f.name(), x.to_hex(), a.rad, b.rad))
            } else {
                Outcome::Pass
            }
        }
        (_, Err(Error::UnsupportedPrecision(_))) if working_precision(f, x, p + 32).is_some_and(|v| v > 4608) => {
            Outcome::Refused
        }
        (a, b) => Outcome::Fail(format!("{} {} p={p}: {:?} / {:?}", f.name(), x.to_hex(), a.err(), b.err())),
    }
}

/// `z ≤ 2^(1−p)·|y|`; for sin and cos with `|x| ≥ 1` the absolute
/// tolerance `z ≤ 2^−p` is accepted instead.
pub fn radius_ok(f: Func, x: &BigFloat, b: &Ball, p: u64) -> bool {
    let rel = match b.mid.exponent() {
        None => b.rad.is_zero(),
        Some(_) => b.rad.to_bigfloat() <= b.mid.abs().mul_2exp(1 - p as i64),
    };
    let large = x.exponent().is_some_and(|e| e > 0);
    rel || (matches!(f, Func::Sin | Func::Cos) && large && b.rad <= Mag::pow2(-(p as i64)))
}

/// Moderate input: `2^−8 ≤ |x| < 2^8` (log: positive, away from 1 by at least 2^−8).
pub fn gen_moderate(rng: &mut impl Rng, f: Func, p: u64) -> BigFloat {
    loop {
        let bits = rng.gen_range(1..=p + 16);
        let x = mantissa(rng, bits).mul_2exp(rng.gen_range(-7..=8));
        if f == Func::Log {
            if x.sub(&BigFloat::one()).abs() >= BigFloat::pow2(-8) {
                return x;
            }
            continue;
        }
        return if rng.gen() { x.neg() } else { x };
    }
}

pub fn check_radius(f: Func, x: &BigFloat, p: u64) -> Outcome {
    match eval(f, x, p) {
        Ok(b) if radius_ok(f, x, &b, p) => Outcome::Pass,
        Ok(b) => Outcome::Fail(format!("{} {} p={p}: radius {} too large for {}", f.name(), x.to_hex(), b.rad, b.mid)),
        Err(e) => Outcome::Fail(format!("{} {} p={p}: {e}", f.name(), x.to_hex())),
    }
}

/// Ball of `1/x` rounded to `prec` bits.
fn recip(x: &BigFloat, prec: u64) -> Ball {
    let s = x.shift();
    let (num, den) = if s >= 0 {
        (BigUint::from(1u32), x.mantissa() << s as u64)
    } else {
        (BigUint::from(1u32) << (-s) as u64, x.mantissa().clone())
    };
    let y = BigFloat::from_ratio(x.is_negative(), &num, &den, prec);
    // half an ulp of the rounded value
    let e = y.exponent().unwrap();
    Ball::new(y, Mag::pow2(e - prec as i64 - 1))
}

/// Functional equation `which` (0 atan, 1 exp, 2 log, 3 sin/cos) at a random point.
pub fn check_equation(rng: &mut impl Rng, which: usize, p: u64) -> Outcome {
    let fail = |s: String| Outcome::Fail(s);
    let ok = |b: Result<Ball, Error>| b.expect("evaluation");
    match which {
        // atan(x) + atan(1/x) = π/2, x > 0
        0 => {
            let x = gen_moderate(rng, Func::Atan, p).abs();
            let xi = recip(&x, p + 40);
            let a = ok(eval(Func::Atan, &x, p));
            let b = ok(eval(Func::Atan, &xi.mid, p));
            // atan′ ≤ 1
            let s = a.add(&b).add(&Ball::new(BigFloat::zero(), xi.rad));
            let half_pi = reference(Func::Atan, &BigFloat::from_u64(1), p + 64).mul_2exp(1);
            if s.contains(&half_pi) {
                Outcome::Pass
            } else {
                fail(format!("atan {} + atan(1/x) p={p}: {s}", x.to_hex()))
            }
        }
        // exp(a)·exp(b) = exp(a + b)
        1 => {
            let a = gen_moderate(rng, Func::Exp, p).mul_2exp(-2);
            let b = gen_moderate(rng, Func::Exp, p).mul_2exp(-2);
            let l = ok(eval(Func::Exp, &a, p)).mul(&ok(eval(Func::Exp, &b, p)));
            let r = ok(eval(Func::Exp, &a.add(&b), p));
            if l.overlaps(&r) {
                Outcome::Pass
            } else {
                fail(format!("exp {} {} p={p}: {l} vs {r}", a.to_hex(), b.to_hex()))
            }
        }
        // log(x·y) = log x + log y
        2 => {
            let x = gen_moderate(rng, Func::Log, p);
            let y = gen_moderate(rng, Func::Log, p);
            let l = ok(eval(Func::Log, &x.mul(&y), p));
            let r = ok(eval(Func::Log, &x, p)).add(&ok(eval(Func::Log, &y, p)));
            if l.overlaps(&r) {
                Outcome::Pass
            } else {
                fail(format!("log {} {} p={p}: {l} vs {r}", x.to_hex(), y.to_hex()))
            }
        }
        // sin² + cos² = 1 and sin(a + b) = sin a cos b + cos a sin b
        _ => {
            let a = gen_moderate(rng, Func::Sin, p);
            let b = gen_moderate(rng, Func::Sin, p);
            let (sa, ca) = (ok(eval(Func::Sin, &a, p)), ok(eval(Func::Cos, &a, p)));
            let (sb, cb) = (ok(eval(Func::Sin, &b, p)), ok(eval(Func::Cos, &b, p)));
            let pyth = sa.mul(&sa).add(&ca.mul(&ca));
            if !pyth.contains(&BigFloat::one()) {
                return fail(format!("sin²+cos² {} p={p}: {pyth}", a.to_hex()));
            }
            let l = ok(eval(Func::Sin, &a.add(&b), p));
            let r = sa.mul(&cb).add(&ca.mul(&sb));
            if l.overlaps(&r) {
                Outcome::Pass
            } else {
                fail(format!("sin({} + {}) p={p}: {l} vs {r}", a.to_hex(), b.to_hex()))
            }
        }
    }
}
