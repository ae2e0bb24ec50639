//! Property tests over arbitrary inputs and precisions, and the exact
//! special-case values.

mod common;

use common::harness::{check_containment, check_self_consistency, reference_contains, Outcome};
use common::reference::{to_ours, Reference};
use mpelem::functions::{
    atan_raw_with, eval, eval_with, log_ball, sin_cos_ball, working_precision, Ball, BigFloat, Error, Func, Mag, Want,
};
use num_bigint::BigUint;
use proptest::prelude::*;

/// `±m·2^k` with an odd-or-even `bits`-bit mantissa `m`.
fn arb_float(max_exp: i64) -> impl Strategy<Value = BigFloat> {
    (any::<bool>(), 1u32..=200, any::<[u64; 4]>(), -300i64..=max_exp).prop_map(|(neg, bits, words, k)| {
        let m = BigUint::from_slice(&words.iter().flat_map(|w| [*w as u32, (*w >> 32) as u32]).collect::<Vec<_>>());
        let m = (m >> (256 - bits)) | (BigUint::from(1u32) << (bits - 1));
        BigFloat::from_parts(neg, m, k - bits as i64)
    })
}

fn arb_func() -> impl Strategy<Value = Func> {
    prop::sample::select(Func::ALL.to_vec())
}

/// A valid argument for `f`: positive for log, `|x| < 2^20` for exp.
fn adapt(f: Func, x: BigFloat) -> BigFloat {
    match f {
        Func::Log => x.abs(),
        Func::Exp if x.exponent().is_some_and(|e| e > 20) => x.mul_2exp(20 - x.exponent().unwrap()),
        _ => x,
    }
}

fn pass(o: Outcome) -> Result<(), TestCaseError> {
    match o {
        Outcome::Fail(m) => Err(TestCaseError::fail(m)),
        _ => Ok(()),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn contains_the_value(f in arb_func(), x in arb_float(60), p in 2u64..=4096) {
        pass(check_containment(f, &adapt(f, x), p))?;
    }

    #[test]
    fn finer_precision_is_consistent(f in arb_func(), x in arb_float(60), p in 2u64..=4064) {
        pass(check_self_consistency(f, &adapt(f, x), p))?;
    }

    #[test]
    fn limb_sizes_agree(f in arb_func(), x in arb_float(30), p in 2u64..=2048) {
        let x = adapt(f, x);
        let a = eval_with::<u32>(f, &x, p);
        let b = eval_with::<u64>(f, &x, p);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert!(a.overlaps(&b), "{} vs {}", a, b);
                prop_assert!(reference_contains(f, &x, &a, p).unwrap(), "32-bit limbs: {}", a);
                prop_assert!(reference_contains(f, &x, &b, p).unwrap(), "64-bit limbs: {}", b);
            }
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
    }

    #[test]
    fn pythagoras(x in arb_float(40), p in 2u64..=4000) {
        let (s, c) = sin_cos_ball(&x, p, Want::Both).unwrap();
        let (s, c) = (s.unwrap(), c.unwrap());
        let one = s.mul(&s).add(&c.mul(&c));
        prop_assert!(one.contains(&BigFloat::one()), "{}", one);
    }

    #[test]
    fn odd_and_even_symmetry(x in arb_float(40), p in 2u64..=4096) {
        let n = x.neg();
        for f in [Func::Sin, Func::Atan] {
            prop_assert_eq!(eval(f, &n, p).unwrap(), eval(f, &x, p).unwrap().neg());
        }
        prop_assert_eq!(eval(Func::Cos, &n, p).unwrap(), eval(Func::Cos, &x, p).unwrap());
    }

    #[test]
    fn atan_small_branch(m in 1u64..1 << 20, p in 2u64..=4096, extra in 3i64..200) {
        // e < −p/2 − 2
        let e = -(p as i64) / 2 - extra;
        let x = BigFloat::from_parts(false, m.into(), e - 64 + (m.leading_zeros() as i64));
        prop_assert_eq!(x.exponent(), Some(e));
        let r = atan_raw_with::<u64>(&x, p).unwrap();
        prop_assert!(r.state.is_none());
        prop_assert_eq!(r.mid, x);
        prop_assert_eq!(r.rad, Mag::pow2(3 * e));
    }

    #[test]
    fn atan_large_branch(m in 1u64..1 << 20, neg: bool, p in 2u64..=4096, extra in 3i64..200) {
        // e > p + 2
        let e = p as i64 + extra;
        let x = BigFloat::from_parts(neg, m.into(), e - 64 + (m.leading_zeros() as i64));
        prop_assert_eq!(x.exponent(), Some(e));
        let r = atan_raw_with::<u32>(&x, p).unwrap();
        prop_assert!(r.state.is_none());
        // 2^(1−e); beyond e ≈ 1557 the rounding error of the stored π/2
        // no longer fits in its slack and is added
        let want = if 3 * e + 2 > 4672 { Mag::pow2(1 - e).add(&Mag::pow2(-4672)) } else { Mag::pow2(1 - e) };
        prop_assert_eq!(r.rad, want);
        let half_pi = pi().mul_2exp(-1);
        let d = r.mid.sub(&if neg { half_pi.neg() } else { half_pi }).abs();
        prop_assert!(d <= BigFloat::pow2(-4670));
    }

    #[test]
    fn refuses_beyond_4608_working_bits(f in arb_func(), x in arb_float(30), p in 4400u64..=4700) {
        let x = adapt(f, x);
        match (working_precision(f, &x, p), eval(f, &x, p)) {
            (Some(w), Err(Error::UnsupportedPrecision(v))) => prop_assert!(w > 4608 && v == w),
            (Some(w), r) => prop_assert!(w <= 4608, "w = {} but {:?}", w, r.map(|_| ())),
            (None, r) => prop_assert!(!matches!(r, Err(Error::UnsupportedPrecision(_)))),
        }
    }
}

fn pi() -> BigFloat {
    let mut r = Reference::new(4800);
    to_ours(&r.pi())
}

#[test]
fn atan_of_one() {
    let quarter = pi().mul_2exp(-2);
    for p in [2, 53, 64, 1000, 4096] {
        for neg in [false, true] {
            let x = if neg { BigFloat::one().neg() } else { BigFloat::one() };
            let r = atan_raw_with::<u64>(&x, p).unwrap();
            assert!(r.state.is_none());
            let want = if neg { quarter.neg() } else { quarter.clone() };
            // the stored π/4 with its own rounding error, far below any ulp
            assert!(r.mid.sub(&want).abs() <= BigFloat::pow2(-4670));
            assert!(r.rad <= Mag::pow2(-4670));
            assert!(Ball::new(r.mid, r.rad).contains(&want) || r.rad.is_zero());
        }
    }
}

#[test]
fn exact_values() {
    let zero = BigFloat::zero();
    let one = BigFloat::one();
    for p in [2, 53, 4096] {
        assert_eq!(eval(Func::Exp, &zero, p).unwrap(), Ball::exact(one.clone()));
        assert_eq!(eval(Func::Sin, &zero, p).unwrap(), Ball::exact(zero.clone()));
        assert_eq!(eval(Func::Cos, &zero, p).unwrap(), Ball::exact(one.clone()));
        assert_eq!(eval(Func::Atan, &zero, p).unwrap(), Ball::exact(zero.clone()));
        assert_eq!(eval(Func::Log, &one, p).unwrap(), Ball::exact(zero.clone()));
    }
}

#[test]
fn log2_at_128_bits() {
    let b = log_ball(&BigFloat::from_u64(2), 128).unwrap();
    let mut r = Reference::new(400);
    let ln2 = to_ours(&r.ln2());
    assert!(b.contains(&ln2));
    // at most one ulp of a value in [1/2, 1)
    assert!(b.rad <= Mag::pow2(-128), "{b}");
}

#[test]
fn domain_and_input_errors() {
    assert!(matches!(eval(Func::Log, &BigFloat::zero(), 53), Err(Error::DomainError(_))));
    assert!(matches!(eval(Func::Log, &BigFloat::one().neg(), 53), Err(Error::DomainError(_))));
    for f in Func::ALL {
        assert!(matches!(eval(f, &BigFloat::nan(), 53), Err(Error::InvalidInput(_))), "{f}");
        assert!(matches!(eval(f, &BigFloat::one(), 1), Err(Error::InvalidInput(_))), "{f}");
    }
}
