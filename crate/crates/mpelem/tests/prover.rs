mod common;

use common::below;
use common::series_oracle::replay;
use mpelem::fixedpoint::{biguint_to_limbs, limbs_to_biguint, FixedPoint};
use mpelem::prover::*;
use mpelem::series::*;
use mpelem::Limb;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::Rng;

#[test]
fn all_reports_pass() {
    let t = std::time::Instant::now();
    let reports = prove_all();
    for r in &reports {
        eprintln!("{r}  worst at N={:?}", r.argmax_error());
    }
    eprintln!("elapsed {:?}", t.elapsed());
    assert_eq!(reports.len(), 10);
    assert!(reports.iter().all(|r| r.passed()));
    assert!(t.elapsed().as_secs() < 60);
}

#[test]
fn smallest_range_passes() {
    for r in prove_all_with(3) {
        assert!(r.passed(), "{r}");
        assert_eq!((r.n_min, r.n_max, r.worst_error.len()), (3, 3, 1));
    }
}

fn failing_lines(r: &ProofReport) -> Vec<Line> {
    r.outcomes.iter().filter(|(_, o)| o.failed > 0).map(|(l, _)| *l).collect()
}

fn mutate_v<L: TableLimb>(kind: DenomKind, k: usize) -> DenomTable<L> {
    let mut t = L::table(kind).clone();
    t.v[k] = L::MAX;
    t
}

#[test]
fn saturated_denominator_is_rejected() {
    // k = 20 sits inside the second odd block for 64-bit limbs
    let t = mutate_v::<u64>(DenomKind::Odd, 20);
    let r = prove_series(SeriesKind::Atan, &t, 300);
    eprintln!("{r}\n  failing: {:?}", failing_lines(&r));
    assert!(!r.passed());
    assert_eq!(r.first_violation.as_ref().unwrap().line, Line::TableIdentity);

    let t = mutate_v::<u32>(DenomKind::Factorial, 30);
    let r = prove_series(SeriesKind::Exp, &t, 300);
    eprintln!("{r}\n  failing: {:?}", failing_lines(&r));
    assert!(!r.passed());
    assert!(failing_lines(&r).contains(&Line::TableIdentity));
}

#[test]
fn saturated_block_is_caught_by_identity_only() {
    // A whole block with v = 2^B − 1 keeps every arithmetic step in range
    // (S·v/v' only shrinks), so the identity check is what rejects it.
    let base = u64::odd_table();
    let b = base.breaks[0] + 1;
    let end = base.breaks[1];
    let mut t = base.clone();
    for k in b..=end {
        t.v[k] = u64::MAX;
    }
    let r = prove_series(SeriesKind::Atan, &t, 300);
    eprintln!("{r}\n  failing: {:?}", failing_lines(&r));
    assert!(!r.passed());
    assert_eq!(failing_lines(&r), vec![Line::TableIdentity]);
}

#[test]
fn numerator_off_by_one_is_rejected() {
    for kind in SeriesKind::ALL {
        let mut t = u32::table(kind.table_kind()).clone();
        t.u[7] += 1;
        let r = prove_series(kind, &t, 40);
        assert!(!r.passed(), "{kind}");
        assert_eq!(r.first_violation.unwrap().line, Line::TableIdentity);
    }
}

#[test]
fn short_table_is_rejected() {
    let t = DenomTable::<u64>::generate_len(DenomKind::Factorial, 100);
    let r = prove_series(SeriesKind::Cos, &t, 60);
    assert!(!r.passed());
    assert!(failing_lines(&r).contains(&Line::TableLength));
    let r = prove_series(SeriesKind::Cos, &t, 50);
    assert!(r.passed(), "{r}");
}

#[test]
fn wrong_table_kind_is_rejected() {
    let r = prove_series(SeriesKind::Atan, u64::factorial_table(), 10);
    assert!(!r.passed());
}

/// Records the fixed-point value of `S` at each probe point, together with
/// the wrap-around modulus of its integer limb (zero for the final result).
struct Recorder(Vec<(Point, usize, BigRational, BigRational)>, usize);

impl<L: Limb> Probe<L> for Recorder {
    fn point(&mut self, point: Point, k: usize, s: &[L]) {
        let frac = (L::BITS as usize * self.1) as u64;
        let m = BigInt::from(limbs_to_biguint(s));
        let wrap = if point != Point::Final && s.len() == self.1 + 1 {
            BigInt::one() << L::BITS
        } else {
            BigInt::from(0)
        };
        let val = BigRational::new(m, BigInt::one() << frac);
        self.0.push((point, k, val, BigRational::from_integer(wrap)));
    }
}

fn run_concrete<L: TableLimb>(kernel: Kernel, x: &FixedPoint<L>, n_terms: usize) -> Recorder {
    let mut rec = Recorder(Vec::new(), x.nfrac);
    let mut none = Recorder(Vec::new(), x.nfrac);
    match kernel {
        Kernel::Atan => {
            eval_odd_series_probed(x, n_terms, L::odd_table(), true, &mut rec);
        }
        Kernel::Atanh => {
            eval_odd_series_probed(x, n_terms, L::odd_table(), false, &mut rec);
        }
        Kernel::Exp => {
            eval_exp_series_probed(x, n_terms, L::factorial_table(), &mut rec);
        }
        Kernel::Sinh => {
            eval_sinh_series_probed(x, n_terms, L::factorial_table(), &mut rec);
        }
        Kernel::Sin => {
            eval_sin_cos_series_probed(x, n_terms, L::factorial_table(), Want::Sin, &mut rec, &mut none);
        }
        Kernel::Cos => {
            eval_sin_cos_series_probed(x, n_terms, L::factorial_table(), Want::Cos, &mut none, &mut rec);
        }
    }
    rec
}

fn series_kind(kernel: Kernel) -> Option<SeriesKind> {
    match kernel {
        Kernel::Atan => Some(SeriesKind::Atan),
        Kernel::Atanh => Some(SeriesKind::Atanh),
        Kernel::Exp => Some(SeriesKind::Exp),
        Kernel::Sin => Some(SeriesKind::Sin),
        Kernel::Cos => Some(SeriesKind::Cos),
        Kernel::Sinh => None,
    }
}

/// Every concrete state lies in the abstract bounds at the matching point,
/// and the final result is within the proven error of the exact recurrence.
fn spot_check<L: TableLimb>(rng: &mut impl Rng) {
    const KERNELS: [Kernel; 6] = [Kernel::Atan, Kernel::Atanh, Kernel::Exp, Kernel::Sinh, Kernel::Sin, Kernel::Cos];
    let kernel = KERNELS[rng.gen_range(0..6)];
    let n = rng.gen_range(1..=4);
    let n_terms = rng.gen_range(3..=300);
    let frac = (L::BITS as usize * n) as u64;
    let top = BigUint::one() << (frac - 4);
    let a = match rng.gen_range(0..8) {
        0 => top.clone(),
        1 => BigUint::from(0u8),
        _ => below(rng, &(&top + 1u8)),
    };
    let x = FixedPoint::from_limbs(biguint_to_limbs::<L>(&a, n), n);
    let table = L::table(match kernel {
        Kernel::Atan | Kernel::Atanh => DenomKind::Odd,
        _ => DenomKind::Factorial,
    });
    let bounds = trace_kernel(kernel, table, n_terms);
    let rec = run_concrete(kernel, &x, n_terms);
    assert_eq!(bounds.len(), rec.0.len(), "{kernel:?} N={n_terms}: trace length");
    let ulp = BigRational::new(BigInt::one(), BigInt::one() << frac);
    for (b, (p, k, val, wrap)) in bounds.iter().zip(&rec.0) {
        assert_eq!((b.point, b.k), (*p, *k), "{kernel:?} N={n_terms}: trace order");
        let slack = &b.value.err * &ulp;
        // the integer limb is a residue mod 2^B; a negative S reads as its
        // two's complement
        let inside = |v: &BigRational| &b.value.lo - &slack <= *v && *v <= &b.value.hi + &slack;
        let ok = inside(val) || inside(&(val - wrap));
        assert!(ok, "{kernel:?} B={} n={n} N={n_terms} x={a:x} at {p:?} k={k}", L::BITS);
    }
    if let Some(kind) = series_kind(kernel) {
        let exact = replay(kind, table, &a, frac, n_terms);
        let exact = BigRational::new(exact.num, BigInt::from(exact.den));
        let (_, _, got, _) = rec.0.last().unwrap();
        let err = &bounds.last().unwrap().value.err;
        assert!(
            (got - &exact).abs() <= err * &ulp,
            "{kernel:?} B={} n={n} N={n_terms} x={a:x}: final error exceeds bound",
            L::BITS
        );
    }
}

#[test]
fn bounds_contain_concrete_runs() {
    let mut rng = common::rng(0x5eed);
    for i in 0..1000 {
        if i % 2 == 0 {
            spot_check::<u64>(&mut rng);
        } else {
            spot_check::<u32>(&mut rng);
        }
    }
}
