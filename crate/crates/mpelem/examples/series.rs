//! The fixed-point series kernels and their denominator tables.

use mpelem::fixedpoint::FixedPoint;
use mpelem::series::{eval_exp_series, eval_sin_cos_series, DenomKind, DenomTable, TableLimb, Want};
use num_bigint::BigUint;

fn main() {
    for kind in [DenomKind::Odd, DenomKind::Factorial] {
        let t32 = DenomTable::<u32>::generate(kind);
        let t64 = DenomTable::<u64>::generate(kind);
        println!(
            "{kind:?}: first breaks {:?} (32-bit), {:?} (64-bit); mean v_k {:.2} / {:.2} bits",
            &t32.breaks[..4],
            &t64.breaks[..4],
            t32.mean_v_bits(300),
            t64.mean_v_bits(300)
        );
    }

    // X = 1/32 with four 64-bit fraction limbs
    let n = 4;
    let x: FixedPoint<u64> = FixedPoint::from_biguint(&(BigUint::from(1u32) << (64 * n - 5)), n, 0);
    let e = eval_exp_series(&x, 40, u64::factorial_table());
    println!("exp(1/32) ≈ {:x} / 2^{}", e.to_biguint(), e.frac_bits());
    let (s, c) = eval_sin_cos_series(&x, 40, u64::factorial_table(), Want::Both);
    println!("sin(1/32) ≈ {:x}", s.unwrap().to_biguint());
    println!("cos(1/32) ≈ {:x}", c.unwrap().to_biguint());
}
