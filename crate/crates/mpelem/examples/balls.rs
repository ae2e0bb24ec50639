//! Ball arithmetic on the results: the same value at rising precision
//! (each ball nested in the overlap of the previous ones) and an identity
//! checked with ball operations.

use mpelem::functions::{eval, sin_cos_ball, BigFloat, Func, Want};

fn main() {
    let x: BigFloat = "2.5".parse().unwrap();
    let mut prev = None;
    for p in [16, 53, 113, 256, 1024] {
        let b = eval(Func::Atan, &x, p).unwrap();
        let ok = prev.as_ref().map_or(true, |a: &mpelem::functions::Ball| a.overlaps(&b) && b.rad <= a.rad);
        println!("atan(2.5) at {p:>4} bits: radius {}  consistent: {ok}", b.rad);
        prev = Some(b);
    }

    // sin² + cos² encloses 1
    let (s, c) = sin_cos_ball(&x, 200, Want::Both).unwrap();
    let (s, c) = (s.unwrap(), c.unwrap());
    let one = s.mul(&s).add(&c.mul(&c));
    println!("sin² + cos² = {one}");
    println!("contains 1: {}", one.contains(&BigFloat::one()));

    // exp(a)·exp(−a) encloses 1 as well
    let a = eval(Func::Exp, &x, 300).unwrap();
    let b = eval(Func::Exp, &x.neg(), 300).unwrap();
    println!("exp(x)·exp(−x) contains 1: {}", a.mul(&b).contains(&BigFloat::one()));
}
