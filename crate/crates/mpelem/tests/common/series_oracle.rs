//! Exact rational references for the series kernels.
//!
//! `closed_form` sums the truncated series directly from its coefficients.
//! `replay` runs the backward recurrence of the evaluator with exact
//! arithmetic (no truncation) over the same `u`, `v` tables. Both return a
//! value `num / den`.

use mpelem::series::{splitting_param, DenomKind, DenomTable, SeriesKind};
use mpelem::Limb;
use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug)]
pub struct Ratio {
    pub num: BigInt,
    pub den: BigUint,
}

impl Ratio {
    pub fn same_value(&self, other: &Ratio) -> bool {
        &self.num * BigInt::from(other.den.clone()) == &other.num * BigInt::from(self.den.clone())
    }

    /// `|r / 2^f − self| ≤ k / 2^f`
    pub fn within_ulps(&self, r: &BigUint, f: u64, k: u64) -> bool {
        let lhs = BigInt::from(r.clone()) * BigInt::from(self.den.clone()) - (&self.num << f);
        lhs.abs() <= BigInt::from(self.den.clone()) * k
    }

    /// `|r / 2^f − self|` in units of `2^−f`, as a float for diagnostics.
    pub fn ulp_distance(&self, r: &BigUint, f: u64) -> f64 {
        let lhs = BigInt::from(r.clone()) * BigInt::from(self.den.clone()) - (&self.num << f);
        let q = (lhs.abs() << 20u32) / BigInt::from(self.den.clone());
        q.to_string().parse::<f64>().unwrap() / (1u64 << 20) as f64
    }
}

fn factorial(k: usize) -> BigUint {
    (1..=k as u64).fold(BigUint::one(), |a, b| a * b)
}

/// Exponent of `x` in term `k` and the coefficient denominator.
fn term_shape(kind: SeriesKind, k: usize) -> (usize, BigUint) {
    match kind {
        SeriesKind::Atan | SeriesKind::Atanh => (2 * k + 1, BigUint::from(2 * k as u64 + 1)),
        SeriesKind::Exp => (k, factorial(k)),
        SeriesKind::Sin => (2 * k + 1, factorial(2 * k + 1)),
        SeriesKind::Cos => (2 * k, factorial(2 * k)),
    }
}

/// `Σ_{k<N} ±x^e_k / d_k` with `x = a / 2^f`, by Horner's rule over the
/// common denominator of the coefficients.
pub fn closed_form(kind: SeriesKind, a: &BigUint, f: u64, n_terms: usize) -> Ratio {
    let dens: Vec<BigUint> = (0..n_terms).map(|k| term_shape(kind, k).1).collect();
    let common = match kind {
        SeriesKind::Atan | SeriesKind::Atanh => {
            let mut l = BigUint::one();
            for d in &dens {
                l = num_integer::Integer::lcm(&l, d);
            }
            l
        }
        _ => dens.iter().max().unwrap().clone(),
    };
    // step in the exponent between consecutive terms
    let step = if kind == SeriesKind::Exp { 1 } else { 2 };
    let a_step = BigInt::from(a.pow(step as u32));
    let mut acc = BigInt::zero();
    let mut scale = 0u64; // acc is over 2^(f·scale)
    for k in (0..n_terms).rev() {
        let mut c = BigInt::from(&common / &dens[k]);
        if kind.alternating() && k % 2 == 1 {
            c = -c;
        }
        // acc ← c + x^step · acc
        acc = (c << (f * (scale + step))) + &a_step * acc;
        scale += step;
    }
    // acc / 2^(f·scale) is Σ c_k x^(step·k); now multiply by the leading power
    let lead = term_shape(kind, 0).0 as u32;
    let num = acc * BigInt::from(a.pow(lead));
    let den = (common << (f * (scale + lead as u64))) as BigUint;
    Ratio { num, den }
}

/// Backward recurrence of the evaluator with exact arithmetic.
/// `S = num / (2^e · vden)`.
pub fn replay<L: Limb>(kind: SeriesKind, table: &DenomTable<L>, a: &BigUint, f: u64, n_terms: usize) -> Ratio {
    let m = splitting_param(n_terms);
    let (stride, offset, base_pow) = match kind {
        SeriesKind::Atan | SeriesKind::Atanh => (1, 0, 2u32),
        SeriesKind::Exp => (1, 0, 1),
        SeriesKind::Sin => (2, 1, 2),
        SeriesKind::Cos => (2, 0, 2),
    };
    let idx = |k: usize| stride * k + offset;
    let t_num = |j: usize| BigInt::from(a.pow(base_pow * j as u32));
    let t_exp = |j: usize| f * base_pow as u64 * j as u64;
    let mut num = BigInt::zero();
    let mut e = 0u64;
    let mut vden = BigUint::one();
    for k in (0..n_terms).rev() {
        if k + 1 < n_terms {
            let (i, i1) = (idx(k), idx(k + 1));
            if table.kind == DenomKind::Odd {
                if table.v[i] != table.v[i1] {
                    num *= BigInt::from(table.v[i].to_u64());
                    vden *= table.v[i1].to_u64();
                }
            } else {
                for j in i + 1..=i1 {
                    if table.v[j] != table.v[j - 1] {
                        vden *= table.v[j].to_u64();
                    }
                }
            }
        }
        let u = BigInt::from(table.u[idx(k)].to_u64());
        let sign = if kind.alternating() && k % 2 == 1 { -1 } else { 1 };
        let j = k % m;
        let te = t_exp(j);
        if te > e {
            num <<= te - e;
            e = te;
        }
        let term = u * t_num(j) * BigInt::from(vden.clone()) << (e - te);
        num += term * sign;
        if j == 0 && k != 0 {
            num *= t_num(m);
            e += t_exp(m);
        }
    }
    vden *= table.v[idx(0)].to_u64();
    if matches!(kind, SeriesKind::Atan | SeriesKind::Atanh | SeriesKind::Sin) {
        num *= BigInt::from(a.clone());
        e += f;
    }
    Ratio {
        num,
        den: vden << e,
    }
}

/// Nonnegative integer from a two's-complement-free limb result.
pub fn as_unsigned(num: &BigInt) -> BigUint {
    assert_ne!(num.sign(), Sign::Minus);
    num.magnitude().clone()
}
