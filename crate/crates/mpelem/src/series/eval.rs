//! Rectangular splitting with collected denominators.
//!
//! The sum is accumulated backwards in an `(n+1)`-limb array `S` whose top
//! limb is integral and may transiently hold a two's-complement negative.
//! At index `k` the partial sum is `S / D_k`, where `D_k` is `v_k` for the
//! odd tables and the product of block denominators up to `k` for the
//! factorial tables.

use super::denom::{DenomKind, DenomTable};
use crate::fixedpoint::{addmul_1, div_1, mul_1, mul_high, submul_1, FixedPoint};
use crate::limb::Limb;

/// Program points reported to a [`Probe`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    /// After adding the term of index `k` (before any Horner step).
    Term,
    /// Right before a denominator change entering index `k`.
    BeforeDenom,
    /// Right after that change.
    AfterDenom,
    /// Before `S ← S·T_m` at index `k`.
    BeforeHorner,
    AfterHorner,
    /// Before the final division by `v_0`.
    BeforeFinalDiv,
    /// Final `n`- or `(n+1)`-limb result.
    Final,
}

/// Observer of intermediate sums; the default does nothing.
pub trait Probe<L: Limb> {
    fn point(&mut self, _point: Point, _k: usize, _s: &[L]) {}
}

/// No-op probe.
pub struct NoProbe;
impl<L: Limb> Probe<L> for NoProbe {}

/// Which outputs [`eval_sin_cos_series`] computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Want {
    Sin,
    Cos,
    Both,
}

/// Splitting parameter `m = 2⌈√N/2⌉`.
pub fn splitting_param(n_terms: usize) -> usize {
    let mut j = 1;
    while 4 * j * j < n_terms {
        j += 1;
    }
    2 * j
}

/// Power table `T[1..=m]` (index 0 unused). `T_1 = X²`, or `X` when
/// `square` is false.
pub fn power_table<L: Limb>(x: &[L], m: usize, square: bool) -> Vec<Vec<L>> {
    let n = x.len();
    let mut t = vec![Vec::new(); m + 1];
    t[1] = if square {
        mul_high(x, x, n)
    } else {
        x.to_vec()
    };
    t[2] = mul_high(&t[1], &t[1], n);
    let mut k = 4;
    while k <= m {
        t[k - 1] = mul_high(&t[k / 2], &t[k / 2 - 1], n);
        t[k] = mul_high(&t[k / 2], &t[k / 2], n);
        k += 2;
    }
    t
}

/// Shape of one backward summation loop.
#[derive(Clone, Copy, Debug)]
pub(crate) struct LoopShape {
    pub alternating: bool,
    /// Table index used for term `k`: `a·k + b`.
    pub stride: usize,
    pub offset: usize,
}

impl LoopShape {
    pub fn index(&self, k: usize) -> usize {
        self.stride * k + self.offset
    }
}

pub(crate) fn check_x<L: Limb>(x: &[L]) {
    let top = x.last().copied().unwrap_or(L::ZERO).to_u64();
    let lim = 1u64 << (L::BITS - 4);
    let ok = top < lim || (top == lim && x[..x.len() - 1].iter().all(|l| l.is_zero()));
    assert!(ok, "series argument must satisfy 0 <= X <= 2^-4");
}

fn add_top<L: Limb>(s: &mut [L], c: L, negative: bool) {
    let top = s.last_mut().unwrap();
    *top = if negative {
        top.wrapping_sub(c)
    } else {
        top.wrapping_add(c)
    };
}

/// `S ← S·v / v'`, using `((S + v')·v)/v' − v` when `S` is negative.
fn change_mul_div<L: Limb>(s: &mut Vec<L>, v: L, v1: L) {
    let n1 = s.len();
    let neg = s[n1 - 1].high_bit();
    if neg {
        add_top(s, v1, false);
    }
    let mut w = vec![L::ZERO; n1 + 1];
    w[n1] = mul_1(&mut w, s, v);
    div_1(&mut w, v1);
    debug_assert!(w[n1].is_zero(), "denominator change overflow");
    w.truncate(n1);
    *s = w;
    if neg {
        add_top(s, v, true);
    }
}

/// `S ← S / v'`, using `(S + v')/v' − 1` when `S` is negative.
fn change_div<L: Limb>(s: &mut [L], v1: L) {
    let neg = s[s.len() - 1].high_bit();
    if neg {
        add_top(s, v1, false);
    }
    div_1(s, v1);
    if neg {
        add_top(s, L::ONE, true);
    }
}

/// Backward summation loop shared by all the series. Returns `S`
/// (n+1 limbs) before the final division.
pub(crate) fn run_loop<L: Limb, P: Probe<L>>(
    t: &[Vec<L>],
    m: usize,
    n_terms: usize,
    table: &DenomTable<L>,
    shape: LoopShape,
    probe: &mut P,
) -> Vec<L> {
    let n = t[1].len();
    assert!(
        shape.index(n_terms - 1) < table.len(),
        "denominator table too short for N = {n_terms}"
    );
    let mul_div = table.kind == DenomKind::Odd;
    let mut s = vec![L::ZERO; n + 1];
    for k in (0..n_terms).rev() {
        if k + 1 < n_terms {
            let (i, i1) = (shape.index(k), shape.index(k + 1));
            if (i..i1).any(|j| table.v[j] != table.v[j + 1]) {
                probe.point(Point::BeforeDenom, k, &s);
                if mul_div {
                    change_mul_div(&mut s, table.v[i], table.v[i1]);
                } else {
                    // one division per run of equal denominators crossed
                    for j in (i + 1..=i1).rev() {
                        if table.v[j] != table.v[j - 1] {
                            change_div(&mut s, table.v[j]);
                        }
                    }
                }
                probe.point(Point::AfterDenom, k, &s);
            }
        }
        let u = table.u[shape.index(k)];
        let neg = shape.alternating && k % 2 == 1;
        let j = k % m;
        if j == 0 {
            add_top(&mut s, u, neg);
            probe.point(Point::Term, k, &s);
            if k != 0 {
                probe.point(Point::BeforeHorner, k, &s);
                s = mul_high(&s, &t[m], n);
                probe.point(Point::AfterHorner, k, &s);
            }
        } else {
            let c = if neg {
                submul_1(&mut s[..n], &t[j], u)
            } else {
                addmul_1(&mut s[..n], &t[j], u)
            };
            add_top(&mut s, c, neg);
            probe.point(Point::Term, k, &s);
        }
    }
    probe.point(Point::BeforeFinalDiv, 0, &s);
    s
}

fn final_div<L: Limb>(mut s: Vec<L>, table: &DenomTable<L>, index0: usize) -> Vec<L> {
    div_1(&mut s, table.v[index0]);
    s
}

fn final_mul_x<L: Limb>(s: &[L], x: &[L]) -> Vec<L> {
    let n = x.len();
    let mut r = mul_high(s, x, n);
    debug_assert!(r[n].is_zero());
    r.truncate(n);
    r
}

fn odd_series<L: Limb, P: Probe<L>>(
    x: &FixedPoint<L>,
    n_terms: usize,
    table: &DenomTable<L>,
    alternating: bool,
    probe: &mut P,
) -> FixedPoint<L> {
    assert_eq!(table.kind, DenomKind::Odd, "odd-kind table required");
    assert!(n_terms > 2, "N must exceed 2");
    assert_eq!(x.nint(), 0);
    check_x(&x.limbs);
    let m = splitting_param(n_terms);
    let t = power_table(&x.limbs, m, true);
    let shape = LoopShape {
        alternating,
        stride: 1,
        offset: 0,
    };
    let s = run_loop(&t, m, n_terms, table, shape, probe);
    let s = final_div(s, table, 0);
    let r = final_mul_x(&s, &x.limbs);
    probe.point(Point::Final, 0, &r);
    FixedPoint::from_limbs(r, x.nfrac)
}

/// `Σ_{k<N} (−1)^k X^(2k+1)/(2k+1)` with at most 2 ulp error; `n` limbs.
pub fn eval_atan_series<L: Limb>(x: &FixedPoint<L>, n_terms: usize, table: &DenomTable<L>) -> FixedPoint<L> {
    odd_series(x, n_terms, table, true, &mut NoProbe)
}

/// `Σ_{k<N} X^(2k+1)/(2k+1)` with at most 2 ulp error; `n` limbs.
pub fn eval_atanh_series<L: Limb>(x: &FixedPoint<L>, n_terms: usize, table: &DenomTable<L>) -> FixedPoint<L> {
    odd_series(x, n_terms, table, false, &mut NoProbe)
}

/// `Σ_{k<N} X^k/k!` with at most 2 ulp error; `n+1` limbs.
pub fn eval_exp_series<L: Limb>(x: &FixedPoint<L>, n_terms: usize, table: &DenomTable<L>) -> FixedPoint<L> {
    eval_exp_series_probed(x, n_terms, table, &mut NoProbe)
}

pub fn eval_exp_series_probed<L: Limb, P: Probe<L>>(
    x: &FixedPoint<L>,
    n_terms: usize,
    table: &DenomTable<L>,
    probe: &mut P,
) -> FixedPoint<L> {
    assert_eq!(table.kind, DenomKind::Factorial, "factorial-kind table required");
    assert!(n_terms > 2, "N must exceed 2");
    assert_eq!(x.nint(), 0);
    check_x(&x.limbs);
    let m = splitting_param(n_terms);
    let t = power_table(&x.limbs, m, false);
    let shape = LoopShape {
        alternating: false,
        stride: 1,
        offset: 0,
    };
    let s = run_loop(&t, m, n_terms, table, shape, probe);
    let s = final_div(s, table, 0);
    probe.point(Point::Final, 0, &s);
    FixedPoint::from_limbs(s, x.nfrac)
}

/// Shared body of the sine, cosine and hyperbolic sine series.
pub(crate) fn trig_loop<L: Limb, P: Probe<L>>(
    x: &[L],
    t: &[Vec<L>],
    m: usize,
    n_terms: usize,
    table: &DenomTable<L>,
    odd: bool,
    alternating: bool,
    probe: &mut P,
) -> Vec<L> {
    let shape = LoopShape {
        alternating,
        stride: 2,
        offset: odd as usize,
    };
    let s = run_loop(t, m, n_terms, table, shape, probe);
    let s = final_div(s, table, shape.index(0));
    if odd {
        let r = final_mul_x(&s, x);
        probe.point(Point::Final, 0, &r);
        r
    } else {
        probe.point(Point::Final, 0, &s);
        s
    }
}

/// Sine (`n` limbs) and cosine (`n+1` limbs) partial sums, each within
/// 2 ulp. The power table of `X²` is shared by both loops.
pub fn eval_sin_cos_series<L: Limb>(
    x: &FixedPoint<L>,
    n_terms: usize,
    table: &DenomTable<L>,
    want: Want,
) -> (Option<FixedPoint<L>>, Option<FixedPoint<L>>) {
    eval_sin_cos_series_probed(x, n_terms, table, want, &mut NoProbe, &mut NoProbe)
}

pub fn eval_sin_cos_series_probed<L: Limb, P: Probe<L>, Q: Probe<L>>(
    x: &FixedPoint<L>,
    n_terms: usize,
    table: &DenomTable<L>,
    want: Want,
    sin_probe: &mut P,
    cos_probe: &mut Q,
) -> (Option<FixedPoint<L>>, Option<FixedPoint<L>>) {
    assert_eq!(table.kind, DenomKind::Factorial, "factorial-kind table required");
    assert!(n_terms > 2, "N must exceed 2");
    assert_eq!(x.nint(), 0);
    check_x(&x.limbs);
    let m = splitting_param(n_terms);
    let t = power_table(&x.limbs, m, true);
    let sin = (want != Want::Cos).then(|| {
        let r = trig_loop(&x.limbs, &t, m, n_terms, table, true, true, sin_probe);
        FixedPoint::from_limbs(r, x.nfrac)
    });
    let cos = (want != Want::Sin).then(|| {
        let r = trig_loop(&x.limbs, &t, m, n_terms, table, false, true, cos_probe);
        FixedPoint::from_limbs(r, x.nfrac)
    });
    (sin, cos)
}

/// `Σ_{k<N} X^(2k+1)/(2k+1)!` with at most 2 ulp error; `n` limbs.
pub fn eval_sinh_series<L: Limb>(x: &FixedPoint<L>, n_terms: usize, table: &DenomTable<L>) -> FixedPoint<L> {
    eval_sinh_series_probed(x, n_terms, table, &mut NoProbe)
}

pub fn eval_sinh_series_probed<L: Limb, P: Probe<L>>(
    x: &FixedPoint<L>,
    n_terms: usize,
    table: &DenomTable<L>,
    probe: &mut P,
) -> FixedPoint<L> {
    assert_eq!(table.kind, DenomKind::Factorial, "factorial-kind table required");
    assert!(n_terms > 2, "N must exceed 2");
    assert_eq!(x.nint(), 0);
    check_x(&x.limbs);
    let m = splitting_param(n_terms);
    let t = power_table(&x.limbs, m, true);
    let r = trig_loop(&x.limbs, &t, m, n_terms, table, true, false, probe);
    FixedPoint::from_limbs(r, x.nfrac)
}

/// Atan or atanh series with a probe attached.
pub fn eval_odd_series_probed<L: Limb, P: Probe<L>>(
    x: &FixedPoint<L>,
    n_terms: usize,
    table: &DenomTable<L>,
    alternating: bool,
    probe: &mut P,
) -> FixedPoint<L> {
    odd_series(x, n_terms, table, alternating, probe)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::denom::TableLimb;

    #[test]
    fn splitting() {
        assert_eq!(splitting_param(3), 2);
        assert_eq!(splitting_param(4), 2);
        assert_eq!(splitting_param(5), 4);
        assert_eq!(splitting_param(16), 4);
        assert_eq!(splitting_param(17), 6);
        assert_eq!(splitting_param(299), 18);
    }

    #[test]
    fn zero_argument() {
        let x = FixedPoint::<u64>::zero(3, 0);
        assert!(eval_atan_series(&x, 10, u64::odd_table()).is_zero());
        assert!(eval_atanh_series(&x, 10, u64::odd_table()).is_zero());
        let e = eval_exp_series(&x, 10, u64::factorial_table());
        assert_eq!(e, FixedPoint::one(3));
        let (s, c) = eval_sin_cos_series(&x, 10, u64::factorial_table(), Want::Both);
        assert!(s.unwrap().is_zero());
        assert_eq!(c.unwrap(), FixedPoint::one(3));
    }

    #[test]
    fn want_skips() {
        let x = FixedPoint::<u32>::from_limbs(vec![7, 1 << 26], 2);
        let (s, c) = eval_sin_cos_series(&x, 8, u32::factorial_table(), Want::Sin);
        assert!(s.is_some() && c.is_none());
        let (s2, c2) = eval_sin_cos_series(&x, 8, u32::factorial_table(), Want::Both);
        assert_eq!(s, s2);
        assert!(c2.is_some());
    }

    #[test]
    #[should_panic]
    fn rejects_large_x() {
        let x = FixedPoint::<u64>::from_limbs(vec![0, 1 << 61], 2);
        eval_atan_series(&x, 5, u64::odd_table());
    }
}
