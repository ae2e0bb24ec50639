//! Collected-denominator tables `u_k / v_k`.
//!
//! Odd kind: `1/(2k+1) = u_k / v_k` with `v_k` the lcm of the odd numbers in
//! the block containing `k`.
//!
//! Factorial kind: a block `[a, b]` has `v = a·(a+1)···b` (the factor for
//! index 0 is 1) and `u_k = (k+1)···b`, so `1/k! = u_k / (v_0·v_1···v_blk(k))`
//! where the product runs over the distinct block denominators up to and
//! including the block of `k`.
//!
//! Blocks are chosen greedily from `k = 0` upwards, each as long as its
//! denominator fits in one limb.

use crate::limb::Limb;
use num_bigint::BigUint;
use num_integer::Integer;
use std::fmt::Write as _;
use std::sync::OnceLock;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DenomKind {
    Odd,
    Factorial,
}

impl DenomKind {
    /// Entries generated by default: 300 series terms, which for the
    /// sine and cosine use factorial indices up to 599.
    pub fn default_len(self) -> usize {
        match self {
            DenomKind::Odd => 300,
            DenomKind::Factorial => 600,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DenomKind::Odd => "odd",
            DenomKind::Factorial => "factorial",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenomTable<L: Limb> {
    pub kind: DenomKind,
    pub u: Vec<L>,
    pub v: Vec<L>,
    /// Indices `k` with `v_k ≠ v_{k+1}` (last index of each block).
    pub breaks: Vec<usize>,
}

impl<L: Limb> DenomTable<L> {
    pub fn generate(kind: DenomKind) -> Self {
        Self::generate_len(kind, kind.default_len())
    }

    /// Greedy generation of the first `len` entries. The last block is
    /// completed as if the table continued, so every table is a prefix of
    /// the same infinite sequence.
    pub fn generate_len(kind: DenomKind, len: usize) -> Self {
        let max = L::MAX.to_u64() as u128;
        let factor = |k: usize| -> u128 {
            match kind {
                DenomKind::Odd => 2 * k as u128 + 1,
                DenomKind::Factorial => (k as u128).max(1),
            }
        };
        // (start, end inclusive, v)
        let mut blocks: Vec<(usize, usize, u128)> = Vec::new();
        let mut k = 0;
        while k < len {
            let start = k;
            let mut v = factor(k);
            loop {
                let f = factor(k + 1);
                let next = match kind {
                    DenomKind::Odd => v.lcm(&f),
                    DenomKind::Factorial => v * f,
                };
                if next > max {
                    break;
                }
                v = next;
                k += 1;
            }
            blocks.push((start, k, v));
            k += 1;
        }

        let mut u = Vec::with_capacity(len);
        let mut v = Vec::with_capacity(len);
        let mut breaks = Vec::new();
        for &(a, b, vb) in &blocks {
            for k in a..=b.min(len - 1) {
                let uk = match kind {
                    DenomKind::Odd => vb / factor(k),
                    DenomKind::Factorial => ((k + 1)..=b).map(|i| i as u128).product(),
                };
                u.push(L::from_u64(uk as u64));
                v.push(L::from_u64(vb as u64));
            }
            if b < len {
                breaks.push(b);
            }
        }
        DenomTable { kind, u, v, breaks }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn limb_bits(&self) -> u32 {
        L::BITS
    }

    pub fn is_break(&self, k: usize) -> bool {
        self.breaks.binary_search(&k).is_ok()
    }

    /// Mean bit length of `v_k` over `k < count`.
    pub fn mean_v_bits(&self, count: usize) -> f64 {
        let count = count.min(self.len());
        let total: u64 = self.v[..count]
            .iter()
            .map(|x| 64 - x.to_u64().leading_zeros() as u64)
            .sum();
        total as f64 / count as f64
    }

    /// Text dump: one line per `k` with `k u_k v_k break-flag` in decimal.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for k in 0..self.len() {
            let _ = writeln!(
                s,
                "{} {} {} {}",
                k,
                self.u[k].to_u64(),
                self.v[k].to_u64(),
                self.is_break(k) as u8
            );
        }
        s
    }

    /// Checks the defining identities with exact integers. Returns the first
    /// offending index.
    pub fn check_identities(&self) -> Result<(), usize> {
        let one = BigUint::from(1u8);
        match self.kind {
            DenomKind::Odd => {
                for k in 0..self.len() {
                    let (u, v) = (self.u[k].to_u64() as u128, self.v[k].to_u64() as u128);
                    if u * (2 * k as u128 + 1) != v {
                        return Err(k);
                    }
                }
            }
            DenomKind::Factorial => {
                // u_k · k! = product of block denominators up to blk(k)
                let mut fact = one.clone();
                let mut prod = one.clone();
                for k in 0..self.len() {
                    if k > 0 {
                        fact *= k as u64;
                    }
                    if k == 0 || self.v[k] != self.v[k - 1] {
                        prod *= self.v[k].to_u64();
                    }
                    if BigUint::from(self.u[k].to_u64()) * &fact != prod {
                        return Err(k);
                    }
                }
            }
        }
        for k in 1..self.len() {
            if (self.v[k] != self.v[k - 1]) != self.is_break(k - 1) {
                return Err(k);
            }
        }
        Ok(())
    }
}

/// Parses a dump produced by [`DenomTable::dump`] into `(k, u, v, flag)` rows.
pub fn parse_dump(text: &str) -> Result<Vec<(usize, u64, u64, bool)>, String> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return Err(format!("line {}: expected 4 fields", i + 1));
            }
            let p = |s: &str| s.parse::<u64>().map_err(|e| format!("line {}: {e}", i + 1));
            Ok((p(f[0])? as usize, p(f[1])?, p(f[2])?, p(f[3])? != 0))
        })
        .collect()
}

/// Limb types with process-wide cached tables.
pub trait TableLimb: Limb {
    fn odd_table() -> &'static DenomTable<Self>;
    fn factorial_table() -> &'static DenomTable<Self>;

    fn table(kind: DenomKind) -> &'static DenomTable<Self> {
        match kind {
            DenomKind::Odd => Self::odd_table(),
            DenomKind::Factorial => Self::factorial_table(),
        }
    }
}

macro_rules! impl_table_limb {
    ($t:ty) => {
        impl TableLimb for $t {
            fn odd_table() -> &'static DenomTable<$t> {
                static T: OnceLock<DenomTable<$t>> = OnceLock::new();
                T.get_or_init(|| DenomTable::generate(DenomKind::Odd))
            }
            fn factorial_table() -> &'static DenomTable<$t> {
                static T: OnceLock<DenomTable<$t>> = OnceLock::new();
                T.get_or_init(|| DenomTable::generate(DenomKind::Factorial))
            }
        }
    };
}

impl_table_limb!(u32);
impl_table_limb!(u64);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_odd_block_32() {
        let t = DenomTable::<u32>::generate(DenomKind::Odd);
        assert_eq!(t.breaks[0], 12);
        assert_eq!(t.v[0], 1673196525);
        assert_eq!(t.u[12], 1673196525 / 25);
    }

    #[test]
    fn first_factorial_block() {
        let t = DenomTable::<u32>::generate(DenomKind::Factorial);
        assert_eq!(t.v[0], 479001600);
        assert_eq!(t.u[0], 479001600);
        assert_eq!(t.u[12], 1);
        let t = DenomTable::<u64>::generate(DenomKind::Factorial);
        assert_eq!(t.v[5], 2432902008176640000);
    }

    #[test]
    fn identities_hold() {
        for kind in [DenomKind::Odd, DenomKind::Factorial] {
            assert_eq!(DenomTable::<u32>::generate(kind).check_identities(), Ok(()));
            assert_eq!(DenomTable::<u64>::generate(kind).check_identities(), Ok(()));
        }
    }

    #[test]
    fn prefix_property() {
        let a = DenomTable::<u64>::generate_len(DenomKind::Odd, 100);
        let b = DenomTable::<u64>::generate(DenomKind::Odd);
        assert_eq!(a.u[..], b.u[..100]);
        assert_eq!(a.v[..], b.v[..100]);
    }

    #[test]
    fn dump_roundtrip() {
        let t = DenomTable::<u32>::generate(DenomKind::Odd);
        let rows = parse_dump(&t.dump()).unwrap();
        assert_eq!(rows.len(), 300);
        assert_eq!(rows[12], (12, 1673196525 / 25, 1673196525, true));
    }
}
