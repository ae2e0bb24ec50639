#![allow(dead_code)]

pub mod harness;
pub mod reference;
pub mod series_oracle;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform integer in `[0, bound)` by rejection sampling.
pub fn below(rng: &mut impl rand::Rng, bound: &num_bigint::BigUint) -> num_bigint::BigUint {
    let bits = bound.bits();
    let words = ((bits + 31) / 32) as usize;
    loop {
        let mut d: Vec<u32> = (0..words).map(|_| rng.gen()).collect();
        let extra = words as u64 * 32 - bits;
        if extra > 0 {
            let last = d.last_mut().unwrap();
            *last &= u32::MAX >> extra;
        }
        let x = num_bigint::BigUint::new(d);
        if &x < bound {
            return x;
        }
    }
}
