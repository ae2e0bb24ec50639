//! Runs the abstract-interpretation prover over every series kernel and
//! shows the worst bound it found.
//!
//! ```text
//! cargo run --release --example prover -- 300
//! ```

use mpelem::prover::prove_all_with;
use std::time::Instant;

fn main() {
    let n_max: usize = std::env::args().nth(1).map_or(300, |s| s.parse().expect("bad N"));
    let t = Instant::now();
    let reports = prove_all_with(n_max);
    for r in &reports {
        println!("{r}");
        if let Some(n) = r.argmax_error() {
            println!("       worst at N = {n}");
        }
    }
    let ok = reports.iter().all(|r| r.passed());
    println!("{} in {:.2?}", if ok { "all proven" } else { "FAILED" }, t.elapsed());
}
