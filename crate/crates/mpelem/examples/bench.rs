//! A short precision ladder for one function, as CSV.
//!
//! ```text
//! cargo run --release --example bench -- atan
//! ```

use mpelem::bench::{run, to_csv, BenchConfig};
use mpelem::functions::Func;
use std::time::Duration;

fn main() {
    let f: Func = std::env::args().nth(1).as_deref().unwrap_or("exp").parse().expect("unknown function");
    let cfg = BenchConfig {
        functions: vec![f],
        precisions: vec![53, 256, 1024, 4096],
        min_time: Duration::from_millis(50),
        ..BenchConfig::default()
    };
    let rows = run(&cfg);
    print!("{}", to_csv(&rows));
    let ratio = rows[3].ns_per_call / rows[1].ns_per_call;
    println!("# time(4096)/time(256) = {ratio:.1}");
}
