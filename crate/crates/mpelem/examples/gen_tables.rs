//! Regenerates the argument-reduction tables and constants.
//!
//! ```text
//! cargo run --release --example gen_tables -- crates/mpelem/data
//! ```

use mpelem::argtables::{write_tables, TableParams};
use std::path::PathBuf;
use std::time::Instant;

fn main() {
    let dir: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "data".into()).into();
    let t = Instant::now();
    write_tables(&dir).expect("writing tables");
    for p in TableParams::all() {
        println!("{:<40} {:>8.4} KiB", p.header(), p.size_kib());
    }
    println!("wrote {} in {:.2?}", dir.display(), t.elapsed());
}
