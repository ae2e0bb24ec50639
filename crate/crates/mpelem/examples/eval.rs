//! All five functions at one argument and precision.
//!
//! ```text
//! cargo run --release --example eval -- 0x1.8p-1 200
//! ```

use mpelem::functions::{eval, BigFloat, Func};

fn main() {
    let mut args = std::env::args().skip(1);
    let x: BigFloat = args.next().as_deref().unwrap_or("0.75").parse().expect("bad x");
    let p: u64 = args.next().map_or(128, |s| s.parse().expect("bad precision"));
    println!("x = {} ({} bits)", x.to_decimal(20), x.precision());
    for f in Func::ALL {
        match eval(f, &x, p) {
            Ok(b) => println!("{f:>4}: {}  +/- {}", b.mid.to_decimal((p as f64 * 0.302) as usize + 1), b.rad),
            Err(e) => println!("{f:>4}: {e}"),
        }
    }
}
