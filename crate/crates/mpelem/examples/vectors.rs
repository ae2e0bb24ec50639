//! Checks the golden vector file of one function against this library.
//!
//! ```text
//! cargo run --release --example vectors -- golden/vectors/log.vec
//! ```

use mpelem::vectors::{check_containment, ResultFile, VectorFile};

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/golden/vectors/atan.vec").into());
    let text = std::fs::read_to_string(&path).expect("reading vector file");
    let v = VectorFile::parse(&text).expect("parsing vector file");
    let results = ResultFile::evaluate(&v);
    // the first few result lines, in the batch output format
    for line in results.to_string().lines().take(4) {
        println!("{}", &line[..line.len().min(120)]);
    }
    let report = check_containment(&v, &results).expect("mismatched files");
    println!("{report}");
}
