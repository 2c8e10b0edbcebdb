//! Regenerate the bundled 500-sample LIBSVM dataset:
//!
//! ```text
//! cargo run -p lmls-cli --example gen_dataset > crates/cli/data/synthetic500.svm
//! ```

use std::io::{self, BufWriter};

use lmls_cli::bundled::generate;
use lmls_core::oracles::write_libsvm;

fn main() -> lmls_core::Result<()> {
    let out = BufWriter::new(io::stdout().lock());
    write_libsvm(&generate(), out)
}
