//! Regenerate the shipped fixtures under `crates/core/fixtures/`.
//!
//! ```text
//! cargo run -p zc-evolve --example generate_fixtures [out_dir]
//! ```
//!
//! The generators are seeded and use only exactly-rounded float operations,
//! so the output is byte-identical everywhere; a unit test checks the
//! shipped copy against a fresh run.

use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures"));
    zc_evolve::synthetic::write_fixtures(&out)?;
    println!("fixtures written to {}", out.display());
    Ok(())
}
