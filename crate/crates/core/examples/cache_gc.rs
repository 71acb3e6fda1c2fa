//! Shrinks the Rademacher term cache to a byte budget, least recently used
//! files first.
//!
//! ```text
//! cargo run --example cache_gc -- mf-cache 1000000
//! ```

use mf_core::cache::TermCache;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let root = args.first().map_or("mf-cache", String::as_str);
    let max_bytes: u64 = args.get(1).map_or(Ok(0), |s| s.parse())?;
    let report = TermCache::new(root).gc(max_bytes)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
