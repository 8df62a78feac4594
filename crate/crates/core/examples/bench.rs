//! Small timing table for both backends.

use std::time::Duration;

use reserve_match::bench::{render_tsv, run_bench, BenchConfig};

fn main() -> reserve_match::Result<()> {
    let config = BenchConfig {
        sizes: vec![1_000, 10_000],
        min_time: Duration::from_millis(50),
        ..BenchConfig::default()
    };
    print!("{}", render_tsv(&run_bench(&config)?));
    Ok(())
}
