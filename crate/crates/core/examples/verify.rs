//! Axiom checks for the balanced choice and for a hand-picked rival set.

use reserve_match::fixtures;
use reserve_match::oracle::OracleBudget;
use reserve_match::verify::verify_all;
use reserve_match::{solve, Backend};

fn main() -> reserve_match::Result<()> {
    let inst = fixtures::single_reserve();
    let chosen = solve(&inst, Backend::Flow)?.selected;
    let rival = inst.resolve_ids(&["s1", "s2"])?;
    for (name, set) in [("balanced", chosen), ("rival", rival)] {
        let report = verify_all(&inst, &set, &OracleBudget::default())?;
        println!("{name}:");
        for (axiom, ok) in report.lines() {
            println!("  {} {axiom}", if ok { "PASS" } else { "FAIL" });
        }
    }
    Ok(())
}
