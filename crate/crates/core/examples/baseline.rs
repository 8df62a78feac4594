//! Sequential reserve filling next to the balanced choice.

use reserve_match::baseline::sequential_baseline;
use reserve_match::{fixtures, solve, Backend};

fn main() -> reserve_match::Result<()> {
    let inst = fixtures::four_groups();
    let balanced = solve(&inst, Backend::Flow)?;
    let baseline = sequential_baseline(&inst);
    println!("balanced {:?}", inst.keyed(&balanced.per_group_counts));
    println!("baseline {:?}", inst.keyed(&baseline.per_group_counts));
    Ok(())
}
