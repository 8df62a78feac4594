//! Balanced selection on the four-student instance with both backends.

use reserve_match::{fixtures, solve, Backend};

fn main() -> reserve_match::Result<()> {
    let inst = fixtures::single_reserve();
    for backend in [Backend::Flow, Backend::Graph] {
        let res = solve(&inst, backend)?;
        println!(
            "{backend}: selected {:?}, alpha {}, signature {}",
            res.selected_ids(&inst),
            res.alpha,
            res.signature
        );
    }
    Ok(())
}
