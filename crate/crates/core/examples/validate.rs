//! Validity queries: can a maximal-diversity matching meet given group targets?

use reserve_match::flow::check_validity_flow;
use reserve_match::graph::check_validity_graph;
use reserve_match::{fixtures, TargetVector};

fn main() -> reserve_match::Result<()> {
    let inst = fixtures::four_groups();
    for per_group in [[25, 25, 25, 25], [50, 25, 0, 25], [30, 25, 25, 25]] {
        let targets = TargetVector::new(&inst, per_group.to_vec())?;
        let flow = check_validity_flow(&inst, &targets)?.is_some();
        let graph = check_validity_graph(&inst, &targets)?.is_some();
        assert_eq!(flow, graph);
        println!("{:?}: {}", targets.keyed(&inst), if flow { "VALID" } else { "NO-INSTANCE" });
    }
    Ok(())
}
