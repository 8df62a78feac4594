//! Brute-force enumeration of every rank-maximal outcome of a small instance.

use reserve_match::fixtures;
use reserve_match::model::min_selection_ratio;
use reserve_match::oracle::{enumerate_maximal_diversity_matchings, oracle_choice_from};

fn main() -> reserve_match::Result<()> {
    let inst = fixtures::capped_types(true);
    let md = enumerate_maximal_diversity_matchings(&inst)?;
    println!("best signature {}", md.best);
    for o in &md.outcomes {
        println!("  {:?} min ratio {}", inst.keyed(&o.counts), min_selection_ratio(&inst, &o.counts));
    }
    let chosen: Vec<&str> = oracle_choice_from(&inst, &md).iter().map(|&s| inst.student_id(s)).collect();
    println!("alpha {}, choice {chosen:?}", md.max_min_ratio(&inst));
    Ok(())
}
