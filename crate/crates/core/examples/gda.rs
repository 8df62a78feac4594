//! Deferred acceptance over two schools, then a substitutability probe.

use reserve_match::fixtures;
use reserve_match::gda::{run_gda, substitutability_probe};

fn main() -> reserve_match::Result<()> {
    let multi = fixtures::two_schools();
    let matching = run_gda(&multi)?;
    for r in &matching.rounds {
        let rejected: Vec<&str> = r.rejected.iter().map(|&s| multi.student_id(s)).collect();
        println!("round {}: {} proposals, rejected {rejected:?}", r.number, r.proposals.len());
    }
    for (s, school) in matching.assignment.iter().enumerate() {
        let school = school.map_or("-", |c| multi.schools()[c].id.as_str());
        println!("{} -> {school}", multi.student_id(s));
    }

    // the balanced choice function is not substitutable
    let inst = fixtures::capped_types(true);
    let base = inst.resolve_ids(&["s11", "s12", "s14", "s15", "s21", "s22", "s23"])?;
    let [s13, s16] = ["s13", "s16"].map(|id| inst.student_index(id).expect("fixture id"));
    if let Some(v) = substitutability_probe(&inst, &base, s16, s13)? {
        println!("without {}: {:?}; with {}: {:?}", v.s1, v.without_s1, v.s1, v.with_s1);
    }
    Ok(())
}
