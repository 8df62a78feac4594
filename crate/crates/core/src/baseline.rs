//! Sequential reserve filling, the comparison point that ignores balance.
//!
//! Rank-1 typed quotas are reserved seats; the rest of the capacity is open.
//! Students are processed in priority order: each takes a free reserved seat
//! of one of its types, else an open seat. Reserved seats still empty after
//! the pass become open and are filled by the next students in priority order.

use crate::model::{min_selection_ratio, ChoiceResult, Instance, Signature, TargetVector, TypeRef};

/// Seat assignment of the sequential baseline. The reported `alpha` is the
/// minimum selection ratio the baseline happens to achieve.
pub fn sequential_baseline(instance: &Instance) -> ChoiceResult {
    let q = instance.capacity();
    let r = instance.max_rank();
    let mut reserved: Vec<usize> = (0..instance.num_types())
        .map(|t| instance.quota(TypeRef::Typed(t), 1))
        .collect();
    let mut open = q.saturating_sub(reserved.iter().sum());
    let mut taken = vec![false; instance.num_students()];
    let mut signature = Signature::zeros(r);
    let mut total = 0;

    for &s in instance.priority() {
        if total == q {
            break;
        }
        if let Some(&t) = instance.student_types(s).iter().find(|&&t| reserved[t] > 0) {
            reserved[t] -= 1;
            signature.add(1, 1);
        } else if open > 0 {
            open -= 1;
            signature.add(r, 1);
        } else {
            continue;
        }
        taken[s] = true;
        total += 1;
    }
    let mut reverted = reserved.iter().sum::<usize>() + open;
    for &s in instance.priority() {
        if total == q || reverted == 0 {
            break;
        }
        if !taken[s] {
            taken[s] = true;
            total += 1;
            reverted -= 1;
            signature.add(r, 1);
        }
    }

    let selected: Vec<_> = instance.priority().iter().copied().filter(|&s| taken[s]).collect();
    let per_group_counts = instance.group_counts(&selected);
    let alpha = min_selection_ratio(instance, &per_group_counts);
    ChoiceResult {
        targets: TargetVector::at_ratio(instance, alpha),
        selected,
        per_group_counts,
        signature,
        alpha,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{Quota, StudentRecord};

    #[test]
    fn four_groups_is_imbalanced() {
        let inst = fixtures::four_groups();
        let res = sequential_baseline(&inst);
        let keyed = inst.keyed(&res.per_group_counts);
        assert_eq!(keyed["none"], 50);
        assert_eq!(keyed["t1"], 25);
        assert_eq!(keyed["t2"], 25);
        assert_eq!(keyed["t1+t2"], 0);
        assert_eq!(res.selected.len(), 100);
        assert_eq!(res.signature.as_slice(), &[50, 50]);
    }

    #[test]
    fn unfilled_reserves_revert() {
        // two t-seats reserved but only one t student; capacity 3
        let students = vec![
            StudentRecord::new("a", &[]),
            StudentRecord::new("b", &[]),
            StudentRecord::new("c", &[]),
            StudentRecord::new("d", &["t"]),
        ];
        let prio = ["a", "b", "c", "d"].map(String::from).to_vec();
        let inst = Instance::new(3, 2, vec!["t".into()], vec![Quota::new("t", 1, 2)], students, prio).unwrap();
        let res = sequential_baseline(&inst);
        let ids: Vec<_> = res.selected_ids(&inst);
        assert_eq!(ids, ["a", "b", "d"]);
    }

    #[test]
    fn capacity_zero_and_empty() {
        let inst = Instance::new(0, 1, vec![], vec![], vec![StudentRecord::new("a", &[])], vec!["a".into()]).unwrap();
        assert!(sequential_baseline(&inst).selected.is_empty());
        let empty = Instance::new(3, 1, vec![], vec![], vec![], vec![]).unwrap();
        assert!(sequential_baseline(&empty).selected.is_empty());
    }
}
