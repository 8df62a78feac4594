//! Ranked reservation graph backend: validity checking and the balanced
//! choice function by matching surgery.

mod path;
mod reservation;
mod surgery;

pub use path::{find_alternating_path, AlternatingPath, Endpoint, PathEnd};
pub use reservation::{build_graph, RankedReservationGraph, Seat, SeatClass, SeatIdx, SeatMatching};

use crate::error::{Error, Result};
use crate::flow::{flow_to_matching_on, FlowSolver};
use crate::model::{ChoiceResult, Instance, Signature, StudentIdx, TargetVector};
use crate::search::{max_min_ratio, CrucialVector};
use surgery::{Policy, Surgery};

/// A rank-maximal matching of size `min(|S|, q)`, decomposed from a min-cost
/// maximum flow.
pub fn rank_maximal_matching(instance: &Instance, graph: &RankedReservationGraph) -> Result<SeatMatching> {
    let solver = FlowSolver::for_instance(instance)?;
    flow_to_matching_on(instance, graph, solver.network(), solver.optimum())
}

/// Shared state of the graph pipeline: the graph, a rank-maximal seed and its signature.
#[derive(Clone, Debug)]
pub struct GraphContext<'a> {
    pub instance: &'a Instance,
    pub graph: RankedReservationGraph,
    pub seed: SeatMatching,
    pub signature: Signature,
}

impl<'a> GraphContext<'a> {
    pub fn new(instance: &'a Instance) -> Result<Self> {
        let graph = build_graph(instance);
        let seed = rank_maximal_matching(instance, &graph)?;
        let signature = seed.signature(&graph);
        Ok(GraphContext { instance, graph, seed, signature })
    }

    /// Validity check that starts from the stored rank-maximal seed.
    pub fn check_validity(&self, targets: &[usize]) -> Result<Option<SeatMatching>> {
        validity_from_seed(self.instance, &self.graph, self.seed.clone(), targets)
    }

    /// Max-min ratio by exact search with graph validity checks, plus the
    /// witness matching at the crucial vector.
    pub fn crucial_vector(&self) -> Result<(CrucialVector, SeatMatching)> {
        let crucial = max_min_ratio(&self.instance.group_sizes(), |t| Ok(self.check_validity(t)?.is_some()))?;
        let witness = self
            .check_validity(crucial.targets.as_slice())?
            .ok_or_else(|| Error::Invariant("crucial vector is not valid".into()))?;
        Ok((crucial, witness))
    }
}

/// Checks validity for `targets` on the graph. Returns a rank-maximal
/// matching meeting every target, or `None` for a no-instance.
pub fn check_validity_graph(instance: &Instance, targets: &TargetVector) -> Result<Option<SeatMatching>> {
    if targets.len() != instance.num_groups() {
        return Err(Error::InvalidTargets(format!(
            "{} targets for {} groups",
            targets.len(),
            instance.num_groups()
        )));
    }
    GraphContext::new(instance)?.check_validity(targets.as_slice())
}

fn validity_from_seed(
    instance: &Instance,
    graph: &RankedReservationGraph,
    seed: SeatMatching,
    targets: &[usize],
) -> Result<Option<SeatMatching>> {
    let groups = instance.groups();
    if targets.len() != groups.len() {
        return Err(Error::InvalidTargets(format!("{} targets for {} groups", targets.len(), groups.len())));
    }
    if targets.iter().zip(groups).any(|(&d, g)| d > g.size()) || targets.iter().sum::<usize>() > seed.size() {
        return Ok(None);
    }
    // S̃: the top min(δ_u, |M_u|) matched students of every group
    let mut protected = vec![false; instance.num_students()];
    let mut protected_count = vec![0; groups.len()];
    for (g, group) in groups.iter().enumerate() {
        for &s in group.members.iter().filter(|&&s| seed.is_matched(s)).take(targets[g]) {
            protected[s] = true;
            protected_count[g] += 1;
        }
    }
    let mut surgery = Surgery::new(instance, graph, seed);
    for (g, group) in groups.iter().enumerate() {
        // matched members of a group below its target are all protected, so
        // the scan for the next unmatched member never has to restart
        let mut cursor = 0;
        while surgery.matched_in(g) < targets[g] {
            while surgery.is_matched(group.members[cursor]) {
                cursor += 1;
            }
            let s = group.members[cursor];
            let policy = Policy {
                protected: &protected,
                protected_count: &protected_count,
                may_shrink: &|_| true,
            };
            if surgery.try_admit(s, &policy)?.is_none() {
                return Ok(None);
            }
            protected[s] = true;
            protected_count[g] += 1;
        }
    }
    Ok(Some(surgery.into_matching()))
}

/// Balanced choice by matching surgery.
///
/// `seed` must be rank-maximal, of size `min(|S|, q)` and meet `crucial`.
/// Within each group its seats are first handed to the top-priority members.
/// Students are then visited in priority order: matched ones are kept, an
/// unmatched one is admitted when it can replace an unselected student whose
/// group stays at or above its target (or a lower member of its own group).
pub fn choice_graph(instance: &Instance, crucial: &CrucialVector, seed: &SeatMatching) -> Result<ChoiceResult> {
    let ctx = GraphContext::new(instance)?;
    choice_graph_on(&ctx, crucial, seed)
}

pub fn choice_graph_on(ctx: &GraphContext, crucial: &CrucialVector, seed: &SeatMatching) -> Result<ChoiceResult> {
    let instance = ctx.instance;
    let graph = &ctx.graph;
    let delta = crucial.targets.as_slice();
    if delta.len() != instance.num_groups() {
        return Err(Error::InvalidTargets(format!(
            "{} targets for {} groups",
            delta.len(),
            instance.num_groups()
        )));
    }
    seed.validate(graph).map_err(|e| Error::Precondition(format!("seed is not a matching: {e}")))?;
    let goal = instance.num_students().min(instance.capacity());
    if seed.size() != goal {
        return Err(Error::Precondition(format!("seed has size {}, expected {goal}", seed.size())));
    }
    if seed.signature(graph) != ctx.signature {
        return Err(Error::Precondition("seed is not rank-maximal".into()));
    }
    if !crucial.targets.met_by(&seed.group_counts(instance)) {
        return Err(Error::Precondition("seed does not meet the crucial vector".into()));
    }
    let mut seed = seed.clone();
    seed.normalize_to_priority_prefixes(instance);

    let groups = instance.groups();
    let mut surgery = Surgery::new(instance, graph, seed);
    let mut in_star = vec![false; instance.num_students()];
    let mut star_count = vec![0usize; groups.len()];
    let mut total = 0;
    let mut closed = vec![false; groups.len()];
    for &s in instance.priority() {
        if total == goal {
            break;
        }
        let gs = instance.group_of(s);
        if !surgery.is_matched(s) {
            if closed[gs] {
                continue;
            }
            let counts = surgery.group_counts();
            let may_shrink = |g: usize| g == gs || counts[g] > delta[g];
            let policy = Policy {
                protected: &in_star,
                protected_count: &star_count,
                may_shrink: &may_shrink,
            };
            if surgery.try_admit(s, &policy)?.is_none() {
                closed[gs] = true;
                continue;
            }
        }
        in_star[s] = true;
        star_count[gs] += 1;
        total += 1;
    }
    let selected: Vec<StudentIdx> = instance.priority().iter().copied().filter(|&s| in_star[s]).collect();
    let matching = surgery.into_matching();
    if selected.iter().any(|&s| !matching.is_matched(s)) {
        return Err(Error::Invariant("a selected student lost its seat".into()));
    }
    Ok(ChoiceResult {
        per_group_counts: instance.group_counts(&selected),
        signature: matching.signature(graph),
        selected,
        alpha: crucial.alpha,
        targets: crucial.targets.clone(),
    })
}

/// Full graph pipeline: rank-maximal seed, crucial vector by validity search,
/// then the surgical choice seeded with the validity witness.
pub fn solve_graph(instance: &Instance) -> Result<ChoiceResult> {
    let ctx = GraphContext::new(instance)?;
    let (crucial, witness) = ctx.crucial_vector()?;
    choice_graph_on(&ctx, &crucial, &witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{Ratio, TypeRef};

    fn sid(inst: &Instance, id: &str) -> StudentIdx {
        inst.student_index(id).unwrap()
    }

    #[test]
    fn single_reserve_rank_maximal() {
        let inst = fixtures::single_reserve();
        let g = build_graph(&inst);
        let m = rank_maximal_matching(&inst, &g).unwrap();
        assert_eq!(m.signature(&g).as_slice(), &[1, 1]);
        assert_eq!(m.size(), 2);
    }

    #[test]
    fn empty_instance_matching() {
        let inst = Instance::new(3, 2, vec![], vec![], vec![], vec![]).unwrap();
        let g = build_graph(&inst);
        let m = rank_maximal_matching(&inst, &g).unwrap();
        assert_eq!(m.size(), 0);
        assert_eq!(m.signature(&g).as_slice(), &[0, 0]);
    }

    #[test]
    fn exchange_path_from_s3_to_s1() {
        let inst = fixtures::single_reserve();
        let g = build_graph(&inst);
        // M = {(s1, v¹_{t1,1}), (s2, v²_{t0,1})}
        let general = g.seats().iter().position(|s| s.seat_type == TypeRef::General).unwrap();
        let m = SeatMatching::from_pairs(&g, &[(sid(&inst, "s1"), 0), (sid(&inst, "s2"), general)]).unwrap();
        // s3 has no t1 edge, so it must push s2 onto the t1 seat
        let s1 = sid(&inst, "s1");
        let p = find_alternating_path(&inst, &g, &m, sid(&inst, "s3"), |e| e == Endpoint::Student(s1))
            .unwrap()
            .unwrap();
        p.validate(&g, &m).unwrap();
        assert_eq!(p.end, PathEnd::MatchedStudent(s1));
        let mut m2 = m.clone();
        p.apply(&mut m2);
        m2.validate(&g).unwrap();
        assert!(m2.is_matched(sid(&inst, "s3")));
        assert!(!m2.is_matched(s1));
    }

    #[test]
    fn exchange_path_when_s1_on_general_seat() {
        let inst = fixtures::single_reserve();
        let g = build_graph(&inst);
        let general = g.seats().iter().position(|s| s.seat_type == TypeRef::General).unwrap();
        let m = SeatMatching::from_pairs(&g, &[(sid(&inst, "s2"), 0), (sid(&inst, "s1"), general)]).unwrap();
        let s1 = sid(&inst, "s1");
        let p = find_alternating_path(&inst, &g, &m, sid(&inst, "s3"), |e| e == Endpoint::Student(s1))
            .unwrap()
            .unwrap();
        assert_eq!(p.students, vec![sid(&inst, "s3"), s1]);
        assert_eq!(p.seats, vec![general]);
    }

    #[test]
    fn no_path_without_edges() {
        let inst = Instance::new(
            0,
            1,
            vec![],
            vec![],
            vec![crate::model::StudentRecord::new("a", &[])],
            vec!["a".into()],
        )
        .unwrap();
        let g = build_graph(&inst);
        let m = SeatMatching::empty(&g);
        assert!(find_alternating_path(&inst, &g, &m, 0, |_| true).unwrap().is_none());
    }

    #[test]
    fn single_reserve_validity() {
        let inst = fixtures::single_reserve();
        let t = TargetVector::new(&inst, vec![1, 1]).unwrap();
        let m = check_validity_graph(&inst, &t).unwrap().unwrap();
        let g = build_graph(&inst);
        assert_eq!(m.signature(&g).as_slice(), &[1, 1]);
        assert_eq!(m.group_counts(&inst), vec![1, 1]);
        let t = TargetVector::new(&inst, vec![2, 2]).unwrap();
        assert!(check_validity_graph(&inst, &t).unwrap().is_none());
    }

    #[test]
    fn graph_pipeline_on_fixtures() {
        let ids = |inst: &Instance| {
            let r = solve_graph(inst).unwrap();
            let mut v: Vec<String> = r.selected_ids(inst).into_iter().map(String::from).collect();
            v.sort();
            (v, r.alpha)
        };
        let (sel, alpha) = ids(&fixtures::single_reserve());
        assert_eq!(sel, ["s2", "s4"]);
        assert_eq!(alpha, Ratio::new(1, 2).unwrap());
        assert_eq!(ids(&fixtures::capped_types(false)).0, ["s11", "s12", "s21", "s22"]);
        assert_eq!(ids(&fixtures::capped_types(true)).0, ["s11", "s12", "s13", "s21"]);
    }

    #[test]
    fn single_group_takes_top_q() {
        let students: Vec<_> = (0..6).map(|i| crate::model::StudentRecord::new(format!("x{i}"), &[])).collect();
        let priority = ["x3", "x0", "x5", "x1", "x4", "x2"].map(String::from).to_vec();
        let inst = Instance::new(3, 1, vec![], vec![], students, priority).unwrap();
        let r = solve_graph(&inst).unwrap();
        assert_eq!(r.selected_ids(&inst), ["x3", "x0", "x5"]);
    }

    #[test]
    fn choice_rejects_bad_seed() {
        let inst = fixtures::single_reserve();
        let ctx = GraphContext::new(&inst).unwrap();
        let (crucial, _) = ctx.crucial_vector().unwrap();
        let empty = SeatMatching::empty(&ctx.graph);
        assert!(matches!(choice_graph_on(&ctx, &crucial, &empty), Err(Error::Precondition(_))));
    }
}
