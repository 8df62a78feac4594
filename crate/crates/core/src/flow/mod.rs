//! Flow-network backend: network construction, exact min-cost flow with lower
//! bounds, flow ↔ matching conversion, crucial vector and choice function.

mod mcmf;
mod network;

pub use mcmf::{solve_bounded, BoundedArc, FlowValue, ResidualGraph};
pub use network::{
    build_network, min_cost_max_flow, rank_cost, signature_cost, EdgeRole, FlowAssignment,
    FlowEdge, FlowNetwork,
};

use crate::error::{Error, Result};
use crate::graph::{build_graph, RankedReservationGraph, SeatMatching};
use crate::model::{ChoiceResult, Instance, Ratio, Signature, StudentIdx, TargetVector, TypeRef};
use crate::search::{max_min_ratio, CrucialVector};

/// Value `F*` and cost `C*` of a min-cost maximum flow of the unconstrained network.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct OptimalityCertificate {
    pub max_value: usize,
    pub min_cost: i128,
}

/// Network plus its certificate, computed once and reused for every
/// validity query on the same instance.
#[derive(Clone, Debug)]
pub struct FlowSolver {
    network: FlowNetwork,
    optimum: FlowAssignment,
    certificate: OptimalityCertificate,
}

impl FlowSolver {
    pub fn new(network: FlowNetwork) -> Result<Self> {
        let optimum = min_cost_max_flow(&network, false)?.expect("unconstrained flow exists");
        let certificate = OptimalityCertificate {
            max_value: optimum.value,
            min_cost: optimum.cost,
        };
        Ok(FlowSolver { network, optimum, certificate })
    }

    pub fn for_instance(instance: &Instance) -> Result<Self> {
        FlowSolver::new(build_network(instance)?)
    }

    pub fn network(&self) -> &FlowNetwork {
        &self.network
    }

    pub fn certificate(&self) -> OptimalityCertificate {
        self.certificate
    }

    /// A min-cost maximum flow of the unconstrained network.
    pub fn optimum(&self) -> &FlowAssignment {
        &self.optimum
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        (0..self.network.num_groups())
            .map(|g| self.network.edges()[self.network.source_edge(g)].capacity)
            .collect()
    }

    /// A maximal-diversity flow with `lower[g] ≤ f(s, u_g) ≤ upper[g]`, if one exists.
    pub fn check_group_bounds(
        &self,
        lower: &[usize],
        upper: Option<&[usize]>,
    ) -> Result<Option<FlowAssignment>> {
        let sizes = self.group_sizes();
        if lower.len() != sizes.len() {
            return Err(Error::InvalidTargets(format!(
                "{} bounds for {} groups",
                lower.len(),
                sizes.len()
            )));
        }
        for g in 0..sizes.len() {
            let cap = upper.map_or(sizes[g], |u| u[g].min(sizes[g]));
            if lower[g] > cap {
                return Ok(None);
            }
        }
        if lower.iter().sum::<usize>() > self.certificate.max_value {
            return Ok(None);
        }
        let net = self.network.with_group_bounds(lower, upper)?;
        let flow = net.min_cost_flow_of_value(self.certificate.max_value)?;
        Ok(flow.filter(|f| f.cost == self.certificate.min_cost))
    }

    /// Witness flow when the instance is valid for `targets`.
    pub fn check_targets(&self, targets: &[usize]) -> Result<Option<FlowAssignment>> {
        self.check_group_bounds(targets, None)
    }

    /// Max-min ratio and its crucial vector.
    pub fn crucial_vector(&self) -> Result<CrucialVector> {
        max_min_ratio(&self.group_sizes(), |t| Ok(self.check_targets(t)?.is_some()))
    }
}

/// Witness flow when `instance` is valid for `targets`: feasible with lower
/// bounds `δ_u` on the source edges, with value `F*` and cost `C*`.
pub fn check_validity_flow(instance: &Instance, targets: &TargetVector) -> Result<Option<FlowAssignment>> {
    check_targets_len(instance, targets)?;
    FlowSolver::for_instance(instance)?.check_targets(targets.as_slice())
}

/// Max-min selection ratio and crucial vector, by exact search over candidate ratios.
pub fn crucial_vector(instance: &Instance) -> Result<CrucialVector> {
    FlowSolver::for_instance(instance)?.crucial_vector()
}

fn check_targets_len(instance: &Instance, targets: &TargetVector) -> Result<()> {
    if targets.len() != instance.num_groups() {
        return Err(Error::InvalidTargets(format!(
            "{} targets for {} groups",
            targets.len(),
            instance.num_groups()
        )));
    }
    Ok(())
}

/// Balanced choice on the flow network. Starts from the top `δ*_u` of every
/// group and admits the remaining students in priority order whenever a
/// maximal-diversity flow covers the enlarged selection.
pub fn choice_flow(instance: &Instance, crucial: &CrucialVector) -> Result<ChoiceResult> {
    let solver = FlowSolver::for_instance(instance)?;
    choice_flow_with(instance, &solver, crucial)
}

/// [`choice_flow`] reusing a prepared solver.
pub fn choice_flow_with(
    instance: &Instance,
    solver: &FlowSolver,
    crucial: &CrucialVector,
) -> Result<ChoiceResult> {
    let delta = &crucial.targets;
    check_targets_len(instance, delta)?;
    let Some(mut witness) = solver.check_targets(delta.as_slice())? else {
        return Err(Error::Precondition(
            "instance is not valid for the given crucial vector".into(),
        ));
    };
    let groups = instance.groups();
    let mut counts: Vec<usize> = delta.as_slice().to_vec();
    let mut selected = vec![false; instance.num_students()];
    for (g, group) in groups.iter().enumerate() {
        for &s in &group.members[..counts[g]] {
            selected[s] = true;
        }
    }
    let goal = instance.num_students().min(instance.capacity());
    let mut total: usize = counts.iter().sum();
    let mut closed = vec![false; groups.len()];
    for &s in instance.priority() {
        if total >= goal {
            break;
        }
        let g = instance.group_of(s);
        if selected[s] || closed[g] {
            continue;
        }
        counts[g] += 1;
        match solver.check_targets(&counts)? {
            Some(flow) => {
                selected[s] = true;
                total += 1;
                witness = flow;
            }
            None => {
                // validity is monotone: later members of this group fail too
                counts[g] -= 1;
                closed[g] = true;
            }
        }
    }
    let selected: Vec<StudentIdx> = instance.priority().iter().copied().filter(|&s| selected[s]).collect();
    Ok(ChoiceResult {
        per_group_counts: instance.group_counts(&selected),
        signature: witness.signature(solver.network()),
        selected,
        alpha: crucial.alpha,
        targets: crucial.targets.clone(),
    })
}

/// Splits a flow into a seat matching. Within each group the highest-priority
/// members take the seats; seat classes and seats are filled in index order.
pub fn flow_to_matching(
    instance: &Instance,
    network: &FlowNetwork,
    flow: &FlowAssignment,
) -> Result<SeatMatching> {
    let graph = build_graph(instance);
    flow_to_matching_on(instance, &graph, network, flow)
}

pub fn flow_to_matching_on(
    instance: &Instance,
    graph: &RankedReservationGraph,
    network: &FlowNetwork,
    flow: &FlowAssignment,
) -> Result<SeatMatching> {
    flow.check(network)?;
    if network.num_groups() != instance.num_groups() {
        return Err(Error::FlowConservation("flow belongs to another instance".into()));
    }
    let classes = graph.classes();
    let class_of = |ty: TypeRef, rank: usize| classes.iter().position(|c| c.seat_type == ty && c.rank == rank);
    // per group, the number of seats to take in each class
    let mut take = vec![vec![0usize; classes.len()]; instance.num_groups()];
    for ty in instance.type_refs() {
        let mut rank_left: Vec<(usize, usize)> = (1..=instance.max_rank())
            .map(|rank| (rank, flow.flow_on(network, EdgeRole::TypeRank(ty, rank))))
            .filter(|&(_, f)| f > 0)
            .collect();
        let mut cursor = 0;
        for g in 0..instance.num_groups() {
            let mut need = flow.flow_on(network, EdgeRole::GroupType(g, ty));
            while need > 0 {
                let Some(&mut (rank, ref mut left)) = rank_left.get_mut(cursor) else {
                    return Err(Error::FlowConservation(format!(
                        "type `{}` receives more flow than it forwards",
                        instance.type_label(ty)
                    )));
                };
                let n = need.min(*left);
                let c = class_of(ty, rank).ok_or_else(|| {
                    Error::FlowConservation(format!("flow on an empty seat class at rank {rank}"))
                })?;
                take[g][c] += n;
                need -= n;
                *left -= n;
                if *left == 0 {
                    cursor += 1;
                }
            }
        }
    }
    let mut pairs = Vec::new();
    let mut next_seat: Vec<usize> = classes.iter().map(|c| c.seats.start).collect();
    for (g, group) in instance.groups().iter().enumerate() {
        let mut members = group.members.iter();
        for (c, &n) in take[g].iter().enumerate() {
            for _ in 0..n {
                let s = *members.next().ok_or_else(|| {
                    Error::FlowConservation(format!("group `{}` is over-assigned", instance.group_label(g)))
                })?;
                pairs.push((s, next_seat[c]));
                next_seat[c] += 1;
            }
        }
    }
    SeatMatching::from_pairs(graph, &pairs)
        .map_err(|e| Error::FlowConservation(format!("decomposition failed: {e}")))
}

/// The flow induced by a matching: `f(s,u) = |M_u|`, `f(u,t) = |M_{u,t}|`,
/// `f(t,t^i) = f(t^i,Q) = |M_t^i|`, `f(Q,sink) = |M|`.
pub fn matching_to_flow(instance: &Instance, matching: &SeatMatching) -> Result<FlowAssignment> {
    let network = build_network(instance)?;
    let graph = build_graph(instance);
    matching.validate(&graph)?;
    let mut flows = vec![0usize; network.edges().len()];
    for (s, v) in matching.pairs() {
        let g = instance.group_of(s);
        let seat = graph.seat(v);
        for role in [
            EdgeRole::SourceGroup(g),
            EdgeRole::GroupType(g, seat.seat_type),
            EdgeRole::TypeRank(seat.seat_type, seat.rank),
            EdgeRole::RankCapacity(seat.seat_type, seat.rank),
            EdgeRole::CapacitySink,
        ] {
            let e = network
                .find_edge(role)
                .ok_or_else(|| Error::Invariant(format!("missing edge {role:?}")))?;
            flows[e] += 1;
        }
    }
    let cost = network
        .edges()
        .iter()
        .zip(&flows)
        .map(|(e, &f)| e.cost * f as i128)
        .sum();
    let flow = FlowAssignment { flows, value: matching.size(), cost };
    flow.check(&network)?;
    Ok(flow)
}

/// A rank-maximal matching, decomposed from a min-cost maximum flow.
pub fn rank_maximal_from_flow(instance: &Instance, graph: &RankedReservationGraph) -> Result<(SeatMatching, Signature)> {
    let solver = FlowSolver::for_instance(instance)?;
    let m = flow_to_matching_on(instance, graph, solver.network(), solver.optimum())?;
    let sig = m.signature(graph);
    Ok((m, sig))
}

/// Smallest candidate ratio strictly above `alpha`, if any.
pub fn next_candidate_ratio(sizes: &[usize], alpha: Ratio) -> Option<Ratio> {
    sizes
        .iter()
        .filter(|&&n| n > 0)
        .filter_map(|&n| {
            let k = alpha.floor_mul(n) + 1;
            (k <= n).then(|| Ratio::new(k as i64, n as i64).expect("n > 0"))
        })
        .min()
}
