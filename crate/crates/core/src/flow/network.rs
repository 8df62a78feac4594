use crate::error::{Error, Result};
use crate::model::{GroupKey, Instance, Signature, TypeRef};

use super::mcmf::{solve_bounded, BoundedArc, FlowValue};

/// What an edge of the network stands for.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EdgeRole {
    /// source → group `g`
    SourceGroup(usize),
    /// group `g` → type node
    GroupType(usize, TypeRef),
    /// type node → its rank node
    TypeRank(TypeRef, usize),
    /// rank node → capacity node `Q`
    RankCapacity(TypeRef, usize),
    /// `Q` → sink
    CapacitySink,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FlowEdge {
    pub from: usize,
    pub to: usize,
    pub lower: usize,
    pub capacity: usize,
    pub cost: i128,
    pub role: EdgeRole,
}

/// Four-layer network: source, group nodes, type nodes (declared types and
/// the general type), rank nodes `t^i`, the capacity node `Q`, sink.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    edges: Vec<FlowEdge>,
    num_groups: usize,
    num_types: usize,
    max_rank: usize,
    capacity: usize,
    group_keys: Vec<GroupKey>,
}

/// Cost of a rank-`rank` seat: `(q+1)^(r-1) - (q+1)^(r-rank)`.
///
/// Minimizing the total over a fixed number of seats orders signatures
/// lexicographically because no rank can hold more than `q` seats.
pub fn rank_cost(capacity: usize, max_rank: usize, rank: usize) -> Result<i128> {
    let base = capacity as i128 + 1;
    let top = checked_pow(base, max_rank - 1)?;
    Ok(top - checked_pow(base, max_rank - rank)?)
}

fn checked_pow(base: i128, exp: usize) -> Result<i128> {
    let exp = u32::try_from(exp).map_err(|_| Error::CostOverflow)?;
    base.checked_pow(exp).ok_or(Error::CostOverflow)
}

/// Encoded cost of a signature: the sum of its seats' rank costs.
pub fn signature_cost(capacity: usize, sig: &Signature) -> Result<i128> {
    let r = sig.max_rank();
    let mut total = 0i128;
    for rank in 1..=r {
        let c = rank_cost(capacity, r, rank)?
            .checked_mul(sig.at(rank) as i128)
            .ok_or(Error::CostOverflow)?;
        total = total.checked_add(c).ok_or(Error::CostOverflow)?;
    }
    Ok(total)
}

/// Builds the network for an instance.
pub fn build_network(instance: &Instance) -> Result<FlowNetwork> {
    let keys: Vec<GroupKey> = instance.groups().iter().map(|g| g.key.clone()).collect();
    FlowNetwork::from_parts(
        &keys,
        &instance.group_sizes(),
        instance.num_types(),
        instance.capacity(),
        instance.max_rank(),
        |ty, rank| instance.quota(ty, rank),
    )
}

impl FlowNetwork {
    /// Builds the network from group keys and sizes only; the student list is
    /// never consulted.
    pub fn from_parts(
        group_keys: &[GroupKey],
        group_sizes: &[usize],
        num_types: usize,
        capacity: usize,
        max_rank: usize,
        quota: impl Fn(TypeRef, usize) -> usize,
    ) -> Result<FlowNetwork> {
        if group_keys.len() != group_sizes.len() {
            return Err(Error::InvalidNetwork("group keys and sizes differ in length".into()));
        }
        let mut net = FlowNetwork {
            edges: Vec::new(),
            num_groups: group_keys.len(),
            num_types,
            max_rank,
            capacity,
            group_keys: group_keys.to_vec(),
        };
        let mut push = |from, to, capacity, cost, role| {
            net.edges.push(FlowEdge { from, to, lower: 0, capacity, cost, role });
        };
        for (g, &size) in group_sizes.iter().enumerate() {
            push(0, 1 + g, size, 0, EdgeRole::SourceGroup(g));
        }
        let type_refs: Vec<TypeRef> = (0..num_types)
            .map(TypeRef::Typed)
            .chain(std::iter::once(TypeRef::General))
            .collect();
        for (g, key) in group_keys.iter().enumerate() {
            for &ty in &type_refs {
                if key.admits(ty) {
                    let to = net_type_node(group_keys.len(), num_types, ty);
                    push(1 + g, to, group_sizes[g], 0, EdgeRole::GroupType(g, ty));
                }
            }
        }
        let q_node = 1 + group_keys.len() + (num_types + 1) * (max_rank + 1);
        for &ty in &type_refs {
            let tn = net_type_node(group_keys.len(), num_types, ty);
            for rank in 1..=max_rank {
                let rn = net_rank_node(group_keys.len(), num_types, max_rank, ty, rank);
                let cap = quota(ty, rank);
                let cost = rank_cost(capacity, max_rank, rank)?;
                push(tn, rn, cap, cost, EdgeRole::TypeRank(ty, rank));
                push(rn, q_node, cap, 0, EdgeRole::RankCapacity(ty, rank));
            }
        }
        push(q_node, q_node + 1, capacity, 0, EdgeRole::CapacitySink);
        Ok(net)
    }

    pub fn edges(&self) -> &[FlowEdge] {
        &self.edges
    }

    pub fn num_nodes(&self) -> usize {
        self.sink() + 1
    }

    pub fn source(&self) -> usize {
        0
    }

    pub fn sink(&self) -> usize {
        self.capacity_node() + 1
    }

    pub fn group_node(&self, g: usize) -> usize {
        1 + g
    }

    pub fn type_node(&self, ty: TypeRef) -> usize {
        net_type_node(self.num_groups, self.num_types, ty)
    }

    pub fn rank_node(&self, ty: TypeRef, rank: usize) -> usize {
        net_rank_node(self.num_groups, self.num_types, self.max_rank, ty, rank)
    }

    pub fn capacity_node(&self) -> usize {
        1 + self.num_groups + (self.num_types + 1) * (self.max_rank + 1)
    }

    pub fn num_groups(&self) -> usize {
        self.num_groups
    }

    pub fn num_types(&self) -> usize {
        self.num_types
    }

    pub fn max_rank(&self) -> usize {
        self.max_rank
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn group_keys(&self) -> &[GroupKey] {
        &self.group_keys
    }

    pub fn find_edge(&self, role: EdgeRole) -> Option<usize> {
        self.edges.iter().position(|e| e.role == role)
    }

    /// Index of the source edge of group `g` (they come first).
    pub fn source_edge(&self, g: usize) -> usize {
        g
    }

    /// Copy with per-group bounds on the source edges: `lower[g] ≤ f(s, u_g) ≤ upper[g]`.
    /// `upper` entries are clamped to the group size.
    pub fn with_group_bounds(&self, lower: &[usize], upper: Option<&[usize]>) -> Result<FlowNetwork> {
        if lower.len() != self.num_groups || upper.is_some_and(|u| u.len() != self.num_groups) {
            return Err(Error::InvalidTargets(format!(
                "bounds must cover exactly {} groups",
                self.num_groups
            )));
        }
        let mut net = self.clone();
        for g in 0..self.num_groups {
            let e = &mut net.edges[g];
            if let Some(upper) = upper {
                e.capacity = e.capacity.min(upper[g]);
            }
            e.lower = lower[g];
        }
        Ok(net)
    }

    pub fn has_lower_bounds(&self) -> bool {
        self.edges.iter().any(|e| e.lower > 0)
    }

    fn bounded_arcs(&self, respect_lower: bool) -> Result<Vec<BoundedArc>> {
        self.edges
            .iter()
            .map(|e| {
                let lower = if respect_lower { e.lower } else { 0 };
                Ok(BoundedArc {
                    from: e.from,
                    to: e.to,
                    lower: to_i64(lower)?,
                    upper: to_i64(e.capacity)?,
                    cost: e.cost,
                })
            })
            .collect()
    }

    /// Min-cost flow of exactly `value` units that meets the lower bounds.
    pub fn min_cost_flow_of_value(&self, value: usize) -> Result<Option<FlowAssignment>> {
        let arcs = self.bounded_arcs(true)?;
        let sol = solve_bounded(
            self.num_nodes(),
            &arcs,
            self.source(),
            self.sink(),
            FlowValue::Exactly(to_i64(value)?),
        )?;
        Ok(sol.map(|(flows, cost)| self.assignment(flows, cost)))
    }

    fn assignment(&self, flows: Vec<i64>, cost: i128) -> FlowAssignment {
        let flows: Vec<usize> = flows.into_iter().map(|f| f as usize).collect();
        let value = (0..self.num_groups).map(|g| flows[g]).sum();
        FlowAssignment { flows, value, cost }
    }
}

fn to_i64(x: usize) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::InvalidNetwork(format!("capacity {x} too large")))
}

fn net_type_node(num_groups: usize, num_types: usize, ty: TypeRef) -> usize {
    1 + num_groups
        + match ty {
            TypeRef::Typed(t) => t,
            TypeRef::General => num_types,
        }
}

fn net_rank_node(num_groups: usize, num_types: usize, max_rank: usize, ty: TypeRef, rank: usize) -> usize {
    let t = match ty {
        TypeRef::Typed(t) => t,
        TypeRef::General => num_types,
    };
    1 + num_groups + (num_types + 1) + t * max_rank + (rank - 1)
}

/// Integral flow on a [`FlowNetwork`], one value per edge.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FlowAssignment {
    pub flows: Vec<usize>,
    pub value: usize,
    pub cost: i128,
}

impl FlowAssignment {
    /// Flow leaving the source towards each group.
    pub fn group_counts(&self, network: &FlowNetwork) -> Vec<usize> {
        (0..network.num_groups()).map(|g| self.flows[network.source_edge(g)]).collect()
    }

    /// Per-rank flow through the type → rank edges.
    pub fn signature(&self, network: &FlowNetwork) -> Signature {
        let mut sig = Signature::zeros(network.max_rank());
        for (e, &f) in network.edges().iter().zip(&self.flows) {
            if let EdgeRole::TypeRank(_, rank) = e.role {
                sig.add(rank, f);
            }
        }
        sig
    }

    pub fn flow_on(&self, network: &FlowNetwork, role: EdgeRole) -> usize {
        network.find_edge(role).map_or(0, |e| self.flows[e])
    }

    /// Checks bounds, capacities, conservation, and the stored value and cost.
    pub fn check(&self, network: &FlowNetwork) -> Result<()> {
        if self.flows.len() != network.edges().len() {
            return Err(Error::FlowConservation("flow does not match the network".into()));
        }
        let mut balance = vec![0i128; network.num_nodes()];
        let mut cost = 0i128;
        for (e, &f) in network.edges().iter().zip(&self.flows) {
            if f > e.capacity {
                return Err(Error::FlowConservation(format!(
                    "flow {f} exceeds capacity {} on {:?}",
                    e.capacity, e.role
                )));
            }
            balance[e.from] -= f as i128;
            balance[e.to] += f as i128;
            cost += e.cost * f as i128;
        }
        for (v, &b) in balance.iter().enumerate() {
            if v != network.source() && v != network.sink() && b != 0 {
                return Err(Error::FlowConservation(format!("node {v} has imbalance {b}")));
            }
        }
        if balance[network.sink()] != self.value as i128 {
            return Err(Error::FlowConservation("stored value is wrong".into()));
        }
        if cost != self.cost {
            return Err(Error::FlowConservation("stored cost is wrong".into()));
        }
        Ok(())
    }

    /// Whether every lower bound of `network` is met.
    pub fn meets_lower_bounds(&self, network: &FlowNetwork) -> bool {
        network.edges().iter().zip(&self.flows).all(|(e, &f)| f >= e.lower)
    }
}

/// Maximum value at minimum cost. With `respect_lower_bounds`, the maximum is
/// taken over flows meeting all lower bounds; `None` means no such flow.
pub fn min_cost_max_flow(network: &FlowNetwork, respect_lower_bounds: bool) -> Result<Option<FlowAssignment>> {
    let unconstrained = max_value_flow(network)?;
    if !respect_lower_bounds || !network.has_lower_bounds() {
        return Ok(Some(unconstrained));
    }
    let arcs = network.bounded_arcs(true)?;
    let Some((flows, _)) = solve_bounded(network.num_nodes(), &arcs, network.source(), network.sink(), FlowValue::Any)? else {
        return Ok(None);
    };
    let feasible = (0..network.num_groups()).map(|g| flows[network.source_edge(g)] as usize).sum::<usize>();
    // feasible values form an interval; search its upper end
    let (mut lo, mut hi) = (feasible, unconstrained.value);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if network.min_cost_flow_of_value(mid)?.is_some() {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    network.min_cost_flow_of_value(lo)
}

/// Min-cost maximum flow ignoring lower bounds, by plain successive shortest paths.
fn max_value_flow(network: &FlowNetwork) -> Result<FlowAssignment> {
    use super::mcmf::ResidualGraph;
    let mut g = ResidualGraph::new(network.num_nodes());
    let ids: Vec<_> = network
        .edges()
        .iter()
        .map(|e| Ok(g.add_arc(e.from, e.to, to_i64(e.capacity)?, e.cost)))
        .collect::<Result<_>>()?;
    let (_, cost) = g.min_cost_flow(network.source(), network.sink(), i64::MAX)?;
    let flows = ids.iter().map(|&id| g.flow(id)).collect();
    Ok(network.assignment(flows, cost))
}
