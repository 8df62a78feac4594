//! Successive-shortest-path min-cost flow with Dijkstra potentials and a
//! lower-bound elimination wrapper.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const INF_COST: i128 = i128::MAX / 4;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    rev: usize,
    cap: i64,
    cost: i128,
}

/// Residual graph with non-negative arc costs.
#[derive(Clone, Debug)]
pub struct ResidualGraph {
    adj: Vec<Vec<Arc>>,
}

/// Handle to a forward arc: `(node, position in adjacency list)`.
#[derive(Clone, Copy, Debug)]
pub struct ArcId(usize, usize);

impl ResidualGraph {
    pub fn new(nodes: usize) -> Self {
        ResidualGraph {
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: i64, cost: i128) -> ArcId {
        debug_assert!(cap >= 0 && cost >= 0);
        let a = self.adj[from].len();
        let b = self.adj[to].len() + usize::from(from == to);
        self.adj[from].push(Arc { to, rev: b, cap, cost });
        self.adj[to].push(Arc {
            to: from,
            rev: a,
            cap: 0,
            cost: -cost,
        });
        ArcId(from, a)
    }

    /// Flow pushed through a forward arc so far.
    pub fn flow(&self, id: ArcId) -> i64 {
        let arc = &self.adj[id.0][id.1];
        self.adj[arc.to][arc.rev].cap
    }

    /// Pushes up to `limit` units from `s` to `t` along successive cheapest
    /// paths. Returns `(value, cost)`. Each prefix of the run is a min-cost
    /// flow for its value.
    pub fn min_cost_flow(&mut self, s: usize, t: usize, limit: i64) -> Result<(i64, i128)> {
        let n = self.adj.len();
        let mut potential = vec![0i128; n];
        let mut dist = vec![INF_COST; n];
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut value = 0i64;
        let mut cost = 0i128;
        while value < limit {
            dist.fill(INF_COST);
            prev.fill(None);
            dist[s] = 0;
            let mut heap = BinaryHeap::new();
            heap.push(Reverse((0i128, s)));
            while let Some(Reverse((d, v))) = heap.pop() {
                if d > dist[v] {
                    continue;
                }
                for (i, arc) in self.adj[v].iter().enumerate() {
                    if arc.cap == 0 {
                        continue;
                    }
                    let nd = d + arc.cost + potential[v] - potential[arc.to];
                    if nd < dist[arc.to] {
                        dist[arc.to] = nd;
                        prev[arc.to] = Some((v, i));
                        heap.push(Reverse((nd, arc.to)));
                    }
                }
            }
            if dist[t] == INF_COST {
                break;
            }
            for v in 0..n {
                if dist[v] < INF_COST {
                    potential[v] += dist[v];
                }
            }
            let mut push = limit - value;
            let mut v = t;
            while let Some((u, i)) = prev[v] {
                push = push.min(self.adj[u][i].cap);
                v = u;
            }
            let mut v = t;
            while let Some((u, i)) = prev[v] {
                let rev = self.adj[u][i].rev;
                self.adj[u][i].cap -= push;
                self.adj[v][rev].cap += push;
                let step = self.adj[u][i]
                    .cost
                    .checked_mul(push as i128)
                    .ok_or(Error::CostOverflow)?;
                cost = cost.checked_add(step).ok_or(Error::CostOverflow)?;
                v = u;
            }
            value += push;
        }
        Ok((value, cost))
    }
}

/// Arc of a bounded problem: `lower ≤ f ≤ upper`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BoundedArc {
    pub from: usize,
    pub to: usize,
    pub lower: i64,
    pub upper: i64,
    pub cost: i128,
}

/// Value requirement for [`solve_bounded`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FlowValue {
    /// Exactly this many units from source to sink.
    Exactly(i64),
    /// Any value (feasibility only; the cost is minimized over all values).
    Any,
}

/// Min-cost `source → sink` flow meeting all arc bounds, or `None` when no
/// such flow exists. Returns per-arc flows and the total cost.
pub fn solve_bounded(
    nodes: usize,
    arcs: &[BoundedArc],
    source: usize,
    sink: usize,
    value: FlowValue,
) -> Result<Option<(Vec<i64>, i128)>> {
    let super_source = nodes;
    let super_sink = nodes + 1;
    let mut g = ResidualGraph::new(nodes + 2);
    let mut excess = vec![0i64; nodes];
    let mut base_cost = 0i128;
    let mut ids = Vec::with_capacity(arcs.len());
    for a in arcs {
        if a.lower < 0 || a.lower > a.upper {
            return Err(Error::InvalidNetwork(format!(
                "arc {}→{} has bounds [{}, {}]",
                a.from, a.to, a.lower, a.upper
            )));
        }
        ids.push(g.add_arc(a.from, a.to, a.upper - a.lower, a.cost));
        excess[a.to] += a.lower;
        excess[a.from] -= a.lower;
        let c = a.cost.checked_mul(a.lower as i128).ok_or(Error::CostOverflow)?;
        base_cost = base_cost.checked_add(c).ok_or(Error::CostOverflow)?;
    }
    match value {
        FlowValue::Exactly(v) => {
            excess[source] += v;
            excess[sink] -= v;
        }
        FlowValue::Any => {
            let total: i64 = arcs.iter().map(|a| a.upper).sum::<i64>().max(0);
            g.add_arc(sink, source, total, 0);
        }
    }
    let mut demand = 0i64;
    for (v, &e) in excess.iter().enumerate() {
        if e > 0 {
            g.add_arc(super_source, v, e, 0);
            demand += e;
        } else if e < 0 {
            g.add_arc(v, super_sink, -e, 0);
        }
    }
    let (pushed, cost) = g.min_cost_flow(super_source, super_sink, demand)?;
    if pushed < demand {
        return Ok(None);
    }
    let flows = arcs
        .iter()
        .zip(&ids)
        .map(|(a, &id)| a.lower + g.flow(id))
        .collect();
    let total = base_cost.checked_add(cost).ok_or(Error::CostOverflow)?;
    Ok(Some((flows, total)))
}
