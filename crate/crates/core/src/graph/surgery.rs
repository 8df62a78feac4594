//! Signature-preserving exchanges on a rank-maximal matching.
//!
//! The search works on the residual structure of the matching seen from the
//! groups: a node per group, per seat class and one hub `Q` standing for the
//! capacity limit. Arcs:
//!
//! * group `g` → class `c` when `g` may sit in `c` (a student of `g` enters `c`);
//! * class `c` → group `h` when `c` holds a student of `h` (that student leaves `c`);
//! * class `c` → `Q` when `c` has a free seat of rank `k`;
//! * `Q` → class `c` when `c` is an occupied class of rank `k`.
//!
//! A simple path from the newcomer's group to a group `h` moves one student
//! per visited class and finally drops a student of `h`. Passing `Q` at a
//! single rank `k` means one free rank-`k` seat is taken and one rank-`k`
//! seat is released, so the signature never changes.

use std::collections::{BTreeSet, VecDeque};

use super::reservation::{RankedReservationGraph, SeatIdx, SeatMatching};
use crate::error::{Error, Result};
use crate::model::{Instance, Signature, StudentIdx};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Node {
    Group(usize),
    Class(usize),
    Hub,
}

/// Who may be displaced during an exchange.
pub(crate) struct Policy<'p> {
    /// Students that must stay matched.
    pub protected: &'p [bool],
    /// Number of protected students per group.
    pub protected_count: &'p [usize],
    /// Whether group `g` may lose a member.
    pub may_shrink: &'p dyn Fn(usize) -> bool,
}

/// A matching with occupancy indexes for fast exchange searches.
pub(crate) struct Surgery<'a> {
    instance: &'a Instance,
    graph: &'a RankedReservationGraph,
    matching: SeatMatching,
    /// `occ[c][g]`: students of group `g` in class `c`, keyed by priority position.
    occ: Vec<Vec<BTreeSet<(usize, StudentIdx)>>>,
    occupied: Vec<usize>,
    free: Vec<BTreeSet<SeatIdx>>,
    /// matched members of every group, keyed by priority position
    matched: Vec<BTreeSet<(usize, StudentIdx)>>,
    signature: Signature,
    /// per-rank counts of the current matching
    live: Vec<usize>,
}

impl<'a> Surgery<'a> {
    pub fn new(instance: &'a Instance, graph: &'a RankedReservationGraph, matching: SeatMatching) -> Self {
        let num_groups = instance.num_groups();
        let classes = graph.classes();
        let mut s = Surgery {
            instance,
            graph,
            signature: matching.signature(graph),
            live: vec![0; graph.max_rank()],
            occ: vec![vec![BTreeSet::new(); num_groups]; classes.len()],
            occupied: vec![0; classes.len()],
            free: classes.iter().map(|c| c.seats.clone().collect()).collect(),
            matched: vec![BTreeSet::new(); num_groups],
            matching: SeatMatching::empty(graph),
        };
        for (st, v) in matching.pairs() {
            s.assign(st, v);
        }
        s
    }

    pub fn into_matching(self) -> SeatMatching {
        self.matching
    }

    pub fn matched_in(&self, g: usize) -> usize {
        self.matched[g].len()
    }

    pub fn group_counts(&self) -> Vec<usize> {
        self.matched.iter().map(BTreeSet::len).collect()
    }

    pub fn is_matched(&self, s: StudentIdx) -> bool {
        self.matching.is_matched(s)
    }

    fn key(&self, s: StudentIdx) -> (usize, StudentIdx) {
        (self.instance.priority_pos(s), s)
    }

    fn assign(&mut self, s: StudentIdx, v: SeatIdx) {
        let c = self.graph.class_of(v);
        let g = self.instance.group_of(s);
        let key = self.key(s);
        self.matching.assign(s, v);
        self.occ[c][g].insert(key);
        self.occupied[c] += 1;
        self.free[c].remove(&v);
        self.matched[g].insert(key);
        self.live[self.graph.classes()[c].rank - 1] += 1;
    }

    fn unassign(&mut self, s: StudentIdx) -> SeatIdx {
        let v = self.matching.unassign(s).expect("student is matched");
        let c = self.graph.class_of(v);
        let g = self.instance.group_of(s);
        let key = self.key(s);
        self.occ[c][g].remove(&key);
        self.occupied[c] -= 1;
        self.free[c].insert(v);
        self.matched[g].remove(&key);
        self.live[self.graph.classes()[c].rank - 1] -= 1;
        v
    }

    /// Lowest-priority matched member of `g` that is not protected.
    fn victim_in(&self, g: usize, policy: &Policy) -> Option<StudentIdx> {
        self.matched[g]
            .iter()
            .rev()
            .map(|&(_, s)| s)
            .find(|&s| !policy.protected[s])
    }

    fn can_drop_from(&self, g: usize, policy: &Policy) -> bool {
        (policy.may_shrink)(g) && self.matched[g].len() > policy.protected_count[g]
    }

    /// Tries to bring the unmatched student `s` into the matching in exchange
    /// for one unprotected student of a group allowed to shrink. Returns the
    /// displaced student, or `None` when no exchange exists (the matching is
    /// then unchanged).
    pub fn try_admit(&mut self, s: StudentIdx, policy: &Policy) -> Result<Option<StudentIdx>> {
        if self.is_matched(s) {
            return Err(Error::Precondition(format!(
                "`{}` is already matched",
                self.instance.student_id(s)
            )));
        }
        let gs = self.instance.group_of(s);
        if self.can_drop_from(gs, policy) {
            // same group: a direct swap keeps every count
            let v = self.victim_in(gs, policy).expect("unprotected member exists");
            let seat = self.unassign(v);
            self.assign(s, seat);
            self.check_signature()?;
            return Ok(Some(v));
        }
        let mut path = self.search(gs, None, policy);
        if path.is_none() {
            for rank in 1..=self.graph.max_rank() {
                let has_free = self
                    .graph
                    .classes()
                    .iter()
                    .enumerate()
                    .any(|(c, cl)| cl.rank == rank && !self.free[c].is_empty());
                if has_free {
                    path = self.search(gs, Some(rank), policy);
                    if path.is_some() {
                        break;
                    }
                }
            }
        }
        let Some(nodes) = path else {
            return Ok(None);
        };
        let dropped = self.apply(s, &nodes, policy);
        self.check_signature()?;
        Ok(Some(dropped))
    }

    fn check_signature(&self) -> Result<()> {
        if self.live != self.signature.as_slice() {
            return Err(Error::Invariant(format!(
                "exchange changed the signature from {} to {}",
                self.signature,
                Signature::from(self.live.clone())
            )));
        }
        Ok(())
    }

    fn node_index(&self, n: Node) -> usize {
        let g = self.instance.num_groups();
        match n {
            Node::Group(x) => x,
            Node::Class(c) => g + c,
            Node::Hub => g + self.graph.classes().len(),
        }
    }

    /// Shortest simple path from group `start` to a group that can lose an
    /// unprotected member. With `hub_rank = Some(k)` the path may swap a free
    /// rank-`k` seat for an occupied one.
    fn search(&self, start: usize, hub_rank: Option<usize>, policy: &Policy) -> Option<Vec<Node>> {
        let classes = self.graph.classes();
        let num_groups = self.instance.num_groups();
        let mut parent: Vec<Option<Node>> = vec![None; num_groups + classes.len() + 1];
        let mut visited = vec![false; parent.len()];
        visited[self.node_index(Node::Group(start))] = true;
        let mut queue = VecDeque::from([Node::Group(start)]);
        while let Some(node) = queue.pop_front() {
            let mut next = Vec::new();
            match node {
                Node::Group(g) => {
                    next.extend(self.graph.group_classes(g).iter().map(|&c| Node::Class(c)));
                }
                Node::Class(c) => {
                    if hub_rank == Some(classes[c].rank) && !self.free[c].is_empty() {
                        next.push(Node::Hub);
                    }
                    next.extend((0..num_groups).filter(|&h| !self.occ[c][h].is_empty()).map(Node::Group));
                }
                Node::Hub => {
                    let k = hub_rank.expect("hub only reachable with a rank");
                    next.extend(
                        (0..classes.len())
                            .filter(|&c| classes[c].rank == k && self.occupied[c] > 0)
                            .map(Node::Class),
                    );
                }
            }
            for n in next {
                let i = self.node_index(n);
                if visited[i] {
                    continue;
                }
                visited[i] = true;
                parent[i] = Some(node);
                if let Node::Group(h) = n {
                    if self.can_drop_from(h, policy) {
                        let mut path = vec![n];
                        let mut cur = n;
                        while let Some(p) = parent[self.node_index(cur)] {
                            path.push(p);
                            cur = p;
                        }
                        path.reverse();
                        return Some(path);
                    }
                }
                queue.push_back(n);
            }
        }
        None
    }

    /// Carries out a path found by [`Self::search`] for newcomer `s`.
    fn apply(&mut self, s: StudentIdx, nodes: &[Node], policy: &Policy) -> StudentIdx {
        let mut mover = Some(s);
        let last = nodes.len() - 1;
        for i in 1..nodes.len() {
            let Node::Class(c) = nodes[i] else { continue };
            match nodes[i + 1] {
                Node::Hub => {
                    let seat = *self.free[c].iter().next().expect("free seat");
                    self.assign(mover.take().expect("a student enters"), seat);
                }
                Node::Group(h) => {
                    // lowest-priority occupant; for the final group this is the
                    // best candidate to drop
                    let &(_, z) = if i + 1 == last {
                        self.occ[c][h]
                            .iter()
                            .rev()
                            .find(|&&(_, z)| !policy.protected[z])
                            .unwrap_or_else(|| self.occ[c][h].iter().next_back().expect("occupant"))
                    } else {
                        self.occ[c][h].iter().next_back().expect("occupant")
                    };
                    let seat = self.unassign(z);
                    if let Some(m) = mover.take() {
                        self.assign(m, seat);
                    }
                    mover = Some(z);
                }
                Node::Class(_) => unreachable!("classes are never adjacent"),
            }
        }
        let Node::Group(h) = nodes[last] else {
            unreachable!("paths end at a group")
        };
        let z = mover.expect("the final group hands over a student");
        if !policy.protected[z] {
            return z;
        }
        // a protected student left its seat: it takes the seat of an
        // unprotected member of its own group instead
        let v = self.victim_in(h, policy).expect("group has an unprotected member");
        let seat = self.unassign(v);
        self.assign(z, seat);
        v
    }
}

impl std::fmt::Debug for Surgery<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Surgery")
            .field("matching", &self.matching)
            .field("signature", &self.signature)
            .finish()
    }
}
