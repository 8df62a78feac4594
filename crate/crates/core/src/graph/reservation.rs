use std::ops::Range;

use crate::error::{Error, Result};
use crate::model::{Instance, Signature, StudentIdx, TypeRef};

pub type SeatIdx = usize;

/// Reserved seat `v^rank_{type,index}`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Seat {
    pub seat_type: TypeRef,
    pub rank: usize,
    /// 1-based index among the seats of the same type and rank.
    pub index: usize,
    pub class: usize,
}

/// All seats sharing a type and rank. They are interchangeable.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SeatClass {
    pub seat_type: TypeRef,
    pub rank: usize,
    pub seats: Range<SeatIdx>,
}

impl SeatClass {
    pub fn capacity(&self) -> usize {
        self.seats.len()
    }
}

/// Bipartite graph of students and reserved seats.
///
/// Edges are implicit: student `s` is adjacent to seat `v` iff `v`'s type is
/// the general type or one of `s`'s types. Every edge carries its seat's rank.
#[derive(Clone, Debug)]
pub struct RankedReservationGraph {
    seats: Vec<Seat>,
    classes: Vec<SeatClass>,
    /// Seat classes admissible for each group.
    group_classes: Vec<Vec<usize>>,
    student_group: Vec<usize>,
    max_rank: usize,
}

/// Builds the ranked reservation graph: `η_t^j` seats per declared type and
/// rank, plus `capacity` general seats at the largest rank.
pub fn build_graph(instance: &Instance) -> RankedReservationGraph {
    let mut seats = Vec::new();
    let mut classes = Vec::new();
    for ty in instance.type_refs() {
        for rank in 1..=instance.max_rank() {
            let n = instance.quota(ty, rank);
            if n == 0 {
                continue;
            }
            let class = classes.len();
            let start = seats.len();
            seats.extend((1..=n).map(|index| Seat {
                seat_type: ty,
                rank,
                index,
                class,
            }));
            classes.push(SeatClass {
                seat_type: ty,
                rank,
                seats: start..seats.len(),
            });
        }
    }
    let group_classes = instance
        .groups()
        .iter()
        .map(|g| {
            (0..classes.len())
                .filter(|&c| g.key.admits(classes[c].seat_type))
                .collect()
        })
        .collect();
    RankedReservationGraph {
        seats,
        classes,
        group_classes,
        student_group: (0..instance.num_students())
            .map(|s| instance.group_of(s))
            .collect(),
        max_rank: instance.max_rank(),
    }
}

impl RankedReservationGraph {
    pub fn seats(&self) -> &[Seat] {
        &self.seats
    }

    pub fn seat(&self, v: SeatIdx) -> &Seat {
        &self.seats[v]
    }

    pub fn num_seats(&self) -> usize {
        self.seats.len()
    }

    pub fn num_students(&self) -> usize {
        self.student_group.len()
    }

    pub fn classes(&self) -> &[SeatClass] {
        &self.classes
    }

    pub fn class_of(&self, v: SeatIdx) -> usize {
        self.seats[v].class
    }

    pub fn max_rank(&self) -> usize {
        self.max_rank
    }

    /// Seat classes a student of group `g` may occupy.
    pub fn group_classes(&self, g: usize) -> &[usize] {
        &self.group_classes[g]
    }

    pub fn student_group(&self, s: StudentIdx) -> usize {
        self.student_group[s]
    }

    pub fn class_admits_group(&self, class: usize, g: usize) -> bool {
        self.group_classes[g].binary_search(&class).is_ok()
    }

    pub fn is_edge(&self, s: StudentIdx, v: SeatIdx) -> bool {
        self.class_admits_group(self.seats[v].class, self.student_group[s])
    }

    /// Rank of edge `(s, v)`, if the edge exists.
    pub fn edge_rank(&self, s: StudentIdx, v: SeatIdx) -> Option<usize> {
        self.is_edge(s, v).then(|| self.seats[v].rank)
    }

    pub fn num_edges(&self) -> usize {
        self.student_group
            .iter()
            .map(|&g| {
                self.group_classes[g]
                    .iter()
                    .map(|&c| self.classes[c].capacity())
                    .sum::<usize>()
            })
            .sum()
    }

    /// All edges `(student, seat, rank)`; the `E^1 ∪ … ∪ E^r` partition is the rank field.
    pub fn edges(&self) -> impl Iterator<Item = (StudentIdx, SeatIdx, usize)> + '_ {
        self.student_group.iter().enumerate().flat_map(move |(s, &g)| {
            self.group_classes[g].iter().flat_map(move |&c| {
                self.classes[c]
                    .seats
                    .clone()
                    .map(move |v| (s, v, self.seats[v].rank))
            })
        })
    }
}

/// Student ↔ seat assignment on a [`RankedReservationGraph`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SeatMatching {
    student_seat: Vec<Option<SeatIdx>>,
    seat_student: Vec<Option<StudentIdx>>,
}

impl SeatMatching {
    pub fn empty(graph: &RankedReservationGraph) -> Self {
        SeatMatching {
            student_seat: vec![None; graph.num_students()],
            seat_student: vec![None; graph.num_seats()],
        }
    }

    /// Builds a matching from explicit pairs, checking the matching property
    /// and that every pair is an edge.
    pub fn from_pairs(
        graph: &RankedReservationGraph,
        pairs: &[(StudentIdx, SeatIdx)],
    ) -> Result<Self> {
        let mut m = SeatMatching::empty(graph);
        for &(s, v) in pairs {
            if s >= graph.num_students() || v >= graph.num_seats() {
                return Err(Error::Precondition(format!("pair ({s}, {v}) out of range")));
            }
            if !graph.is_edge(s, v) {
                return Err(Error::Precondition(format!("({s}, {v}) is not an edge")));
            }
            if m.student_seat[s].is_some() || m.seat_student[v].is_some() {
                return Err(Error::Precondition(format!(
                    "vertex of ({s}, {v}) matched twice"
                )));
            }
            m.assign(s, v);
        }
        Ok(m)
    }

    pub fn seat_of(&self, s: StudentIdx) -> Option<SeatIdx> {
        self.student_seat[s]
    }

    pub fn student_at(&self, v: SeatIdx) -> Option<StudentIdx> {
        self.seat_student[v]
    }

    pub fn is_matched(&self, s: StudentIdx) -> bool {
        self.student_seat[s].is_some()
    }

    /// Puts `s` on the free seat `v`, releasing any seat `s` held before.
    pub fn assign(&mut self, s: StudentIdx, v: SeatIdx) {
        debug_assert!(self.seat_student[v].is_none());
        if let Some(old) = self.student_seat[s].take() {
            self.seat_student[old] = None;
        }
        self.student_seat[s] = Some(v);
        self.seat_student[v] = Some(s);
    }

    pub fn unassign(&mut self, s: StudentIdx) -> Option<SeatIdx> {
        let v = self.student_seat[s].take()?;
        self.seat_student[v] = None;
        Some(v)
    }

    pub fn size(&self) -> usize {
        self.student_seat.iter().filter(|x| x.is_some()).count()
    }

    pub fn pairs(&self) -> Vec<(StudentIdx, SeatIdx)> {
        self.student_seat
            .iter()
            .enumerate()
            .filter_map(|(s, v)| v.map(|v| (s, v)))
            .collect()
    }

    /// Matched students, `S_M`, in index order.
    pub fn matched_students(&self) -> Vec<StudentIdx> {
        self.pairs().into_iter().map(|(s, _)| s).collect()
    }

    pub fn signature(&self, graph: &RankedReservationGraph) -> Signature {
        let mut sig = Signature::zeros(graph.max_rank());
        for v in self.student_seat.iter().flatten() {
            sig.add(graph.seat(*v).rank, 1);
        }
        sig
    }

    /// `|M_u|` for every group.
    pub fn group_counts(&self, instance: &Instance) -> Vec<usize> {
        let mut counts = vec![0; instance.num_groups()];
        for (s, v) in self.student_seat.iter().enumerate() {
            if v.is_some() {
                counts[instance.group_of(s)] += 1;
            }
        }
        counts
    }

    /// `|M_{u,t}|`: students of group `g` sitting on seats of type `ty`.
    pub fn group_type_count(
        &self,
        instance: &Instance,
        graph: &RankedReservationGraph,
        g: usize,
        ty: TypeRef,
    ) -> usize {
        instance.groups()[g]
            .members
            .iter()
            .filter(|&&s| self.student_seat[s].is_some_and(|v| graph.seat(v).seat_type == ty))
            .count()
    }

    /// `|M_t^i|`: students on seats of type `ty` and rank `rank`.
    pub fn type_rank_count(&self, graph: &RankedReservationGraph, ty: TypeRef, rank: usize) -> usize {
        self.student_seat
            .iter()
            .flatten()
            .filter(|&&v| {
                let seat = graph.seat(v);
                seat.seat_type == ty && seat.rank == rank
            })
            .count()
    }

    /// Checks the matching property and that all pairs are edges of `graph`.
    pub fn validate(&self, graph: &RankedReservationGraph) -> Result<()> {
        if self.student_seat.len() != graph.num_students() || self.seat_student.len() != graph.num_seats() {
            return Err(Error::Invariant("matching does not fit the graph".into()));
        }
        for (s, v) in self.student_seat.iter().enumerate() {
            if let Some(v) = *v {
                if self.seat_student[v] != Some(s) {
                    return Err(Error::Invariant(format!("seat {v} does not point back to student {s}")));
                }
                if !graph.is_edge(s, v) {
                    return Err(Error::Invariant(format!("({s}, {v}) is not an edge")));
                }
            }
        }
        for (v, s) in self.seat_student.iter().enumerate() {
            if let Some(s) = *s {
                if self.student_seat[s] != Some(v) {
                    return Err(Error::Invariant(format!("student {s} does not point back to seat {v}")));
                }
            }
        }
        Ok(())
    }

    /// Reassigns seats inside each group so the matched members are exactly
    /// the group's highest-priority members. Signature and group counts are
    /// unchanged since group members are interchangeable.
    pub fn normalize_to_priority_prefixes(&mut self, instance: &Instance) {
        for group in instance.groups() {
            let mut held: Vec<SeatIdx> = group
                .members
                .iter()
                .filter_map(|&s| self.student_seat[s])
                .collect();
            held.sort_unstable();
            for &s in &group.members {
                self.unassign(s);
            }
            for (&s, &v) in group.members.iter().zip(&held) {
                self.assign(s, v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn single_reserve_graph() {
        let inst = fixtures::single_reserve();
        let g = build_graph(&inst);
        assert_eq!(g.num_seats(), 3);
        let labels: Vec<_> = g
            .seats()
            .iter()
            .map(|s| (inst.type_label(s.seat_type).to_string(), s.rank, s.index))
            .collect();
        assert_eq!(
            labels,
            [("t1".to_string(), 1, 1), ("t0".to_string(), 2, 1), ("t0".to_string(), 2, 2)]
        );
        assert_eq!(g.num_edges(), 10);
        assert_eq!(g.edges().count(), 10);
        let rank1 = g.edges().filter(|e| e.2 == 1).count();
        assert_eq!(rank1, 2);
    }

    #[test]
    fn zero_capacity_has_no_general_seats() {
        let inst = Instance::new(
            0,
            2,
            vec!["t1".into()],
            vec![crate::model::Quota::new("t1", 1, 2)],
            vec![crate::model::StudentRecord::new("a", &["t1"])],
            vec!["a".into()],
        )
        .unwrap();
        let g = build_graph(&inst);
        assert!(g.seats().iter().all(|s| s.seat_type != TypeRef::General));
        assert_eq!(g.num_seats(), 2);
    }

    #[test]
    fn four_groups_seat_counts() {
        let inst = fixtures::four_groups();
        let g = build_graph(&inst);
        let count = |ty: TypeRef, rank: usize| {
            g.seats().iter().filter(|s| s.seat_type == ty && s.rank == rank).count()
        };
        assert_eq!(count(TypeRef::Typed(0), 1), 25);
        assert_eq!(count(TypeRef::Typed(1), 1), 25);
        assert_eq!(count(TypeRef::General, 2), 100);
        assert_eq!(g.num_seats(), 150);
    }

    #[test]
    fn matching_bookkeeping() {
        let inst = fixtures::single_reserve();
        let g = build_graph(&inst);
        let s = |id| inst.student_index(id).unwrap();
        // s3 has no t1 edge
        assert!(SeatMatching::from_pairs(&g, &[(s("s3"), 0)]).is_err());
        assert!(SeatMatching::from_pairs(&g, &[(s("s1"), 0), (s("s2"), 0)]).is_err());
        let m = SeatMatching::from_pairs(&g, &[(s("s1"), 0), (s("s2"), 1)]).unwrap();
        assert_eq!(m.signature(&g).as_slice(), &[1, 1]);
        assert_eq!(m.group_counts(&inst), vec![0, 2]);
        assert_eq!(m.group_type_count(&inst, &g, 1, TypeRef::General), 1);
        assert_eq!(m.type_rank_count(&g, TypeRef::Typed(0), 1), 1);
        m.validate(&g).unwrap();
    }

    #[test]
    fn normalization_moves_seats_to_top_members() {
        let inst = fixtures::single_reserve();
        let g = build_graph(&inst);
        let s = |id| inst.student_index(id).unwrap();
        let mut m = SeatMatching::from_pairs(&g, &[(s("s1"), 0), (s("s3"), 1)]).unwrap();
        let sig = m.signature(&g);
        m.normalize_to_priority_prefixes(&inst);
        assert!(m.is_matched(s("s2")) && m.is_matched(s("s4")));
        assert!(!m.is_matched(s("s1")) && !m.is_matched(s("s3")));
        assert_eq!(m.signature(&g), sig);
        m.validate(&g).unwrap();
    }
}
