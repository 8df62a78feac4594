use std::collections::VecDeque;

use super::reservation::{RankedReservationGraph, SeatIdx, SeatMatching};
use crate::error::{Error, Result};
use crate::model::{Instance, StudentIdx};

/// Where an alternating path stops.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PathEnd {
    /// Last vertex is a matched student who loses its seat under `M ⊕ P`.
    MatchedStudent(StudentIdx),
    /// Last vertex is an unmatched seat; the path is augmenting.
    FreeSeat { seat: SeatIdx, rank: usize },
}

/// Endpoint candidate offered to the goal predicate of [`find_alternating_path`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Endpoint {
    Student(StudentIdx),
    Seat(SeatIdx),
}

/// `s_0, v_1, s_1, v_2, …` starting at an unmatched student. Edges `(s_{i-1}, v_i)`
/// are outside the matching and `(v_i, s_i)` inside it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlternatingPath {
    pub students: Vec<StudentIdx>,
    pub seats: Vec<SeatIdx>,
    pub end: PathEnd,
}

impl AlternatingPath {
    pub fn start(&self) -> StudentIdx {
        self.students[0]
    }

    pub fn len(&self) -> usize {
        self.students.len() + self.seats.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.seats.is_empty()
    }

    pub fn is_augmenting(&self) -> bool {
        matches!(self.end, PathEnd::FreeSeat { .. })
    }

    /// Checks strict alternation against `matching` and that the end tag fits.
    pub fn validate(&self, graph: &RankedReservationGraph, matching: &SeatMatching) -> Result<()> {
        let bad = |m: &str| Err(Error::Invariant(format!("alternating path: {m}")));
        if self.students.is_empty() || self.seats.is_empty() {
            return bad("too short");
        }
        if matching.is_matched(self.students[0]) {
            return bad("does not start at an unmatched student");
        }
        for (i, &v) in self.seats.iter().enumerate() {
            let s = self.students[i];
            if !graph.is_edge(s, v) || matching.seat_of(s) == Some(v) {
                return bad("non-matching edge expected");
            }
            match self.students.get(i + 1) {
                Some(&next) if matching.seat_of(next) != Some(v) => return bad("matching edge expected"),
                Some(_) => {}
                None if matching.student_at(v).is_some() => return bad("free seat expected at the end"),
                None => {}
            }
        }
        let consistent = match self.end {
            PathEnd::MatchedStudent(z) => {
                self.students.len() == self.seats.len() + 1 && self.students.last() == Some(&z)
            }
            PathEnd::FreeSeat { seat, rank } => {
                self.students.len() == self.seats.len()
                    && self.seats.last() == Some(&seat)
                    && graph.seat(seat).rank == rank
            }
        };
        if !consistent {
            return bad("end tag does not match the vertex sequence");
        }
        Ok(())
    }

    /// `M ← M ⊕ P`. Path students take the next seat; a final matched student
    /// ends up unmatched.
    pub fn apply(&self, matching: &mut SeatMatching) {
        for &s in &self.students[1..] {
            matching.unassign(s);
        }
        for (&s, &v) in self.students.iter().zip(&self.seats) {
            matching.assign(s, v);
        }
    }
}

/// Breadth-first alternating search from the unmatched student `from`.
///
/// Seats of one class are interchangeable, and so are the occupants of a
/// class who share a group, so the search runs over seat classes and
/// expands only the returned path to concrete vertices. Returns a path with
/// the fewest seat classes whose endpoint satisfies `goal`, or `None`.
pub fn find_alternating_path(
    instance: &Instance,
    graph: &RankedReservationGraph,
    matching: &SeatMatching,
    from: StudentIdx,
    goal: impl Fn(Endpoint) -> bool,
) -> Result<Option<AlternatingPath>> {
    if matching.is_matched(from) {
        return Err(Error::Precondition(format!(
            "`{}` is already matched",
            instance.student_id(from)
        )));
    }
    let classes = graph.classes();
    // occupants of every class, lowest priority first
    let mut occupants: Vec<Vec<StudentIdx>> = classes
        .iter()
        .map(|c| c.seats.clone().filter_map(|v| matching.student_at(v)).collect())
        .collect();
    for occ in &mut occupants {
        occ.sort_by_key(|&s| std::cmp::Reverse(instance.priority_pos(s)));
    }
    // parent[c] = (previous class, student entering c)
    let mut parent: Vec<Option<(Option<usize>, StudentIdx)>> = vec![None; classes.len()];
    let mut queue = VecDeque::new();
    for &c in graph.group_classes(graph.student_group(from)) {
        parent[c] = Some((None, from));
        queue.push_back(c);
    }
    while let Some(c) = queue.pop_front() {
        let free = classes[c].seats.clone().find(|&v| matching.student_at(v).is_none() && goal(Endpoint::Seat(v)));
        if let Some(v) = free {
            return Ok(Some(build(matching, &parent, c, PathEnd::FreeSeat { seat: v, rank: classes[c].rank })));
        }
        if let Some(&z) = occupants[c].iter().find(|&&z| goal(Endpoint::Student(z))) {
            return Ok(Some(build(matching, &parent, c, PathEnd::MatchedStudent(z))));
        }
        let mut seen_groups = Vec::new();
        for &z in &occupants[c] {
            let g = graph.student_group(z);
            if seen_groups.contains(&g) {
                continue;
            }
            seen_groups.push(g);
            for &next in graph.group_classes(g) {
                if parent[next].is_none() {
                    parent[next] = Some((Some(c), z));
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(None)
}

fn build(
    matching: &SeatMatching,
    parent: &[Option<(Option<usize>, StudentIdx)>],
    last: usize,
    end: PathEnd,
) -> AlternatingPath {
    let mut chain = Vec::new();
    let mut c = Some(last);
    while let Some(cur) = c {
        let (prev, mover) = parent[cur].expect("visited class");
        chain.push(mover);
        c = prev;
    }
    chain.reverse();
    // chain[0] is the start; chain[i] for i ≥ 1 sits in the i-th class
    let mut students = chain.clone();
    let mut seats: Vec<SeatIdx> = chain[1..]
        .iter()
        .map(|&z| matching.seat_of(z).expect("movers are matched"))
        .collect();
    match end {
        PathEnd::MatchedStudent(z) => {
            seats.push(matching.seat_of(z).expect("end student is matched"));
            students.push(z);
        }
        PathEnd::FreeSeat { seat, .. } => seats.push(seat),
    }
    AlternatingPath { students, seats, end }
}
