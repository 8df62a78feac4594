//! Exhaustive ground truth for small instances.
//!
//! Students of one group are interchangeable, and so are the seats of one
//! seat class. A matching is therefore described, up to relabeling, by how
//! many students of each group sit in each class. The enumeration walks the
//! classes one by one and, for every way of handing out the current class,
//! recurses on the remaining classes; results are memoized on
//! (class, students used per group). For every reachable per-group count
//! vector it keeps the best signature, which is exact because adding a fixed
//! vector preserves lexicographic order.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::graph::{build_graph, RankedReservationGraph, SeatMatching};
use crate::model::{min_selection_ratio, Instance, Ratio, Signature, StudentIdx};
use crate::search::CrucialVector;

/// Environment variable overriding [`OracleBudget::default`], e.g.
/// `students=14,seats=20,nodes=50000000` (any subset of the keys).
pub const BUDGET_ENV: &str = "RESERVE_MATCH_ORACLE_BUDGET";

/// Size limits for exhaustive enumeration.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct OracleBudget {
    pub max_students: usize,
    pub max_seats: usize,
    pub max_enumerations: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_students: 12,
            max_seats: 18,
            max_enumerations: 10_000_000,
        }
    }
}

impl OracleBudget {
    /// Default budget with overrides from [`BUDGET_ENV`].
    pub fn from_env() -> Result<Self> {
        match std::env::var(BUDGET_ENV) {
            Ok(text) => Self::parse(&text),
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut budget = Self::default();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || Error::InvalidParameters(format!("bad oracle budget entry `{part}`"));
            let (key, value) = part.split_once('=').ok_or_else(bad)?;
            let value: u64 = value.trim().parse().map_err(|_| bad())?;
            match key.trim() {
                "students" => budget.max_students = value as usize,
                "seats" => budget.max_seats = value as usize,
                "nodes" => budget.max_enumerations = value,
                _ => return Err(bad()),
            }
        }
        Ok(budget)
    }

    /// Whether an instance is small enough to enumerate.
    pub fn admits(&self, instance: &Instance) -> bool {
        self.check_size(instance, &build_graph(instance)).is_ok()
    }

    fn check_size(&self, instance: &Instance, graph: &RankedReservationGraph) -> Result<()> {
        if instance.num_students() > self.max_students {
            return Err(Error::BudgetExceeded(format!(
                "{} students (limit {})",
                instance.num_students(),
                self.max_students
            )));
        }
        if graph.num_seats() > self.max_seats {
            return Err(Error::BudgetExceeded(format!(
                "{} seats (limit {})",
                graph.num_seats(),
                self.max_seats
            )));
        }
        Ok(())
    }
}

/// One per-group count vector attained by a rank-maximal matching.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Outcome {
    pub counts: Vec<usize>,
    /// A rank-maximal matching with these counts, using each group's top members.
    pub witness: SeatMatching,
}

/// Every maximal-diversity matching, up to relabeling inside groups and classes.
#[derive(Clone, Debug)]
pub struct MaximalDiversity {
    pub best: Signature,
    pub outcomes: Vec<Outcome>,
    pub graph: RankedReservationGraph,
}

impl MaximalDiversity {
    /// Outcomes realizing the max-min selection ratio.
    pub fn balanced<'m>(&'m self, instance: &Instance, alpha: Ratio) -> impl Iterator<Item = &'m Outcome> + 'm {
        let ratios: Vec<Ratio> = self.outcomes.iter().map(|o| min_selection_ratio(instance, &o.counts)).collect();
        self.outcomes.iter().zip(ratios).filter(move |(_, r)| *r == alpha).map(|(o, _)| o)
    }

    pub fn max_min_ratio(&self, instance: &Instance) -> Ratio {
        self.outcomes
            .iter()
            .map(|o| min_selection_ratio(instance, &o.counts))
            .max()
            .unwrap_or_else(Ratio::zero)
    }
}

type Table = BTreeMap<Vec<usize>, (Signature, Vec<usize>)>;

struct Enumerator<'a> {
    graph: &'a RankedReservationGraph,
    sizes: Vec<usize>,
    capacity: usize,
    /// admissible groups per class
    admits: Vec<Vec<usize>>,
    memo: HashMap<(usize, Vec<usize>), Rc<Table>>,
    nodes: u64,
    limit: u64,
}

impl Enumerator<'_> {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(Error::BudgetExceeded(format!("more than {} enumeration nodes", self.limit)));
        }
        Ok(())
    }

    /// Best suffix signature for every final count vector reachable from
    /// `(class, used)`, with the distribution chosen for `class`.
    fn table(&mut self, class: usize, used: Vec<usize>) -> Result<Rc<Table>> {
        if let Some(t) = self.memo.get(&(class, used.clone())) {
            return Ok(t.clone());
        }
        let r = self.graph.max_rank();
        let mut out = Table::new();
        if class == self.graph.classes().len() {
            self.tick()?;
            out.insert(used.clone(), (Signature::zeros(r), Vec::new()));
        } else {
            let cl = &self.graph.classes()[class];
            let total: usize = used.iter().sum();
            let limit = cl.capacity().min(self.capacity.saturating_sub(total));
            let groups = self.admits[class].clone();
            let mut x = vec![0usize; groups.len()];
            loop {
                self.tick()?;
                let placed: usize = x.iter().sum();
                let mut next = used.clone();
                for (i, &g) in groups.iter().enumerate() {
                    next[g] += x[i];
                }
                let sub = self.table(class + 1, next)?;
                let mut dist = vec![0usize; used.len()];
                for (i, &g) in groups.iter().enumerate() {
                    dist[g] = x[i];
                }
                for (fin, (sig, _)) in sub.iter() {
                    let mut sig = sig.clone();
                    sig.add(cl.rank, placed);
                    match out.get(fin) {
                        Some((best, _)) if *best >= sig => {}
                        _ => {
                            out.insert(fin.clone(), (sig, dist.clone()));
                        }
                    }
                }
                // next distribution: odometer over groups with the caps
                let mut i = 0;
                loop {
                    if i == groups.len() {
                        let t = Rc::new(out);
                        self.memo.insert((class, used), t.clone());
                        return Ok(t);
                    }
                    let g = groups[i];
                    let room = self.sizes[g] - used[g];
                    if x[i] < room && x.iter().sum::<usize>() < limit {
                        x[i] += 1;
                        break;
                    }
                    x[i] = 0;
                    i += 1;
                }
            }
        }
        let t = Rc::new(out);
        self.memo.insert((class, used), t.clone());
        Ok(t)
    }
}

/// Enumerates all maximal-diversity matchings with the budget from the environment.
pub fn enumerate_maximal_diversity_matchings(instance: &Instance) -> Result<MaximalDiversity> {
    enumerate_with_budget(instance, &OracleBudget::from_env()?)
}

pub fn enumerate_with_budget(instance: &Instance, budget: &OracleBudget) -> Result<MaximalDiversity> {
    let graph = build_graph(instance);
    budget.check_size(instance, &graph)?;
    let sizes = instance.group_sizes();
    let admits = (0..graph.classes().len())
        .map(|c| (0..sizes.len()).filter(|&g| graph.class_admits_group(c, g)).collect())
        .collect();
    let mut e = Enumerator {
        graph: &graph,
        sizes: sizes.clone(),
        capacity: instance.capacity(),
        admits,
        memo: HashMap::new(),
        nodes: 0,
        limit: budget.max_enumerations,
    };
    let root = e.table(0, vec![0; sizes.len()])?;
    let best = root
        .values()
        .map(|(s, _)| s.clone())
        .max()
        .expect("the empty matching is always reachable");
    let mut outcomes = Vec::new();
    for (fin, (sig, _)) in root.iter() {
        if *sig != best {
            continue;
        }
        // replay the stored choices to rebuild the per-class distribution
        let mut used = vec![0; sizes.len()];
        let mut per_class = Vec::with_capacity(graph.classes().len());
        for c in 0..graph.classes().len() {
            let t = e.table(c, used.clone())?;
            let (_, dist) = t.get(fin).expect("final vector reachable").clone();
            for g in 0..sizes.len() {
                used[g] += dist[g];
            }
            per_class.push(dist);
        }
        let witness = witness_matching(instance, &graph, &per_class)?;
        outcomes.push(Outcome {
            counts: fin.clone(),
            witness,
        });
    }
    drop(e);
    Ok(MaximalDiversity { best, outcomes, graph })
}

fn witness_matching(
    instance: &Instance,
    graph: &RankedReservationGraph,
    per_class: &[Vec<usize>],
) -> Result<SeatMatching> {
    let mut pairs = Vec::new();
    let mut next_member = vec![0usize; instance.num_groups()];
    for (c, dist) in per_class.iter().enumerate() {
        let mut seats = graph.classes()[c].seats.clone();
        for (g, &n) in dist.iter().enumerate() {
            for _ in 0..n {
                let s = instance.groups()[g].members[next_member[g]];
                next_member[g] += 1;
                pairs.push((s, seats.next().expect("class capacity respected")));
            }
        }
    }
    SeatMatching::from_pairs(graph, &pairs)
}

/// Max-min selection ratio over all maximal-diversity matchings, with its crucial vector.
pub fn oracle_max_min_ratio(instance: &Instance) -> Result<CrucialVector> {
    let md = enumerate_maximal_diversity_matchings(instance)?;
    Ok(CrucialVector::new(instance, md.max_min_ratio(instance)))
}

/// Literal balanced choice: visit students in priority order and keep `s`
/// when some maximal-diversity matching with the max-min ratio covers the
/// students kept so far together with `s`.
pub fn oracle_choice(instance: &Instance) -> Result<Vec<StudentIdx>> {
    let md = enumerate_maximal_diversity_matchings(instance)?;
    Ok(oracle_choice_from(instance, &md))
}

pub fn oracle_choice_from(instance: &Instance, md: &MaximalDiversity) -> Vec<StudentIdx> {
    let alpha = md.max_min_ratio(instance);
    let balanced: Vec<&Outcome> = md.balanced(instance, alpha).collect();
    let mut counts = vec![0usize; instance.num_groups()];
    let mut chosen = Vec::new();
    for &s in instance.priority() {
        let g = instance.group_of(s);
        counts[g] += 1;
        if balanced.iter().any(|o| o.counts.iter().zip(&counts).all(|(a, b)| a >= b)) {
            chosen.push(s);
        } else {
            counts[g] -= 1;
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{Quota, StudentRecord, TypeRef};

    fn sorted_ids(inst: &Instance, set: &[StudentIdx]) -> Vec<String> {
        let mut v: Vec<String> = set.iter().map(|&s| inst.student_id(s).to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn single_reserve_enumeration() {
        let inst = fixtures::single_reserve();
        let md = enumerate_maximal_diversity_matchings(&inst).unwrap();
        assert_eq!(md.best.as_slice(), &[1, 1]);
        let mut counts: Vec<_> = md.outcomes.iter().map(|o| o.counts.clone()).collect();
        counts.sort();
        // groups (none, t1): one t1 student on the t1 seat plus anyone on a general seat
        assert_eq!(counts, vec![vec![0, 2], vec![1, 1]]);
        for o in &md.outcomes {
            assert_eq!(o.witness.signature(&md.graph), md.best);
            assert_eq!(o.witness.group_counts(&inst), o.counts);
        }
        // the witness of (0, 2) pairs a t1 student with the t1 seat
        let w = &md.outcomes.iter().find(|o| o.counts == [0, 2]).unwrap().witness;
        assert_eq!(md.graph.seat(w.seat_of(inst.student_index("s2").unwrap()).unwrap()).seat_type, TypeRef::Typed(0));
    }

    #[test]
    fn untyped_students_fill_general_seats() {
        let students: Vec<_> = (0..3).map(|i| StudentRecord::new(format!("a{i}"), &[])).collect();
        let inst = Instance::new(5, 3, vec![], vec![], students, vec!["a0".into(), "a1".into(), "a2".into()]).unwrap();
        let md = enumerate_maximal_diversity_matchings(&inst).unwrap();
        assert_eq!(md.best.as_slice(), &[0, 0, 3]);
    }

    #[test]
    fn ratios_and_choices() {
        let inst = fixtures::single_reserve();
        let c = oracle_max_min_ratio(&inst).unwrap();
        assert_eq!(c.alpha, Ratio::new(1, 2).unwrap());
        assert_eq!(c.targets.as_slice(), &[1, 1]);
        assert_eq!(sorted_ids(&inst, &oracle_choice(&inst).unwrap()), ["s2", "s4"]);

        let capped = fixtures::capped_types(false);
        assert_eq!(sorted_ids(&capped, &oracle_choice(&capped).unwrap()), ["s11", "s12", "s21", "s22"]);
        let capped_b = fixtures::capped_types(true);
        assert_eq!(sorted_ids(&capped_b, &oracle_choice(&capped_b).unwrap()), ["s11", "s12", "s13", "s21"]);
    }

    #[test]
    fn scaled_four_groups_ratio() {
        let inst = fixtures::four_groups_scaled(3);
        let budget = OracleBudget { max_students: 12, max_seats: 18, max_enumerations: 10_000_000 };
        let md = enumerate_with_budget(&inst, &budget).unwrap();
        // 3 per group, capacity 6, one rank-1 seat per type
        assert_eq!(md.best.as_slice(), &[2, 4]);
        let alpha = md.max_min_ratio(&inst);
        assert_eq!(alpha, Ratio::new(1, 3).unwrap());
    }

    #[test]
    fn single_group_closed_form() {
        let students: Vec<_> = (0..5).map(|i| StudentRecord::new(format!("a{i}"), &["t"])).collect();
        let prio = (0..5).map(|i| format!("a{i}")).collect();
        let inst = Instance::new(3, 2, vec!["t".into()], vec![Quota::new("t", 1, 2)], students, prio).unwrap();
        let c = oracle_max_min_ratio(&inst).unwrap();
        assert_eq!(c.alpha, Ratio::new(3, 5).unwrap());
        assert_eq!(sorted_ids(&inst, &oracle_choice(&inst).unwrap()), ["a0", "a1", "a2"]);
    }

    #[test]
    fn budget_is_enforced() {
        let inst = fixtures::four_groups_scaled(4);
        assert!(matches!(
            enumerate_with_budget(&inst, &OracleBudget::default()),
            Err(Error::BudgetExceeded(_))
        ));
        let tiny = OracleBudget { max_enumerations: 3, ..OracleBudget::default() };
        assert!(matches!(
            enumerate_with_budget(&fixtures::single_reserve(), &tiny),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn budget_parsing() {
        let b = OracleBudget::parse("students=20, nodes=5").unwrap();
        assert_eq!(b.max_students, 20);
        assert_eq!(b.max_seats, 18);
        assert_eq!(b.max_enumerations, 5);
        assert!(OracleBudget::parse("students=x").is_err());
        assert!(OracleBudget::parse("depth=3").is_err());
        assert_eq!(OracleBudget::parse("").unwrap(), OracleBudget::default());
    }

    /// Plain recursion over every student → seat assignment.
    fn brute_force(inst: &Instance) -> (Signature, Vec<Vec<usize>>) {
        let g = build_graph(inst);
        let mut best: Option<Signature> = None;
        let mut counts_at_best = Vec::new();
        let mut used = vec![false; g.num_seats()];
        let mut sig = Signature::zeros(inst.max_rank());
        let mut counts = vec![0usize; inst.num_groups()];
        fn rec(
            s: usize,
            inst: &Instance,
            g: &RankedReservationGraph,
            used: &mut Vec<bool>,
            sig: &mut Signature,
            counts: &mut Vec<usize>,
            best: &mut Option<Signature>,
            at_best: &mut Vec<Vec<usize>>,
        ) {
            if s == inst.num_students() {
                if sig.total() > inst.capacity() {
                    return;
                }
                match best {
                    Some(b) if *b > *sig => {}
                    Some(b) if *b == *sig => at_best.push(counts.clone()),
                    _ => {
                        *best = Some(sig.clone());
                        at_best.clear();
                        at_best.push(counts.clone());
                    }
                }
                return;
            }
            rec(s + 1, inst, g, used, sig, counts, best, at_best);
            for v in 0..g.num_seats() {
                if !used[v] && g.is_edge(s, v) {
                    used[v] = true;
                    let rank = g.seat(v).rank;
                    sig.add(rank, 1);
                    counts[inst.group_of(s)] += 1;
                    rec(s + 1, inst, g, used, sig, counts, best, at_best);
                    counts[inst.group_of(s)] -= 1;
                    *sig = Signature::new(
                        sig.as_slice().iter().enumerate().map(|(i, &x)| if i + 1 == rank { x - 1 } else { x }).collect(),
                    );
                    used[v] = false;
                }
            }
        }
        rec(0, inst, &g, &mut used, &mut sig, &mut counts, &mut best, &mut counts_at_best);
        counts_at_best.sort();
        counts_at_best.dedup();
        (best.unwrap(), counts_at_best)
    }

    #[test]
    fn dp_agrees_with_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let n = rng.gen_range(0..=5);
            let types = ["a", "b"];
            let students: Vec<_> = (0..n)
                .map(|i| {
                    let ts: Vec<&str> = types.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
                    StudentRecord::new(format!("s{i}"), &ts)
                })
                .collect();
            let max_rank = rng.gen_range(1..=3);
            let mut quotas = Vec::new();
            for t in types {
                for rank in 1..=max_rank {
                    let q = rng.gen_range(0..=1);
                    if q > 0 {
                        quotas.push(Quota::new(t, rank, q));
                    }
                }
            }
            let capacity = rng.gen_range(0..=3);
            let prio = (0..n).map(|i| format!("s{i}")).collect();
            let inst = Instance::new(capacity, max_rank, types.map(String::from).to_vec(), quotas, students, prio).unwrap();
            let md = enumerate_maximal_diversity_matchings(&inst).unwrap();
            let (best, counts) = brute_force(&inst);
            assert_eq!(md.best, best);
            let mut got: Vec<_> = md.outcomes.iter().map(|o| o.counts.clone()).collect();
            got.sort();
            assert_eq!(got, counts);
            assert_eq!(md.best.total(), n.min(capacity));
        }
    }
}
