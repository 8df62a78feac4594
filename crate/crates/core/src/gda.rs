//! Several schools: induced single-school instances, deferred acceptance with
//! the balanced choice function, and a substitutability probe.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::model::{ChoiceResult, Instance, Quota, StudentIdx, StudentRecord};
use crate::solve::solve_flow;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiStudent {
    pub record: StudentRecord,
    /// School ids, most preferred first.
    pub preferences: Vec<String>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct School {
    pub id: String,
    pub capacity: usize,
    pub max_rank: usize,
    pub quotas: Vec<Quota>,
    /// All student ids, highest priority first.
    pub priority: Vec<String>,
}

/// Students with preferences over schools; schools with their own capacity,
/// priority and ranked quotas over a shared set of types.
#[derive(Clone, Debug)]
pub struct MultiInstance {
    types: Vec<String>,
    students: Vec<MultiStudent>,
    /// sorted by id
    schools: Vec<School>,
    /// preferences as school indices
    prefs: Vec<Vec<usize>>,
    index: HashMap<String, StudentIdx>,
}

impl MultiInstance {
    pub fn new(types: Vec<String>, students: Vec<MultiStudent>, mut schools: Vec<School>) -> Result<Self> {
        let bad = |m: String| Err(Error::MalformedInstance(m));
        schools.sort_by(|a, b| a.id.cmp(&b.id));
        for w in schools.windows(2) {
            if w[0].id == w[1].id {
                return bad(format!("school `{}` declared twice", w[0].id));
            }
        }
        let records: Vec<StudentRecord> = students.iter().map(|s| s.record.clone()).collect();
        for school in &schools {
            // full validation of each school's parameters against every student
            Instance::new(
                school.capacity,
                school.max_rank,
                types.clone(),
                school.quotas.clone(),
                records.clone(),
                school.priority.clone(),
            )
            .map_err(|e| Error::MalformedInstance(format!("school `{}`: {e}", school.id)))?;
        }
        let mut prefs = Vec::with_capacity(students.len());
        for s in &students {
            let mut list = Vec::with_capacity(s.preferences.len());
            for c in &s.preferences {
                let Ok(i) = schools.binary_search_by(|x| x.id.as_str().cmp(c)) else {
                    return bad(format!("student `{}` ranks unknown school `{c}`", s.record.id));
                };
                if list.contains(&i) {
                    return bad(format!("student `{}` ranks school `{c}` twice", s.record.id));
                }
                list.push(i);
            }
            prefs.push(list);
        }
        let index = students.iter().enumerate().map(|(i, s)| (s.record.id.clone(), i)).collect();
        Ok(MultiInstance { types, students, schools, prefs, index })
    }

    pub fn types(&self) -> &[String] {
        &self.types
    }

    pub fn students(&self) -> &[MultiStudent] {
        &self.students
    }

    pub fn schools(&self) -> &[School] {
        &self.schools
    }

    pub fn num_students(&self) -> usize {
        self.students.len()
    }

    pub fn student_id(&self, s: StudentIdx) -> &str {
        &self.students[s].record.id
    }

    pub fn student_index(&self, id: &str) -> Option<StudentIdx> {
        self.index.get(id).copied()
    }

    pub fn school_index(&self, id: &str) -> Result<usize> {
        self.schools
            .binary_search_by(|x| x.id.as_str().cmp(id))
            .map_err(|_| Error::UnknownSchool(id.to_string()))
    }
}

/// The single-school instance of `school` restricted to `applicants`, with
/// the school's priority restricted to them.
pub fn induced_instance<S: AsRef<str>>(multi: &MultiInstance, school: &str, applicants: &[S]) -> Result<Instance> {
    let c = multi.school_index(school)?;
    let mut set = Vec::with_capacity(applicants.len());
    for id in applicants {
        let id = id.as_ref();
        set.push(multi.student_index(id).ok_or_else(|| Error::UnknownStudent(id.to_string()))?);
    }
    induced(multi, c, &set)
}

fn induced(multi: &MultiInstance, c: usize, set: &[StudentIdx]) -> Result<Instance> {
    let school = &multi.schools[c];
    let mut member = vec![false; multi.num_students()];
    for &s in set {
        if std::mem::replace(&mut member[s], true) {
            return Err(Error::DuplicateStudent(multi.student_id(s).to_string()));
        }
    }
    let students = (0..multi.num_students())
        .filter(|&s| member[s])
        .map(|s| multi.students[s].record.clone())
        .collect();
    let priority = school
        .priority
        .iter()
        .filter(|id| multi.student_index(id).is_some_and(|s| member[s]))
        .cloned()
        .collect();
    Instance::new(
        school.capacity,
        school.max_rank,
        multi.types.clone(),
        school.quotas.clone(),
        students,
        priority,
    )
}

/// Proposals and decisions of one round.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Round {
    pub number: usize,
    /// `(student, school)` proposals made this round.
    pub proposals: Vec<(StudentIdx, usize)>,
    /// Students held by each school after the round.
    pub held: Vec<Vec<StudentIdx>>,
    /// Students released this round, new applicants or previously held.
    pub rejected: Vec<StudentIdx>,
}

/// Final assignment with the last decision of every school.
#[derive(Clone, Debug)]
pub struct MultiMatching {
    /// School index of every student, if any.
    pub assignment: Vec<Option<usize>>,
    /// Held students per school, in the school's priority order.
    pub selected: Vec<Vec<StudentIdx>>,
    pub rounds: Vec<Round>,
    /// Induced instance and choice from each school's last evaluation.
    pub decisions: Vec<Option<(Instance, ChoiceResult)>>,
}

/// Deferred acceptance: every unmatched student proposes to the best school
/// that has not yet rejected it; each school re-chooses among the students it
/// holds plus the new proposers; stops when nobody proposes.
pub fn run_gda(multi: &MultiInstance) -> Result<MultiMatching> {
    let n = multi.num_students();
    let num_schools = multi.schools.len();
    let mut next = vec![0usize; n];
    let mut assignment: Vec<Option<usize>> = vec![None; n];
    let mut held: Vec<Vec<StudentIdx>> = vec![Vec::new(); num_schools];
    let mut decisions = vec![None; num_schools];
    let mut rounds = Vec::new();

    loop {
        let mut proposals = Vec::new();
        let mut applicants: Vec<Vec<StudentIdx>> = vec![Vec::new(); num_schools];
        for s in 0..n {
            if assignment[s].is_none() && next[s] < multi.prefs[s].len() {
                let c = multi.prefs[s][next[s]];
                next[s] += 1;
                proposals.push((s, c));
                applicants[c].push(s);
            }
        }
        if proposals.is_empty() {
            break;
        }
        let mut rejected = Vec::new();
        for c in 0..num_schools {
            if applicants[c].is_empty() {
                continue;
            }
            let mut pool = held[c].clone();
            pool.extend(&applicants[c]);
            let inst = induced(multi, c, &pool)?;
            let choice = solve_flow(&inst)?;
            let mut keep = vec![false; n];
            for &i in &choice.selected {
                keep[multi.student_index(inst.student_id(i)).expect("induced ids")] = true;
            }
            let ordered = inst.priority().iter().map(|&i| multi.student_index(inst.student_id(i)).expect("induced ids"));
            held[c].clear();
            for s in ordered {
                if keep[s] {
                    held[c].push(s);
                    assignment[s] = Some(c);
                } else {
                    assignment[s] = None;
                    rejected.push(s);
                }
            }
            decisions[c] = Some((inst, choice));
        }
        rejected.sort_unstable();
        rounds.push(Round {
            number: rounds.len() + 1,
            proposals,
            held: held.clone(),
            rejected,
        });
    }
    Ok(MultiMatching {
        assignment,
        selected: held,
        rounds,
        decisions,
    })
}

/// Evidence that a choice function is not substitutable: `s2` is rejected
/// from `Y ∪ {s2}` but chosen from `Y ∪ {s1, s2}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SubstitutabilityViolation {
    pub s1: String,
    pub s2: String,
    pub base: Vec<String>,
    /// Choice from `Y ∪ {s2}`.
    pub without_s1: Vec<String>,
    /// Choice from `Y ∪ {s1, s2}`.
    pub with_s1: Vec<String>,
}

fn choose_from(instance: &Instance, set: &[StudentIdx]) -> Result<Vec<String>> {
    let sub = instance.restrict(set)?;
    let choice = solve_flow(&sub)?;
    Ok(choice.selected_ids(&sub).into_iter().map(String::from).collect())
}

/// Compares the choices from `Y ∪ {s2}` and `Y ∪ {s1, s2}`.
pub fn substitutability_probe(
    instance: &Instance,
    base: &[StudentIdx],
    s1: StudentIdx,
    s2: StudentIdx,
) -> Result<Option<SubstitutabilityViolation>> {
    instance.check_subset(base)?;
    instance.check_subset(&[s1, s2])?;
    if base.contains(&s1) || base.contains(&s2) {
        return Err(Error::Precondition("probed students must lie outside the base set".into()));
    }
    let id2 = instance.student_id(s2).to_string();
    let mut small = base.to_vec();
    small.push(s2);
    let without_s1 = choose_from(instance, &small)?;
    if without_s1.contains(&id2) {
        return Ok(None);
    }
    small.push(s1);
    let with_s1 = choose_from(instance, &small)?;
    if !with_s1.contains(&id2) {
        return Ok(None);
    }
    let mut base_ids: Vec<String> = base.iter().map(|&s| instance.student_id(s).to_string()).collect();
    base_ids.sort();
    Ok(Some(SubstitutabilityViolation {
        s1: instance.student_id(s1).to_string(),
        s2: id2,
        base: base_ids,
        without_s1,
        with_s1,
    }))
}

/// Largest instance [`find_substitutability_violation`] accepts.
pub const PROBE_LIMIT: usize = 12;

/// Exhaustive probe over every base set and ordered pair outside it.
pub fn find_substitutability_violation(instance: &Instance) -> Result<Option<SubstitutabilityViolation>> {
    let n = instance.num_students();
    if n > PROBE_LIMIT {
        return Err(Error::BudgetExceeded(format!("{n} students (probe limit {PROBE_LIMIT})")));
    }
    let mut cache: BTreeMap<u32, Vec<String>> = BTreeMap::new();
    let mut choice = |mask: u32| -> Result<Vec<String>> {
        if let Some(c) = cache.get(&mask) {
            return Ok(c.clone());
        }
        let set: Vec<StudentIdx> = (0..n).filter(|&s| mask >> s & 1 == 1).collect();
        let c = choose_from(instance, &set)?;
        cache.insert(mask, c.clone());
        Ok(c)
    };
    for mask in 0u32..1 << n {
        for s2 in (0..n).filter(|&s| mask >> s & 1 == 0) {
            let id2 = instance.student_id(s2).to_string();
            let without = choice(mask | 1 << s2)?;
            if without.contains(&id2) {
                continue;
            }
            for s1 in (0..n).filter(|&s| s != s2 && mask >> s & 1 == 0) {
                let with = choice(mask | 1 << s2 | 1 << s1)?;
                if with.contains(&id2) {
                    let base: Vec<StudentIdx> = (0..n).filter(|&s| mask >> s & 1 == 1).collect();
                    return substitutability_probe(instance, &base, s1, s2);
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::oracle::OracleBudget;
    use crate::verify::verify_all;

    fn names(multi: &MultiInstance, set: &[StudentIdx]) -> Vec<String> {
        set.iter().map(|&s| multi.student_id(s).to_string()).collect()
    }

    #[test]
    fn capped_types_violation() {
        let inst = fixtures::capped_types(true);
        let base = inst.resolve_ids(&["s11", "s12", "s14", "s15", "s21", "s22", "s23"]).unwrap();
        let s13 = inst.student_index("s13").unwrap();
        let s16 = inst.student_index("s16").unwrap();
        let v = substitutability_probe(&inst, &base, s16, s13).unwrap().unwrap();
        assert_eq!(v.without_s1, ["s11", "s12", "s21", "s22"]);
        assert_eq!(v.with_s1, ["s11", "s12", "s13", "s21"]);
        // swapping the roles finds nothing: s16 is never chosen
        assert!(substitutability_probe(&inst, &base, s13, s16).unwrap().is_none());
        assert!(substitutability_probe(&inst, &base, s11_of(&inst), s13).is_err());
    }

    fn s11_of(inst: &Instance) -> StudentIdx {
        inst.student_index("s11").unwrap()
    }

    #[test]
    fn empty_base_never_violates() {
        let inst = fixtures::single_reserve();
        for a in 0..4 {
            for b in 0..4 {
                if a != b {
                    assert!(substitutability_probe(&inst, &[], a, b).unwrap().is_none());
                }
            }
        }
    }

    #[test]
    fn single_type_population_is_substitutable() {
        let students: Vec<_> = (0..6).map(|i| StudentRecord::new(format!("a{i}"), &["t"])).collect();
        let prio: Vec<String> = [3, 1, 4, 0, 5, 2].iter().map(|i| format!("a{i}")).collect();
        let inst = Instance::new(3, 2, vec!["t".into()], vec![Quota::new("t", 1, 2)], students, prio).unwrap();
        assert!(find_substitutability_violation(&inst).unwrap().is_none());
    }

    #[test]
    fn exhaustive_search_finds_capped_types() {
        let inst = fixtures::capped_types(true);
        let v = find_substitutability_violation(&inst).unwrap().expect("violation");
        let base: Vec<StudentIdx> = inst.resolve_ids(&v.base).unwrap();
        let s1 = inst.student_index(&v.s1).unwrap();
        let s2 = inst.student_index(&v.s2).unwrap();
        assert_eq!(substitutability_probe(&inst, &base, s1, s2).unwrap(), Some(v));
        // without s16 the two types alone still break it on a smaller base
        assert!(find_substitutability_violation(&fixtures::capped_types(false)).unwrap().is_some());
        let students: Vec<_> = (0..13).map(|i| StudentRecord::new(format!("a{i}"), &[])).collect();
        let prio = (0..13).map(|i| format!("a{i}")).collect();
        let big = Instance::new(2, 1, vec![], vec![], students, prio).unwrap();
        assert!(matches!(find_substitutability_violation(&big), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn induced_instances() {
        let multi = fixtures::two_schools();
        let all: Vec<String> = multi.students().iter().map(|s| s.record.id.clone()).collect();
        let x = induced_instance(&multi, "x", &all).unwrap();
        assert_eq!(x.num_students(), 4);
        assert_eq!(x.student_id(x.priority()[0]), "b");
        let empty = induced_instance(&multi, "y", &Vec::<String>::new()).unwrap();
        assert_eq!(empty.num_students(), 0);
        assert!(solve_flow(&empty).unwrap().selected.is_empty());
        assert!(matches!(induced_instance(&multi, "z", &all), Err(Error::UnknownSchool(_))));
    }

    #[test]
    fn two_school_trace() {
        let multi = fixtures::two_schools();
        let out = run_gda(&multi).unwrap();
        let x = multi.school_index("x").unwrap();
        let y = multi.school_index("y").unwrap();
        let id = |s: &str| multi.student_index(s).unwrap();
        assert_eq!(out.rounds.len(), 2);

        let r1 = &out.rounds[0];
        assert_eq!(r1.proposals, vec![(id("a"), x), (id("b"), x), (id("c"), x), (id("d"), y)]);
        assert_eq!(names(&multi, &r1.held[x]), ["a"]);
        assert_eq!(names(&multi, &r1.held[y]), ["d"]);
        assert_eq!(names(&multi, &r1.rejected), ["b", "c"]);

        let r2 = &out.rounds[1];
        assert_eq!(r2.proposals, vec![(id("c"), y)]);
        assert_eq!(names(&multi, &r2.held[y]), ["c"]);
        assert_eq!(names(&multi, &r2.rejected), ["d"]);

        assert_eq!(out.assignment, vec![Some(x), None, Some(y), None]);
    }

    #[test]
    fn single_school_equals_solver() {
        let inst = fixtures::four_groups_scaled(4);
        let multi = fixtures::single_school(&inst, "only");
        let out = run_gda(&multi).unwrap();
        let direct = solve_flow(&inst).unwrap();
        assert_eq!(names(&multi, &out.selected[0]), direct.selected_ids(&inst));
        assert_eq!(out.rounds.len(), 1);
    }

    #[test]
    fn disjoint_populations_get_first_choices() {
        let students = vec![
            MultiStudent { record: StudentRecord::new("p", &["t1"]), preferences: vec!["x".into(), "y".into()] },
            MultiStudent { record: StudentRecord::new("q", &["t2"]), preferences: vec!["y".into(), "x".into()] },
            MultiStudent { record: StudentRecord::new("r", &["t1"]), preferences: vec!["x".into()] },
        ];
        let prio: Vec<String> = ["p", "q", "r"].map(String::from).to_vec();
        let school = |id: &str, t: &str| School {
            id: id.into(),
            capacity: 3,
            max_rank: 2,
            quotas: vec![Quota::new(t, 1, 2)],
            priority: prio.clone(),
        };
        let multi = MultiInstance::new(
            vec!["t1".into(), "t2".into()],
            students,
            vec![school("y", "t2"), school("x", "t1")],
        )
        .unwrap();
        let out = run_gda(&multi).unwrap();
        let x = multi.school_index("x").unwrap();
        let y = multi.school_index("y").unwrap();
        assert_eq!(out.assignment, vec![Some(x), Some(y), Some(x)]);
        assert!(out.rounds.iter().all(|r| r.rejected.is_empty()));
    }

    #[test]
    fn held_sets_satisfy_axioms_every_round() {
        let multi = fixtures::two_schools();
        let out = run_gda(&multi).unwrap();
        for (c, d) in out.decisions.iter().enumerate() {
            let (inst, choice) = d.as_ref().unwrap();
            assert!(verify_all(inst, &choice.selected, &OracleBudget::default()).unwrap().all_pass(), "school {c}");
        }
        let total_proposals: usize = out.rounds.iter().map(|r| r.proposals.len()).sum();
        assert!(total_proposals <= multi.num_students() * multi.schools().len());
    }

    #[test]
    fn malformed_multi_instances() {
        let s = |prefs: &[&str]| vec![MultiStudent {
            record: StudentRecord::new("a", &[]),
            preferences: prefs.iter().map(|p| p.to_string()).collect(),
        }];
        let school = School { id: "x".into(), capacity: 1, max_rank: 1, quotas: vec![], priority: vec!["a".into()] };
        assert!(MultiInstance::new(vec![], s(&["x", "x"]), vec![school.clone()]).is_err());
        assert!(MultiInstance::new(vec![], s(&["w"]), vec![school.clone()]).is_err());
        assert!(MultiInstance::new(vec![], s(&["x"]), vec![school.clone(), school.clone()]).is_err());
        let mut bad = school.clone();
        bad.priority.clear();
        assert!(MultiInstance::new(vec![], s(&["x"]), vec![bad]).is_err());
        assert!(MultiInstance::new(vec![], s(&["x"]), vec![school]).is_ok());
    }
}
