use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// Index of a student inside an [`Instance`] (position in the student list).
pub type StudentIdx = usize;
/// Index of a declared type; types are kept sorted by name.
pub type TypeIdx = usize;

/// Name reserved for the implicit general type.
pub const GENERAL_TYPE_NAME: &str = "t0";

/// Seat/type reference that includes the implicit general type.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum TypeRef {
    Typed(TypeIdx),
    General,
}

/// A student as it appears in input: an id and the names of its types.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StudentRecord {
    pub id: String,
    pub types: Vec<String>,
}

impl StudentRecord {
    pub fn new(id: impl Into<String>, types: &[&str]) -> Self {
        StudentRecord {
            id: id.into(),
            types: types.iter().map(|t| t.to_string()).collect(),
        }
    }
}

/// One ranked quota entry `η_t^rank`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Quota {
    pub type_name: String,
    pub rank: usize,
    pub quota: usize,
}

impl Quota {
    pub fn new(type_name: impl Into<String>, rank: usize, quota: usize) -> Self {
        Quota {
            type_name: type_name.into(),
            rank,
            quota,
        }
    }
}

/// Canonical group key: the sorted list of a student's type indices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GroupKey(pub Vec<TypeIdx>);

impl GroupKey {
    pub fn has(&self, ty: TypeIdx) -> bool {
        self.0.binary_search(&ty).is_ok()
    }

    /// Whether students of this group may occupy a seat of `ty`.
    pub fn admits(&self, ty: TypeRef) -> bool {
        match ty {
            TypeRef::General => true,
            TypeRef::Typed(t) => self.has(t),
        }
    }
}

/// Students sharing one exact type set, listed highest priority first.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Group {
    pub key: GroupKey,
    pub members: Vec<StudentIdx>,
}

impl Group {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
struct Student {
    id: String,
    types: Vec<TypeIdx>,
}

/// A single-school selection problem.
///
/// Immutable after construction. Groups are derived once and cached.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Instance {
    students: Vec<Student>,
    type_names: Vec<String>,
    capacity: usize,
    max_rank: usize,
    /// `quotas[t][j - 1]` is the number of type-`t` seats at rank `j`.
    quotas: Vec<Vec<usize>>,
    priority: Vec<StudentIdx>,
    priority_pos: Vec<usize>,
    groups: Vec<Group>,
    group_of: Vec<usize>,
    index: HashMap<String, StudentIdx>,
}

impl Instance {
    /// Validates and builds an instance. `priority` lists student ids highest first.
    pub fn new(
        capacity: usize,
        max_rank: usize,
        types: Vec<String>,
        quotas: Vec<Quota>,
        students: Vec<StudentRecord>,
        priority: Vec<String>,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::MalformedInstance(m));
        if max_rank == 0 {
            return bad("max_rank must be at least 1".into());
        }

        let mut type_names = types;
        type_names.sort();
        for w in type_names.windows(2) {
            if w[0] == w[1] {
                return bad(format!("type `{}` declared twice", w[0]));
            }
        }
        for t in &type_names {
            if t.is_empty() {
                return bad("empty type name".into());
            }
            if t == GENERAL_TYPE_NAME {
                return bad(format!("`{GENERAL_TYPE_NAME}` is the implicit general type"));
            }
        }
        let type_idx = |name: &str| type_names.binary_search_by(|t| t.as_str().cmp(name)).ok();

        let mut quota_table = vec![vec![0usize; max_rank]; type_names.len()];
        let mut seen_quota = BTreeSet::new();
        for q in &quotas {
            let Some(t) = type_idx(&q.type_name) else {
                return bad(format!("quota for unknown type `{}`", q.type_name));
            };
            if q.rank == 0 || q.rank > max_rank {
                return bad(format!(
                    "quota rank {} for `{}` outside 1..={max_rank}",
                    q.rank, q.type_name
                ));
            }
            if !seen_quota.insert((t, q.rank)) {
                return bad(format!(
                    "duplicate quota for `{}` at rank {}",
                    q.type_name, q.rank
                ));
            }
            quota_table[t][q.rank - 1] = q.quota;
        }

        let mut index = HashMap::with_capacity(students.len());
        let mut parsed = Vec::with_capacity(students.len());
        for (i, s) in students.into_iter().enumerate() {
            if index.insert(s.id.clone(), i).is_some() {
                return bad(format!("duplicate student id `{}`", s.id));
            }
            let mut tys = Vec::with_capacity(s.types.len());
            for name in &s.types {
                match type_idx(name) {
                    Some(t) => tys.push(t),
                    None => {
                        return bad(format!("student `{}` has unknown type `{name}`", s.id));
                    }
                }
            }
            tys.sort_unstable();
            let before = tys.len();
            tys.dedup();
            if tys.len() != before {
                return bad(format!("student `{}` lists a type twice", s.id));
            }
            parsed.push(Student { id: s.id, types: tys });
        }

        if priority.len() != parsed.len() {
            return bad(format!(
                "priority lists {} ids for {} students",
                priority.len(),
                parsed.len()
            ));
        }
        let mut priority_pos = vec![usize::MAX; parsed.len()];
        let mut order = Vec::with_capacity(parsed.len());
        for (pos, id) in priority.iter().enumerate() {
            let Some(&i) = index.get(id) else {
                return bad(format!("priority mentions unknown student `{id}`"));
            };
            if priority_pos[i] != usize::MAX {
                return bad(format!("student `{id}` appears twice in priority"));
            }
            priority_pos[i] = pos;
            order.push(i);
        }

        let (groups, group_of) = partition_groups(&parsed, &order);
        Ok(Instance {
            students: parsed,
            type_names,
            capacity,
            max_rank,
            quotas: quota_table,
            priority: order,
            priority_pos,
            groups,
            group_of,
            index,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn max_rank(&self) -> usize {
        self.max_rank
    }

    pub fn num_students(&self) -> usize {
        self.students.len()
    }

    pub fn type_names(&self) -> &[String] {
        &self.type_names
    }

    pub fn num_types(&self) -> usize {
        self.type_names.len()
    }

    pub fn type_index(&self, name: &str) -> Option<TypeIdx> {
        self.type_names
            .binary_search_by(|t| t.as_str().cmp(name))
            .ok()
    }

    pub fn type_label(&self, ty: TypeRef) -> &str {
        match ty {
            TypeRef::General => GENERAL_TYPE_NAME,
            TypeRef::Typed(t) => &self.type_names[t],
        }
    }

    /// `η_t^rank` for declared types; the general type holds `capacity` seats at `max_rank`.
    pub fn quota(&self, ty: TypeRef, rank: usize) -> usize {
        match ty {
            TypeRef::Typed(t) => self.quotas[t][rank - 1],
            TypeRef::General if rank == self.max_rank => self.capacity,
            TypeRef::General => 0,
        }
    }

    /// All declared types followed by the general type.
    pub fn type_refs(&self) -> impl Iterator<Item = TypeRef> + '_ {
        (0..self.type_names.len())
            .map(TypeRef::Typed)
            .chain(std::iter::once(TypeRef::General))
    }

    pub fn quota_entries(&self) -> Vec<Quota> {
        let mut out = Vec::new();
        for (t, row) in self.quotas.iter().enumerate() {
            for (j, &q) in row.iter().enumerate() {
                if q > 0 {
                    out.push(Quota::new(self.type_names[t].clone(), j + 1, q));
                }
            }
        }
        out
    }

    pub fn student_id(&self, s: StudentIdx) -> &str {
        &self.students[s].id
    }

    pub fn student_types(&self, s: StudentIdx) -> &[TypeIdx] {
        &self.students[s].types
    }

    pub fn student_index(&self, id: &str) -> Option<StudentIdx> {
        self.index.get(id).copied()
    }

    pub fn student_record(&self, s: StudentIdx) -> StudentRecord {
        StudentRecord {
            id: self.students[s].id.clone(),
            types: self.students[s]
                .types
                .iter()
                .map(|&t| self.type_names[t].clone())
                .collect(),
        }
    }

    /// Student indices from highest to lowest priority.
    pub fn priority(&self) -> &[StudentIdx] {
        &self.priority
    }

    /// Position in the priority order; 0 is the highest priority.
    pub fn priority_pos(&self, s: StudentIdx) -> usize {
        self.priority_pos[s]
    }

    /// `a ≻ b`.
    pub fn prefers(&self, a: StudentIdx, b: StudentIdx) -> bool {
        self.priority_pos[a] < self.priority_pos[b]
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn group_of(&self, s: StudentIdx) -> usize {
        self.group_of[s]
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Group::size).collect()
    }

    /// `"+"`-joined type names of a group, `"none"` for the empty type set.
    pub fn group_label(&self, g: usize) -> String {
        let key = &self.groups[g].key;
        if key.0.is_empty() {
            "none".to_string()
        } else {
            key.0
                .iter()
                .map(|&t| self.type_names[t].as_str())
                .collect::<Vec<_>>()
                .join("+")
        }
    }

    pub fn group_by_label(&self, label: &str) -> Option<usize> {
        (0..self.groups.len()).find(|&g| self.group_label(g) == label)
    }

    /// Number of students of each group in `set`.
    pub fn group_counts(&self, set: &[StudentIdx]) -> Vec<usize> {
        let mut counts = vec![0; self.groups.len()];
        for &s in set {
            counts[self.group_of[s]] += 1;
        }
        counts
    }

    /// Resolves ids, rejecting unknown and duplicate entries.
    pub fn resolve_ids<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<StudentIdx>> {
        let mut out = Vec::with_capacity(ids.len());
        let mut seen = vec![false; self.students.len()];
        for id in ids {
            let id = id.as_ref();
            let s = self
                .student_index(id)
                .ok_or_else(|| Error::UnknownStudent(id.to_string()))?;
            if std::mem::replace(&mut seen[s], true) {
                return Err(Error::DuplicateStudent(id.to_string()));
            }
            out.push(s);
        }
        Ok(out)
    }

    /// Checks that `set` holds distinct in-range student indices.
    pub fn check_subset(&self, set: &[StudentIdx]) -> Result<()> {
        let mut seen = vec![false; self.students.len()];
        for &s in set {
            if s >= self.students.len() {
                return Err(Error::StudentOutOfRange(s));
            }
            if std::mem::replace(&mut seen[s], true) {
                return Err(Error::DuplicateStudent(self.students[s].id.clone()));
            }
        }
        Ok(())
    }

    /// Sorts a student set by descending priority.
    pub fn sort_by_priority(&self, set: &mut [StudentIdx]) {
        set.sort_by_key(|&s| self.priority_pos[s]);
    }

    /// The instance restricted to `subset` with the same capacity, quotas and
    /// relative priority.
    pub fn restrict(&self, subset: &[StudentIdx]) -> Result<Instance> {
        self.check_subset(subset)?;
        let mut ordered = subset.to_vec();
        self.sort_by_priority(&mut ordered);
        let mut in_set = vec![false; self.students.len()];
        for &s in subset {
            in_set[s] = true;
        }
        let students = (0..self.students.len())
            .filter(|&s| in_set[s])
            .map(|s| self.student_record(s))
            .collect();
        let priority = ordered.iter().map(|&s| self.students[s].id.clone()).collect();
        Instance::new(
            self.capacity,
            self.max_rank,
            self.type_names.clone(),
            self.quota_entries(),
            students,
            priority,
        )
    }

    /// Per-group keyed map, ordered by label.
    pub fn keyed<T: Copy>(&self, per_group: &[T]) -> BTreeMap<String, T> {
        per_group
            .iter()
            .enumerate()
            .map(|(g, &v)| (self.group_label(g), v))
            .collect()
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} students, {} groups, {} types, capacity {}, {} ranks",
            self.students.len(),
            self.groups.len(),
            self.type_names.len(),
            self.capacity,
            self.max_rank
        )
    }
}

/// Partitions students by exact type set. Groups are ordered by key and their
/// members by descending priority.
fn partition_groups(students: &[Student], priority: &[StudentIdx]) -> (Vec<Group>, Vec<usize>) {
    let mut by_key: BTreeMap<&[TypeIdx], Vec<StudentIdx>> = BTreeMap::new();
    for &s in priority {
        by_key.entry(&students[s].types).or_default().push(s);
    }
    let mut group_of = vec![0; students.len()];
    let groups: Vec<Group> = by_key
        .into_iter()
        .enumerate()
        .map(|(g, (key, members))| {
            for &s in &members {
                group_of[s] = g;
            }
            Group {
                key: GroupKey(key.to_vec()),
                members,
            }
        })
        .collect();
    (groups, group_of)
}

/// Groups of an instance: the partition of students by canonical type set.
pub fn build_groups(instance: &Instance) -> Vec<Group> {
    instance.groups.clone()
}
