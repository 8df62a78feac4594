//! JSON file formats.
//!
//! Group keys are the `+`-joined sorted type names of the group, `none` for
//! students without types. Ratios are exact fractions written as `"p/q"`.
//! All maps are ordered, so equal inputs serialize to equal bytes.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gda::{MultiInstance, MultiMatching, MultiStudent, School};
use crate::model::{ChoiceResult, Instance, Quota, StudentRecord, TargetVector};

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuotaEntry {
    #[serde(rename = "type")]
    pub type_name: String,
    pub rank: usize,
    pub quota: usize,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudentEntry {
    pub id: String,
    #[serde(default)]
    pub types: Vec<String>,
}

/// Single-school instance document.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub capacity: usize,
    /// Rank of the general seats. Defaults to one more than the largest quota
    /// rank, or 1 without quotas.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rank: Option<usize>,
    #[serde(default)]
    pub types: Vec<String>,
    #[serde(default)]
    pub quotas: Vec<QuotaEntry>,
    pub students: Vec<StudentEntry>,
    pub priority: Vec<String>,
}

fn default_rank(quotas: &[QuotaEntry]) -> usize {
    quotas.iter().map(|q| q.rank + 1).max().unwrap_or(1)
}

fn quotas_of(entries: &[QuotaEntry]) -> Vec<Quota> {
    entries.iter().map(|q| Quota::new(q.type_name.clone(), q.rank, q.quota)).collect()
}

fn quota_entries(quotas: Vec<Quota>) -> Vec<QuotaEntry> {
    quotas
        .into_iter()
        .map(|q| QuotaEntry { type_name: q.type_name, rank: q.rank, quota: q.quota })
        .collect()
}

fn records(entries: &[StudentEntry]) -> Vec<StudentRecord> {
    entries.iter().map(|s| StudentRecord { id: s.id.clone(), types: s.types.clone() }).collect()
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<Instance> {
        let max_rank = self.max_rank.unwrap_or_else(|| default_rank(&self.quotas));
        Instance::new(
            self.capacity,
            max_rank,
            self.types,
            quotas_of(&self.quotas),
            records(&self.students),
            self.priority,
        )
    }

    pub fn from_instance(instance: &Instance) -> Self {
        InstanceFile {
            capacity: instance.capacity(),
            max_rank: Some(instance.max_rank()),
            types: instance.type_names().to_vec(),
            quotas: quota_entries(instance.quota_entries()),
            students: (0..instance.num_students())
                .map(|s| {
                    let r = instance.student_record(s);
                    StudentEntry { id: r.id, types: r.types }
                })
                .collect(),
            priority: instance.priority().iter().map(|&s| instance.student_id(s).to_string()).collect(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiStudentEntry {
    pub id: String,
    #[serde(default)]
    pub types: Vec<String>,
    pub preferences: Vec<String>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchoolEntry {
    pub id: String,
    pub capacity: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rank: Option<usize>,
    #[serde(default)]
    pub quotas: Vec<QuotaEntry>,
    pub priority: Vec<String>,
}

/// Multi-school document.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiInstanceFile {
    #[serde(default)]
    pub types: Vec<String>,
    pub students: Vec<MultiStudentEntry>,
    pub schools: Vec<SchoolEntry>,
}

impl MultiInstanceFile {
    pub fn into_multi(self) -> Result<MultiInstance> {
        let students = self
            .students
            .into_iter()
            .map(|s| MultiStudent {
                record: StudentRecord { id: s.id, types: s.types },
                preferences: s.preferences,
            })
            .collect();
        let schools = self
            .schools
            .into_iter()
            .map(|c| School {
                max_rank: c.max_rank.unwrap_or_else(|| default_rank(&c.quotas)),
                quotas: quotas_of(&c.quotas),
                id: c.id,
                capacity: c.capacity,
                priority: c.priority,
            })
            .collect();
        MultiInstance::new(self.types, students, schools)
    }

    pub fn from_multi(multi: &MultiInstance) -> Self {
        MultiInstanceFile {
            types: multi.types().to_vec(),
            students: multi
                .students()
                .iter()
                .map(|s| MultiStudentEntry {
                    id: s.record.id.clone(),
                    types: s.record.types.clone(),
                    preferences: s.preferences.clone(),
                })
                .collect(),
            schools: multi
                .schools()
                .iter()
                .map(|c| SchoolEntry {
                    id: c.id.clone(),
                    capacity: c.capacity,
                    max_rank: Some(c.max_rank),
                    quotas: quota_entries(c.quotas.clone()),
                    priority: c.priority.clone(),
                })
                .collect(),
        }
    }
}

/// Output of `solve` and `baseline`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultFile {
    pub alpha: String,
    pub targets: BTreeMap<String, usize>,
    /// Highest priority first.
    pub selected: Vec<String>,
    pub per_group: BTreeMap<String, usize>,
    pub signature: Vec<usize>,
    pub backend: String,
}

impl ResultFile {
    pub fn new(instance: &Instance, result: &ChoiceResult, backend: &str) -> Self {
        ResultFile {
            alpha: result.alpha.to_string(),
            targets: result.targets.keyed(instance),
            selected: result.selected_ids(instance).into_iter().map(String::from).collect(),
            per_group: instance.keyed(&result.per_group_counts),
            signature: result.signature.as_slice().to_vec(),
            backend: backend.to_string(),
        }
    }
}

/// One round of deferred acceptance.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundFile {
    pub round: usize,
    /// student id → school id
    pub proposals: BTreeMap<String, String>,
    /// school id → held students, in the school's priority order
    pub held: BTreeMap<String, Vec<String>>,
    pub rejected: Vec<String>,
}

/// Output of `gda`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GdaResultFile {
    /// student id → school id, `null` when unmatched
    pub assignment: BTreeMap<String, Option<String>>,
    /// Each school's last decision.
    pub schools: BTreeMap<String, ResultFile>,
    pub rounds: Vec<RoundFile>,
}

impl GdaResultFile {
    pub fn new(multi: &MultiInstance, matching: &MultiMatching) -> Self {
        let school_id = |c: usize| multi.schools()[c].id.clone();
        let sid = |s: usize| multi.student_id(s).to_string();
        let assignment = matching
            .assignment
            .iter()
            .enumerate()
            .map(|(s, c)| (sid(s), c.map(school_id)))
            .collect();
        let schools = matching
            .decisions
            .iter()
            .enumerate()
            .filter_map(|(c, d)| d.as_ref().map(|(inst, res)| (school_id(c), ResultFile::new(inst, res, "flow"))))
            .collect();
        let rounds = matching
            .rounds
            .iter()
            .map(|r| RoundFile {
                round: r.number,
                proposals: r.proposals.iter().map(|&(s, c)| (sid(s), school_id(c))).collect(),
                held: r
                    .held
                    .iter()
                    .enumerate()
                    .map(|(c, set)| (school_id(c), set.iter().map(|&s| sid(s)).collect()))
                    .collect(),
                rejected: r.rejected.iter().map(|&s| sid(s)).collect(),
            })
            .collect();
        GdaResultFile { assignment, schools, rounds }
    }
}

/// Parses a targets document: a map from group key to minimum count.
pub fn parse_targets(instance: &Instance, text: &str) -> Result<TargetVector> {
    let map: BTreeMap<String, usize> = from_json(text)?;
    TargetVector::from_keyed(instance, &map)
}

fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    from_json::<InstanceFile>(text)?.into_instance()
}

pub fn parse_multi(text: &str) -> Result<MultiInstance> {
    from_json::<MultiInstanceFile>(text)?.into_multi()
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn read_multi(path: &Path) -> Result<MultiInstance> {
    parse_multi(&std::fs::read_to_string(path)?)
}

pub fn read_result(path: &Path) -> Result<ResultFile> {
    from_json(&std::fs::read_to_string(path)?)
}

pub fn read_targets(instance: &Instance, path: &Path) -> Result<TargetVector> {
    parse_targets(instance, &std::fs::read_to_string(path)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn instance_to_json(instance: &Instance) -> Result<String> {
    to_json(&InstanceFile::from_instance(instance))
}
