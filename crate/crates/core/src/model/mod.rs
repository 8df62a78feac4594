//! Problem instance, groups, signatures, ratios and target vectors.

mod instance;
mod ratio;
mod signature;
mod targets;

pub use instance::{
    build_groups, Group, GroupKey, Instance, Quota, StudentIdx, StudentRecord, TypeIdx, TypeRef,
    GENERAL_TYPE_NAME,
};
pub use ratio::{general_selection_ratio, selection_ratio, ExtRatio, Ratio};
pub use signature::{lex_compare, Signature};
pub use targets::TargetVector;

/// Outcome of the balanced choice function together with its audit data.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChoiceResult {
    /// Selected students, highest priority first.
    pub selected: Vec<StudentIdx>,
    pub per_group_counts: Vec<usize>,
    /// Signature of a maximal-diversity matching covering `selected`.
    pub signature: Signature,
    /// Max-min selection ratio.
    pub alpha: Ratio,
    /// Crucial vector for `alpha`.
    pub targets: TargetVector,
}

impl ChoiceResult {
    pub fn selected_ids<'a>(&self, instance: &'a Instance) -> Vec<&'a str> {
        self.selected.iter().map(|&s| instance.student_id(s)).collect()
    }

    /// Minimum selection ratio over all groups (0 when there are no groups).
    pub fn min_ratio(&self, instance: &Instance) -> Ratio {
        min_selection_ratio(instance, &self.per_group_counts)
    }
}

/// `min_u counts_u / |S_u|`, or 0 for an instance without students.
pub fn min_selection_ratio(instance: &Instance, counts: &[usize]) -> Ratio {
    instance
        .groups()
        .iter()
        .zip(counts)
        .map(|(g, &c)| Ratio::new(c as i64, g.size() as i64).expect("groups are non-empty"))
        .min()
        .unwrap_or_else(Ratio::zero)
}
