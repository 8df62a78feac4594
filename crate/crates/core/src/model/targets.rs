use std::collections::BTreeMap;

use super::{Instance, Ratio};
use crate::error::{Error, Result};

/// Per-group minimum counts `δ_u`, indexed like [`Instance::groups`].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TargetVector(Vec<usize>);

impl TargetVector {
    /// Validates `values` against the instance's groups.
    pub fn new(instance: &Instance, values: Vec<usize>) -> Result<Self> {
        if values.len() != instance.num_groups() {
            return Err(Error::InvalidTargets(format!(
                "{} targets for {} groups",
                values.len(),
                instance.num_groups()
            )));
        }
        for (g, (&v, group)) in values.iter().zip(instance.groups()).enumerate() {
            if v > group.size() {
                return Err(Error::InvalidTargets(format!(
                    "target {v} for group `{}` exceeds its {} students",
                    instance.group_label(g),
                    group.size()
                )));
            }
        }
        Ok(TargetVector(values))
    }

    /// Wraps raw per-group values without checking them against an instance.
    pub fn from_raw(values: Vec<usize>) -> Self {
        TargetVector(values)
    }

    pub fn zeros(instance: &Instance) -> Self {
        TargetVector(vec![0; instance.num_groups()])
    }

    /// Smallest per-group counts whose selection ratios all reach `alpha`:
    /// `⌈alpha · |S_u|⌉`.
    pub fn at_ratio(instance: &Instance, alpha: Ratio) -> Self {
        TargetVector(
            instance
                .groups()
                .iter()
                .map(|g| alpha.ceil_mul(g.size()).min(g.size()))
                .collect(),
        )
    }

    /// Targets from a `label → count` map naming every group exactly once.
    pub fn from_keyed(instance: &Instance, map: &BTreeMap<String, usize>) -> Result<Self> {
        let mut values = vec![None; instance.num_groups()];
        for (label, &v) in map {
            let g = instance
                .group_by_label(label)
                .ok_or_else(|| Error::InvalidTargets(format!("unknown group `{label}`")))?;
            values[g] = Some(v);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(g, v)| {
                v.ok_or_else(|| Error::InvalidTargets(format!("no target for group `{}`", instance.group_label(g))))
            })
            .collect::<Result<Vec<_>>>()?;
        TargetVector::new(instance, values)
    }

    pub fn get(&self, g: usize) -> usize {
        self.0[g]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Componentwise `self ≤ counts`.
    pub fn met_by(&self, counts: &[usize]) -> bool {
        self.0.len() == counts.len() && self.0.iter().zip(counts).all(|(d, c)| d <= c)
    }

    pub fn keyed(&self, instance: &Instance) -> BTreeMap<String, usize> {
        instance.keyed(&self.0)
    }
}
