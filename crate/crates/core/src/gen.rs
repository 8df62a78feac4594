//! Reproducible pseudo-random instances.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Instance, Quota, StudentRecord};

/// How typed quotas are laid out over the ranks.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum QuotaStyle {
    /// Rank 1 holds a minimum quota, rank 2 the slack up to a maximum quota.
    #[default]
    MinMax,
    /// Independent random quotas on every rank below the general rank.
    Uniform,
}

impl fmt::Display for QuotaStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuotaStyle::MinMax => "minmax",
            QuotaStyle::Uniform => "uniform",
        })
    }
}

impl FromStr for QuotaStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minmax" => Ok(QuotaStyle::MinMax),
            "uniform" => Ok(QuotaStyle::Uniform),
            other => Err(Error::InvalidParameters(format!("unknown quota style `{other}`"))),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GenParams {
    pub students: usize,
    pub types: usize,
    pub ranks: usize,
    pub seed: u64,
    pub style: QuotaStyle,
    /// Defaults to half the students, rounded up.
    pub capacity: Option<usize>,
    /// Number of distinct type sets; all `2^types` subsets may occur when unset.
    pub groups: Option<usize>,
}

impl GenParams {
    pub fn new(students: usize, types: usize, ranks: usize, seed: u64) -> Self {
        GenParams {
            students,
            types,
            ranks,
            seed,
            style: QuotaStyle::default(),
            capacity: None,
            groups: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameters(m.into()));
        if self.types == 0 {
            return bad("at least one type is required");
        }
        if self.ranks == 0 {
            return bad("at least one rank is required");
        }
        if self.style == QuotaStyle::MinMax && self.ranks < 2 {
            return bad("minmax quotas need at least two ranks");
        }
        if let Some(g) = self.groups {
            if self.types > 20 {
                return bad("at most 20 types when the number of groups is fixed");
            }
            if g == 0 || g > 1 << self.types {
                return bad("groups must lie in 1..=2^types");
            }
        }
        Ok(())
    }
}

/// Type names `t1..tk`.
pub fn type_names(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("t{i}")).collect()
}

/// Generates an instance; identical parameters give identical instances.
pub fn generate(params: &GenParams) -> Result<Instance> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let k = params.types;
    let n = params.students;
    let q = params.capacity.unwrap_or(n.div_ceil(2));
    let names = type_names(k);

    let palette: Option<Vec<u64>> = params.groups.map(|g| {
        let mut all: Vec<u64> = (0..1u64 << k).collect();
        all.shuffle(&mut rng);
        all.truncate(g);
        all
    });
    let width = n.saturating_sub(1).to_string().len();
    let students: Vec<StudentRecord> = (0..n)
        .map(|i| {
            let mask = match &palette {
                Some(p) => p[rng.gen_range(0..p.len())],
                None => (0..k).filter(|_| rng.gen_bool(0.5)).fold(0, |m, t| m | 1 << t),
            };
            StudentRecord {
                id: format!("s{i:0width$}"),
                types: (0..k).filter(|t| mask >> t & 1 == 1).map(|t| names[t].clone()).collect(),
            }
        })
        .collect();

    let share = (q / k).max(1);
    let mut quotas = Vec::new();
    for name in &names {
        match params.style {
            QuotaStyle::MinMax => {
                let lo = rng.gen_range(0..=share);
                let hi = rng.gen_range(lo..=(lo + share));
                for (rank, quota) in [(1, lo), (2, hi - lo)] {
                    if quota > 0 {
                        quotas.push(Quota::new(name.clone(), rank, quota));
                    }
                }
            }
            QuotaStyle::Uniform => {
                for rank in 1..=params.ranks.saturating_sub(1).max(1) {
                    let quota = rng.gen_range(0..=share);
                    if quota > 0 {
                        quotas.push(Quota::new(name.clone(), rank, quota));
                    }
                }
            }
        }
    }

    let mut priority: Vec<String> = students.iter().map(|s| s.id.clone()).collect();
    priority.shuffle(&mut rng);
    Instance::new(q, params.ranks, names, quotas, students, priority)
}

/// Size limits for [`random_small_instance`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SmallLimits {
    pub max_students: usize,
    pub max_types: usize,
    pub max_rank: usize,
    pub max_capacity: usize,
    /// Bound on typed seats plus capacity.
    pub max_seats: usize,
}

impl Default for SmallLimits {
    fn default() -> Self {
        SmallLimits {
            max_students: 10,
            max_types: 3,
            max_rank: 3,
            max_capacity: 6,
            max_seats: 18,
        }
    }
}

/// A random instance inside `limits`, sized for exhaustive cross-checks.
pub fn random_small_instance<R: Rng>(rng: &mut R, limits: &SmallLimits) -> Instance {
    let n = rng.gen_range(0..=limits.max_students);
    let k = rng.gen_range(0..=limits.max_types);
    let r = rng.gen_range(1..=limits.max_rank);
    let q = rng.gen_range(0..=limits.max_capacity);
    let names = type_names(k);
    let mut room = limits.max_seats.saturating_sub(q);
    let mut quotas = Vec::new();
    for name in &names {
        for rank in 1..=r {
            if rng.gen_bool(0.5) {
                let quota = rng.gen_range(1..=3).min(room);
                if quota > 0 {
                    room -= quota;
                    quotas.push(Quota::new(name.clone(), rank, quota));
                }
            }
        }
    }
    let students: Vec<StudentRecord> = (0..n)
        .map(|i| StudentRecord {
            id: format!("s{i}"),
            types: names.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect(),
        })
        .collect();
    let mut priority: Vec<String> = students.iter().map(|s| s.id.clone()).collect();
    priority.shuffle(rng);
    Instance::new(q, r, names, quotas, students, priority).expect("generated instances are well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::OracleBudget;

    #[test]
    fn deterministic() {
        let p = GenParams::new(40, 3, 2, 11);
        let a = generate(&p).unwrap();
        let b = generate(&p).unwrap();
        assert_eq!(a.priority(), b.priority());
        assert_eq!(a.quota_entries(), b.quota_entries());
        assert_eq!(a.group_sizes(), b.group_sizes());
        let c = generate(&GenParams::new(40, 3, 2, 12)).unwrap();
        assert_ne!(a.priority(), c.priority());
    }

    #[test]
    fn parameter_errors() {
        assert!(generate(&GenParams::new(5, 0, 2, 1)).is_err());
        assert!(generate(&GenParams::new(5, 2, 0, 1)).is_err());
        assert!(generate(&GenParams::new(5, 2, 1, 1)).is_err());
        let mut p = GenParams::new(5, 2, 1, 1);
        p.style = QuotaStyle::Uniform;
        assert!(generate(&p).is_ok());
        p.groups = Some(5);
        assert!(generate(&p).is_err());
        assert_eq!(generate(&GenParams::new(0, 2, 2, 1)).unwrap().num_students(), 0);
    }

    #[test]
    fn fixed_group_count() {
        let mut p = GenParams::new(2000, 3, 2, 5);
        p.groups = Some(8);
        assert_eq!(generate(&p).unwrap().num_groups(), 8);
        p.groups = Some(3);
        assert_eq!(generate(&p).unwrap().num_groups(), 3);
    }

    #[test]
    fn small_instances_fit_the_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let budget = OracleBudget::default();
        for _ in 0..200 {
            let inst = random_small_instance(&mut rng, &SmallLimits::default());
            assert!(budget.admits(&inst));
        }
    }
}
