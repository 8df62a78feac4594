//! Axiom checks for a proposed selection.
//!
//! Non-wastefulness and same-group priority are plain set properties. Maximal
//! diversity, balanced representation and justified envy-freeness depend on
//! the set of per-group count vectors of maximal-diversity matchings; those
//! are answered by exhaustive enumeration when the instance fits the oracle
//! budget, and by the flow network otherwise (reported as such).

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::flow::FlowSolver;
use crate::model::{min_selection_ratio, Instance, Ratio, StudentIdx};
use crate::oracle::{enumerate_with_budget, MaximalDiversity, OracleBudget};

/// `|selected| = min(|S|, q)`.
pub fn verify_non_wasteful<S: AsRef<str>>(instance: &Instance, selected: &[S]) -> Result<bool> {
    let set = instance.resolve_ids(selected)?;
    Ok(set.len() == instance.num_students().min(instance.capacity()))
}

/// Selected members of every group form a prefix of the group's priority order.
pub fn verify_same_group_priority<S: AsRef<str>>(instance: &Instance, selected: &[S]) -> Result<bool> {
    let set = instance.resolve_ids(selected)?;
    Ok(same_group_prefixes(instance, &set))
}

fn same_group_prefixes(instance: &Instance, set: &[StudentIdx]) -> bool {
    let mut chosen = vec![false; instance.num_students()];
    for &s in set {
        chosen[s] = true;
    }
    instance.groups().iter().all(|g| {
        let k = g.members.iter().filter(|&&s| chosen[s]).count();
        g.members[..k].iter().all(|&s| chosen[s])
    })
}

/// Where the maximal-diversity facts came from.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Evidence {
    /// Exhaustive enumeration of maximal-diversity matchings.
    Oracle,
    /// Min-cost flow certificates; used when the instance exceeds the oracle budget.
    Structural,
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Evidence::Oracle => "oracle",
            Evidence::Structural => "structural",
        })
    }
}

/// Verdicts for the three axioms that need maximal-diversity information.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BalanceVerdict {
    pub maximal_diversity: bool,
    pub balanced: bool,
    pub justified_envy_free: bool,
    /// One `(envious, envied)` pair when envy-freeness fails.
    pub envy: Option<(StudentIdx, StudentIdx)>,
    pub alpha: Ratio,
    pub evidence: Evidence,
}

/// Oracle and flow answers to "is there a maximal-diversity outcome `c ≤ x`".
enum Facts {
    Oracle(MaximalDiversity),
    Flow(FlowSolver),
}

impl Facts {
    fn covers(&self, x: &[usize]) -> Result<bool> {
        match self {
            Facts::Oracle(md) => Ok(md
                .outcomes
                .iter()
                .any(|o| o.counts.iter().zip(x).all(|(c, x)| c <= x))),
            Facts::Flow(solver) => Ok(solver.check_group_bounds(&vec![0; x.len()], Some(x))?.is_some()),
        }
    }
}

/// Maximal diversity, balanced representation and justified envy-freeness of
/// `selected`. Falls back to flow evidence, labeled [`Evidence::Structural`],
/// when the instance exceeds `budget`.
pub fn verify_balanced_and_jef(
    instance: &Instance,
    selected: &[StudentIdx],
    budget: &OracleBudget,
) -> Result<BalanceVerdict> {
    instance.check_subset(selected)?;
    let (facts, alpha, evidence) = match enumerate_with_budget(instance, budget) {
        Ok(md) => {
            let alpha = md.max_min_ratio(instance);
            (Facts::Oracle(md), alpha, Evidence::Oracle)
        }
        Err(Error::BudgetExceeded(_)) => {
            let solver = FlowSolver::for_instance(instance)?;
            let alpha = solver.crucial_vector()?.alpha;
            (Facts::Flow(solver), alpha, Evidence::Structural)
        }
        Err(e) => return Err(e),
    };
    let both = |x: &[usize]| -> Result<(bool, bool)> {
        let md = facts.covers(x)?;
        Ok((md, md && min_selection_ratio(instance, x) >= alpha))
    };
    let counts = instance.group_counts(selected);
    let (maximal_diversity, balanced) = both(&counts)?;

    let mut chosen = vec![false; instance.num_students()];
    for &s in selected {
        chosen[s] = true;
    }
    // the swap verdict only depends on the two groups involved
    let mut memo: HashMap<(usize, usize), bool> = HashMap::new();
    let mut envy = None;
    'outer: for (i, &s) in instance.priority().iter().enumerate() {
        if chosen[s] {
            continue;
        }
        for &t in &instance.priority()[i + 1..] {
            if !chosen[t] {
                continue;
            }
            let key = (instance.group_of(s), instance.group_of(t));
            let ok = match memo.get(&key) {
                Some(&v) => v,
                None => {
                    let mut x = counts.clone();
                    x[key.0] += 1;
                    x[key.1] -= 1;
                    let (md, br) = both(&x)?;
                    memo.insert(key, md && br);
                    md && br
                }
            };
            if ok {
                envy = Some((s, t));
                break 'outer;
            }
        }
    }
    Ok(BalanceVerdict {
        maximal_diversity,
        balanced,
        justified_envy_free: envy.is_none(),
        envy,
        alpha,
        evidence,
    })
}

/// All axiom verdicts for one selection.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AxiomReport {
    pub non_wasteful: bool,
    pub same_group_priority: bool,
    pub balance: BalanceVerdict,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.non_wasteful
            && self.same_group_priority
            && self.balance.maximal_diversity
            && self.balance.balanced
            && self.balance.justified_envy_free
    }

    /// `(axiom name, verdict)` in reporting order.
    pub fn lines(&self) -> [(&'static str, bool); 4] {
        [
            ("non-wastefulness", self.non_wasteful),
            ("maximal-diversity", self.balance.maximal_diversity),
            ("balanced-representation", self.balance.balanced),
            ("justified-envy-freeness", self.balance.justified_envy_free),
        ]
    }
}

pub fn verify_all(instance: &Instance, selected: &[StudentIdx], budget: &OracleBudget) -> Result<AxiomReport> {
    instance.check_subset(selected)?;
    Ok(AxiomReport {
        non_wasteful: selected.len() == instance.num_students().min(instance.capacity()),
        same_group_priority: same_group_prefixes(instance, selected),
        balance: verify_balanced_and_jef(instance, selected, budget)?,
    })
}
