use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::flow::{choice_flow_with, FlowSolver};
use crate::graph::solve_graph;
use crate::model::{ChoiceResult, Instance};

/// Which representation computes the choice.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Backend {
    #[default]
    Flow,
    Graph,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Flow => "flow",
            Backend::Graph => "graph",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flow" => Ok(Backend::Flow),
            "graph" => Ok(Backend::Graph),
            other => Err(Error::InvalidParameters(format!("unknown backend `{other}`"))),
        }
    }
}

/// Crucial vector followed by the balanced choice on the requested backend.
pub fn solve(instance: &Instance, backend: Backend) -> Result<ChoiceResult> {
    match backend {
        Backend::Flow => solve_flow(instance),
        Backend::Graph => solve_graph(instance),
    }
}

pub fn solve_flow(instance: &Instance) -> Result<ChoiceResult> {
    let solver = FlowSolver::for_instance(instance)?;
    let crucial = solver.crucial_vector()?;
    choice_flow_with(instance, &solver, &crucial)
}
