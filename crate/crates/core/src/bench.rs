//! Wall-clock comparison of the two backends on generated instances.
//!
//! The `certificate` task builds the backend's representation of an instance
//! that is already in memory and computes the max-min ratio with its crucial
//! vector. For the flow backend that is the network, the min-cost maximum
//! flow and the ratio search; for the graph backend it is the seat graph, the
//! rank-maximal seed and the same ratio search with matching surgery. The
//! `solve` task runs the complete choice function.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::Result;
use crate::flow::FlowSolver;
use crate::gen::{generate, GenParams, QuotaStyle};
use crate::graph::GraphContext;
use crate::model::Instance;
use crate::solve::{solve, Backend};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Certificate,
    Solve,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Certificate => "certificate",
            Task::Solve => "solve",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub groups: usize,
    pub types: usize,
    pub ranks: usize,
    pub seed: u64,
    /// Sizes above this skip the graph backend.
    pub graph_max: usize,
    /// Capacity used by the `solve` task; `None` skips it.
    pub solve_capacity: Option<usize>,
    /// Each measurement repeats until this much time has passed.
    pub min_time: Duration,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![10_000, 100_000, 1_000_000],
            groups: 8,
            types: 3,
            ranks: 2,
            seed: 1,
            graph_max: 100_000,
            solve_capacity: Some(200),
            min_time: Duration::from_millis(200),
        }
    }
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct BenchRow {
    pub students: usize,
    pub backend: &'static str,
    pub task: &'static str,
    pub capacity: usize,
    pub groups: usize,
    /// Mean seconds per run.
    pub seconds: f64,
    pub runs: usize,
}

/// Generated instance for one benchmark size; capacity defaults to half the students.
pub fn bench_instance(config: &BenchConfig, students: usize, capacity: Option<usize>) -> Result<Instance> {
    let mut params = GenParams::new(students, config.types, config.ranks, config.seed);
    params.groups = Some(config.groups);
    params.capacity = capacity;
    if config.ranks < 2 {
        params.style = QuotaStyle::Uniform;
    }
    generate(&params)
}

/// Runs `f` once untimed, then repeatedly for at least `min_time` (and at
/// least once); returns the mean duration and the number of timed runs.
pub fn time_repeated(min_time: Duration, mut f: impl FnMut() -> Result<()>) -> Result<(Duration, usize)> {
    f()?;
    let start = Instant::now();
    let mut runs = 0;
    loop {
        f()?;
        runs += 1;
        let elapsed = start.elapsed();
        if elapsed >= min_time {
            return Ok((elapsed / runs as u32, runs));
        }
    }
}

/// One certificate computation on `backend`.
pub fn certificate(instance: &Instance, backend: Backend) -> Result<()> {
    match backend {
        Backend::Flow => {
            FlowSolver::for_instance(instance)?.crucial_vector()?;
        }
        Backend::Graph => {
            GraphContext::new(instance)?.crucial_vector()?;
        }
    }
    Ok(())
}

fn row(instance: &Instance, backend: Backend, task: Task, (mean, runs): (Duration, usize)) -> BenchRow {
    BenchRow {
        students: instance.num_students(),
        backend: backend.name(),
        task: task.name(),
        capacity: instance.capacity(),
        groups: instance.num_groups(),
        seconds: mean.as_secs_f64(),
        runs,
    }
}

pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &n in &config.sizes {
        let instance = bench_instance(config, n, None)?;
        for backend in [Backend::Flow, Backend::Graph] {
            if backend == Backend::Graph && n > config.graph_max {
                continue;
            }
            let t = time_repeated(config.min_time, || certificate(&instance, backend))?;
            rows.push(row(&instance, backend, Task::Certificate, t));
        }
        if let Some(cap) = config.solve_capacity {
            let instance = bench_instance(config, n, Some(cap))?;
            for backend in [Backend::Flow, Backend::Graph] {
                if backend == Backend::Graph && n > config.graph_max {
                    continue;
                }
                let t = time_repeated(config.min_time, || solve(&instance, backend).map(drop))?;
                rows.push(row(&instance, backend, Task::Solve, t));
            }
        }
    }
    Ok(rows)
}

/// Tab-separated table with a header line.
pub fn render_tsv(rows: &[BenchRow]) -> String {
    let mut out = String::from("students\tbackend\ttask\tcapacity\tgroups\tseconds\truns\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{:.9}\t{}",
            r.students, r.backend, r.task, r.capacity, r.groups, r.seconds, r.runs
        );
    }
    out
}

/// Ratio of the slowest to the fastest mean among rows matching `backend` and `task`.
pub fn spread(rows: &[BenchRow], backend: Backend, task: Task) -> Option<f64> {
    let times: Vec<f64> = rows
        .iter()
        .filter(|r| r.backend == backend.name() && r.task == task.name())
        .map(|r| r.seconds)
        .collect();
    let lo = times.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = times.iter().copied().fold(0.0, f64::max);
    (times.len() >= 2 && lo > 0.0).then(|| hi / lo)
}
