use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};

use reserve_match::baseline::sequential_baseline;
use reserve_match::bench::{render_tsv, run_bench, BenchConfig};
use reserve_match::flow::check_validity_flow;
use reserve_match::gda::{find_substitutability_violation, induced_instance, run_gda, substitutability_probe};
use reserve_match::gen::{generate, GenParams, QuotaStyle};
use reserve_match::graph::check_validity_graph;
use reserve_match::io::{self, GdaResultFile, ResultFile};
use reserve_match::oracle::OracleBudget;
use reserve_match::verify::verify_all;
use reserve_match::{solve, Backend, Error, Result};

/// Balanced student selection under ranked diversity quotas.
#[derive(Parser)]
#[command(name = "reserve-match", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the balanced selection of an instance.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value = "flow")]
        backend: Backend,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sequential reserve filling, for comparison.
    Baseline {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Is there a maximal-diversity matching meeting the group targets?
    Validate {
        instance: PathBuf,
        #[arg(long)]
        targets: PathBuf,
        #[arg(long, default_value = "flow")]
        backend: Backend,
        /// Consult both backends and fail if they disagree.
        #[arg(long)]
        cross_check: bool,
    },
    /// Check a result file against every axiom.
    Verify { instance: PathBuf, result: PathBuf },
    /// Generate a random instance.
    Gen {
        #[arg(long)]
        students: usize,
        #[arg(long)]
        types: usize,
        #[arg(long)]
        ranks: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "minmax")]
        quota_style: QuotaStyle,
        /// Defaults to half the students, rounded up.
        #[arg(long)]
        capacity: Option<usize>,
        /// Number of distinct type sets to draw from.
        #[arg(long)]
        groups: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Deferred acceptance over several schools.
    Gda {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Search this school's choice function for a substitutability violation.
        #[arg(long, value_name = "SCHOOL")]
        probe: Option<String>,
        /// Base set for a targeted probe (comma separated ids).
        #[arg(long, value_delimiter = ',', requires_all = ["probe", "probe_s1", "probe_s2"])]
        probe_base: Option<Vec<String>>,
        #[arg(long, requires = "probe_base")]
        probe_s1: Option<String>,
        #[arg(long, requires = "probe_base")]
        probe_s2: Option<String>,
    },
    /// Time both backends on generated instances.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "10000,100000,1000000")]
        students: Vec<usize>,
        #[arg(long, default_value_t = 8)]
        groups: usize,
        #[arg(long, default_value_t = 3)]
        types: usize,
        #[arg(long, default_value_t = 2)]
        ranks: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Largest size given to the graph backend.
        #[arg(long, default_value_t = 100_000)]
        graph_max: usize,
        /// Capacity for the full-solve rows; 0 skips them.
        #[arg(long, default_value_t = 200)]
        solve_capacity: usize,
        #[arg(long, default_value_t = 200)]
        min_time_ms: u64,
        #[arg(long)]
        json: bool,
    },
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve { instance, backend, out } => {
            let inst = io::read_instance(&instance)?;
            let res = solve(&inst, backend)?;
            emit(&io::to_json(&ResultFile::new(&inst, &res, backend.name()))?, out.as_deref())?;
        }
        Command::Baseline { instance, out } => {
            let inst = io::read_instance(&instance)?;
            let res = sequential_baseline(&inst);
            emit(&io::to_json(&ResultFile::new(&inst, &res, "baseline"))?, out.as_deref())?;
        }
        Command::Validate { instance, targets, backend, cross_check } => {
            let inst = io::read_instance(&instance)?;
            let targets = io::read_targets(&inst, &targets)?;
            let flow = || -> Result<Option<(Vec<usize>, Vec<usize>)>> {
                let solver = reserve_match::flow::FlowSolver::for_instance(&inst)?;
                Ok(check_validity_flow(&inst, &targets)?
                    .map(|f| (f.group_counts(solver.network()), f.signature(solver.network()).into_vec())))
            };
            let graph = || -> Result<Option<(Vec<usize>, Vec<usize>)>> {
                let g = reserve_match::graph::build_graph(&inst);
                Ok(check_validity_graph(&inst, &targets)?
                    .map(|m| (m.group_counts(&inst), m.signature(&g).into_vec())))
            };
            let verdict = match backend {
                Backend::Flow => flow()?,
                Backend::Graph => graph()?,
            };
            if cross_check {
                let other = match backend {
                    Backend::Flow => graph()?,
                    Backend::Graph => flow()?,
                };
                if verdict.is_some() != other.is_some() {
                    return Err(Error::Invariant("backends disagree on validity".into()));
                }
            }
            match verdict {
                Some((counts, signature)) => {
                    println!("VALID");
                    for (label, c) in inst.keyed(&counts) {
                        println!("  {label}: {c}");
                    }
                    println!("  signature: {signature:?}");
                }
                None => {
                    println!("NO-INSTANCE");
                    return Ok(ExitCode::from(1));
                }
            }
        }
        Command::Verify { instance, result } => {
            let inst = io::read_instance(&instance)?;
            let res = io::read_result(&result)?;
            let selected = inst.resolve_ids(&res.selected)?;
            let report = verify_all(&inst, &selected, &OracleBudget::from_env()?)?;
            let evidence = report.balance.evidence;
            for (name, ok) in report.lines() {
                let label = if name == "non-wastefulness" { "direct".to_string() } else { evidence.to_string() };
                println!("{} {name} ({label})", if ok { "PASS" } else { "FAIL" });
            }
            if let Some((s, t)) = report.balance.envy {
                println!("  {} has justified envy towards {}", inst.student_id(s), inst.student_id(t));
            }
            if !report.all_pass() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Gen { students, types, ranks, seed, quota_style, capacity, groups, out } => {
            let params = GenParams { students, types, ranks, seed, style: quota_style, capacity, groups };
            emit(&io::instance_to_json(&generate(&params)?)?, out.as_deref())?;
        }
        Command::Gda { instance, out, probe, probe_base, probe_s1, probe_s2 } => {
            let multi = io::read_multi(&instance)?;
            let matching = run_gda(&multi)?;
            emit(&io::to_json(&GdaResultFile::new(&multi, &matching))?, out.as_deref())?;
            if let Some(school) = probe {
                let all: Vec<&str> = multi.students().iter().map(|s| s.record.id.as_str()).collect();
                let inst = induced_instance(&multi, &school, &all)?;
                let violation = match (probe_base, probe_s1, probe_s2) {
                    (Some(base), Some(s1), Some(s2)) => {
                        let base = inst.resolve_ids(&base)?;
                        let [s1, s2] = [s1, s2].map(|id| inst.resolve_ids(&[id]).map(|v| v[0]));
                        substitutability_probe(&inst, &base, s1?, s2?)?
                    }
                    _ => find_substitutability_violation(&inst)?,
                };
                match violation {
                    Some(v) => eprintln!(
                        "substitutability violated at {school}: {} rejected from {{{}}} + {} but chosen once {} applies ({{{}}} -> {{{}}})",
                        v.s2,
                        v.base.join(","),
                        v.s2,
                        v.s1,
                        v.without_s1.join(","),
                        v.with_s1.join(",")
                    ),
                    None => eprintln!("no substitutability violation found at {school}"),
                }
            }
        }
        Command::Bench { students, groups, types, ranks, seed, graph_max, solve_capacity, min_time_ms, json } => {
            let config = BenchConfig {
                sizes: students,
                groups,
                types,
                ranks,
                seed,
                graph_max,
                solve_capacity: (solve_capacity > 0).then_some(solve_capacity),
                min_time: Duration::from_millis(min_time_ms),
            };
            let rows = run_bench(&config)?;
            if json {
                print!("{}", io::to_json(&rows)?);
            } else {
                print!("{}", render_tsv(&rows));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}
