//! Command-line front end: subcommands, output writers and exit codes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::{parse_config, RunConfig, SteadyMode};
use crate::discretize::{assemble_system, dump_matrix_market};
use crate::error::{Error, Result};
use crate::evolve::{run, Snapshot};
use crate::model::{Grid, ProblemSpec, State};
use crate::steady::{
    constant_pair_state, reversible_pair, solve_null_vector, NormalizationRecord, ReversiblePair,
};
use crate::verify::{oracle_compare, CheckRegistry, CheckReport};

/// Relative drift of the weighted mass tolerated by `simulate`.
pub const MASS_DRIFT_TOL: f64 = 1e-11;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "MOTORFLUX_THREADS";

#[derive(Debug, Parser)]
#[command(name = "motorflux", version, about = "Drift-diffusion-reaction solver and property checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `[output] dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Pass threshold or solver tolerance, depending on the command.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Seed for `random` initial data.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve the initial data and write snapshots plus a manifest.
    Simulate(Common),
    /// Compute the stationary state.
    Steady {
        #[command(flatten)]
        common: Common,
        /// Also write the system matrix in Matrix Market format.
        #[arg(long)]
        dump_matrix: Option<PathBuf>,
    },
    /// Check L¹ contraction between the two initial data.
    VerifyContraction(Common),
    /// Check ordering and positivity between the two initial data.
    VerifyComparison(Common),
    /// Check convergence to the stationary state.
    VerifyConvergence(Common),
    /// Compare implicit stepping against the dense matrix exponential.
    OracleCompare(Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Simulate(c)
            | Command::VerifyContraction(c)
            | Command::VerifyComparison(c)
            | Command::VerifyConvergence(c)
            | Command::OracleCompare(c) => c,
            Command::Steady { common, .. } => common,
        }
    }
}

/// Outcome of a command that ran to completion.
#[derive(Debug)]
pub enum Outcome {
    Pass,
    /// A check failed; carries the offending report.
    Fail(CheckReport),
}

/// Shortest round-trip decimal form of a float.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn csv_header(grid: &Grid, n_species: usize) -> String {
    let axes = ["x", "y"];
    let mut cols: Vec<String> = axes[..grid.dim()].iter().map(|s| s.to_string()).collect();
    cols.extend((1..=n_species).map(|i| format!("u{i}")));
    cols.join(",")
}

/// One row per cell: centre coordinates followed by each species' value.
pub fn state_csv(state: &State, grid: &Grid) -> String {
    let mut out = csv_header(grid, state.n_species());
    out.push('\n');
    for cell in 0..grid.n_cells() {
        let mut fields: Vec<String> = grid.center(cell).into_iter().map(fmt_f64).collect();
        fields.extend((0..state.n_species()).map(|i| fmt_f64(state.species(i)[cell])));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn snapshot_file_name(index: usize, time: f64) -> String {
    format!("snapshot_{index}_t{time}.csv")
}

#[derive(Serialize)]
struct ManifestRecord<'a> {
    index: usize,
    step: usize,
    time: f64,
    file: &'a str,
    weighted_mass: f64,
    l1: &'a [f64],
    min: &'a [f64],
}

fn manifest_line(index: usize, snap: &Snapshot, file: &str) -> String {
    serde_json::to_string(&ManifestRecord {
        index,
        step: snap.step,
        time: snap.time(),
        file,
        weighted_mass: snap.diagnostics.weighted_mass,
        l1: &snap.diagnostics.l1,
        min: &snap.diagnostics.min,
    })
    .expect("manifest record serialises")
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

fn prepare_out(cfg: &RunConfig, common: &Common) -> Result<PathBuf> {
    let dir = common.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
    fs::create_dir_all(&dir)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
    write(&dir.join("effective_config.toml"), &cfg.effective())?;
    Ok(dir)
}

fn load(common: &Common) -> Result<RunConfig> {
    let cfg = parse_config(&common.config)?;
    Ok(match common.seed {
        Some(seed) => cfg.with_seed(seed),
        None => cfg,
    })
}

/// Evolve and write `snapshot_*.csv` plus `manifest.ndjson`; fails with an
/// invariant error when the weighted mass drifts.
pub fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let spec = cfg.problem()?;
    let traj = run(&spec, &cfg.step_config())?;
    let mut manifest = String::new();
    for (index, snap) in traj.snapshots.iter().enumerate() {
        let name = snapshot_file_name(index, snap.time());
        write(&out.join(&name), &state_csv(&snap.state, &spec.grid))?;
        manifest.push_str(&manifest_line(index, snap, &name));
        manifest.push('\n');
    }
    write(&out.join("manifest.ndjson"), &manifest)?;
    let drift = traj.mass_drift();
    if drift > MASS_DRIFT_TOL {
        return Err(Error::Invariant(format!(
            "weighted mass drifted by {drift:e} (relative), above {MASS_DRIFT_TOL:e}"
        )));
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct LinearSteadyRecord {
    mode: &'static str,
    residual: f64,
    normalization: NormalizationRecord,
    iterations: usize,
}

#[derive(Serialize)]
struct PairSteadyRecord {
    mode: &'static str,
    a: f64,
    b: f64,
    mass: f64,
    mass_residual: f64,
    reaction_residual: f64,
}

fn reversible_mode(cfg: &RunConfig, spec: &ProblemSpec) -> Result<bool> {
    Ok(match cfg.steady.mode {
        SteadyMode::Auto => !spec.is_linear()?,
        SteadyMode::Linear => false,
        SteadyMode::Reversible => true,
    })
}

/// Write `steady.csv` and `steady.json`, returning a one-line summary.
pub fn cmd_steady(cfg: &RunConfig, out: &Path, dump_matrix: Option<&Path>) -> Result<String> {
    let spec = cfg.problem()?;
    if reversible_mode(cfg, &spec)? {
        let pair = ReversiblePair::from_problem(&spec)?;
        let mass = match cfg.steady.mass {
            Some(m) => m,
            None => pair.mass_density(&spec.initial_state()?, &spec)?,
        };
        let (a, b) = reversible_pair(mass, &pair)?;
        let st = constant_pair_state(a, b, &pair, &spec)?;
        write(&out.join("steady.csv"), &state_csv(&st.state, &spec.grid))?;
        let record = PairSteadyRecord {
            mode: "reversible",
            a,
            b,
            mass,
            mass_residual: (a / pair.alpha + b / pair.beta - mass).abs(),
            reaction_residual: st.residual,
        };
        write(
            &out.join("steady.json"),
            &(serde_json::to_string(&record).expect("record serialises") + "\n"),
        )?;
        return Ok(format!("a={a} b={b}"));
    }
    let op = assemble_system(&spec)?;
    if let Some(path) = dump_matrix {
        write(path, &dump_matrix_market(&op))?;
    }
    let st = solve_null_vector(&op, &cfg.null_vector_options())?;
    write(&out.join("steady.csv"), &state_csv(&st.state, &spec.grid))?;
    let record = LinearSteadyRecord {
        mode: "linear",
        residual: st.residual,
        normalization: st.normalization.clone(),
        iterations: st.iterations,
    };
    write(
        &out.join("steady.json"),
        &(serde_json::to_string(&record).expect("record serialises") + "\n"),
    )?;
    Ok(format!("residual={:e} iterations={}", st.residual, st.iterations))
}

/// Run a registered check and write `<name>.ndjson`.
pub fn cmd_verify(cfg: &RunConfig, out: &Path, check: &str, tol: Option<f64>, seed: u64) -> Result<(CheckReport, Outcome)> {
    let ctx = cfg.check_context(tol, seed)?;
    let report = if check == "oracle" && !cfg.verify.oracle_dts.is_empty() {
        oracle_compare(&ctx.spec, &ctx.step, ctx.step.t_end, &cfg.verify.oracle_dts)?
    } else {
        CheckRegistry::builtin().run(check, &ctx)?
    };
    write(&out.join(format!("{check}.ndjson")), &(report.to_ndjson() + "\n"))?;
    let outcome = if report.pass {
        Outcome::Pass
    } else {
        Outcome::Fail(report.clone())
    };
    Ok((report, outcome))
}

/// Apply the thread cap from the environment, if set.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV}={v} is not a thread count")))?;
        if n == 0 {
            return Err(Error::Config(format!("{THREADS_ENV} must be at least 1")));
        }
        // A pool that is already initialised keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Execute a parsed command line, printing results, and return the exit
/// code.
pub fn execute(cli: Cli) -> i32 {
    match dispatch(&cli.command) {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Fail(report)) => {
            let mut msg = String::new();
            let _ = write!(
                msg,
                "check `{}` failed: worst {} exceeds {}",
                report.name,
                fmt_f64(report.worst),
                fmt_f64(report.tolerance)
            );
            if let Some(t) = report.argmax_time {
                let _ = write!(msg, " at t = {t}");
            }
            eprintln!("{msg}");
            3
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: &Command) -> Result<Outcome> {
    configure_threads()?;
    let common = command.common();
    let cfg = load(common)?;
    let out = prepare_out(&cfg, common)?;
    let seed = common.seed.unwrap_or(1);
    let check = match command {
        Command::Simulate(_) => return cmd_simulate(&cfg, &out),
        Command::Steady { dump_matrix, .. } => {
            let mut cfg = cfg;
            if let Some(tol) = common.tol {
                cfg.steady.tol = tol;
            }
            println!("{}", cmd_steady(&cfg, &out, dump_matrix.as_deref())?);
            return Ok(Outcome::Pass);
        }
        Command::VerifyContraction(_) => "contraction",
        Command::VerifyComparison(_) => "comparison",
        Command::VerifyConvergence(_) => "convergence",
        Command::OracleCompare(_) => "oracle",
    };
    let (report, outcome) = cmd_verify(&cfg, &out, check, common.tol, seed)?;
    println!("{}", report.to_ndjson());
    Ok(outcome)
}
