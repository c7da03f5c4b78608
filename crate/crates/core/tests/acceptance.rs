//! End-to-end acceptance criteria. Each criterion prints one line:
//! `PASS` or `FAIL`, its number and name, the measured quantities and the
//! wall time it took.

mod common;

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{max_abs_diff, motor, random_linear, random_state, reversible, rng};
use motorflux::discretize::{
    assemble_system, assemble_transport, conjugate_to_neumann, gauge_factors, gauge_transform,
    BlockOperator, GaugeDirection,
};
use motorflux::evolve::{run, StepConfig};
use motorflux::linalg::sparse::matvec;
use motorflux::model::{
    CouplingMatrix, Grid, InitialSpec, ProblemSpec, ProfileSpec, ReactionSpec, SpeciesSpec,
};
use motorflux::steady::{
    inverse_iteration, inverse_iteration_from, project_onto_ray, solve_null_vector,
    NullVectorOptions, StationaryRay,
};
use motorflux::verify::{
    check_comparison, check_contraction, check_convergence, fitted_order, oracle_compare,
    stationary_target,
};
use rand::Rng;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    body: fn() -> Outcome,
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn conservation() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..10u64 {
        let n = 1 + (k % 3) as usize;
        let spec = random_linear(100 + k, n, 64);
        let traj = run(&spec, &StepConfig::new(0.01, 10.0, 1)).map_err(|e| e.to_string())?;
        if traj.snapshots.len() != 1001 {
            return Err(format!("expected 1001 snapshots, got {}", traj.snapshots.len()));
        }
        worst = worst.max(traj.mass_drift());
    }
    ensure(worst <= 1e-11, format!("max relative drift {worst:e} (tol 1e-11)"))
}

/// Two-species power-law reaction with mild potentials.
fn random_nonlinear(seed: u64, cells: usize) -> ProblemSpec {
    let mut r = rng(seed);
    let p = [1.5, 2.0, 3.0][r.gen_range(0..3)];
    ProblemSpec {
        grid: Grid::interval(0.0, 1.0, cells).unwrap(),
        species: vec![
            SpeciesSpec::new(r.gen_range(0.5..1.5), r.gen_range(0.5..2.0), ProfileSpec::cosine(r.gen_range(0.0..0.5), 1.0))
                .with_reaction(ReactionSpec::power(p)),
            SpeciesSpec::new(r.gen_range(0.5..1.5), r.gen_range(0.5..2.0), ProfileSpec::sawtooth(r.gen_range(0.0..0.5), 1.0, 0.3)),
        ],
        coupling: CouplingMatrix::exchange(r.gen_range(0.5..2.0)),
        initial: vec![InitialSpec::constant(1.0); 2],
    }
}

fn fixture(k: u64) -> (ProblemSpec, f64) {
    if k % 2 == 0 {
        (random_linear(200 + k, 1 + (k % 3) as usize, 32), 0.02)
    } else {
        (random_nonlinear(200 + k, 32), 0.005)
    }
}

fn comparison() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..20u64 {
        let (spec, dt) = fixture(k);
        let mut r = rng(300 + k);
        let low = random_state(&spec, &mut r, 0.0, 1.0);
        let bump = random_state(&spec, &mut r, 0.0, 0.5);
        let high = low.with_values(low.values().iter().zip(bump.values()).map(|(a, b)| a + b).collect());
        let rep = check_comparison(&spec, &low, &high, &StepConfig::new(dt, 2.0, 1)).map_err(|e| e.to_string())?;
        if !rep.pass {
            return Err(format!("fixture {k}: {}", rep.to_ndjson()));
        }
        worst = worst.max(rep.worst);
    }
    ensure(worst <= 1e-12, format!("20 pairs (10 linear, 10 IMEX), worst violation {worst:e} (tol 1e-12)"))
}

fn contraction() -> Outcome {
    let mut worst_inc: f64 = 0.0;
    for k in 0..20u64 {
        let (spec, dt) = fixture(k);
        let mut r = rng(400 + k);
        let a = random_state(&spec, &mut r, 0.0, 2.0);
        let b = random_state(&spec, &mut r, 0.0, 2.0);
        let (rep, series) = check_contraction(&spec, &a, &b, &StepConfig::new(dt, 2.0, 1)).map_err(|e| e.to_string())?;
        let c = rep.criterion("monotone").unwrap();
        if !c.pass {
            return Err(format!("fixture {k}: increase {:e} > {:e}", c.value, c.tolerance));
        }
        worst_inc = worst_inc.max(c.value / (1.0 + series.initial()));
    }
    let mut worst_ratio: f64 = 0.0;
    for k in 0..10u64 {
        let spec = random_linear(500 + k, 1 + (k % 3) as usize, 64);
        let mut r = rng(500 + k);
        let a = random_state(&spec, &mut r, 1.0, 2.0);
        let m = r.gen_range(1..4) as f64;
        let nc = spec.grid.n_cells();
        let mut b = a.clone();
        for (j, x) in spec.grid.centers().iter().enumerate() {
            b.values_mut()[j % nc] += 0.5 * (2.0 * std::f64::consts::PI * m * x[0]).sin();
        }
        let (rep, series) = check_contraction(&spec, &a, &b, &StepConfig::new(0.01, 1.0, 1)).map_err(|e| e.to_string())?;
        if !series.changes_sign_initially() {
            return Err(format!("strict fixture {k} does not change sign"));
        }
        let ratio = series.ratio_at(1.0).unwrap();
        if !rep.pass || ratio >= 0.99 {
            return Err(format!("strict fixture {k}: ratio {ratio} ({})", rep.to_ndjson()));
        }
        worst_ratio = worst_ratio.max(ratio);
    }
    ensure(
        worst_inc <= 1e-10,
        format!("weak: max increase {worst_inc:e}·(1+d0) over 20 pairs; strict: max ratio at t=1 {worst_ratio:.3e} over 10 pairs"),
    )
}

fn equality() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..10u64 {
        let (spec, dt) = fixture(k);
        let mut r = rng(600 + k);
        let a = random_state(&spec, &mut r, 0.0, 1.0);
        let bump = random_state(&spec, &mut r, 0.0, 1.0);
        let b = a.with_values(a.values().iter().zip(bump.values()).map(|(x, y)| x + y).collect());
        let (rep, series) = check_contraction(&spec, &a, &b, &StepConfig::new(dt.max(0.01), 5.0, 1)).map_err(|e| e.to_string())?;
        let c = rep.criterion("equality").ok_or("one-signed fixture classified as sign-changing")?;
        if series.times.last() != Some(&5.0) {
            return Err("series does not reach t = 5".into());
        }
        worst = worst.max(c.value);
    }
    ensure(worst <= 1e-10, format!("max |d(t) - d(0)| {worst:e} over 10 pairs (tol 1e-10)"))
}

fn stationary() -> Outcome {
    let opts = NullVectorOptions::default();
    // (a) symmetric motor.
    let mut sym = motor(64);
    for s in &mut sym.species {
        s.potential = ProfileSpec::zero();
        s.sigma = 1.0;
    }
    let v = solve_null_vector(&assemble_system(&sym).map_err(|e| e.to_string())?, &opts).map_err(|e| e.to_string())?;
    let err_a = v.state.values().iter().map(|x| (x - 0.5).abs()).fold(0.0, f64::max);
    // (b) Boltzmann profile.
    let grid = Grid::interval(0.0, 1.0, 128).unwrap();
    let psi = ProfileSpec::sawtooth(1.0, 1.0, 0.2);
    let sigma = 0.5;
    let one = ProblemSpec {
        grid: grid.clone(),
        species: vec![SpeciesSpec::new(sigma, 1.0, psi.clone())],
        coupling: CouplingMatrix::zeros(1),
        initial: vec![InitialSpec::constant(1.0)],
    };
    let v = solve_null_vector(&assemble_system(&one).map_err(|e| e.to_string())?, &opts).map_err(|e| e.to_string())?;
    let samples = psi.build().unwrap().sample(&grid).unwrap();
    let dens: Vec<f64> = samples.iter().map(|p| (-p / sigma).exp()).collect();
    let z = grid.integrate(&dens);
    let boltz: Vec<f64> = dens.iter().map(|d| d / z).collect();
    let err_b = max_abs_diff(v.state.values(), &boltz) / boltz.iter().copied().fold(0.0, f64::max);
    // (c) random three-species problem.
    let mut three = random_linear(700, 3, 64);
    for (i, s) in three.species.iter_mut().enumerate() {
        s.potential = ProfileSpec::sawtooth(1.0, 1.0, 0.3 * i as f64);
    }
    let op = assemble_system(&three).map_err(|e| e.to_string())?;
    let v = solve_null_vector(&op, &opts).map_err(|e| e.to_string())?;
    let res_c = matvec(op.matrix(), v.state.values()).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let min_c = v.state.min();
    // (d) random restarts.
    let mut r = rng(701);
    let mut spread: f64 = 0.0;
    for _ in 0..5 {
        let start: Vec<f64> = (0..v.state.values().len()).map(|_| r.gen_range(0.01..1.0)).collect();
        let w = inverse_iteration_from(&op, op.alphas(), &opts, Some(&start)).map_err(|e| e.to_string())?;
        let d: f64 = w.state.values().iter().zip(v.state.values()).map(|(a, b)| (a - b).abs()).sum::<f64>() * three.grid.cell_volume();
        spread = spread.max(d);
    }
    ensure(
        err_a <= 1e-10 && err_b <= 1e-10 && res_c <= 1e-10 && min_c > 0.0 && spread <= 1e-8,
        format!("(a) {err_a:e} (b) {err_b:e} (c) residual {res_c:e}, min {min_c:e} (d) restart spread {spread:e}"),
    )
}

fn stabilization() -> Outcome {
    let spec = motor(64);
    let u0 = spec.initial_state().unwrap();
    let op = assemble_system(&spec).map_err(|e| e.to_string())?;
    let ray = StationaryRay::new(solve_null_vector(&op, &NullVectorOptions::default()).map_err(|e| e.to_string())?);
    let (_, target) = project_onto_ray(&u0, &ray, &spec).map_err(|e| e.to_string())?;
    let lin = check_convergence(&spec, &u0, &target.state, &StepConfig::new(0.05, 50.0, 1), 1e-6).map_err(|e| e.to_string())?;
    let rev = reversible(64);
    let u0 = rev.initial_state().unwrap();
    let target = stationary_target(&rev, &u0, &NullVectorOptions::default()).map_err(|e| e.to_string())?;
    let pair = (target.state.values()[0], target.state.values()[rev.grid.n_cells()]);
    let nl = check_convergence(&rev, &u0, &target.state, &StepConfig::new(0.01, 50.0, 10), 1e-6).map_err(|e| e.to_string())?;
    ensure(
        lin.pass && nl.pass && (pair.0 - 1.0).abs() <= 1e-12 && (pair.1 - 1.0).abs() <= 1e-12,
        format!(
            "motor: distance {:e} at t=50, max increase {:e}; reversible: pair ({}, {}), distance {:e}",
            lin.criterion("final_distance").unwrap().value,
            lin.criterion("monotone").unwrap().value,
            pair.0,
            pair.1,
            nl.criterion("final_distance").unwrap().value
        ),
    )
}

fn oracle() -> Outcome {
    let dts = [0.1, 0.05, 0.025];
    let mut lines = Vec::new();
    let mut ok = true;
    for k in 0..3u64 {
        let mut spec = random_linear(800 + k, 2, 8);
        spec.species[0].potential = ProfileSpec::cosine(0.5, 1.0);
        let rep = oracle_compare(&spec, &StepConfig::new(0.1, 1.0, 1), 1.0, &dts).map_err(|e| e.to_string())?;
        let order = fitted_order(&dts, &rep.series);
        let last = rep.series[2];
        ok &= rep.pass && order >= 0.9 && last <= 5e-3;
        lines.push(format!("order {order:.3}, error {last:.2e}"));
    }
    ensure(ok, lines.join("; "))
}

fn gauge() -> Outcome {
    let spec = random_linear(900, 2, 32);
    let op = assemble_system(&spec).map_err(|e| e.to_string())?;
    let opts = NullVectorOptions::default();
    let v = solve_null_vector(&op, &opts).map_err(|e| e.to_string())?;
    let w_op = conjugate_to_neumann(&op, &spec, None).map_err(|e| e.to_string())?;
    let w = inverse_iteration(&w_op, op.alphas(), &opts).map_err(|e| e.to_string())?;
    let d = gauge_factors(&spec).map_err(|e| e.to_string())?;
    let mut dv: Vec<f64> = v.state.values().iter().zip(&d).map(|(a, b)| a * b).collect();
    let total: f64 = dv.iter().sum::<f64>() * spec.grid.cell_volume();
    dv.iter_mut().for_each(|x| *x /= total);
    let scale = dv.iter().copied().fold(0.0, f64::max);
    let err = max_abs_diff(w.state.values(), &dv) / scale;
    let u = random_state(&spec, &mut rng(901), 0.0, 2.0);
    let there = gauge_transform(&u, &spec, GaugeDirection::ToNeumann).map_err(|e| e.to_string())?;
    let back = gauge_transform(&there, &spec, GaugeDirection::ToPhysical).map_err(|e| e.to_string())?;
    let round = u
        .values()
        .iter()
        .zip(back.values())
        .map(|(a, b)| (a - b).abs() / a.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    ensure(err <= 1e-9 && round <= 1e-14, format!("null vector {err:e} (tol 1e-9), round trip {round:e} (tol 1e-14)"))
}

/// `u = 1 + ½cos(πx)`, `ψ = a·cos(2πx)`; exact `(σu′ + uψ′)′`.
fn spatial() -> Outcome {
    use std::f64::consts::PI;
    let (sigma, a) = (0.7, 0.8);
    let u = |x: f64| 1.0 + 0.5 * (PI * x).cos();
    let du = |x: f64| -0.5 * PI * (PI * x).sin();
    let d2u = |x: f64| -0.5 * PI * PI * (PI * x).cos();
    let dpsi = |x: f64| -2.0 * PI * a * (2.0 * PI * x).sin();
    let d2psi = |x: f64| -4.0 * PI * PI * a * (2.0 * PI * x).cos();
    let sizes = [32usize, 64, 128, 256];
    let mut hs = Vec::new();
    let mut errs = Vec::new();
    for &n in &sizes {
        let grid = Grid::interval(0.0, 1.0, n).unwrap();
        let t = assemble_transport(&grid, sigma, &ProfileSpec::cosine(a, 1.0)).map_err(|e| e.to_string())?;
        let xs: Vec<f64> = (0..n).map(|j| grid.center(j)[0]).collect();
        let lu = matvec(t.matrix(), &xs.iter().map(|&x| u(x)).collect::<Vec<_>>());
        let err = (1..n - 1)
            .map(|j| {
                let x = xs[j];
                let exact = sigma * d2u(x) + du(x) * dpsi(x) + u(x) * d2psi(x);
                (lu[j] - exact).abs()
            })
            .fold(0.0, f64::max);
        hs.push(1.0 / n as f64);
        errs.push(err);
    }
    let order = fitted_order(&hs, &errs);
    ensure(order >= 1.8, format!("order {order:.3} from errors {errs:?}"))
}

fn run_cli(config: &Path, args: &[&str], out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_motorflux"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .env("MOTORFLUX_THREADS", "2")
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(format!(
            "{args:?} exited with {:?}: {}",
            status.status.code(),
            String::from_utf8_lossy(&status.stderr)
        ));
    }
    Ok(())
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = root.path().join("motor.toml");
    let text = fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/motor.toml")).unwrap()
        .replace("t_end = 50.0", "t_end = 5.0");
    fs::write(&config, text).unwrap();
    let commands: [&[&str]; 4] = [&["simulate"], &["steady"], &["verify-contraction"], &["verify-comparison"]];
    let mut runs = Vec::new();
    for k in 0..2 {
        let out = root.path().join(format!("run{k}"));
        for args in commands {
            run_cli(&config, args, &out)?;
        }
        runs.push(tree(&out));
    }
    let identical = runs[0] == runs[1];
    ensure(identical, format!("{} files compared across two runs", runs[0].len()))
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "conservation", budget: Duration::from_secs(10), body: conservation },
        Criterion { id: 2, name: "positivity and comparison", budget: Duration::from_secs(30), body: comparison },
        Criterion { id: 3, name: "weak and strict contraction", budget: Duration::from_secs(60), body: contraction },
        Criterion { id: 4, name: "equality case", budget: Duration::from_secs(60), body: equality },
        Criterion { id: 5, name: "stationary solver", budget: Duration::from_secs(10), body: stationary },
        Criterion { id: 6, name: "stabilization", budget: Duration::from_secs(60), body: stabilization },
        Criterion { id: 7, name: "oracle agreement", budget: Duration::from_secs(5), body: oracle },
        Criterion { id: 8, name: "gauge coherence", budget: Duration::from_secs(10), body: gauge },
        Criterion { id: 9, name: "spatial order", budget: Duration::from_secs(10), body: spatial },
        Criterion { id: 10, name: "determinism", budget: Duration::from_secs(60), body: determinism },
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for c in &criteria {
        if !filter.is_empty() && !filter.iter().any(|f| c.name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = (c.body)();
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(d) if elapsed <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; over time budget {:?}", c.budget)),
            Err(d) => (false, d),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} [{}] {}: {} ({:.2}s)",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            detail,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
