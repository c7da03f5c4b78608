//! Executable checks of the qualitative properties of the flow, each
//! producing a [`CheckReport`].

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use super::norms::weighted_l1_distance;
use super::oracle::oracle_compare;
use super::report::{max_increase, CheckReport, Criterion, DifferenceSeries};
use crate::discretize::assemble_system;
use crate::error::{Error, Result};
use crate::evolve::{run_from, StepConfig, Trajectory};
use crate::model::{InitialSpec, ProblemSpec, State};
use crate::steady::{
    constant_pair_state, project_onto_ray, reversible_pair, solve_null_vector, NullVectorOptions,
    ReversiblePair, StationaryRay, StationaryState,
};

/// Slack on monotonicity, relative to `1 + d(0)`.
pub const MONOTONE_SLACK: f64 = 1e-10;
/// Bound on `|d(t) − d(0)|` for one-signed differences.
pub const EQUALITY_TOL: f64 = 1e-10;
/// Required `d(1)/d(0)` for differences that change sign.
pub const STRICT_RATIO: f64 = 0.99;
/// Tolerance on ordering and positivity violations.
pub const ORDER_TOL: f64 = 1e-12;
/// Default distance to the stationary state at the end of a convergence run.
pub const CONVERGENCE_TOL: f64 = 1e-6;

/// Entries of a difference below this magnitude do not count towards a sign.
pub const SIGN_FLOOR: f64 = 1e-8;
/// Default window `[0, t]` over which strict decrease is demanded.
pub const STRICT_WINDOW: f64 = 1.0;

/// Whether some species of `a − b` has entries of both signs.
fn changes_sign(a: &State, b: &State) -> bool {
    (0..a.n_species()).any(|i| {
        let d = a.species(i).iter().zip(b.species(i)).map(|(x, y)| x - y);
        let (mut pos, mut neg) = (false, false);
        for v in d {
            pos |= v > SIGN_FLOOR;
            neg |= v < -SIGN_FLOOR;
        }
        pos && neg
    })
}

pub fn difference_series(spec: &ProblemSpec, a: &Trajectory, b: &Trajectory) -> Result<DifferenceSeries> {
    if a.snapshots.len() != b.snapshots.len() {
        return Err(Error::Dimension("trajectories have different lengths".into()));
    }
    let mut out = DifferenceSeries {
        times: Vec::with_capacity(a.snapshots.len()),
        norms: Vec::with_capacity(a.snapshots.len()),
        sign_changes: Vec::with_capacity(a.snapshots.len()),
    };
    for (x, y) in a.snapshots.iter().zip(&b.snapshots) {
        out.times.push(x.time());
        out.norms.push(weighted_l1_distance(&x.state, &y.state, spec)?);
        out.sign_changes.push(changes_sign(&x.state, &y.state));
    }
    Ok(out)
}

fn run_pair(spec: &ProblemSpec, a: &State, b: &State, cfg: &StepConfig) -> Result<(Trajectory, Trajectory)> {
    let (ta, tb) = rayon::join(
        || run_from(spec, a.clone(), cfg),
        || run_from(spec, b.clone(), cfg),
    );
    Ok((ta?, tb?))
}

/// L¹ contraction between two solutions. The difference norm must not grow;
/// it must shrink by the time `t = 1` when the initial difference changes
/// sign and stay constant when it does not.
pub fn check_contraction(
    spec: &ProblemSpec,
    a: &State,
    b: &State,
    cfg: &StepConfig,
) -> Result<(CheckReport, DifferenceSeries)> {
    check_contraction_within(spec, a, b, cfg, STRICT_WINDOW)
}

/// As [`check_contraction`], demanding strict decrease by `t = window`.
pub fn check_contraction_within(
    spec: &ProblemSpec,
    a: &State,
    b: &State,
    cfg: &StepConfig,
    window: f64,
) -> Result<(CheckReport, DifferenceSeries)> {
    let (ta, tb) = run_pair(spec, a, b, cfg)?;
    let series = difference_series(spec, &ta, &tb)?;
    let d0 = series.initial();
    let (inc, at) = series.max_increase();
    let mut criteria = vec![Criterion::new("monotone", inc, MONOTONE_SLACK * (1.0 + d0), at)];
    let sign_changing = series.changes_sign_initially();
    if sign_changing {
        let t = cfg.t_end.min(window);
        if t > 0.0 && d0 > 0.0 {
            let ratio = series.ratio_at(t).unwrap_or(1.0);
            criteria.push(Criterion::new("strict", ratio, STRICT_RATIO, Some(t)));
        }
    } else {
        let (dev, at) = series
            .times
            .iter()
            .zip(&series.norms)
            .map(|(&t, d)| ((d - d0).abs(), t))
            .fold((0.0, None), |(m, mt), (d, t)| if d > m { (d, Some(t)) } else { (m, mt) });
        criteria.push(Criterion::new("equality", dev, EQUALITY_TOL, at));
    }
    let report = CheckReport::new("contraction", criteria, series.times.clone(), series.norms.clone())
        .with_extra("initial_distance", d0)
        .with_extra("sign_changing", sign_changing);
    Ok((report, series))
}

/// Ordered initial data stay ordered and nonnegative data stay nonnegative.
pub fn check_comparison(spec: &ProblemSpec, low: &State, high: &State, cfg: &StepConfig) -> Result<CheckReport> {
    low.same_shape(high)?;
    if let Some(k) = low.values().iter().zip(high.values()).position(|(l, h)| l > h) {
        return Err(Error::Invalid(format!(
            "comparison needs ordered data; entry {k} has {} > {}",
            low.values()[k],
            high.values()[k]
        )));
    }
    let (tl, th) = run_pair(spec, low, high, cfg)?;
    let nonneg = low.min() >= 0.0;
    let mut times = Vec::new();
    let mut order_series = Vec::new();
    let mut order_worst = (0.0, None);
    let mut neg_worst = (0.0, None);
    for (l, h) in tl.snapshots.iter().zip(&th.snapshots) {
        let t = l.time();
        let v = l
            .state
            .values()
            .iter()
            .zip(h.state.values())
            .map(|(x, y)| x - y)
            .fold(0.0, f64::max);
        times.push(t);
        order_series.push(v);
        if v > order_worst.0 {
            order_worst = (v, Some(t));
        }
        let neg = (-l.state.min()).max(-h.state.min()).max(0.0);
        if neg > neg_worst.0 {
            neg_worst = (neg, Some(t));
        }
    }
    let mut criteria = vec![Criterion::new("ordering", order_worst.0, ORDER_TOL, order_worst.1)];
    if nonneg {
        criteria.push(Criterion::new("positivity", neg_worst.0, ORDER_TOL, neg_worst.1));
    }
    Ok(CheckReport::new("comparison", criteria, times, order_series))
}

/// The stationary state a solution from `u0` should approach: the member of
/// the null-vector ray with the same weighted mass for linear problems, and
/// the constant pair for the reversible two-species reaction.
pub fn stationary_target(spec: &ProblemSpec, u0: &State, opts: &NullVectorOptions) -> Result<StationaryState> {
    if spec.is_linear()? {
        let op = assemble_system(spec)?;
        let ray = StationaryRay::new(solve_null_vector(&op, opts)?);
        Ok(project_onto_ray(u0, &ray, spec)?.1)
    } else {
        let pair = ReversiblePair::from_problem(spec)?;
        let (a, b) = reversible_pair(pair.mass_density(u0, spec)?, &pair)?;
        constant_pair_state(a, b, &pair, spec)
    }
}

/// Distance to `target` is nonincreasing and ends below `threshold`.
pub fn check_convergence(
    spec: &ProblemSpec,
    u0: &State,
    target: &State,
    cfg: &StepConfig,
    threshold: f64,
) -> Result<CheckReport> {
    let traj = run_from(spec, u0.clone(), cfg)?;
    let times = traj.times();
    let series = traj
        .snapshots
        .iter()
        .map(|s| weighted_l1_distance(&s.state, target, spec))
        .collect::<Result<Vec<f64>>>()?;
    let d0 = series[0];
    let (inc, at) = max_increase(&times, &series);
    let last = *series.last().expect("nonempty");
    let criteria = vec![
        Criterion::new("monotone", inc, MONOTONE_SLACK * (1.0 + d0), at),
        Criterion::new("final_distance", last, threshold, times.last().copied()),
    ];
    Ok(CheckReport::new("convergence", criteria, times, series))
}

/// Everything a registered check may need.
#[derive(Clone, Debug)]
pub struct CheckContext {
    pub spec: ProblemSpec,
    /// Second initial datum; defaults to the first one reseeded.
    pub alt: Option<Vec<InitialSpec>>,
    pub step: StepConfig,
    pub steady: NullVectorOptions,
    /// Overrides the check's own pass threshold where it has one.
    pub tol: Option<f64>,
    pub seed: u64,
    pub strict_window: f64,
}

impl CheckContext {
    pub fn new(spec: ProblemSpec, step: StepConfig) -> Self {
        CheckContext {
            spec,
            alt: None,
            step,
            steady: NullVectorOptions::default(),
            tol: None,
            seed: 1,
            strict_window: STRICT_WINDOW,
        }
    }

    pub fn primary(&self) -> Result<State> {
        self.spec.initial_state()
    }

    pub fn secondary(&self) -> Result<State> {
        match &self.alt {
            Some(alt) => self.spec.state_from(alt),
            None => {
                let data: Vec<InitialSpec> =
                    self.spec.initial.iter().map(|d| d.reseeded(self.seed)).collect();
                self.spec.state_from(&data)
            }
        }
    }
}

pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, ctx: &CheckContext) -> Result<CheckReport>;
}

struct Contraction;
struct Comparison;
struct Convergence;
struct Oracle;

impl Check for Contraction {
    fn name(&self) -> &'static str {
        "contraction"
    }

    fn run(&self, ctx: &CheckContext) -> Result<CheckReport> {
        let (a, b) = (ctx.primary()?, ctx.secondary()?);
        Ok(check_contraction_within(&ctx.spec, &a, &b, &ctx.step, ctx.strict_window)?.0)
    }
}

impl Check for Comparison {
    fn name(&self) -> &'static str {
        "comparison"
    }

    /// Runs the pointwise minimum and maximum of the two initial data.
    fn run(&self, ctx: &CheckContext) -> Result<CheckReport> {
        let a = ctx.primary()?;
        let b = ctx.secondary()?;
        a.same_shape(&b)?;
        let lo = a.values().iter().zip(b.values()).map(|(x, y)| x.min(*y)).collect();
        let hi = a.values().iter().zip(b.values()).map(|(x, y)| x.max(*y)).collect();
        check_comparison(&ctx.spec, &a.with_values(lo), &a.with_values(hi), &ctx.step)
    }
}

impl Check for Convergence {
    fn name(&self) -> &'static str {
        "convergence"
    }

    fn run(&self, ctx: &CheckContext) -> Result<CheckReport> {
        let u0 = ctx.primary()?;
        let target = stationary_target(&ctx.spec, &u0, &ctx.steady)?;
        let threshold = ctx.tol.unwrap_or(CONVERGENCE_TOL);
        Ok(check_convergence(&ctx.spec, &u0, &target.state, &ctx.step, threshold)?
            .with_extra("target_residual", target.residual))
    }
}

impl Check for Oracle {
    fn name(&self) -> &'static str {
        "oracle"
    }

    /// Step sizes `dt`, `dt/2`, `dt/4` up to `t_end`.
    fn run(&self, ctx: &CheckContext) -> Result<CheckReport> {
        let dt = ctx.step.dt;
        oracle_compare(&ctx.spec, &ctx.step, ctx.step.t_end, &[dt, dt / 2.0, dt / 4.0])
    }
}

/// Checks by name.
#[derive(Clone, Default)]
pub struct CheckRegistry {
    checks: BTreeMap<&'static str, Arc<dyn Check>>,
}

impl CheckRegistry {
    pub fn with_builtins() -> Self {
        let mut r = CheckRegistry::default();
        r.register(Arc::new(Contraction));
        r.register(Arc::new(Comparison));
        r.register(Arc::new(Convergence));
        r.register(Arc::new(Oracle));
        r
    }

    pub fn builtin() -> &'static CheckRegistry {
        static REGISTRY: OnceLock<CheckRegistry> = OnceLock::new();
        REGISTRY.get_or_init(CheckRegistry::with_builtins)
    }

    pub fn register(&mut self, check: Arc<dyn Check>) {
        self.checks.insert(check.name(), check);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.checks.keys().copied().collect()
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Check>> {
        self.checks
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "check",
                name: name.to_string(),
                known: self.names().join(", "),
            })
    }

    pub fn run(&self, name: &str, ctx: &CheckContext) -> Result<CheckReport> {
        self.get(name)?.run(ctx)
    }
}
