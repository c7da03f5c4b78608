use std::fmt;

use serde::Serialize;

use super::coupling::COLUMN_SUM_TOL;
use super::{InitialSpec, ProblemSpec};
use crate::error::{Error, Result};

/// Standing assumption a violation breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Hypothesis {
    /// σᵢ > 0 and αᵢ > 0.
    PositiveConstants,
    /// Metzler sign pattern and zero column sums of λ.
    Coupling,
    /// Monotone reactions with r(0) = 0, smooth finite potentials.
    ReactionsAndPotentials,
    /// Nonnegative initial data.
    InitialData,
    /// Shape mismatches between grid, species, coupling and data.
    Consistency,
}

impl Hypothesis {
    pub fn label(self) -> &'static str {
        match self {
            Hypothesis::PositiveConstants => "Hypothesis 1",
            Hypothesis::Coupling => "Hypothesis 2",
            Hypothesis::ReactionsAndPotentials => "Hypothesis 3",
            Hypothesis::InitialData => "Hypothesis 4",
            Hypothesis::Consistency => "consistency",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub hypothesis: Hypothesis,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.hypothesis.label(), self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Non-fatal observations, e.g. a reducible coupling graph.
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.passed() {
            Ok(())
        } else {
            Err(Error::Invalid(
                self.violations
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; "),
            ))
        }
    }

    fn push(&mut self, hypothesis: Hypothesis, message: String) {
        self.violations.push(Violation {
            hypothesis,
            message,
        });
    }
}

/// Check every standing hypothesis of a problem. Violations are reported,
/// never raised.
pub fn validate(spec: &ProblemSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = spec.n_species();
    if n == 0 {
        report.push(Hypothesis::Consistency, "no species".into());
        return report;
    }
    if spec.coupling.n() != n {
        report.push(
            Hypothesis::Consistency,
            format!("coupling is {0}x{0} for {n} species", spec.coupling.n()),
        );
    }
    if spec.initial.len() != n {
        report.push(
            Hypothesis::Consistency,
            format!("{} initial data for {n} species", spec.initial.len()),
        );
    }

    for (i, s) in spec.species.iter().enumerate() {
        if !(s.sigma > 0.0 && s.sigma.is_finite()) {
            report.push(
                Hypothesis::PositiveConstants,
                format!("sigma of species {} is {} (must be > 0)", i + 1, s.sigma),
            );
        }
        if !(s.alpha > 0.0 && s.alpha.is_finite()) {
            report.push(
                Hypothesis::PositiveConstants,
                format!("alpha of species {} is {} (must be > 0)", i + 1, s.alpha),
            );
        }
        match s.reaction.build() {
            Err(e) => report.push(
                Hypothesis::ReactionsAndPotentials,
                format!("reaction of species {}: {e}", i + 1),
            ),
            Ok(_) => {
                if let Some(p) = s.reaction.exponent() {
                    if p < 1.0 {
                        report.push(
                            Hypothesis::ReactionsAndPotentials,
                            format!("species {}: reaction not admissible (p<1), p = {p}", i + 1),
                        );
                    }
                }
            }
        }
        check_potential(spec, i, &mut report);
    }

    if spec.coupling.n() == n {
        for (i, j, v) in spec.coupling.metzler_violations() {
            let what = if i == j {
                "diagonal entry must be <= 0"
            } else {
                "off-diagonal entry must be >= 0"
            };
            report.push(
                Hypothesis::Coupling,
                format!("lambda[{}][{}] = {v}: {what}", i + 1, j + 1),
            );
        }
        for (j, sum) in spec.coupling.column_sums().into_iter().enumerate() {
            if sum.abs() > COLUMN_SUM_TOL {
                report.push(
                    Hypothesis::Coupling,
                    format!("column {} sums to {sum} ≠ 0", j + 1),
                );
            }
        }
        if !spec.coupling.is_irreducible() {
            report.warnings.push(
                "coupling graph is not strongly connected; the stationary state need not be unique"
                    .into(),
            );
        }
    }

    for (i, d) in spec.initial.iter().enumerate() {
        check_initial(spec, i, d, &mut report);
    }
    report
}

fn check_potential(spec: &ProblemSpec, i: usize, report: &mut ValidationReport) {
    let potential = &spec.species[i].potential;
    let profile = match potential.build() {
        Ok(p) => p,
        Err(e) => {
            report.push(
                Hypothesis::ReactionsAndPotentials,
                format!("potential of species {}: {e}", i + 1),
            );
            return;
        }
    };
    // Centres and the domain corners, where tables must still be defined.
    let grid = &spec.grid;
    let mut points = grid.centers();
    let corners: Vec<Vec<f64>> = match grid.dim() {
        1 => vec![vec![grid.axis(0).lo], vec![grid.axis(0).hi]],
        _ => {
            let (x, y) = (grid.axis(0), grid.axis(1));
            vec![
                vec![x.lo, y.lo],
                vec![x.hi, y.lo],
                vec![x.lo, y.hi],
                vec![x.hi, y.hi],
            ]
        }
    };
    points.extend(corners);
    for x in points {
        match profile.value(&x) {
            Ok(v) if v.is_finite() => {}
            Ok(v) => {
                report.push(
                    Hypothesis::ReactionsAndPotentials,
                    format!("potential of species {} is {v} at {x:?}", i + 1),
                );
                return;
            }
            Err(e) => {
                report.push(
                    Hypothesis::ReactionsAndPotentials,
                    format!("potential of species {} at {x:?}: {e}", i + 1),
                );
                return;
            }
        }
    }
}

fn check_initial(spec: &ProblemSpec, i: usize, d: &InitialSpec, report: &mut ValidationReport) {
    match d.sample(&spec.grid) {
        Err(e) => report.push(
            Hypothesis::InitialData,
            format!("initial datum of species {}: {e}", i + 1),
        ),
        Ok(values) => {
            if let Some((c, v)) = values
                .iter()
                .enumerate()
                .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
            {
                report.push(
                    Hypothesis::InitialData,
                    format!(
                        "initial datum of species {} is {v} in cell {c} (must be finite and >= 0)",
                        i + 1
                    ),
                );
            }
        }
    }
}
