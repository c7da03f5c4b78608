//! Stationary states: the Perron null vector of the linear system, constant
//! pairs of the reversible reaction, and projection onto the stationary ray.

mod continuum;
mod null_vector;

pub use continuum::{
    constant_pair_state, project_onto_ray, reversible_pair, ReversiblePair, StationaryRay,
};
pub use null_vector::{
    adjoint_null_check, inverse_iteration, inverse_iteration_from, solve_null_vector,
    Normalization, NormalizationRecord, NullVectorOptions, StationaryState,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::assemble_system;
    use crate::model::{
        CouplingMatrix, Grid, InitialSpec, ProblemSpec, ProfileSpec, ReactionSpec, SpeciesSpec,
    };

    fn motor() -> ProblemSpec {
        ProblemSpec {
            grid: Grid::interval(0.0, 1.0, 16).unwrap(),
            species: vec![SpeciesSpec::new(1.0, 1.0, ProfileSpec::zero()); 2],
            coupling: CouplingMatrix::exchange(1.0),
            initial: vec![InitialSpec::constant(1.0); 2],
        }
    }

    fn pair(p: f64, alpha: f64, beta: f64) -> ReversiblePair {
        ReversiblePair {
            r_a: ReactionSpec::power(p).build().unwrap(),
            r_b: ReactionSpec::linear().build().unwrap(),
            alpha,
            beta,
        }
    }

    #[test]
    fn symmetric_motor_null_vector() {
        let op = assemble_system(&motor()).unwrap();
        let v = solve_null_vector(&op, &NullVectorOptions::default()).unwrap();
        for x in v.state.values() {
            assert!((x - 0.5).abs() <= 1e-12, "{x}");
        }
        assert!(v.residual <= 1e-10);
    }

    #[test]
    fn weighted_normalization() {
        let mut spec = motor();
        spec.species[1].alpha = 2.0;
        let op = assemble_system(&spec).unwrap();
        let opts = NullVectorOptions {
            normalization: Normalization::Weighted,
            ..Default::default()
        };
        let v = solve_null_vector(&op, &opts).unwrap();
        let m = crate::verify::weighted_mass(&v.state, &spec).unwrap();
        assert!((m - 1.0).abs() <= 1e-13);
    }

    #[test]
    fn adjoint_check_sensitivity() {
        let op = assemble_system(&motor()).unwrap();
        assert!(adjoint_null_check(&op) <= 1e-12);
    }

    #[test]
    fn reversible_pairs() {
        let (a, b) = reversible_pair(2.0, &pair(2.0, 1.0, 1.0)).unwrap();
        assert!((a - 1.0).abs() <= 1e-15 && (b - 1.0).abs() <= 1e-15);
        let (a, b) = reversible_pair(2.0, &pair(1.0, 1.0, 1.0)).unwrap();
        assert!((a - 1.0).abs() <= 1e-15 && (b - 1.0).abs() <= 1e-15);
        assert!(reversible_pair(0.0, &pair(2.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn projection_scales() {
        let spec = motor();
        let op = assemble_system(&spec).unwrap();
        let ray = StationaryRay::new(solve_null_vector(&op, &Default::default()).unwrap());
        let (c, _) = project_onto_ray(&ray.base.state, &ray, &spec).unwrap();
        assert!((c - 1.0).abs() <= 1e-14);
        let (c, m) = project_onto_ray(&ray.base.state.scaled(3.0), &ray, &spec).unwrap();
        assert!((c - 3.0).abs() <= 1e-14);
        assert!((m.state.values()[0] - 1.5).abs() <= 1e-12);
        assert!(project_onto_ray(&spec.empty_state(), &ray, &spec).is_err());
    }
}
