use crate::error::{Error, Result};

/// Which variables a [`State`] holds: the physical densities `u` or the
/// Neumann-gauge `w = u·exp(ψ/σ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gauge {
    Physical,
    Neumann,
}

impl Gauge {
    pub fn name(self) -> &'static str {
        match self {
            Gauge::Physical => "physical",
            Gauge::Neumann => "neumann",
        }
    }
}

/// Cell values of all species at one instant, stored species-major:
/// entry `i * n_cells + c` is species `i` in cell `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    n_species: usize,
    n_cells: usize,
    values: Vec<f64>,
    pub time: f64,
    pub gauge: Gauge,
}

impl State {
    pub fn new(n_species: usize, n_cells: usize, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != n_species * n_cells {
            return Err(Error::Dimension(format!(
                "{} values for {n_species} species on {n_cells} cells",
                values.len()
            )));
        }
        Ok(State {
            n_species,
            n_cells,
            values,
            time,
            gauge: Gauge::Physical,
        })
    }

    pub fn zeros(n_species: usize, n_cells: usize) -> Self {
        State {
            n_species,
            n_cells,
            values: vec![0.0; n_species * n_cells],
            time: 0.0,
            gauge: Gauge::Physical,
        }
    }

    pub fn from_species(fields: Vec<Vec<f64>>, time: f64) -> Result<Self> {
        let n_species = fields.len();
        let n_cells = fields.first().map_or(0, Vec::len);
        if fields.iter().any(|f| f.len() != n_cells) {
            return Err(Error::Dimension("species fields differ in length".into()));
        }
        State::new(n_species, n_cells, fields.concat(), time)
    }

    pub fn n_species(&self) -> usize {
        self.n_species
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn species(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cells..(i + 1) * self.n_cells]
    }

    pub fn species_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.n_cells..(i + 1) * self.n_cells]
    }

    /// Same shape and metadata, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.values.len());
        State {
            values,
            ..self.clone()
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.with_values(self.values.iter().map(|v| c * v).collect())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn same_shape(&self, other: &State) -> Result<()> {
        if self.n_species != other.n_species || self.n_cells != other.n_cells {
            return Err(Error::Dimension(format!(
                "states differ in shape: {}x{} vs {}x{}",
                self.n_species, self.n_cells, other.n_species, other.n_cells
            )));
        }
        Ok(())
    }
}
