use crate::error::{Error, Result};

/// One uniformly partitioned coordinate axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n_cells: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, n_cells: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::Grid(format!("axis bounds must be finite, got [{lo}, {hi}]")));
        }
        if hi <= lo {
            return Err(Error::Grid(format!("axis needs hi > lo, got [{lo}, {hi}]")));
        }
        if n_cells < 2 {
            return Err(Error::Grid(format!("axis needs at least 2 cells, got {n_cells}")));
        }
        Ok(Axis { lo, hi, n_cells })
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.n_cells as f64
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn center(&self, j: usize) -> f64 {
        self.lo + (j as f64 + 0.5) * self.width()
    }

    /// Face `j` sits between cells `j-1` and `j`; faces `0` and `n_cells` are the boundary.
    pub fn face(&self, j: usize) -> f64 {
        if j == self.n_cells {
            self.hi
        } else {
            self.lo + j as f64 * self.width()
        }
    }
}

/// Uniform cell partition of an interval or an axis-aligned rectangle.
///
/// Cells are numbered with the x index running fastest: `cell = ix + nx * iy`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    axes: Vec<Axis>,
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::Grid(format!(
                "only 1-D and 2-D grids are supported, got {} axes",
                axes.len()
            )));
        }
        Ok(Grid { axes })
    }

    pub fn interval(lo: f64, hi: f64, n_cells: usize) -> Result<Self> {
        Grid::new(vec![Axis::new(lo, hi, n_cells)?])
    }

    pub fn rectangle(x: (f64, f64, usize), y: (f64, f64, usize)) -> Result<Self> {
        Grid::new(vec![Axis::new(x.0, x.1, x.2)?, Axis::new(y.0, y.1, y.2)?])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, k: usize) -> &Axis {
        &self.axes[k]
    }

    pub fn n_cells(&self) -> usize {
        self.axes.iter().map(|a| a.n_cells).product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::width).product()
    }

    /// |Ω|, computed from the bounds rather than by summing cells.
    pub fn total_volume(&self) -> f64 {
        self.axes.iter().map(Axis::length).product()
    }

    /// Index distance between neighbours along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.axes[..axis].iter().map(|a| a.n_cells).product()
    }

    pub fn multi_index(&self, cell: usize) -> [usize; 2] {
        let nx = self.axes[0].n_cells;
        [cell % nx, cell / nx]
    }

    pub fn center(&self, cell: usize) -> Vec<f64> {
        let idx = self.multi_index(cell);
        self.axes
            .iter()
            .enumerate()
            .map(|(k, a)| a.center(idx[k]))
            .collect()
    }

    pub fn centers(&self) -> Vec<Vec<f64>> {
        (0..self.n_cells()).map(|c| self.center(c)).collect()
    }

    pub fn contains(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, grid is {}-D",
                x.len(),
                self.dim()
            )));
        }
        for (axis, (&xi, a)) in x.iter().zip(&self.axes).enumerate() {
            if !(xi >= a.lo && xi <= a.hi) {
                return Err(Error::OutOfDomain {
                    x: xi,
                    axis,
                    lo: a.lo,
                    hi: a.hi,
                });
            }
        }
        Ok(())
    }

    /// Volume-weighted sum of a cell field.
    pub fn integrate(&self, field: &[f64]) -> f64 {
        self.cell_volume() * field.iter().sum::<f64>()
    }
}
