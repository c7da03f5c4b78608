//! Exponentially fitted (Scharfetter–Gummel) finite-volume operators, the
//! linear coupling block, and the gauge similarity.

mod bernoulli;
mod gauge;
mod operator;

pub use bernoulli::bernoulli;
pub use gauge::{
    conjugate_to_neumann, gauge_factors, gauge_transform, GaugeDirection, NeumannOperator,
    GAUGE_EXPONENT_LIMIT,
};
pub use operator::{
    assemble_system, assemble_transport, assemble_transports, left_residual, BlockOperator,
    SystemOperator, TransportOperator,
};

use crate::linalg::sparse::to_matrix_market;

/// Matrix Market dump of any assembled operator.
pub fn dump_matrix_market<O: BlockOperator>(op: &O) -> String {
    to_matrix_market(op.matrix())
}
