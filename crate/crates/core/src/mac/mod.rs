//! Staggered (MAC) grid geometry, fields and the discrete operators the
//! time integrators are assembled from.

mod field;
mod ops;

pub use field::{CellField, Grid, VelocityField};
pub use ops::{
    convect, divergence, gradient, inner, inner_cell, laplacian_dirichlet, norm_cell, norm_h1_semi,
    norm_l2,
};
