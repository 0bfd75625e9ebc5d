//! Discretized function spaces: grid functions, `C^q` jets, their norms and
//! the Fréchet metric of a countable norm family.

mod grid;
mod io;
mod jet;
mod norms;
mod quadrature;
pub mod sampling;
mod vector;

pub use grid::GridFunction;
pub use io::{read_grid_csv, write_grid_csv};
pub use jet::JetGridFunction;
pub use norms::{
    frechet_distance_to_zero, frechet_metric, metric_from_norms, metric_tail_bound, norm_q,
    norm_sup, norm_windowed, window_sup, windowed_norms, GridLayout, NormFamilyDescriptor,
    NormKind, DEFAULT_INTERVALS, DEFAULT_K_MAX, DEFAULT_Q_CAP, REAL_LINE_NODES_PER_UNIT,
};
pub use quadrature::{iterated_integral, iterated_integral_on_grid};
pub use vector::{euclidean_norm, Vector};
