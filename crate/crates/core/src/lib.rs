//! Bounded local-identity ("blid") maps on discretized function spaces.
//!
//! The toolkit builds smooth maps that equal the identity on a ball and are
//! globally bounded, uses them to extend locally defined maps to the whole
//! space, checks the differentiability notions the extension preserves, and
//! runs the global conjugacy experiment for hyperbolic maps.

pub mod blid;
pub mod bump;
pub mod diffcheck;
pub mod error;
pub mod funcspace;
pub mod germ;
pub mod linearize;

pub use blid::{BlidKind, BlidMap};
pub use bump::{bump_linear_bound, BumpFunction};
pub use error::{BlidError, Result};
