//! Numeric kernel: deterministic random streams, small dense linear algebra,
//! and the distribution functions needed by the imputer and the pooling
//! rules.

mod linalg;
mod rng;
mod sampling;
mod special;

pub use linalg::{cholesky, least_squares, LeastSquaresFit};
pub use rng::RngStream;
pub use sampling::{draw_chi_square, mvn_sample};
pub use special::t_quantile;
