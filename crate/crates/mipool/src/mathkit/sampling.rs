//! Distribution sampling on top of [`RngStream`](super::RngStream) generators.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};

/// One multivariate normal draw `mu + L z` from a pre-factored covariance.
///
/// `chol_sigma` is the lower-triangular factor returned by
/// [`cholesky`](super::cholesky); `z` are i.i.d. standard normals taken from
/// `rng` in index order.
pub fn mvn_sample<R: Rng + ?Sized>(
    mu: &DVector<f64>,
    chol_sigma: &DMatrix<f64>,
    rng: &mut R,
) -> Result<DVector<f64>> {
    let k = mu.len();
    if chol_sigma.nrows() != k || chol_sigma.ncols() != k {
        return Err(Error::DimensionMismatch(format!(
            "mvn_sample: mean has length {k} but factor is {}x{}",
            chol_sigma.nrows(),
            chol_sigma.ncols()
        )));
    }
    let z = DVector::from_fn(k, |_, _| StandardNormal.sample(rng));
    Ok(mu + chol_sigma * z)
}

/// One chi-square draw with (possibly fractional) `df > 0`.
///
/// Sampled as Gamma(df/2, scale 2), which is exact for every positive df.
pub fn draw_chi_square<R: Rng + ?Sized>(df: f64, rng: &mut R) -> Result<f64> {
    if !df.is_finite() || df <= 0.0 {
        return Err(Error::InvalidDegreesOfFreedom { df });
    }
    let gamma = Gamma::new(0.5 * df, 2.0)
        .map_err(|_| Error::InvalidDegreesOfFreedom { df })?;
    Ok(gamma.sample(rng))
}
