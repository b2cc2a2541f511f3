//! Small dense linear algebra: Cholesky factorization and ridge-stabilized
//! least squares. Sized for the workloads in this crate (k up to ~10 columns,
//! up to ~10^4 rows), not for general use.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Lower-triangular Cholesky factor `L` with `L * L^T = a`.
///
/// Only the lower triangle of `a` is read; the caller is responsible for
/// symmetry. A non-positive pivot is reported together with its index.
pub fn cholesky(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let k = a.nrows();
    if a.ncols() != k {
        return Err(Error::DimensionMismatch(format!(
            "cholesky needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let mut l = DMatrix::zeros(k, k);
    for j in 0..k {
        let mut d = a[(j, j)];
        for p in 0..j {
            d -= l[(j, p)] * l[(j, p)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j });
        }
        let root = d.sqrt();
        l[(j, j)] = root;
        for i in (j + 1)..k {
            let mut s = a[(i, j)];
            for p in 0..j {
                s -= l[(i, p)] * l[(j, p)];
            }
            l[(i, j)] = s / root;
        }
    }
    Ok(l)
}

/// Solve `L y = b` for lower-triangular `L`.
fn solve_lower(l: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let k = l.nrows();
    let mut y = DVector::zeros(k);
    for i in 0..k {
        let mut s = b[i];
        for j in 0..i {
            s -= l[(i, j)] * y[j];
        }
        y[i] = s / l[(i, i)];
    }
    y
}

/// Solve `L^T x = y` for lower-triangular `L`.
fn solve_lower_transpose(l: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    let k = l.nrows();
    let mut x = DVector::zeros(k);
    for i in (0..k).rev() {
        let mut s = y[i];
        for j in (i + 1)..k {
            s -= l[(j, i)] * x[j];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Solve `(L L^T) x = b` given the Cholesky factor `L`.
fn cholesky_solve(l: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    solve_lower_transpose(l, &solve_lower(l, b))
}

/// Result of [`least_squares`].
#[derive(Debug, Clone)]
pub struct LeastSquaresFit {
    /// Coefficients minimizing the residual sum of squares.
    pub beta: DVector<f64>,
    /// Residual sum of squares at `beta`.
    pub rss: f64,
    /// `(X^T X + kappa I)^-1`, the ridge-stabilized inverse used for
    /// posterior coefficient draws.
    pub xtx_inv: DMatrix<f64>,
    /// The ridge constant that was added to the normal equations.
    pub kappa: f64,
}

/// Ordinary least squares via the normal equations.
///
/// A ridge `kappa = 1e-8 * trace(X^T X) / q` is added before factorizing so
/// that near-singular designs (common when very few rows are observed) stay
/// solvable; one iterative-refinement step against the unridged system then
/// restores the ordinary solution to well below the ridge perturbation
/// whenever the design has full column rank.
pub fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<LeastSquaresFit> {
    let (n, q) = x.shape();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "least_squares: {} rows in design but {} responses",
            n,
            y.len()
        )));
    }
    if n < q {
        return Err(Error::RankDeficient { pivot: n });
    }

    let xtx = x.tr_mul(x);
    let xty = x.tr_mul(y);
    let kappa = 1e-8 * xtx.trace() / q as f64;
    let mut ridged = xtx.clone();
    for i in 0..q {
        ridged[(i, i)] += kappa;
    }
    let l = cholesky(&ridged).map_err(|e| match e {
        Error::NotPositiveDefinite { pivot } => Error::RankDeficient { pivot },
        other => other,
    })?;

    let first = cholesky_solve(&l, &xty);
    // Refinement step against the unridged normal equations.
    let residual = &xty - &xtx * &first;
    let beta = &first + cholesky_solve(&l, &residual);

    let fitted = x * &beta;
    let rss = (y - fitted).norm_squared();

    let mut xtx_inv = DMatrix::zeros(q, q);
    for j in 0..q {
        let mut e = DVector::zeros(q);
        e[j] = 1.0;
        xtx_inv.set_column(j, &cholesky_solve(&l, &e));
    }

    Ok(LeastSquaresFit {
        beta,
        rss,
        xtx_inv,
        kappa,
    })
}
