//! Chained-equations multiple imputation with Bayesian linear-regression
//! draws.
//!
//! Each incomplete column is imputed by regressing it on all other columns
//! plus an intercept and drawing from the resulting posterior predictive
//! distribution: first the residual variance from a scaled inverse
//! chi-square, then the coefficients from their normal posterior, then the
//! predictions with fresh residual noise. Cycling through the incomplete
//! columns a fixed number of times is one chain; independent chains produce
//! the m completed datasets.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::{ImputationStack, IncompleteDataset};
use crate::error::{Error, Result};
use crate::mathkit::{cholesky, draw_chi_square, least_squares, RngStream};

/// Settings for [`mice`].
#[derive(Debug, Clone, Copy)]
pub struct ImputerConfig {
    /// Number of imputations (chains); at least 2.
    pub m: usize,
    /// Chained-equation cycles per chain; at least 1.
    pub iterations: usize,
    /// Stream from which the per-chain substreams are derived.
    pub rng: RngStream,
}

impl ImputerConfig {
    pub fn new(m: usize, iterations: usize, rng: RngStream) -> Result<Self> {
        if m < 2 {
            return Err(Error::TooFewImputations { m });
        }
        if iterations < 1 {
            return Err(Error::InvalidConfig(
                "iterations must be at least 1".into(),
            ));
        }
        Ok(Self { m, iterations, rng })
    }
}

/// One Bayesian linear-regression imputation draw.
///
/// Given observed responses `y_obs` with design `x_obs` and the design rows
/// `x_mis` of the missing responses (both designs carrying an intercept
/// column), this
///
/// 1. fits least squares to get `beta_hat`, the residual sum of squares and
///    the ridge-stabilized `(X'X + kI)^-1`,
/// 2. draws `sigma*^2 = rss / chi2(n_obs - q)`,
/// 3. draws `beta* = beta_hat + sigma* L z` where `L L' = (X'X + kI)^-1`,
/// 4. returns `x_mis beta* + sigma* eps` with fresh standard-normal `eps`.
///
/// Draw order is fixed (chi-square, then the q coefficient normals, then the
/// n_mis residual normals) so results are reproducible from the stream alone.
pub fn norm_draw<R: Rng + ?Sized>(
    y_obs: &DVector<f64>,
    x_obs: &DMatrix<f64>,
    x_mis: &DMatrix<f64>,
    rng: &mut R,
) -> Result<DVector<f64>> {
    let n_obs = y_obs.len();
    let q = x_obs.ncols();
    if x_obs.nrows() != n_obs {
        return Err(Error::DimensionMismatch(format!(
            "norm_draw: {} observed responses but {} design rows",
            n_obs,
            x_obs.nrows()
        )));
    }
    if x_mis.ncols() != q {
        return Err(Error::DimensionMismatch(format!(
            "norm_draw: designs disagree on column count ({q} vs {})",
            x_mis.ncols()
        )));
    }
    if x_mis.nrows() == 0 {
        return Ok(DVector::zeros(0));
    }
    if n_obs < q + 1 {
        return Err(Error::TooFewObservedRows {
            column: "response".into(),
            observed: n_obs,
            needed: q + 1,
        });
    }

    let fit = least_squares(x_obs, y_obs)?;
    let chi2 = draw_chi_square((n_obs - q) as f64, rng)?;
    let sigma_star = (fit.rss / chi2).sqrt();

    let l = cholesky(&fit.xtx_inv)?;
    let z = DVector::from_fn(q, |_, _| StandardNormal.sample(rng));
    let beta_star = &fit.beta + sigma_star * (&l * z);

    let n_mis = x_mis.nrows();
    let eps = DVector::from_fn(n_mis, |_, _| StandardNormal.sample(rng));
    Ok(x_mis * beta_star + sigma_star * eps)
}

/// Which columns have missing cells, in left-to-right order.
fn incomplete_columns(ds: &IncompleteDataset) -> Vec<usize> {
    (0..ds.ncols())
        .filter(|&c| (0..ds.nrows()).any(|r| !ds.is_observed(r, c)))
        .collect()
}

/// Multiple imputation by chained equations.
///
/// Each of the `m` chains starts by filling every missing cell with a random
/// draw from the observed values of its column, then cycles `iterations`
/// times through the incomplete columns in left-to-right order, replacing
/// each column's missing entries via [`norm_draw`] with all other columns
/// (current completed values) plus an intercept as predictors. Chains run on
/// independent substreams of `cfg.rng`, so the result does not depend on
/// scheduling; observed cells are carried over bit-for-bit.
pub fn mice(ds: &IncompleteDataset, cfg: &ImputerConfig) -> Result<ImputationStack> {
    if cfg.m < 2 {
        return Err(Error::TooFewImputations { m: cfg.m });
    }
    if cfg.iterations < 1 {
        return Err(Error::InvalidConfig(
            "iterations must be at least 1".into(),
        ));
    }
    let columns = incomplete_columns(ds);
    let q = ds.ncols(); // intercept + the other ncols - 1 columns
    for &col in &columns {
        let observed = ds.observed_count(col)?;
        if observed == 0 {
            return Err(Error::NoObservedValues {
                column: ds.column_names()[col].clone(),
            });
        }
        if observed < q + 1 {
            return Err(Error::TooFewObservedRows {
                column: ds.column_names()[col].clone(),
                observed,
                needed: q + 1,
            });
        }
    }

    let mut completions = Vec::with_capacity(cfg.m);
    for chain in 0..cfg.m {
        let mut rng = cfg.rng.child(chain as u64).rng();
        completions.push(run_chain(ds, &columns, cfg.iterations, &mut rng)?);
    }
    ImputationStack::new(
        completions,
        ds.mask().clone(),
        ds.column_names().to_vec(),
    )
}

fn run_chain<R: Rng + ?Sized>(
    ds: &IncompleteDataset,
    columns: &[usize],
    iterations: usize,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    let mut data = ds.values().clone();

    // Starting imputation: draws from the observed values of each column.
    for &col in columns {
        let observed = ds.column_observed_values(col)?;
        for row in ds.missing_rows(col)? {
            data[(row, col)] = observed[rng.random_range(0..observed.len())];
        }
    }

    for _ in 0..iterations {
        for &col in columns {
            let obs_rows: Vec<usize> =
                (0..ds.nrows()).filter(|&r| ds.is_observed(r, col)).collect();
            let mis_rows = ds.missing_rows(col)?;
            if mis_rows.is_empty() {
                continue;
            }
            let predictors: Vec<usize> = (0..ds.ncols()).filter(|&c| c != col).collect();
            let design = |rows: &[usize]| {
                DMatrix::from_fn(rows.len(), predictors.len() + 1, |i, j| {
                    if j == 0 {
                        1.0
                    } else {
                        data[(rows[i], predictors[j - 1])]
                    }
                })
            };
            let x_obs = design(&obs_rows);
            let x_mis = design(&mis_rows);
            let y_obs = DVector::from_iterator(
                obs_rows.len(),
                obs_rows.iter().map(|&r| data[(r, col)]),
            );
            let drawn = norm_draw(&y_obs, &x_obs, &x_mis, rng)?;
            for (i, &row) in mis_rows.iter().enumerate() {
                data[(row, col)] = drawn[i];
            }
        }
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{column_mean_analyzer, stack_estimates};
    use crate::pooling::pool_simplified;
    use approx::assert_abs_diff_eq;

    fn ones_design(xs: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(xs.len(), 2, |i, j| if j == 0 { 1.0 } else { xs[i] })
    }

    #[test]
    fn nothing_to_impute_returns_empty() {
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let x = ones_design(&[0.0, 1.0, 2.0]);
        let x_mis = DMatrix::zeros(0, 2);
        let mut rng = RngStream::new(1).rng();
        let out = norm_draw(&y, &x, &x_mis, &mut rng).unwrap();
        assert_eq!(out.len(), 0);
    }

    #[test]
    fn noiseless_data_imputes_exact_fitted_values() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let y = DVector::from_iterator(5, xs.iter().map(|x| 3.0 + 2.0 * x));
        let x_obs = ones_design(&xs);
        let x_mis = ones_design(&[10.0, -1.0]);
        let mut rng = RngStream::new(2).rng();
        let out = norm_draw(&y, &x_obs, &x_mis, &mut rng).unwrap();
        assert_abs_diff_eq!(out[0], 23.0, epsilon = 1e-6);
        assert_abs_diff_eq!(out[1], 1.0, epsilon = 1e-6);
    }

    #[test]
    fn too_few_observed_rows_is_an_error() {
        let y = DVector::from_vec(vec![1.0, 2.0]);
        let x_obs = ones_design(&[0.0, 1.0]);
        let x_mis = ones_design(&[2.0]);
        let mut rng = RngStream::new(3).rng();
        assert!(matches!(
            norm_draw(&y, &x_obs, &x_mis, &mut rng),
            Err(Error::TooFewObservedRows { .. })
        ));
    }

    #[test]
    fn posterior_predictive_mean_tracks_the_fit() {
        // y = 1 + 0.1 x + e over 50 observed rows; the average imputation at
        // x = x_bar should sit within Monte Carlo error of the fitted value.
        let mut rng = RngStream::new(4).rng();
        let xs: Vec<f64> = (0..50).map(|i| i as f64 / 5.0).collect();
        let noise = [
            0.062, -0.134, 0.071, 0.052, -0.089, 0.125, -0.031, -0.077, 0.018, 0.099, -0.062,
            0.134, -0.071, -0.052, 0.089, -0.125, 0.031, 0.077, -0.018, -0.099, 0.045, -0.012,
            0.103, -0.056, 0.027, -0.083, 0.061, 0.009, -0.041, 0.072, -0.024, 0.058, -0.097,
            0.033, 0.015, -0.066, 0.088, -0.049, 0.021, 0.054, -0.036, 0.093, -0.008, -0.061,
            0.042, 0.017, -0.074, 0.065, -0.028, 0.039,
        ];
        let y = DVector::from_iterator(
            50,
            xs.iter().zip(noise.iter()).map(|(x, e)| 1.0 + 0.1 * x + e),
        );
        let x_obs = ones_design(&xs);
        let x_bar = xs.iter().sum::<f64>() / 50.0;
        let x_mis = ones_design(&[x_bar]);

        let fit = least_squares(&x_obs, &y).unwrap();
        let fitted_at_mean = fit.beta[0] + fit.beta[1] * x_bar;
        let sigma2 = fit.rss / 48.0;

        let reps = 10_000;
        let draws: Vec<f64> = (0..reps)
            .map(|_| norm_draw(&y, &x_obs, &x_mis, &mut rng).unwrap()[0])
            .collect();
        let mc_mean = draws.iter().sum::<f64>() / reps as f64;
        let sd = (draws.iter().map(|d| (d - mc_mean).powi(2)).sum::<f64>()
            / (reps - 1) as f64)
            .sqrt();
        let se = sd / (reps as f64).sqrt();
        assert!(sd * sd > sigma2 * 0.8, "draws must carry residual noise");
        assert_abs_diff_eq!(mc_mean, fitted_at_mean, epsilon = 3.0 * se);
    }

    fn toy_dataset(mask_y: &[bool]) -> IncompleteDataset {
        let n = mask_y.len();
        let x: Vec<f64> = (0..n).map(|i| (i as f64) * 0.37 - 2.0).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.5 + 0.8 * v + 0.1 * (v * 3.0).sin()).collect();
        let mut values = DMatrix::zeros(n, 2);
        let mut mask = DMatrix::from_element(n, 2, true);
        for i in 0..n {
            values[(i, 0)] = x[i];
            values[(i, 1)] = y[i];
            mask[(i, 1)] = mask_y[i];
        }
        IncompleteDataset::new(values, mask, vec!["X".into(), "Y".into()]).unwrap()
    }

    #[test]
    fn complete_data_yields_identical_copies_and_zero_b() {
        let ds = toy_dataset(&[true; 12]);
        let cfg = ImputerConfig::new(3, 4, RngStream::new(5)).unwrap();
        let stack = mice(&ds, &cfg).unwrap();
        assert_eq!(stack.m(), 3);
        for c in stack.completions() {
            assert_eq!(c, ds.values());
        }
        let est = stack_estimates(&stack, column_mean_analyzer(1)).unwrap();
        let pooled = pool_simplified(&est, 0.95).unwrap();
        assert_eq!(pooled.b, 0.0);
        assert!(pooled.degenerate);
    }

    #[test]
    fn observed_cells_are_preserved_bitwise() {
        let mut mask = [true; 20];
        for i in [2usize, 5, 9, 13, 17] {
            mask[i] = false;
        }
        let ds = toy_dataset(&mask);
        let cfg = ImputerConfig::new(4, 3, RngStream::new(6)).unwrap();
        let stack = mice(&ds, &cfg).unwrap();
        for c in stack.completions() {
            for r in 0..ds.nrows() {
                for col in 0..ds.ncols() {
                    if ds.is_observed(r, col) {
                        assert_eq!(c[(r, col)].to_bits(), ds.values()[(r, col)].to_bits());
                    }
                }
            }
        }
    }

    #[test]
    fn identical_config_reproduces_identical_stacks() {
        let mut mask = [true; 16];
        for i in [1usize, 4, 8, 11] {
            mask[i] = false;
        }
        let ds = toy_dataset(&mask);
        let cfg = ImputerConfig::new(3, 5, RngStream::new(7)).unwrap();
        let a = mice(&ds, &cfg).unwrap();
        let b = mice(&ds, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn imputed_cells_vary_between_chains() {
        let mut mask = [true; 16];
        for i in [1usize, 4, 8, 11] {
            mask[i] = false;
        }
        let ds = toy_dataset(&mask);
        let cfg = ImputerConfig::new(3, 5, RngStream::new(8)).unwrap();
        let stack = mice(&ds, &cfg).unwrap();
        let a = &stack.completions()[0];
        let b = &stack.completions()[1];
        assert!((0..16).any(|r| a[(r, 1)] != b[(r, 1)]));
    }

    #[test]
    fn single_incomplete_column_is_a_single_block_draw() {
        // With one incomplete column the chained pass is a single regression
        // draw per iteration; extra iterations change which draw is taken but
        // not its distribution. Here we just confirm both iteration counts
        // produce valid stacks from the same stream.
        let mut mask = [true; 14];
        for i in [3usize, 7] {
            mask[i] = false;
        }
        let ds = toy_dataset(&mask);
        let one = mice(&ds, &ImputerConfig::new(2, 1, RngStream::new(9)).unwrap()).unwrap();
        let ten = mice(&ds, &ImputerConfig::new(2, 10, RngStream::new(9)).unwrap()).unwrap();
        assert_eq!(one.m(), 2);
        assert_eq!(ten.m(), 2);
        // Observed cells agree across both runs; imputed cells need not.
        for (ca, cb) in one.completions().iter().zip(ten.completions()) {
            for r in 0..14 {
                if ds.is_observed(r, 1) {
                    assert_eq!(ca[(r, 1)], cb[(r, 1)]);
                }
            }
        }
    }

    #[test]
    fn column_with_no_observed_values_errors() {
        let values = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 2.0, 0.0, 3.0, 0.0, 4.0, 0.0]);
        let mut mask = DMatrix::from_element(4, 2, true);
        for r in 0..4 {
            mask[(r, 1)] = false;
        }
        let ds = IncompleteDataset::new(values, mask, vec!["X".into(), "Y".into()]).unwrap();
        let cfg = ImputerConfig::new(2, 1, RngStream::new(10)).unwrap();
        assert!(matches!(
            mice(&ds, &cfg),
            Err(Error::NoObservedValues { .. })
        ));
    }

    #[test]
    fn too_few_observed_rows_for_the_regression_errors() {
        // With 2 columns the design is intercept + 1 predictor (q = 2), so
        // 3 observed rows are required; provide only 2.
        let values = DMatrix::from_row_slice(5, 2, &[1.0, 1.0, 2.0, 2.0, 3.0, 0.0, 4.0, 0.0, 5.0, 0.0]);
        let mut mask = DMatrix::from_element(5, 2, true);
        for r in 2..5 {
            mask[(r, 1)] = false;
        }
        let ds = IncompleteDataset::new(values, mask, vec!["X".into(), "Y".into()]).unwrap();
        let cfg = ImputerConfig::new(2, 1, RngStream::new(11)).unwrap();
        assert!(matches!(
            mice(&ds, &cfg),
            Err(Error::TooFewObservedRows { .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(ImputerConfig::new(1, 10, RngStream::new(0)).is_err());
        assert!(ImputerConfig::new(2, 0, RngStream::new(0)).is_err());
        assert!(ImputerConfig::new(2, 1, RngStream::new(0)).is_ok());
    }
}
