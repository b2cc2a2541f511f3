//! Monte Carlo harness for the coverage study.
//!
//! Each replication draws a fresh finite population from a multivariate
//! normal, records the pre-deletion column means as the true values, deletes
//! cells of the Y columns completely at random, imputes with chained
//! equations, and pools the per-imputation column means under both rule sets
//! (a paired design: both rules see the same imputations). Replications run
//! over disjoint RNG substreams keyed by `(seed, rate, replication, attempt)`,
//! so results are independent of scheduling and thread count.

use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

use crate::data::{column_mean_analyzer, stack_estimates, IncompleteDataset};
use crate::error::{Error, Result};
use crate::imputer::{mice, ImputerConfig};
use crate::mathkit::{cholesky, mvn_sample, RngStream};
use crate::pooling::{pool_conventional, pool_simplified, PooledResult, Rule};

/// Replications that fail in the imputer are retried on a fresh substream at
/// most this many times.
pub const MAX_RETRIES: u32 = 10;

/// Full description of a coverage study.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    /// Population size per replication.
    pub n_pop: usize,
    /// Mean vector; the first component is the always-observed X column.
    pub mu: DVector<f64>,
    /// Covariance matrix (symmetric positive definite).
    pub sigma: DMatrix<f64>,
    /// Missingness rates, each strictly inside (0, 1).
    pub miss_rates: Vec<f64>,
    /// Imputations per replication.
    pub m: usize,
    /// Chained-equation iterations.
    pub iterations: usize,
    /// Replications per rate.
    pub reps: usize,
    /// Nominal confidence level.
    pub level: f64,
    /// Root seed for all substreams.
    pub seed: u64,
}

impl Default for SimulationConfig {
    /// Three variables with means (1, 2, 3), unit variances, 0.1
    /// cross-covariances; N = 1000; rates 0.1 through 0.9 plus 0.95;
    /// m = 5 imputations, 10 iterations, 10 000 replications at the 95%
    /// level.
    fn default() -> Self {
        Self {
            n_pop: 1000,
            mu: DVector::from_vec(vec![1.0, 2.0, 3.0]),
            sigma: DMatrix::from_fn(3, 3, |i, j| if i == j { 1.0 } else { 0.1 }),
            miss_rates: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95],
            m: 5,
            iterations: 10,
            reps: 10_000,
            level: 0.95,
            seed: 0,
        }
    }
}

impl SimulationConfig {
    /// Column names: X for the always-observed covariate, then Y1, Y2, ...
    pub fn column_names(&self) -> Vec<String> {
        (0..self.mu.len())
            .map(|i| if i == 0 { "X".to_string() } else { format!("Y{i}") })
            .collect()
    }

    /// Indices of the columns that get amputed (all but X).
    pub fn amputed_columns(&self) -> Vec<usize> {
        (1..self.mu.len()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_pop == 0 {
            return Err(Error::InvalidConfig("n_pop must be at least 1".into()));
        }
        let k = self.mu.len();
        if k < 2 {
            return Err(Error::InvalidConfig(
                "need at least two variables (X plus one Y)".into(),
            ));
        }
        if self.sigma.shape() != (k, k) {
            return Err(Error::InvalidConfig(format!(
                "sigma is {}x{} but mu has length {k}",
                self.sigma.nrows(),
                self.sigma.ncols()
            )));
        }
        for &rate in &self.miss_rates {
            if !(rate > 0.0 && rate < 1.0) {
                return Err(Error::InvalidMissingRate { rate });
            }
        }
        if self.miss_rates.is_empty() {
            return Err(Error::InvalidConfig("no missingness rates given".into()));
        }
        if self.m < 2 {
            return Err(Error::TooFewImputations { m: self.m });
        }
        if self.iterations < 1 {
            return Err(Error::InvalidConfig("iterations must be at least 1".into()));
        }
        if self.reps < 1 {
            return Err(Error::InvalidConfig("reps must be at least 1".into()));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::InvalidProbability { p: self.level });
        }
        // Fails with the offending pivot if sigma is not positive definite.
        cholesky(&self.sigma)?;
        Ok(())
    }
}

/// One row of the study summary: one (variable, rate, rule) condition.
#[derive(Debug, Clone)]
pub struct ConditionSummary {
    pub variable: String,
    pub pct_missing: f64,
    pub rule: Rule,
    /// Average relative increase in variance; `+inf` under simplified rules.
    pub avg_r: f64,
    pub avg_nu: f64,
    pub avg_fmi: f64,
    /// Average confidence-interval width.
    pub avg_ciw: f64,
    /// Share of replications whose interval covered the true value.
    pub coverage: f64,
    /// Mean of (pooled estimate - truth).
    pub bias: f64,
    pub reps: usize,
}

/// Monte Carlo uncertainty attached to a summary row.
#[derive(Debug, Clone)]
pub struct ConditionDiagnostics {
    pub variable: String,
    pub pct_missing: f64,
    pub rule: Rule,
    /// Standard error of the bias column.
    pub bias_se: f64,
}

/// Everything produced by [`run_study`].
#[derive(Debug, Clone)]
pub struct StudyReport {
    /// Summary rows, variable-major then rate-ascending, conventional before
    /// simplified.
    pub rows: Vec<ConditionSummary>,
    /// One entry per summary row, in the same order.
    pub diagnostics: Vec<ConditionDiagnostics>,
    /// Retried replications per rate.
    pub retries_by_rate: Vec<(f64, u64)>,
}

impl StudyReport {
    pub fn total_retries(&self) -> u64 {
        self.retries_by_rate.iter().map(|&(_, n)| n).sum()
    }
}

/// Pooled results for one variable of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableOutcome {
    pub variable: String,
    /// Pre-deletion column mean: the finite-population truth.
    pub truth: f64,
    pub conventional: PooledResult,
    pub simplified: PooledResult,
    pub covered_conventional: bool,
    pub covered_simplified: bool,
}

/// One replication: per-variable outcomes plus how often it was retried.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationOutcome {
    pub variables: Vec<VariableOutcome>,
    pub retries: u32,
}

fn column_mean(values: &DMatrix<f64>, col: usize) -> f64 {
    values.column(col).sum() / values.nrows() as f64
}

/// Draw a fully observed population of `cfg.n_pop` rows from the configured
/// multivariate normal.
pub fn generate_population<R: Rng + ?Sized>(
    cfg: &SimulationConfig,
    rng: &mut R,
) -> Result<IncompleteDataset> {
    let chol = cholesky(&cfg.sigma)?;
    generate_population_with_chol(cfg, &chol, rng)
}

fn generate_population_with_chol<R: Rng + ?Sized>(
    cfg: &SimulationConfig,
    chol: &DMatrix<f64>,
    rng: &mut R,
) -> Result<IncompleteDataset> {
    let k = cfg.mu.len();
    let mut values = DMatrix::zeros(cfg.n_pop, k);
    for row in 0..cfg.n_pop {
        let draw = mvn_sample(&cfg.mu, chol, rng)?;
        for col in 0..k {
            values[(row, col)] = draw[col];
        }
    }
    IncompleteDataset::complete(values, cfg.column_names())
}

/// Delete cells of the listed columns independently with probability `rate`.
///
/// Columns are deduplicated first, so listing a column twice is the same as
/// listing it once; unlisted columns keep their mask untouched.
pub fn ampute_mcar<R: Rng + ?Sized>(
    ds: &IncompleteDataset,
    cols: &[usize],
    rate: f64,
    rng: &mut R,
) -> Result<IncompleteDataset> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::InvalidMissingRate { rate });
    }
    let mut targets: Vec<usize> = cols.to_vec();
    targets.sort_unstable();
    targets.dedup();
    if let Some(&bad) = targets.iter().find(|&&c| c >= ds.ncols()) {
        return Err(Error::ColumnOutOfRange {
            index: bad,
            ncols: ds.ncols(),
        });
    }
    let mut mask = ds.mask().clone();
    for &col in &targets {
        for row in 0..ds.nrows() {
            if rng.random::<f64>() < rate {
                mask[(row, col)] = false;
            }
        }
    }
    IncompleteDataset::new(ds.values().clone(), mask, ds.column_names().to_vec())
}

fn is_retryable(e: &Error) -> bool {
    matches!(
        e,
        Error::TooFewObservedRows { .. }
            | Error::NoObservedValues { .. }
            | Error::RankDeficient { .. }
            | Error::NotPositiveDefinite { .. }
    )
}

/// Run one replication at one missingness rate.
///
/// The substream is derived from `(seed, rate, rep_index, attempt)`; a
/// replication whose imputation fails (possible at extreme rates) is retried
/// on the next attempt substream, up to [`MAX_RETRIES`] times, and the number
/// of retries is part of the outcome.
pub fn run_replication(
    cfg: &SimulationConfig,
    rate: f64,
    rep_index: usize,
) -> Result<ReplicationOutcome> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::InvalidMissingRate { rate });
    }
    if cfg.n_pop < 2 {
        return Err(Error::InvalidConfig(
            "pooling needs n_pop >= 2 (complete-data degrees of freedom n_pop - 1)".into(),
        ));
    }
    let chol = cholesky(&cfg.sigma)?;
    let base = RngStream::new(cfg.seed)
        .child(rate.to_bits())
        .child(rep_index as u64);
    let mut last = None;
    for attempt in 0..=MAX_RETRIES {
        match attempt_replication(cfg, rate, &chol, base.child(attempt as u64)) {
            Ok(mut outcome) => {
                outcome.retries = attempt;
                return Ok(outcome);
            }
            Err(e) if is_retryable(&e) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(Error::RetriesExhausted {
        rate,
        rep: rep_index,
        retries: MAX_RETRIES,
        source: Box::new(last.expect("at least one attempt ran")),
    })
}

fn attempt_replication(
    cfg: &SimulationConfig,
    rate: f64,
    chol: &DMatrix<f64>,
    stream: RngStream,
) -> Result<ReplicationOutcome> {
    let mut pop_rng = stream.child(0).rng();
    let population = generate_population_with_chol(cfg, chol, &mut pop_rng)?;
    let y_cols = cfg.amputed_columns();
    let truths: Vec<f64> = y_cols
        .iter()
        .map(|&c| column_mean(population.values(), c))
        .collect();

    let mut amp_rng = stream.child(1).rng();
    let amputed = ampute_mcar(&population, &y_cols, rate, &mut amp_rng)?;

    let imputer_cfg = ImputerConfig::new(cfg.m, cfg.iterations, stream.child(2))?;
    let stack = mice(&amputed, &imputer_cfg)?;

    let nu_com = (cfg.n_pop - 1) as f64;
    let names = cfg.column_names();
    let variables = y_cols
        .iter()
        .zip(truths)
        .map(|(&col, truth)| {
            let est = stack_estimates(&stack, column_mean_analyzer(col))?;
            let conventional = pool_conventional(&est, nu_com, cfg.level)?;
            let simplified = pool_simplified(&est, cfg.level)?;
            Ok(VariableOutcome {
                variable: names[col].clone(),
                truth,
                covered_conventional: conventional.covers(truth),
                covered_simplified: simplified.covers(truth),
                conventional,
                simplified,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ReplicationOutcome {
        variables,
        retries: 0,
    })
}

/// Run the whole study: every rate times `cfg.reps` replications, aggregated
/// into one summary row per (variable, rate, rule).
pub fn run_study(cfg: &SimulationConfig) -> Result<StudyReport> {
    run_study_with_progress(cfg, |_, _| {})
}

/// [`run_study`] with a callback invoked as `(completed, total)` after each
/// replication finishes (in completion order, which is scheduling-dependent;
/// the study result is not).
pub fn run_study_with_progress<F>(cfg: &SimulationConfig, progress: F) -> Result<StudyReport>
where
    F: Fn(usize, usize) + Sync,
{
    cfg.validate()?;
    if cfg.n_pop < 2 {
        return Err(Error::InvalidConfig(
            "pooling needs n_pop >= 2 (complete-data degrees of freedom n_pop - 1)".into(),
        ));
    }
    let mut rates = cfg.miss_rates.clone();
    rates.sort_by(f64::total_cmp);
    rates.dedup();

    let total = rates.len() * cfg.reps;
    let done = AtomicUsize::new(0);
    let jobs: Vec<(usize, usize)> = rates
        .iter()
        .enumerate()
        .flat_map(|(ri, _)| (0..cfg.reps).map(move |rep| (ri, rep)))
        .collect();
    let outcomes: Vec<ReplicationOutcome> = jobs
        .par_iter()
        .map(|&(ri, rep)| {
            let outcome = run_replication(cfg, rates[ri], rep);
            progress(done.fetch_add(1, Ordering::Relaxed) + 1, total);
            outcome
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(aggregate(cfg, &rates, &outcomes))
}

fn pick_rule(o: &ReplicationOutcome, v_idx: usize, rule: Rule) -> &PooledResult {
    match rule {
        Rule::Conventional => &o.variables[v_idx].conventional,
        Rule::Simplified => &o.variables[v_idx].simplified,
    }
}

fn aggregate(
    cfg: &SimulationConfig,
    rates: &[f64],
    outcomes: &[ReplicationOutcome],
) -> StudyReport {
    let names = cfg.column_names();
    let y_names = &names[1..];
    let reps = cfg.reps;

    let mut rows = Vec::new();
    let mut diagnostics = Vec::new();
    for (v_idx, variable) in y_names.iter().enumerate() {
        for (r_idx, &rate) in rates.iter().enumerate() {
            let chunk = &outcomes[r_idx * reps..(r_idx + 1) * reps];
            for rule in [Rule::Conventional, Rule::Simplified] {
                let pick = |o| pick_rule(o, v_idx, rule);
                let nf = reps as f64;
                let avg_r = chunk.iter().map(|o| pick(o).r).sum::<f64>() / nf;
                let avg_nu = chunk.iter().map(|o| pick(o).nu).sum::<f64>() / nf;
                let avg_fmi = chunk.iter().map(|o| pick(o).fmi).sum::<f64>() / nf;
                let avg_ciw = chunk.iter().map(|o| pick(o).ci_width()).sum::<f64>() / nf;
                let covered = chunk
                    .iter()
                    .filter(|o| match rule {
                        Rule::Conventional => o.variables[v_idx].covered_conventional,
                        Rule::Simplified => o.variables[v_idx].covered_simplified,
                    })
                    .count();
                let biases: Vec<f64> = chunk
                    .iter()
                    .map(|o| pick(o).q_bar - o.variables[v_idx].truth)
                    .collect();
                let bias = biases.iter().sum::<f64>() / nf;
                let bias_se = if reps > 1 {
                    let var = biases.iter().map(|b| (b - bias) * (b - bias)).sum::<f64>()
                        / (nf - 1.0);
                    (var / nf).sqrt()
                } else {
                    0.0
                };
                rows.push(ConditionSummary {
                    variable: variable.clone(),
                    pct_missing: rate,
                    rule,
                    avg_r,
                    avg_nu,
                    avg_fmi,
                    avg_ciw,
                    coverage: covered as f64 / nf,
                    bias,
                    reps,
                });
                diagnostics.push(ConditionDiagnostics {
                    variable: variable.clone(),
                    pct_missing: rate,
                    rule,
                    bias_se,
                });
            }
        }
    }
    let retries_by_rate = rates
        .iter()
        .enumerate()
        .map(|(r_idx, &rate)| {
            let total: u64 = outcomes[r_idx * reps..(r_idx + 1) * reps]
                .iter()
                .map(|o| o.retries as u64)
                .sum();
            (rate, total)
        })
        .collect();
    StudyReport {
        rows,
        diagnostics,
        retries_by_rate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn small_cfg() -> SimulationConfig {
        SimulationConfig {
            n_pop: 120,
            reps: 3,
            miss_rates: vec![0.3],
            seed: 99,
            ..SimulationConfig::default()
        }
    }

    #[test]
    fn single_row_population() {
        let cfg = SimulationConfig {
            n_pop: 1,
            ..SimulationConfig::default()
        };
        let mut rng = RngStream::new(1).rng();
        let pop = generate_population(&cfg, &mut rng).unwrap();
        assert_eq!(pop.nrows(), 1);
        assert!(pop.mask().iter().all(|&o| o));
    }

    #[test]
    fn population_grand_means_match_mu() {
        let cfg = SimulationConfig::default();
        let mut rng = RngStream::new(2).rng();
        let mut sums = [0.0_f64; 3];
        let pops = 200;
        for _ in 0..pops {
            let pop = generate_population(&cfg, &mut rng).unwrap();
            for c in 0..3 {
                sums[c] += column_mean(pop.values(), c);
            }
        }
        // Monte Carlo standard error of the grand mean of 200 * 1000 draws.
        let se = 1.0 / ((pops * cfg.n_pop) as f64).sqrt();
        for c in 0..3 {
            assert_abs_diff_eq!(sums[c] / pops as f64, cfg.mu[c], epsilon = 3.0 * se);
        }
    }

    #[test]
    fn diagonal_sigma_gives_uncorrelated_columns() {
        let cfg = SimulationConfig {
            n_pop: 100_000,
            sigma: DMatrix::identity(3, 3),
            ..SimulationConfig::default()
        };
        let mut rng = RngStream::new(3).rng();
        let pop = generate_population(&cfg, &mut rng).unwrap();
        let v = pop.values();
        let n = v.nrows() as f64;
        for a in 0..3 {
            for b in (a + 1)..3 {
                let ma = column_mean(v, a);
                let mb = column_mean(v, b);
                let cov: f64 = (0..v.nrows())
                    .map(|r| (v[(r, a)] - ma) * (v[(r, b)] - mb))
                    .sum::<f64>()
                    / n;
                assert!(cov.abs() < 0.01, "cov({a},{b}) = {cov}");
            }
        }
    }

    #[test]
    fn amputation_hits_the_requested_rate() {
        let cfg = SimulationConfig {
            n_pop: 500_000,
            ..SimulationConfig::default()
        };
        let mut rng = RngStream::new(4).rng();
        let pop = generate_population(&cfg, &mut rng).unwrap();
        let rate = 0.37;
        let amputed = ampute_mcar(&pop, &[1, 2], rate, &mut rng).unwrap();
        let missing = amputed.mask().iter().filter(|&&o| !o).count();
        let realized = missing as f64 / (2.0 * cfg.n_pop as f64);
        assert_abs_diff_eq!(realized, rate, epsilon = 0.002);
    }

    #[test]
    fn listing_a_column_twice_equals_listing_it_once() {
        let cfg = small_cfg();
        let mut rng = RngStream::new(5).rng();
        let pop = generate_population(&cfg, &mut rng).unwrap();
        let a = ampute_mcar(&pop, &[1, 2, 1], 0.4, &mut RngStream::new(6).rng()).unwrap();
        let b = ampute_mcar(&pop, &[1, 2], 0.4, &mut RngStream::new(6).rng()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn x_column_is_never_amputed() {
        let cfg = small_cfg();
        let mut rng = RngStream::new(7).rng();
        let pop = generate_population(&cfg, &mut rng).unwrap();
        let amputed = ampute_mcar(&pop, &[1, 2], 0.9, &mut rng).unwrap();
        assert!((0..amputed.nrows()).all(|r| amputed.is_observed(r, 0)));
    }

    #[test]
    fn out_of_range_rates_error() {
        let cfg = small_cfg();
        let mut rng = RngStream::new(8).rng();
        let pop = generate_population(&cfg, &mut rng).unwrap();
        for rate in [0.0, 1.0, -0.2, 1.4] {
            assert!(matches!(
                ampute_mcar(&pop, &[1], rate, &mut rng),
                Err(Error::InvalidMissingRate { .. })
            ));
        }
    }

    #[test]
    fn no_deletion_edge_gives_degenerate_interval_at_truth() {
        // A rate this small deletes nothing in 240 cells, so the stack holds
        // identical completions and the simplified interval collapses onto
        // the truth.
        let cfg = small_cfg();
        let outcome = run_replication(&cfg, 1e-12, 0).unwrap();
        for v in &outcome.variables {
            assert!(v.simplified.degenerate);
            assert_eq!(v.simplified.ci_low, v.simplified.ci_high);
            assert_eq!(v.simplified.q_bar.to_bits(), v.truth.to_bits());
            assert!(v.covered_simplified);
        }
    }

    #[test]
    fn replications_are_bitwise_reproducible() {
        let cfg = small_cfg();
        let a = run_replication(&cfg, 0.5, 1).unwrap();
        let b = run_replication(&cfg, 0.5, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_rep_study_equals_the_replication() {
        let cfg = SimulationConfig {
            reps: 1,
            miss_rates: vec![0.25],
            ..small_cfg()
        };
        let report = run_study(&cfg).unwrap();
        let single = run_replication(&cfg, 0.25, 0).unwrap();
        assert_eq!(report.rows.len(), 4); // 2 variables x 2 rules
        let row = &report.rows[0]; // Y1, conventional
        assert_eq!(row.variable, "Y1");
        assert_eq!(row.rule, Rule::Conventional);
        assert_eq!(row.avg_nu, single.variables[0].conventional.nu);
        assert_eq!(row.avg_ciw, single.variables[0].conventional.ci_width());
        assert_eq!(row.bias, single.variables[0].conventional.q_bar - single.variables[0].truth);
        let simp_row = &report.rows[1];
        assert_eq!(simp_row.rule, Rule::Simplified);
        assert!(simp_row.avg_r.is_infinite());
        assert_eq!(simp_row.avg_nu, (cfg.m - 1) as f64);
    }

    #[test]
    fn rows_are_variable_major_then_rate_ascending() {
        let cfg = SimulationConfig {
            reps: 1,
            miss_rates: vec![0.6, 0.2],
            ..small_cfg()
        };
        let report = run_study(&cfg).unwrap();
        let labels: Vec<(String, f64, Rule)> = report
            .rows
            .iter()
            .map(|r| (r.variable.clone(), r.pct_missing, r.rule))
            .collect();
        assert_eq!(
            labels,
            vec![
                ("Y1".into(), 0.2, Rule::Conventional),
                ("Y1".into(), 0.2, Rule::Simplified),
                ("Y1".into(), 0.6, Rule::Conventional),
                ("Y1".into(), 0.6, Rule::Simplified),
                ("Y2".into(), 0.2, Rule::Conventional),
                ("Y2".into(), 0.2, Rule::Simplified),
                ("Y2".into(), 0.6, Rule::Conventional),
                ("Y2".into(), 0.6, Rule::Simplified),
            ]
        );
    }

    #[test]
    fn impossible_replication_exhausts_retries() {
        // Four rows but the regressions need at least four observed rows per
        // Y column; at 90% missingness an attempt essentially never succeeds.
        let cfg = SimulationConfig {
            n_pop: 4,
            ..SimulationConfig::default()
        };
        match run_replication(&cfg, 0.9, 0) {
            Err(Error::RetriesExhausted { retries, .. }) => assert_eq!(retries, MAX_RETRIES),
            other => panic!("expected retries to run out, got {other:?}"),
        }
    }

    #[test]
    fn smoke_coverage_is_near_nominal() {
        // Tiny-scale sanity check; the acceptance suite runs the real one.
        let cfg = SimulationConfig {
            n_pop: 300,
            reps: 150,
            miss_rates: vec![0.3],
            seed: 1234,
            ..SimulationConfig::default()
        };
        let report = run_study(&cfg).unwrap();
        for row in report.rows.iter().filter(|r| r.rule == Rule::Simplified) {
            assert!(
                (0.88..=1.0).contains(&row.coverage),
                "simplified coverage {} for {}",
                row.coverage,
                row.variable
            );
        }
        for row in report.rows.iter().filter(|r| r.rule == Rule::Conventional) {
            assert!(
                row.coverage >= 0.95,
                "conventional coverage {} for {}",
                row.coverage,
                row.variable
            );
        }
        assert_eq!(report.total_retries(), 0);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = SimulationConfig::default();
        cfg.miss_rates = vec![0.5, 1.2];
        assert!(cfg.validate().is_err());

        let mut cfg = SimulationConfig::default();
        cfg.sigma[(0, 0)] = -1.0;
        assert!(matches!(
            cfg.validate(),
            Err(Error::NotPositiveDefinite { pivot: 0 })
        ));

        let mut cfg = SimulationConfig::default();
        cfg.m = 1;
        assert!(cfg.validate().is_err());
    }
}
