//! Multiple imputation with pooling rules for finite and infinite
//! populations.
//!
//! When data are sampled from a large population, the pooled variance of a
//! multiply imputed estimate combines sampling variance with
//! between-imputation variance. When the observed units *are* the population,
//! there is no sampling variance: only the missing cells make the estimate
//! uncertain. This crate implements both readings side by side:
//!
//! * [`pooling`] — the conventional combining rules and the simplified
//!   finite-population rules, the Barnard-Rubin degrees of freedom, and
//!   confidence intervals;
//! * [`imputer`] — chained-equations multiple imputation with Bayesian
//!   linear-regression draws;
//! * [`simulation`] — a Monte Carlo harness measuring the coverage of both
//!   rule sets on synthetic populations with cells deleted completely at
//!   random;
//! * [`data`] — datasets with missingness masks, imputation stacks, and the
//!   repeated-estimate containers the poolers consume;
//! * [`mathkit`] — deterministic RNG substreams and the small numeric kernel
//!   (Cholesky, least squares, chi-square draws, Student-t quantiles).
//!
//! ```
//! use mipool::data::RepeatedEstimates;
//! use mipool::pooling::{pool_conventional, pool_simplified};
//!
//! let est = RepeatedEstimates::new(vec![2.4, 2.6, 2.5, 2.7, 2.3], vec![0.1; 5])?;
//! let infinite = pool_conventional(&est, 999.0, 0.95)?;
//! let finite = pool_simplified(&est, 0.95)?;
//! assert!(finite.ci_width() < infinite.ci_width());
//! # Ok::<(), mipool::Error>(())
//! ```

pub mod data;
pub mod error;
pub mod imputer;
pub mod mathkit;
pub mod pooling;
pub mod simulation;

pub use error::{Error, Result};

// Compile the guide's code blocks as doctests so the book stays in sync with
// the library.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            #[allow(dead_code)]
            struct $name;
        };
    }

    chapter!(Introduction, "../../../book/src/introduction.md");
    chapter!(PoolingRules, "../../../book/src/pooling-rules.md");
    chapter!(Imputation, "../../../book/src/imputation.md");
    chapter!(CoverageStudy, "../../../book/src/coverage-study.md");
    chapter!(CommandLine, "../../../book/src/command-line.md");
}
