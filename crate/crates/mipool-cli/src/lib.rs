//! Library backing the `mipool` binary; split out so the pieces are
//! individually testable.

pub mod args;
pub mod plot;
pub mod report;

use anyhow::{bail, Context, Result};
use mipool::pooling::Rule;
use mipool::simulation::{run_study_with_progress, ConditionSummary, StudyReport};

use args::{Cli, RuleChoice};

fn keep(rule: Rule, choice: RuleChoice) -> bool {
    match choice {
        RuleChoice::Both => true,
        RuleChoice::Conventional => rule == Rule::Conventional,
        RuleChoice::Simplified => rule == Rule::Simplified,
    }
}

/// Run the study described by the flags and write all requested outputs.
pub fn run(cli: &Cli) -> Result<()> {
    if cli.plot.is_some() && cli.rules != RuleChoice::Both {
        bail!("--plot compares the two rule sets and requires --rules both");
    }
    let cfg = cli.to_config();

    let execute = || -> mipool::Result<StudyReport> {
        run_study_with_progress(&cfg, |done, total| {
            if done % 100 == 0 || done == total {
                eprintln!("replications: {done}/{total}");
            }
        })
    };
    let study = if cli.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build()
            .context("cannot build the worker pool")?;
        pool.install(execute)
    } else {
        execute()
    }
    .context("study failed")?;

    eprintln!(
        "study complete: {} replications, {} retried",
        study.rows.first().map_or(0, |r| r.reps) * study.retries_by_rate.len(),
        study.total_retries()
    );

    let rows: Vec<ConditionSummary> = study
        .rows
        .iter()
        .filter(|r| keep(r.rule, cli.rules))
        .cloned()
        .collect();

    match &cli.out {
        Some(path) => report::write_report(&rows, path)?,
        None => print!("{}", report::format_report(&rows)),
    }
    if let Some(path) = &cli.plot {
        plot::write_coverage_plot(&rows, cfg.level, path)?;
    }
    Ok(())
}
