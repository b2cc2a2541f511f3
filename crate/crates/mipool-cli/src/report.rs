//! CSV serialization of the study summary.

use std::io::Write;
use std::path::Path;

use anyhow::{ensure, Context, Result};
use mipool::simulation::ConditionSummary;

pub const HEADER: &str = "variable,pct_missing,rule,r,nu,fmi,ciw,cov,bias,reps";

/// Format a value to four significant decimals; infinities become `Inf`.
pub fn sig4(v: f64) -> String {
    if v.is_nan() {
        return "NaN".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "Inf" } else { "-Inf" }.to_string();
    }
    if v == 0.0 {
        return "0.0000".to_string();
    }
    let exponent = v.abs().log10().floor() as i32;
    let decimals = (3 - exponent).max(0) as usize;
    format!("{v:.decimals$}")
}

fn format_row(row: &ConditionSummary) -> String {
    format!(
        "{},{},{},{},{},{},{},{:.3},{},{}",
        row.variable,
        sig4(row.pct_missing),
        row.rule,
        sig4(row.avg_r),
        sig4(row.avg_nu),
        sig4(row.avg_fmi),
        sig4(row.avg_ciw),
        row.coverage,
        sig4(row.bias),
        row.reps
    )
}

/// Render the whole report; one line per condition and rule, byte-stable for
/// equal inputs.
pub fn format_report(rows: &[ConditionSummary]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format_row(row));
        out.push('\n');
    }
    out
}

pub fn write_report(rows: &[ConditionSummary], path: &Path) -> Result<()> {
    ensure!(!rows.is_empty(), "report has no rows");
    let mut file = std::fs::File::create(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    file.write_all(format_report(rows).as_bytes())
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}
