//! Datasets with missing cells and stacks of completed copies.
//!
//! An [`IncompleteDataset`] pairs a numeric matrix with a boolean mask
//! (`true` = observed). Cells behind a `false` mask hold an explicit sentinel
//! value; every consumer branches on the mask and never inspects the sentinel,
//! so a masked cell can never leak into an estimate. An [`ImputationStack`]
//! holds the `m` completed copies produced by an imputer, all of which agree
//! bit-for-bit on the observed cells.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Value stored behind `mask = false` cells.
pub const MISSING_SENTINEL: f64 = 0.0;

/// Token used for missing cells in CSV files.
pub const MISSING_TOKEN: &str = "NA";

/// A rectangular numeric dataset plus a missingness mask.
#[derive(Debug, Clone, PartialEq)]
pub struct IncompleteDataset {
    values: DMatrix<f64>,
    mask: DMatrix<bool>,
    column_names: Vec<String>,
}

impl IncompleteDataset {
    /// Build a dataset from values, mask, and column names.
    ///
    /// Masked-out cells are overwritten with [`MISSING_SENTINEL`] so the
    /// stored placeholder never depends on caller input.
    pub fn new(
        values: DMatrix<f64>,
        mask: DMatrix<bool>,
        column_names: Vec<String>,
    ) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::EmptyDataset);
        }
        if mask.shape() != values.shape() {
            return Err(Error::DimensionMismatch(format!(
                "mask is {}x{} but values are {}x{}",
                mask.nrows(),
                mask.ncols(),
                values.nrows(),
                values.ncols()
            )));
        }
        if column_names.len() != values.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "{} column names for {} columns",
                column_names.len(),
                values.ncols()
            )));
        }
        let mut values = values;
        for (v, &observed) in values.iter_mut().zip(mask.iter()) {
            if !observed {
                *v = MISSING_SENTINEL;
            }
        }
        Ok(Self {
            values,
            mask,
            column_names,
        })
    }

    /// A fully observed dataset.
    pub fn complete(values: DMatrix<f64>, column_names: Vec<String>) -> Result<Self> {
        let mask = DMatrix::from_element(values.nrows(), values.ncols(), true);
        Self::new(values, mask, column_names)
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn mask(&self) -> &DMatrix<bool> {
        &self.mask
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn is_observed(&self, row: usize, col: usize) -> bool {
        self.mask[(row, col)]
    }

    fn check_column(&self, col: usize) -> Result<()> {
        if col >= self.ncols() {
            return Err(Error::ColumnOutOfRange {
                index: col,
                ncols: self.ncols(),
            });
        }
        Ok(())
    }

    /// Observed values of one column, in row order.
    pub fn column_observed_values(&self, col: usize) -> Result<Vec<f64>> {
        self.check_column(col)?;
        Ok((0..self.nrows())
            .filter(|&r| self.mask[(r, col)])
            .map(|r| self.values[(r, col)])
            .collect())
    }

    /// Row indices where a column is missing, in row order.
    pub fn missing_rows(&self, col: usize) -> Result<Vec<usize>> {
        self.check_column(col)?;
        Ok((0..self.nrows())
            .filter(|&r| !self.mask[(r, col)])
            .collect())
    }

    /// Number of observed cells in a column.
    pub fn observed_count(&self, col: usize) -> Result<usize> {
        self.check_column(col)?;
        Ok((0..self.nrows()).filter(|&r| self.mask[(r, col)]).count())
    }

    /// Read a dataset from CSV with a header row; missing cells are the
    /// literal token `NA`.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_reader(BufReader::new(file))
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut lines = BufReader::new(reader).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::CsvParse {
                line: 1,
                reason: "missing header row".into(),
            })??;
        let column_names: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        let ncols = column_names.len();
        let mut cells: Vec<f64> = Vec::new();
        let mut observed: Vec<bool> = Vec::new();
        let mut nrows = 0usize;
        for (idx, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != ncols {
                return Err(Error::CsvParse {
                    line: idx + 2,
                    reason: format!("expected {ncols} fields, got {}", fields.len()),
                });
            }
            for field in fields {
                let field = field.trim();
                if field == MISSING_TOKEN {
                    cells.push(MISSING_SENTINEL);
                    observed.push(false);
                } else {
                    let v = field.parse::<f64>().map_err(|_| Error::CsvParse {
                        line: idx + 2,
                        reason: format!("cannot parse {field:?} as a number"),
                    })?;
                    cells.push(v);
                    observed.push(true);
                }
            }
            nrows += 1;
        }
        if nrows == 0 {
            return Err(Error::EmptyDataset);
        }
        let values = DMatrix::from_row_iterator(nrows, ncols, cells);
        let mask = DMatrix::from_row_iterator(nrows, ncols, observed);
        Self::new(values, mask, column_names)
    }

    /// Write the dataset as CSV with a header row and `NA` for missing cells.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        self.to_writer(&mut file)
    }

    pub fn to_writer<W: Write>(&self, writer: &mut W) -> Result<()> {
        writeln!(writer, "{}", self.column_names.join(","))?;
        for r in 0..self.nrows() {
            let row: Vec<String> = (0..self.ncols())
                .map(|c| {
                    if self.mask[(r, c)] {
                        format!("{}", self.values[(r, c)])
                    } else {
                        MISSING_TOKEN.to_string()
                    }
                })
                .collect();
            writeln!(writer, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// The `m` completed copies of one incomplete dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ImputationStack {
    completions: Vec<DMatrix<f64>>,
    source_mask: DMatrix<bool>,
    column_names: Vec<String>,
}

impl ImputationStack {
    /// Validates that there are at least two completions, that shapes agree,
    /// and that every completion is bit-identical on observed cells.
    pub fn new(
        completions: Vec<DMatrix<f64>>,
        source_mask: DMatrix<bool>,
        column_names: Vec<String>,
    ) -> Result<Self> {
        let m = completions.len();
        if m < 2 {
            return Err(Error::TooFewImputations { m });
        }
        let shape = source_mask.shape();
        for (idx, c) in completions.iter().enumerate() {
            if c.shape() != shape {
                return Err(Error::DimensionMismatch(format!(
                    "completion {idx} is {}x{} but the mask is {}x{}",
                    c.nrows(),
                    c.ncols(),
                    shape.0,
                    shape.1
                )));
            }
        }
        let first = &completions[0];
        for (idx, c) in completions.iter().enumerate().skip(1) {
            for col in 0..shape.1 {
                for row in 0..shape.0 {
                    if source_mask[(row, col)]
                        && c[(row, col)].to_bits() != first[(row, col)].to_bits()
                    {
                        return Err(Error::ObservedCellMismatch {
                            completion: idx,
                            row,
                            col,
                        });
                    }
                }
            }
        }
        Ok(Self {
            completions,
            source_mask,
            column_names,
        })
    }

    pub fn m(&self) -> usize {
        self.completions.len()
    }

    pub fn completions(&self) -> &[DMatrix<f64>] {
        &self.completions
    }

    pub fn source_mask(&self) -> &DMatrix<bool> {
        &self.source_mask
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }
}

/// Per-imputation estimates of a scalar quantity and their complete-data
/// variances.
#[derive(Debug, Clone, PartialEq)]
pub struct RepeatedEstimates {
    q_hats: Vec<f64>,
    u_bars: Vec<f64>,
}

impl RepeatedEstimates {
    pub fn new(q_hats: Vec<f64>, u_bars: Vec<f64>) -> Result<Self> {
        if q_hats.len() != u_bars.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} estimates but {} variances",
                q_hats.len(),
                u_bars.len()
            )));
        }
        for (index, &u) in u_bars.iter().enumerate() {
            if u < 0.0 {
                return Err(Error::NegativeWithinVariance { index, value: u });
            }
        }
        Ok(Self { q_hats, u_bars })
    }

    pub fn m(&self) -> usize {
        self.q_hats.len()
    }

    pub fn q_hats(&self) -> &[f64] {
        &self.q_hats
    }

    pub fn u_bars(&self) -> &[f64] {
        &self.u_bars
    }
}

/// Per-imputation estimates of a length-k quantity and their k-by-k
/// covariance matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorEstimates {
    q_hats: Vec<nalgebra::DVector<f64>>,
    u_bars: Vec<DMatrix<f64>>,
}

impl VectorEstimates {
    pub fn new(q_hats: Vec<nalgebra::DVector<f64>>, u_bars: Vec<DMatrix<f64>>) -> Result<Self> {
        if q_hats.len() != u_bars.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} estimates but {} covariance matrices",
                q_hats.len(),
                u_bars.len()
            )));
        }
        if q_hats.is_empty() {
            return Err(Error::TooFewImputations { m: 0 });
        }
        let k = q_hats[0].len();
        for q in &q_hats {
            if q.len() != k {
                return Err(Error::DimensionMismatch(
                    "estimate vectors have inconsistent lengths".into(),
                ));
            }
        }
        for u in &u_bars {
            if u.shape() != (k, k) {
                return Err(Error::DimensionMismatch(format!(
                    "covariance is {}x{} for length-{k} estimates",
                    u.nrows(),
                    u.ncols()
                )));
            }
        }
        Ok(Self { q_hats, u_bars })
    }

    pub fn m(&self) -> usize {
        self.q_hats.len()
    }

    pub fn dim(&self) -> usize {
        self.q_hats[0].len()
    }

    pub fn q_hats(&self) -> &[nalgebra::DVector<f64>] {
        &self.q_hats
    }

    pub fn u_bars(&self) -> &[DMatrix<f64>] {
        &self.u_bars
    }

    /// The scalar estimates of one component.
    pub fn component(&self, i: usize) -> Result<RepeatedEstimates> {
        if i >= self.dim() {
            return Err(Error::ColumnOutOfRange {
                index: i,
                ncols: self.dim(),
            });
        }
        RepeatedEstimates::new(
            self.q_hats.iter().map(|q| q[i]).collect(),
            self.u_bars.iter().map(|u| u[(i, i)]).collect(),
        )
    }
}

/// Apply a per-dataset analyzer to every completion in order.
///
/// The analyzer returns the complete-data estimate and its variance; a
/// failure is reported with the index of the completion that caused it.
pub fn stack_estimates<F>(stack: &ImputationStack, mut analyzer: F) -> Result<RepeatedEstimates>
where
    F: FnMut(&DMatrix<f64>) -> Result<(f64, f64)>,
{
    let mut q_hats = Vec::with_capacity(stack.m());
    let mut u_bars = Vec::with_capacity(stack.m());
    for (index, completion) in stack.completions().iter().enumerate() {
        let (q, u) = analyzer(completion).map_err(|e| Error::Analyzer {
            completion: index,
            source: Box::new(e),
        })?;
        q_hats.push(q);
        u_bars.push(u);
    }
    RepeatedEstimates::new(q_hats, u_bars)
}

/// Vector-valued counterpart of [`stack_estimates`].
pub fn stack_estimates_vector<F>(stack: &ImputationStack, mut analyzer: F) -> Result<VectorEstimates>
where
    F: FnMut(&DMatrix<f64>) -> Result<(nalgebra::DVector<f64>, DMatrix<f64>)>,
{
    let mut q_hats = Vec::with_capacity(stack.m());
    let mut u_bars = Vec::with_capacity(stack.m());
    for (index, completion) in stack.completions().iter().enumerate() {
        let (q, u) = analyzer(completion).map_err(|e| Error::Analyzer {
            completion: index,
            source: Box::new(e),
        })?;
        q_hats.push(q);
        u_bars.push(u);
    }
    VectorEstimates::new(q_hats, u_bars)
}

/// Analyzer computing a column mean with variance `s^2 / n` (unbiased sample
/// variance over the completed column). This is the estimator used throughout
/// the coverage study.
pub fn column_mean_analyzer(col: usize) -> impl FnMut(&DMatrix<f64>) -> Result<(f64, f64)> {
    move |data: &DMatrix<f64>| {
        if col >= data.ncols() {
            return Err(Error::ColumnOutOfRange {
                index: col,
                ncols: data.ncols(),
            });
        }
        let n = data.nrows();
        let column = data.column(col);
        let mean = column.sum() / n as f64;
        let ss: f64 = column.iter().map(|v| (v - mean) * (v - mean)).sum();
        let variance = if n > 1 { ss / (n - 1) as f64 } else { 0.0 };
        Ok((mean, variance / n as f64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("c{i}")).collect()
    }

    #[test]
    fn observed_values_follow_the_mask() {
        let values = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]);
        let mask = DMatrix::from_column_slice(3, 1, &[true, false, true]);
        let ds = IncompleteDataset::new(values, mask, names(1)).unwrap();
        assert_eq!(ds.column_observed_values(0).unwrap(), vec![1.0, 3.0]);
        assert_eq!(ds.missing_rows(0).unwrap(), vec![1]);
    }

    #[test]
    fn fully_observed_column_comes_back_in_order() {
        let values = DMatrix::from_column_slice(5, 1, &[5.0, 4.0, 3.0, 2.0, 1.0]);
        let ds = IncompleteDataset::complete(values, names(1)).unwrap();
        assert_eq!(
            ds.column_observed_values(0).unwrap(),
            vec![5.0, 4.0, 3.0, 2.0, 1.0]
        );
    }

    #[test]
    fn fully_missing_column_is_empty() {
        let values = DMatrix::from_column_slice(4, 1, &[1.0; 4]);
        let mask = DMatrix::from_element(4, 1, false);
        let ds = IncompleteDataset::new(values, mask, names(1)).unwrap();
        assert!(ds.column_observed_values(0).unwrap().is_empty());
    }

    #[test]
    fn out_of_range_column_errors() {
        let ds = IncompleteDataset::complete(DMatrix::zeros(2, 2), names(2)).unwrap();
        assert!(matches!(
            ds.column_observed_values(2),
            Err(Error::ColumnOutOfRange { index: 2, ncols: 2 })
        ));
    }

    #[test]
    fn sentinel_replaces_caller_placeholders() {
        let values = DMatrix::from_column_slice(2, 1, &[1.0, 99.0]);
        let mask = DMatrix::from_column_slice(2, 1, &[true, false]);
        let ds = IncompleteDataset::new(values, mask, names(1)).unwrap();
        assert_eq!(ds.values()[(1, 0)], MISSING_SENTINEL);
    }

    #[test]
    fn csv_roundtrip_preserves_values_and_mask() {
        let values = DMatrix::from_row_slice(3, 2, &[1.5, 2.0, 0.0, -3.25, 4.0, 5.5]);
        let mask =
            DMatrix::from_row_slice(3, 2, &[true, false, true, true, false, true]);
        let ds =
            IncompleteDataset::new(values, mask, vec!["a".into(), "b".into()]).unwrap();
        let mut buf = Vec::new();
        ds.to_writer(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("a,b\n"));
        assert!(text.contains("NA"));
        let back = IncompleteDataset::from_reader(buf.as_slice()).unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn csv_rejects_malformed_cells() {
        let text = "a,b\n1.0,oops\n";
        match IncompleteDataset::from_reader(text.as_bytes()) {
            Err(Error::CsvParse { line: 2, .. }) => {}
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn stack_requires_agreement_on_observed_cells() {
        let mask = DMatrix::from_column_slice(2, 1, &[true, false]);
        let a = DMatrix::from_column_slice(2, 1, &[1.0, 7.0]);
        let b = DMatrix::from_column_slice(2, 1, &[1.5, 8.0]);
        match ImputationStack::new(vec![a, b], mask, names(1)) {
            Err(Error::ObservedCellMismatch {
                completion: 1,
                row: 0,
                col: 0,
            }) => {}
            other => panic!("expected observed-cell mismatch, got {other:?}"),
        }
    }

    #[test]
    fn stack_requires_two_completions() {
        let mask = DMatrix::from_element(2, 1, true);
        let a = DMatrix::zeros(2, 1);
        assert!(matches!(
            ImputationStack::new(vec![a], mask, names(1)),
            Err(Error::TooFewImputations { m: 1 })
        ));
    }

    fn stack_of(columns: &[[f64; 4]]) -> ImputationStack {
        // Rows 0 and 1 observed, rows 2 and 3 imputed.
        let mask = DMatrix::from_column_slice(4, 1, &[true, true, false, false]);
        let completions = columns
            .iter()
            .map(|col| DMatrix::from_column_slice(4, 1, col))
            .collect();
        ImputationStack::new(completions, mask, names(1)).unwrap()
    }

    #[test]
    fn identical_completions_give_identical_estimates() {
        let stack = stack_of(&[[1.0, 2.0, 3.0, 4.0], [1.0, 2.0, 3.0, 4.0]]);
        let est = stack_estimates(&stack, column_mean_analyzer(0)).unwrap();
        assert_eq!(est.q_hats(), &[2.5, 2.5]);
    }

    #[test]
    fn analyzer_on_observed_cells_is_constant_across_completions() {
        // The analyzer only reads rows 0 and 1, which all completions share.
        let stack = stack_of(&[
            [1.0, 2.0, 3.0, 4.0],
            [1.0, 2.0, 9.0, -1.0],
            [1.0, 2.0, 0.5, 0.5],
        ]);
        let est = stack_estimates(&stack, |data| {
            Ok(((data[(0, 0)] + data[(1, 0)]) / 2.0, 0.0))
        })
        .unwrap();
        assert_eq!(est.q_hats(), &[1.5, 1.5, 1.5]);
    }

    #[test]
    fn mean_and_variance_match_hand_computation() {
        // Hand-computed column means and s^2/n for three 4-row completions
        // sharing the observed values 1 and 2 in rows 0 and 1.
        let stack = stack_of(&[
            [1.0, 2.0, 3.0, 4.0],
            [1.0, 2.0, 3.0, 8.0],
            [1.0, 2.0, 5.0, 4.0],
        ]);
        let est = stack_estimates(&stack, column_mean_analyzer(0)).unwrap();
        let expected_q = [2.5, 3.5, 3.0];
        let expected_u = [5.0 / 12.0, 29.0 / 12.0, 10.0 / 12.0];
        for i in 0..3 {
            assert_abs_diff_eq!(est.q_hats()[i], expected_q[i], epsilon = 1e-12);
            assert_abs_diff_eq!(est.u_bars()[i], expected_u[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn analyzer_failures_name_the_completion() {
        let stack = stack_of(&[[1.0, 2.0, 3.0, 4.0], [1.0, 2.0, 3.0, 8.0]]);
        let mut calls = 0;
        let result = stack_estimates(&stack, |_| {
            calls += 1;
            if calls == 2 {
                Err(Error::EmptyDataset)
            } else {
                Ok((0.0, 0.0))
            }
        });
        match result {
            Err(Error::Analyzer { completion: 1, .. }) => {}
            other => panic!("expected analyzer error, got {other:?}"),
        }
    }

    #[test]
    fn negative_within_variance_is_rejected() {
        assert!(matches!(
            RepeatedEstimates::new(vec![1.0, 2.0], vec![0.1, -0.2]),
            Err(Error::NegativeWithinVariance { index: 1, .. })
        ));
    }
}
