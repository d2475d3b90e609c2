//! Tabular data carrier, CSV ingestion/emission, and partitioning primitives.

use std::path::Path;

use ndarray::Array2;
use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::seed;

/// A feature matrix with outcomes and optional true-cluster labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Array2<f64>,
    outcome: Vec<f64>,
    true_labels: Option<Vec<usize>>,
}

impl Dataset {
    /// Validates shapes, finiteness, and label density (labels must cover
    /// `{0..C-1}` with every value present).
    pub fn new(
        features: Array2<f64>,
        outcome: Vec<f64>,
        true_labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        let (n, p) = features.dim();
        if n == 0 || p == 0 {
            return Err(Error::invalid(format!("empty dataset: n={n}, p={p}")));
        }
        if outcome.len() != n {
            return Err(Error::invalid(format!(
                "outcome length {} does not match n={n}",
                outcome.len()
            )));
        }
        if let Some(bad) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite feature at row {}, column {}",
                bad / p,
                bad % p
            )));
        }
        if let Some(bad) = outcome.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite outcome at row {bad}")));
        }
        if let Some(labels) = &true_labels {
            if labels.len() != n {
                return Err(Error::invalid(format!(
                    "label length {} does not match n={n}",
                    labels.len()
                )));
            }
            check_dense(labels)?;
        }
        Ok(Dataset { features, outcome, true_labels })
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn p(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn outcome(&self) -> &[f64] {
        &self.outcome
    }

    pub fn true_labels(&self) -> Option<&[usize]> {
        self.true_labels.as_deref()
    }

    /// Number of distinct true clusters, if labels are present.
    pub fn n_true_clusters(&self) -> Option<usize> {
        self.true_labels
            .as_ref()
            .map(|l| l.iter().max().copied().unwrap_or(0) + 1)
    }

    /// Copy of the rows at `idx` (features and outcomes).
    pub fn subset(&self, idx: &[usize]) -> (Array2<f64>, Vec<f64>) {
        let p = self.p();
        let mut x = Array2::zeros((idx.len(), p));
        let mut y = Vec::with_capacity(idx.len());
        for (r, &i) in idx.iter().enumerate() {
            x.row_mut(r).assign(&self.features.row(i));
            y.push(self.outcome[i]);
        }
        (x, y)
    }
}

fn check_dense(labels: &[usize]) -> Result<()> {
    let c = labels.iter().max().copied().unwrap_or(0) + 1;
    let mut seen = vec![false; c];
    for &l in labels {
        seen[l] = true;
    }
    if let Some(gap) = seen.iter().position(|s| !s) {
        return Err(Error::invalid(format!(
            "labels are not dense: value {gap} missing from {{0..{}}}",
            c - 1
        )));
    }
    Ok(())
}

/// A surjective map from row index to partition index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionAssignment {
    labels: Vec<usize>,
    k: usize,
}

impl PartitionAssignment {
    /// Validates that every partition in `{0..k-1}` is non-empty.
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 || labels.is_empty() {
            return Err(Error::invalid("empty partition assignment"));
        }
        let mut counts = vec![0usize; k];
        for &l in &labels {
            if l >= k {
                return Err(Error::invalid(format!("partition label {l} out of range 0..{k}")));
            }
            counts[l] += 1;
        }
        if let Some(empty) = counts.iter().position(|&c| c == 0) {
            return Err(Error::invalid(format!("partition {empty} is empty")));
        }
        Ok(PartitionAssignment { labels, k })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Row indices per partition, in ascending row order.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            groups[l].push(i);
        }
        groups
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.k];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }
}

/// One training set plus an ordered list of test sets sharing its p.
#[derive(Debug, Clone)]
pub struct TrainTestSplit {
    pub train: Dataset,
    pub tests: Vec<Dataset>,
}

/// Split rows into k equally sized random partitions (sizes differ by at most
/// one; remainders go to the lowest-indexed partitions before shuffling).
pub fn partition_random(d: &Dataset, k: usize, seed_val: u64) -> Result<PartitionAssignment> {
    let n = d.n();
    if k < 2 || k > n {
        return Err(Error::invalid(format!("random partition needs 2 <= k <= n, got k={k}, n={n}")));
    }
    let mut labels: Vec<usize> = Vec::with_capacity(n);
    let base = n / k;
    let rem = n % k;
    for part in 0..k {
        let size = base + usize::from(part < rem);
        labels.extend(std::iter::repeat(part).take(size));
    }
    labels.shuffle(&mut seed::rng(seed_val));
    PartitionAssignment::new(labels, k)
}

/// Partition by the dataset's true-cluster labels.
pub fn partition_by_labels(d: &Dataset) -> Result<PartitionAssignment> {
    let labels = d
        .true_labels()
        .ok_or_else(|| Error::invalid("dataset has no true-cluster labels"))?;
    let k = d.n_true_clusters().unwrap();
    PartitionAssignment::new(labels.to_vec(), k)
}

/// Mean over partitions and features of the within-partition feature range.
pub fn average_covariate_range(d: &Dataset, a: &PartitionAssignment) -> f64 {
    let p = d.p();
    let mut total = 0.0;
    for rows in a.groups() {
        for m in 0..p {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &i in &rows {
                let v = d.features()[[i, m]];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            total += hi - lo;
        }
    }
    total / (a.k() as f64 * p as f64)
}

/// Read a dataset from a headered CSV file. Features are all columns other
/// than `outcome_column` and `label_column`, in header order.
pub fn load_csv(
    path: &Path,
    outcome_column: &str,
    label_column: Option<&str>,
) -> Result<Dataset> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => {
            Error::io(path, std::io::Error::new(std::io::ErrorKind::NotFound, e.to_string()))
        }
        _ => Error::Csv(e),
    })?;
    let header: Vec<String> =
        reader.headers()?.iter().map(|s| s.to_string()).collect();
    let outcome_idx = header
        .iter()
        .position(|h| h == outcome_column)
        .ok_or_else(|| Error::invalid(format!("outcome column '{outcome_column}' not found")))?;
    let label_idx = match label_column {
        Some(name) => Some(
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::invalid(format!("label column '{name}' not found")))?,
        ),
        None => None,
    };
    let feature_idx: Vec<usize> = (0..header.len())
        .filter(|&i| i != outcome_idx && Some(i) != label_idx)
        .collect();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut outcome = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let record = record?;
        let parse = |col: usize| -> Result<f64> {
            let cell = record.get(col).unwrap_or("");
            let v: f64 = cell.parse().map_err(|_| {
                Error::invalid(format!(
                    "unparseable cell at row {}, column '{}': '{cell}'",
                    row_no + 1,
                    header[col]
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::invalid(format!(
                    "non-finite value at row {}, column '{}'",
                    row_no + 1,
                    header[col]
                )));
            }
            Ok(v)
        };
        rows.push(feature_idx.iter().map(|&c| parse(c)).collect::<Result<Vec<f64>>>()?);
        outcome.push(parse(outcome_idx)?);
        if let Some(li) = label_idx {
            let cell = record.get(li).unwrap_or("");
            let l: usize = cell.parse().map_err(|_| {
                Error::invalid(format!(
                    "label at row {} is not a non-negative integer: '{cell}'",
                    row_no + 1
                ))
            })?;
            labels.push(l);
        }
    }
    if rows.is_empty() {
        return Err(Error::invalid(format!("{}: no data rows", path.display())));
    }
    let p = feature_idx.len();
    let mut features = Array2::zeros((rows.len(), p));
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            features[[i, j]] = v;
        }
    }
    Dataset::new(features, outcome, label_idx.map(|_| labels))
}

/// Write a dataset as CSV with feature columns `x1..xp`. Values are printed
/// with shortest round-trip formatting, so load-after-save is exact.
pub fn save_csv(
    d: &Dataset,
    path: &Path,
    outcome_column: &str,
    label_column: Option<&str>,
) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;
    let mut header: Vec<String> = (1..=d.p()).map(|j| format!("x{j}")).collect();
    header.push(outcome_column.to_string());
    if let Some(name) = label_column {
        if d.true_labels().is_none() {
            return Err(Error::invalid("cannot write labels: dataset has none"));
        }
        header.push(name.to_string());
    }
    writer.write_record(&header)?;
    for i in 0..d.n() {
        let mut record: Vec<String> =
            (0..d.p()).map(|j| format!("{}", d.features()[[i, j]])).collect();
        record.push(format!("{}", d.outcome()[i]));
        if label_column.is_some() {
            record.push(format!("{}", d.true_labels().unwrap()[i]));
        }
        writer.write_record(&record)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
