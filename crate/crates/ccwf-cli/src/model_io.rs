//! On-disk model bundle: `model.txt` holds the ensemble metadata (variant,
//! weights, partition source) and each member forest lives in its own
//! `forest_<j>.txt`. Everything is plain text with shortest-round-trip floats,
//! so saving the same model twice is byte-identical.

use std::path::{Path, PathBuf};

use ccwf::ensemble::PartitionSource;
use ccwf::forest::{forest_from_text, forest_to_text};
use ccwf::kmeans::KSelection;
use ccwf::{CcwfModel, Error, Result, StackingWeights};

fn bad(line: &str) -> Error {
    Error::invalid(format!("malformed model line: {line:?}"))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Column names the model was fit against, kept so `predict` can drop them
/// from feature files that still carry outcome/label columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelColumns {
    pub outcome: String,
    pub labels: Option<String>,
}

pub fn save_model(dir: &Path, m: &CcwfModel, columns: &ModelColumns) -> Result<Vec<PathBuf>> {
    use std::fmt::Write as _;
    let mut s = String::new();
    s.push_str("ccwf model v1\n");
    let _ = writeln!(s, "variant {}", m.variant);
    let _ = writeln!(s, "k {}", m.k);
    let _ = writeln!(s, "scheme {}", m.weights.scheme);
    let _ = writeln!(s, "lambda {}", m.weights.lambda);
    let ws: Vec<String> = m.weights.w.iter().map(|w| w.to_string()).collect();
    let _ = writeln!(s, "weights {}", ws.join(" "));
    let _ = writeln!(s, "train_p {}", m.train_p);
    let sizes: Vec<String> = m.partition_sizes.iter().map(|n| n.to_string()).collect();
    let _ = writeln!(s, "partition_sizes {}", sizes.join(" "));
    let _ = writeln!(s, "repaired {}", m.repaired_partitions);
    match &m.k_selection {
        Some(sel) => {
            let _ = writeln!(s, "k_selection {} {} {}", sel.k, sel.silhouette, sel.low_clusterability);
        }
        None => s.push_str("k_selection none\n"),
    }
    let _ = writeln!(s, "outcome_column {}", columns.outcome);
    match &columns.labels {
        Some(l) => {
            let _ = writeln!(s, "label_column {l}");
        }
        None => s.push_str("label_column none\n"),
    }
    match &m.partition_source {
        PartitionSource::KMeans { centroids } => {
            let _ = writeln!(s, "source kmeans {} {}", centroids.nrows(), centroids.ncols());
            for row in centroids.rows() {
                let vals: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(s, "{}", vals.join(" "));
            }
        }
        PartitionSource::Random { partition_seed } => {
            let _ = writeln!(s, "source random {partition_seed}");
        }
        PartitionSource::TrueLabels => s.push_str("source labels\n"),
        PartitionSource::None => s.push_str("source none\n"),
    }
    let _ = writeln!(s, "forests {}", m.forests.len());

    let model_path = dir.join("model.txt");
    write_file(&model_path, &s)?;
    let mut written = vec![model_path];
    for (j, f) in m.forests.iter().enumerate() {
        let path = dir.join(format!("forest_{j}.txt"));
        write_file(&path, &forest_to_text(f))?;
        written.push(path);
    }
    Ok(written)
}

fn field<'a>(line: &'a str, key: &str) -> Result<&'a str> {
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(' ').or(if rest.is_empty() { Some("") } else { None }))
        .ok_or_else(|| Error::invalid(format!("expected {key:?} line, got {line:?}")))
}

pub fn load_model(dir: &Path) -> Result<(CcwfModel, ModelColumns)> {
    let model_path = dir.join("model.txt");
    let text = std::fs::read_to_string(&model_path).map_err(|e| Error::io(&model_path, e))?;
    let mut lines = text.lines();
    let mut next = || lines.next().ok_or_else(|| bad("<eof>"));

    if next()? != "ccwf model v1" {
        return Err(Error::invalid("not a ccwf model v1 bundle"));
    }
    let variant = field(next()?, "variant")?.parse()?;
    let k: usize = { let l = next()?; field(l, "k")?.parse().map_err(|_| bad(l))? };
    let scheme = field(next()?, "scheme")?.parse()?;
    let lambda: f64 = { let l = next()?; field(l, "lambda")?.parse().map_err(|_| bad(l))? };
    let w = {
        let l = next()?;
        field(l, "weights")?
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| bad(l)))
            .collect::<Result<Vec<f64>>>()?
    };
    let train_p: usize = { let l = next()?; field(l, "train_p")?.parse().map_err(|_| bad(l))? };
    let partition_sizes = {
        let l = next()?;
        field(l, "partition_sizes")?
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| bad(l)))
            .collect::<Result<Vec<usize>>>()?
    };
    let repaired_partitions: usize =
        { let l = next()?; field(l, "repaired")?.parse().map_err(|_| bad(l))? };
    let k_selection = {
        let l = next()?;
        let rest = field(l, "k_selection")?;
        if rest == "none" {
            None
        } else {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(bad(l));
            }
            Some(KSelection {
                k: parts[0].parse().map_err(|_| bad(l))?,
                silhouette: parts[1].parse().map_err(|_| bad(l))?,
                low_clusterability: parts[2].parse().map_err(|_| bad(l))?,
            })
        }
    };
    let outcome = field(next()?, "outcome_column")?.to_string();
    let labels = match field(next()?, "label_column")? {
        "none" => None,
        name => Some(name.to_string()),
    };
    let partition_source = {
        let l = next()?;
        let rest = field(l, "source")?;
        let mut toks = rest.split_whitespace();
        match toks.next() {
            Some("kmeans") => {
                let rows: usize =
                    toks.next().ok_or_else(|| bad(l))?.parse().map_err(|_| bad(l))?;
                let cols: usize =
                    toks.next().ok_or_else(|| bad(l))?.parse().map_err(|_| bad(l))?;
                let mut data = Vec::with_capacity(rows * cols);
                for _ in 0..rows {
                    let rl = next()?;
                    let vals: Vec<f64> = rl
                        .split_whitespace()
                        .map(|t| t.parse::<f64>().map_err(|_| bad(rl)))
                        .collect::<Result<Vec<f64>>>()?;
                    if vals.len() != cols {
                        return Err(bad(rl));
                    }
                    data.extend(vals);
                }
                let centroids = ndarray_from(rows, cols, data)?;
                PartitionSource::KMeans { centroids }
            }
            Some("random") => {
                let seed: u64 =
                    toks.next().ok_or_else(|| bad(l))?.parse().map_err(|_| bad(l))?;
                PartitionSource::Random { partition_seed: seed }
            }
            Some("labels") => PartitionSource::TrueLabels,
            Some("none") => PartitionSource::None,
            _ => return Err(bad(l)),
        }
    };
    let n_forests: usize = { let l = next()?; field(l, "forests")?.parse().map_err(|_| bad(l))? };
    if w.len() != n_forests || partition_sizes.len() != n_forests {
        return Err(Error::invalid(format!(
            "model bundle inconsistent: {n_forests} forests, {} weights, {} partition sizes",
            w.len(),
            partition_sizes.len()
        )));
    }

    let mut forests = Vec::with_capacity(n_forests);
    for j in 0..n_forests {
        let path = dir.join(format!("forest_{j}.txt"));
        let ftext = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        forests.push(forest_from_text(&ftext)?);
    }

    let model = CcwfModel {
        variant,
        k,
        partition_source,
        forests,
        weights: StackingWeights { w, lambda, scheme },
        train_p,
        k_selection,
        repaired_partitions,
        partition_sizes,
    };
    Ok((model, ModelColumns { outcome, labels }))
}

fn ndarray_from(rows: usize, cols: usize, data: Vec<f64>) -> Result<ndarray::Array2<f64>> {
    ndarray::Array2::from_shape_vec((rows, cols), data)
        .map_err(|e| Error::invalid(format!("bad centroid block: {e}")))
}

/// Read a feature matrix from CSV, dropping any of the named columns (the
/// outcome/label columns a generated test file carries alongside covariates).
pub fn load_features_csv(path: &Path, drop: &[&str]) -> Result<ndarray::Array2<f64>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => {
            Error::io(path, std::io::Error::new(std::io::ErrorKind::NotFound, e.to_string()))
        }
        _ => Error::Csv(e),
    })?;
    let header: Vec<String> = reader.headers()?.iter().map(|s| s.to_string()).collect();
    let keep: Vec<usize> = (0..header.len())
        .filter(|&i| !drop.contains(&header[i].as_str()))
        .collect();
    if keep.is_empty() {
        return Err(Error::invalid("feature file has no feature columns"));
    }
    let mut data = Vec::new();
    let mut n = 0usize;
    for rec in reader.records() {
        let rec = rec?;
        for &i in &keep {
            let tok = rec.get(i).ok_or_else(|| Error::invalid("ragged feature row"))?;
            data.push(
                tok.parse::<f64>()
                    .map_err(|_| Error::invalid(format!("bad numeric value {tok:?}")))?,
            );
        }
        n += 1;
    }
    if n == 0 {
        return Err(Error::invalid("feature file has no rows"));
    }
    ndarray_from(n, keep.len(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ccwf::ensemble::{self, KChoice, VariantKind};
    use ccwf::{Dataset, ForestParams, WeightScheme};
    use ndarray::Array2;

    fn toy_model(variant: VariantKind) -> CcwfModel {
        let x = Array2::from_shape_fn((40, 3), |(i, j)| ((i * 7 + j * 3) % 11) as f64);
        let y: Vec<f64> = (0..40).map(|i| (i % 5) as f64).collect();
        let labels: Vec<usize> = (0..40).map(|i| i % 2).collect();
        let d = Dataset::new(x, y, Some(labels)).unwrap();
        let fp = ForestParams { n_trees: 4, min_leaf: 2, ..ForestParams::default() };
        ensemble::fit(&d, variant, KChoice::K(2), &fp, WeightScheme::SimpleAverage, 5).unwrap()
    }

    #[test]
    fn save_load_round_trips_every_source() {
        for variant in [
            VariantKind::Cluster,
            VariantKind::Random,
            VariantKind::Multi,
            VariantKind::Merged,
        ] {
            let m = toy_model(variant);
            let dir = tempfile::tempdir().unwrap();
            let cols =
                ModelColumns { outcome: "y".into(), labels: Some("label".into()) };
            save_model(dir.path(), &m, &cols).unwrap();
            let (back, back_cols) = load_model(dir.path()).unwrap();
            assert_eq!(m, back, "{variant}");
            assert_eq!(cols, back_cols);
            // saving again is byte-identical
            let dir2 = tempfile::tempdir().unwrap();
            save_model(dir2.path(), &back, &cols).unwrap();
            let a = std::fs::read(dir.path().join("model.txt")).unwrap();
            let b = std::fs::read(dir2.path().join("model.txt")).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn predictions_survive_round_trip() {
        let m = toy_model(VariantKind::Cluster);
        let dir = tempfile::tempdir().unwrap();
        save_model(dir.path(), &m, &ModelColumns { outcome: "y".into(), labels: None })
            .unwrap();
        let (back, _) = load_model(dir.path()).unwrap();
        let probe = Array2::from_shape_fn((7, 3), |(i, j)| (i + j) as f64 / 2.0);
        assert_eq!(
            ensemble::predict(&m, &probe.view()).unwrap(),
            ensemble::predict(&back, &probe.view()).unwrap()
        );
    }

    #[test]
    fn feature_csv_drops_named_columns() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "x1,x2,y,label\n1,2,9,0\n3,4,8,1\n").unwrap();
        let x = load_features_csv(&path, &["y", "label"]).unwrap();
        assert_eq!(x.shape(), &[2, 2]);
        assert_eq!(x[[1, 1]], 4.0);
        let all = load_features_csv(&path, &[]).unwrap();
        assert_eq!(all.shape(), &[2, 4]);
        assert!(load_features_csv(&path, &["x1", "x2", "y", "label"]).is_err());
    }

    #[test]
    fn truncated_bundle_is_rejected() {
        let m = toy_model(VariantKind::Cluster);
        let dir = tempfile::tempdir().unwrap();
        let cols = ModelColumns { outcome: "y".into(), labels: None };
        save_model(dir.path(), &m, &cols).unwrap();
        std::fs::remove_file(dir.path().join("forest_1.txt")).unwrap();
        assert!(load_model(dir.path()).is_err());
        std::fs::write(dir.path().join("model.txt"), "ccwf model v1\nvariant cluster\n")
            .unwrap();
        assert!(load_model(dir.path()).is_err());
    }
}
