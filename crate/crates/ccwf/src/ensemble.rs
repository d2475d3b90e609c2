//! Fit/predict orchestration: partition the training data (k-means, random,
//! or true labels), train one forest per partition (or one merged forest),
//! and combine forecasts with stacked non-negative weights.

use ndarray::{Array2, ArrayView2};

use crate::dataset::{self, Dataset, PartitionAssignment};
use crate::error::{Error, Result};
use crate::exec;
use crate::forest::{self, Forest, ForestParams};
use crate::kmeans;
use crate::seed;
use crate::stacking::{self, StackingWeights, WeightScheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantKind {
    /// k-means partitions (the CCWF approach).
    Cluster,
    /// Random equal-size partitions.
    Random,
    /// Partitions from the recorded true labels / studies.
    Multi,
    /// One forest on everything, with the comparison k's tree budget.
    Merged,
}

impl std::fmt::Display for VariantKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            VariantKind::Cluster => "cluster",
            VariantKind::Random => "random",
            VariantKind::Multi => "multi",
            VariantKind::Merged => "merged",
        })
    }
}

impl std::str::FromStr for VariantKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cluster" => Ok(VariantKind::Cluster),
            "random" => Ok(VariantKind::Random),
            "multi" => Ok(VariantKind::Multi),
            "merged" => Ok(VariantKind::Merged),
            other => Err(Error::invalid(format!(
                "unknown variant {other:?} (expected cluster, random, multi, or merged)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KChoice {
    /// Silhouette-selected k over the automatic candidate grid.
    Auto,
    K(usize),
}

impl std::fmt::Display for KChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KChoice::Auto => f.write_str("auto"),
            KChoice::K(k) => write!(f, "{k}"),
        }
    }
}

impl std::str::FromStr for KChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(KChoice::Auto);
        }
        s.parse::<usize>()
            .map(KChoice::K)
            .map_err(|_| Error::invalid(format!("k must be a positive integer or \"auto\", got {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PartitionSource {
    KMeans { centroids: Array2<f64> },
    Random { partition_seed: u64 },
    TrueLabels,
    None,
}

impl PartitionSource {
    pub fn describe(&self) -> String {
        match self {
            PartitionSource::KMeans { centroids } => {
                format!("kmeans({} centroids)", centroids.nrows())
            }
            PartitionSource::Random { partition_seed } => {
                format!("random(seed {partition_seed})")
            }
            PartitionSource::TrueLabels => "labels".into(),
            PartitionSource::None => "none".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CcwfModel {
    pub variant: VariantKind,
    /// Partition count for cluster/random/multi; the comparison k (tree
    /// budget multiplier) for merged.
    pub k: usize,
    pub partition_source: PartitionSource,
    pub forests: Vec<Forest>,
    pub weights: StackingWeights,
    pub train_p: usize,
    /// Outcome of automatic k selection, when requested.
    pub k_selection: Option<kmeans::KSelection>,
    /// Undersized partitions dissolved (cluster) or k reductions (random).
    pub repaired_partitions: usize,
    /// Training rows per partition, aligned with `forests`.
    pub partition_sizes: Vec<usize>,
}

impl CcwfModel {
    /// Total trees across all forests (tree-budget parity checks).
    pub fn total_trees(&self) -> usize {
        self.forests.iter().map(|f| f.trees.len()).sum()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FitOptions {
    /// Sensitivity analysis: replace each forest's own-partition rows in the
    /// stack matrix with the other forests' average prediction.
    pub stack_out_of_cluster: bool,
    /// Exact total tree budget for the whole ensemble. When set, the budget is
    /// spread over the partitions (first `budget % k` forests get one extra
    /// tree) so comparisons keep tree-budget parity even after repairs change
    /// the partition count. Merged trains one forest with the full budget.
    pub tree_budget: Option<usize>,
}

/// Per-forest tree counts that spread `budget` exactly over `k` forests.
fn spread_budget(budget: usize, k: usize) -> Result<Vec<usize>> {
    if budget < k {
        return Err(Error::invalid(format!(
            "tree budget {budget} cannot cover {k} forests"
        )));
    }
    let base = budget / k;
    let extra = budget % k;
    Ok((0..k).map(|j| base + usize::from(j < extra)).collect())
}

/// Minimum rows a partition must keep to train a forest.
fn partition_floor(fp: &ForestParams) -> usize {
    2 * fp.min_leaf
}

fn resolve_k(d: &Dataset, k: KChoice, seed_val: u64) -> Result<(usize, Option<kmeans::KSelection>)> {
    match k {
        KChoice::K(k) => Ok((k, None)),
        KChoice::Auto => {
            let grid = kmeans::auto_k_grid(d.n());
            let sel = kmeans::select_k_among(d, &grid, seed::derive(seed_val, "select-k", 0))?;
            Ok((sel.k, Some(sel)))
        }
    }
}

/// Dissolve partitions smaller than the floor into the nearest surviving
/// centroid; returns (labels, surviving centroids, dissolved count).
fn repair_cluster_partition(
    d: &Dataset,
    model: &kmeans::KMeansModel,
    floor: usize,
) -> Result<(Vec<usize>, Array2<f64>, usize)> {
    let k = model.assignment.k();
    let mut labels = model.assignment.labels().to_vec();
    let mut sizes = model.assignment.sizes();
    let survives: Vec<bool> = sizes.iter().map(|&s| s >= floor).collect();
    let n_dissolved = survives.iter().filter(|&&s| !s).count();
    if n_dissolved == 0 {
        return Ok((labels, model.centroids.clone(), 0));
    }
    if survives.iter().all(|&s| !s) {
        return Err(Error::invalid(format!(
            "every k-means partition is smaller than the {floor}-row floor; reduce k"
        )));
    }
    let x = d.features();
    for i in 0..d.n() {
        if survives[labels[i]] {
            continue;
        }
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (j, &alive) in survives.iter().enumerate() {
            if !alive {
                continue;
            }
            let dd: f64 = (&x.row(i) - &model.centroids.row(j))
                .iter()
                .map(|v| v * v)
                .sum();
            if dd < best_d {
                best_d = dd;
                best = j;
            }
        }
        sizes[labels[i]] -= 1;
        labels[i] = best;
        sizes[best] += 1;
    }
    // compact label space to the survivors, preserving index order
    let mut remap = vec![usize::MAX; k];
    let mut kept = 0;
    for j in 0..k {
        if survives[j] {
            remap[j] = kept;
            kept += 1;
        }
    }
    let mut centroids = Array2::zeros((kept, x.ncols()));
    for j in 0..k {
        if survives[j] {
            centroids.row_mut(remap[j]).assign(&model.centroids.row(j));
        }
    }
    for l in labels.iter_mut() {
        *l = remap[*l];
    }
    Ok((labels, centroids, n_dissolved))
}

/// Fit one ensemble variant. Deterministic in all arguments, independent of
/// thread count.
pub fn fit(
    d: &Dataset,
    variant: VariantKind,
    k: KChoice,
    fp: &ForestParams,
    weight_scheme: WeightScheme,
    seed_val: u64,
) -> Result<CcwfModel> {
    fit_with_options(d, variant, k, fp, weight_scheme, seed_val, FitOptions::default())
}

pub fn fit_with_options(
    d: &Dataset,
    variant: VariantKind,
    k: KChoice,
    fp: &ForestParams,
    weight_scheme: WeightScheme,
    seed_val: u64,
    opts: FitOptions,
) -> Result<CcwfModel> {
    let floor = partition_floor(fp);

    if variant == VariantKind::Merged {
        let (k_ref, k_selection) = resolve_k(d, k, seed_val)?;
        if k_ref < 1 {
            return Err(Error::invalid("merged needs a positive comparison k"));
        }
        let budget = opts.tree_budget.unwrap_or(fp.n_trees * k_ref);
        if budget < 1 {
            return Err(Error::invalid("merged needs a positive tree budget"));
        }
        let mp = ForestParams { n_trees: budget, ..*fp };
        let f = forest::fit_forest(
            &d.features().view(),
            d.outcome(),
            &mp,
            seed::derive(seed_val, "forest", 0),
        )?;
        return Ok(CcwfModel {
            variant,
            k: k_ref,
            partition_source: PartitionSource::None,
            forests: vec![f],
            weights: StackingWeights { w: vec![1.0], lambda: 0.0, scheme: weight_scheme },
            train_p: d.p(),
            k_selection,
            repaired_partitions: 0,
            partition_sizes: vec![d.n()],
        });
    }

    // Resolve the partition labels per variant.
    let mut repaired = 0usize;
    let mut k_selection = None;
    let (labels, k_actual, source) = match variant {
        VariantKind::Cluster => {
            let (k_req, sel) = resolve_k(d, k, seed_val)?;
            k_selection = sel;
            if k_req < 2 {
                return Err(Error::invalid("cluster variant needs k >= 2"));
            }
            let km = kmeans::fit_kmeans(
                d,
                k_req,
                seed::derive(seed_val, "kmeans", 0),
                kmeans::DEFAULT_N_INIT,
                kmeans::DEFAULT_MAX_ITER,
                kmeans::DEFAULT_TOL,
            )?;
            let (labels, centroids, dissolved) = repair_cluster_partition(d, &km, floor)?;
            repaired = dissolved;
            let k_actual = centroids.nrows();
            (labels, k_actual, PartitionSource::KMeans { centroids })
        }
        VariantKind::Random => {
            let (k_req, sel) = resolve_k(d, k, seed_val)?;
            k_selection = sel;
            if k_req < 2 {
                return Err(Error::invalid("random variant needs k >= 2"));
            }
            // rebalance: cap k so every slice clears the floor
            let k_max = d.n() / floor;
            let k_used = if k_req > k_max {
                repaired = k_req - k_max;
                k_max
            } else {
                k_req
            };
            if k_used < 2 {
                return Err(Error::invalid(format!(
                    "cannot split {} rows into >= 2 partitions of {floor}+ rows",
                    d.n()
                )));
            }
            let partition_seed = seed::derive(seed_val, "partition", 0);
            let pa = dataset::partition_random(d, k_used, partition_seed)?;
            (pa.labels().to_vec(), k_used, PartitionSource::Random { partition_seed })
        }
        VariantKind::Multi => {
            let pa = dataset::partition_by_labels(d)?;
            let labels = pa.labels().to_vec();
            for (j, &s) in pa.sizes().iter().enumerate() {
                if s < floor {
                    return Err(Error::invalid(format!(
                        "true cluster {j} has {s} rows, below the {floor}-row training floor"
                    )));
                }
            }
            let k_actual = pa.k();
            (labels, k_actual, PartitionSource::TrueLabels)
        }
        VariantKind::Merged => unreachable!(),
    };

    let assignment = PartitionAssignment::new(labels, k_actual)?;
    let groups = assignment.groups();
    let sizes = assignment.sizes();

    let tree_counts = match opts.tree_budget {
        Some(b) => spread_budget(b, k_actual)?,
        None => vec![fp.n_trees; k_actual],
    };
    let forests = exec::try_map_indexed(k_actual, |j| {
        let (x, y) = d.subset(&groups[j]);
        let fpj = ForestParams { n_trees: tree_counts[j], ..*fp };
        forest::fit_forest(&x.view(), &y, &fpj, seed::derive(seed_val, "forest", j as u64))
    })?;

    let stack = if opts.stack_out_of_cluster {
        stacking::build_stack_matrix_out_of_cluster(&forests, d, assignment.labels())?
    } else {
        stacking::build_stack_matrix(&forests, d)?
    };
    let weights =
        stacking::fit_stacking(&stack, weight_scheme, &sizes, seed::derive(seed_val, "stacking", 0))?;

    Ok(CcwfModel {
        variant,
        k: k_actual,
        partition_source: source,
        forests,
        weights,
        train_p: d.p(),
        k_selection,
        repaired_partitions: repaired,
        partition_sizes: sizes,
    })
}

/// Ensemble prediction: the weighted sum of per-forest predictions, with no
/// weight renormalization.
pub fn predict(m: &CcwfModel, x: &ArrayView2<f64>) -> Result<Vec<f64>> {
    if x.ncols() != m.train_p {
        return Err(Error::invalid(format!(
            "predict: expected {} features, got {}",
            m.train_p,
            x.ncols()
        )));
    }
    let per_forest = exec::try_map_indexed(m.forests.len(), |j| {
        forest::predict_forest(&m.forests[j], x)
    })?;
    let mut out = vec![0.0; x.nrows()];
    for (w, preds) in m.weights.w.iter().zip(&per_forest) {
        for (o, p) in out.iter_mut().zip(preds) {
            *o += w * p;
        }
    }
    Ok(out)
}

/// Root mean squared error.
pub fn rmse(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    if y_true.len() != y_pred.len() || y_true.is_empty() {
        return Err(Error::invalid(format!(
            "rmse needs equal non-empty lengths, got {} and {}",
            y_true.len(),
            y_pred.len()
        )));
    }
    let mse: f64 = y_true
        .iter()
        .zip(y_pred)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / y_true.len() as f64;
    Ok(mse.sqrt())
}
