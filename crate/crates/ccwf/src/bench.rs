//! Replicated simulation experiments: scenario runs with merged-relative
//! summaries, parameter sweeps, weight-distribution records, partition range
//! diagnostics, bias-variance decomposition, and the pooled multi-study
//! comparison. Reps are independent jobs with derived seeds, so parallel
//! execution never changes an emitted number.

use ndarray::s;

use crate::dataset::{self, Dataset, PartitionAssignment};
use crate::ensemble::{self, CcwfModel, FitOptions, KChoice, VariantKind};
use crate::error::{Error, Result};
use crate::exec;
use crate::forest::ForestParams;
use crate::kmeans;
use crate::seed;
use crate::stacking::WeightScheme;
use crate::synthgen::{self, GenConfig, Mixture, OutcomeKind, OutcomeModel};

/// Default replication count per scenario.
pub const DEFAULT_N_REPS: usize = 50;
/// Normal quantile for the 95% confidence bands.
const CI_Z: f64 = 1.96;

/// One ensemble entry in a scenario comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariantSpec {
    pub kind: VariantKind,
    pub k: KChoice,
    pub scheme: WeightScheme,
}

impl VariantSpec {
    pub fn new(kind: VariantKind, k: KChoice, scheme: WeightScheme) -> Self {
        VariantSpec { kind, k, scheme }
    }

    /// Stable identifier used in summaries and CSV output.
    pub fn id(&self) -> String {
        format!("{}:{}", self.kind, self.scheme)
    }
}

/// A replicated experiment: a generator configuration, an outcome model, and
/// the ensemble variants to compare.
#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub name: String,
    pub gen: GenConfig,
    pub model: OutcomeModel,
    /// Base per-forest parameters; `n_trees` is the per-partition budget unit.
    pub forest: ForestParams,
    pub variants: Vec<VariantSpec>,
    pub n_reps: usize,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_reps < 2 {
            return Err(Error::invalid("a scenario needs n_reps >= 2"));
        }
        if self.variants.is_empty() {
            return Err(Error::invalid("a scenario needs at least one variant"));
        }
        self.gen.validate()?;
        self.model.validate()
    }

    fn require_merged(&self) -> Result<usize> {
        self.variants
            .iter()
            .position(|v| v.kind == VariantKind::Merged)
            .ok_or_else(|| {
                Error::invalid("a scenario needs a merged variant as the percent-change baseline")
            })
    }
}

/// One fitted variant in one rep.
#[derive(Debug, Clone, PartialEq)]
pub struct RepRecord {
    pub variant: String,
    pub variant_index: usize,
    pub rep: usize,
    /// Mean RMSE over the rep's test sets.
    pub rmse: f64,
    /// Final partition count (comparison k for merged).
    pub k: usize,
    pub total_trees: usize,
    pub weights: Vec<f64>,
    pub silhouette: Option<f64>,
    pub repaired: usize,
}

/// Per-variant summary over reps.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub variant: String,
    pub mean_rmse: f64,
    pub se: f64,
    pub pct_change_vs_merged: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub rows: Vec<SummaryRow>,
    pub records: Vec<RepRecord>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean (sample sd over sqrt n).
fn std_err(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

fn with_rep_context(e: Error, rep: usize, rep_seed: u64) -> Error {
    let msg = format!("rep {rep} (derived seed {rep_seed}) failed: {e}");
    match e {
        Error::Numeric(_) => Error::numeric(msg),
        _ => Error::invalid(msg),
    }
}

/// Fit every variant on one training set with tree-budget parity: the first
/// non-merged variant sets the budget (its final partition count times the
/// base tree count) and every other variant spreads exactly that many trees
/// over its own partitions.
fn fit_all_variants(spec: &ScenarioSpec, rep_seed: u64, train: &Dataset) -> Result<Vec<CcwfModel>> {
    let ref_idx = spec
        .variants
        .iter()
        .position(|v| v.kind != VariantKind::Merged)
        .unwrap_or(0);
    let fit_seed = |i: usize| seed::derive(rep_seed, "variant", i as u64);

    let v_ref = &spec.variants[ref_idx];
    let ref_model = ensemble::fit_with_options(
        train,
        v_ref.kind,
        v_ref.k,
        &spec.forest,
        v_ref.scheme,
        fit_seed(ref_idx),
        FitOptions::default(),
    )?;
    let budget = ref_model.total_trees();
    let k_ref = ref_model.k;

    let mut models = Vec::with_capacity(spec.variants.len());
    for (i, v) in spec.variants.iter().enumerate() {
        if i == ref_idx {
            models.push(ref_model.clone());
            continue;
        }
        // merged inherits the comparison k; everyone shares the tree budget
        let kc = if v.kind == VariantKind::Merged { KChoice::K(k_ref) } else { v.k };
        let m = ensemble::fit_with_options(
            train,
            v.kind,
            kc,
            &spec.forest,
            v.scheme,
            fit_seed(i),
            FitOptions { tree_budget: Some(budget), ..FitOptions::default() },
        )?;
        models.push(m);
    }
    for (v, m) in spec.variants.iter().zip(&models) {
        if m.total_trees() != budget {
            return Err(Error::invalid(format!(
                "tree-budget parity violated: {} holds {} trees, expected {budget}",
                v.id(),
                m.total_trees()
            )));
        }
    }
    Ok(models)
}

fn eval_on_tests(m: &CcwfModel, tests: &[Dataset]) -> Result<f64> {
    if tests.is_empty() {
        return Err(Error::invalid("evaluation needs at least one test set"));
    }
    let mut per_test = Vec::with_capacity(tests.len());
    for t in tests {
        let preds = ensemble::predict(m, &t.features().view())?;
        per_test.push(ensemble::rmse(t.outcome(), &preds)?);
    }
    Ok(mean(&per_test))
}

fn rep_records(
    spec: &ScenarioSpec,
    rep: usize,
    rep_seed: u64,
    train: &Dataset,
    tests: &[Dataset],
) -> Result<Vec<RepRecord>> {
    let models = fit_all_variants(spec, rep_seed, train)?;
    let mut out = Vec::with_capacity(models.len());
    for (i, (v, m)) in spec.variants.iter().zip(&models).enumerate() {
        out.push(RepRecord {
            variant: v.id(),
            variant_index: i,
            rep,
            rmse: eval_on_tests(m, tests)?,
            k: m.k,
            total_trees: m.total_trees(),
            weights: m.weights.w.clone(),
            silhouette: m.k_selection.as_ref().map(|s| s.silhouette),
            repaired: m.repaired_partitions,
        });
    }
    Ok(out)
}

fn summarize(spec: &ScenarioSpec, records: &[RepRecord]) -> Result<Vec<SummaryRow>> {
    let merged_idx = spec.require_merged()?;
    let per_variant: Vec<Vec<f64>> = (0..spec.variants.len())
        .map(|i| {
            records
                .iter()
                .filter(|r| r.variant_index == i)
                .map(|r| r.rmse)
                .collect()
        })
        .collect();
    let merged_mean = mean(&per_variant[merged_idx]);
    if merged_mean <= 0.0 {
        return Err(Error::numeric("merged mean RMSE must be positive for percent change"));
    }
    Ok(spec
        .variants
        .iter()
        .zip(&per_variant)
        .map(|(v, rmses)| {
            let m = mean(rmses);
            let se = std_err(rmses);
            SummaryRow {
                variant: v.id(),
                mean_rmse: m,
                se,
                pct_change_vs_merged: 100.0 * (m - merged_mean) / merged_mean,
                ci_low: m - CI_Z * se,
                ci_high: m + CI_Z * se,
            }
        })
        .collect())
}

/// Run one scenario: per rep, generate a fresh train/test split, fit every
/// variant under tree-budget parity, and average RMSE over the rep's test
/// sets; then summarize each variant against the merged baseline.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<ScenarioResult> {
    spec.validate()?;
    spec.require_merged()?;
    if spec.gen.n_test_sets == 0 {
        return Err(Error::invalid("run_scenario needs gen.n_test_sets >= 1"));
    }
    let per_rep = exec::try_map_indexed(spec.n_reps, |r| {
        let rep_seed = seed::derive(spec.seed, "rep", r as u64);
        let run = || -> Result<Vec<RepRecord>> {
            let cfg = GenConfig { seed: rep_seed, ..spec.gen.clone() };
            let split = synthgen::gen_scenario(&cfg, &spec.model)?;
            rep_records(spec, r, rep_seed, &split.train, &split.tests)
        };
        run().map_err(|e| with_rep_context(e, r, rep_seed))
    })?;
    let records: Vec<RepRecord> = per_rep.into_iter().flatten().collect();
    let rows = summarize(spec, &records)?;
    Ok(ScenarioResult { rows, records })
}

/// The generator/model knob a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    K,
    CoefNormScale,
    NTrueClusters,
    ClusterSize,
}

impl std::fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepParameter::K => "k",
            SweepParameter::CoefNormScale => "coef_norm_scale",
            SweepParameter::NTrueClusters => "n_true_clusters",
            SweepParameter::ClusterSize => "cluster_size",
        })
    }
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "k" => Ok(SweepParameter::K),
            "coef_norm_scale" => Ok(SweepParameter::CoefNormScale),
            "n_true_clusters" => Ok(SweepParameter::NTrueClusters),
            "cluster_size" => Ok(SweepParameter::ClusterSize),
            other => Err(Error::invalid(format!(
                "unknown sweep parameter {other:?} (expected k, coef_norm_scale, n_true_clusters, or cluster_size)"
            ))),
        }
    }
}

fn as_count(parameter: SweepParameter, v: f64, min: usize) -> Result<usize> {
    if v.fract() != 0.0 || v < min as f64 || !v.is_finite() {
        return Err(Error::invalid(format!(
            "sweep value {v} for {parameter} must be an integer >= {min}"
        )));
    }
    Ok(v as usize)
}

/// A copy of `spec` with one parameter replaced by `value`.
fn apply_parameter(spec: &ScenarioSpec, parameter: SweepParameter, value: f64) -> Result<ScenarioSpec> {
    let mut out = spec.clone();
    match parameter {
        SweepParameter::K => {
            let k = as_count(parameter, value, 1)?;
            for v in out.variants.iter_mut() {
                if matches!(v.kind, VariantKind::Cluster | VariantKind::Random) {
                    v.k = KChoice::K(k);
                }
            }
        }
        SweepParameter::CoefNormScale => {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid("coef_norm_scale sweep values must be positive"));
            }
            out.model.coef_norm_scale = value;
        }
        SweepParameter::NTrueClusters => {
            let c = as_count(parameter, value, 1)?;
            // hold the total training size roughly constant, like for like
            let total = spec.gen.n_true_clusters * spec.gen.cluster_size;
            out.gen.n_true_clusters = c;
            out.gen.cluster_size = (total as f64 / c as f64).round().max(2.0) as usize;
        }
        SweepParameter::ClusterSize => {
            out.gen.cluster_size = as_count(parameter, value, 2)?;
        }
    }
    Ok(out)
}

/// One sweep value's full scenario result.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub parameter: SweepParameter,
    pub value: f64,
    pub result: ScenarioResult,
}

/// Re-run the scenario once per value with everything else held fixed.
pub fn sweep(
    spec: &ScenarioSpec,
    parameter: SweepParameter,
    values: &[f64],
) -> Result<Vec<SweepPoint>> {
    if values.is_empty() {
        return Err(Error::invalid("sweep needs at least one value"));
    }
    values
        .iter()
        .map(|&v| {
            let spec_v = apply_parameter(spec, parameter, v)?;
            Ok(SweepPoint { parameter, value: v, result: run_scenario(&spec_v)? })
        })
        .collect()
}

/// Average ranks (ties share the mean rank).
fn ranks(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation (NaN when either side is constant).
pub fn spearman_rho(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "spearman needs equal lengths");
    let rx = ranks(xs);
    let ry = ranks(ys);
    let mx = mean(&rx);
    let my = mean(&ry);
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        num += (a - mx) * (b - my);
        dx += (a - mx) * (a - mx);
        dy += (b - my) * (b - my);
    }
    num / (dx.sqrt() * dy.sqrt())
}

/// One fitted variant's stacking weights in one rep of a weight study.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightRecord {
    pub variant: String,
    /// The sweep's comparison k.
    pub k: usize,
    pub rep: usize,
    /// Fitted weights sorted descending; `weights[0]` is the flagged maximum.
    pub weights: Vec<f64>,
    pub max_weight: f64,
}

/// Record per-rep stacking-weight vectors for each variant at each comparison
/// k. Training only: test sets are skipped.
pub fn weight_distribution_experiment(
    spec: &ScenarioSpec,
    k_values: &[usize],
) -> Result<Vec<WeightRecord>> {
    spec.validate()?;
    if k_values.is_empty() {
        return Err(Error::invalid("weight study needs at least one k"));
    }
    for v in &spec.variants {
        if v.kind == VariantKind::Merged {
            return Err(Error::invalid(
                "weight study compares stacked variants; drop the merged entry",
            ));
        }
        if !matches!(v.scheme, WeightScheme::StackRidge | WeightScheme::StackLasso) {
            return Err(Error::invalid("weight study needs stacked weight schemes"));
        }
    }
    let mut out = Vec::new();
    for &k in k_values {
        let spec_k = apply_parameter(spec, SweepParameter::K, k as f64)?;
        let per_rep = exec::try_map_indexed(spec_k.n_reps, |r| {
            let rep_seed = seed::derive(spec_k.seed, "rep", r as u64);
            let run = || -> Result<Vec<WeightRecord>> {
                let cfg = GenConfig { seed: rep_seed, n_test_sets: 0, ..spec_k.gen.clone() };
                let split = synthgen::gen_scenario(&cfg, &spec_k.model)?;
                let models = fit_all_variants(&spec_k, rep_seed, &split.train)?;
                Ok(spec_k
                    .variants
                    .iter()
                    .zip(&models)
                    .map(|(v, m)| {
                        let mut w = m.weights.w.clone();
                        w.sort_by(|a, b| b.total_cmp(a));
                        let max_weight = w[0];
                        WeightRecord { variant: v.id(), k, rep: r, weights: w, max_weight }
                    })
                    .collect())
            };
            run().map_err(|e| with_rep_context(e, r, rep_seed))
        })?;
        out.extend(per_rep.into_iter().flatten());
    }
    Ok(out)
}

/// Per-partitioning average covariate range, summarized over reps.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeSummary {
    /// "cluster" (k-means), "random", or "multi" (true labels).
    pub variant: String,
    pub mean: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub per_rep: Vec<f64>,
}

fn summarize_ranges(variant: &str, per_rep: Vec<f64>) -> RangeSummary {
    let m = mean(&per_rep);
    let se = std_err(&per_rep);
    RangeSummary {
        variant: variant.to_string(),
        mean: m,
        se,
        ci_low: m - CI_Z * se,
        ci_high: m + CI_Z * se,
        per_rep,
    }
}

/// Compare the average within-partition covariate range of the k-means,
/// random, and true-label partitionings of the same generated data.
pub fn range_diagnostic(spec: &ScenarioSpec, k: KChoice) -> Result<Vec<RangeSummary>> {
    spec.validate()?;
    let per_rep = exec::try_map_indexed(spec.n_reps, |r| {
        let rep_seed = seed::derive(spec.seed, "rep", r as u64);
        let run = || -> Result<[f64; 3]> {
            let cfg = GenConfig { seed: rep_seed, n_test_sets: 0, ..spec.gen.clone() };
            let split = synthgen::gen_scenario(&cfg, &spec.model)?;
            let d = &split.train;
            let k_res = match k {
                KChoice::K(k) => k,
                KChoice::Auto => {
                    let grid = kmeans::auto_k_grid(d.n());
                    kmeans::select_k_among(d, &grid, seed::derive(rep_seed, "select-k", 0))?.k
                }
            };
            if k_res == 1 {
                // whole-dataset range for every partitioning
                let pa = PartitionAssignment::new(vec![0; d.n()], 1)?;
                let whole = dataset::average_covariate_range(d, &pa);
                return Ok([whole, whole, whole]);
            }
            let km = kmeans::fit_kmeans(
                d,
                k_res,
                seed::derive(rep_seed, "kmeans", 0),
                kmeans::DEFAULT_N_INIT,
                kmeans::DEFAULT_MAX_ITER,
                kmeans::DEFAULT_TOL,
            )?;
            let cluster_r = dataset::average_covariate_range(d, &km.assignment);
            let rand_pa =
                dataset::partition_random(d, k_res, seed::derive(rep_seed, "partition", 0))?;
            let random_r = dataset::average_covariate_range(d, &rand_pa);
            let true_pa = dataset::partition_by_labels(d)?;
            let multi_r = dataset::average_covariate_range(d, &true_pa);
            Ok([cluster_r, random_r, multi_r])
        };
        run().map_err(|e| with_rep_context(e, r, rep_seed))
    })?;
    let col = |i: usize| per_rep.iter().map(|r| r[i]).collect::<Vec<f64>>();
    Ok(vec![
        summarize_ranges("cluster", col(0)),
        summarize_ranges("random", col(1)),
        summarize_ranges("multi", col(2)),
    ])
}

/// One variant's bias-variance decomposition against the regression function.
#[derive(Debug, Clone, PartialEq)]
pub struct BvCell {
    pub variant: String,
    pub bias2: f64,
    pub variance: f64,
    /// Always `bias2 + variance` (noise excluded by construction).
    pub mse: f64,
}

/// Decompose repeated predictions (one vector per training draw) against the
/// noiseless truth: mean squared bias of the average prediction, plus the
/// average over test points of the across-draw variance.
pub fn decompose(preds: &[Vec<f64>], truth: &[f64]) -> Result<(f64, f64, f64)> {
    if preds.len() < 2 {
        return Err(Error::invalid("decomposition needs at least 2 training draws"));
    }
    let n = truth.len();
    if n == 0 || preds.iter().any(|p| p.len() != n) {
        return Err(Error::invalid("every prediction vector must match the truth length"));
    }
    let r = preds.len() as f64;
    let mut bias2 = 0.0;
    let mut var = 0.0;
    for i in 0..n {
        let mut s = 0.0;
        let mut sq = 0.0;
        for p in preds {
            s += p[i];
            sq += p[i] * p[i];
        }
        let m = s / r;
        bias2 += (m - truth[i]) * (m - truth[i]);
        var += (sq / r - m * m).max(0.0);
    }
    bias2 /= n as f64;
    var /= n as f64;
    Ok((bias2, var, bias2 + var))
}

/// Hold the generating process fixed (mixture, coefficients, outcome rule, and
/// one noiseless test design), redraw the training set `n_train_draws` times,
/// and decompose each variant's MSE into bias^2 + variance.
pub fn bias_variance_decomposition(
    spec: &ScenarioSpec,
    n_train_draws: usize,
    n_test_per_cluster: usize,
) -> Result<Vec<BvCell>> {
    spec.gen.validate()?;
    spec.model.validate()?;
    if n_train_draws < 2 {
        return Err(Error::invalid("bias-variance needs n_train_draws >= 2"));
    }
    if n_test_per_cluster == 0 {
        return Err(Error::invalid("bias-variance needs a non-empty test design"));
    }
    if spec.variants.is_empty()
        || !spec
            .variants
            .iter()
            .all(|v| matches!(v.kind, VariantKind::Merged | VariantKind::Multi))
    {
        return Err(Error::invalid(
            "bias-variance decomposition compares merged and multi variants only",
        ));
    }
    let root = spec.seed;
    let cfg = &spec.gen;
    let c = cfg.n_true_clusters;

    // The fixed generating process.
    let mut mix_rng = seed::rng(seed::derive(root, "bv-mixture", 0));
    let mix = synthgen::draw_mixture(c, cfg.p, cfg.separation, &mut mix_rng);
    let base = synthgen::draw_coefficients(cfg.p, cfg.n_active, seed::derive(root, "coefficients", 0))?;
    let cs = synthgen::perturb_coefficients(
        &base,
        c,
        cfg.max_perturb,
        seed::derive(root, "perturbation", 0),
    )?;
    let distortion_seed = seed::derive(root, "bv-distortions", 0);
    let draw_features = |salt: &str, idx: u64, n_per: usize| {
        let mut rng = seed::rng(seed::derive(root, salt, idx));
        let (mut x, labels) = synthgen::sample_mixture(&mix, n_per, &mut rng);
        if cfg.generator == synthgen::Generator::NonGaussian {
            synthgen::apply_distortions(&mut x, &labels, c, distortion_seed, None);
        }
        (x, labels)
    };

    // Resolve outcome extras once, on the first training draw's features.
    let (x0, l0) = draw_features("bv-train", 0, cfg.cluster_size);
    let resolved = spec.model.resolved(&cs, &x0.view(), &l0, seed::derive(root, "outcome-extras", 0))?;

    // Fixed test design and its noiseless truth.
    let (tx, tl) = draw_features("bv-test", 0, n_test_per_cluster);
    let noiseless = OutcomeModel { noise_sd: 0.0, ..resolved.clone() };
    let truth = synthgen::gen_outcome(&tx.view(), &tl, &cs, &noiseless, 0)?;

    let per_draw: Vec<Vec<Vec<f64>>> = exec::try_map_indexed(n_train_draws, |r| {
        let run = || -> Result<Vec<Vec<f64>>> {
            let (x, labels) = draw_features("bv-train", r as u64, cfg.cluster_size);
            let y = synthgen::gen_outcome(
                &x.view(),
                &labels,
                &cs,
                &resolved,
                seed::derive(root, "bv-noise", r as u64),
            )?;
            let train = Dataset::new(x, y, Some(labels))?;
            let models = fit_all_variants(spec, seed::derive(root, "bv-draw", r as u64), &train)?;
            models
                .iter()
                .map(|m| ensemble::predict(m, &tx.view()))
                .collect()
        };
        run().map_err(|e| with_rep_context(e, r, seed::derive(root, "bv-draw", r as u64)))
    })?;

    spec.variants
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let preds: Vec<Vec<f64>> = per_draw.iter().map(|d| d[i].clone()).collect();
            let (bias2, variance, mse) = decompose(&preds, &truth)?;
            Ok(BvCell { variant: v.id(), bias2, variance, mse })
        })
        .collect()
}

/// Pooled multi-study comparison: per rep, draw train studies plus held-out
/// test studies from one mixture, keep each study's perturbed coefficients in
/// both splits, fit the variants on the pooled training studies, and evaluate
/// on the held-out studies.
pub fn multistudy_experiment(
    n_train_studies: usize,
    n_test_studies: usize,
    spec: &ScenarioSpec,
) -> Result<ScenarioResult> {
    spec.validate()?;
    spec.require_merged()?;
    if n_train_studies < 1 || n_test_studies < 1 {
        return Err(Error::invalid("multi-study needs at least 1 train and 1 test study"));
    }
    if spec.model.kind != OutcomeKind::MultistudyNonlinear {
        return Err(Error::invalid(
            "the multi-study experiment uses the multistudy_nonlinear outcome",
        ));
    }
    let cfg = &spec.gen;
    let s_total = n_train_studies + n_test_studies;

    let per_rep = exec::try_map_indexed(spec.n_reps, |r| {
        let rep_seed = seed::derive(spec.seed, "rep", r as u64);
        let run = || -> Result<Vec<RepRecord>> {
            let mut srng = seed::rng(seed::derive(rep_seed, "studies", 0));
            let mix = synthgen::draw_mixture(s_total, cfg.p, cfg.separation, &mut srng);
            let base = synthgen::draw_coefficients(
                cfg.p,
                cfg.n_active,
                seed::derive(rep_seed, "coefficients", 0),
            )?;
            let cs = synthgen::perturb_coefficients(
                &base,
                s_total,
                cfg.max_perturb,
                seed::derive(rep_seed, "perturbation", 0),
            )?;
            let distortion_seed = seed::derive(rep_seed, "distortions", 0);

            // pooled training studies
            let sub = Mixture {
                centroids: mix.centroids.slice(s![..n_train_studies, ..]).to_owned(),
                scales: mix.scales[..n_train_studies].to_vec(),
            };
            let mut rng_tr = seed::rng(seed::derive(rep_seed, "train-covariates", 0));
            let (mut x, labels) = synthgen::sample_mixture(&sub, cfg.cluster_size, &mut rng_tr);
            if cfg.generator == synthgen::Generator::NonGaussian {
                synthgen::apply_distortions(&mut x, &labels, s_total, distortion_seed, None);
            }
            let resolved = spec.model.resolved(
                &cs,
                &x.view(),
                &labels,
                seed::derive(rep_seed, "outcome-extras", 0),
            )?;
            let y = synthgen::gen_outcome(
                &x.view(),
                &labels,
                &cs,
                &resolved,
                seed::derive(rep_seed, "train-outcome", 0),
            )?;
            let train = Dataset::new(x, y, Some(labels))?;

            // held-out studies keep their own perturbed coefficients
            let mut tests = Vec::with_capacity(n_test_studies);
            for t in 0..n_test_studies {
                let study = n_train_studies + t;
                let single = Mixture {
                    centroids: mix.centroids.slice(s![study..study + 1, ..]).to_owned(),
                    scales: vec![mix.scales[study].clone()],
                };
                let mut rng_te = seed::rng(seed::derive(rep_seed, "test-covariates", t as u64));
                let (mut txs, _) = synthgen::sample_mixture(&single, cfg.cluster_size, &mut rng_te);
                let tls = vec![study; txs.nrows()];
                if cfg.generator == synthgen::Generator::NonGaussian {
                    synthgen::apply_distortions(&mut txs, &tls, s_total, distortion_seed, None);
                }
                let tys = synthgen::gen_outcome(
                    &txs.view(),
                    &tls,
                    &cs,
                    &resolved,
                    seed::derive(rep_seed, "test-outcome", t as u64),
                )?;
                // single-study test set; labels must be dense, so relabel as 0
                tests.push(Dataset::new(txs, tys, Some(vec![0; tls.len()]))?);
            }
            rep_records(spec, r, rep_seed, &train, &tests)
        };
        run().map_err(|e| with_rep_context(e, r, rep_seed))
    })?;
    let records: Vec<RepRecord> = per_rep.into_iter().flatten().collect();
    let rows = summarize(spec, &records)?;
    Ok(ScenarioResult { rows, records })
}

// ---------------------------------------------------------------------------
// CSV / gnuplot emission
// ---------------------------------------------------------------------------

/// Long-format per-rep records: scenario, parameter, value, variant, rep,
/// rmse. Entries are (parameter, value, records) groups sharing one header.
pub fn write_records_csv<W: std::io::Write>(
    out: W,
    scenario: &str,
    entries: &[(String, String, Vec<RepRecord>)],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scenario", "parameter", "value", "variant", "rep", "rmse"])?;
    for (parameter, value, records) in entries {
        for r in records {
            let rep = r.rep.to_string();
            let rmse = r.rmse.to_string();
            w.write_record([scenario, parameter, value, r.variant.as_str(), &rep, &rmse])?;
        }
    }
    w.flush().map_err(|e| Error::io("<records csv>", e))
}

/// Wrap a single scenario result for the CSV writers (parameter "none").
pub fn single_entries(result: &ScenarioResult) -> Vec<(String, String, Vec<RepRecord>)> {
    vec![("none".into(), String::new(), result.records.clone())]
}

/// Single-result summary rows for `write_summary_csv`.
pub fn single_summary_entries(result: &ScenarioResult) -> Vec<(String, String, Vec<SummaryRow>)> {
    vec![("none".into(), String::new(), result.rows.clone())]
}

/// Sweep results as (parameter, value, records) entries for `write_records_csv`.
pub fn sweep_record_entries(points: &[SweepPoint]) -> Vec<(String, String, Vec<RepRecord>)> {
    points
        .iter()
        .map(|p| (p.parameter.to_string(), p.value.to_string(), p.result.records.clone()))
        .collect()
}

/// Per-variant summary rows with the same leading keys as the records file.
pub fn write_summary_csv<W: std::io::Write>(
    out: W,
    scenario: &str,
    entries: &[(String, String, Vec<SummaryRow>)],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "scenario",
        "parameter",
        "value",
        "variant",
        "mean_rmse",
        "se",
        "pct_change_vs_merged",
        "ci_low",
        "ci_high",
    ])?;
    for (parameter, value, rows) in entries {
        for r in rows {
            let cols = [
                r.mean_rmse.to_string(),
                r.se.to_string(),
                r.pct_change_vs_merged.to_string(),
                r.ci_low.to_string(),
                r.ci_high.to_string(),
            ];
            w.write_record(
                [scenario, parameter, value, r.variant.as_str()]
                    .into_iter()
                    .chain(cols.iter().map(String::as_str)),
            )?;
        }
    }
    w.flush().map_err(|e| Error::io("<summary csv>", e))
}

/// Sweep results as (parameter, value, rows) entries for `write_summary_csv`.
pub fn sweep_summary_entries(points: &[SweepPoint]) -> Vec<(String, String, Vec<SummaryRow>)> {
    points
        .iter()
        .map(|p| (p.parameter.to_string(), p.value.to_string(), p.result.rows.clone()))
        .collect()
}

/// Long-format stacking weights: one row per (variant, k, rep, rank), ranks
/// ordered by descending weight.
pub fn write_weights_csv<W: std::io::Write>(out: W, records: &[WeightRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["variant", "k", "rep", "rank", "weight"])?;
    for r in records {
        for (rank, wt) in r.weights.iter().enumerate() {
            let cols =
                [r.k.to_string(), r.rep.to_string(), rank.to_string(), wt.to_string()];
            w.write_record(
                std::iter::once(r.variant.as_str()).chain(cols.iter().map(String::as_str)),
            )?;
        }
    }
    w.flush().map_err(|e| Error::io("<weights csv>", e))
}

/// Range-diagnostic summary rows.
pub fn write_range_csv<W: std::io::Write>(out: W, rows: &[RangeSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["variant", "mean", "se", "ci_low", "ci_high"])?;
    for r in rows {
        let cols = [
            r.mean.to_string(),
            r.se.to_string(),
            r.ci_low.to_string(),
            r.ci_high.to_string(),
        ];
        w.write_record(
            std::iter::once(r.variant.as_str()).chain(cols.iter().map(String::as_str)),
        )?;
    }
    w.flush().map_err(|e| Error::io("<range csv>", e))
}

/// Bias-variance cells.
pub fn write_bv_csv<W: std::io::Write>(out: W, cells: &[BvCell]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["variant", "bias2", "variance", "mse"])?;
    for c in cells {
        let cols = [c.bias2.to_string(), c.variance.to_string(), c.mse.to_string()];
        w.write_record(
            std::iter::once(c.variant.as_str()).chain(cols.iter().map(String::as_str)),
        )?;
    }
    w.flush().map_err(|e| Error::io("<bias-variance csv>", e))
}

/// Gnuplot-compatible data: one indexed block per variant, each line holding
/// `value mean ci_low ci_high`.
pub fn write_gnuplot_dat<W: std::io::Write>(mut out: W, points: &[SweepPoint]) -> Result<()> {
    let io_err = |e| Error::io("<gnuplot dat>", e);
    if points.is_empty() {
        return Ok(());
    }
    let n_variants = points[0].result.rows.len();
    for v in 0..n_variants {
        writeln!(out, "# variant: {}", points[0].result.rows[v].variant).map_err(io_err)?;
        for p in points {
            let row = &p.result.rows[v];
            writeln!(out, "{} {} {} {}", p.value, row.mean_rmse, row.ci_low, row.ci_high)
                .map_err(io_err)?;
        }
        if v + 1 < n_variants {
            writeln!(out).map_err(io_err)?;
            writeln!(out).map_err(io_err)?;
        }
    }
    out.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthgen::Generator;

    fn tiny_spec(variants: Vec<VariantSpec>) -> ScenarioSpec {
        ScenarioSpec {
            name: "tiny".into(),
            gen: GenConfig {
                n_true_clusters: 2,
                cluster_size: 30,
                p: 4,
                n_active: 3,
                generator: Generator::Gaussian,
                separation: 0.8,
                n_test_sets: 2,
                test_clusters: 1,
                ..GenConfig::default()
            },
            model: OutcomeModel::linear(),
            forest: ForestParams { n_trees: 10, ..ForestParams::default() },
            variants,
            n_reps: 2,
            seed: 11,
        }
    }

    fn v(kind: VariantKind, k: usize, scheme: WeightScheme) -> VariantSpec {
        VariantSpec::new(kind, KChoice::K(k), scheme)
    }

    #[test]
    fn summary_math_by_hand() {
        let spec = tiny_spec(vec![
            v(VariantKind::Cluster, 2, WeightScheme::SimpleAverage),
            v(VariantKind::Merged, 2, WeightScheme::SimpleAverage),
        ]);
        let rec = |i: usize, rep: usize, rmse: f64| RepRecord {
            variant: spec.variants[i].id(),
            variant_index: i,
            rep,
            rmse,
            k: 2,
            total_trees: 20,
            weights: vec![0.5, 0.5],
            silhouette: None,
            repaired: 0,
        };
        let records =
            vec![rec(0, 0, 1.0), rec(1, 0, 2.0), rec(0, 1, 3.0), rec(1, 1, 2.0)];
        let rows = summarize(&spec, &records).unwrap();
        assert_eq!(rows[0].mean_rmse, 2.0);
        // sd = sqrt(((1-2)^2 + (3-2)^2) / 1) = sqrt(2); se = sqrt(2)/sqrt(2) = 1
        assert!((rows[0].se - 1.0).abs() < 1e-12);
        assert_eq!(rows[0].ci_low, 2.0 - 1.96);
        assert_eq!(rows[0].ci_high, 2.0 + 1.96);
        assert_eq!(rows[0].pct_change_vs_merged, 0.0);
        assert_eq!(rows[1].pct_change_vs_merged, 0.0);
        assert_eq!(rows[1].se, 0.0);
    }

    #[test]
    fn merged_vs_merged_pct_zero_and_record_counts() {
        let spec = tiny_spec(vec![
            v(VariantKind::Merged, 2, WeightScheme::SimpleAverage),
            v(VariantKind::Merged, 2, WeightScheme::SimpleAverage),
        ]);
        let res = run_scenario(&spec).unwrap();
        assert_eq!(res.records.len(), 4); // 2 reps x 2 variants
        // the first merged entry is the baseline: exact zero, not just small
        assert_eq!(res.rows[0].pct_change_vs_merged, 0.0);
        for row in &res.rows {
            assert!(row.pct_change_vs_merged.is_finite());
            assert!(row.ci_low <= row.mean_rmse && row.mean_rmse <= row.ci_high);
        }
        // same data and budget; only the per-variant fit seeds differ
        assert_eq!(res.records[0].total_trees, res.records[1].total_trees);
    }

    #[test]
    fn scenario_reruns_bit_identical_and_parity_holds() {
        let spec = tiny_spec(vec![
            v(VariantKind::Cluster, 2, WeightScheme::SimpleAverage),
            v(VariantKind::Multi, 2, WeightScheme::SimpleAverage),
            v(VariantKind::Merged, 2, WeightScheme::SimpleAverage),
        ]);
        let a = run_scenario(&spec).unwrap();
        let b = run_scenario(&spec).unwrap();
        assert_eq!(a, b);
        let budget = a.records[0].total_trees;
        assert_eq!(budget, 20); // k=2 x 10 trees
        assert!(a.records.iter().all(|r| r.total_trees == budget));
        for row in &a.rows {
            assert!(row.ci_low <= row.mean_rmse && row.mean_rmse <= row.ci_high);
            assert!((row.ci_high - row.mean_rmse - CI_Z * row.se).abs() < 1e-12);
        }
    }

    #[test]
    fn apply_parameter_rules() {
        let spec = tiny_spec(vec![
            v(VariantKind::Cluster, 2, WeightScheme::SimpleAverage),
            v(VariantKind::Multi, 2, WeightScheme::SimpleAverage),
            v(VariantKind::Merged, 2, WeightScheme::SimpleAverage),
        ]);
        let s = apply_parameter(&spec, SweepParameter::K, 7.0).unwrap();
        assert_eq!(s.variants[0].k, KChoice::K(7)); // cluster follows
        assert_eq!(s.variants[1].k, KChoice::K(2)); // multi pinned to labels
        assert_eq!(s.variants[2].k, KChoice::K(2)); // merged follows the budget
        let s = apply_parameter(&spec, SweepParameter::NTrueClusters, 3.0).unwrap();
        assert_eq!(s.gen.n_true_clusters, 3);
        assert_eq!(s.gen.cluster_size, 20); // 60 total held fixed
        let s = apply_parameter(&spec, SweepParameter::ClusterSize, 50.0).unwrap();
        assert_eq!(s.gen.cluster_size, 50);
        let s = apply_parameter(&spec, SweepParameter::CoefNormScale, 2.5).unwrap();
        assert_eq!(s.model.coef_norm_scale, 2.5);
        assert!(apply_parameter(&spec, SweepParameter::K, 2.5).is_err());
        assert!(apply_parameter(&spec, SweepParameter::CoefNormScale, 0.0).is_err());
        assert!(apply_parameter(&spec, SweepParameter::ClusterSize, 1.0).is_err());
    }

    #[test]
    fn sweep_runs_each_value() {
        let spec = tiny_spec(vec![
            v(VariantKind::Cluster, 2, WeightScheme::SimpleAverage),
            v(VariantKind::Merged, 2, WeightScheme::SimpleAverage),
        ]);
        let points = sweep(&spec, SweepParameter::K, &[2.0, 3.0]).unwrap();
        assert_eq!(points.len(), 2);
        assert_eq!(points[0].result.records[0].k, 2);
        assert_eq!(points[1].result.records[0].k, 3);
        // budget follows the sweep value
        assert_eq!(points[0].result.records[0].total_trees, 20);
        assert_eq!(points[1].result.records[0].total_trees, 30);
        assert!(sweep(&spec, SweepParameter::K, &[]).is_err());
    }

    #[test]
    fn spearman_hand_values() {
        assert!((spearman_rho(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]) - 1.0).abs() < 1e-12);
        assert!((spearman_rho(&[1.0, 2.0, 3.0], &[5.0, 1.0, 0.0]) + 1.0).abs() < 1e-12);
        // ties: ranks of (1, 1, 2) are (1.5, 1.5, 3)
        let rho = spearman_rho(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0]);
        // hand: rx = (1.5, 1.5, 3), ry = (1, 2, 3) -> rho = 0.5 * 3 / sqrt(1.5 * 2) / ... compute directly
        let rx = [1.5, 1.5, 3.0];
        let ry = [1.0, 2.0, 3.0];
        let mx = 2.0;
        let my = 2.0;
        let num: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
        let dx: f64 = rx.iter().map(|a| (a - mx) * (a - mx)).sum();
        let dy: f64 = ry.iter().map(|b| (b - my) * (b - my)).sum();
        assert!((rho - num / (dx * dy).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn weight_study_single_partition_max_is_only_weight() {
        let mut spec = tiny_spec(vec![VariantSpec::new(
            VariantKind::Multi,
            KChoice::K(1),
            WeightScheme::StackRidge,
        )]);
        spec.gen.n_true_clusters = 1;
        spec.gen.cluster_size = 40;
        let recs = weight_distribution_experiment(&spec, &[1]).unwrap();
        assert_eq!(recs.len(), 2); // 2 reps x 1 variant
        for r in &recs {
            assert_eq!(r.weights.len(), 1);
            assert_eq!(r.max_weight, r.weights[0]);
        }
    }

    #[test]
    fn weight_study_rejects_unstacked_or_merged() {
        let spec = tiny_spec(vec![v(VariantKind::Cluster, 2, WeightScheme::SimpleAverage)]);
        assert!(weight_distribution_experiment(&spec, &[2]).is_err());
        let spec = tiny_spec(vec![v(VariantKind::Merged, 2, WeightScheme::StackRidge)]);
        assert!(weight_distribution_experiment(&spec, &[2]).is_err());
    }

    #[test]
    fn range_diagnostic_coincides_at_k1_and_orders_at_k2() {
        let spec = tiny_spec(vec![v(VariantKind::Merged, 2, WeightScheme::SimpleAverage)]);
        let rows = range_diagnostic(&spec, KChoice::K(1)).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].per_rep, rows[1].per_rep);
        assert_eq!(rows[1].per_rep, rows[2].per_rep);
        // with two well-separated blobs, k-means partitions have smaller
        // within-partition ranges than random splits of the same data
        let rows = range_diagnostic(&spec, KChoice::K(2)).unwrap();
        assert!(rows[0].mean < rows[1].mean);
        for r in &rows {
            assert!(r.ci_low <= r.mean && r.mean <= r.ci_high);
        }
    }

    #[test]
    fn decompose_oracle_and_constant_predictors() {
        let truth = vec![1.0, -2.0, 0.5];
        // oracle predictor: zero bias, zero variance
        let (b, v, m) = decompose(&[truth.clone(), truth.clone()], &truth).unwrap();
        assert_eq!((b, v, m), (0.0, 0.0, 0.0));
        // constant-zero predictor: zero variance, bias^2 = mean of truth^2
        let zeros = vec![0.0; 3];
        let (b, v, m) = decompose(&[zeros.clone(), zeros.clone()], &truth).unwrap();
        assert_eq!(v, 0.0);
        let expect = (1.0 + 4.0 + 0.25) / 3.0;
        assert!((b - expect).abs() < 1e-12);
        assert_eq!(m, b);
        // identity: bias2 + var = mse within fp tolerance on a mixed case
        let (b, v, m) =
            decompose(&[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]], &truth).unwrap();
        assert!((b + v - m).abs() < 1e-8);
        assert!(b >= 0.0 && v >= 0.0);
        assert!(decompose(&[truth.clone()], &truth).is_err());
    }

    #[test]
    fn bias_variance_runs_and_sums() {
        let spec = tiny_spec(vec![
            v(VariantKind::Multi, 2, WeightScheme::SimpleAverage),
            v(VariantKind::Merged, 2, WeightScheme::SimpleAverage),
        ]);
        let cells = bias_variance_decomposition(&spec, 3, 10).unwrap();
        assert_eq!(cells.len(), 2);
        for c in &cells {
            assert!(c.bias2 >= 0.0 && c.variance >= 0.0);
            assert!((c.bias2 + c.variance - c.mse).abs() < 1e-8);
            assert!(c.mse > 0.0);
        }
        assert!(bias_variance_decomposition(&spec, 1, 10).is_err());
        let bad = tiny_spec(vec![v(VariantKind::Cluster, 2, WeightScheme::SimpleAverage)]);
        assert!(bias_variance_decomposition(&bad, 3, 10).is_err());
    }

    #[test]
    fn multistudy_smoke_and_determinism() {
        let mut spec = tiny_spec(vec![
            v(VariantKind::Cluster, 2, WeightScheme::SimpleAverage),
            v(VariantKind::Multi, 2, WeightScheme::SimpleAverage),
            v(VariantKind::Merged, 2, WeightScheme::SimpleAverage),
        ]);
        spec.model = OutcomeModel::new(OutcomeKind::MultistudyNonlinear);
        let a = multistudy_experiment(2, 1, &spec).unwrap();
        let b = multistudy_experiment(2, 1, &spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.records.len(), 6); // 2 reps x 3 variants
        // multi trained one forest per training study
        let multi = a.records.iter().find(|r| r.variant.starts_with("multi")).unwrap();
        assert_eq!(multi.k, 2);
        let budget = a.records[0].total_trees;
        assert!(a.records.iter().all(|r| r.total_trees == budget));
        // linear outcome is rejected
        let bad = tiny_spec(vec![v(VariantKind::Merged, 2, WeightScheme::SimpleAverage)]);
        assert!(multistudy_experiment(2, 1, &bad).is_err());
    }

    #[test]
    fn cluster_fit_on_its_own_assignment_reduces_to_multi() {
        // Partitions forced to the cluster labels reproduce the cluster fit
        // exactly when k-means recovers them as-is (same seed, same order).
        let mut spec = tiny_spec(vec![v(VariantKind::Cluster, 2, WeightScheme::SimpleAverage)]);
        spec.gen.separation = 1.0;
        let cfg = GenConfig { seed: 99, ..spec.gen.clone() };
        let split = synthgen::gen_scenario(&cfg, &spec.model).unwrap();
        let d = split.train;
        let m = ensemble::fit(
            &d,
            VariantKind::Cluster,
            KChoice::K(2),
            &spec.forest,
            WeightScheme::SimpleAverage,
            123,
        )
        .unwrap();
        let centroids = match &m.partition_source {
            ensemble::PartitionSource::KMeans { centroids } => centroids.clone(),
            other => panic!("unexpected source {other:?}"),
        };
        assert_eq!(m.repaired_partitions, 0);
        let labels = kmeans::assign_to_centroids(&centroids.view(), &d.features().view()).unwrap();
        let forced =
            Dataset::new(d.features().clone(), d.outcome().to_vec(), Some(labels)).unwrap();
        let mm = ensemble::fit(
            &forced,
            VariantKind::Multi,
            KChoice::K(2),
            &spec.forest,
            WeightScheme::SimpleAverage,
            123,
        )
        .unwrap();
        assert_eq!(m.forests, mm.forests);
        assert_eq!(m.weights.w, mm.weights.w);
        let probe = split.tests[0].features();
        assert_eq!(
            ensemble::predict(&m, &probe.view()).unwrap(),
            ensemble::predict(&mm, &probe.view()).unwrap()
        );
    }

    #[test]
    fn csv_and_gnuplot_emission() {
        let spec = tiny_spec(vec![
            v(VariantKind::Cluster, 2, WeightScheme::SimpleAverage),
            v(VariantKind::Merged, 2, WeightScheme::SimpleAverage),
        ]);
        let points = sweep(&spec, SweepParameter::K, &[2.0, 3.0]).unwrap();

        let entries = sweep_record_entries(&points);
        let mut records_a = Vec::new();
        write_records_csv(&mut records_a, "tiny", &entries).unwrap();
        let text = String::from_utf8(records_a.clone()).unwrap();
        assert!(text.starts_with("scenario,parameter,value,variant,rep,rmse\n"));
        let n_recs: usize = entries.iter().map(|(_, _, r)| r.len()).sum();
        assert_eq!(text.lines().count(), 1 + n_recs);
        assert!(text.contains("tiny,k,2,"));
        assert!(text.contains("tiny,k,3,"));
        let mut records_b = Vec::new();
        write_records_csv(&mut records_b, "tiny", &entries).unwrap();
        assert_eq!(records_a, records_b);

        let mut summary = Vec::new();
        write_summary_csv(&mut summary, "tiny", &sweep_summary_entries(&points)).unwrap();
        let text = String::from_utf8(summary).unwrap();
        assert_eq!(text.lines().count(), 1 + 2 * 2); // header + 2 values x 2 variants
        assert!(text.contains("cluster:simple_average"));

        let mut dat = Vec::new();
        write_gnuplot_dat(&mut dat, &points).unwrap();
        let text = String::from_utf8(dat).unwrap();
        assert!(text.starts_with("# variant: cluster:simple_average\n"));
        assert!(text.contains("\n\n\n# variant: merged:simple_average\n"));
    }
}
