//! Synthetic clustered data: Gaussian and distorted (non-Gaussian) mixture
//! covariates, sparse linear coefficients with per-cluster perturbation, and
//! the outcome models used throughout the experiments.

use ndarray::{Array1, Array2, ArrayView2};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::dataset::{Dataset, TrainTestSplit};
use crate::error::{Error, Result};
use crate::seed;

pub const DEFAULT_MAX_PERTURB: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Gaussian,
    NonGaussian,
}

impl std::fmt::Display for Generator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Generator::Gaussian => "gaussian",
            Generator::NonGaussian => "nongaussian",
        })
    }
}

impl std::str::FromStr for Generator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Generator::Gaussian),
            "nongaussian" => Ok(Generator::NonGaussian),
            other => Err(Error::invalid(format!(
                "unknown generator {other:?} (expected gaussian or nongaussian)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub n_true_clusters: usize,
    pub cluster_size: usize,
    pub p: usize,
    pub n_active: usize,
    pub generator: Generator,
    /// Between-cluster separation on a [0, 1] scale; 1 maps to a minimum
    /// centroid spacing of 6 average marginal standard deviations.
    pub separation: f64,
    pub n_test_sets: usize,
    pub test_clusters: usize,
    /// Half-width of the per-cluster coefficient perturbation interval.
    pub max_perturb: f64,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n_true_clusters: 5,
            cluster_size: 500,
            p: 20,
            n_active: 10,
            generator: Generator::Gaussian,
            separation: 0.5,
            n_test_sets: 5,
            test_clusters: 2,
            max_perturb: DEFAULT_MAX_PERTURB,
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_true_clusters < 1 {
            return Err(Error::invalid("n_true_clusters must be >= 1"));
        }
        if self.cluster_size < 2 {
            return Err(Error::invalid("cluster_size must be >= 2"));
        }
        if self.p < 1 {
            return Err(Error::invalid("p must be >= 1"));
        }
        if self.n_active > self.p {
            return Err(Error::invalid(format!(
                "n_active ({}) cannot exceed p ({})",
                self.n_active, self.p
            )));
        }
        if !(0.0..=1.0).contains(&self.separation) {
            return Err(Error::invalid("separation must lie in [0, 1]"));
        }
        if self.n_test_sets > 0 && self.test_clusters < 1 {
            return Err(Error::invalid("test_clusters must be >= 1"));
        }
        if self.max_perturb < 0.0 {
            return Err(Error::invalid("max_perturb must be >= 0"));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Mixture machinery

/// Haar-distributed rotation: modified Gram-Schmidt of a standard normal
/// matrix (R's diagonal positive by construction).
fn random_rotation(p: usize, rng: &mut impl Rng) -> Array2<f64> {
    let a = Array2::from_shape_fn((p, p), |_| rng.sample::<f64, _>(StandardNormal));
    let mut q = Array2::<f64>::zeros((p, p));
    for j in 0..p {
        let mut v: Array1<f64> = a.column(j).to_owned();
        for i in 0..j {
            let proj = q.column(i).dot(&v);
            let qi = q.column(i).to_owned();
            v -= &(proj * &qi);
        }
        let norm = v.dot(&v).sqrt();
        q.column_mut(j).assign(&(v / norm));
    }
    q
}

#[derive(Clone)]
pub(crate) struct Mixture {
    pub(crate) centroids: Array2<f64>,
    /// Per-cluster scale A with AA' = Sigma; points are mu + A z.
    pub(crate) scales: Vec<Array2<f64>>,
}

/// Draw centroids and SPD covariance factors so the minimum pairwise centroid
/// distance equals 6 * separation * (average marginal sd).
pub(crate) fn draw_mixture(c: usize, p: usize, separation: f64, rng: &mut impl Rng) -> Mixture {
    let mut scales = Vec::with_capacity(c);
    let mut sd_sum = 0.0;
    for _ in 0..c {
        let lam: Vec<f64> = (0..p).map(|_| rng.gen_range(0.5..2.0)).collect();
        let q = random_rotation(p, rng);
        let mut a = q;
        for j in 0..p {
            let s = lam[j].sqrt();
            a.column_mut(j).mapv_inplace(|v| v * s);
        }
        for i in 0..p {
            sd_sum += a.row(i).dot(&a.row(i)).sqrt(); // marginal sd of coord i
        }
        scales.push(a);
    }
    let avg_sd = sd_sum / (c * p) as f64;
    let target = 6.0 * separation * avg_sd;

    if c == 1 {
        return Mixture { centroids: Array2::zeros((1, p)), scales };
    }

    // Sequential rejection sampling in a hypercube, widening on failure, then
    // rescale so the minimum pairwise distance lands exactly on target.
    let mut l = target.max(1.0) * (c as f64).powf(1.0 / p as f64).max(1.0);
    let mut pts: Vec<Array1<f64>> = Vec::with_capacity(c);
    'outer: loop {
        pts.clear();
        for _ in 0..c {
            let mut placed = false;
            for _ in 0..1000 {
                let cand = Array1::from_shape_fn(p, |_| rng.gen_range(-l..l));
                let ok = pts.iter().all(|q| {
                    let d = (&cand - q).mapv(|v| v * v).sum().sqrt();
                    d >= target
                });
                if ok {
                    pts.push(cand);
                    placed = true;
                    break;
                }
            }
            if !placed {
                l *= 1.5;
                continue 'outer;
            }
        }
        break;
    }
    let mut centroids = Array2::zeros((c, p));
    for (i, pt) in pts.iter().enumerate() {
        centroids.row_mut(i).assign(pt);
    }
    let mut dmin = f64::INFINITY;
    for i in 0..c {
        for j in i + 1..c {
            let d = (&centroids.row(i) - &centroids.row(j))
                .mapv(|v| v * v)
                .sum()
                .sqrt();
            dmin = dmin.min(d);
        }
    }
    if dmin > 0.0 && target > 0.0 {
        centroids *= target / dmin;
    } else {
        centroids *= 0.0;
    }
    Mixture { centroids, scales }
}

pub(crate) fn sample_mixture(
    mix: &Mixture,
    n_per: usize,
    rng: &mut impl Rng,
) -> (Array2<f64>, Vec<usize>) {
    let (c, p) = mix.centroids.dim();
    let mut x = Array2::zeros((c * n_per, p));
    let mut labels = Vec::with_capacity(c * n_per);
    for cl in 0..c {
        let z = Array2::from_shape_fn((n_per, p), |_| rng.sample::<f64, _>(StandardNormal));
        let block = z.dot(&mix.scales[cl].t());
        for i in 0..n_per {
            let row = &block.row(i) + &mix.centroids.row(cl);
            x.row_mut(cl * n_per + i).assign(&row);
            labels.push(cl);
        }
    }
    (x, labels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Distortion {
    Identity,
    Sinh,
    CubeRoot,
    ExpTilt,
}

const DISTORTIONS: [Distortion; 4] =
    [Distortion::Identity, Distortion::Sinh, Distortion::CubeRoot, Distortion::ExpTilt];

/// Per-cluster, per-coordinate monotone distortions; each distorted
/// coordinate is rescaled back to its pre-distortion sample mean and sd.
pub(crate) fn apply_distortions(
    x: &mut Array2<f64>,
    labels: &[usize],
    n_clusters: usize,
    seed_val: u64,
    force: Option<Distortion>,
) {
    let p = x.ncols();
    let mut rng = seed::rng(seed_val);
    for c in 0..n_clusters {
        let rows: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == c)
            .map(|(i, _)| i)
            .collect();
        for m in 0..p {
            let kind = force.unwrap_or_else(|| DISTORTIONS[rng.gen_range(0..DISTORTIONS.len())]);
            if kind == Distortion::Identity || rows.is_empty() {
                continue;
            }
            let v: Vec<f64> = rows.iter().map(|&i| x[[i, m]]).collect();
            let n = v.len() as f64;
            let mu = v.iter().sum::<f64>() / n;
            let sd = (v.iter().map(|a| (a - mu) * (a - mu)).sum::<f64>() / n).sqrt();
            if sd == 0.0 {
                continue;
            }
            let u: Vec<f64> = v
                .iter()
                .map(|a| {
                    let z = (a - mu) / sd;
                    match kind {
                        Distortion::Identity => z,
                        Distortion::Sinh => z.sinh(),
                        Distortion::CubeRoot => z.signum() * z.abs().powf(1.0 / 3.0),
                        Distortion::ExpTilt => (0.5 * z).exp(),
                    }
                })
                .collect();
            let umu = u.iter().sum::<f64>() / n;
            let usd = (u.iter().map(|a| (a - umu) * (a - umu)).sum::<f64>() / n).sqrt();
            if usd == 0.0 {
                continue;
            }
            for (&i, &ui) in rows.iter().zip(&u) {
                x[[i, m]] = mu + sd * (ui - umu) / usd;
            }
        }
    }
}

fn gen_features(
    c: usize,
    n_per: usize,
    p: usize,
    separation: f64,
    seed_val: u64,
) -> (Array2<f64>, Vec<usize>) {
    let mut rng = seed::rng(seed_val);
    let mix = draw_mixture(c, p, separation, &mut rng);
    sample_mixture(&mix, n_per, &mut rng)
}

/// Gaussian mixture covariates with recorded true labels (outcome zeroed
/// until `gen_outcome` fills it).
pub fn gen_gaussian_clusters(cfg: &GenConfig) -> Result<Dataset> {
    cfg.validate()?;
    let (x, labels) = gen_features(
        cfg.n_true_clusters,
        cfg.cluster_size,
        cfg.p,
        cfg.separation,
        seed::derive(cfg.seed, "covariates", 0),
    );
    let n = x.nrows();
    Dataset::new(x, vec![0.0; n], Some(labels))
}

/// Gaussian clusters pushed through per-cluster monotone distortions.
pub fn gen_nongaussian_clusters(cfg: &GenConfig) -> Result<Dataset> {
    let d = gen_gaussian_clusters(cfg)?;
    let labels = d.true_labels().unwrap().to_vec();
    let mut x = d.features().clone();
    apply_distortions(
        &mut x,
        &labels,
        cfg.n_true_clusters,
        seed::derive(cfg.seed, "distortions", 0),
        None,
    );
    let n = x.nrows();
    Dataset::new(x, vec![0.0; n], Some(labels))
}

// ---------------------------------------------------------------------------
// Coefficients

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    /// Length-p, exactly n_active nonzero entries with |beta| in [0.5, 5].
    pub base: Vec<f64>,
    /// C x p per-cluster perturbed coefficients (0 x p until perturbed).
    pub per_cluster: Array2<f64>,
}

impl CoefficientSet {
    pub fn active_indices(&self) -> Vec<usize> {
        self.base
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Unperturbed coefficients tiled to `c` rows (test-set outcome rule).
    pub fn tiled(&self, c: usize) -> CoefficientSet {
        let p = self.base.len();
        let per_cluster = Array2::from_shape_fn((c, p), |(_, m)| self.base[m]);
        CoefficientSet { base: self.base.clone(), per_cluster }
    }
}

/// Sparse coefficients: n_active indices chosen without replacement, each
/// coefficient a random sign times U[0.5, 5].
pub fn draw_coefficients(p: usize, n_active: usize, seed_val: u64) -> Result<CoefficientSet> {
    if n_active > p {
        return Err(Error::invalid(format!("n_active ({n_active}) cannot exceed p ({p})")));
    }
    let mut rng = seed::rng(seed_val);
    let idx = rand::seq::index::sample(&mut rng, p, n_active);
    let mut base = vec![0.0; p];
    for i in idx {
        let mag = rng.gen_range(0.5..5.0);
        let sign = if rng.gen::<f64>() < 0.5 { -1.0 } else { 1.0 };
        base[i] = sign * mag;
    }
    Ok(CoefficientSet { base, per_cluster: Array2::zeros((0, p)) })
}

/// Per-cluster coefficients: base plus a random sign times U[0, max_perturb]
/// on each active entry; inactive entries stay exactly zero.
pub fn perturb_coefficients(
    cs: &CoefficientSet,
    c: usize,
    max_perturb: f64,
    seed_val: u64,
) -> Result<CoefficientSet> {
    if max_perturb < 0.0 {
        return Err(Error::invalid("max_perturb must be >= 0"));
    }
    let p = cs.base.len();
    let mut rng = seed::rng(seed_val);
    let mut per_cluster = Array2::zeros((c, p));
    for cl in 0..c {
        for m in 0..p {
            if cs.base[m] == 0.0 {
                continue;
            }
            let delta = rng.gen_range(0.0..=max_perturb);
            let sign = if rng.gen::<f64>() < 0.5 { -1.0 } else { 1.0 };
            per_cluster[[cl, m]] = cs.base[m] + sign * delta;
        }
    }
    Ok(CoefficientSet { base: cs.base.clone(), per_cluster })
}

// ---------------------------------------------------------------------------
// Outcomes

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeKind {
    Linear,
    BinaryStep,
    Quadratic,
    Interaction,
    MultistudyNonlinear,
}

impl std::fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OutcomeKind::Linear => "linear",
            OutcomeKind::BinaryStep => "binary_step",
            OutcomeKind::Quadratic => "quadratic",
            OutcomeKind::Interaction => "interaction",
            OutcomeKind::MultistudyNonlinear => "multistudy_nonlinear",
        })
    }
}

impl std::str::FromStr for OutcomeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(OutcomeKind::Linear),
            "binary_step" => Ok(OutcomeKind::BinaryStep),
            "quadratic" => Ok(OutcomeKind::Quadratic),
            "interaction" => Ok(OutcomeKind::Interaction),
            "multistudy_nonlinear" => Ok(OutcomeKind::MultistudyNonlinear),
            other => Err(Error::invalid(format!("unknown outcome kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeModel {
    pub kind: OutcomeKind,
    pub noise_sd: f64,
    /// Binary-step cutoff; `None` resolves to the median noiseless training
    /// score inside `gen_scenario`.
    pub step_cutoff: Option<f64>,
    /// Covariate indices receiving squared terms (quadratic kind), with their
    /// coefficients once resolved.
    pub quadratic_indices: Vec<usize>,
    pub quadratic_coefs: Vec<f64>,
    /// Covariate index pairs receiving product terms (interaction kind).
    pub interaction_pairs: Vec<(usize, usize)>,
    pub interaction_coefs: Vec<f64>,
    /// Multiplies every active coefficient (signal-strength sweeps).
    pub coef_norm_scale: f64,
}

impl OutcomeModel {
    pub fn new(kind: OutcomeKind) -> Self {
        OutcomeModel {
            kind,
            noise_sd: 1.0,
            step_cutoff: None,
            quadratic_indices: vec![],
            quadratic_coefs: vec![],
            interaction_pairs: vec![],
            interaction_coefs: vec![],
            coef_norm_scale: 1.0,
        }
    }

    pub fn linear() -> Self {
        Self::new(OutcomeKind::Linear)
    }

    pub fn validate(&self) -> Result<()> {
        if self.noise_sd < 0.0 {
            return Err(Error::invalid("noise_sd must be >= 0"));
        }
        if self.coef_norm_scale <= 0.0 {
            return Err(Error::invalid("coef_norm_scale must be > 0"));
        }
        Ok(())
    }

    /// Fill in scenario-level pieces so train and test share one outcome
    /// rule: extra-term coefficients (same sign * U[0.5, 5] law) and, for the
    /// binary step, the median noiseless training score as the cutoff.
    pub(crate) fn resolved(
        &self,
        cs: &CoefficientSet,
        train_x: &ArrayView2<f64>,
        train_labels: &[usize],
        seed_val: u64,
    ) -> Result<OutcomeModel> {
        self.validate()?;
        let mut model = self.clone();
        let mut rng = seed::rng(seed_val);
        let active = cs.active_indices();
        let draw_coef = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mag = rng.gen_range(0.5..5.0);
            if rng.gen::<f64>() < 0.5 {
                -mag
            } else {
                mag
            }
        };
        match self.kind {
            OutcomeKind::Quadratic => {
                if model.quadratic_indices.is_empty() {
                    if active.len() < 2 {
                        return Err(Error::invalid(
                            "quadratic outcome needs at least two active covariates",
                        ));
                    }
                    model.quadratic_indices = active[..2].to_vec();
                }
                if model.quadratic_coefs.is_empty() {
                    model.quadratic_coefs =
                        model.quadratic_indices.iter().map(|_| draw_coef(&mut rng)).collect();
                }
            }
            OutcomeKind::Interaction => {
                if model.interaction_pairs.is_empty() {
                    if active.len() < 2 {
                        return Err(Error::invalid(
                            "interaction outcome needs at least two active covariates",
                        ));
                    }
                    model.interaction_pairs = vec![(active[0], active[1])];
                }
                if model.interaction_coefs.is_empty() {
                    model.interaction_coefs =
                        model.interaction_pairs.iter().map(|_| draw_coef(&mut rng)).collect();
                }
            }
            OutcomeKind::BinaryStep => {
                if model.step_cutoff.is_none() {
                    let mut scores =
                        linear_scores(train_x, train_labels, cs, self.coef_norm_scale)?;
                    scores.sort_by(f64::total_cmp);
                    let n = scores.len();
                    let med = if n % 2 == 1 {
                        scores[n / 2]
                    } else {
                        0.5 * (scores[n / 2 - 1] + scores[n / 2])
                    };
                    model.step_cutoff = Some(med);
                }
            }
            OutcomeKind::Linear | OutcomeKind::MultistudyNonlinear => {}
        }
        Ok(model)
    }
}

fn linear_scores(
    x: &ArrayView2<f64>,
    labels: &[usize],
    cs: &CoefficientSet,
    scale: f64,
) -> Result<Vec<f64>> {
    let c_rows = cs.per_cluster.nrows();
    let mut out = Vec::with_capacity(x.nrows());
    for (i, row) in x.rows().into_iter().enumerate() {
        let l = labels[i];
        if l >= c_rows {
            return Err(Error::invalid(format!(
                "label {l} has no coefficient row (only {c_rows} available)"
            )));
        }
        out.push(scale * row.dot(&cs.per_cluster.row(l)));
    }
    Ok(out)
}

/// Outcomes under `model`: the per-cluster linear score plus the kind's extra
/// terms, with N(0, noise_sd^2) noise (binary step is noiseless by
/// definition).
pub fn gen_outcome(
    features: &ArrayView2<f64>,
    true_labels: &[usize],
    cs: &CoefficientSet,
    model: &OutcomeModel,
    seed_val: u64,
) -> Result<Vec<f64>> {
    model.validate()?;
    if true_labels.len() != features.nrows() {
        return Err(Error::invalid("labels length must match feature rows"));
    }
    for &idx in model
        .quadratic_indices
        .iter()
        .chain(model.interaction_pairs.iter().flat_map(|(a, b)| [a, b]))
    {
        if idx >= cs.base.len() || cs.base[idx] == 0.0 {
            return Err(Error::invalid(format!(
                "outcome model references covariate {idx}, which is not active"
            )));
        }
    }
    let scale = model.coef_norm_scale;
    let mut score = linear_scores(features, true_labels, cs, scale)?;
    match model.kind {
        OutcomeKind::Linear => {}
        OutcomeKind::Quadratic => {
            if model.quadratic_coefs.len() != model.quadratic_indices.len() {
                return Err(Error::invalid(
                    "quadratic_coefs must match quadratic_indices (unresolved model?)",
                ));
            }
            for (&j, &qc) in model.quadratic_indices.iter().zip(&model.quadratic_coefs) {
                for (i, s) in score.iter_mut().enumerate() {
                    let v = features[[i, j]];
                    *s += scale * qc * v * v;
                }
            }
        }
        OutcomeKind::Interaction => {
            if model.interaction_coefs.len() != model.interaction_pairs.len() {
                return Err(Error::invalid(
                    "interaction_coefs must match interaction_pairs (unresolved model?)",
                ));
            }
            for (&(a, b), &ic) in model.interaction_pairs.iter().zip(&model.interaction_coefs) {
                for (i, s) in score.iter_mut().enumerate() {
                    *s += scale * ic * features[[i, a]] * features[[i, b]];
                }
            }
        }
        OutcomeKind::MultistudyNonlinear => {
            if features.ncols() < 2 {
                return Err(Error::invalid("multistudy_nonlinear needs at least 2 covariates"));
            }
            for (i, s) in score.iter_mut().enumerate() {
                let x1 = features[[i, 0]];
                let x2 = features[[i, 1]];
                *s += 4.4 * x1 - 1.8 * x2 + 10.0 * (10.0 * std::f64::consts::PI * x1).sin();
            }
        }
        OutcomeKind::BinaryStep => {
            let cutoff = model
                .step_cutoff
                .ok_or_else(|| Error::invalid("binary_step needs a resolved step_cutoff"))?;
            return Ok(score
                .into_iter()
                .map(|s| if s > cutoff { 1.0 } else { 0.0 })
                .collect());
        }
    }
    let mut rng = seed::rng(seed_val);
    for s in score.iter_mut() {
        *s += model.noise_sd * rng.sample::<f64, _>(StandardNormal);
    }
    Ok(score)
}

/// One training set plus `n_test_sets` test sets. Training clusters carry
/// perturbed coefficients; test sets draw fresh clusters from the same
/// generator family and use the unperturbed base rule.
pub fn gen_scenario(cfg: &GenConfig, model: &OutcomeModel) -> Result<TrainTestSplit> {
    cfg.validate()?;
    model.validate()?;

    let base = draw_coefficients(cfg.p, cfg.n_active, seed::derive(cfg.seed, "coefficients", 0))?;
    let cs = perturb_coefficients(
        &base,
        cfg.n_true_clusters,
        cfg.max_perturb,
        seed::derive(cfg.seed, "perturbation", 0),
    )?;

    let covariates = match cfg.generator {
        Generator::Gaussian => gen_gaussian_clusters(cfg)?,
        Generator::NonGaussian => gen_nongaussian_clusters(cfg)?,
    };
    let labels = covariates.true_labels().unwrap().to_vec();
    let x = covariates.features().clone();

    let resolved = model.resolved(
        &cs,
        &x.view(),
        &labels,
        seed::derive(cfg.seed, "outcome-extras", 0),
    )?;
    let y = gen_outcome(&x.view(), &labels, &cs, &resolved, seed::derive(cfg.seed, "train-outcome", 0))?;
    let train = Dataset::new(x, y, Some(labels))?;

    let test_cs = base.tiled(cfg.test_clusters);
    let mut tests = Vec::with_capacity(cfg.n_test_sets);
    for t in 0..cfg.n_test_sets {
        let test_cfg = GenConfig {
            n_true_clusters: cfg.test_clusters,
            n_test_sets: 0,
            seed: seed::derive(cfg.seed, "test-set", t as u64),
            ..cfg.clone()
        };
        let cov = match cfg.generator {
            Generator::Gaussian => gen_gaussian_clusters(&test_cfg)?,
            Generator::NonGaussian => gen_nongaussian_clusters(&test_cfg)?,
        };
        let tl = cov.true_labels().unwrap().to_vec();
        let tx = cov.features().clone();
        let ty = gen_outcome(
            &tx.view(),
            &tl,
            &test_cs,
            &resolved,
            seed::derive(cfg.seed, "test-outcome", t as u64),
        )?;
        tests.push(Dataset::new(tx, ty, Some(tl))?);
    }
    Ok(TrainTestSplit { train, tests })
}
