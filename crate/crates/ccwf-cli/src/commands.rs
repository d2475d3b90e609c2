//! Subcommand implementations. Every command resolves its configuration the
//! same way (defaults, then config file, then flags), runs through the
//! library, and leaves a manifest that is enough to rerun it.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use ccwf::bench::{self, ScenarioSpec, SweepParameter, VariantSpec};
use ccwf::ensemble::{self, FitOptions};
use ccwf::synthgen::{self, GenConfig, OutcomeKind, OutcomeModel};
use ccwf::{dataset, Error, ForestParams, KChoice, Result, VariantKind, WeightScheme};

use crate::config::Config;
use crate::model_io::{self, ModelColumns};

const GEN_KEYS: &[&str] = &[
    "n_true_clusters",
    "cluster_size",
    "p",
    "n_active",
    "generator",
    "separation",
    "n_test_sets",
    "test_clusters",
    "max_perturb",
    "seed",
    "outcome",
    "noise_sd",
    "coef_norm_scale",
    "outcome_column",
    "label_column",
];

const FIT_KEYS: &[&str] = &[
    "seed",
    "variant",
    "k",
    "weights",
    "outcome_column",
    "label_column",
    "n_trees",
    "mtry",
    "min_leaf",
    "max_depth",
    "bootstrap",
    "stack_out_of_cluster",
];

const SCENARIO_KEYS: &[&str] = &[
    "name",
    "n_true_clusters",
    "cluster_size",
    "p",
    "n_active",
    "generator",
    "separation",
    "n_test_sets",
    "test_clusters",
    "max_perturb",
    "seed",
    "outcome",
    "noise_sd",
    "coef_norm_scale",
    "n_trees",
    "mtry",
    "min_leaf",
    "max_depth",
    "bootstrap",
    "variants",
    "weights",
    "k",
    "n_reps",
];

fn allowed(extra: &[&'static str]) -> Vec<&'static str> {
    let mut keys = SCENARIO_KEYS.to_vec();
    keys.extend_from_slice(extra);
    keys
}

// ---------------------------------------------------------------------------
// Config -> library types
// ---------------------------------------------------------------------------

fn gen_config_from(cfg: &Config) -> Result<GenConfig> {
    let d = GenConfig::default();
    Ok(GenConfig {
        n_true_clusters: cfg.parse_or("n_true_clusters", d.n_true_clusters)?,
        cluster_size: cfg.parse_or("cluster_size", d.cluster_size)?,
        p: cfg.parse_or("p", d.p)?,
        n_active: cfg.parse_or("n_active", d.n_active)?,
        generator: cfg.parse_or("generator", d.generator)?,
        separation: cfg.parse_or("separation", d.separation)?,
        n_test_sets: cfg.parse_or("n_test_sets", d.n_test_sets)?,
        test_clusters: cfg.parse_or("test_clusters", d.test_clusters)?,
        max_perturb: cfg.parse_or("max_perturb", d.max_perturb)?,
        seed: cfg.parse_or("seed", 0u64)?,
    })
}

fn outcome_model_from(cfg: &Config) -> Result<OutcomeModel> {
    let kind = cfg.parse_or("outcome", OutcomeKind::Linear)?;
    let mut m = OutcomeModel::new(kind);
    if let Some(v) = cfg.parse::<f64>("noise_sd")? {
        m.noise_sd = v;
    }
    if let Some(v) = cfg.parse::<f64>("coef_norm_scale")? {
        m.coef_norm_scale = v;
    }
    Ok(m)
}

fn forest_params_from(cfg: &Config) -> Result<ForestParams> {
    let mut fp = ForestParams::default();
    if let Some(v) = cfg.parse::<usize>("n_trees")? {
        fp.n_trees = v;
    }
    if let Some(v) = cfg.get("mtry") {
        fp.mtry = if v == "auto" {
            None
        } else {
            Some(v.parse().map_err(|_| {
                Error::invalid(format!("config key mtry = {v:?}: expected auto or a count"))
            })?)
        };
    }
    if let Some(v) = cfg.parse::<usize>("min_leaf")? {
        fp.min_leaf = v;
    }
    if let Some(v) = cfg.get("max_depth") {
        fp.max_depth = if v == "none" {
            None
        } else {
            Some(v.parse().map_err(|_| {
                Error::invalid(format!("config key max_depth = {v:?}: expected none or a depth"))
            })?)
        };
    }
    if let Some(v) = cfg.parse::<bool>("bootstrap")? {
        fp.bootstrap = v;
    }
    Ok(fp)
}

/// `kind[:k[:scheme]]`; omitted pieces fall back to the `k` and `weights`
/// config keys.
fn parse_variant(tok: &str, dk: KChoice, ds: WeightScheme) -> Result<VariantSpec> {
    let mut it = tok.split(':');
    let kind: VariantKind = it.next().unwrap_or("").trim().parse()?;
    let k = match it.next() {
        None => dk,
        Some(s) => s.trim().parse()?,
    };
    let scheme = match it.next() {
        None => ds,
        Some(s) => s.trim().parse()?,
    };
    if it.next().is_some() {
        return Err(Error::invalid(format!(
            "variant {tok:?} has too many fields (kind[:k[:scheme]])"
        )));
    }
    Ok(VariantSpec::new(kind, k, scheme))
}

fn variants_from(cfg: &Config) -> Result<Vec<VariantSpec>> {
    let dk: KChoice = cfg.parse_or("k", KChoice::Auto)?;
    let ds: WeightScheme = cfg.parse_or("weights", WeightScheme::StackRidge)?;
    match cfg.get("variants") {
        None => Ok(vec![
            VariantSpec::new(VariantKind::Cluster, dk, ds),
            VariantSpec::new(VariantKind::Merged, dk, ds),
        ]),
        Some(list) => list.split(',').map(|tok| parse_variant(tok.trim(), dk, ds)).collect(),
    }
}

fn scenario_from(cfg: &Config) -> Result<ScenarioSpec> {
    Ok(ScenarioSpec {
        name: cfg.get("name").unwrap_or("scenario").to_string(),
        gen: gen_config_from(cfg)?,
        model: outcome_model_from(cfg)?,
        forest: forest_params_from(cfg)?,
        variants: variants_from(cfg)?,
        n_reps: cfg.parse_or("n_reps", bench::DEFAULT_N_REPS)?,
        seed: cfg.parse_or("seed", 0u64)?,
    })
}

fn load_or_empty(path: Option<&Path>) -> Result<Config> {
    match path {
        Some(p) => Config::load(p),
        None => Ok(Config::empty()),
    }
}

fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

#[derive(serde::Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    subcommand: &'static str,
    seed: u64,
    inputs: BTreeMap<String, String>,
    config: BTreeMap<String, String>,
    outputs: Vec<String>,
}

fn manifest_json(
    subcommand: &'static str,
    seed: u64,
    inputs: BTreeMap<String, String>,
    cfg: &Config,
    outputs: Vec<String>,
) -> String {
    let m = Manifest {
        tool: "ccwf",
        version: ccwf::VERSION,
        subcommand,
        seed,
        inputs,
        config: cfg.entries(),
        outputs,
    };
    serde_json::to_string_pretty(&m).expect("manifest serializes") + "\n"
}

fn write_manifest(
    dir: &Path,
    subcommand: &'static str,
    seed: u64,
    inputs: BTreeMap<String, String>,
    cfg: &Config,
    outputs: Vec<String>,
) -> Result<()> {
    let path = dir.join("manifest.json");
    fs::write(&path, manifest_json(subcommand, seed, inputs, cfg, outputs))
        .map_err(|e| Error::io(path, e))
}

fn write_output(
    dir: &Path,
    name: &str,
    outputs: &mut Vec<String>,
    f: impl FnOnce(&mut Vec<u8>) -> Result<()>,
) -> Result<()> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    let path = dir.join(name);
    fs::write(&path, &buf).map_err(|e| Error::io(path.as_path(), e))?;
    outputs.push(name.to_string());
    Ok(())
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

#[derive(clap::Args, Debug)]
pub struct GenArgs {
    /// Flat key = value config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory for the train/test CSVs and manifest.
    #[arg(long)]
    pub out: PathBuf,
    /// Root seed (overrides the config file).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Outcome column name in the emitted CSVs.
    #[arg(long)]
    pub outcome: Option<String>,
    /// Label column name in the emitted CSVs.
    #[arg(long)]
    pub labels: Option<String>,
}

pub fn gen(args: GenArgs) -> Result<()> {
    let mut cfg = load_or_empty(args.config.as_deref())?;
    if let Some(s) = args.seed {
        cfg.set("seed", s.to_string());
    }
    if let Some(o) = &args.outcome {
        cfg.set("outcome_column", o.clone());
    }
    if let Some(l) = &args.labels {
        cfg.set("label_column", l.clone());
    }
    cfg.require_known(GEN_KEYS)?;

    let g = gen_config_from(&cfg)?;
    let model = outcome_model_from(&cfg)?;
    let outcome_col = cfg.get("outcome_column").unwrap_or("y").to_string();
    let label_col = cfg.get("label_column").unwrap_or("label").to_string();

    let split = synthgen::gen_scenario(&g, &model)?;
    ensure_dir(&args.out)?;
    let mut outputs = Vec::new();
    dataset::save_csv(&split.train, &args.out.join("train.csv"), &outcome_col, Some(&label_col))?;
    outputs.push("train.csv".to_string());
    for (t, d) in split.tests.iter().enumerate() {
        let name = format!("test_{t}.csv");
        dataset::save_csv(d, &args.out.join(&name), &outcome_col, Some(&label_col))?;
        outputs.push(name);
    }
    write_manifest(&args.out, "gen", g.seed, BTreeMap::new(), &cfg, outputs)
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

#[derive(clap::Args, Debug)]
pub struct FitArgs {
    /// Flat key = value config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Training data CSV.
    #[arg(long)]
    pub train: PathBuf,
    /// Output directory for the model bundle.
    #[arg(long)]
    pub out: PathBuf,
    /// Fit seed (overrides the config file).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Ensemble variant: cluster, random, multi, or merged.
    #[arg(long)]
    pub variant: Option<String>,
    /// Partition count, or "auto" for silhouette selection.
    #[arg(long)]
    pub k: Option<String>,
    /// Weight scheme: stack_ridge, stack_lasso, simple, or sample_size.
    #[arg(long)]
    pub weights: Option<String>,
    /// Outcome column name in the training CSV.
    #[arg(long)]
    pub outcome: Option<String>,
    /// True-label column name (required by the multi variant).
    #[arg(long)]
    pub labels: Option<String>,
}

pub fn fit(args: FitArgs) -> Result<()> {
    let mut cfg = load_or_empty(args.config.as_deref())?;
    if let Some(s) = args.seed {
        cfg.set("seed", s.to_string());
    }
    if let Some(v) = &args.variant {
        cfg.set("variant", v.clone());
    }
    if let Some(k) = &args.k {
        cfg.set("k", k.clone());
    }
    if let Some(w) = &args.weights {
        cfg.set("weights", w.clone());
    }
    if let Some(o) = &args.outcome {
        cfg.set("outcome_column", o.clone());
    }
    if let Some(l) = &args.labels {
        cfg.set("label_column", l.clone());
    }
    cfg.require_known(FIT_KEYS)?;

    let variant: VariantKind = cfg.parse_or("variant", VariantKind::Cluster)?;
    let k: KChoice = cfg.parse_or("k", KChoice::Auto)?;
    let scheme: WeightScheme = cfg.parse_or("weights", WeightScheme::StackRidge)?;
    let seed = cfg.parse_or("seed", 0u64)?;
    let fp = forest_params_from(&cfg)?;
    let columns = ModelColumns {
        outcome: cfg.get("outcome_column").unwrap_or("y").to_string(),
        labels: cfg.get("label_column").map(str::to_string),
    };

    let d = dataset::load_csv(&args.train, &columns.outcome, columns.labels.as_deref())?;
    let opts = FitOptions {
        stack_out_of_cluster: cfg.parse_or("stack_out_of_cluster", false)?,
        ..FitOptions::default()
    };
    let m = ensemble::fit_with_options(&d, variant, k, &fp, scheme, seed, opts)?;

    ensure_dir(&args.out)?;
    let written = model_io::save_model(&args.out, &m, &columns)?;
    let outputs: Vec<String> = written
        .iter()
        .map(|p| p.file_name().unwrap_or_default().to_string_lossy().into_owned())
        .collect();
    let mut inputs = BTreeMap::new();
    inputs.insert("train".to_string(), args.train.display().to_string());
    write_manifest(&args.out, "fit", seed, inputs, &cfg, outputs)
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

#[derive(clap::Args, Debug)]
pub struct PredictArgs {
    /// Model bundle directory written by `fit`.
    #[arg(long)]
    pub model: PathBuf,
    /// Feature CSV; outcome/label columns recorded at fit time are dropped.
    #[arg(long)]
    pub features: PathBuf,
    /// Output predictions CSV file.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn predict(args: PredictArgs) -> Result<()> {
    let (m, cols) = model_io::load_model(&args.model)?;
    let mut drop = vec![cols.outcome.as_str()];
    if let Some(l) = &cols.labels {
        drop.push(l.as_str());
    }
    let x = model_io::load_features_csv(&args.features, &drop)?;
    if x.ncols() != m.train_p {
        return Err(Error::invalid(format!(
            "model expects {} feature columns, file has {}",
            m.train_p,
            x.ncols()
        )));
    }
    let preds = ensemble::predict(&m, &x.view())?;

    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(["pred"])?;
        for p in &preds {
            w.write_record([p.to_string().as_str()])?;
        }
        w.flush().map_err(|e| Error::io(args.out.as_path(), e))?;
    }
    fs::write(&args.out, &buf).map_err(|e| Error::io(args.out.as_path(), e))?;

    // sibling manifest; prediction is seedless, so the seed field is 0
    let mut inputs = BTreeMap::new();
    inputs.insert("model".to_string(), args.model.display().to_string());
    inputs.insert("features".to_string(), args.features.display().to_string());
    let name = args
        .out
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "preds.csv".to_string());
    let manifest_path = args.out.with_extension("manifest.json");
    fs::write(
        &manifest_path,
        manifest_json("predict", 0, inputs, &Config::empty(), vec![name]),
    )
    .map_err(|e| Error::io(manifest_path.as_path(), e))
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

#[derive(clap::Args, Debug)]
pub struct BenchArgs {
    /// Flat key = value config file describing the scenario.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory for CSVs and the manifest.
    #[arg(long)]
    pub out: PathBuf,
    /// Root seed (overrides the config file).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Default partition count for variants without an explicit k.
    #[arg(long)]
    pub k: Option<String>,
    /// Default weight scheme for variants without an explicit one.
    #[arg(long)]
    pub weights: Option<String>,
    /// Outcome kind override (linear, quadratic, interaction, binary_step,
    /// multistudy_nonlinear).
    #[arg(long)]
    pub outcome: Option<String>,
    /// Also emit a gnuplot-ready sweep.dat.
    #[arg(long)]
    pub gnuplot: bool,
}

fn write_points(
    dir: &Path,
    scenario: &str,
    points: &[bench::SweepPoint],
    gnuplot: bool,
    outputs: &mut Vec<String>,
) -> Result<()> {
    write_output(dir, "records.csv", outputs, |w| {
        bench::write_records_csv(w, scenario, &bench::sweep_record_entries(points))
    })?;
    write_output(dir, "summary.csv", outputs, |w| {
        bench::write_summary_csv(w, scenario, &bench::sweep_summary_entries(points))
    })?;
    if gnuplot {
        write_output(dir, "sweep.dat", outputs, |w| bench::write_gnuplot_dat(w, points))?;
    }
    Ok(())
}

fn write_single(
    dir: &Path,
    scenario: &str,
    res: &bench::ScenarioResult,
    outputs: &mut Vec<String>,
) -> Result<()> {
    write_output(dir, "records.csv", outputs, |w| {
        bench::write_records_csv(w, scenario, &bench::single_entries(res))
    })?;
    write_output(dir, "summary.csv", outputs, |w| {
        bench::write_summary_csv(w, scenario, &bench::single_summary_entries(res))
    })
}

pub fn bench(args: BenchArgs) -> Result<()> {
    let mut cfg = Config::load(&args.config)?;
    if let Some(s) = args.seed {
        cfg.set("seed", s.to_string());
    }
    if let Some(k) = &args.k {
        cfg.set("k", k.clone());
    }
    if let Some(w) = &args.weights {
        cfg.set("weights", w.clone());
    }
    if let Some(o) = &args.outcome {
        cfg.set("outcome", o.clone());
    }
    if args.gnuplot {
        cfg.set("gnuplot", "true");
    }
    cfg.require_known(&allowed(&[
        "mode",
        "k_values",
        "n_train_draws",
        "n_test_per_cluster",
        "n_train_studies",
        "n_test_studies",
        "gnuplot",
    ]))?;

    let mode = cfg.get("mode").unwrap_or("scenario").to_string();
    let spec = scenario_from(&cfg)?;
    let gnuplot = cfg.parse_or("gnuplot", false)?;
    ensure_dir(&args.out)?;
    let mut outputs = Vec::new();

    match mode.as_str() {
        "scenario" => {
            if let Some(ks) = cfg.parse_list::<usize>("k_values")? {
                let vals: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
                let points = bench::sweep(&spec, SweepParameter::K, &vals)?;
                write_points(&args.out, &spec.name, &points, gnuplot, &mut outputs)?;
            } else {
                let res = bench::run_scenario(&spec)?;
                write_single(&args.out, &spec.name, &res, &mut outputs)?;
            }
        }
        "weights" => {
            let ks = cfg
                .parse_list::<usize>("k_values")?
                .ok_or_else(|| Error::invalid("mode = weights needs k_values"))?;
            let recs = bench::weight_distribution_experiment(&spec, &ks)?;
            write_output(&args.out, "weights.csv", &mut outputs, |w| {
                bench::write_weights_csv(w, &recs)
            })?;
        }
        "range" => {
            let k: KChoice = cfg.parse_or("k", KChoice::Auto)?;
            let rows = bench::range_diagnostic(&spec, k)?;
            write_output(&args.out, "range.csv", &mut outputs, |w| {
                bench::write_range_csv(w, &rows)
            })?;
        }
        "bias_variance" => {
            let draws = cfg.parse_or("n_train_draws", 50usize)?;
            let per = cfg.parse_or("n_test_per_cluster", 100usize)?;
            let cells = bench::bias_variance_decomposition(&spec, draws, per)?;
            write_output(&args.out, "bias_variance.csv", &mut outputs, |w| {
                bench::write_bv_csv(w, &cells)
            })?;
        }
        "multistudy" => {
            let tr = cfg.parse_or("n_train_studies", 10usize)?;
            let te = cfg.parse_or("n_test_studies", 5usize)?;
            let res = bench::multistudy_experiment(tr, te, &spec)?;
            write_single(&args.out, &spec.name, &res, &mut outputs)?;
        }
        other => {
            return Err(Error::invalid(format!(
                "unknown mode {other:?} (expected scenario, weights, range, bias_variance, or multistudy)"
            )));
        }
    }

    let mut inputs = BTreeMap::new();
    inputs.insert("config".to_string(), args.config.display().to_string());
    write_manifest(&args.out, "bench", spec.seed, inputs, &cfg, outputs)
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

#[derive(clap::Args, Debug)]
pub struct SweepArgs {
    /// Flat key = value config file describing the base scenario.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory for CSVs and the manifest.
    #[arg(long)]
    pub out: PathBuf,
    /// Root seed (overrides the config file).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Parameter to vary: k, coef_norm_scale, n_true_clusters, cluster_size.
    #[arg(long)]
    pub parameter: Option<String>,
    /// Comma-separated values, e.g. 2,5,10,20.
    #[arg(long)]
    pub values: Option<String>,
    /// Outcome kind override.
    #[arg(long)]
    pub outcome: Option<String>,
    /// Also emit a gnuplot-ready sweep.dat.
    #[arg(long)]
    pub gnuplot: bool,
}

pub fn sweep(args: SweepArgs) -> Result<()> {
    let mut cfg = Config::load(&args.config)?;
    if let Some(s) = args.seed {
        cfg.set("seed", s.to_string());
    }
    if let Some(p) = &args.parameter {
        cfg.set("parameter", p.clone());
    }
    if let Some(v) = &args.values {
        cfg.set("values", v.clone());
    }
    if let Some(o) = &args.outcome {
        cfg.set("outcome", o.clone());
    }
    if args.gnuplot {
        cfg.set("gnuplot", "true");
    }
    cfg.require_known(&allowed(&["parameter", "values", "gnuplot"]))?;

    let parameter: SweepParameter = cfg
        .parse::<SweepParameter>("parameter")?
        .ok_or_else(|| Error::invalid("sweep needs a parameter (--parameter or config key)"))?;
    let values = cfg
        .parse_list::<f64>("values")?
        .ok_or_else(|| Error::invalid("sweep needs values (--values or config key)"))?;
    let spec = scenario_from(&cfg)?;
    let gnuplot = cfg.parse_or("gnuplot", false)?;

    let points = bench::sweep(&spec, parameter, &values)?;
    ensure_dir(&args.out)?;
    let mut outputs = Vec::new();
    write_points(&args.out, &spec.name, &points, gnuplot, &mut outputs)?;

    let mut inputs = BTreeMap::new();
    inputs.insert("config".to_string(), args.config.display().to_string());
    write_manifest(&args.out, "sweep", spec.seed, inputs, &cfg, outputs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg_of(pairs: &[(&str, &str)]) -> Config {
        let mut c = Config::empty();
        for (k, v) in pairs {
            c.set(k, v.to_string());
        }
        c
    }

    #[test]
    fn variant_list_parses_with_defaults() {
        let cfg = cfg_of(&[
            ("variants", "cluster:8:simple, merged, random:auto"),
            ("k", "4"),
            ("weights", "stack_ridge"),
        ]);
        let vs = variants_from(&cfg).unwrap();
        assert_eq!(vs.len(), 3);
        assert_eq!(vs[0], VariantSpec::new(VariantKind::Cluster, KChoice::K(8), WeightScheme::SimpleAverage));
        assert_eq!(vs[1], VariantSpec::new(VariantKind::Merged, KChoice::K(4), WeightScheme::StackRidge));
        assert_eq!(vs[2], VariantSpec::new(VariantKind::Random, KChoice::Auto, WeightScheme::StackRidge));
        assert!(variants_from(&cfg_of(&[("variants", "cluster:2:simple:extra")])).is_err());
        assert!(variants_from(&cfg_of(&[("variants", "clustr")])).is_err());
    }

    #[test]
    fn default_comparison_is_cluster_vs_merged() {
        let vs = variants_from(&Config::empty()).unwrap();
        assert_eq!(vs.len(), 2);
        assert_eq!(vs[0].kind, VariantKind::Cluster);
        assert_eq!(vs[0].k, KChoice::Auto);
        assert_eq!(vs[0].scheme, WeightScheme::StackRidge);
        assert_eq!(vs[1].kind, VariantKind::Merged);
    }

    #[test]
    fn forest_params_special_tokens() {
        let cfg = cfg_of(&[("mtry", "auto"), ("max_depth", "none"), ("n_trees", "7")]);
        let fp = forest_params_from(&cfg).unwrap();
        assert_eq!(fp.n_trees, 7);
        assert_eq!(fp.mtry, None);
        assert_eq!(fp.max_depth, None);
        let cfg = cfg_of(&[("mtry", "3"), ("max_depth", "9"), ("bootstrap", "false")]);
        let fp = forest_params_from(&cfg).unwrap();
        assert_eq!(fp.mtry, Some(3));
        assert_eq!(fp.max_depth, Some(9));
        assert!(!fp.bootstrap);
        assert!(forest_params_from(&cfg_of(&[("mtry", "lots")])).is_err());
    }

    #[test]
    fn scenario_defaults_mirror_library_defaults() {
        let spec = scenario_from(&Config::empty()).unwrap();
        assert_eq!(spec.name, "scenario");
        assert_eq!(spec.gen, GenConfig::default());
        assert_eq!(spec.n_reps, bench::DEFAULT_N_REPS);
        assert_eq!(spec.forest.n_trees, ForestParams::default().n_trees);
        assert_eq!(spec.model.kind, OutcomeKind::Linear);
    }

    #[test]
    fn manifest_is_deterministic_and_complete() {
        let cfg = cfg_of(&[("seed", "7"), ("n_reps", "2")]);
        let mut inputs = BTreeMap::new();
        inputs.insert("config".to_string(), "x.cfg".to_string());
        let a = manifest_json("bench", 7, inputs.clone(), &cfg, vec!["summary.csv".into()]);
        let b = manifest_json("bench", 7, inputs, &cfg, vec!["summary.csv".into()]);
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["tool"], "ccwf");
        assert_eq!(v["seed"], 7);
        assert_eq!(v["config"]["n_reps"], "2");
        assert_eq!(v["outputs"][0], "summary.csv");
        assert_eq!(v["version"], ccwf::VERSION);
    }
}
