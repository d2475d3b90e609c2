//! The stacked prediction matrix T and non-negative ridge/lasso weight
//! solvers with cross-validated penalty selection.
//!
//! The objective is the penalized form min ||y - Tw||^2 + lambda*pen(w)
//! subject to w >= 0, solved by cyclic coordinate descent on the Gram
//! system G = T'T, b = T'y.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::exec;
use crate::forest::{self, Forest};
use crate::seed;

pub const CD_TOL: f64 = 1e-8;
pub const CD_MAX_SWEEPS: usize = 10_000;
pub const DEFAULT_CV_FOLDS: usize = 10;
pub const DEFAULT_GRID_LEN: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightScheme {
    StackRidge,
    StackLasso,
    SimpleAverage,
    SampleSize,
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightScheme::StackRidge => "stack_ridge",
            WeightScheme::StackLasso => "stack_lasso",
            WeightScheme::SimpleAverage => "simple_average",
            WeightScheme::SampleSize => "sample_size",
        })
    }
}

impl FromStr for WeightScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stack_ridge" => Ok(WeightScheme::StackRidge),
            "stack_lasso" => Ok(WeightScheme::StackLasso),
            "simple_average" | "simple" => Ok(WeightScheme::SimpleAverage),
            "sample_size" => Ok(WeightScheme::SampleSize),
            other => Err(Error::invalid(format!(
                "unknown weight scheme {other:?} (expected stack_ridge, stack_lasso, \
                 simple_average, or sample_size)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StackingWeights {
    pub w: Vec<f64>,
    pub lambda: f64,
    pub scheme: WeightScheme,
}

impl StackingWeights {
    pub fn sum(&self) -> f64 {
        self.w.iter().sum()
    }
}

/// n x k matrix of per-forest predictions on the full training set, plus the
/// training outcome.
#[derive(Debug, Clone)]
pub struct StackMatrix {
    t: Array2<f64>,
    y: Vec<f64>,
}

impl StackMatrix {
    pub fn new(t: Array2<f64>, y: Vec<f64>) -> Result<Self> {
        if t.nrows() != y.len() {
            return Err(Error::invalid(format!(
                "stack matrix has {} rows but y has {}",
                t.nrows(),
                y.len()
            )));
        }
        if t.ncols() == 0 || t.nrows() == 0 {
            return Err(Error::invalid("stack matrix must be non-empty"));
        }
        if t.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("stack matrix entries must be finite"));
        }
        Ok(StackMatrix { t, y })
    }

    pub fn t(&self) -> &Array2<f64> {
        &self.t
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.t.nrows()
    }

    pub fn k(&self) -> usize {
        self.t.ncols()
    }

    fn gram(&self) -> (Array2<f64>, Array1<f64>) {
        let g = self.t.t().dot(&self.t);
        let b = self.t.t().dot(&Array1::from_vec(self.y.clone()));
        (g, b)
    }

    /// ||y - Tw||^2
    pub fn residual_ss(&self, w: &[f64]) -> f64 {
        let wv = Array1::from_vec(w.to_vec());
        let fit = self.t.dot(&wv);
        self.y
            .iter()
            .zip(fit.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

/// T[i][j] = forest j's prediction on training row i (own-cluster rows
/// included).
pub fn build_stack_matrix(forests: &[Forest], d: &Dataset) -> Result<StackMatrix> {
    if forests.is_empty() {
        return Err(Error::invalid("build_stack_matrix needs at least one forest"));
    }
    let x = d.features().view();
    let cols = exec::try_map_indexed(forests.len(), |j| forest::predict_forest(&forests[j], &x))?;
    let mut t = Array2::zeros((d.n(), forests.len()));
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            t[[i, j]] = v;
        }
    }
    StackMatrix::new(t, d.outcome().to_vec())
}

enum Penalty {
    Ridge,
    Lasso,
}

/// Cyclic coordinate descent on G, b. Converges when the largest coordinate
/// change in a sweep drops below `CD_TOL`.
fn solve_cd(g: &Array2<f64>, b: &Array1<f64>, lambda: f64, penalty: &Penalty) -> Result<Vec<f64>> {
    let k = g.nrows();
    let mut w = vec![0.0; k];
    for sweep in 0..CD_MAX_SWEEPS {
        let mut max_delta: f64 = 0.0;
        for j in 0..k {
            // r_j = b_j - sum_{l != j} G_jl w_l
            let mut r = b[j];
            for l in 0..k {
                if l != j {
                    r -= g[[j, l]] * w[l];
                }
            }
            let new = match penalty {
                Penalty::Ridge => {
                    let denom = g[[j, j]] + lambda;
                    if denom > 0.0 {
                        (r / denom).max(0.0)
                    } else {
                        0.0
                    }
                }
                Penalty::Lasso => {
                    if g[[j, j]] > 0.0 {
                        ((r - lambda / 2.0) / g[[j, j]]).max(0.0)
                    } else {
                        0.0
                    }
                }
            };
            max_delta = max_delta.max((new - w[j]).abs());
            w[j] = new;
        }
        if max_delta < CD_TOL {
            return Ok(w);
        }
        if sweep == CD_MAX_SWEEPS - 1 {
            return Err(Error::numeric(format!(
                "coordinate descent did not converge in {CD_MAX_SWEEPS} sweeps \
                 (last max coordinate change {max_delta:.3e})"
            )));
        }
    }
    unreachable!()
}

pub fn solve_nnls_ridge(s: &StackMatrix, lambda: f64) -> Result<StackingWeights> {
    if lambda < 0.0 {
        return Err(Error::invalid("lambda must be >= 0"));
    }
    let (g, b) = s.gram();
    let w = solve_cd(&g, &b, lambda, &Penalty::Ridge)?;
    Ok(StackingWeights { w, lambda, scheme: WeightScheme::StackRidge })
}

pub fn solve_nnls_lasso(s: &StackMatrix, lambda: f64) -> Result<StackingWeights> {
    if lambda < 0.0 {
        return Err(Error::invalid("lambda must be >= 0"));
    }
    let (g, b) = s.gram();
    let w = solve_cd(&g, &b, lambda, &Penalty::Lasso)?;
    Ok(StackingWeights { w, lambda, scheme: WeightScheme::StackLasso })
}

/// Equal or size-proportional weights (lambda reported as 0).
pub fn baseline_weights(scheme: WeightScheme, sizes: &[usize]) -> Result<StackingWeights> {
    if sizes.is_empty() {
        return Err(Error::invalid("baseline_weights needs at least one size"));
    }
    let k = sizes.len();
    let w = match scheme {
        WeightScheme::SimpleAverage => vec![1.0 / k as f64; k],
        WeightScheme::SampleSize => {
            let total: usize = sizes.iter().sum();
            if total == 0 {
                return Err(Error::invalid("baseline_weights: all sizes are zero"));
            }
            sizes.iter().map(|&s| s as f64 / total as f64).collect()
        }
        other => {
            return Err(Error::invalid(format!(
                "baseline_weights only handles simple_average and sample_size, got {other}"
            )))
        }
    };
    Ok(StackingWeights { w, lambda: 0.0, scheme })
}

/// 50 log-spaced penalties from 1e-4*lambda_max to lambda_max, where
/// lambda_max = max_j |(T'y)_j|. Degenerates to {0} when T'y vanishes.
pub fn default_lambda_grid(s: &StackMatrix) -> Vec<f64> {
    let (_, b) = s.gram();
    let lambda_max = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if lambda_max <= 0.0 {
        return vec![0.0];
    }
    log_grid(1e-4 * lambda_max, lambda_max, DEFAULT_GRID_LEN)
}

pub fn log_grid(lo: f64, hi: f64, len: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && len >= 2);
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..len)
        .map(|i| (llo + (lhi - llo) * i as f64 / (len - 1) as f64).exp())
        .collect()
}

/// Grid value minimizing mean held-out squared error over `folds`
/// shuffle-split folds (ties to the larger lambda). Fold assignment is
/// deterministic in `seed_val`.
pub fn cv_select_lambda(
    s: &StackMatrix,
    folds: usize,
    grid: &[f64],
    seed_val: u64,
    penalty_scheme: WeightScheme,
) -> Result<f64> {
    if folds < 2 {
        return Err(Error::invalid("cross-validation needs folds >= 2"));
    }
    if grid.is_empty() {
        return Err(Error::invalid("cross-validation needs a non-empty grid"));
    }
    let n = s.n();
    if folds > n {
        return Err(Error::invalid(format!(
            "cannot split {n} rows into {folds} non-empty folds"
        )));
    }
    let penalty = match penalty_scheme {
        WeightScheme::StackRidge => Penalty::Ridge,
        WeightScheme::StackLasso => Penalty::Lasso,
        other => {
            return Err(Error::invalid(format!(
                "cv_select_lambda applies to stack_ridge or stack_lasso, got {other}"
            )))
        }
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng(seed_val));
    let base = n / folds;
    let extra = n % folds;
    let mut fold_of = vec![0usize; n];
    let mut at = 0;
    for f in 0..folds {
        let size = base + usize::from(f < extra);
        for &i in &order[at..at + size] {
            fold_of[i] = f;
        }
        at += size;
    }

    let (g_full, b_full) = s.gram();
    let k = s.k();
    // Per-fold Gram pieces: G_fold = T_fold' T_fold, b_fold likewise.
    let mut g_fold = vec![Array2::<f64>::zeros((k, k)); folds];
    let mut b_fold = vec![Array1::<f64>::zeros(k); folds];
    for i in 0..n {
        let f = fold_of[i];
        let row = s.t.row(i);
        for a in 0..k {
            b_fold[f][a] += row[a] * s.y[i];
            for c in 0..k {
                g_fold[f][[a, c]] += row[a] * row[c];
            }
        }
    }

    let mut best_lambda = grid[0];
    let mut best_err = f64::INFINITY;
    for &lambda in grid {
        if lambda < 0.0 {
            return Err(Error::invalid("grid lambdas must be >= 0"));
        }
        let mut sse = 0.0;
        let mut converged = true;
        for f in 0..folds {
            let g_train = &g_full - &g_fold[f];
            let b_train = &b_full - &b_fold[f];
            // An ill-conditioned fold fit that fails to converge disqualifies
            // this lambda rather than aborting the whole selection; some
            // better-conditioned (larger) lambda on the grid still wins.
            let w = match solve_cd(&g_train, &b_train, lambda, &penalty) {
                Ok(w) => w,
                Err(Error::Numeric(_)) => {
                    converged = false;
                    break;
                }
                Err(e) => return Err(e),
            };
            for i in 0..n {
                if fold_of[i] == f {
                    let fit: f64 =
                        s.t.row(i).iter().zip(&w).map(|(t, w)| t * w).sum();
                    let e = s.y[i] - fit;
                    sse += e * e;
                }
            }
        }
        if !converged {
            continue;
        }
        let err = sse / n as f64;
        if err < best_err || (err == best_err && lambda > best_lambda) {
            best_err = err;
            best_lambda = lambda;
        }
    }
    if best_err.is_infinite() {
        return Err(Error::numeric(
            "no grid lambda converged during cross-validation",
        ));
    }
    Ok(best_lambda)
}

/// Solve at the selected lambda, walking up the (ascending) grid when an
/// ill-conditioned instance stalls the solver; larger penalties are better
/// conditioned, so the walk terminates quickly in practice.
fn solve_tuned(
    s: &StackMatrix,
    grid: &[f64],
    lambda: f64,
    solve: impl Fn(&StackMatrix, f64) -> Result<StackingWeights>,
) -> Result<StackingWeights> {
    let mut last = None;
    for &l in grid.iter().filter(|&&l| l >= lambda) {
        match solve(s, l) {
            Err(Error::Numeric(e)) => last = Some(Error::Numeric(e)),
            other => return other,
        }
    }
    Err(last.unwrap_or_else(|| Error::numeric("no usable lambda on the grid")))
}

/// CV-tuned fit with the module defaults (10 folds, 50-point grid).
pub fn fit_stacking(
    s: &StackMatrix,
    scheme: WeightScheme,
    sizes: &[usize],
    seed_val: u64,
) -> Result<StackingWeights> {
    match scheme {
        WeightScheme::SimpleAverage | WeightScheme::SampleSize => {
            baseline_weights(scheme, sizes)
        }
        WeightScheme::StackRidge => {
            let grid = default_lambda_grid(s);
            let lambda = cv_select_lambda(s, DEFAULT_CV_FOLDS.min(s.n()), &grid, seed_val, scheme)?;
            solve_tuned(s, &grid, lambda, solve_nnls_ridge)
        }
        WeightScheme::StackLasso => {
            let grid = default_lambda_grid(s);
            let lambda = cv_select_lambda(s, DEFAULT_CV_FOLDS.min(s.n()), &grid, seed_val, scheme)?;
            solve_tuned(s, &grid, lambda, solve_nnls_lasso)
        }
    }
}

/// Out-of-cluster stack variant (sensitivity analysis): forest j's own
/// training rows in column j are replaced by the average prediction of the
/// other forests, so own-cluster fit cannot inform w_j.
pub fn build_stack_matrix_out_of_cluster(
    forests: &[Forest],
    d: &Dataset,
    labels: &[usize],
) -> Result<StackMatrix> {
    let base = build_stack_matrix(forests, d)?;
    if labels.len() != d.n() {
        return Err(Error::invalid("labels length must match dataset rows"));
    }
    let k = forests.len();
    if k == 1 {
        return Ok(base);
    }
    let mut t = base.t.clone();
    for i in 0..d.n() {
        let own = labels[i];
        if own >= k {
            return Err(Error::invalid(format!("label {own} out of range for {k} forests")));
        }
        let others: f64 = (0..k).filter(|&j| j != own).map(|j| base.t[[i, j]]).sum();
        t[[i, own]] = others / (k - 1) as f64;
    }
    StackMatrix::new(t, base.y)
}
