//! CART regression trees and bagged random forests, the base learner for
//! every ensemble variant.
//!
//! Trees are stored as flat node arenas (root at index 0), which keeps
//! prediction cache-friendly and makes the portable text serialization
//! trivial: one line per node.

use std::fmt::Write as _;

use ndarray::ArrayView2;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exec;
use crate::seed;

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Internal {
        feature_index: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
        count: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    /// Route one row to its leaf value: left iff x[feature] <= threshold.
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { value, .. } => return *value,
                TreeNode::Internal { feature_index, threshold, left, right } => {
                    at = if row[*feature_index] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    /// Maximum root-to-leaf depth; a pure root has depth 0.
    pub fn max_depth(&self) -> usize {
        fn go(nodes: &[TreeNode], at: usize) -> usize {
            match &nodes[at] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Internal { left, right, .. } => {
                    1 + go(nodes, *left).max(go(nodes, *right))
                }
            }
        }
        go(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Features sampled per node; `None` resolves to max(p/3, 1).
    pub mtry: Option<usize>,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
    /// Bootstrap each tree's sample (size n, with replacement).
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            mtry: None,
            min_leaf: 5,
            max_depth: None,
            bootstrap: true,
        }
    }
}

impl ForestParams {
    pub fn resolved_mtry(&self, p: usize) -> usize {
        self.mtry.unwrap_or((p / 3).max(1))
    }

    fn validate(&self, n: usize, p: usize) -> Result<()> {
        if self.n_trees < 1 {
            return Err(Error::invalid("n_trees must be >= 1"));
        }
        if self.min_leaf < 1 {
            return Err(Error::invalid("min_leaf must be >= 1"));
        }
        if p == 0 {
            return Err(Error::invalid("forest training needs at least one feature"));
        }
        let mtry = self.resolved_mtry(p);
        if mtry < 1 || mtry > p {
            return Err(Error::invalid(format!("mtry must be in [1, {p}], got {mtry}")));
        }
        if n < 2.max(self.min_leaf) {
            return Err(Error::invalid(format!(
                "forest training needs n >= max(2, min_leaf); got n={n}, min_leaf={}",
                self.min_leaf
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    pub trees: Vec<Tree>,
    pub params: ForestParams,
    pub train_n: usize,
    pub train_p: usize,
}

/// Sorted (x, y) scratch plus prefix sums, reused across nodes of one tree.
struct Scratch {
    pairs: Vec<(f64, f64)>,
}

struct TreeBuilder<'a> {
    x: ArrayView2<'a, f64>,
    y: &'a [f64],
    mtry: usize,
    min_leaf: usize,
    max_depth: Option<usize>,
    nodes: Vec<TreeNode>,
    scratch: Scratch,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    children_sse: f64,
}

impl TreeBuilder<'_> {
    /// Build the subtree over `idx` (indices into the bootstrap sample space,
    /// i.e. row indices of `x`), returning its node id.
    fn build(&mut self, idx: &mut [usize], depth: usize, rng: &mut impl Rng) -> usize {
        let m = idx.len();
        let mut sum = 0.0;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &i in idx.iter() {
            let v = self.y[i];
            sum += v;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let mean = sum / m as f64;
        let mut parent_sse = 0.0;
        for &i in idx.iter() {
            let d = self.y[i] - mean;
            parent_sse += d * d;
        }

        let stop = m < 2 * self.min_leaf
            || lo == hi
            || self.max_depth.is_some_and(|d| depth >= d);
        if !stop {
            if let Some(split) = self.best_split(idx, parent_sse, rng) {
                // Stable partition keeps relative order deterministic.
                let (mut left, mut right): (Vec<usize>, Vec<usize>) = idx
                    .iter()
                    .partition(|&&i| self.x[[i, split.feature]] <= split.threshold);
                let at = self.nodes.len();
                self.nodes.push(TreeNode::Leaf { value: 0.0, count: 0 }); // placeholder
                let l = self.build(&mut left, depth + 1, rng);
                let r = self.build(&mut right, depth + 1, rng);
                self.nodes[at] = TreeNode::Internal {
                    feature_index: split.feature,
                    threshold: split.threshold,
                    left: l,
                    right: r,
                };
                return at;
            }
        }
        let at = self.nodes.len();
        self.nodes.push(TreeNode::Leaf { value: mean, count: m });
        at
    }

    /// Best variance-reducing split over an mtry feature sample, or None when
    /// no candidate strictly reduces the summed squared error. Ties go to the
    /// lowest feature index, then the lowest threshold.
    fn best_split(
        &mut self,
        idx: &[usize],
        parent_sse: f64,
        rng: &mut impl Rng,
    ) -> Option<BestSplit> {
        let p = self.x.ncols();
        let mut features: Vec<usize> =
            rand::seq::index::sample(rng, p, self.mtry).into_iter().collect();
        features.sort_unstable();

        let m = idx.len();
        let mut best: Option<BestSplit> = None;
        for &f in &features {
            let pairs = &mut self.scratch.pairs;
            pairs.clear();
            pairs.extend(idx.iter().map(|&i| (self.x[[i, f]], self.y[i])));
            pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

            let mut lsum = 0.0;
            let mut lsq = 0.0;
            let total_sum: f64 = pairs.iter().map(|p| p.1).sum();
            let total_sq: f64 = pairs.iter().map(|p| p.1 * p.1).sum();
            for cut in 0..m - 1 {
                lsum += pairs[cut].1;
                lsq += pairs[cut].1 * pairs[cut].1;
                if pairs[cut].0 == pairs[cut + 1].0 {
                    continue; // split only between distinct values
                }
                let nl = cut + 1;
                let nr = m - nl;
                if nl < self.min_leaf || nr < self.min_leaf {
                    continue;
                }
                let rsum = total_sum - lsum;
                let rsq = total_sq - lsq;
                let sse = (lsq - lsum * lsum / nl as f64).max(0.0)
                    + (rsq - rsum * rsum / nr as f64).max(0.0);
                if sse >= parent_sse {
                    continue; // must strictly reduce variance
                }
                let threshold = 0.5 * (pairs[cut].0 + pairs[cut + 1].0);
                let better = match &best {
                    None => true,
                    Some(b) => {
                        sse < b.children_sse
                            || (sse == b.children_sse
                                && (f, threshold) < (b.feature, b.threshold))
                    }
                };
                if better {
                    best = Some(BestSplit { feature: f, threshold, children_sse: sse });
                }
            }
        }
        best
    }
}

fn fit_tree(
    x: &ArrayView2<f64>,
    y: &[f64],
    params: &ForestParams,
    tree_seed: u64,
) -> Tree {
    let n = x.nrows();
    let mut rng = seed::rng(tree_seed);
    let mut idx: Vec<usize> = if params.bootstrap {
        (0..n).map(|_| rng.gen_range(0..n)).collect()
    } else {
        (0..n).collect()
    };
    let mut builder = TreeBuilder {
        x: x.view(),
        y,
        mtry: params.resolved_mtry(x.ncols()),
        min_leaf: params.min_leaf,
        max_depth: params.max_depth,
        nodes: Vec::new(),
        scratch: Scratch { pairs: Vec::with_capacity(n) },
    };
    let root = builder.build(&mut idx, 0, &mut rng);
    debug_assert_eq!(root, 0);
    Tree { nodes: builder.nodes }
}

/// Fit a bagged forest. Deterministic in `(x, y, params, seed_val)`
/// independent of thread count: each tree draws from its own derived seed.
pub fn fit_forest(
    x: &ArrayView2<f64>,
    y: &[f64],
    params: &ForestParams,
    seed_val: u64,
) -> Result<Forest> {
    let (n, p) = x.dim();
    params.validate(n, p)?;
    if y.len() != n {
        return Err(Error::invalid(format!(
            "outcome length {} does not match {n} rows",
            y.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("forest training data must be finite"));
    }
    let trees = exec::map_indexed(params.n_trees, |t| {
        fit_tree(x, y, params, seed::derive(seed_val, "tree", t as u64))
    });
    Ok(Forest { trees, params: *params, train_n: n, train_p: p })
}

/// Per-row mean of per-tree leaf values.
pub fn predict_forest(f: &Forest, x: &ArrayView2<f64>) -> Result<Vec<f64>> {
    if x.ncols() != f.train_p {
        return Err(Error::invalid(format!(
            "predict: expected {} features, got {}",
            f.train_p,
            x.ncols()
        )));
    }
    let inv = 1.0 / f.trees.len() as f64;
    Ok(x.rows()
        .into_iter()
        .map(|row| {
            let r = row.as_slice().unwrap();
            f.trees.iter().map(|t| t.predict_row(r)).sum::<f64>() * inv
        })
        .collect())
}

/// Mean over trees of maximum root-to-leaf depth (pure root = 0).
pub fn mean_tree_depth(f: &Forest) -> f64 {
    f.trees.iter().map(|t| t.max_depth() as f64).sum::<f64>() / f.trees.len() as f64
}

// ---------------------------------------------------------------------------
// Portable text serialization: a `forest v1` header with the parameters,
// then per tree one line per node:
//   <id> internal <feature> <threshold> <left> <right>
//   <id> leaf <value> <count>
// Floats use Rust's shortest round-trip formatting.

pub fn forest_to_text(f: &Forest) -> String {
    let mut s = String::new();
    s.push_str("forest v1\n");
    let mtry = match f.params.mtry {
        Some(m) => m.to_string(),
        None => "auto".into(),
    };
    let depth = match f.params.max_depth {
        Some(d) => d.to_string(),
        None => "none".into(),
    };
    let _ = writeln!(
        s,
        "params n_trees={} mtry={} min_leaf={} max_depth={} bootstrap={}",
        f.params.n_trees, mtry, f.params.min_leaf, depth, f.params.bootstrap
    );
    let _ = writeln!(s, "train n={} p={}", f.train_n, f.train_p);
    for (t, tree) in f.trees.iter().enumerate() {
        let _ = writeln!(s, "tree {t} nodes={}", tree.nodes.len());
        for (i, node) in tree.nodes.iter().enumerate() {
            match node {
                TreeNode::Internal { feature_index, threshold, left, right } => {
                    let _ = writeln!(s, "{i} internal {feature_index} {threshold} {left} {right}");
                }
                TreeNode::Leaf { value, count } => {
                    let _ = writeln!(s, "{i} leaf {value} {count}");
                }
            }
        }
    }
    s.push_str("end\n");
    s
}

fn bad(line: &str) -> Error {
    Error::invalid(format!("malformed forest text at: {line:?}"))
}

pub fn forest_from_text(text: &str) -> Result<Forest> {
    let mut lines = text.lines();
    if lines.next() != Some("forest v1") {
        return Err(Error::invalid("not a forest v1 file"));
    }
    let pline = lines.next().ok_or_else(|| bad("<eof>"))?;
    let mut params = ForestParams::default();
    for kv in pline.strip_prefix("params ").ok_or_else(|| bad(pline))?.split(' ') {
        let (k, v) = kv.split_once('=').ok_or_else(|| bad(pline))?;
        match k {
            "n_trees" => params.n_trees = v.parse().map_err(|_| bad(pline))?,
            "mtry" => {
                params.mtry = if v == "auto" {
                    None
                } else {
                    Some(v.parse().map_err(|_| bad(pline))?)
                }
            }
            "min_leaf" => params.min_leaf = v.parse().map_err(|_| bad(pline))?,
            "max_depth" => {
                params.max_depth = if v == "none" {
                    None
                } else {
                    Some(v.parse().map_err(|_| bad(pline))?)
                }
            }
            "bootstrap" => params.bootstrap = v.parse().map_err(|_| bad(pline))?,
            _ => return Err(bad(pline)),
        }
    }
    let tline = lines.next().ok_or_else(|| bad("<eof>"))?;
    let rest = tline.strip_prefix("train ").ok_or_else(|| bad(tline))?;
    let mut train_n = 0;
    let mut train_p = 0;
    for kv in rest.split(' ') {
        let (k, v) = kv.split_once('=').ok_or_else(|| bad(tline))?;
        match k {
            "n" => train_n = v.parse().map_err(|_| bad(tline))?,
            "p" => train_p = v.parse().map_err(|_| bad(tline))?,
            _ => return Err(bad(tline)),
        }
    }

    let mut trees = Vec::with_capacity(params.n_trees);
    loop {
        let header = lines.next().ok_or_else(|| bad("<eof>"))?;
        if header == "end" {
            break;
        }
        let rest = header.strip_prefix("tree ").ok_or_else(|| bad(header))?;
        let (_, nn) = rest.split_once(" nodes=").ok_or_else(|| bad(header))?;
        let n_nodes: usize = nn.parse().map_err(|_| bad(header))?;
        let mut nodes = Vec::with_capacity(n_nodes);
        for _ in 0..n_nodes {
            let line = lines.next().ok_or_else(|| bad("<eof>"))?;
            let mut it = line.split(' ');
            let id: usize = it.next().ok_or_else(|| bad(line))?.parse().map_err(|_| bad(line))?;
            if id != nodes.len() {
                return Err(bad(line));
            }
            match it.next() {
                Some("internal") => {
                    let f: usize =
                        it.next().ok_or_else(|| bad(line))?.parse().map_err(|_| bad(line))?;
                    let t: f64 =
                        it.next().ok_or_else(|| bad(line))?.parse().map_err(|_| bad(line))?;
                    let l: usize =
                        it.next().ok_or_else(|| bad(line))?.parse().map_err(|_| bad(line))?;
                    let r: usize =
                        it.next().ok_or_else(|| bad(line))?.parse().map_err(|_| bad(line))?;
                    if l >= n_nodes || r >= n_nodes {
                        return Err(bad(line));
                    }
                    nodes.push(TreeNode::Internal {
                        feature_index: f,
                        threshold: t,
                        left: l,
                        right: r,
                    });
                }
                Some("leaf") => {
                    let v: f64 =
                        it.next().ok_or_else(|| bad(line))?.parse().map_err(|_| bad(line))?;
                    let c: usize =
                        it.next().ok_or_else(|| bad(line))?.parse().map_err(|_| bad(line))?;
                    nodes.push(TreeNode::Leaf { value: v, count: c });
                }
                _ => return Err(bad(line)),
            }
        }
        trees.push(Tree { nodes });
    }
    if trees.len() != params.n_trees {
        return Err(Error::invalid(format!(
            "forest text declares n_trees={} but contains {}",
            params.n_trees,
            trees.len()
        )));
    }
    Ok(Forest { trees, params, train_n, train_p })
}
