//! Lloyd's k-means with k-means++ initialization, silhouette scoring, and
//! silhouette-based selection of k.

use ndarray::{Array2, ArrayView2};
use rand::Rng;

use crate::dataset::{Dataset, PartitionAssignment};
use crate::error::{Error, Result};
use crate::exec;
use crate::seed;

pub const DEFAULT_N_INIT: usize = 10;
pub const DEFAULT_MAX_ITER: usize = 100;
pub const DEFAULT_TOL: f64 = 1e-6;

/// Silhouette below this marks the data as weakly clusterable.
pub const LOW_CLUSTERABILITY: f64 = 0.3;

/// Silhouette scoring subsamples to this many rows (scoring only).
const SILHOUETTE_SUBSAMPLE: usize = 5000;

#[derive(Debug, Clone)]
pub struct KMeansModel {
    pub centroids: Array2<f64>,
    pub assignment: PartitionAssignment,
    /// Sum of squared distances from each point to its assigned centroid.
    pub inertia: f64,
    pub iterations_run: usize,
    /// Inertia after each assignment step of the winning restart.
    pub inertia_history: Vec<f64>,
}

/// Squared Euclidean distances from every row of `x` to every centroid,
/// written into `out` (n x k). Uses |x|^2 + |c|^2 - 2 x.c with a matrix
/// product for the cross term; tiny negative rounding is clamped to zero.
fn squared_distances(
    x: &ArrayView2<f64>,
    x_norms: &[f64],
    centroids: &Array2<f64>,
    out: &mut Array2<f64>,
) {
    let cross = x.dot(&centroids.t());
    let c_norms: Vec<f64> = centroids
        .rows()
        .into_iter()
        .map(|r| r.iter().map(|v| v * v).sum())
        .collect();
    for (i, mut row) in out.rows_mut().into_iter().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (x_norms[i] + c_norms[j] - 2.0 * cross[[i, j]]).max(0.0);
        }
    }
}

fn nearest(row: &[f64]) -> (usize, f64) {
    let mut best = 0;
    let mut best_d = row[0];
    for (j, &d) in row.iter().enumerate().skip(1) {
        if d < best_d {
            best_d = d;
            best = j;
        }
    }
    (best, best_d)
}

/// k-means++ seeding: D^2-weighted sampling of k initial centroids.
fn kmeanspp_init(
    x: &ArrayView2<f64>,
    x_norms: &[f64],
    k: usize,
    rng: &mut impl Rng,
) -> Array2<f64> {
    let (n, p) = x.dim();
    let mut centroids = Array2::zeros((k, p));
    let first = rng.gen_range(0..n);
    centroids.row_mut(0).assign(&x.row(first));
    let mut d2: Vec<f64> = vec![0.0; n];
    for i in 0..n {
        let c = centroids.row(0);
        let cross: f64 = x.row(i).iter().zip(c.iter()).map(|(a, b)| a * b).sum();
        let cn: f64 = c.iter().map(|v| v * v).sum();
        d2[i] = (x_norms[i] + cn - 2.0 * cross).max(0.0);
    }
    for next in 1..k {
        let total: f64 = d2.iter().sum();
        let chosen = if total <= 0.0 {
            // All remaining points coincide with a centroid; pick uniformly.
            rng.gen_range(0..n)
        } else {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                target -= w;
                if target <= 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        };
        centroids.row_mut(next).assign(&x.row(chosen));
        for i in 0..n {
            let c = centroids.row(next);
            let cross: f64 = x.row(i).iter().zip(c.iter()).map(|(a, b)| a * b).sum();
            let cn: f64 = c.iter().map(|v| v * v).sum();
            let nd = (x_norms[i] + cn - 2.0 * cross).max(0.0);
            if nd < d2[i] {
                d2[i] = nd;
            }
        }
    }
    centroids
}

struct LloydRun {
    centroids: Array2<f64>,
    labels: Vec<usize>,
    inertia: f64,
    iterations: usize,
    history: Vec<f64>,
}

fn lloyd(
    x: &ArrayView2<f64>,
    x_norms: &[f64],
    k: usize,
    restart_seed: u64,
    max_iter: usize,
    tol: f64,
) -> LloydRun {
    let (n, p) = x.dim();
    let mut rng = seed::rng(restart_seed);
    let mut centroids = kmeanspp_init(x, x_norms, k, &mut rng);
    let mut dist = Array2::zeros((n, k));
    let mut labels = vec![0usize; n];
    let mut point_d2 = vec![0.0f64; n];
    let mut prev_inertia = f64::INFINITY;
    let mut history = Vec::new();
    let mut iterations = 0;

    for iter in 1..=max_iter {
        iterations = iter;
        squared_distances(x, x_norms, &centroids, &mut dist);
        for i in 0..n {
            let (j, d) = nearest(dist.row(i).as_slice().unwrap());
            labels[i] = j;
            point_d2[i] = d;
        }
        // Empty-cluster repair: move the point currently farthest from its
        // centroid into each empty cluster, in cluster-index order.
        let mut counts = vec![0usize; k];
        for &l in &labels {
            counts[l] += 1;
        }
        for empty in 0..k {
            if counts[empty] > 0 {
                continue;
            }
            let mut far = 0;
            let mut far_d = f64::NEG_INFINITY;
            for i in 0..n {
                if counts[labels[i]] > 1 && point_d2[i] > far_d {
                    far_d = point_d2[i];
                    far = i;
                }
            }
            counts[labels[far]] -= 1;
            labels[far] = empty;
            counts[empty] = 1;
            point_d2[far] = 0.0;
            centroids.row_mut(empty).assign(&x.row(far));
        }
        let inertia: f64 = point_d2.iter().sum();
        history.push(inertia);
        debug_assert!(
            inertia <= prev_inertia * (1.0 + 1e-12) + 1e-9,
            "inertia increased: {prev_inertia} -> {inertia}"
        );
        if prev_inertia.is_finite() && prev_inertia - inertia < tol * prev_inertia {
            break;
        }
        prev_inertia = inertia;
        if iter == max_iter {
            break;
        }
        // Update step: centroid = mean of assigned points.
        let mut sums = Array2::<f64>::zeros((k, p));
        let mut cnt = vec![0usize; k];
        for i in 0..n {
            let l = labels[i];
            cnt[l] += 1;
            let mut row = sums.row_mut(l);
            row += &x.row(i);
        }
        for j in 0..k {
            let mut row = sums.row_mut(j);
            row /= cnt[j] as f64;
        }
        centroids = sums;
    }
    let inertia = *history.last().unwrap();
    LloydRun { centroids, labels, inertia, iterations, history }
}

/// Best-of-`n_init` k-means++ Lloyd fit. Deterministic in `(d, k, seed_val,
/// n_init, max_iter, tol)` regardless of thread count.
pub fn fit_kmeans(
    d: &Dataset,
    k: usize,
    seed_val: u64,
    n_init: usize,
    max_iter: usize,
    tol: f64,
) -> Result<KMeansModel> {
    fit_kmeans_x(&d.features().view(), k, seed_val, n_init, max_iter, tol)
}

pub(crate) fn fit_kmeans_x(
    x: &ArrayView2<f64>,
    k: usize,
    seed_val: u64,
    n_init: usize,
    max_iter: usize,
    tol: f64,
) -> Result<KMeansModel> {
    let n = x.nrows();
    if k < 1 || k > n {
        return Err(Error::invalid(format!("k-means needs 1 <= k <= n, got k={k}, n={n}")));
    }
    if n_init == 0 || max_iter == 0 {
        return Err(Error::invalid("n_init and max_iter must be positive"));
    }
    let x_norms: Vec<f64> = x
        .rows()
        .into_iter()
        .map(|r| r.iter().map(|v| v * v).sum())
        .collect();
    let runs = exec::map_indexed(n_init, |r| {
        lloyd(x, &x_norms, k, seed::derive(seed_val, "kmeans-restart", r as u64), max_iter, tol)
    });
    let best = runs
        .into_iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| {
            a.inertia.partial_cmp(&b.inertia).unwrap().then(ia.cmp(ib))
        })
        .map(|(_, run)| run)
        .unwrap();
    Ok(KMeansModel {
        centroids: best.centroids,
        assignment: PartitionAssignment::new(best.labels, k)?,
        inertia: best.inertia,
        iterations_run: best.iterations,
        inertia_history: best.history,
    })
}

/// Nearest-centroid labels for new rows (lowest index wins ties).
pub fn assign(m: &KMeansModel, x: &ArrayView2<f64>) -> Result<Vec<usize>> {
    assign_to_centroids(&m.centroids.view(), x)
}

/// Nearest-centroid labels against an explicit centroid matrix.
pub fn assign_to_centroids(
    centroids: &ArrayView2<f64>,
    x: &ArrayView2<f64>,
) -> Result<Vec<usize>> {
    if centroids.nrows() == 0 {
        return Err(Error::invalid("assign needs at least one centroid"));
    }
    if x.ncols() != centroids.ncols() {
        return Err(Error::invalid(format!(
            "assign: expected {} columns, got {}",
            centroids.ncols(),
            x.ncols()
        )));
    }
    let x_norms: Vec<f64> = x
        .rows()
        .into_iter()
        .map(|r| r.iter().map(|v| v * v).sum())
        .collect();
    let owned = centroids.to_owned();
    let mut dist = Array2::zeros((x.nrows(), centroids.nrows()));
    squared_distances(x, &x_norms, &owned, &mut dist);
    Ok((0..x.nrows())
        .map(|i| nearest(dist.row(i).as_slice().unwrap()).0)
        .collect())
}

/// Row-block partial sums of Euclidean distances from each row to each
/// cluster, for one or more candidate labelings evaluated from a single
/// pairwise-distance pass.
fn distance_sums(
    x: &ArrayView2<f64>,
    labelings: &[&[usize]],
    ks: &[usize],
) -> Vec<Array2<f64>> {
    let n = x.nrows();
    let x_norms: Vec<f64> = x
        .rows()
        .into_iter()
        .map(|r| r.iter().map(|v| v * v).sum())
        .collect();
    let block = 512;
    let n_blocks = n.div_ceil(block);
    // Each block computes its own rows of every per-labeling sum matrix, so
    // parallel evaluation stays deterministic.
    let partials = exec::map_indexed(n_blocks, |b| {
        let lo = b * block;
        let hi = (lo + block).min(n);
        let xb = x.slice(ndarray::s![lo..hi, ..]);
        let cross = xb.dot(&x.t());
        let mut sums: Vec<Array2<f64>> = ks
            .iter()
            .map(|&k| Array2::zeros((hi - lo, k)))
            .collect();
        for i in lo..hi {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d2 = (x_norms[i] + x_norms[j] - 2.0 * cross[[i - lo, j]]).max(0.0);
                let dist = d2.sqrt();
                for (s, labels) in sums.iter_mut().zip(labelings) {
                    s[[i - lo, labels[j]]] += dist;
                }
            }
        }
        sums
    });
    let mut out: Vec<Array2<f64>> = ks.iter().map(|&k| Array2::zeros((n, k))).collect();
    for (b, blocks) in partials.into_iter().enumerate() {
        let lo = b * block;
        for (o, s) in out.iter_mut().zip(blocks) {
            o.slice_mut(ndarray::s![lo..lo + s.nrows(), ..]).assign(&s);
        }
    }
    out
}

fn silhouette_from_sums(sums: &Array2<f64>, labels: &[usize], counts: &[usize]) -> f64 {
    let n = labels.len();
    let mut total = 0.0;
    for i in 0..n {
        let own = labels[i];
        if counts[own] <= 1 {
            continue; // singleton contributes 0
        }
        let a = sums[[i, own]] / (counts[own] - 1) as f64;
        let mut b = f64::INFINITY;
        for (c, &cnt) in counts.iter().enumerate() {
            if c != own && cnt > 0 {
                b = b.min(sums[[i, c]] / cnt as f64);
            }
        }
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    total / n as f64
}

/// Mean silhouette over all points (Euclidean distances; singleton clusters
/// contribute 0). For n > 5000 a fixed-seed uniform subsample of 5000 rows is
/// scored instead.
pub fn silhouette_score(d: &Dataset, a: &PartitionAssignment) -> Result<f64> {
    silhouette_score_x(&d.features().view(), a.labels(), a.k())
}

pub(crate) fn silhouette_score_x(
    x: &ArrayView2<f64>,
    labels: &[usize],
    k: usize,
) -> Result<f64> {
    if k < 2 {
        return Err(Error::invalid("silhouette requires k >= 2"));
    }
    if labels.len() != x.nrows() {
        return Err(Error::invalid("assignment does not match dataset"));
    }
    let n = x.nrows();
    if n > SILHOUETTE_SUBSAMPLE {
        let idx = subsample_indices(n, SILHOUETTE_SUBSAMPLE);
        let mut xs = Array2::zeros((idx.len(), x.ncols()));
        let mut ls = Vec::with_capacity(idx.len());
        for (r, &i) in idx.iter().enumerate() {
            xs.row_mut(r).assign(&x.row(i));
            ls.push(labels[i]);
        }
        return silhouette_score_x(&xs.view(), &ls, k);
    }
    let sums = distance_sums(x, &[labels], &[k]);
    let mut counts = vec![0usize; k];
    for &l in labels {
        counts[l] += 1;
    }
    Ok(silhouette_from_sums(&sums[0], labels, &counts))
}

/// Deterministic scoring subsample (fixed internal seed).
fn subsample_indices(n: usize, take: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut seed::rng(seed::derive(0x51_1407_7e, "silhouette-subsample", n as u64)));
    idx.truncate(take);
    idx.sort_unstable();
    idx
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KSelection {
    pub k: usize,
    pub silhouette: f64,
    /// True when even the best silhouette is below [`LOW_CLUSTERABILITY`].
    pub low_clusterability: bool,
}

/// Silhouette-maximizing k over the dense range `[k_min, k_max]`
/// (ties to smaller k).
pub fn select_k(d: &Dataset, k_min: usize, k_max: usize, seed_val: u64) -> Result<KSelection> {
    if !(2 <= k_min && k_min <= k_max && k_max <= d.n()) {
        return Err(Error::invalid(format!(
            "select_k requires 2 <= k_min <= k_max <= n, got [{k_min}, {k_max}], n={}",
            d.n()
        )));
    }
    let ks: Vec<usize> = (k_min..=k_max).collect();
    select_k_among(d, &ks, seed_val)
}

/// Silhouette-maximizing k over an explicit candidate list (ties to the
/// earlier entry). All candidates are scored from one pairwise-distance pass.
pub fn select_k_among(d: &Dataset, ks: &[usize], seed_val: u64) -> Result<KSelection> {
    if ks.is_empty() {
        return Err(Error::invalid("select_k_among: empty candidate list"));
    }
    let models = exec::try_map_indexed(ks.len(), |i| {
        fit_kmeans(d, ks[i], seed::derive(seed_val, "select-k", ks[i] as u64),
                   DEFAULT_N_INIT, DEFAULT_MAX_ITER, DEFAULT_TOL)
    })?;

    let x = d.features().view();
    let scores: Vec<f64> = if x.nrows() > SILHOUETTE_SUBSAMPLE {
        models
            .iter()
            .map(|m| silhouette_score_x(&x, m.assignment.labels(), m.assignment.k()))
            .collect::<Result<_>>()?
    } else {
        // Score every candidate labeling from one pairwise-distance pass.
        let labelings: Vec<&[usize]> = models.iter().map(|m| m.assignment.labels()).collect();
        let kvals: Vec<usize> = models.iter().map(|m| m.assignment.k()).collect();
        let sums = distance_sums(&x, &labelings, &kvals);
        models
            .iter()
            .zip(&sums)
            .map(|(m, s)| silhouette_from_sums(s, m.assignment.labels(), &m.assignment.sizes()))
            .collect()
    };

    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    Ok(KSelection {
        k: ks[best],
        silhouette: scores[best],
        low_clusterability: scores[best] < LOW_CLUSTERABILITY,
    })
}

/// Rand index between two labelings: the fraction of point pairs on which
/// they agree (both together or both apart).
pub fn rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    if n < 2 {
        return 1.0;
    }
    let mut agree = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            if (a[i] == a[j]) == (b[i] == b[j]) {
                agree += 1;
            }
        }
    }
    agree as f64 / (n * (n - 1) / 2) as f64
}

/// Candidate grid for automatic k selection: geometric steps from 2 up to
/// min(100, n/10), inclusive of both ends.
pub fn auto_k_grid(n: usize) -> Vec<usize> {
    let cap = (n / 10).min(100).max(2);
    let mut ks = vec![];
    let mut k = 2usize;
    while k < cap {
        ks.push(k);
        k = ((k as f64 * 1.35).ceil() as usize).max(k + 1);
    }
    ks.push(cap);
    ks.dedup();
    ks
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn data(x: Array2<f64>) -> Dataset {
        let n = x.nrows();
        Dataset::new(x, vec![0.0; n], None).unwrap()
    }

    #[test]
    fn k1_is_column_means() {
        let d = data(array![[0.0, 0.0], [2.0, 4.0], [4.0, 2.0]]);
        let m = fit_kmeans(&d, 1, 0, 1, 100, 1e-9).unwrap();
        assert!((m.centroids[[0, 0]] - 2.0).abs() < 1e-12);
        assert!((m.centroids[[0, 1]] - 2.0).abs() < 1e-12);
        // inertia = sum of squared distances to the mean (2, 2)
        let expect = (4.0 + 4.0) + (0.0 + 4.0) + (4.0 + 0.0);
        assert!((m.inertia - expect).abs() < 1e-9);
    }

    #[test]
    fn separated_pairs_split_perfectly() {
        let d = data(array![[0.0, 0.0], [0.1, 0.0], [10.0, 0.0], [10.1, 0.0]]);
        let m = fit_kmeans(&d, 2, 3, 10, 100, 1e-9).unwrap();
        let l = m.assignment.labels();
        assert_eq!(l[0], l[1]);
        assert_eq!(l[2], l[3]);
        assert_ne!(l[0], l[2]);
        let mut cents: Vec<f64> = m.centroids.column(0).to_vec();
        cents.sort_by(f64::total_cmp);
        assert!((cents[0] - 0.05).abs() < 1e-9 && (cents[1] - 10.05).abs() < 1e-9);
    }

    #[test]
    fn inertia_matches_recomputation_and_history_is_monotone() {
        let mut rng = seed::rng(5);
        let x = Array2::from_shape_fn((120, 4), |_| rng.gen::<f64>());
        let d = data(x);
        let m = fit_kmeans(&d, 6, 11, 10, 100, 1e-6).unwrap();
        let mut inertia = 0.0;
        for (i, &l) in m.assignment.labels().iter().enumerate() {
            let diff = &d.features().row(i) - &m.centroids.row(l);
            inertia += diff.iter().map(|v| v * v).sum::<f64>();
        }
        assert!((m.inertia - inertia).abs() <= 1e-8 * inertia.max(1.0));
        for w in m.inertia_history.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-9);
        }
        // each point sits with its nearest centroid
        for (i, &l) in m.assignment.labels().iter().enumerate() {
            for j in 0..6 {
                let dj: f64 = (&d.features().row(i) - &m.centroids.row(j))
                    .iter()
                    .map(|v| v * v)
                    .sum();
            let dl: f64 = (&d.features().row(i) - &m.centroids.row(l))
                    .iter()
                    .map(|v| v * v)
                    .sum();
                assert!(dl <= dj + 1e-9);
            }
        }
    }

    #[test]
    fn determinism_and_seed_sensitivity() {
        let mut rng = seed::rng(6);
        let x = Array2::from_shape_fn((60, 3), |_| rng.gen::<f64>());
        let d = data(x);
        let a = fit_kmeans(&d, 4, 42, 5, 50, 1e-6).unwrap();
        let b = fit_kmeans(&d, 4, 42, 5, 50, 1e-6).unwrap();
        assert_eq!(a.assignment.labels(), b.assignment.labels());
        assert_eq!(a.inertia, b.inertia);
    }

    #[test]
    fn assign_consistency_and_ties() {
        let d = data(array![[0.0], [0.2], [10.0], [10.2]]);
        let m = fit_kmeans(&d, 2, 1, 5, 50, 1e-9).unwrap();
        let again = assign(&m, &d.features().view()).unwrap();
        assert_eq!(again, m.assignment.labels());
        // equidistant point goes to the lower centroid index
        let mid = array![[5.1]];
        let l = assign(&m, &mid.view()).unwrap();
        let c0 = m.centroids[[0, 0]];
        let c1 = m.centroids[[1, 0]];
        let expected = if (5.1 - c0).abs() <= (5.1 - c1).abs() { 0 } else { 1 };
        assert_eq!(l[0], expected);
        assert!(assign(&m, &array![[1.0, 2.0]].view()).is_err());
    }

    #[test]
    fn silhouette_two_tight_far_clusters() {
        let x = array![[0.0, 0.0], [0.1, 0.0], [100.0, 0.0], [100.1, 0.0]];
        let d = data(x);
        let a = PartitionAssignment::new(vec![0, 0, 1, 1], 2).unwrap();
        let s = silhouette_score(&d, &a).unwrap();
        assert!(s > 0.9, "{s}");
        // hand value: a=0.1, b=100 for every point -> (100-0.1)/100
        assert!((s - 0.999).abs() < 1e-9);
    }

    #[test]
    fn silhouette_interleaved_is_near_zero() {
        let mut rng = seed::rng(8);
        let x = Array2::from_shape_fn((400, 2), |_| rng.gen::<f64>());
        let d = data(x);
        let labels: Vec<usize> = (0..400).map(|i| i % 2).collect();
        let s = silhouette_score(&d, &PartitionAssignment::new(labels, 2).unwrap()).unwrap();
        assert!(s.abs() < 0.1, "{s}");
    }

    #[test]
    fn silhouette_singleton_convention() {
        let x = array![[1.0], [1.0]];
        let d = data(x);
        let a = PartitionAssignment::new(vec![0, 1], 2).unwrap();
        assert_eq!(silhouette_score(&d, &a).unwrap(), 0.0);
    }

    #[test]
    fn silhouette_is_relabeling_invariant() {
        let mut rng = seed::rng(9);
        let x = Array2::from_shape_fn((90, 3), |_| rng.gen::<f64>());
        let d = data(x);
        let labels: Vec<usize> = (0..90).map(|i| i % 3).collect();
        let flipped: Vec<usize> = labels.iter().map(|&l| [2, 0, 1][l]).collect();
        let s1 = silhouette_score(&d, &PartitionAssignment::new(labels, 3).unwrap()).unwrap();
        let s2 = silhouette_score(&d, &PartitionAssignment::new(flipped, 3).unwrap()).unwrap();
        assert!((s1 - s2).abs() < 1e-12);
    }

    #[test]
    fn select_k_finds_three_blobs() {
        let mut rng = seed::rng(12);
        let mut x = Array2::zeros((150, 2));
        for i in 0..150 {
            let c = i / 50;
            x[[i, 0]] = [0.0, 20.0, 40.0][c] + rng.gen::<f64>();
            x[[i, 1]] = [0.0, 15.0, -15.0][c] + rng.gen::<f64>();
        }
        let d = data(x);
        let sel = select_k(&d, 2, 6, 7).unwrap();
        assert_eq!(sel.k, 3);
        assert!(!sel.low_clusterability);
    }

    #[test]
    fn select_k_degenerate_range() {
        let mut rng = seed::rng(13);
        let x = Array2::from_shape_fn((40, 2), |_| rng.gen::<f64>());
        let d = data(x);
        assert_eq!(select_k(&d, 2, 2, 0).unwrap().k, 2);
    }

    #[test]
    fn select_k_flags_uniform_blob() {
        // In 10 dimensions a structureless blob scores well under 0.3.
        let mut rng = seed::rng(14);
        let x = Array2::from_shape_fn((300, 10), |_| rng.gen::<f64>());
        let d = data(x);
        let sel = select_k(&d, 2, 5, 3).unwrap();
        assert!(sel.low_clusterability, "silhouette {}", sel.silhouette);
    }

    #[test]
    fn rand_index_hand_values() {
        assert_eq!(rand_index(&[0, 0, 1, 1], &[1, 1, 0, 0]), 1.0);
        assert_eq!(rand_index(&[0, 0, 1, 1], &[0, 0, 0, 0]), 2.0 / 6.0);
        assert_eq!(rand_index(&[0, 1, 2], &[2, 1, 0]), 1.0);
    }

    #[test]
    fn auto_grid_spans_range() {
        let ks = auto_k_grid(2500);
        assert_eq!(ks[0], 2);
        assert_eq!(*ks.last().unwrap(), 100);
        assert!(ks.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(auto_k_grid(50), vec![2, 3, 5]);
    }
}
