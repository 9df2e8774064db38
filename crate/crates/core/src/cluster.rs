//! K-means clustering with restarts, elbow selection and cluster queries.
//!
//! Lloyd's algorithm seeded from k distinct random data points. Each restart
//! draws from a PRNG stream derived from `(seed, restart)`, so the result is
//! bit-identical however restarts are scheduled. Nearest-centroid ties break
//! toward the lowest centroid index; an empty cluster is repaired by
//! reseeding it with the point farthest from its assigned centroid.

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;
use crate::rng::SplitMix64;
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

/// A fitted k-means clustering.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansModel {
    pub k: usize,
    /// k x d centroid matrix.
    pub centroids: Matrix,
    /// Cluster index per row; always the nearest centroid.
    pub assignments: Vec<usize>,
    /// Sum of squared distances from rows to their assigned centroid.
    pub inertia: f64,
    pub seed: u64,
    pub iterations_run: usize,
    pub restarts: usize,
}

/// Centroid initialization strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitMethod {
    /// k distinct random data points.
    #[default]
    RandomPoints,
    /// Greedy k-means++ style seeding (farthest-point refinement).
    PlusPlus,
}

/// Tuning knobs for [`kmeans_fit`].
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub init: InitMethod,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        KMeansOptions {
            restarts: 10,
            max_iter: 300,
            tol: 1e-4,
            init: InitMethod::RandomPoints,
        }
    }
}

/// One Lloyd run, with the inertia recorded after every iteration.
#[derive(Debug, Clone)]
pub struct LloydRun {
    pub centroids: Matrix,
    pub assignments: Vec<usize>,
    pub inertia: f64,
    pub iterations: usize,
    pub inertia_trace: Vec<f64>,
}

/// Best-of-restarts k-means fit.
pub fn kmeans_fit(
    points: &Matrix,
    k: usize,
    seed: u64,
    opts: &KMeansOptions,
) -> Result<KMeansModel> {
    let n = points.rows();
    if k == 0 {
        return Err(Error::Domain("k must be positive".to_string()));
    }
    if k > n {
        return Err(Error::Cardinality(format!("k = {k} exceeds {n} points")));
    }
    if distinct_row_count(points, k) < k {
        return Err(Error::Cardinality(format!(
            "k = {k} exceeds the number of distinct points"
        )));
    }
    let restarts = opts.restarts.max(1);
    let mut best: Option<LloydRun> = None;
    for r in 0..restarts {
        let mut rng = SplitMix64::stream(seed, r as u64);
        let centroids = initial_centroids(points, k, opts.init, &mut rng);
        let run = lloyd(points, &centroids, opts.max_iter, opts.tol);
        let better = match &best {
            None => true,
            Some(b) => run.inertia < b.inertia,
        };
        if better {
            best = Some(run);
        }
    }
    let run = best.expect("at least one restart");
    Ok(KMeansModel {
        k,
        centroids: run.centroids,
        assignments: run.assignments,
        inertia: run.inertia,
        seed,
        iterations_run: run.iterations,
        restarts,
    })
}

/// Lloyd iteration from explicit starting centroids.
///
/// Exposed so callers can warm-start (the elbow sweep does) and tests can
/// inspect the per-iteration inertia trace.
pub fn lloyd(points: &Matrix, start: &Matrix, max_iter: usize, tol: f64) -> LloydRun {
    let k = start.rows();
    let mut centroids = start.clone();
    let mut assignments = assign_all(points, &centroids);
    repair_empty_clusters(points, &mut centroids, &mut assignments);
    let mut trace = Vec::new();
    let mut iterations = 0;

    loop {
        let mut new_centroids = cluster_means(points, &assignments, k);
        let shift = max_centroid_shift(&centroids, &new_centroids);
        let mut new_assignments = assign_all(points, &new_centroids);
        repair_empty_clusters(points, &mut new_centroids, &mut new_assignments);
        iterations += 1;

        let inertia_now = inertia_unchecked(points, &new_centroids, &new_assignments);
        trace.push(inertia_now);

        let stable = new_assignments == assignments;
        centroids = new_centroids;
        assignments = new_assignments;
        if stable || shift < tol || iterations >= max_iter {
            return LloydRun {
                centroids,
                assignments,
                inertia: inertia_now,
                iterations,
                inertia_trace: trace,
            };
        }
    }
}

/// Sum of squared Euclidean distances from each point to its assigned
/// centroid.
pub fn inertia(points: &Matrix, centroids: &Matrix, assignments: &[usize]) -> Result<f64> {
    if assignments.len() != points.rows() {
        return Err(Error::Shape(format!(
            "{} assignments for {} points",
            assignments.len(),
            points.rows()
        )));
    }
    if points.cols() != centroids.cols() {
        return Err(Error::Shape(format!(
            "points have {} dims, centroids {}",
            points.cols(),
            centroids.cols()
        )));
    }
    if let Some(&bad) = assignments.iter().find(|&&a| a >= centroids.rows()) {
        return Err(Error::Range(format!(
            "assignment {bad} out of range for {} centroids",
            centroids.rows()
        )));
    }
    Ok(inertia_unchecked(points, centroids, assignments))
}

fn inertia_unchecked(points: &Matrix, centroids: &Matrix, assignments: &[usize]) -> f64 {
    assignments
        .iter()
        .enumerate()
        .map(|(i, &a)| math::sq_dist(points.row(i), centroids.row(a)))
        .sum()
}

/// Elbow curve over a k sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ElbowCurve {
    pub ks: Vec<usize>,
    pub inertias: Vec<f64>,
    pub chosen_k: usize,
}

/// Fit every k in `k_min..=k_max` and pick the elbow: the interior k whose
/// point on the curve lies farthest from the chord joining the endpoints,
/// ties toward the smallest k.
///
/// Besides the usual restarts, each k also tries a warm start built from the
/// previous k's best centroids plus the worst-fit point, which keeps the
/// curve non-increasing in k.
pub fn elbow_sweep(
    points: &Matrix,
    k_min: usize,
    k_max: usize,
    seed: u64,
    opts: &KMeansOptions,
) -> Result<ElbowCurve> {
    if k_min == 0 {
        return Err(Error::Domain("k_min must be positive".to_string()));
    }
    if k_min >= k_max {
        return Err(Error::Range(format!(
            "k_min = {k_min} must be below k_max = {k_max}"
        )));
    }
    if k_max > points.rows() {
        return Err(Error::Cardinality(format!(
            "k_max = {k_max} exceeds {} points",
            points.rows()
        )));
    }

    let mut ks = Vec::new();
    let mut inertias = Vec::new();
    let mut prev: Option<KMeansModel> = None;
    for k in k_min..=k_max {
        let mut model = kmeans_fit(points, k, seed, opts)?;
        if let Some(p) = &prev {
            if let Some(warm) = extend_centroids(points, p) {
                let run = lloyd(points, &warm, opts.max_iter, opts.tol);
                if run.inertia < model.inertia {
                    model = KMeansModel {
                        k,
                        centroids: run.centroids,
                        assignments: run.assignments,
                        inertia: run.inertia,
                        seed,
                        iterations_run: run.iterations,
                        restarts: model.restarts,
                    };
                }
            }
        }
        ks.push(k);
        inertias.push(model.inertia);
        prev = Some(model);
    }

    let chosen_k = elbow_point(&ks, &inertias);
    Ok(ElbowCurve {
        ks,
        inertias,
        chosen_k,
    })
}

/// Interior k maximizing perpendicular distance to the endpoint chord.
fn elbow_point(ks: &[usize], inertias: &[f64]) -> usize {
    debug_assert!(ks.len() >= 2);
    if ks.len() == 2 {
        return ks[0];
    }
    let x0 = ks[0] as f64;
    let y0 = inertias[0];
    let dx = (ks[ks.len() - 1] as f64) - x0;
    let dy = inertias[ks.len() - 1] - y0;
    let chord_len = math::sqrt(dx * dx + dy * dy).max(f64::MIN_POSITIVE);

    let mut best_k = ks[1];
    let mut best_dist = f64::NEG_INFINITY;
    for i in 1..ks.len() - 1 {
        let px = ks[i] as f64 - x0;
        let py = inertias[i] - y0;
        let dist = math::abs(px * dy - py * dx) / chord_len;
        if dist > best_dist {
            best_dist = dist;
            best_k = ks[i];
        }
    }
    best_k
}

/// Previous best centroids plus the point farthest from its assigned
/// centroid; None when every point sits on a centroid.
fn extend_centroids(points: &Matrix, prev: &KMeansModel) -> Option<Matrix> {
    let far = farthest_point(points, &prev.centroids, &prev.assignments)?;
    let d = points.cols();
    let mut data = Vec::with_capacity((prev.k + 1) * d);
    data.extend_from_slice(prev.centroids.data());
    data.extend_from_slice(points.row(far));
    Matrix::from_vec(prev.k + 1, d, data).ok()
}

/// Row indices of the m members of `cluster` nearest to its centroid,
/// ascending by distance, ties toward the lower row index.
pub fn nearest_to_centroid(
    model: &KMeansModel,
    points: &Matrix,
    cluster: usize,
    m: usize,
) -> Result<Vec<usize>> {
    if cluster >= model.k {
        return Err(Error::Range(format!(
            "cluster {cluster} out of range for k = {}",
            model.k
        )));
    }
    let mut members: Vec<(f64, usize)> = model
        .assignments
        .iter()
        .enumerate()
        .filter(|(_, &a)| a == cluster)
        .map(|(i, _)| {
            (
                math::sq_dist(points.row(i), model.centroids.row(cluster)),
                i,
            )
        })
        .collect();
    if m > members.len() {
        return Err(Error::Cardinality(format!(
            "m = {m} exceeds cluster population {}",
            members.len()
        )));
    }
    members.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1)));
    Ok(members.into_iter().take(m).map(|(_, i)| i).collect())
}

/// Adjusted Rand index between two labelings of the same rows.
///
/// 1 for identical partitions, near 0 for independent ones. Defined as 1
/// when the correction denominator vanishes (both sides one cluster).
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "label vectors of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::InsufficientData("empty labelings".to_string()));
    }
    let ka = a.iter().max().unwrap() + 1;
    let kb = b.iter().max().unwrap() + 1;
    let mut table = vec![vec![0u64; kb]; ka];
    for (&x, &y) in a.iter().zip(b.iter()) {
        table[x][y] += 1;
    }
    let comb2 = |x: u64| (x * x.saturating_sub(1)) as f64 / 2.0;

    let sum_ij: f64 = table.iter().flatten().map(|&n| comb2(n)).sum();
    let sum_a: f64 = table.iter().map(|row| comb2(row.iter().sum::<u64>())).sum();
    let sum_b: f64 = (0..kb)
        .map(|j| comb2(table.iter().map(|row| row[j]).sum::<u64>()))
        .sum();
    let total = comb2(a.len() as u64);

    let expected = sum_a * sum_b / total;
    let max_index = 0.5 * (sum_a + sum_b);
    if (max_index - expected).abs() < 1e-12 {
        return Ok(1.0);
    }
    Ok((sum_ij - expected) / (max_index - expected))
}

fn distinct_row_count(points: &Matrix, needed: usize) -> usize {
    let mut rows: Vec<&[f64]> = points.iter_rows().collect();
    rows.sort_by(|a, b| a.partial_cmp(b).expect("finite rows"));
    rows.dedup();
    rows.len().min(needed)
}

fn initial_centroids(points: &Matrix, k: usize, init: InitMethod, rng: &mut SplitMix64) -> Matrix {
    let d = points.cols();
    match init {
        InitMethod::RandomPoints => {
            let idx = distinct_point_sample(points, k, rng);
            let mut data = Vec::with_capacity(k * d);
            for i in idx {
                data.extend_from_slice(points.row(i));
            }
            Matrix::from_vec(k, d, data).expect("consistent dims")
        }
        InitMethod::PlusPlus => {
            let mut data = Vec::with_capacity(k * d);
            let first = rng.next_index(points.rows());
            data.extend_from_slice(points.row(first));
            while data.len() < k * d {
                let chosen = data.len() / d;
                let mut best = (f64::NEG_INFINITY, 0usize);
                for i in 0..points.rows() {
                    let mut min_d = f64::INFINITY;
                    for c in 0..chosen {
                        let cd = math::sq_dist(points.row(i), &data[c * d..(c + 1) * d]);
                        if cd < min_d {
                            min_d = cd;
                        }
                    }
                    if min_d > best.0 {
                        best = (min_d, i);
                    }
                }
                data.extend_from_slice(points.row(best.1));
            }
            Matrix::from_vec(k, d, data).expect("consistent dims")
        }
    }
}

/// Sample k row indices whose points are pairwise distinct.
fn distinct_point_sample(points: &Matrix, k: usize, rng: &mut SplitMix64) -> Vec<usize> {
    let n = points.rows();
    let order = rng.sample_indices(n, n);
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    for i in order {
        if chosen.iter().all(|&c| points.row(c) != points.row(i)) {
            chosen.push(i);
            if chosen.len() == k {
                break;
            }
        }
    }
    debug_assert_eq!(chosen.len(), k, "caller guarantees k distinct points");
    chosen
}

fn assign_all(points: &Matrix, centroids: &Matrix) -> Vec<usize> {
    (0..points.rows())
        .map(|i| nearest_centroid(points.row(i), centroids))
        .collect()
}

#[inline]
fn nearest_centroid(point: &[f64], centroids: &Matrix) -> usize {
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for c in 0..centroids.rows() {
        let d = math::sq_dist(point, centroids.row(c));
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

fn cluster_means(points: &Matrix, assignments: &[usize], k: usize) -> Matrix {
    let d = points.cols();
    let mut sums = Matrix::zeros(k, d);
    let mut counts = vec![0usize; k];
    for (i, &a) in assignments.iter().enumerate() {
        counts[a] += 1;
        for j in 0..d {
            sums.set(a, j, sums.get(a, j) + points.get(i, j));
        }
    }
    for (c, &count) in counts.iter().enumerate() {
        if count > 0 {
            for j in 0..d {
                sums.set(c, j, sums.get(c, j) / count as f64);
            }
        }
    }
    sums
}

fn max_centroid_shift(old: &Matrix, new: &Matrix) -> f64 {
    (0..old.rows())
        .map(|c| math::sqrt(math::sq_dist(old.row(c), new.row(c))))
        .fold(0.0, f64::max)
}

/// The point with the greatest positive distance to its assigned centroid,
/// among clusters holding more than one member. Ties toward the lowest row
/// index; None when every such point lies on its centroid.
fn farthest_point(points: &Matrix, centroids: &Matrix, assignments: &[usize]) -> Option<usize> {
    let k = centroids.rows();
    let mut counts = vec![0usize; k];
    for &a in assignments {
        counts[a] += 1;
    }
    let mut best: Option<(f64, usize)> = None;
    for (i, &a) in assignments.iter().enumerate() {
        if counts[a] <= 1 {
            continue;
        }
        let d = math::sq_dist(points.row(i), centroids.row(a));
        if d == 0.0 {
            continue;
        }
        match best {
            Some((bd, _)) if bd >= d => {}
            _ => best = Some((d, i)),
        }
    }
    best.map(|(_, i)| i)
}

/// Move the worst-fit point into each empty cluster, then re-derive
/// assignments so the nearest-centroid invariant holds on return.
fn repair_empty_clusters(points: &Matrix, centroids: &mut Matrix, assignments: &mut Vec<usize>) {
    let k = centroids.rows();
    let d = points.cols();
    for _ in 0..2 * k {
        let mut counts = vec![0usize; k];
        for &a in assignments.iter() {
            counts[a] += 1;
        }
        let empty = match (0..k).find(|&c| counts[c] == 0) {
            None => return,
            Some(c) => c,
        };
        let far = match farthest_point(points, centroids, assignments) {
            Some(i) => i,
            // every point coincides with its centroid: seed from the first
            // multiply-occupied cluster instead
            None => match assignments.iter().enumerate().find(|(_, &a)| counts[a] > 1) {
                Some((i, _)) => i,
                None => return,
            },
        };
        for j in 0..d {
            centroids.set(empty, j, points.get(far, j));
        }
        // a relocated centroid changes the Voronoi cells; refresh, keeping
        // the seeded point in its new cluster on exact ties
        *assignments = assign_all(points, centroids);
        assignments[far] = empty;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points_1d(xs: &[f64]) -> Matrix {
        Matrix::from_vec(xs.len(), 1, xs.to_vec()).unwrap()
    }

    /// Exhaustive optimum over all assignments; usable for n <= 12, k <= 3.
    fn exhaustive_best_inertia(points: &Matrix, k: usize) -> f64 {
        let n = points.rows();
        let mut best = f64::INFINITY;
        let total = (k as u64).pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let mut assignment = Vec::with_capacity(n);
            for _ in 0..n {
                assignment.push((c % k as u64) as usize);
                c /= k as u64;
            }
            let mut counts = vec![0usize; k];
            for &a in &assignment {
                counts[a] += 1;
            }
            if counts.iter().any(|&c| c == 0) {
                continue;
            }
            let centroids = cluster_means(points, &assignment, k);
            let i = inertia_unchecked(points, &centroids, &assignment);
            if i < best {
                best = i;
            }
        }
        best
    }

    #[test]
    fn two_cluster_line() {
        let pts = points_1d(&[0.0, 1.0, 10.0, 11.0]);
        let m = kmeans_fit(&pts, 2, 42, &KMeansOptions::default()).unwrap();
        let mut cs: Vec<f64> = (0..2).map(|c| m.centroids.get(c, 0)).collect();
        cs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(cs, vec![0.5, 10.5]);
        assert!((m.inertia - 1.0).abs() < 1e-12);
        assert_eq!(m.assignments[0], m.assignments[1]);
        assert_eq!(m.assignments[2], m.assignments[3]);
        assert_ne!(m.assignments[0], m.assignments[2]);

        let opt = exhaustive_best_inertia(&pts, 2);
        assert!((m.inertia - opt).abs() < 1e-12);
    }

    #[test]
    fn k_equals_n_zero_inertia() {
        let pts = points_1d(&[1.0, 5.0, 9.0, 13.0]);
        let m = kmeans_fit(&pts, 4, 7, &KMeansOptions::default()).unwrap();
        assert_eq!(m.inertia, 0.0);
        let mut seen = m.assignments.clone();
        seen.sort_unstable();
        assert_eq!(seen, vec![0, 1, 2, 3]);
    }

    #[test]
    fn k_larger_than_n_rejected() {
        let pts = points_1d(&[1.0, 2.0]);
        assert!(matches!(
            kmeans_fit(&pts, 3, 1, &KMeansOptions::default()),
            Err(Error::Cardinality(_))
        ));
        assert!(matches!(
            kmeans_fit(&pts, 0, 1, &KMeansOptions::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn k_exceeding_distinct_points_rejected() {
        let pts = points_1d(&[3.0, 3.0, 3.0]);
        assert!(matches!(
            kmeans_fit(&pts, 2, 1, &KMeansOptions::default()),
            Err(Error::Cardinality(_))
        ));
    }

    #[test]
    fn assignments_are_nearest_and_no_cluster_empty() {
        let mut rng = SplitMix64::new(17);
        for trial in 0..20 {
            let n = 12;
            let mut data = Vec::new();
            for _ in 0..n * 2 {
                data.push(rng.next_normal());
            }
            let pts = Matrix::from_vec(n, 2, data).unwrap();
            let k = 1 + (trial % 3);
            let m = kmeans_fit(&pts, k, trial as u64, &KMeansOptions::default()).unwrap();

            let mut counts = vec![0usize; k];
            for (i, &a) in m.assignments.iter().enumerate() {
                counts[a] += 1;
                let d_assigned = math::sq_dist(pts.row(i), m.centroids.row(a));
                for c in 0..k {
                    let d = math::sq_dist(pts.row(i), m.centroids.row(c));
                    assert!(d_assigned <= d + 1e-12);
                }
            }
            assert!(counts.iter().all(|&c| c > 0), "empty cluster");
            let check = inertia(&pts, &m.centroids, &m.assignments).unwrap();
            assert!((check - m.inertia).abs() < 1e-9);
        }
    }

    #[test]
    fn inertia_examples() {
        // every point on its centroid
        let pts = points_1d(&[2.0, 4.0]);
        let cents = points_1d(&[2.0, 4.0]);
        assert_eq!(inertia(&pts, &cents, &[0, 1]).unwrap(), 0.0);

        // one point at distance 2
        let pts = points_1d(&[3.0]);
        let cents = points_1d(&[1.0]);
        assert_eq!(inertia(&pts, &cents, &[0]).unwrap(), 4.0);

        // the four-point example: 4 * 0.25
        let pts = points_1d(&[0.0, 1.0, 10.0, 11.0]);
        let cents = points_1d(&[0.5, 10.5]);
        assert!((inertia(&pts, &cents, &[0, 0, 1, 1]).unwrap() - 1.0).abs() < 1e-12);

        assert!(matches!(
            inertia(&pts, &cents, &[0, 0, 1, 5]),
            Err(Error::Range(_))
        ));
        assert!(matches!(
            inertia(&pts, &cents, &[0, 0]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn lloyd_inertia_non_increasing() {
        let mut rng = SplitMix64::new(3);
        for trial in 0..50 {
            let n = 30;
            let mut data = Vec::new();
            for _ in 0..n * 2 {
                data.push(rng.next_normal() * 5.0);
            }
            let pts = Matrix::from_vec(n, 2, data).unwrap();
            let mut init_rng = SplitMix64::stream(trial, 0);
            let start = initial_centroids(&pts, 3, InitMethod::RandomPoints, &mut init_rng);
            let run = lloyd(&pts, &start, 300, 1e-4);
            for w in run.inertia_trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "inertia rose: {} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn best_of_restarts_not_worse_than_each() {
        let mut rng = SplitMix64::new(9);
        let mut data = Vec::new();
        for _ in 0..40 {
            data.push(rng.next_normal());
        }
        let pts = Matrix::from_vec(20, 2, data).unwrap();
        let opts = KMeansOptions::default();
        let best = kmeans_fit(&pts, 3, 123, &opts).unwrap();
        for r in 0..opts.restarts {
            let mut rng = SplitMix64::stream(123, r as u64);
            let start = initial_centroids(&pts, 3, InitMethod::RandomPoints, &mut rng);
            let run = lloyd(&pts, &start, opts.max_iter, opts.tol);
            assert!(best.inertia <= run.inertia + 1e-12);
        }
    }

    #[test]
    fn matches_exhaustive_optimum_on_small_instances() {
        let mut rng = SplitMix64::new(21);
        for trial in 0..15 {
            let n = 8 + (trial % 5);
            let k = 2 + (trial % 2);
            let mut data = Vec::new();
            for _ in 0..n {
                data.push(rng.next_normal() * 3.0);
            }
            let pts = points_1d(&data);
            let m = kmeans_fit(&pts, k, trial as u64, &KMeansOptions::default()).unwrap();
            let opt = exhaustive_best_inertia(&pts, k);
            assert!(
                m.inertia >= opt - 1e-9,
                "found inertia {} below optimum {opt}",
                m.inertia
            );
        }
    }

    #[test]
    fn deterministic_across_runs() {
        let mut rng = SplitMix64::new(33);
        let mut data = Vec::new();
        for _ in 0..60 {
            data.push(rng.next_normal());
        }
        let pts = Matrix::from_vec(30, 2, data).unwrap();
        let a = kmeans_fit(&pts, 3, 99, &KMeansOptions::default()).unwrap();
        let b = kmeans_fit(&pts, 3, 99, &KMeansOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_cluster_repair() {
        // one centroid far from all data starts empty
        let pts = points_1d(&[1.0, 2.0, 3.0]);
        let start = points_1d(&[2.0, 1337.0]);
        let run = lloyd(&pts, &start, 100, 1e-6);
        let mut counts = [0usize; 2];
        for &a in &run.assignments {
            counts[a] += 1;
        }
        assert!(counts.iter().all(|&c| c > 0));
        assert!((run.inertia - 0.5).abs() < 1e-12);
    }

    #[test]
    fn elbow_on_hand_curve() {
        assert_eq!(
            elbow_point(&[1, 2, 3, 4, 5], &[100.0, 20.0, 18.0, 16.0, 14.0]),
            2
        );
        // exactly linear: every interior distance is 0, ties -> smallest
        assert_eq!(elbow_point(&[1, 2, 3, 4], &[40.0, 30.0, 20.0, 10.0]), 2);
    }

    #[test]
    fn elbow_scale_invariance() {
        let ks = [1, 2, 3, 4, 5, 6];
        let inertias = [55.0, 30.0, 9.0, 7.0, 6.0, 5.5];
        let scaled: Vec<f64> = inertias.iter().map(|i| i * 1000.0).collect();
        assert_eq!(elbow_point(&ks, &inertias), elbow_point(&ks, &scaled));
    }

    #[test]
    fn elbow_sweep_monotone_and_finds_three_blobs() {
        let mut rng = SplitMix64::new(5);
        let mut data = Vec::new();
        let centers = [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0)];
        for i in 0..90 {
            let (cx, cy) = centers[i % 3];
            data.push(cx + rng.next_normal() * 0.5);
            data.push(cy + rng.next_normal() * 0.5);
        }
        let pts = Matrix::from_vec(90, 2, data).unwrap();
        let curve = elbow_sweep(&pts, 1, 8, 42, &KMeansOptions::default()).unwrap();
        assert_eq!(curve.chosen_k, 3);
        for w in curve.inertias.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "curve not monotone: {w:?}");
        }
    }

    #[test]
    fn elbow_sweep_range_errors() {
        let pts = points_1d(&[1.0, 2.0, 3.0]);
        assert!(matches!(
            elbow_sweep(&pts, 3, 3, 0, &KMeansOptions::default()),
            Err(Error::Range(_))
        ));
        assert!(matches!(
            elbow_sweep(&pts, 1, 9, 0, &KMeansOptions::default()),
            Err(Error::Cardinality(_))
        ));
    }

    #[test]
    fn nearest_members_ordering_and_ties() {
        let pts = points_1d(&[0.0, 1.0, 10.0, 11.0]);
        let m = kmeans_fit(&pts, 2, 42, &KMeansOptions::default()).unwrap();
        let low_cluster = m.assignments[0];

        // m = cluster size returns all members
        let all = nearest_to_centroid(&m, &pts, low_cluster, 2).unwrap();
        assert_eq!(all.len(), 2);
        assert!(all.contains(&0) && all.contains(&1));

        // equidistant members: the tie goes to the lower row index
        let one = nearest_to_centroid(&m, &pts, low_cluster, 1).unwrap();
        assert_eq!(one, vec![0]);

        assert!(matches!(
            nearest_to_centroid(&m, &pts, low_cluster, 3),
            Err(Error::Cardinality(_))
        ));
        assert!(matches!(
            nearest_to_centroid(&m, &pts, 5, 1),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn plus_plus_init_works() {
        let pts = points_1d(&[0.0, 1.0, 10.0, 11.0]);
        let opts = KMeansOptions {
            init: InitMethod::PlusPlus,
            ..KMeansOptions::default()
        };
        let m = kmeans_fit(&pts, 2, 42, &opts).unwrap();
        assert!((m.inertia - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ari_bounds_and_examples() {
        let a = vec![0, 0, 1, 1, 2, 2];
        assert_eq!(adjusted_rand_index(&a, &a).unwrap(), 1.0);

        // permuted labels still match perfectly
        let b = vec![2, 2, 0, 0, 1, 1];
        assert_eq!(adjusted_rand_index(&a, &b).unwrap(), 1.0);

        // unrelated labels score near zero
        let mut rng = SplitMix64::new(13);
        let x: Vec<usize> = (0..2000).map(|_| rng.next_index(3)).collect();
        let y: Vec<usize> = (0..2000).map(|_| rng.next_index(3)).collect();
        let ari = adjusted_rand_index(&x, &y).unwrap();
        assert!(ari.abs() < 0.05, "ari {ari}");

        assert!(matches!(
            adjusted_rand_index(&[0, 1], &[0]),
            Err(Error::Shape(_))
        ));
    }
}
