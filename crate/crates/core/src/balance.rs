//! SMOTE oversampling of the minority class in (normalised) feature space.

use ndarray::{Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoteConfig {
    pub k_neighbors: usize,
    /// Desired minority row count after oversampling.
    pub target_count: usize,
    pub seed: u64,
}

/// How one synthetic row was made: `base + u * (neighbor - base)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticOrigin {
    pub base: usize,
    pub neighbor: usize,
    pub u: f64,
}

#[derive(Debug, Clone)]
pub struct SmoteOutput {
    pub rows: Array2<f64>,
    pub origins: Vec<SyntheticOrigin>,
}

/// Indices of the `k` nearest rows to row `i` (Euclidean, excluding `i`),
/// nearest first, distance ties broken by lower index.
pub fn nearest_neighbors(x: ArrayView2<f64>, i: usize, k: usize) -> Vec<usize> {
    let q = x.row(i);
    let mut d: Vec<(f64, usize)> = x
        .axis_iter(Axis(0))
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(j, r)| (r.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum(), j))
        .collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    d.into_iter().take(k).map(|(_, j)| j).collect()
}

/// Generates `target_count - minority rows` synthetic rows.
///
/// Base rows are taken round-robin; for each, one of its `k` nearest
/// minority neighbours is drawn uniformly, then `u ~ U[0, 1)`.
pub fn smote(minority: ArrayView2<f64>, cfg: &SmoteConfig) -> Result<SmoteOutput> {
    let n = minority.nrows();
    if cfg.k_neighbors == 0 {
        return Err(Error::Config("SMOTE needs k >= 1".into()));
    }
    if n < cfg.k_neighbors + 1 {
        return Err(Error::InsufficientData(format!(
            "SMOTE with k = {} needs at least {} minority rows, got {n}",
            cfg.k_neighbors,
            cfg.k_neighbors + 1
        )));
    }
    if cfg.target_count < n {
        return Err(Error::Config(format!(
            "target count {} is below the minority count {n}",
            cfg.target_count
        )));
    }

    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| nearest_neighbors(minority, i, cfg.k_neighbors))
        .collect();
    let n_new = cfg.target_count - n;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Array2::zeros((n_new, minority.ncols()));
    let mut origins = Vec::with_capacity(n_new);
    for (s, mut out) in rows.axis_iter_mut(Axis(0)).enumerate() {
        let base = s % n;
        let neighbor = neighbors[base][rng.random_range(0..cfg.k_neighbors)];
        let u: f64 = rng.random();
        let (x, y) = (minority.row(base), minority.row(neighbor));
        for ((o, &a), &b) in out.iter_mut().zip(x).zip(y) {
            // Clamp so rounding never leaves the segment between a and b.
            *o = (a + u * (b - a)).clamp(a.min(b), a.max(b));
        }
        origins.push(SyntheticOrigin { base, neighbor, u });
    }
    Ok(SmoteOutput { rows, origins })
}

/// Class composition before and after balancing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceSummary {
    pub minority_class: usize,
    pub minority_before: usize,
    pub majority_count: usize,
    pub synthetic: usize,
}

/// Oversamples the smaller of exactly two classes until both have the
/// majority count. Original rows come first, synthetic rows are appended.
pub fn balance_training_set(
    x: ArrayView2<f64>,
    y: &[usize],
    k_neighbors: usize,
    seed: u64,
) -> Result<(Array2<f64>, Vec<usize>, BalanceSummary)> {
    if x.nrows() != y.len() {
        return Err(Error::Dimension {
            expected: x.nrows(),
            found: y.len(),
        });
    }
    let mut classes: Vec<usize> = y.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() != 2 {
        return Err(Error::DegenerateData(format!(
            "balancing needs exactly two classes, found {}",
            classes.len()
        )));
    }
    let count = |c: usize| y.iter().filter(|&&l| l == c).count();
    let (c0, c1) = (count(classes[0]), count(classes[1]));
    // On equal counts nothing is generated.
    let (minority_class, minority_n, majority_n) = if c1 < c0 {
        (classes[1], c1, c0)
    } else {
        (classes[0], c0, c1)
    };
    let summary = BalanceSummary {
        minority_class,
        minority_before: minority_n,
        majority_count: majority_n,
        synthetic: majority_n - minority_n,
    };
    if minority_n == majority_n {
        return Ok((x.to_owned(), y.to_vec(), summary));
    }

    let idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == minority_class).collect();
    let minority = x.select(Axis(0), &idx);
    let out = smote(
        minority.view(),
        &SmoteConfig {
            k_neighbors,
            target_count: majority_n,
            seed,
        },
    )?;
    let xs = ndarray::concatenate(Axis(0), &[x, out.rows.view()])
        .map_err(|e| Error::Numeric(e.to_string()))?;
    let mut ys = y.to_vec();
    ys.extend(std::iter::repeat_n(minority_class, out.rows.nrows()));
    Ok((xs, ys, summary))
}
