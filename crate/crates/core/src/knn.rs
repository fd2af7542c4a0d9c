//! Brute-force k-nearest-neighbours classifier.

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    x: Array2<f64>,
    y: Vec<usize>,
    k: usize,
    classes: usize,
}

impl KnnModel {
    pub const DEFAULT_K: usize = 5;

    /// Stores the training rows. `1 <= k <= rows` is required.
    pub fn fit(x: ArrayView2<f64>, y: &[usize], k: usize) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::Dimension {
                expected: x.nrows(),
                found: y.len(),
            });
        }
        if k == 0 || k > x.nrows() {
            return Err(Error::Config(format!(
                "k must be in 1..={}, got {k}",
                x.nrows()
            )));
        }
        Ok(KnnModel {
            x: x.to_owned(),
            y: y.to_vec(),
            k,
            classes: y.iter().max().map_or(1, |m| m + 1),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn training_rows(&self) -> ArrayView2<'_, f64> {
        self.x.view()
    }

    /// Indices of the `k` nearest training rows, nearest first; equal
    /// distances are ordered by row index.
    pub fn neighbors(&self, q: ArrayView1<f64>) -> Result<Vec<usize>> {
        if q.len() != self.x.ncols() {
            return Err(Error::Dimension {
                expected: self.x.ncols(),
                found: q.len(),
            });
        }
        let mut d: Vec<(f64, usize)> = self
            .x
            .axis_iter(Axis(0))
            .enumerate()
            .map(|(i, r)| {
                let dist: f64 = r.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
                (dist, i)
            })
            .collect();
        let by_dist = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < d.len() {
            d.select_nth_unstable_by(self.k - 1, by_dist);
            d.truncate(self.k);
        }
        d.sort_by(by_dist);
        Ok(d.into_iter().map(|(_, i)| i).collect())
    }

    /// Majority label among the neighbours; vote ties go to the lowest class.
    pub fn predict(&self, q: ArrayView1<f64>) -> Result<usize> {
        let mut votes = vec![0usize; self.classes];
        for i in self.neighbors(q)? {
            votes[self.y[i]] += 1;
        }
        let mut best = 0;
        for (c, &v) in votes.iter().enumerate() {
            if v > votes[best] {
                best = c;
            }
        }
        Ok(best)
    }

    pub fn predict_batch(&self, x: ArrayView2<f64>) -> Result<Vec<usize>> {
        x.axis_iter(Axis(0)).map(|r| self.predict(r)).collect()
    }
}
