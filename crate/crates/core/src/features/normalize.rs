use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub mean: Vec<f64>,
    /// Always > 0; zero-variance dimensions store 1.
    pub std: Vec<f64>,
}

/// Per-dimension z-scoring fitted on training rows only.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    stats: Option<NormStats>,
}

impl Normalizer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_stats(mean: Vec<f64>, std: Vec<f64>) -> Result<Self> {
        if mean.len() != std.len() {
            return Err(Error::Dimension {
                expected: mean.len(),
                found: std.len(),
            });
        }
        if std.iter().any(|&s| s <= 0.0 || !s.is_finite()) {
            return Err(Error::Numeric("normalizer std must be finite and > 0".into()));
        }
        Ok(Normalizer {
            stats: Some(NormStats { mean, std }),
        })
    }

    pub fn fitted(train: ArrayView2<f64>) -> Result<Self> {
        let mut n = Self::new();
        n.fit(train)?;
        Ok(n)
    }

    /// Fits population mean/std on `train` (at least two rows).
    pub fn fit(&mut self, train: ArrayView2<f64>) -> Result<()> {
        if train.nrows() < 2 {
            return Err(Error::InsufficientData(format!(
                "normalizer needs >= 2 rows, got {}",
                train.nrows()
            )));
        }
        let (mean, std): (Vec<f64>, Vec<f64>) = train
            .axis_iter(Axis(1))
            .map(|col| {
                let (m, s) = mean_std(col.iter().copied());
                (m, if s > 0.0 && s.is_finite() { s } else { 1.0 })
            })
            .unzip();
        self.stats = Some(NormStats { mean, std });
        Ok(())
    }

    pub fn is_fitted(&self) -> bool {
        self.stats.is_some()
    }

    pub fn stats(&self) -> Option<&NormStats> {
        self.stats.as_ref()
    }

    pub fn dim(&self) -> Option<usize> {
        self.stats.as_ref().map(|s| s.mean.len())
    }

    fn checked(&self, dim: usize) -> Result<&NormStats> {
        let stats = self.stats.as_ref().ok_or(Error::State("normalizer applied before fit"))?;
        if stats.mean.len() != dim {
            return Err(Error::Dimension {
                expected: stats.mean.len(),
                found: dim,
            });
        }
        Ok(stats)
    }

    pub fn transform(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        let stats = self.checked(x.ncols())?;
        let mut out = x.to_owned();
        for mut row in out.rows_mut() {
            for ((v, m), s) in row.iter_mut().zip(&stats.mean).zip(&stats.std) {
                *v = (*v - m) / s;
            }
        }
        Ok(out)
    }

    pub fn transform_row(&self, x: ArrayView1<f64>) -> Result<Array1<f64>> {
        let stats = self.checked(x.len())?;
        Ok(x.iter()
            .zip(&stats.mean)
            .zip(&stats.std)
            .map(|((v, m), s)| (v - m) / s)
            .collect())
    }
}

/// Population mean and standard deviation.
///
/// Deviations are taken relative to the first value, so a constant sequence
/// yields exactly its value and a standard deviation of exactly zero.
pub fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let mut it = values.clone();
    let Some(first) = it.next() else {
        return (f64::NAN, f64::NAN);
    };
    let n = values.clone().count() as f64;
    let shift_mean = values.clone().map(|v| v - first).sum::<f64>() / n;
    let var = values
        .map(|v| {
            let d = (v - first) - shift_mean;
            d * d
        })
        .sum::<f64>()
        / n;
    (first + shift_mean, var.sqrt())
}
