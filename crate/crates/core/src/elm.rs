//! Extreme learning machine: a random, fixed hidden layer followed by output
//! weights solved in closed form.
//!
//! Model file layout (`ELMM`, all integers and floats little-endian):
//!
//! ```text
//! magic        4   b"ELMM"
//! version      u16 (1)
//! activation   u8  0 = sigmoid, 1 = tanh, 2 = hard limit
//! seed         u64
//! ridge flag   u8  0 = pure pseudoinverse, 1 = followed by lambda f64
//! hidden L     u32
//! input d      u32
//! classes m    u32
//! input weights   L*d f64, row-major (row i is a_i)
//! biases          L   f64
//! output weights  L*m f64, row-major
//! normalizer flag u8; if 1: d f64 means then d f64 stds
//! labels       m times: u32 byte length + UTF-8 bytes
//! ```

use std::fmt;
use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::Normalizer;
use crate::linalg;

pub const MODEL_MAGIC: &[u8; 4] = b"ELMM";
pub const MODEL_VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Sigmoid,
    Tanh,
    HardLimit,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Tanh => z.tanh(),
            Activation::HardLimit => {
                if z >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    fn id(self) -> u8 {
        match self {
            Activation::Sigmoid => 0,
            Activation::Tanh => 1,
            Activation::HardLimit => 2,
        }
    }

    fn from_id(id: u8) -> Result<Self> {
        match id {
            0 => Ok(Activation::Sigmoid),
            1 => Ok(Activation::Tanh),
            2 => Ok(Activation::HardLimit),
            _ => Err(Error::ModelFormat(format!("unknown activation id {id}"))),
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Activation::Sigmoid => "sigmoid",
            Activation::Tanh => "tanh",
            Activation::HardLimit => "hard_limit",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElmConfig {
    pub hidden_nodes: usize,
    pub activation: Activation,
    /// `None` solves with the pseudoinverse; `Some(lambda)` with ridge.
    pub ridge: Option<f64>,
    pub seed: u64,
}

impl ElmConfig {
    pub fn new(hidden_nodes: usize, seed: u64) -> Self {
        ElmConfig {
            hidden_nodes,
            activation: Activation::Sigmoid,
            ridge: None,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden_nodes == 0 {
            return Err(Error::Config("ELM needs at least one hidden node".into()));
        }
        if let Some(l) = self.ridge {
            if l < 0.0 || !l.is_finite() {
                return Err(Error::Config(format!("ridge lambda must be finite and >= 0, got {l}")));
            }
        }
        Ok(())
    }
}

/// Draws `L x d` input weights and `L` biases i.i.d. from U[-1, 1].
/// Weights are drawn row by row, then the biases.
pub fn init_random_layer(dim: usize, hidden: usize, seed: u64) -> Result<(Array2<f64>, Array1<f64>)> {
    if dim == 0 || hidden == 0 {
        return Err(Error::Config(format!(
            "random layer needs d >= 1 and L >= 1, got d = {dim}, L = {hidden}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = Array2::from_shape_simple_fn((hidden, dim), || rng.random_range(-1.0..=1.0));
    let biases = Array1::from_shape_simple_fn(hidden, || rng.random_range(-1.0..=1.0));
    Ok((weights, biases))
}

/// `H[n][i] = g(a_i . x_n + b_i)`.
pub fn hidden_output(
    x: ArrayView2<f64>,
    weights: ArrayView2<f64>,
    biases: ArrayView1<f64>,
    activation: Activation,
) -> Result<Array2<f64>> {
    if x.ncols() != weights.ncols() {
        return Err(Error::Dimension {
            expected: weights.ncols(),
            found: x.ncols(),
        });
    }
    if biases.len() != weights.nrows() {
        return Err(Error::Dimension {
            expected: weights.nrows(),
            found: biases.len(),
        });
    }
    let mut h = x.dot(&weights.t());
    for mut row in h.axis_iter_mut(Axis(0)) {
        for (v, b) in row.iter_mut().zip(biases) {
            *v = activation.apply(*v + b);
        }
    }
    Ok(h)
}

/// One-hot targets, `N x classes`.
pub fn one_hot(y: &[usize], classes: usize) -> Array2<f64> {
    let mut t = Array2::zeros((y.len(), classes));
    for (i, &c) in y.iter().enumerate() {
        t[[i, c]] = 1.0;
    }
    t
}

/// `beta = H^+ T`, or the ridge solution when `ridge` is set.
pub fn solve_output_weights(
    h: ArrayView2<f64>,
    t: ArrayView2<f64>,
    ridge: Option<f64>,
) -> Result<Array2<f64>> {
    match ridge {
        None => linalg::pinv_solve(h, t),
        Some(lambda) => linalg::ridge_solve(h, t, lambda),
    }
}

/// Index of the largest score; ties go to the lowest index.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: usize,
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElmModel {
    pub input_weights: Array2<f64>,
    pub biases: Array1<f64>,
    pub output_weights: Array2<f64>,
    pub activation: Activation,
    pub ridge: Option<f64>,
    pub seed: u64,
    pub normalizer: Option<Normalizer>,
    pub labels: Vec<String>,
}

impl ElmModel {
    /// Fits the output layer on already-normalised rows `x`.
    ///
    /// The class count is `max(y) + 1`; both of at least two classes must be
    /// present.
    pub fn train(x: ArrayView2<f64>, y: &[usize], cfg: &ElmConfig) -> Result<Self> {
        cfg.validate()?;
        if x.nrows() != y.len() {
            return Err(Error::Dimension {
                expected: x.nrows(),
                found: y.len(),
            });
        }
        if x.nrows() < 2 {
            return Err(Error::InsufficientData(format!(
                "ELM training needs >= 2 rows, got {}",
                x.nrows()
            )));
        }
        let classes = y.iter().max().map_or(0, |m| m + 1).max(2);
        let distinct = (0..classes).filter(|c| y.contains(c)).count();
        if distinct < 2 {
            return Err(Error::DegenerateData("training set contains a single class".into()));
        }

        let (weights, biases) = init_random_layer(x.ncols(), cfg.hidden_nodes, cfg.seed)?;
        let h = hidden_output(x, weights.view(), biases.view(), cfg.activation)?;
        let t = one_hot(y, classes);
        let beta = solve_output_weights(h.view(), t.view(), cfg.ridge)?;
        if beta.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("output weights are not finite".into()));
        }
        Ok(ElmModel {
            input_weights: weights,
            biases,
            output_weights: beta,
            activation: cfg.activation,
            ridge: cfg.ridge,
            seed: cfg.seed,
            normalizer: None,
            labels: (0..classes).map(|c| format!("class{c}")).collect(),
        })
    }

    pub fn with_normalizer(mut self, normalizer: Normalizer) -> Result<Self> {
        if normalizer.dim() != Some(self.input_dim()) {
            return Err(Error::Dimension {
                expected: self.input_dim(),
                found: normalizer.dim().unwrap_or(0),
            });
        }
        self.normalizer = Some(normalizer);
        Ok(self)
    }

    pub fn with_labels<S: Into<String>>(mut self, labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != self.classes() {
            return Err(Error::Dimension {
                expected: self.classes(),
                found: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn hidden_nodes(&self) -> usize {
        self.input_weights.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.input_weights.ncols()
    }

    pub fn classes(&self) -> usize {
        self.output_weights.ncols()
    }

    /// Scores `h(x)^T beta` for rows that are already normalised.
    pub fn scores_normalized(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        let h = hidden_output(x, self.input_weights.view(), self.biases.view(), self.activation)?;
        Ok(h.dot(&self.output_weights))
    }

    pub fn predict_normalized(&self, x: ArrayView2<f64>) -> Result<Vec<usize>> {
        let scores = self.scores_normalized(x)?;
        Ok(scores
            .axis_iter(Axis(0))
            .map(|r| argmax(r.as_slice().expect("row-major scores")))
            .collect())
    }

    /// Classifies a raw feature vector, applying the stored normalizer first.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        if x.len() != self.input_dim() {
            return Err(Error::Dimension {
                expected: self.input_dim(),
                found: x.len(),
            });
        }
        let row = match &self.normalizer {
            Some(n) => n.transform_row(ArrayView1::from(x))?,
            None => Array1::from(x.to_vec()),
        };
        let row = row.insert_axis(Axis(0));
        let scores = self.scores_normalized(row.view())?.row(0).to_vec();
        Ok(Prediction {
            label: argmax(&scores),
            scores,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let (l, d, m) = (self.hidden_nodes(), self.input_dim(), self.classes());
        let mut out = Vec::with_capacity(40 + 8 * (l * d + l + l * m + 2 * d));
        out.extend_from_slice(MODEL_MAGIC);
        out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
        out.push(self.activation.id());
        out.extend_from_slice(&self.seed.to_le_bytes());
        match self.ridge {
            Some(lambda) => {
                out.push(1);
                out.extend_from_slice(&lambda.to_le_bytes());
            }
            None => out.push(0),
        }
        for n in [l, d, m] {
            out.extend_from_slice(&(n as u32).to_le_bytes());
        }
        let mut put = |vals: &mut dyn Iterator<Item = &f64>| {
            for v in vals {
                out.extend_from_slice(&v.to_le_bytes());
            }
        };
        put(&mut self.input_weights.iter());
        put(&mut self.biases.iter());
        put(&mut self.output_weights.iter());
        match self.normalizer.as_ref().and_then(|n| n.stats()) {
            Some(stats) => {
                out.push(1);
                for v in stats.mean.iter().chain(&stats.std) {
                    out.extend_from_slice(&v.to_le_bytes());
                }
            }
            None => out.push(0),
        }
        for label in &self.labels {
            out.extend_from_slice(&(label.len() as u32).to_le_bytes());
            out.extend_from_slice(label.as_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MODEL_MAGIC {
            return Err(Error::ModelFormat("bad magic, not an ELMM model file".into()));
        }
        let version = r.u16()?;
        if version != MODEL_VERSION {
            return Err(Error::UnsupportedVersion {
                found: version,
                supported: MODEL_VERSION,
            });
        }
        let activation = Activation::from_id(r.u8()?)?;
        let seed = r.u64()?;
        let ridge = match r.u8()? {
            0 => None,
            1 => Some(r.f64()?),
            f => return Err(Error::ModelFormat(format!("bad ridge flag {f}"))),
        };
        let l = r.u32()? as usize;
        let d = r.u32()? as usize;
        let m = r.u32()? as usize;
        if l == 0 || d == 0 || m == 0 {
            return Err(Error::ModelFormat(format!("empty dimensions L={l} d={d} m={m}")));
        }
        let input_weights = Array2::from_shape_vec((l, d), r.f64s(l * d)?)
            .map_err(|e| Error::ModelFormat(e.to_string()))?;
        let biases = Array1::from(r.f64s(l)?);
        let output_weights = Array2::from_shape_vec((l, m), r.f64s(l * m)?)
            .map_err(|e| Error::ModelFormat(e.to_string()))?;
        let normalizer = match r.u8()? {
            0 => None,
            1 => {
                let mean = r.f64s(d)?;
                let std = r.f64s(d)?;
                Some(Normalizer::from_stats(mean, std).map_err(|e| Error::ModelFormat(e.to_string()))?)
            }
            f => return Err(Error::ModelFormat(format!("bad normalizer flag {f}"))),
        };
        let mut labels = Vec::with_capacity(m);
        for _ in 0..m {
            let len = r.u32()? as usize;
            let raw = r.take(len)?;
            labels.push(
                String::from_utf8(raw.to_vec())
                    .map_err(|_| Error::ModelFormat("label is not UTF-8".into()))?,
            );
        }
        if r.pos != bytes.len() {
            return Err(Error::ModelFormat(format!(
                "{} trailing bytes",
                bytes.len() - r.pos
            )));
        }
        Ok(ElmModel {
            input_weights,
            biases,
            output_weights,
            activation,
            ridge,
            seed,
            normalizer,
            labels,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::ModelFormat(format!("truncated at byte {}", self.pos)))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let raw = self.take(n.checked_mul(8).ok_or_else(|| Error::ModelFormat("size overflow".into()))?)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}
