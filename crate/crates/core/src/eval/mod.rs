//! Fold-wise cross-validation, timing and hidden-layer sweeps.
//!
//! Per fold the pipeline is: fit the normalizer on the raw training rows,
//! normalise train and test, SMOTE-balance the training rows, then time
//! `train + classify test`. Feature extraction, normalisation and balancing
//! are outside the timed region.

mod report;
mod timing;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

pub use report::{
    crossval_csv, crossval_table, feature_summary, feature_summary_csv, sweep_csv, sweep_table,
    SummaryRow,
};
pub use timing::{median, time_region, TimingConfig, TimingResult};

use crate::balance::{balance_training_set, BalanceSummary};
use crate::dataset::LabeledDataset;
use crate::elm::{Activation, ElmConfig, ElmModel};
use crate::error::{Error, Result};
use crate::features::Normalizer;
use crate::knn::KnnModel;

pub const N_FOLDS: u8 = 5;

/// Added to the run seed to seed SMOTE, so the oversampler and the ELM
/// hidden layer draw from unrelated streams.
pub const SMOTE_SEED_OFFSET: u64 = 0x5EED_0000_5307_E000;

/// Default seed list.
pub const DEFAULT_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

/// Default hidden-layer sizes for the sweep.
pub const DEFAULT_SWEEP: [usize; 4] = [10, 100, 1000, 10000];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldSplit {
    pub test_fold: u8,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// One split per held-out fold, using the predefined fold ids (1..=5).
pub fn make_folds(folds: &[u8]) -> Result<Vec<FoldSplit>> {
    if let Some((i, f)) = folds.iter().enumerate().find(|(_, f)| !(1..=N_FOLDS).contains(f)) {
        return Err(Error::Manifest(format!("row {i} has fold {f}, expected 1..={N_FOLDS}")));
    }
    (1..=N_FOLDS)
        .map(|k| {
            let (test, train): (Vec<usize>, Vec<usize>) =
                (0..folds.len()).partition(|&i| folds[i] == k);
            if test.is_empty() {
                return Err(Error::Manifest(format!("fold {k} has no rows")));
            }
            Ok(FoldSplit {
                test_fold: k,
                train,
                test,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSpec {
    Elm {
        hidden: usize,
        activation: Activation,
        ridge: Option<f64>,
    },
    Knn {
        k: usize,
    },
}

impl ModelSpec {
    pub fn elm(hidden: usize) -> Self {
        ModelSpec::Elm {
            hidden,
            activation: Activation::Sigmoid,
            ridge: None,
        }
    }

    pub fn knn(k: usize) -> Self {
        ModelSpec::Knn { k }
    }

    pub fn name(&self) -> String {
        match self {
            ModelSpec::Elm { hidden, .. } => format!("ELM (L = {hidden})"),
            ModelSpec::Knn { k } => format!("KNN (k = {k})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalParams {
    pub model: ModelSpec,
    pub smote: bool,
    pub smote_k: usize,
    pub timing: TimingConfig,
}

impl EvalParams {
    pub fn new(model: ModelSpec) -> Self {
        EvalParams {
            model,
            smote: true,
            smote_k: 5,
            timing: TimingConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Elm(ElmModel),
    Knn(KnnModel),
}

impl TrainedModel {
    pub fn fit(spec: &ModelSpec, x: ArrayView2<f64>, y: &[usize], seed: u64) -> Result<Self> {
        Ok(match *spec {
            ModelSpec::Elm {
                hidden,
                activation,
                ridge,
            } => TrainedModel::Elm(ElmModel::train(
                x,
                y,
                &ElmConfig {
                    hidden_nodes: hidden,
                    activation,
                    ridge,
                    seed,
                },
            )?),
            ModelSpec::Knn { k } => TrainedModel::Knn(KnnModel::fit(x, y, k)?),
        })
    }

    /// Labels for already-normalised rows.
    pub fn classify(&self, x: ArrayView2<f64>) -> Result<Vec<usize>> {
        match self {
            TrainedModel::Elm(m) => m.predict_normalized(x),
            TrainedModel::Knn(m) => m.predict_batch(x),
        }
    }
}

/// Everything a fold needs before the timed region.
#[derive(Debug, Clone)]
pub struct PreparedFold {
    pub test_fold: u8,
    pub normalizer: Normalizer,
    pub train_x: Array2<f64>,
    pub train_y: Vec<usize>,
    pub test_x: Array2<f64>,
    pub test_y: Vec<usize>,
    pub balance: Option<BalanceSummary>,
}

/// Normalises and (optionally) balances one split. Only training rows feed
/// the normalizer and SMOTE.
pub fn prepare_fold(
    data: &LabeledDataset,
    split: &FoldSplit,
    params: &EvalParams,
    seed: u64,
) -> Result<PreparedFold> {
    let (raw_train, train_y) = data.subset(&split.train);
    let (raw_test, test_y) = data.subset(&split.test);
    let normalizer = Normalizer::fitted(raw_train.view())?;
    let train = normalizer.transform(raw_train.view())?;
    let test_x = normalizer.transform(raw_test.view())?;
    let (train_x, train_y, balance) = if params.smote {
        let (x, y, s) =
            balance_training_set(train.view(), &train_y, params.smote_k, seed.wrapping_add(SMOTE_SEED_OFFSET))?;
        (x, y, Some(s))
    } else {
        (train, train_y, None)
    };
    Ok(PreparedFold {
        test_fold: split.test_fold,
        normalizer,
        train_x,
        train_y,
        test_x,
        test_y,
        balance,
    })
}

/// Confusion counts, `counts[true][predicted]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn new(classes: usize) -> Self {
        ConfusionMatrix {
            counts: vec![vec![0; classes]; classes],
        }
    }

    pub fn from_predictions(truth: &[usize], pred: &[usize], classes: usize) -> Self {
        let mut m = Self::new(classes);
        for (&t, &p) in truth.iter().zip(pred) {
            m.counts[t][p] += 1;
        }
        m
    }

    pub fn add(&mut self, other: &ConfusionMatrix) {
        for (r, o) in self.counts.iter_mut().zip(&other.counts) {
            for (a, b) in r.iter_mut().zip(o) {
                *a += b;
            }
        }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }

    /// Accuracy in percent.
    pub fn accuracy(&self) -> f64 {
        100.0 * self.correct() as f64 / self.total() as f64
    }

    /// Row sums: test rows per true class.
    pub fn class_totals(&self) -> Vec<usize> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldOutcome {
    pub test_fold: u8,
    pub seed: u64,
    /// Percent.
    pub accuracy: f64,
    pub confusion: ConfusionMatrix,
    pub timing: TimingResult,
    pub balance: Option<BalanceSummary>,
}

/// Trains on a prepared fold without timing.
pub fn fit_prepared(prep: &PreparedFold, spec: &ModelSpec, seed: u64) -> Result<TrainedModel> {
    TrainedModel::fit(spec, prep.train_x.view(), &prep.train_y, seed)
}

pub fn run_fold(
    data: &LabeledDataset,
    split: &FoldSplit,
    params: &EvalParams,
    seed: u64,
) -> Result<FoldOutcome> {
    let prep = prepare_fold(data, split, params, seed)?;
    let (pred, timing) = time_region(&params.timing, || {
        let model = fit_prepared(&prep, &params.model, seed)?;
        model.classify(prep.test_x.view())
    })?;
    let confusion = ConfusionMatrix::from_predictions(&prep.test_y, &pred, data.label_names.len());
    Ok(FoldOutcome {
        test_fold: split.test_fold,
        seed,
        accuracy: confusion.accuracy(),
        confusion,
        timing,
        balance: prep.balance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldSummary {
    pub test_fold: u8,
    pub test_rows: usize,
    /// Mean over seeds, percent.
    pub accuracy_mean: f64,
    pub accuracy_min: f64,
    pub accuracy_max: f64,
    /// Mean over seeds of the per-run median, milliseconds.
    pub time_ms: f64,
    /// Summed over seeds.
    pub confusion: ConfusionMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub params: EvalParams,
    pub seeds: Vec<u64>,
    pub folds: Vec<FoldSummary>,
    /// Total correct over total tested across every fold and seed, percent.
    pub overall_accuracy: f64,
    /// Range over seeds of the per-seed micro-averaged accuracy.
    pub overall_accuracy_min: f64,
    pub overall_accuracy_max: f64,
    /// Mean of the per-fold times.
    pub overall_time_ms: f64,
    pub runs: Vec<FoldOutcome>,
}

impl EvalReport {
    /// Micro-averaged accuracy recomputed from the per-fold confusion matrices.
    pub fn accuracy_from_confusion(&self) -> f64 {
        let mut total = ConfusionMatrix::new(self.folds[0].confusion.counts.len());
        for f in &self.folds {
            total.add(&f.confusion);
        }
        total.accuracy()
    }
}

pub fn crossval(data: &LabeledDataset, params: &EvalParams, seeds: &[u64]) -> Result<EvalReport> {
    if seeds.is_empty() {
        return Err(Error::Config("at least one seed is required".into()));
    }
    let splits = make_folds(&data.folds)?;
    let mut runs = Vec::with_capacity(seeds.len() * splits.len());
    for &seed in seeds {
        for split in &splits {
            runs.push(run_fold(data, split, params, seed)?);
        }
    }

    let classes = data.label_names.len();
    let folds = splits
        .iter()
        .map(|split| {
            let mine: Vec<&FoldOutcome> =
                runs.iter().filter(|r| r.test_fold == split.test_fold).collect();
            let mut confusion = ConfusionMatrix::new(classes);
            for r in &mine {
                confusion.add(&r.confusion);
            }
            let accs: Vec<f64> = mine.iter().map(|r| r.accuracy).collect();
            FoldSummary {
                test_fold: split.test_fold,
                test_rows: split.test.len(),
                accuracy_mean: accs.iter().sum::<f64>() / accs.len() as f64,
                accuracy_min: accs.iter().copied().fold(f64::INFINITY, f64::min),
                accuracy_max: accs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                time_ms: mine.iter().map(|r| r.timing.median_ms).sum::<f64>() / mine.len() as f64,
                confusion,
            }
        })
        .collect::<Vec<_>>();

    let per_seed: Vec<f64> = seeds
        .iter()
        .map(|&s| {
            let mut c = ConfusionMatrix::new(classes);
            for r in runs.iter().filter(|r| r.seed == s) {
                c.add(&r.confusion);
            }
            c.accuracy()
        })
        .collect();
    let mut all = ConfusionMatrix::new(classes);
    for r in &runs {
        all.add(&r.confusion);
    }

    Ok(EvalReport {
        params: *params,
        seeds: seeds.to_vec(),
        overall_accuracy: all.accuracy(),
        overall_accuracy_min: per_seed.iter().copied().fold(f64::INFINITY, f64::min),
        overall_accuracy_max: per_seed.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        overall_time_ms: folds.iter().map(|f| f.time_ms).sum::<f64>() / folds.len() as f64,
        folds,
        runs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub hidden: Vec<usize>,
    pub reports: Vec<EvalReport>,
}

/// Cross-validates an ELM for every hidden-layer size in `hidden`, keeping
/// the remaining parameters of `base` (whose model must be an ELM).
pub fn sweep_neurons(
    data: &LabeledDataset,
    hidden: &[usize],
    base: &EvalParams,
    seeds: &[u64],
) -> Result<SweepReport> {
    let ModelSpec::Elm {
        activation, ridge, ..
    } = base.model
    else {
        return Err(Error::Config("the neuron sweep needs an ELM model".into()));
    };
    if hidden.is_empty() {
        return Err(Error::Config("sweep needs at least one hidden size".into()));
    }
    let reports = hidden
        .iter()
        .map(|&l| {
            let params = EvalParams {
                model: ModelSpec::Elm {
                    hidden: l,
                    activation,
                    ridge,
                },
                ..*base
            };
            crossval(data, &params, seeds)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport {
        hidden: hidden.to_vec(),
        reports,
    })
}
