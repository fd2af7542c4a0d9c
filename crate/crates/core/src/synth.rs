//! Synthetic siren-vs-noise clips for tests and demos that must run without
//! the real dataset.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::LabeledDataset;
use crate::error::Result;
use crate::features::{FeatureExtractor, FEATURE_DIM};
use crate::ingest::{AudioClip, CLIP_SECONDS, EXPECTED_SAMPLE_RATE};
use crate::{SIREN, URBAN};

/// Two-tone siren: the pitch alternates between a low tone in 600–800 Hz and
/// a high tone in 1200–1500 Hz, either gliding (wail) or switching (hi-lo),
/// with a little background noise.
pub fn siren_like(seed: u64, sample_rate: u32, seconds: f64) -> Vec<f32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f_lo = rng.random_range(600.0..800.0);
    let f_hi = rng.random_range(1200.0..1500.0);
    let period = rng.random_range(0.4..1.2);
    let glide = rng.random_bool(0.5);
    let amp = rng.random_range(0.3..0.8);
    let noise = rng.random_range(0.0..0.02);
    let sr = sample_rate as f64;
    let n = (sr * seconds).round() as usize;
    let mut phase = rng.random_range(0.0..TAU);
    (0..n)
        .map(|i| {
            let t = i as f64 / sr;
            let cycle = (t / period).fract();
            let mix = if glide {
                0.5 - 0.5 * (TAU * cycle).cos()
            } else if cycle < 0.5 {
                0.0
            } else {
                1.0
            };
            let f = f_lo + (f_hi - f_lo) * mix;
            phase = (phase + TAU * f / sr) % TAU;
            let s = amp * (phase.sin() + 0.2 * (2.0 * phase).sin()) / 1.2
                + noise * rng.random_range(-1.0..1.0);
            s.clamp(-1.0, 1.0) as f32
        })
        .collect()
}

/// Low-passed white noise with a slowly varying envelope.
pub fn urban_noise(seed: u64, sample_rate: u32, seconds: f64) -> Vec<f32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = rng.random_range(0.05..1.0);
    let amp = rng.random_range(0.05..0.5);
    let env_rate = rng.random_range(0.1..2.0);
    let sr = sample_rate as f64;
    let n = (sr * seconds).round() as usize;
    let mut y = 0.0;
    (0..n)
        .map(|i| {
            let x: f64 = rng.random_range(-1.0..1.0);
            y += alpha * (x - y);
            let env = 0.6 + 0.4 * (TAU * env_rate * i as f64 / sr).sin();
            (amp * env * y / alpha.sqrt()).clamp(-1.0, 1.0) as f32
        })
        .collect()
}

pub fn tone(freq: f64, amp: f64, sample_rate: u32, seconds: f64) -> Vec<f32> {
    let sr = sample_rate as f64;
    let n = (sr * seconds).round() as usize;
    (0..n)
        .map(|i| (amp * (TAU * freq * i as f64 / sr).sin()) as f32)
        .collect()
}

/// One clip of a synthetic corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticItem {
    pub label: usize,
    pub fold: u8,
    pub seed: u64,
}

impl SyntheticItem {
    pub fn render(&self) -> AudioClip {
        let samples = if self.label == SIREN {
            siren_like(self.seed, EXPECTED_SAMPLE_RATE, CLIP_SECONDS)
        } else {
            urban_noise(self.seed, EXPECTED_SAMPLE_RATE, CLIP_SECONDS)
        };
        AudioClip {
            samples,
            sample_rate: EXPECTED_SAMPLE_RATE,
            label: self.label,
            fold: self.fold,
            source: format!("synthetic-{}-{}", self.label, self.seed),
        }
    }
}

/// Fold-structured corpus: per fold, `siren_per_fold` siren clips followed by
/// `urban_per_fold` noise clips. The ESC-50 subset shape is (8, 128).
pub fn synthetic_plan(siren_per_fold: usize, urban_per_fold: usize, seed: u64) -> Vec<SyntheticItem> {
    let mut items = Vec::new();
    for fold in 1..=5u8 {
        for (label, count) in [(SIREN, siren_per_fold), (URBAN, urban_per_fold)] {
            for _ in 0..count {
                let idx = items.len() as u64;
                items.push(SyntheticItem {
                    label,
                    fold,
                    seed: seed.wrapping_mul(1_000_003).wrapping_add(idx),
                });
            }
        }
    }
    items
}

/// Renders and featurises a plan clip by clip, never holding all audio.
pub fn synthetic_dataset(items: &[SyntheticItem], extractor: &FeatureExtractor) -> Result<LabeledDataset> {
    let rows = items
        .par_iter()
        .map(|it| extractor.extract_clip(&it.render()))
        .collect::<Result<Vec<_>>>()?;
    let mut features = ndarray::Array2::zeros((rows.len(), FEATURE_DIM));
    for (mut dst, v) in features.rows_mut().into_iter().zip(&rows) {
        dst.assign(&ndarray::ArrayView1::from(&v.0[..]));
    }
    LabeledDataset::new(
        features,
        items.iter().map(|i| i.label).collect(),
        items.iter().map(|i| i.fold).collect(),
    )
}
