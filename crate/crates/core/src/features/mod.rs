//! Framed MFCC and zero-crossing features aggregated into a fixed-size
//! per-clip descriptor.

mod frame;
mod mel;
mod normalize;
mod spectrum;
mod zcr;

use std::f64::consts::PI;

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

pub use frame::{frame_signal, FrameConfig, Window};
pub use mel::{hz_to_mel, mel_to_hz, MelFilterbank};
pub use normalize::{mean_std, NormStats, Normalizer};
pub use spectrum::{power_spectrum, PowerSpectrum};
pub use zcr::zcr;

use crate::error::{Error, Result};
use crate::ingest::{AudioClip, EXPECTED_SAMPLE_RATE};

pub const N_MFCC: usize = 13;
/// 13 MFCC means, 13 MFCC stds, ZCR mean and ZCR std.
pub const FEATURE_DIM: usize = 2 * N_MFCC + 2;
/// Filterbank energies are clamped to this value before the log.
pub const LOG_FLOOR: f64 = 1e-10;

/// Per-clip descriptor, ordered
/// `[mfcc_mean_0..12, mfcc_std_0..12, zcr_mean, zcr_std]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; FEATURE_DIM]);

impl FeatureVector {
    pub fn mfcc_mean(&self) -> &[f64] {
        &self.0[..N_MFCC]
    }

    pub fn mfcc_std(&self) -> &[f64] {
        &self.0[N_MFCC..2 * N_MFCC]
    }

    pub fn zcr_mean(&self) -> f64 {
        self.0[2 * N_MFCC]
    }

    pub fn zcr_std(&self) -> f64 {
        self.0[2 * N_MFCC + 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Human-readable names of the 28 feature dimensions.
pub fn feature_names() -> Vec<String> {
    (0..N_MFCC)
        .map(|i| format!("mfcc_mean_{i}"))
        .chain((0..N_MFCC).map(|i| format!("mfcc_std_{i}")))
        .chain(["zcr_mean".to_string(), "zcr_std".to_string()])
        .collect()
}

/// Orthonormal DCT-II basis, `n_coeffs x n_inputs`.
pub fn dct_matrix(n_coeffs: usize, n_inputs: usize) -> Array2<f64> {
    let n = n_inputs as f64;
    Array2::from_shape_fn((n_coeffs, n_inputs), |(k, i)| {
        let scale = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
        scale * (PI * k as f64 * (2.0 * i as f64 + 1.0) / (2.0 * n)).cos()
    })
}

/// Every parameter that shapes the extracted features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub sample_rate: u32,
    pub frame: FrameConfig,
    pub n_mels: usize,
    pub f_min: f64,
    pub f_max: f64,
    pub n_mfcc: usize,
    pub log_floor: f64,
    pub clip_seconds: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            sample_rate: EXPECTED_SAMPLE_RATE,
            frame: FrameConfig::default(),
            n_mels: MelFilterbank::DEFAULT_FILTERS,
            f_min: 0.0,
            f_max: EXPECTED_SAMPLE_RATE as f64 / 2.0,
            n_mfcc: N_MFCC,
            log_floor: LOG_FLOOR,
            clip_seconds: crate::ingest::CLIP_SECONDS,
        }
    }
}

/// Computes per-frame MFCC/ZCR matrices and the aggregated [`FeatureVector`].
/// Immutable and shareable across threads.
#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    cfg: FrameConfig,
    bank: MelFilterbank,
    spectrum: PowerSpectrum,
    dct: Array2<f64>,
}

impl FeatureExtractor {
    pub fn new(cfg: FrameConfig, bank: MelFilterbank) -> Result<Self> {
        cfg.validate()?;
        if bank.fft_bins() != cfg.frame_len / 2 + 1 {
            return Err(Error::Config(format!(
                "filterbank has {} bins, frame length {} needs {}",
                bank.fft_bins(),
                cfg.frame_len,
                cfg.frame_len / 2 + 1
            )));
        }
        if bank.n_filters() < N_MFCC {
            return Err(Error::Config(format!(
                "{} mel filters cannot yield {N_MFCC} cepstral coefficients",
                bank.n_filters()
            )));
        }
        Ok(FeatureExtractor {
            spectrum: PowerSpectrum::new(cfg.frame_len, cfg.window)?,
            dct: dct_matrix(N_MFCC, bank.n_filters()),
            cfg,
            bank,
        })
    }

    /// 2048/512 Hamming framing with 26 mel filters over 0..Nyquist.
    pub fn standard(sample_rate: u32) -> Result<Self> {
        let cfg = FrameConfig::default();
        Self::new(cfg, MelFilterbank::standard(cfg.frame_len, sample_rate)?)
    }

    pub fn from_config(fc: &FeatureConfig) -> Result<Self> {
        if fc.n_mfcc != N_MFCC || fc.log_floor != LOG_FLOOR {
            return Err(Error::Config(format!(
                "only {N_MFCC} coefficients with log floor {LOG_FLOOR} are supported"
            )));
        }
        let bank = MelFilterbank::new(fc.n_mels, fc.frame.frame_len, fc.sample_rate, fc.f_min, fc.f_max)?;
        Self::new(fc.frame, bank)
    }

    pub fn frame_config(&self) -> &FrameConfig {
        &self.cfg
    }

    pub fn filterbank(&self) -> &MelFilterbank {
        &self.bank
    }

    /// MFCCs per frame, `n_frames x 13`.
    pub fn mfcc<T: Copy + Into<f64>>(&self, samples: &[T]) -> Result<Array2<f64>> {
        let frames = frame_signal(samples, &self.cfg)?;
        let mut out = Array2::zeros((frames.len(), N_MFCC));
        let mut buf = Vec::with_capacity(self.cfg.frame_len);
        let mut power = vec![0.0; self.spectrum.bins()];
        let mut energies = vec![0.0; self.bank.n_filters()];
        for (frame, mut row) in frames.iter().zip(out.rows_mut()) {
            self.spectrum.compute_into(frame, &mut buf, &mut power)?;
            self.bank.apply(&power, &mut energies)?;
            for e in energies.iter_mut() {
                *e = e.max(LOG_FLOOR).ln();
            }
            for (c, basis) in row.iter_mut().zip(self.dct.rows()) {
                *c = basis.iter().zip(&energies).map(|(b, e)| b * e).sum();
            }
        }
        Ok(out)
    }

    /// Zero-crossing count of every frame.
    pub fn zcr_frames<T: Copy + Into<f64>>(&self, samples: &[T]) -> Result<Vec<f64>> {
        frame_signal(samples, &self.cfg)?
            .into_iter()
            .map(zcr)
            .collect()
    }

    pub fn extract<T: Copy + Into<f64>>(&self, samples: &[T]) -> Result<FeatureVector> {
        let mfcc = self.mfcc(samples)?;
        let zcrs = self.zcr_frames(samples)?;
        let mut v = [0.0; FEATURE_DIM];
        for (k, col) in mfcc.axis_iter(Axis(1)).enumerate() {
            let (m, s) = mean_std(col.iter().copied());
            v[k] = m;
            v[N_MFCC + k] = s;
        }
        let (m, s) = mean_std(zcrs.iter().copied());
        v[2 * N_MFCC] = m;
        v[2 * N_MFCC + 1] = s;
        Ok(FeatureVector(v))
    }

    pub fn extract_clip(&self, clip: &AudioClip) -> Result<FeatureVector> {
        self.extract(&clip.samples)
    }
}

/// Free-function form of [`FeatureExtractor::mfcc`].
pub fn mfcc<T: Copy + Into<f64>>(
    samples: &[T],
    cfg: &FrameConfig,
    bank: &MelFilterbank,
) -> Result<Array2<f64>> {
    FeatureExtractor::new(*cfg, bank.clone())?.mfcc(samples)
}

pub fn extract_features(
    clip: &AudioClip,
    cfg: &FrameConfig,
    bank: &MelFilterbank,
) -> Result<FeatureVector> {
    FeatureExtractor::new(*cfg, bank.clone())?.extract_clip(clip)
}
