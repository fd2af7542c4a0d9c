use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Hamming,
    Hann,
    Rectangular,
}

impl Window {
    /// Symmetric window coefficients of length `n`.
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![1.0];
        }
        let denom = (n - 1) as f64;
        (0..n)
            .map(|i| {
                let c = (2.0 * PI * i as f64 / denom).cos();
                match self {
                    Window::Hamming => 0.54 - 0.46 * c,
                    Window::Hann => 0.5 - 0.5 * c,
                    Window::Rectangular => 1.0,
                }
            })
            .collect()
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Window::Hamming => "hamming",
            Window::Hann => "hann",
            Window::Rectangular => "rectangular",
        };
        f.write_str(s)
    }
}

/// Short-time analysis framing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameConfig {
    /// Samples per frame, also the ZCR window length.
    pub frame_len: usize,
    pub hop: usize,
    pub window: Window,
}

impl Default for FrameConfig {
    fn default() -> Self {
        FrameConfig {
            frame_len: 2048,
            hop: 512,
            window: Window::Hamming,
        }
    }
}

impl FrameConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hop == 0 || self.hop > self.frame_len {
            return Err(Error::Config(format!(
                "need 0 < hop <= frame_len, got hop {} frame_len {}",
                self.hop, self.frame_len
            )));
        }
        Ok(())
    }

    /// Number of whole frames in a signal of `len` samples.
    pub fn frame_count(&self, len: usize) -> usize {
        if len < self.frame_len || self.hop == 0 {
            0
        } else {
            (len - self.frame_len) / self.hop + 1
        }
    }
}

/// Splits `samples` into frames starting at multiples of `hop`; any partial
/// trailing frame is dropped.
pub fn frame_signal<'a, T>(samples: &'a [T], cfg: &FrameConfig) -> Result<Vec<&'a [T]>> {
    cfg.validate()?;
    if samples.len() < cfg.frame_len {
        return Err(Error::TooShort {
            needed: cfg.frame_len,
            got: samples.len(),
        });
    }
    Ok((0..cfg.frame_count(samples.len()))
        .map(|i| &samples[i * cfg.hop..i * cfg.hop + cfg.frame_len])
        .collect())
}
