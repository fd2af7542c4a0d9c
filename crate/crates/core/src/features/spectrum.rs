use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::frame::Window;
use crate::error::{Error, Result};

/// Windowed one-sided power spectrum `|X_k|^2`, `k = 0..=n/2`, for frames of
/// a fixed power-of-two length. No normalisation is applied, so
/// `X_0^2 + X_{n/2}^2 + 2 * sum_{0<k<n/2} |X_k|^2 = n * sum (w_i x_i)^2`.
#[derive(Clone)]
pub struct PowerSpectrum {
    fft: Arc<dyn Fft<f64>>,
    window: Vec<f64>,
}

impl std::fmt::Debug for PowerSpectrum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PowerSpectrum")
            .field("len", &self.window.len())
            .finish()
    }
}

impl PowerSpectrum {
    pub fn new(len: usize, window: Window) -> Result<Self> {
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Config(format!("frame length {len} is not a power of two")));
        }
        Ok(PowerSpectrum {
            fft: FftPlanner::new().plan_fft_forward(len),
            window: window.coefficients(len),
        })
    }

    pub fn frame_len(&self) -> usize {
        self.window.len()
    }

    pub fn bins(&self) -> usize {
        self.window.len() / 2 + 1
    }

    /// Computes the spectrum of `frame` into `out` (length `bins()`), using
    /// `buf` as FFT workspace.
    pub fn compute_into<T: Copy + Into<f64>>(
        &self,
        frame: &[T],
        buf: &mut Vec<Complex<f64>>,
        out: &mut [f64],
    ) -> Result<()> {
        let n = self.window.len();
        if frame.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: frame.len(),
            });
        }
        buf.clear();
        buf.extend(
            frame
                .iter()
                .zip(&self.window)
                .map(|(&x, &w)| Complex::new(x.into() * w, 0.0)),
        );
        self.fft.process(buf);
        for (o, c) in out.iter_mut().zip(&buf[..n / 2 + 1]) {
            *o = c.norm_sqr();
        }
        Ok(())
    }

    pub fn compute<T: Copy + Into<f64>>(&self, frame: &[T]) -> Result<Vec<f64>> {
        let mut buf = Vec::with_capacity(frame.len());
        let mut out = vec![0.0; self.bins()];
        self.compute_into(frame, &mut buf, &mut out)?;
        Ok(out)
    }
}

/// One-shot convenience wrapper around [`PowerSpectrum`].
pub fn power_spectrum<T: Copy + Into<f64>>(frame: &[T], window: Window) -> Result<Vec<f64>> {
    PowerSpectrum::new(frame.len(), window)?.compute(frame)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_frame() {
        let s = power_spectrum(&[0.0f64; 2048], Window::Hamming).unwrap();
        assert_eq!(s.len(), 1025);
        assert!(s.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn non_power_of_two_rejected() {
        assert!(matches!(
            power_spectrum(&[0.0f64; 1000], Window::Hamming),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn dc_bin() {
        let s = power_spectrum(&[1.0f64; 8], Window::Rectangular).unwrap();
        assert!((s[0] - 64.0).abs() < 1e-12);
        assert!(s[1..].iter().all(|&v| v < 1e-20));
    }
}
