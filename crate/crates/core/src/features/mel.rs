use crate::error::{Error, Result};

/// Converts a frequency in Hz to mel: `2595 * log10(1 + f / 700)`.
pub fn hz_to_mel(hz: f64) -> Result<f64> {
    if hz < 0.0 || !hz.is_finite() {
        return Err(Error::Domain(format!("frequency must be finite and >= 0, got {hz}")));
    }
    Ok(2595.0 * (1.0 + hz / 700.0).log10())
}

/// Inverse of [`hz_to_mel`]: `700 * (10^(m / 2595) - 1)`.
pub fn mel_to_hz(mel: f64) -> Result<f64> {
    if mel < 0.0 || !mel.is_finite() {
        return Err(Error::Domain(format!("mel value must be finite and >= 0, got {mel}")));
    }
    Ok(700.0 * (10f64.powf(mel / 2595.0) - 1.0))
}

/// Triangular filters with unit peaks and centres spaced uniformly in mel.
#[derive(Debug, Clone, PartialEq)]
pub struct MelFilterbank {
    n_filters: usize,
    fft_bins: usize,
    f_min: f64,
    f_max: f64,
    /// Row-major `n_filters x fft_bins`.
    weights: Vec<f64>,
    /// Half-open range of bins with non-zero weight, per filter.
    support: Vec<(usize, usize)>,
}

impl MelFilterbank {
    pub const DEFAULT_FILTERS: usize = 26;

    /// Builds `n_filters` filters over `[f_min, f_max]` for a real FFT of
    /// `frame_len` points at `sample_rate`.
    pub fn new(
        n_filters: usize,
        frame_len: usize,
        sample_rate: u32,
        f_min: f64,
        f_max: f64,
    ) -> Result<Self> {
        let nyquist = sample_rate as f64 / 2.0;
        if n_filters == 0 {
            return Err(Error::Config("filterbank needs at least one filter".into()));
        }
        if frame_len < 2 || sample_rate == 0 {
            return Err(Error::Config("frame length and sample rate must be positive".into()));
        }
        if !(0.0 <= f_min && f_min < f_max && f_max <= nyquist) {
            return Err(Error::Config(format!(
                "need 0 <= f_min < f_max <= {nyquist}, got [{f_min}, {f_max}]"
            )));
        }

        let fft_bins = frame_len / 2 + 1;
        let mel_lo = hz_to_mel(f_min)?;
        let mel_hi = hz_to_mel(f_max)?;
        let points = (0..n_filters + 2)
            .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (n_filters + 1) as f64))
            .collect::<Result<Vec<f64>>>()?;
        let bin_hz = sample_rate as f64 / frame_len as f64;

        let mut weights = vec![0.0; n_filters * fft_bins];
        let mut support = Vec::with_capacity(n_filters);
        for m in 0..n_filters {
            let (left, centre, right) = (points[m], points[m + 1], points[m + 2]);
            let row = &mut weights[m * fft_bins..(m + 1) * fft_bins];
            let mut lo = fft_bins;
            let mut hi = 0;
            for (k, w) in row.iter_mut().enumerate() {
                let f = k as f64 * bin_hz;
                *w = if f > left && f <= centre {
                    (f - left) / (centre - left)
                } else if f > centre && f < right {
                    (right - f) / (right - centre)
                } else {
                    0.0
                };
                if *w > 0.0 {
                    lo = lo.min(k);
                    hi = k + 1;
                }
            }
            support.push(if lo < hi { (lo, hi) } else { (0, 0) });
        }

        Ok(MelFilterbank {
            n_filters,
            fft_bins,
            f_min,
            f_max,
            weights,
            support,
        })
    }

    /// 26 filters spanning 0 Hz to Nyquist.
    pub fn standard(frame_len: usize, sample_rate: u32) -> Result<Self> {
        Self::new(
            Self::DEFAULT_FILTERS,
            frame_len,
            sample_rate,
            0.0,
            sample_rate as f64 / 2.0,
        )
    }

    pub fn n_filters(&self) -> usize {
        self.n_filters
    }

    pub fn fft_bins(&self) -> usize {
        self.fft_bins
    }

    pub fn f_min(&self) -> f64 {
        self.f_min
    }

    pub fn f_max(&self) -> f64 {
        self.f_max
    }

    pub fn weight(&self, filter: usize, bin: usize) -> f64 {
        self.weights[filter * self.fft_bins + bin]
    }

    pub fn row(&self, filter: usize) -> &[f64] {
        &self.weights[filter * self.fft_bins..(filter + 1) * self.fft_bins]
    }

    pub fn support(&self, filter: usize) -> (usize, usize) {
        self.support[filter]
    }

    /// Filter energies for a one-sided power spectrum.
    pub fn apply(&self, power: &[f64], out: &mut [f64]) -> Result<()> {
        if power.len() != self.fft_bins {
            return Err(Error::Dimension {
                expected: self.fft_bins,
                found: power.len(),
            });
        }
        for (m, e) in out.iter_mut().enumerate().take(self.n_filters) {
            let (lo, hi) = self.support[m];
            let row = &self.row(m)[lo..hi];
            *e = row.iter().zip(&power[lo..hi]).map(|(w, p)| w * p).sum();
        }
        Ok(())
    }
}
