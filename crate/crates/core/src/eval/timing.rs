use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Serialises timed regions so that two measurements never overlap.
static TIMED_REGION: Mutex<()> = Mutex::new(());

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimingConfig {
    pub warmup: usize,
    pub repeats: usize,
}

impl Default for TimingConfig {
    fn default() -> Self {
        TimingConfig {
            warmup: 3,
            repeats: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingResult {
    pub warmup: usize,
    pub repeats: usize,
    pub durations_ms: Vec<f64>,
    pub median_ms: f64,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Runs `region` `warmup` times untimed, then `repeats` times timed, and
/// returns the output of the final run with the timing record.
pub fn time_region<T>(
    cfg: &TimingConfig,
    mut region: impl FnMut() -> Result<T>,
) -> Result<(T, TimingResult)> {
    if cfg.repeats == 0 {
        return Err(Error::Config("timing needs at least one repeat".into()));
    }
    let _guard = TIMED_REGION.lock().unwrap_or_else(|e| e.into_inner());
    for _ in 0..cfg.warmup {
        std::hint::black_box(region()?);
    }
    let mut durations_ms = Vec::with_capacity(cfg.repeats);
    let mut last = None;
    for _ in 0..cfg.repeats {
        let start = Instant::now();
        let out = std::hint::black_box(region()?);
        durations_ms.push(start.elapsed().as_secs_f64() * 1e3);
        last = Some(out);
    }
    Ok((
        last.expect("repeats >= 1"),
        TimingResult {
            warmup: cfg.warmup,
            repeats: cfg.repeats,
            median_ms: median(&durations_ms),
            durations_ms,
        },
    ))
}
