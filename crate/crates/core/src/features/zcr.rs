use crate::error::{Error, Result};

fn sgn(x: f64) -> i32 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Zero-crossing count `sum_{i>=1} |sgn(x_i) - sgn(x_{i-1})| / 2` with
/// `sgn(0) = 0`, so a touch of zero counts as half a crossing on each side.
pub fn zcr<T: Copy + Into<f64>>(frame: &[T]) -> Result<f64> {
    if frame.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: frame.len(),
        });
    }
    let half_steps: i32 = frame
        .windows(2)
        .map(|w| (sgn(w[1].into()) - sgn(w[0].into())).abs())
        .sum();
    Ok(half_steps as f64 / 2.0)
}
