//! Least-squares solvers for the ELM output layer.

use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use ndarray_linalg::{FactorizeC, JobSvd, SolveC, SVDDC, UPLO};

use crate::error::{Error, Result};

/// Singular values at or below this threshold are treated as zero:
/// `max(rows, cols) * sigma_max * machine epsilon`.
pub fn svd_cutoff(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * sigma_max * f64::EPSILON
}

fn check_finite(name: &str, a: ArrayView2<f64>) -> Result<()> {
    if a.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numeric(format!("{name} contains non-finite entries")))
    }
}

fn check_rows(h: ArrayView2<f64>, t: ArrayView2<f64>) -> Result<()> {
    if h.nrows() == 0 {
        return Err(Error::InsufficientData("least squares needs at least one row".into()));
    }
    if h.nrows() != t.nrows() {
        return Err(Error::Dimension {
            expected: h.nrows(),
            found: t.nrows(),
        });
    }
    Ok(())
}

/// Thin SVD factors `(U, sigma, V^T)` truncated to the numerical rank.
struct RankRevealed {
    u: Array2<f64>,
    sigma: Array1<f64>,
    vt: Array2<f64>,
}

fn truncated_svd(h: ArrayView2<f64>) -> Result<RankRevealed> {
    let (u, sigma, vt) = h.svddc(JobSvd::Some)?;
    let (u, vt) = match (u, vt) {
        (Some(u), Some(vt)) => (u, vt),
        _ => return Err(Error::Numeric("SVD did not return singular vectors".into())),
    };
    let sigma_max = sigma.iter().copied().fold(0.0, f64::max);
    let cutoff = svd_cutoff(h.nrows(), h.ncols(), sigma_max);
    // LAPACK returns singular values in descending order.
    let rank = sigma.iter().take_while(|&&s| s > cutoff).count();
    Ok(RankRevealed {
        u: u.slice(s![.., ..rank]).to_owned(),
        sigma: sigma.slice(s![..rank]).to_owned(),
        vt: vt.slice(s![..rank, ..]).to_owned(),
    })
}

/// Minimum-norm least-squares solution `H^+ T` via the SVD.
pub fn pinv_solve(h: ArrayView2<f64>, t: ArrayView2<f64>) -> Result<Array2<f64>> {
    check_rows(h, t)?;
    check_finite("H", h)?;
    check_finite("T", t)?;
    let svd = truncated_svd(h)?;
    let mut coeffs = svd.u.t().dot(&t);
    for (mut row, s) in coeffs.axis_iter_mut(Axis(0)).zip(&svd.sigma) {
        row /= *s;
    }
    Ok(svd.vt.t().dot(&coeffs))
}

/// Moore-Penrose pseudoinverse of `h` (`cols x rows`).
pub fn pinv(h: ArrayView2<f64>) -> Result<Array2<f64>> {
    pinv_solve(h, Array2::eye(h.nrows()).view())
}

/// Numerical rank under [`svd_cutoff`].
pub fn rank(h: ArrayView2<f64>) -> Result<usize> {
    check_finite("H", h)?;
    Ok(truncated_svd(h)?.sigma.len())
}

/// Minimiser of `||H b - T||^2 + (1/lambda) ||b||^2`.
///
/// Solves the `L x L` system `(H^T H + I/lambda) b = H^T T` when `H` has no
/// more columns than rows, and the equivalent `N x N` dual
/// `b = H^T (H H^T + I/lambda)^{-1} T` otherwise. `lambda = 0` means an
/// infinite penalty and returns zeros.
pub fn ridge_solve(h: ArrayView2<f64>, t: ArrayView2<f64>, lambda: f64) -> Result<Array2<f64>> {
    check_rows(h, t)?;
    check_finite("H", h)?;
    check_finite("T", t)?;
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::Config(format!("ridge lambda must be finite and >= 0, got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(Array2::zeros((h.ncols(), t.ncols())));
    }
    let penalty = 1.0 / lambda;
    let primal = h.ncols() <= h.nrows();
    let mut gram = if primal { h.t().dot(&h) } else { h.dot(&h.t()) };
    gram.diag_mut().mapv_inplace(|d| d + penalty);
    let rhs = if primal { h.t().dot(&t) } else { t.to_owned() };

    let factor = gram.factorizec(UPLO::Lower)?;
    let mut sol = Array2::zeros(rhs.raw_dim());
    for (j, col) in rhs.axis_iter(Axis(1)).enumerate() {
        let x = factor.solvec(&col)?;
        sol.column_mut(j).assign(&x);
    }
    Ok(if primal { sol } else { h.t().dot(&sol) })
}
