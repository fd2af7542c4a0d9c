//! Straight-line reference implementations used as test oracles. None of
//! these call into the library's numeric paths.
#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::PI;

/// `|X_k|^2` for `k = 0..=n/2` by direct O(n^2) summation of the windowed frame.
pub fn dft_power(frame: &[f64], window: &[f64]) -> Vec<f64> {
    let n = frame.len();
    (0..=n / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (i, (&x, &w)) in frame.iter().zip(window).enumerate() {
                let ang = -2.0 * PI * (k * i % n) as f64 / n as f64;
                re += x * w * ang.cos();
                im += x * w * ang.sin();
            }
            re * re + im * im
        })
        .collect()
}

pub fn hamming(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.54 - 0.46 * (2.0 * PI * i as f64 / (n - 1) as f64).cos())
        .collect()
}

fn mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

fn inv_mel(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular mel weights, rebuilt from the definition.
pub fn mel_weights(n_filters: usize, frame_len: usize, sr: f64, f_min: f64, f_max: f64) -> Vec<Vec<f64>> {
    let bins = frame_len / 2 + 1;
    let (lo, hi) = (mel(f_min), mel(f_max));
    let pts: Vec<f64> = (0..n_filters + 2)
        .map(|i| inv_mel(lo + (hi - lo) * i as f64 / (n_filters + 1) as f64))
        .collect();
    let mut w = vec![vec![0.0; bins]; n_filters];
    for m in 0..n_filters {
        for k in 0..bins {
            let f = k as f64 * sr / frame_len as f64;
            if f > pts[m] && f <= pts[m + 1] {
                w[m][k] = (f - pts[m]) / (pts[m + 1] - pts[m]);
            } else if f > pts[m + 1] && f < pts[m + 2] {
                w[m][k] = (pts[m + 2] - f) / (pts[m + 2] - pts[m + 1]);
            }
        }
    }
    w
}

/// MFCC matrix by direct DFT, explicit filterbank sums and a naive DCT-II.
pub fn desk_mfcc(
    samples: &[f64],
    frame_len: usize,
    hop: usize,
    sr: f64,
    n_filters: usize,
    n_coeffs: usize,
) -> Vec<Vec<f64>> {
    let window = hamming(frame_len);
    let weights = mel_weights(n_filters, frame_len, sr, 0.0, sr / 2.0);
    let mut out = Vec::new();
    let mut start = 0;
    while start + frame_len <= samples.len() {
        let p = dft_power(&samples[start..start + frame_len], &window);
        let logmel: Vec<f64> = weights
            .iter()
            .map(|row| {
                let mut e = 0.0;
                for k in 0..p.len() {
                    e += row[k] * p[k];
                }
                if e < 1e-10 {
                    (1e-10f64).ln()
                } else {
                    e.ln()
                }
            })
            .collect();
        let n = n_filters as f64;
        let coeffs = (0..n_coeffs)
            .map(|k| {
                let mut acc = 0.0;
                for (i, v) in logmel.iter().enumerate() {
                    acc += v * (PI * k as f64 * (i as f64 + 0.5) / n).cos();
                }
                acc * if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() }
            })
            .collect();
        out.push(coeffs);
        start += hop;
    }
    out
}

/// Counts crossings by classifying each adjacent pair.
pub fn brute_zcr(x: &[f64]) -> f64 {
    let mut c = 0.0;
    for i in 1..x.len() {
        let (a, b) = (x[i - 1], x[i]);
        if (a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0) {
            c += 1.0;
        } else if (a == 0.0) != (b == 0.0) {
            c += 0.5;
        }
    }
    c
}

/// Plain two-pass population mean and std.
pub fn two_pass(col: &[f64]) -> (f64, f64) {
    let n = col.len() as f64;
    let m = col.iter().sum::<f64>() / n;
    let v = col.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    (m, v.sqrt())
}

/// Solves `a x = b` (square, column-wise rhs) by Gauss-Jordan elimination
/// with partial pivoting.
pub fn gauss_solve(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let m = b[0].len();
    let mut aug: Vec<Vec<f64>> = (0..n)
        .map(|i| a[i].iter().chain(&b[i]).copied().collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| aug[i][col].abs().total_cmp(&aug[j][col].abs()))
            .unwrap();
        aug.swap(col, piv);
        let p = aug[col][col];
        assert!(p.abs() > 1e-300, "singular system");
        for v in aug[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = aug[r][col];
                if f != 0.0 {
                    for c in col..n + m {
                        aug[r][c] -= f * aug[col][c];
                    }
                }
            }
        }
    }
    aug.into_iter().map(|row| row[n..].to_vec()).collect()
}

pub fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for j in 0..m {
            for t in 0..k {
                out[i][j] += a[i][t] * b[t][j];
            }
        }
    }
    out
}

pub fn transpose(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// `(H^T H)^{-1} H^T T`.
pub fn normal_equations(h: &[Vec<f64>], t: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let ht = transpose(h);
    gauss_solve(&matmul(&ht, h), &matmul(&ht, t))
}

/// Every training index sorted by (squared distance, index).
pub fn brute_order(x: &[Vec<f64>], q: &[f64]) -> Vec<usize> {
    let mut d: Vec<(f64, usize)> = x
        .iter()
        .enumerate()
        .map(|(i, r)| (r.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum(), i))
        .collect();
    d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    d.into_iter().map(|(_, i)| i).collect()
}

pub fn brute_knn_label(x: &[Vec<f64>], y: &[usize], q: &[f64], k: usize) -> usize {
    let order = brute_order(x, q);
    let mut votes = [0usize; 2];
    for &i in &order[..k] {
        votes[y[i]] += 1;
    }
    if votes[1] > votes[0] {
        1
    } else {
        0
    }
}

/// Least-squares linear probe on `[1, x]` against `y in {0,1}`, trained and
/// scored fold-wise with z-scored inputs. Returns micro-averaged accuracy (%).
pub fn linear_probe_accuracy(rows: &[Vec<f64>], y: &[usize], folds: &[u8]) -> f64 {
    let d = rows[0].len();
    let mut correct = 0;
    for k in 1..=5u8 {
        let train: Vec<usize> = (0..rows.len()).filter(|&i| folds[i] != k).collect();
        let test: Vec<usize> = (0..rows.len()).filter(|&i| folds[i] == k).collect();
        let mut mean = vec![0.0; d];
        let mut sd = vec![0.0; d];
        for j in 0..d {
            let col: Vec<f64> = train.iter().map(|&i| rows[i][j]).collect();
            let (m, s) = two_pass(&col);
            mean[j] = m;
            sd[j] = if s > 0.0 { s } else { 1.0 };
        }
        let z = |i: usize| -> Vec<f64> {
            std::iter::once(1.0)
                .chain((0..d).map(|j| (rows[i][j] - mean[j]) / sd[j]))
                .collect()
        };
        let a: Vec<Vec<f64>> = train.iter().map(|&i| z(i)).collect();
        let t: Vec<Vec<f64>> = train.iter().map(|&i| vec![y[i] as f64]).collect();
        let mut ata = matmul(&transpose(&a), &a);
        for (i, row) in ata.iter_mut().enumerate() {
            row[i] += 1e-8;
        }
        let w = gauss_solve(&ata, &matmul(&transpose(&a), &t));
        for &i in &test {
            let s: f64 = z(i).iter().zip(&w).map(|(a, w)| a * w[0]).sum();
            if usize::from(s > 0.5) == y[i] {
                correct += 1;
            }
        }
    }
    100.0 * correct as f64 / rows.len() as f64
}

/// Small deterministic generator for test fixtures.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [-1, 1).
    pub fn sym(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }

    pub fn matrix(&mut self, r: usize, c: usize) -> Vec<Vec<f64>> {
        (0..r).map(|_| (0..c).map(|_| self.sym()).collect()).collect()
    }
}
