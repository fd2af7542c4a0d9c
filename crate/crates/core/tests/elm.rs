mod common;

use common::{gauss_solve, matmul, normal_equations, transpose, Lcg};
use ndarray::{Array2, Axis};
use proptest::prelude::*;
use siren_elm::elm::{argmax, hidden_output, init_random_layer};
use siren_elm::linalg::{pinv_solve, ridge_solve};
use siren_elm::{Activation, ElmConfig, ElmModel, Normalizer};

fn to_array(v: &[Vec<f64>]) -> Array2<f64> {
    Array2::from_shape_fn((v.len(), v[0].len()), |(i, j)| v[i][j])
}

fn residual(h: &Array2<f64>, beta: &Array2<f64>, t: &Array2<f64>) -> f64 {
    (h.dot(beta) - t).iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn blobs(seed: u64, n: usize, d: usize) -> (Array2<f64>, Vec<usize>) {
    let mut g = Lcg(seed);
    let y: Vec<usize> = (0..n).map(|i| i % 2).collect();
    let x = Array2::from_shape_fn((n, d), |(i, _)| g.sym() + if y[i] == 1 { 1.5 } else { -1.5 });
    (x, y)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pinv_matches_normal_equations(seed in any::<u64>(), n in 12usize..40, l in 2usize..10) {
        let mut g = Lcg(seed);
        let h = g.matrix(n, l);
        let t = g.matrix(n, 2);
        let want = normal_equations(&h, &t);
        let got = pinv_solve(to_array(&h).view(), to_array(&t).view()).unwrap();
        for i in 0..l {
            for j in 0..2 {
                prop_assert!((got[[i, j]] - want[i][j]).abs() <= 1e-8 * want[i][j].abs().max(1.0));
            }
        }
    }

    #[test]
    fn least_squares_is_a_local_minimum(seed in any::<u64>(), n in 8usize..=12, l in 2usize..=8) {
        let mut g = Lcg(seed);
        let h = to_array(&g.matrix(n, l));
        let t = to_array(&g.matrix(n, 2));
        let beta = pinv_solve(h.view(), t.view()).unwrap();
        let base = residual(&h, &beta, &t);
        for _ in 0..1000 {
            let dir = to_array(&g.matrix(l, 2));
            let moved = &beta + &(dir * 1e-4);
            prop_assert!(residual(&h, &moved, &t) >= base - 1e-12);
        }
    }

    #[test]
    fn wide_systems_interpolate_with_minimum_norm(seed in any::<u64>()) {
        let mut g = Lcg(seed);
        let hv = g.matrix(5, 10);
        let tv = g.matrix(5, 2);
        let (h, t) = (to_array(&hv), to_array(&tv));
        let beta = pinv_solve(h.view(), t.view()).unwrap();
        prop_assert!(residual(&h, &beta, &t) <= 1e-8);
        // Minimum-norm solution H^T (H H^T)^{-1} T.
        let ht = transpose(&hv);
        let want = matmul(&ht, &gauss_solve(&matmul(&hv, &ht), &tv));
        for i in 0..10 {
            for j in 0..2 {
                prop_assert!((beta[[i, j]] - want[i][j]).abs() <= 1e-8);
            }
        }
        // Adding any null-space component keeps the fit but grows the norm.
        let p = to_array(&matmul(&ht, &gauss_solve(&matmul(&hv, &ht), &hv)));
        let norm = |b: &Array2<f64>| b.iter().map(|v| v * v).sum::<f64>().sqrt();
        for _ in 0..20 {
            let z = to_array(&g.matrix(10, 2));
            let null = &z - &p.dot(&z);
            let other = &beta + &null;
            prop_assert!(residual(&h, &other, &t) <= 1e-8);
            prop_assert!(norm(&beta) <= norm(&other) + 1e-12);
        }
    }

    #[test]
    fn large_ridge_approaches_pinv(seed in any::<u64>()) {
        let mut g = Lcg(seed);
        let (n, l) = (25, 8);
        let h = to_array(&g.matrix(n, l));
        let t = to_array(&g.matrix(n, 2));
        let a = pinv_solve(h.view(), t.view()).unwrap();
        let b = ridge_solve(h.view(), t.view(), 1e12).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-4 * x.abs().max(1e-3));
        }
    }

    #[test]
    fn argmax_invariant_under_positive_scaling(
        s in prop::collection::vec(-10.0f64..10.0, 1..8),
        c in 1e-3f64..1e3,
    ) {
        let scaled: Vec<f64> = s.iter().map(|v| v * c).collect();
        prop_assert_eq!(argmax(&s), argmax(&scaled));
    }

    #[test]
    fn sigmoid_hidden_layer_is_bounded(seed in any::<u64>(), l in 1usize..50) {
        let mut g = Lcg(seed);
        let x = to_array(&g.matrix(10, 4));
        let (w, b) = init_random_layer(4, l, seed).unwrap();
        prop_assert!(w.iter().chain(&b).all(|v| (-1.0..=1.0).contains(v)));
        let h = hidden_output(x.view(), w.view(), b.view(), Activation::Sigmoid).unwrap();
        prop_assert!(h.iter().all(|&v| v > 0.0 && v < 1.0));
    }
}

#[test]
fn rank_deficient_design_still_solves() {
    let mut g = Lcg(3);
    let mut h = g.matrix(20, 5);
    for r in h.iter_mut() {
        r[4] = r[3];
    }
    let h = to_array(&h);
    let t = to_array(&g.matrix(20, 2));
    let beta = pinv_solve(h.view(), t.view()).unwrap();
    assert!(beta.iter().all(|v| v.is_finite()));
    // The duplicated columns share weight equally in the minimum-norm fit.
    for j in 0..2 {
        assert!((beta[[3, j]] - beta[[4, j]]).abs() < 1e-8);
    }
}

#[test]
fn scaling_output_weights_keeps_predictions() {
    let (x, y) = blobs(9, 60, 4);
    let m = ElmModel::train(x.view(), &y, &ElmConfig::new(20, 4)).unwrap();
    let mut scaled = m.clone();
    scaled.output_weights *= 7.5;
    assert_eq!(m.predict_normalized(x.view()).unwrap(), scaled.predict_normalized(x.view()).unwrap());
}

#[test]
fn training_is_deterministic_per_seed() {
    let (x, y) = blobs(1, 50, 3);
    let a = ElmModel::train(x.view(), &y, &ElmConfig::new(15, 42)).unwrap();
    let b = ElmModel::train(x.view(), &y, &ElmConfig::new(15, 42)).unwrap();
    let c = ElmModel::train(x.view(), &y, &ElmConfig::new(15, 43)).unwrap();
    assert_eq!(a.to_bytes(), b.to_bytes());
    assert_ne!(a.input_weights, c.input_weights);
}

#[test]
fn separable_blobs_are_learned() {
    let (x, y) = blobs(2, 200, 5);
    let m = ElmModel::train(x.view(), &y, &ElmConfig::new(10, 1)).unwrap();
    let pred = m.predict_normalized(x.view()).unwrap();
    let correct = pred.iter().zip(&y).filter(|(a, b)| a == b).count();
    assert!(correct >= 198, "{correct}/200");
}

#[test]
fn save_load_predicts_identically() {
    let (raw, y) = blobs(4, 80, 28);
    let raw = raw * 3.0 + 10.0;
    let norm = Normalizer::fitted(raw.view()).unwrap();
    let x = norm.transform(raw.view()).unwrap();
    let model = ElmModel::train(x.view(), &y, &ElmConfig::new(30, 8))
        .unwrap()
        .with_normalizer(norm)
        .unwrap()
        .with_labels(["urban", "siren"])
        .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.elm");
    model.save(&path).unwrap();
    let back = ElmModel::load(&path).unwrap();
    assert_eq!(back, model);
    let mut g = Lcg(77);
    let probes = Array2::from_shape_fn((100, 28), |_| 10.0 + 6.0 * g.sym());
    for row in probes.axis_iter(Axis(0)) {
        let r = row.to_vec();
        let (a, b) = (model.predict(&r).unwrap(), back.predict(&r).unwrap());
        assert_eq!(a.label, b.label);
        assert_eq!(a.scores, b.scores);
    }
}

#[test]
fn corrupt_model_files_are_rejected() {
    let (x, y) = blobs(5, 30, 3);
    let bytes = ElmModel::train(x.view(), &y, &ElmConfig::new(4, 1)).unwrap().to_bytes();
    assert!(ElmModel::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    let mut extra = bytes.clone();
    extra.push(0);
    assert!(ElmModel::from_bytes(&extra).is_err());
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(ElmModel::from_bytes(&bad).is_err());
    let mut ver = bytes;
    ver[4] = 9;
    assert!(matches!(
        ElmModel::from_bytes(&ver),
        Err(siren_elm::Error::UnsupportedVersion { found: 9, .. })
    ));
}

#[test]
fn hidden_layer_reference_values() {
    let x = ndarray::array![[3f64.ln(), 2.0]];
    let w = ndarray::array![[1.0, 0.0]];
    let b = ndarray::array![0.0];
    let h = hidden_output(x.view(), w.view(), b.view(), Activation::Sigmoid).unwrap();
    assert!((h[[0, 0]] - 0.75).abs() < 1e-15);
    let zero = hidden_output(x.view(), Array2::zeros((3, 2)).view(), ndarray::Array1::zeros(3).view(), Activation::Sigmoid).unwrap();
    assert!(zero.iter().all(|&v| v == 0.5));
    let (a, _) = init_random_layer(28, 10, 1).unwrap();
    let (c, _) = init_random_layer(28, 10, 2).unwrap();
    assert_ne!(a, c);
}

#[test]
fn exact_interpolation_recovers_targets() {
    let (x, y) = blobs(12, 20, 6);
    let m = ElmModel::train(x.view(), &y, &ElmConfig::new(20, 3)).unwrap();
    let scores = m.scores_normalized(x.view()).unwrap();
    for (i, &label) in y.iter().enumerate() {
        for c in 0..2 {
            let want = if c == label { 1.0 } else { 0.0 };
            assert!((scores[[i, c]] - want).abs() < 1e-6);
        }
    }
    assert_eq!(m.predict_normalized(x.view()).unwrap(), y);
}
