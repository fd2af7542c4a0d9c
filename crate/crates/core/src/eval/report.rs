use std::fmt::Write;

use ndarray::Axis;
use serde::{Deserialize, Serialize};

use super::{EvalReport, SweepReport};
use crate::dataset::LabeledDataset;
use crate::features::{feature_names, mean_std};

/// Text table with one row per fold plus an overall row.
pub fn crossval_table(r: &EvalReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}  seeds={:?}  smote={}", r.params.model.name(), r.seeds, r.params.smote);
    let _ = writeln!(
        s,
        "{:<8} {:>10} {:>17} {:>12}",
        "", "Accuracy", "[min, max]", "Time (ms)"
    );
    for f in &r.folds {
        let _ = writeln!(
            s,
            "{:<8} {:>10.2} {:>17} {:>12.3}",
            format!("Fold {}", f.test_fold),
            f.accuracy_mean,
            format!("[{:.2}, {:.2}]", f.accuracy_min, f.accuracy_max),
            f.time_ms
        );
    }
    let _ = writeln!(
        s,
        "{:<8} {:>10.2} {:>17} {:>12.3}",
        "Overall",
        r.overall_accuracy,
        format!("[{:.2}, {:.2}]", r.overall_accuracy_min, r.overall_accuracy_max),
        r.overall_time_ms
    );
    s
}

pub fn crossval_csv(r: &EvalReport) -> String {
    let mut s = String::from("fold,accuracy_mean,accuracy_min,accuracy_max,time_ms,test_rows\n");
    for f in &r.folds {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            f.test_fold, f.accuracy_mean, f.accuracy_min, f.accuracy_max, f.time_ms, f.test_rows
        );
    }
    let rows: usize = r.folds.iter().map(|f| f.test_rows).sum();
    let _ = writeln!(
        s,
        "overall,{},{},{},{},{}",
        r.overall_accuracy, r.overall_accuracy_min, r.overall_accuracy_max, r.overall_time_ms, rows
    );
    s
}

/// Accuracy and time per fold for each hidden-layer size, side by side.
pub fn sweep_table(sw: &SweepReport) -> String {
    let mut s = String::new();
    let _ = write!(s, "{:<10}", "# hidden");
    for l in &sw.hidden {
        let _ = write!(s, " {:>22}", l);
    }
    let _ = write!(s, "\n{:<10}", "");
    for _ in &sw.hidden {
        let _ = write!(s, " {:>10} {:>11}", "Accuracy", "Time (ms)");
    }
    s.push('\n');
    let n_folds = sw.reports.first().map_or(0, |r| r.folds.len());
    for i in 0..n_folds {
        let _ = write!(s, "{:<10}", format!("Fold {}", sw.reports[0].folds[i].test_fold));
        for r in &sw.reports {
            let _ = write!(s, " {:>10.2} {:>11.3}", r.folds[i].accuracy_mean, r.folds[i].time_ms);
        }
        s.push('\n');
    }
    let _ = write!(s, "{:<10}", "Overall");
    for r in &sw.reports {
        let _ = write!(s, " {:>10.2} {:>11.3}", r.overall_accuracy, r.overall_time_ms);
    }
    s.push('\n');
    s
}

pub fn sweep_csv(sw: &SweepReport) -> String {
    let mut s = String::from("hidden,fold,accuracy,time_ms\n");
    for (l, r) in sw.hidden.iter().zip(&sw.reports) {
        for f in &r.folds {
            let _ = writeln!(s, "{l},{},{},{}", f.test_fold, f.accuracy_mean, f.time_ms);
        }
        let _ = writeln!(s, "{l},overall,{},{}", r.overall_accuracy, r.overall_time_ms);
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub class: String,
    pub feature: String,
    pub mean: f64,
    pub std: f64,
}

/// Per-class mean and population std of every feature dimension; one row per
/// (class, feature), classes in label order.
pub fn feature_summary(data: &LabeledDataset) -> Vec<SummaryRow> {
    let names = if data.dim() == feature_names().len() {
        feature_names()
    } else {
        (0..data.dim()).map(|j| format!("f{j:02}")).collect()
    };
    let mut rows = Vec::new();
    for (class, class_name) in data.label_names.iter().enumerate() {
        let idx: Vec<usize> = (0..data.len()).filter(|&i| data.labels[i] == class).collect();
        let x = data.features.select(Axis(0), &idx);
        for (j, col) in x.axis_iter(Axis(1)).enumerate() {
            let (mean, std) = mean_std(col.iter().copied());
            rows.push(SummaryRow {
                class: class_name.clone(),
                feature: names[j].clone(),
                mean,
                std,
            });
        }
    }
    rows
}

pub fn feature_summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = String::from("class,feature,mean,std\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{}", r.class, r.feature, r.mean, r.std);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    #[test]
    fn summary_shape_and_symmetry() {
        let n = 10;
        let mut x = Array2::zeros((2 * n, 28));
        for i in 0..n {
            for j in 0..28 {
                let v = (i * j) as f64 * 0.1;
                x[[i, j]] = v;
                x[[n + i, j]] = v;
            }
        }
        let labels = (0..2 * n).map(|i| usize::from(i >= n)).collect();
        let folds = (0..2 * n).map(|i| (i % 5 + 1) as u8).collect();
        let d = LabeledDataset::new(x, labels, folds).unwrap();
        let rows = feature_summary(&d);
        assert_eq!(rows.len(), 56);
        for j in 0..28 {
            assert_eq!(rows[j].mean, rows[28 + j].mean);
            assert_eq!(rows[j].std, rows[28 + j].std);
            assert_eq!(rows[j].feature, rows[28 + j].feature);
        }
        assert_eq!(rows[0].class, "urban");
        assert_eq!(rows[28].class, "siren");
        assert_eq!(feature_summary_csv(&rows).lines().count(), 57);
    }
}
