//! Feature matrix with labels and fold ids, and its on-disk formats.
//!
//! CSV: header `label,fold,f00,...,f27`, one row per clip.
//!
//! Binary (little-endian throughout):
//!
//! | offset | size | field                                   |
//! |--------|------|-----------------------------------------|
//! | 0      | 4    | magic `SELM`                            |
//! | 4      | 2    | version (u16, currently 1)              |
//! | 6      | 4    | rows (u32)                              |
//! | 10     | 4    | cols (u32) = 2 + feature dimension      |
//! | 14     | 8·rows·cols | row-major f64: label, fold, features |

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::{Array2, ArrayView1, Axis};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::{FeatureExtractor, FEATURE_DIM};
use crate::ingest::AudioClip;
use crate::CLASS_NAMES;

pub const BINARY_MAGIC: &[u8; 4] = b"SELM";
pub const BINARY_VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub features: Array2<f64>,
    pub labels: Vec<usize>,
    pub folds: Vec<u8>,
    pub label_names: Vec<String>,
}

impl LabeledDataset {
    pub fn new(features: Array2<f64>, labels: Vec<usize>, folds: Vec<u8>) -> Result<Self> {
        if labels.len() != features.nrows() {
            return Err(Error::Dimension {
                expected: features.nrows(),
                found: labels.len(),
            });
        }
        if folds.len() != features.nrows() {
            return Err(Error::Dimension {
                expected: features.nrows(),
                found: folds.len(),
            });
        }
        if let Some(&l) = labels.iter().find(|&&l| l >= CLASS_NAMES.len()) {
            return Err(Error::FeatureFormat(format!("label {l} is not binary")));
        }
        Ok(LabeledDataset {
            features,
            labels,
            folds,
            label_names: CLASS_NAMES.iter().map(|s| s.to_string()).collect(),
        })
    }

    /// Extracts features from every clip, in order.
    pub fn from_clips(clips: &[AudioClip], extractor: &FeatureExtractor) -> Result<Self> {
        let rows = clips
            .par_iter()
            .map(|c| {
                extractor.extract_clip(c).map_err(|e| Error::Ingest {
                    path: c.source.clone().into(),
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut features = Array2::zeros((rows.len(), FEATURE_DIM));
        for (mut dst, v) in features.rows_mut().into_iter().zip(&rows) {
            dst.assign(&ArrayView1::from(&v.0[..]));
        }
        Self::new(
            features,
            clips.iter().map(|c| c.label).collect(),
            clips.iter().map(|c| c.fold).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.label_names.len()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Rows at `idx`, in order.
    pub fn subset(&self, idx: &[usize]) -> (Array2<f64>, Vec<usize>) {
        (
            self.features.select(Axis(0), idx),
            idx.iter().map(|&i| self.labels[i]).collect(),
        )
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = String::from("label,fold");
        for j in 0..self.dim() {
            s.push_str(&format!(",f{j:02}"));
        }
        s.push('\n');
        for (i, row) in self.features.rows().into_iter().enumerate() {
            s.push_str(&format!("{},{}", self.labels[i], self.folds[i]));
            for v in row {
                // `{}` on f64 is the shortest representation that round-trips.
                s.push_str(&format!(",{v}"));
            }
            s.push('\n');
        }
        s
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| Error::FeatureFormat(e.to_string()))?
            .clone();
        if headers.len() < 3 || &headers[0] != "label" || &headers[1] != "fold" {
            return Err(Error::FeatureFormat(
                "expected header label,fold,f00,...".into(),
            ));
        }
        let dim = headers.len() - 2;
        let mut values = Vec::new();
        let mut labels = Vec::new();
        let mut folds = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::FeatureFormat(e.to_string()))?;
            let bad = |what: &str| Error::FeatureFormat(format!("row {}: bad {what}", i + 2));
            labels.push(rec[0].trim().parse::<usize>().map_err(|_| bad("label"))?);
            folds.push(rec[1].trim().parse::<u8>().map_err(|_| bad("fold"))?);
            for field in rec.iter().skip(2) {
                values.push(field.trim().parse::<f64>().map_err(|_| bad("value"))?);
            }
        }
        let features = Array2::from_shape_vec((labels.len(), dim), values)
            .map_err(|e| Error::FeatureFormat(e.to_string()))?;
        Self::new(features, labels, folds)
    }

    pub fn to_binary(&self) -> Vec<u8> {
        let cols = self.dim() + 2;
        let mut out = Vec::with_capacity(14 + 8 * self.len() * cols);
        out.extend_from_slice(BINARY_MAGIC);
        out.extend_from_slice(&BINARY_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.len() as u32).to_le_bytes());
        out.extend_from_slice(&(cols as u32).to_le_bytes());
        for (i, row) in self.features.rows().into_iter().enumerate() {
            out.extend_from_slice(&(self.labels[i] as f64).to_le_bytes());
            out.extend_from_slice(&(self.folds[i] as f64).to_le_bytes());
            for v in row {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_binary(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 14 || &bytes[..4] != BINARY_MAGIC {
            return Err(Error::FeatureFormat("missing SELM magic".into()));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != BINARY_VERSION {
            return Err(Error::UnsupportedVersion {
                found: version,
                supported: BINARY_VERSION,
            });
        }
        let rows = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
        let cols = u32::from_le_bytes(bytes[10..14].try_into().unwrap()) as usize;
        if cols < 3 {
            return Err(Error::FeatureFormat(format!("{cols} columns, need >= 3")));
        }
        let expected = rows
            .checked_mul(cols)
            .and_then(|n| n.checked_mul(8))
            .and_then(|n| n.checked_add(14));
        if expected != Some(bytes.len()) {
            return Err(Error::FeatureFormat(format!(
                "{rows}x{cols} matrix needs {expected:?} bytes, file has {}",
                bytes.len()
            )));
        }
        let vals: Vec<f64> = bytes[14..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let mut labels = Vec::with_capacity(rows);
        let mut folds = Vec::with_capacity(rows);
        let mut feats = Vec::with_capacity(rows * (cols - 2));
        for row in vals.chunks_exact(cols) {
            let as_int = |v: f64, what: &str| {
                if v.fract() == 0.0 && (0.0..=255.0).contains(&v) {
                    Ok(v as usize)
                } else {
                    Err(Error::FeatureFormat(format!("non-integer {what} {v}")))
                }
            };
            labels.push(as_int(row[0], "label")?);
            folds.push(as_int(row[1], "fold")? as u8);
            feats.extend_from_slice(&row[2..]);
        }
        let features = Array2::from_shape_vec((rows, cols - 2), feats)
            .map_err(|e| Error::FeatureFormat(e.to_string()))?;
        Self::new(features, labels, folds)
    }

    /// Reads either format, detected by the `SELM` magic.
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let bytes = fs::read(path)?;
        if bytes.starts_with(BINARY_MAGIC) {
            Self::from_binary(&bytes)
        } else {
            let text = String::from_utf8(bytes)
                .map_err(|_| Error::FeatureFormat("neither SELM binary nor UTF-8 CSV".into()))?;
            Self::from_csv_str(&text)
        }
    }

    /// Writes binary when the extension is `.bin` or `.selm`, CSV otherwise.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let binary = matches!(
            path.extension().and_then(|e| e.to_str()),
            Some("bin") | Some("selm")
        );
        let mut f = fs::File::create(path)?;
        if binary {
            f.write_all(&self.to_binary())?;
        } else {
            f.write_all(self.to_csv_string().as_bytes())?;
        }
        Ok(())
    }
}
