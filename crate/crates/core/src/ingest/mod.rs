//! Audio decoding, clip standardisation and dataset loading.

mod manifest;
mod wav;

use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use manifest::{
    class_of, parse_manifest_str, read_manifest, select, ManifestEntry, Selection,
    SIREN_CATEGORY, URBAN_CATEGORIES,
};
pub use wav::{decode_wav, decode_wav_bytes, encode_wav_pcm16, WavData};

use crate::error::{Error, Result};
use crate::SIREN;

/// Sample rate every clip must have.
pub const EXPECTED_SAMPLE_RATE: u32 = 44_100;
/// Standardised clip length in seconds.
pub const CLIP_SECONDS: f64 = 5.0;

/// Class sizes of the siren-vs-urban subset of ESC-50.
pub const EXPECTED_SIREN_CLIPS: usize = 40;
pub const EXPECTED_URBAN_CLIPS: usize = 640;

/// A standardised mono clip.
#[derive(Debug, Clone)]
pub struct AudioClip {
    pub samples: Vec<f32>,
    pub sample_rate: u32,
    pub label: usize,
    pub fold: u8,
    pub source: String,
}

/// Averages equally long channels into one.
pub fn to_mono(channels: &[Vec<f32>]) -> Result<Vec<f32>> {
    let first = channels.first().ok_or(Error::EmptyInput("no channels"))?;
    if channels.len() == 1 {
        return Ok(first.clone());
    }
    if let Some(bad) = channels.iter().find(|c| c.len() != first.len()) {
        return Err(Error::Dimension {
            expected: first.len(),
            found: bad.len(),
        });
    }
    let n = channels.len() as f64;
    Ok((0..first.len())
        .map(|i| (channels.iter().map(|c| c[i] as f64).sum::<f64>() / n) as f32)
        .collect())
}

/// Number of samples in a standardised clip at `sample_rate`.
pub fn target_len(sample_rate: u32, seconds: f64) -> usize {
    (sample_rate as f64 * seconds).round() as usize
}

/// Zero-pads or truncates at the end to exactly `sample_rate * seconds` samples.
pub fn fix_length(samples: &[f32], sample_rate: u32, seconds: f64) -> Result<Vec<f32>> {
    if sample_rate == 0 {
        return Err(Error::Config("sample rate must be positive".into()));
    }
    if samples.is_empty() {
        return Err(Error::EmptyInput("clip has no samples"));
    }
    let len = target_len(sample_rate, seconds);
    let mut out = samples[..samples.len().min(len)].to_vec();
    out.resize(len, 0.0);
    Ok(out)
}

/// Decodes a WAV file into a standardised mono clip at 44.1 kHz.
pub fn load_clip(path: &Path, label: usize, fold: u8) -> Result<AudioClip> {
    let wrap = |e: Error| Error::Ingest {
        path: path.to_path_buf(),
        source: Box::new(e),
    };
    let wav = decode_wav(path).map_err(wrap)?;
    if wav.sample_rate != EXPECTED_SAMPLE_RATE {
        return Err(Error::RateMismatch {
            path: path.to_path_buf(),
            expected: EXPECTED_SAMPLE_RATE,
            found: wav.sample_rate,
        });
    }
    let mono = to_mono(&wav.deinterleave()).map_err(wrap)?;
    let samples = fix_length(&mono, wav.sample_rate, CLIP_SECONDS).map_err(wrap)?;
    Ok(AudioClip {
        samples,
        sample_rate: wav.sample_rate,
        label,
        fold,
        source: path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default(),
    })
}

/// Class composition of a loaded subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassCounts {
    pub siren: usize,
    pub urban: usize,
}

impl ClassCounts {
    pub fn total(&self) -> usize {
        self.siren + self.urban
    }

    pub fn matches_esc50(&self) -> bool {
        self.siren == EXPECTED_SIREN_CLIPS && self.urban == EXPECTED_URBAN_CLIPS
    }
}

/// The manifest rows selected for loading, resolved against the audio directory.
#[derive(Debug, Clone)]
pub struct DatasetPlan {
    pub items: Vec<PlannedClip>,
    pub excluded_rows: usize,
}

#[derive(Debug, Clone)]
pub struct PlannedClip {
    pub path: PathBuf,
    pub label: usize,
    pub fold: u8,
}

impl DatasetPlan {
    pub fn new(manifest: impl AsRef<Path>, audio_dir: impl AsRef<Path>) -> Result<Self> {
        let sel = select(read_manifest(manifest)?);
        let audio_dir = audio_dir.as_ref();
        let items = sel
            .included
            .into_iter()
            .map(|(e, label)| {
                if !(1..=5).contains(&e.fold) {
                    return Err(Error::Manifest(format!(
                        "{}: fold {} outside 1..=5",
                        e.filename, e.fold
                    )));
                }
                Ok(PlannedClip {
                    path: audio_dir.join(&e.filename),
                    label,
                    fold: e.fold,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DatasetPlan {
            items,
            excluded_rows: sel.excluded,
        })
    }

    pub fn counts(&self) -> ClassCounts {
        let siren = self.items.iter().filter(|c| c.label == SIREN).count();
        ClassCounts {
            siren,
            urban: self.items.len() - siren,
        }
    }

    /// Loads every planned clip, in manifest order.
    pub fn load(&self) -> Result<Vec<AudioClip>> {
        self.items
            .par_iter()
            .map(|c| load_clip(&c.path, c.label, c.fold))
            .collect()
    }
}

/// A loaded siren-vs-urban subset.
#[derive(Debug, Clone)]
pub struct LoadedClips {
    pub clips: Vec<AudioClip>,
    pub excluded_rows: usize,
}

impl LoadedClips {
    pub fn counts(&self) -> ClassCounts {
        let siren = self.clips.iter().filter(|c| c.label == SIREN).count();
        ClassCounts {
            siren,
            urban: self.clips.len() - siren,
        }
    }

    /// Total audio duration in seconds.
    pub fn duration_secs(&self) -> f64 {
        self.clips
            .iter()
            .map(|c| c.samples.len() as f64 / c.sample_rate as f64)
            .sum()
    }
}

/// Reads the manifest and loads the siren and urban rows from `audio_dir`.
pub fn load_dataset(manifest: impl AsRef<Path>, audio_dir: impl AsRef<Path>) -> Result<LoadedClips> {
    let plan = DatasetPlan::new(manifest, audio_dir)?;
    Ok(LoadedClips {
        clips: plan.load()?,
        excluded_rows: plan.excluded_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    #[test]
    fn mono_examples() {
        assert_eq!(to_mono(&[vec![0.5, -0.5]]).unwrap(), vec![0.5, -0.5]);
        assert_eq!(to_mono(&[vec![1.0], vec![-1.0]]).unwrap(), vec![0.0]);
        let m = to_mono(&[vec![0.2, 0.4], vec![0.6, 0.0]]).unwrap();
        assert!((m[0] - 0.4).abs() < 1e-7 && (m[1] - 0.2).abs() < 1e-7);
        assert!(matches!(to_mono(&[]), Err(Error::EmptyInput(_))));
        assert!(to_mono(&[vec![0.0], vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn fix_length_examples() {
        let exact = vec![0.25f32; 220_500];
        assert_eq!(fix_length(&exact, 44100, 5.0).unwrap(), exact);

        let short: Vec<f32> = (0..100).map(|i| i as f32 / 100.0).collect();
        let padded = fix_length(&short, 44100, 5.0).unwrap();
        assert_eq!(padded.len(), 220_500);
        assert_eq!(&padded[..100], &short[..]);
        assert!(padded[100..].iter().all(|&s| s == 0.0));

        let long: Vec<f32> = (0..300_000).map(|i| (i % 7) as f32 / 7.0).collect();
        let cut = fix_length(&long, 44100, 5.0).unwrap();
        assert_eq!(&cut[..], &long[..220_500]);

        assert!(matches!(fix_length(&[], 44100, 5.0), Err(Error::EmptyInput(_))));
        assert!(fix_length(&[0.0], 0, 5.0).is_err());
    }

    fn write_fixture(dir: &Path, rows: &[(&str, u8, &str, u32, usize)]) -> PathBuf {
        let mut csv = String::from("filename,fold,target,category,esc10,src_file,take\n");
        for &(name, fold, cat, rate, len) in rows {
            csv.push_str(&format!("{name},{fold},0,{cat},False,0,A\n"));
            if rate > 0 {
                let samples: Vec<f32> = (0..len).map(|i| ((i % 50) as f32 - 25.0) / 50.0).collect();
                fs::write(dir.join(name), encode_wav_pcm16(&samples, rate, 1)).unwrap();
            }
        }
        let manifest = dir.join("esc50.csv");
        fs::write(&manifest, csv).unwrap();
        manifest
    }

    #[test]
    fn loads_subset_and_reports_exclusions() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_fixture(
            dir.path(),
            &[
                ("a.wav", 1, "siren", 44100, 1000),
                ("b.wav", 2, "engine", 44100, 300_000),
                ("c.wav", 3, "dog", 0, 0),
            ],
        );
        let loaded = load_dataset(&manifest, dir.path()).unwrap();
        assert_eq!(loaded.clips.len(), 2);
        assert_eq!(loaded.excluded_rows, 1);
        assert_eq!(loaded.counts(), ClassCounts { siren: 1, urban: 1 });
        assert!(loaded.clips.iter().all(|c| c.samples.len() == 220_500));
        assert_eq!(loaded.clips[0].label, SIREN);
        assert_eq!(loaded.clips[1].fold, 2);
        assert!((loaded.duration_secs() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn missing_file_names_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_fixture(dir.path(), &[("gone.wav", 1, "siren", 0, 0)]);
        let err = load_dataset(&manifest, dir.path()).unwrap_err();
        assert!(err.to_string().contains("gone.wav"), "{err}");
    }

    #[test]
    fn wrong_rate_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_fixture(dir.path(), &[("a.wav", 1, "siren", 22050, 500)]);
        let err = load_dataset(&manifest, dir.path()).unwrap_err();
        assert!(matches!(err, Error::RateMismatch { found: 22050, .. }), "{err}");
    }

    #[test]
    fn decode_pipeline_is_deterministic() {
        let samples: Vec<f32> = (0..5000).map(|i| (i as f32 * 0.01).sin() * 0.8).collect();
        let bytes = encode_wav_pcm16(&samples, 44100, 1);
        let run = || {
            let w = decode_wav_bytes(&bytes).unwrap();
            fix_length(&to_mono(&w.deinterleave()).unwrap(), w.sample_rate, CLIP_SECONDS).unwrap()
        };
        assert_eq!(run(), run());
    }
}
