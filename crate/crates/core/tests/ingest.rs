use std::fs;
use std::path::Path;

use siren_elm::ingest::{decode_wav, encode_wav_pcm16, load_dataset};
use siren_elm::synth::{siren_like, tone, urban_noise};
use siren_elm::{Error, FeatureExtractor, LabeledDataset, SIREN, URBAN};

fn write(dir: &Path, name: &str, samples: &[f32], rate: u32) {
    fs::write(dir.join(name), encode_wav_pcm16(samples, rate, 1)).unwrap();
}

#[test]
fn manifest_to_features() {
    let dir = tempfile::tempdir().unwrap();
    let audio = dir.path().join("audio");
    fs::create_dir(&audio).unwrap();
    let mut csv = String::from("filename,fold,target,category,esc10,src_file,take\n");
    for f in 1..=5u8 {
        let s = format!("s{f}.wav");
        let u = format!("u{f}.wav");
        let d = format!("d{f}.wav");
        write(&audio, &s, &siren_like(f as u64, 44_100, 5.0), 44_100);
        write(&audio, &u, &urban_noise(f as u64, 44_100, 5.0), 44_100);
        csv += &format!("{s},{f},42,siren,False,1,A\n{u},{f},44,engine,False,2,A\n{d},{f},0,dog,True,3,A\n");
    }
    let manifest = dir.path().join("esc50.csv");
    fs::write(&manifest, csv).unwrap();

    let loaded = load_dataset(&manifest, &audio).unwrap();
    assert_eq!(loaded.excluded_rows, 5);
    let counts = loaded.counts();
    assert_eq!((counts.siren, counts.urban), (5, 5));
    assert!(!counts.matches_esc50());
    assert!((loaded.duration_secs() - 50.0).abs() < 1e-9);

    let data = LabeledDataset::from_clips(&loaded.clips, &FeatureExtractor::standard(44_100).unwrap()).unwrap();
    assert_eq!((data.len(), data.dim()), (10, 28));
    assert_eq!(data.class_counts(), vec![5, 5]);
    assert_eq!(data.labels[0], SIREN);
    assert_eq!(data.labels[1], URBAN);

    let bin = dir.path().join("f.bin");
    let csv = dir.path().join("f.csv");
    data.write(&bin).unwrap();
    data.write(&csv).unwrap();
    assert_eq!(LabeledDataset::read(&bin).unwrap(), data);
    let from_csv = LabeledDataset::read(&csv).unwrap();
    assert_eq!(from_csv.labels, data.labels);
    assert!(from_csv.features.iter().zip(&data.features).all(|(a, b)| (a - b).abs() <= 1e-12 * b.abs().max(1.0)));
}

#[test]
fn missing_and_wrong_rate_clips_error() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.csv");
    fs::write(&manifest, "filename,fold,category\na.wav,1,siren\n").unwrap();
    assert!(matches!(load_dataset(&manifest, dir.path()), Err(Error::Ingest { .. })));

    write(dir.path(), "a.wav", &tone(440.0, 0.5, 16_000, 1.0), 16_000);
    match load_dataset(&manifest, dir.path()) {
        Err(Error::RateMismatch { found: 16_000, .. }) => {}
        Err(Error::Ingest { source, .. }) if matches!(*source, Error::RateMismatch { .. }) => {}
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn short_clips_are_padded_to_five_seconds() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.wav", &tone(440.0, 0.5, 44_100, 1.0), 44_100);
    fs::write(dir.path().join("m.csv"), "filename,fold,category\na.wav,3,siren\n").unwrap();
    let loaded = load_dataset(dir.path().join("m.csv"), dir.path()).unwrap();
    assert_eq!(loaded.clips[0].samples.len(), 220_500);
    assert!(loaded.clips[0].samples[44_100..].iter().all(|&s| s == 0.0));
}

#[test]
fn truncated_wav_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let bytes = encode_wav_pcm16(&tone(440.0, 0.5, 44_100, 0.1), 44_100, 1);
    let p = dir.path().join("t.wav");
    fs::write(&p, &bytes[..30]).unwrap();
    assert!(matches!(decode_wav(&p), Err(Error::Format(_))));
}
