//! ESC-50 metadata manifest (`meta/esc50.csv`).

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::{SIREN, URBAN};

/// ESC-50 category of the emergency-vehicle class.
pub const SIREN_CATEGORY: &str = "siren";

/// ESC-50 categories that make up the urban background class.
pub const URBAN_CATEGORIES: [&str; 16] = [
    "car_horn",
    "engine",
    "train",
    "helicopter",
    "chainsaw",
    "airplane",
    "fireworks",
    "hand_saw",
    "crying_baby",
    "sneezing",
    "clapping",
    "coughing",
    "footsteps",
    "laughing",
    "rain",
    "wind",
];

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct ManifestEntry {
    pub filename: String,
    pub fold: u8,
    pub category: String,
}

/// Maps a manifest category to its binary class, or `None` when the row is
/// excluded from the siren-vs-urban subset.
///
/// Matching ignores case and surrounding whitespace, and treats spaces as
/// underscores ("Car horn" == "car_horn").
pub fn class_of(category: &str) -> Option<usize> {
    let norm = category.trim().to_ascii_lowercase().replace(' ', "_");
    if norm == SIREN_CATEGORY {
        Some(SIREN)
    } else if URBAN_CATEGORIES.contains(&norm.as_str()) {
        Some(URBAN)
    } else {
        None
    }
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
    parse_manifest(reader)
}

pub fn parse_manifest_str(text: &str) -> Result<Vec<ManifestEntry>> {
    let reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    parse_manifest(reader)
}

fn parse_manifest<R: std::io::Read>(mut reader: csv::Reader<R>) -> Result<Vec<ManifestEntry>> {
    let headers = reader.headers()?.clone();
    for required in ["filename", "fold", "category"] {
        if !headers.iter().any(|h| h == required) {
            return Err(Error::Manifest(format!(
                "missing column {required:?} (found: {})",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
    }
    let mut entries = Vec::new();
    for (i, row) in reader.deserialize::<ManifestEntry>().enumerate() {
        let entry = row.map_err(|e| Error::Manifest(format!("row {}: {e}", i + 2)))?;
        entries.push(entry);
    }
    Ok(entries)
}

/// Manifest rows split into the two-class subset and the excluded remainder.
#[derive(Debug, Clone, Default)]
pub struct Selection {
    pub included: Vec<(ManifestEntry, usize)>,
    pub excluded: usize,
}

pub fn select(entries: Vec<ManifestEntry>) -> Selection {
    let mut sel = Selection::default();
    for e in entries {
        match class_of(&e.category) {
            Some(label) => sel.included.push((e, label)),
            None => sel.excluded += 1,
        }
    }
    sel
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "filename,fold,target,category,esc10,src_file,take\n";

    #[test]
    fn category_matching() {
        assert_eq!(class_of("siren"), Some(SIREN));
        assert_eq!(class_of("  Siren "), Some(SIREN));
        assert_eq!(class_of("Car horn"), Some(URBAN));
        assert_eq!(class_of("hand_saw"), Some(URBAN));
        assert_eq!(class_of("dog"), None);
        assert_eq!(class_of("sea_waves"), None);
    }

    #[test]
    fn esc50_layout_parses() {
        let text = format!(
            "{HEADER}1-100032-A-0.wav,1,0,dog,True,100032,A\n1-17124-A-42.wav,1,42,siren,False,17124,A\n"
        );
        let entries = parse_manifest_str(&text).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[1].category, "siren");
        let sel = select(entries);
        assert_eq!(sel.included.len(), 1);
        assert_eq!(sel.excluded, 1);
    }

    #[test]
    fn dog_only_manifest_selects_nothing() {
        let text = format!("{HEADER}a.wav,1,0,dog,True,1,A\nb.wav,2,0,dog,True,2,A\n");
        let sel = select(parse_manifest_str(&text).unwrap());
        assert!(sel.included.is_empty());
        assert_eq!(sel.excluded, 2);
    }

    #[test]
    fn unknown_layout_is_rejected() {
        let err = parse_manifest_str("file,split,label\na.wav,1,siren\n").unwrap_err();
        assert!(matches!(err, Error::Manifest(_)));
    }
}
