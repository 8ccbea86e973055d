//! Dataset manifests, grayscale PGM and matrix-CSV images, and seeded
//! per-class train/test splits.
//!
//! A manifest is UTF-8 text with one `path,label` pair per line. Paths are
//! relative to the manifest's directory; blank lines and lines starting with
//! `#` are ignored. The image format is picked from the file extension:
//! `.pgm` (P2 or P5, maxval up to 65535, scaled to `[0, 1]`) or `.csv`
//! (one comma-separated row of decimals per line, read as-is).

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::stream_rng;
use crate::stats::LabeledMatrixDataset;

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub label: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (path, label) = line.rsplit_once(',').ok_or_else(|| Error::DecodeError {
                path: format!("manifest line {}", lineno + 1),
                reason: "expected `path,label`".into(),
            })?;
            let label = label.trim().parse::<i64>().map_err(|_| Error::DecodeError {
                path: format!("manifest line {}", lineno + 1),
                reason: format!("label `{}` is not an integer", label.trim()),
            })?;
            entries.push(ManifestEntry { path: base.join(path.trim()), label });
        }
        if entries.is_empty() {
            return Err(Error::EmptyManifest);
        }
        Ok(Self { entries })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|_| Error::MissingFile(path.display().to_string()))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    /// Labels mapped to `1..=c` in order of first appearance.
    pub fn canonical_labels(&self) -> (Vec<usize>, usize) {
        let mut map = HashMap::new();
        let labels = self
            .entries
            .iter()
            .map(|e| {
                let next = map.len() + 1;
                *map.entry(e.label).or_insert(next)
            })
            .collect();
        (labels, map.len())
    }
}

fn decode_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::DecodeError { path: path.display().to_string(), reason: reason.into() }
}

/// Decodes a P2 or P5 graymap, scaling pixels by `1 / maxval`.
pub fn decode_pgm(bytes: &[u8], path: &Path) -> Result<Matrix> {
    let mut pos = 0;
    let mut header = Vec::with_capacity(4);
    while header.len() < 4 {
        // whitespace and comments between header tokens
        while pos < bytes.len() {
            if bytes[pos].is_ascii_whitespace() {
                pos += 1;
            } else if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return Err(decode_err(path, "truncated header"));
        }
        header.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| decode_err(path, "bad header"))?);
    }
    let binary = match header[0] {
        "P2" => false,
        "P5" => true,
        other => return Err(decode_err(path, format!("unsupported magic `{other}`"))),
    };
    let num = |s: &str| s.parse::<usize>().map_err(|_| decode_err(path, format!("bad header field `{s}`")));
    let (width, height, maxval) = (num(header[1])?, num(header[2])?, num(header[3])?);
    if width == 0 || height == 0 || maxval == 0 || maxval > 65535 {
        return Err(decode_err(path, "invalid dimensions or maxval"));
    }
    let count = width * height;
    let scale = 1.0 / maxval as f64;
    let raw: Vec<usize> = if binary {
        // exactly one whitespace byte separates the header from the raster
        pos += 1;
        let wide = maxval > 255;
        let need = count * if wide { 2 } else { 1 };
        let data = bytes.get(pos..pos + need).ok_or_else(|| decode_err(path, "truncated raster"))?;
        if wide {
            data.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]]) as usize).collect()
        } else {
            data.iter().map(|&b| b as usize).collect()
        }
    } else {
        let text = std::str::from_utf8(&bytes[pos..]).map_err(|_| decode_err(path, "non-ASCII raster"))?;
        let values: Vec<usize> = text
            .split_ascii_whitespace()
            .take(count)
            .map(num)
            .collect::<Result<_>>()?;
        if values.len() != count {
            return Err(decode_err(path, "truncated raster"));
        }
        values
    };
    if raw.iter().any(|&v| v > maxval) {
        return Err(decode_err(path, "pixel exceeds maxval"));
    }
    Matrix::new(height, width, raw.into_iter().map(|v| v as f64 * scale).collect())
}

/// Encodes pixels in `[0, 1]` as a binary 8-bit graymap.
pub fn encode_pgm(x: &Matrix) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", x.cols(), x.rows()).into_bytes();
    out.extend(x.as_slice().iter().map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8));
    out
}

pub fn decode_matrix_csv(text: &str, path: &Path) -> Result<Matrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|c| c.trim().parse::<f64>().map_err(|_| decode_err(path, format!("bad value `{c}`"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(decode_err(path, "empty matrix"));
    }
    Matrix::from_rows(&rows).map_err(|e| decode_err(path, e.to_string()))
}

/// Shortest round-trip decimal, one row per line.
pub fn encode_matrix_csv(x: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..x.rows() {
        let row: Vec<String> = x.row(i).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn load_image(path: &Path) -> Result<Matrix> {
    let bytes = fs::read(path).map_err(|_| Error::MissingFile(path.display().to_string()))?;
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("pgm") => decode_pgm(&bytes, path),
        Some("csv") => {
            let text = String::from_utf8(bytes).map_err(|_| decode_err(path, "not UTF-8"))?;
            decode_matrix_csv(&text, path)
        }
        _ => Err(decode_err(path, "unsupported extension (expected .pgm or .csv)")),
    }
}

/// Loads every manifest entry in order, relabeling classes to `1..=c`.
pub fn load_dataset(manifest_path: &Path) -> Result<LabeledMatrixDataset> {
    let manifest = DatasetManifest::read(manifest_path)?;
    let mut samples = Vec::with_capacity(manifest.entries.len());
    let mut expected = None;
    for entry in &manifest.entries {
        let x = load_image(&entry.path)?;
        match expected {
            None => expected = Some(x.shape()),
            Some(shape) if shape != x.shape() => {
                return Err(Error::DimensionMismatch {
                    path: entry.path.display().to_string(),
                    expected: shape,
                    got: x.shape(),
                })
            }
            _ => {}
        }
        samples.push(x);
    }
    let (labels, classes) = manifest.canonical_labels();
    LabeledMatrixDataset::with_classes(samples, labels, classes)
}

/// Writes each sample as `NNNNN.csv` under `dir` plus a `manifest.csv`, and
/// returns the manifest path.
pub fn save_dataset(data: &LabeledMatrixDataset, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let width = data.len().to_string().len().max(5);
    let mut manifest = String::from("# path,label\n");
    for (k, (x, label)) in data.iter().enumerate() {
        let name = format!("{k:0width$}.csv");
        fs::write(dir.join(&name), encode_matrix_csv(x))?;
        manifest.push_str(&format!("{name},{label}\n"));
    }
    let path = dir.join("manifest.csv");
    fs::write(&path, manifest)?;
    Ok(path)
}

/// Seeded per-class split: `per_class_train` samples of each class go to
/// the training set, the rest to the test set. Both keep dataset order.
pub fn split(
    data: &LabeledMatrixDataset,
    per_class_train: usize,
    seed: u64,
) -> Result<(LabeledMatrixDataset, LabeledMatrixDataset)> {
    let mut train_mask = vec![false; data.len()];
    for class in 1..=data.classes() {
        let mut members: Vec<usize> = (0..data.len()).filter(|&k| data.labels()[k] == class).collect();
        if members.len() <= per_class_train {
            return Err(Error::InsufficientClassSize { class, size: members.len(), per_class_train });
        }
        let mut rng = stream_rng(seed, class as u64);
        members.shuffle(&mut rng);
        for &k in &members[..per_class_train] {
            train_mask[k] = true;
        }
    }
    let pick = |want: bool| {
        let (samples, labels): (Vec<Matrix>, Vec<usize>) = data
            .iter()
            .zip(&train_mask)
            .filter(|(_, &m)| m == want)
            .map(|((x, l), _)| (x.clone(), l))
            .unzip();
        LabeledMatrixDataset::with_classes(samples, labels, data.classes())
    };
    Ok((pick(true)?, pick(false)?))
}
