//! Dataset acquisition: a seeded synthetic Gaussian generator, an IDX reader
//! with subsampling for image/label pairs, and feature normalization.
//!
//! IDX layout: 4-byte big-endian magic (0x00000803 for images, 0x00000801 for
//! labels), big-endian 32-bit dimension sizes, then raw unsigned bytes.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{Matrix, Rng};
use crate::objectives::Dataset;

pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalize {
    None,
    /// Scale each feature row to unit Euclidean norm (zero rows stay zero).
    UnitRows,
    /// Divide all features by 255.
    Scale255,
}

#[derive(Clone, Debug)]
pub enum DataSource {
    Synthetic { n: usize, d: usize, classes: usize, seed: u64 },
    MnistIdx { images_path: PathBuf, labels_path: PathBuf, take_n: usize, take_d: usize },
}

#[derive(Clone, Debug)]
pub struct DataSpec {
    pub source: DataSource,
    pub normalize: Normalize,
}

impl DataSpec {
    pub fn load(&self) -> Result<Arc<Dataset>> {
        let ds = match &self.source {
            DataSource::Synthetic { n, d, classes, seed } => {
                generate_synthetic(*n, *d, *classes, *seed)?
            }
            DataSource::MnistIdx { images_path, labels_path, take_n, take_d } => {
                load_mnist_idx(images_path, labels_path, *take_n, *take_d)?
            }
        };
        Ok(Arc::new(apply_normalization(ds, self.normalize)?))
    }
}

/// Standard-normal features with labels drawn uniformly from [0, classes).
/// Features fill row-major, so the layout is reproducible from the seed.
pub fn generate_synthetic(n: usize, d: usize, classes: usize, seed: u64) -> Result<Dataset> {
    if n == 0 || d == 0 || classes == 0 {
        return Err(Error::InvalidParameter("n, d, classes must all be >= 1".into()));
    }
    let mut rng = Rng::new(seed);
    let mut feats = vec![0.0; n * d];
    rng.fill_normal(&mut feats);
    let labels: Vec<usize> = (0..n).map(|_| rng.below(classes)).collect();
    Dataset::new(
        Matrix::from_vec(feats, n, d)?,
        labels,
        classes,
        format!("randn-{n}-{d}"),
    )
}

/// Reads an IDX image/label pair, keeping the first `take_n` records and the
/// first `take_d` pixels of each flattened image. Pixels arrive as raw bytes
/// in [0, 255]; pair with `Normalize::Scale255` for unit-range features.
pub fn load_mnist_idx(
    images_path: &Path,
    labels_path: &Path,
    take_n: usize,
    take_d: usize,
) -> Result<Dataset> {
    let images = fs::read(images_path)?;
    let labels = fs::read(labels_path)?;

    let img = parse_idx_images(&images)?;
    let lab = parse_idx_labels(&labels)?;
    if img.count != lab.len() {
        return Err(Error::IdxFormat {
            offset: 4,
            message: format!("image count {} != label count {}", img.count, lab.len()),
        });
    }
    if take_n == 0 || take_n > img.count {
        return Err(Error::InvalidParameter(format!(
            "take_n = {take_n} outside [1, {}]",
            img.count
        )));
    }
    let pixels = img.rows * img.cols;
    if take_d == 0 || take_d > pixels {
        return Err(Error::InvalidParameter(format!(
            "take_d = {take_d} outside [1, {pixels}]"
        )));
    }

    let mut feats = vec![0.0; take_n * take_d];
    for i in 0..take_n {
        let start = img.payload_offset + i * pixels;
        for j in 0..take_d {
            feats[i * take_d + j] = images[start + j] as f64;
        }
    }
    let labels: Vec<usize> = lab.values[..take_n].iter().map(|&b| b as usize).collect();
    if let Some(pos) = labels.iter().position(|&l| l >= 10) {
        return Err(Error::IdxFormat {
            offset: (8 + pos) as u64,
            message: format!("label {} out of range [0, 10)", labels[pos]),
        });
    }
    Dataset::new(
        Matrix::from_vec(feats, take_n, take_d)?,
        labels,
        10,
        format!("mnist-{take_n}-{take_d}"),
    )
}

struct IdxImages {
    count: usize,
    rows: usize,
    cols: usize,
    payload_offset: usize,
}

fn read_u32_be(bytes: &[u8], offset: usize) -> Result<u32> {
    let end = offset + 4;
    if bytes.len() < end {
        return Err(Error::IdxFormat {
            offset: bytes.len() as u64,
            message: format!("truncated: need {end} bytes for header field at {offset}"),
        });
    }
    Ok(u32::from_be_bytes([bytes[offset], bytes[offset + 1], bytes[offset + 2], bytes[offset + 3]]))
}

fn parse_idx_images(bytes: &[u8]) -> Result<IdxImages> {
    let magic = read_u32_be(bytes, 0)?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(Error::IdxFormat {
            offset: 0,
            message: format!("bad image magic {magic:#010x}, want {IDX_IMAGES_MAGIC:#010x}"),
        });
    }
    let count = read_u32_be(bytes, 4)? as usize;
    let rows = read_u32_be(bytes, 8)? as usize;
    let cols = read_u32_be(bytes, 12)? as usize;
    let need = 16 + count * rows * cols;
    if bytes.len() < need {
        return Err(Error::IdxFormat {
            offset: bytes.len() as u64,
            message: format!("truncated image payload: have {} bytes, need {need}", bytes.len()),
        });
    }
    Ok(IdxImages { count, rows, cols, payload_offset: 16 })
}

struct IdxLabels {
    values: Vec<u8>,
}

impl IdxLabels {
    fn len(&self) -> usize {
        self.values.len()
    }
}

fn parse_idx_labels(bytes: &[u8]) -> Result<IdxLabels> {
    let magic = read_u32_be(bytes, 0)?;
    if magic != IDX_LABELS_MAGIC {
        return Err(Error::IdxFormat {
            offset: 0,
            message: format!("bad label magic {magic:#010x}, want {IDX_LABELS_MAGIC:#010x}"),
        });
    }
    let count = read_u32_be(bytes, 4)? as usize;
    let need = 8 + count;
    if bytes.len() < need {
        return Err(Error::IdxFormat {
            offset: bytes.len() as u64,
            message: format!("truncated label payload: have {} bytes, need {need}", bytes.len()),
        });
    }
    Ok(IdxLabels { values: bytes[8..8 + count].to_vec() })
}

/// Applies a normalization to the features; `UnitRows` is idempotent.
pub fn apply_normalization(ds: Dataset, mode: Normalize) -> Result<Dataset> {
    match mode {
        Normalize::None => Ok(ds),
        Normalize::Scale255 => {
            let (n, d) = (ds.num_samples(), ds.num_features());
            let feats: Vec<f64> = ds.features().as_slice().iter().map(|x| x / 255.0).collect();
            Dataset::new(
                Matrix::from_vec(feats, n, d)?,
                ds.labels().to_vec(),
                ds.classes(),
                ds.name().to_string(),
            )
        }
        Normalize::UnitRows => {
            let (n, d) = (ds.num_samples(), ds.num_features());
            let mut feats = ds.features().as_slice().to_vec();
            for i in 0..n {
                let row = &mut feats[i * d..(i + 1) * d];
                let norm = crate::numerics::dot(row, row).sqrt();
                if norm > 0.0 {
                    for x in row.iter_mut() {
                        *x /= norm;
                    }
                }
            }
            Dataset::new(
                Matrix::from_vec(feats, n, d)?,
                ds.labels().to_vec(),
                ds.classes(),
                ds.name().to_string(),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_idx_images(path: &Path, images: &[Vec<u8>], rows: usize, cols: usize) {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&IDX_IMAGES_MAGIC.to_be_bytes());
        bytes.extend_from_slice(&(images.len() as u32).to_be_bytes());
        bytes.extend_from_slice(&(rows as u32).to_be_bytes());
        bytes.extend_from_slice(&(cols as u32).to_be_bytes());
        for img in images {
            assert_eq!(img.len(), rows * cols);
            bytes.extend_from_slice(img);
        }
        fs::write(path, bytes).unwrap();
    }

    fn write_idx_labels(path: &Path, labels: &[u8]) {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&IDX_LABELS_MAGIC.to_be_bytes());
        bytes.extend_from_slice(&(labels.len() as u32).to_be_bytes());
        bytes.extend_from_slice(labels);
        fs::write(path, bytes).unwrap();
    }

    fn tmp_dir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("alfcg-idx-{tag}-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn synthetic_is_deterministic_per_seed() {
        let a = generate_synthetic(20, 5, 3, 99).unwrap();
        let b = generate_synthetic(20, 5, 3, 99).unwrap();
        assert_eq!(a.features().as_slice(), b.features().as_slice());
        assert_eq!(a.labels(), b.labels());
        assert_eq!(a.name(), "randn-20-5");
        let c = generate_synthetic(20, 5, 3, 100).unwrap();
        assert_ne!(a.features().as_slice(), c.features().as_slice());
    }

    #[test]
    fn synthetic_minimal_shape() {
        let ds = generate_synthetic(1, 1, 1, 0).unwrap();
        assert_eq!(ds.num_samples(), 1);
        assert_eq!(ds.labels(), &[0]);
    }

    #[test]
    fn synthetic_sample_mean_is_near_zero() {
        let n = 100_000;
        let d = 10;
        let ds = generate_synthetic(n, d, 2, 7).unwrap();
        let bound = 4.0 / (n as f64).sqrt();
        for j in 0..d {
            let mean: f64 =
                (0..n).map(|i| ds.features().get(i, j)).sum::<f64>() / n as f64;
            assert!(mean.abs() < bound, "coordinate {j} mean {mean} exceeds {bound}");
        }
    }

    #[test]
    fn idx_round_trip() {
        let dir = tmp_dir("roundtrip");
        let images = vec![
            vec![0u8, 10, 20, 30, 40, 50],
            vec![60, 70, 80, 90, 100, 110],
            vec![1, 2, 3, 4, 5, 6],
            vec![255, 0, 255, 0, 255, 0],
        ];
        let labels = vec![3u8, 1, 4, 9];
        let ip = dir.join("images.idx");
        let lp = dir.join("labels.idx");
        write_idx_images(&ip, &images, 2, 3);
        write_idx_labels(&lp, &labels);
        let ds = load_mnist_idx(&ip, &lp, 4, 6).unwrap();
        assert_eq!(ds.num_samples(), 4);
        assert_eq!(ds.labels(), &[3, 1, 4, 9]);
        for (i, img) in images.iter().enumerate() {
            for (j, &px) in img.iter().enumerate() {
                assert_eq!(ds.features().get(i, j), px as f64);
            }
        }
        // truncation keeps the prefix
        let ds2 = load_mnist_idx(&ip, &lp, 2, 4).unwrap();
        assert_eq!(ds2.num_samples(), 2);
        assert_eq!(ds2.num_features(), 4);
        assert_eq!(ds2.features().get(1, 3), 90.0);
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn idx_count_mismatch_is_error() {
        let dir = tmp_dir("mismatch");
        let ip = dir.join("images.idx");
        let lp = dir.join("labels.idx");
        write_idx_images(&ip, &[vec![0u8; 4], vec![1u8; 4]], 2, 2);
        write_idx_labels(&lp, &[1u8, 2, 3]);
        let err = load_mnist_idx(&ip, &lp, 2, 4).unwrap_err();
        assert!(matches!(err, Error::IdxFormat { .. }), "{err}");
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn idx_truncated_header_is_error() {
        let dir = tmp_dir("trunc");
        let ip = dir.join("images.idx");
        let lp = dir.join("labels.idx");
        // valid magic, then the header runs out at byte 10 of 16
        let mut bytes = IDX_IMAGES_MAGIC.to_be_bytes().to_vec();
        bytes.extend_from_slice(&[0u8; 6]);
        fs::write(&ip, bytes).unwrap();
        write_idx_labels(&lp, &[1u8]);
        let err = load_mnist_idx(&ip, &lp, 1, 1).unwrap_err();
        match err {
            Error::IdxFormat { offset, .. } => assert_eq!(offset, 10),
            other => panic!("unexpected error {other}"),
        }
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn idx_bad_magic_is_error() {
        let dir = tmp_dir("magic");
        let ip = dir.join("images.idx");
        let lp = dir.join("labels.idx");
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&0xdead_beefu32.to_be_bytes());
        bytes.extend_from_slice(&[0u8; 12]);
        fs::write(&ip, bytes).unwrap();
        write_idx_labels(&lp, &[0u8]);
        let err = load_mnist_idx(&ip, &lp, 1, 1).unwrap_err();
        match err {
            Error::IdxFormat { offset, .. } => assert_eq!(offset, 0),
            other => panic!("unexpected error {other}"),
        }
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn unit_rows_is_idempotent() {
        let ds = generate_synthetic(10, 6, 2, 5).unwrap();
        let once = apply_normalization(ds.clone(), Normalize::UnitRows).unwrap();
        let twice = apply_normalization(once.clone(), Normalize::UnitRows).unwrap();
        for (a, b) in once.features().as_slice().iter().zip(twice.features().as_slice()) {
            assert!((a - b).abs() <= 1e-14);
        }
    }

    #[test]
    fn scale_255_maps_to_unit_range() {
        let dir = tmp_dir("scale");
        let ip = dir.join("images.idx");
        let lp = dir.join("labels.idx");
        write_idx_images(&ip, &[vec![0u8, 255, 128, 64]], 2, 2);
        write_idx_labels(&lp, &[7u8]);
        let ds = load_mnist_idx(&ip, &lp, 1, 4).unwrap();
        let ds = apply_normalization(ds, Normalize::Scale255).unwrap();
        assert_eq!(ds.features().get(0, 0), 0.0);
        assert_eq!(ds.features().get(0, 1), 1.0);
        assert!(ds.features().as_slice().iter().all(|&x| (0.0..=1.0).contains(&x)));
        fs::remove_dir_all(dir).unwrap();
    }
}
