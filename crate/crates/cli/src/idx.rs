//! IDX dataset files (the MNIST container format): big-endian headers with
//! magic 0x00000803 for u8 image tensors and 0x00000801 for u8 label
//! vectors. Pixel bytes are scaled to `[0, 1]`.

use std::fs;
use std::path::Path;

use aircomp_core::learning::Dataset;

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

#[derive(Debug, thiserror::Error)]
pub enum IdxError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: magic number 0x{got:08x}, expected 0x{expected:08x}")]
    BadMagic { path: String, expected: u32, got: u32 },
    #[error("{path}: truncated payload, expected {expected} bytes but found {actual}")]
    Truncated { path: String, expected: usize, actual: usize },
    #[error("image count {images} does not match label count {labels}")]
    CountMismatch { images: usize, labels: usize },
    #[error("{path}: header is shorter than its dimension list")]
    ShortHeader { path: String },
}

struct Reader<'a> {
    path: &'a str,
    bytes: Vec<u8>,
    offset: usize,
}

impl<'a> Reader<'a> {
    fn open(path: &'a str) -> Result<Self, IdxError> {
        let bytes = fs::read(Path::new(path)).map_err(|source| IdxError::Io {
            path: path.to_string(),
            source,
        })?;
        Ok(Self { path, bytes, offset: 0 })
    }

    fn read_u32(&mut self) -> Result<u32, IdxError> {
        let end = self.offset + 4;
        if end > self.bytes.len() {
            return Err(IdxError::ShortHeader { path: self.path.to_string() });
        }
        let word = u32::from_be_bytes(self.bytes[self.offset..end].try_into().unwrap());
        self.offset = end;
        Ok(word)
    }

    fn payload(&self, expected: usize) -> Result<&[u8], IdxError> {
        let actual = self.bytes.len() - self.offset;
        if actual != expected {
            return Err(IdxError::Truncated {
                path: self.path.to_string(),
                expected,
                actual,
            });
        }
        Ok(&self.bytes[self.offset..])
    }
}

/// Loads an images/labels file pair into a dataset. The class count is the
/// largest label plus one.
pub fn load_idx(images_path: &str, labels_path: &str) -> Result<Dataset, IdxError> {
    let mut images = Reader::open(images_path)?;
    let magic = images.read_u32()?;
    if magic != IMAGES_MAGIC {
        return Err(IdxError::BadMagic {
            path: images_path.to_string(),
            expected: IMAGES_MAGIC,
            got: magic,
        });
    }
    let count = images.read_u32()? as usize;
    let rows = images.read_u32()? as usize;
    let cols = images.read_u32()? as usize;
    let pixels = images.payload(count * rows * cols)?;

    let mut labels = Reader::open(labels_path)?;
    let magic = labels.read_u32()?;
    if magic != LABELS_MAGIC {
        return Err(IdxError::BadMagic {
            path: labels_path.to_string(),
            expected: LABELS_MAGIC,
            got: magic,
        });
    }
    let label_count = labels.read_u32()? as usize;
    let label_bytes = labels.payload(label_count)?;
    if count != label_count {
        return Err(IdxError::CountMismatch { images: count, labels: label_count });
    }

    let dim = rows * cols;
    let samples: Vec<Vec<f64>> = (0..count)
        .map(|i| pixels[i * dim..(i + 1) * dim].iter().map(|&b| b as f64 / 255.0).collect())
        .collect();
    let labels: Vec<usize> = label_bytes.iter().map(|&b| b as usize).collect();
    let num_classes = labels.iter().copied().max().unwrap_or(0) + 1;
    Ok(Dataset::new(samples, labels, num_classes).expect("constructed consistently"))
}

/// Serializes a dataset back into an IDX byte pair; used by tests and
/// fixture generation. Features are quantized to bytes.
pub fn to_idx_bytes(ds: &Dataset, rows: usize, cols: usize) -> (Vec<u8>, Vec<u8>) {
    assert_eq!(rows * cols, ds.dim());
    let mut images = Vec::new();
    images.extend_from_slice(&IMAGES_MAGIC.to_be_bytes());
    images.extend_from_slice(&(ds.len() as u32).to_be_bytes());
    images.extend_from_slice(&(rows as u32).to_be_bytes());
    images.extend_from_slice(&(cols as u32).to_be_bytes());
    for sample in &ds.samples {
        images.extend(sample.iter().map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8));
    }
    let mut labels = Vec::new();
    labels.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    labels.extend_from_slice(&(ds.len() as u32).to_be_bytes());
    labels.extend(ds.labels.iter().map(|&y| y as u8));
    (images, labels)
}
