//! Dataset container, synthetic blob generation, and the homogeneous /
//! location-heterogeneous label partitions.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{standard_normal, LearningError};
use crate::rng::{Purpose, SeedTree};
use crate::topology::Deployment;

/// Labeled feature vectors. Features are kept in `[0, 1]` (image bytes are
/// scaled, synthetic blobs are min-max normalized per dimension).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub num_classes: usize,
}

impl Dataset {
    pub fn new(
        samples: Vec<Vec<f64>>,
        labels: Vec<usize>,
        num_classes: usize,
    ) -> Result<Self, LearningError> {
        if samples.len() != labels.len() {
            return Err(LearningError::InvalidDataset("sample/label count mismatch"));
        }
        if labels.iter().any(|&y| y >= num_classes) {
            return Err(LearningError::InvalidDataset("label out of class range"));
        }
        let dim = samples.first().map_or(0, Vec::len);
        if samples.iter().any(|x| x.len() != dim) {
            return Err(LearningError::InvalidDataset("ragged feature vectors"));
        }
        Ok(Self { samples, labels, num_classes })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    /// Distinct labels actually present.
    pub fn label_set(&self) -> BTreeSet<usize> {
        self.labels.iter().copied().collect()
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            num_classes: self.num_classes,
        }
    }
}

/// Gaussian blobs with unit within-class variance and class means placed on
/// a scaled simplex (`separation * e_c`), then min-max normalized into
/// `[0, 1]` per dimension. Samples are emitted class by class.
pub fn make_synthetic(
    classes: usize,
    dims: usize,
    per_class: usize,
    separation: f64,
    seed: u64,
) -> Result<Dataset, LearningError> {
    if classes < 1 || dims < classes || per_class < 1 {
        return Err(LearningError::BadSyntheticParams);
    }
    let mut rng = SeedTree::new(seed).stream(Purpose::DatasetSynthesis, &[]);
    let mut samples = Vec::with_capacity(classes * per_class);
    let mut labels = Vec::with_capacity(classes * per_class);
    for class in 0..classes {
        for _ in 0..per_class {
            let mut x: Vec<f64> = (0..dims).map(|_| standard_normal(&mut rng)).collect();
            x[class] += separation;
            samples.push(x);
            labels.push(class);
        }
    }
    // Min-max per dimension; an affine map, so separability is preserved.
    for d in 0..dims {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for x in &samples {
            lo = lo.min(x[d]);
            hi = hi.max(x[d]);
        }
        let range = hi - lo;
        for x in &mut samples {
            x[d] = if range > 0.0 { (x[d] - lo) / range } else { 0.5 };
        }
    }
    Dataset::new(samples, labels, classes)
}

/// Splits off a stratified test set: per label, a seeded shuffle and then
/// `round(test_fraction * count)` samples go to the test side.
pub fn stratified_split(
    ds: &Dataset,
    test_fraction: f64,
    seed: u64,
) -> Result<(Dataset, Dataset), LearningError> {
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(LearningError::InvalidDataset("test_fraction outside [0, 1)"));
    }
    let mut rng = SeedTree::new(seed).stream(Purpose::DatasetSplit, &[]);
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for label in 0..ds.num_classes {
        let mut members: Vec<usize> = (0..ds.len()).filter(|&i| ds.labels[i] == label).collect();
        members.shuffle(&mut rng);
        let n_test = (test_fraction * members.len() as f64).round() as usize;
        test_idx.extend_from_slice(&members[..n_test]);
        train_idx.extend_from_slice(&members[n_test..]);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok((ds.subset(&train_idx), ds.subset(&test_idx)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionMode {
    /// Stratified equal split over all devices.
    Homogeneous,
    /// Devices are binned into vertical bands by x-coordinate; the band
    /// decides which labels a device may hold.
    LocationHeterogeneous,
}

/// Band structure of the heterogeneous partition. Band `a` (1-based) holds
/// the label window `{a-1, ..., a-1+W-1}` with `W = classes - band_count + 1`,
/// so consecutive bands overlap and label availability shifts gradually
/// across the deployment (10 classes over 5 bands give the windows
/// `{a-1, ..., a+4}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionSpec {
    pub mode: PartitionMode,
    pub band_count: usize,
}

impl PartitionSpec {
    pub fn homogeneous() -> Self {
        Self { mode: PartitionMode::Homogeneous, band_count: 1 }
    }

    pub fn heterogeneous(band_count: usize) -> Self {
        Self { mode: PartitionMode::LocationHeterogeneous, band_count }
    }

    /// Labels band `band_idx` (0-based) may hold.
    pub fn band_labels(&self, band_idx: usize, num_classes: usize) -> core::ops::Range<usize> {
        let window = num_classes - self.band_count + 1;
        band_idx..band_idx + window
    }
}

fn band_of_device(dep: &Deployment, band_count: usize, device: usize) -> usize {
    let xs: Vec<f64> = dep.ed_positions.iter().map(|p| p[0]).collect();
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return 0;
    }
    let t = (xs[device] - lo) / (hi - lo);
    ((t * band_count as f64) as usize).min(band_count - 1)
}

/// Distributes the global dataset over the deployment's devices. Every
/// sample lands on exactly one device (the per-device multiset union equals
/// the input). In heterogeneous mode a label's samples are dealt round-robin
/// over the devices whose band window contains it.
pub fn partition(
    global: &Dataset,
    dep: &Deployment,
    spec: &PartitionSpec,
    seed: u64,
) -> Result<Vec<Dataset>, LearningError> {
    let device_count = dep.ed_positions.len();
    if device_count == 0 {
        return Err(LearningError::ShapeMismatch("deployment has no devices"));
    }
    if spec.band_count < 1 || spec.band_count > global.num_classes {
        return Err(LearningError::BadPartitionSpec);
    }
    let bands: Vec<usize> = (0..device_count)
        .map(|k| band_of_device(dep, spec.band_count, k))
        .collect();
    let mut per_device_indices: Vec<Vec<usize>> = vec![Vec::new(); device_count];
    let tree = SeedTree::new(seed);
    for label in 0..global.num_classes {
        let eligible: Vec<usize> = match spec.mode {
            PartitionMode::Homogeneous => (0..device_count).collect(),
            PartitionMode::LocationHeterogeneous => (0..device_count)
                .filter(|&k| spec.band_labels(bands[k], global.num_classes).contains(&label))
                .collect(),
        };
        let mut members: Vec<usize> =
            (0..global.len()).filter(|&i| global.labels[i] == label).collect();
        if members.is_empty() {
            continue;
        }
        if eligible.is_empty() {
            return Err(LearningError::UnplacedLabel { label });
        }
        let mut rng = tree.stream(Purpose::Partition, &[label as u64]);
        members.shuffle(&mut rng);
        for (slot, sample) in members.into_iter().enumerate() {
            per_device_indices[eligible[slot % eligible.len()]].push(sample);
        }
    }
    Ok(per_device_indices
        .into_iter()
        .map(|mut idx| {
            idx.sort_unstable();
            global.subset(&idx)
        })
        .collect())
}

/// Draws a batch of `batch_size` distinct indices (the whole dataset if it
/// is smaller).
pub fn sample_batch<R: Rng>(len: usize, batch_size: usize, rng: &mut R) -> Vec<usize> {
    let mut indices: Vec<usize> = (0..len).collect();
    let amount = batch_size.min(len);
    let (chosen, _) = indices.partial_shuffle(rng, amount);
    chosen.to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{build_hex_grid, place_cell_edge_eds, PlacementMode};

    #[test]
    fn synthetic_counts_and_determinism() {
        let a = make_synthetic(2, 2, 50, 6.0, 7).unwrap();
        let b = make_synthetic(2, 2, 50, 6.0, 7).unwrap();
        assert_eq!(a.len(), 100);
        assert_eq!(a.labels.iter().filter(|&&y| y == 0).count(), 50);
        assert_eq!(a, b);
        assert_ne!(a, make_synthetic(2, 2, 50, 6.0, 8).unwrap());
    }

    #[test]
    fn synthetic_features_live_in_unit_interval() {
        let ds = make_synthetic(3, 5, 40, 4.0, 3).unwrap();
        for x in &ds.samples {
            assert!(x.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn synthetic_rejects_fewer_dims_than_classes() {
        assert_eq!(
            make_synthetic(4, 2, 10, 6.0, 0),
            Err(LearningError::BadSyntheticParams)
        );
    }

    #[test]
    fn split_is_stratified() {
        let ds = make_synthetic(4, 4, 100, 6.0, 9).unwrap();
        let (train, test) = stratified_split(&ds, 0.25, 11).unwrap();
        assert_eq!(test.len(), 100);
        assert_eq!(train.len(), 300);
        for label in 0..4 {
            assert_eq!(test.labels.iter().filter(|&&y| y == label).count(), 25);
        }
    }

    #[test]
    fn paper_band_windows_for_ten_classes_five_bands() {
        let spec = PartitionSpec::heterogeneous(5);
        assert_eq!(spec.band_labels(0, 10), 0..6);
        assert_eq!(spec.band_labels(4, 10), 4..10);
    }

    fn spread_deployment(device_count: usize) -> Deployment {
        let dep = build_hex_grid(7, 50.0).unwrap();
        place_cell_edge_eds(&dep, device_count, PlacementMode::UniformEdge, 31).unwrap()
    }

    #[test]
    fn homogeneous_partition_is_even() {
        let ds = make_synthetic(4, 4, 250, 6.0, 13).unwrap(); // 1000 samples
        let dep = spread_deployment(10);
        let parts = partition(&ds, &dep, &PartitionSpec::homogeneous(), 17).unwrap();
        assert_eq!(parts.len(), 10);
        for part in &parts {
            assert!(part.len() == 100, "got {}", part.len());
        }
    }

    #[test]
    fn heterogeneous_devices_hold_only_their_band_window() {
        let ds = make_synthetic(4, 4, 100, 6.0, 13).unwrap();
        let dep = spread_deployment(12);
        let spec = PartitionSpec::heterogeneous(3); // windows of width 2
        let parts = partition(&ds, &dep, &spec, 19).unwrap();
        for (k, part) in parts.iter().enumerate() {
            let band = band_of_device(&dep, 3, k);
            let window = spec.band_labels(band, 4);
            for &y in &part.labels {
                assert!(window.contains(&y), "device {k} in band {band} holds label {y}");
            }
        }
    }

    #[test]
    fn partition_union_equals_global_multiset() {
        let ds = make_synthetic(4, 4, 103, 6.0, 13).unwrap();
        let dep = spread_deployment(12);
        for spec in [PartitionSpec::homogeneous(), PartitionSpec::heterogeneous(3)] {
            let parts = partition(&ds, &dep, &spec, 23).unwrap();
            let mut collected: Vec<(Vec<u64>, usize)> = parts
                .iter()
                .flat_map(|p| {
                    p.samples
                        .iter()
                        .zip(&p.labels)
                        .map(|(x, &y)| (x.iter().map(|v| v.to_bits()).collect(), y))
                })
                .collect();
            let mut expected: Vec<(Vec<u64>, usize)> = ds
                .samples
                .iter()
                .zip(&ds.labels)
                .map(|(x, &y)| (x.iter().map(|v| v.to_bits()).collect(), y))
                .collect();
            collected.sort();
            expected.sort();
            assert_eq!(collected, expected);
        }
    }

    #[test]
    fn batch_sampling_is_without_replacement() {
        let mut rng = SeedTree::new(5).stream(Purpose::BatchSelection, &[0, 0]);
        let batch = sample_batch(100, 16, &mut rng);
        assert_eq!(batch.len(), 16);
        let mut unique = batch.clone();
        unique.sort_unstable();
        unique.dedup();
        assert_eq!(unique.len(), 16);
        let full = sample_batch(10, 16, &mut rng);
        assert_eq!(full.len(), 10);
    }
}
