//! Multi-cell geometry: hexagonal server lattices, cell-edge device
//! placement, distance-based link gains, and connectivity sets.
//!
//! Servers sit on an axial hexagonal lattice filled ring by ring from the
//! center (spiral order), so adjacent sites are exactly one inter-site
//! distance apart. Devices are placed on the Voronoi boundaries between
//! adjacent cells — the "cell edge" — either uniformly along the shared
//! edges or pinned to the hexagon corners. Link gains follow the
//! `(d / r_ref)^-alpha` path-loss law, normalized so a device at the
//! reference distance has unit gain.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::Rng;

use crate::rng::{Purpose, SeedTree};

/// Positions of every edge server and edge device, in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub es_positions: Vec<[f64; 2]>,
    pub ed_positions: Vec<[f64; 2]>,
    pub inter_site_distance: f64,
}

impl Deployment {
    pub fn server_count(&self) -> usize {
        self.es_positions.len()
    }

    pub fn device_count(&self) -> usize {
        self.ed_positions.len()
    }
}

/// Path-loss law parameters: exponent plus the uplink/downlink reference
/// distances at which the received gain is 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossParams {
    pub alpha: f64,
    pub r_ul: f64,
    pub r_dl: f64,
}

impl PathLossParams {
    pub fn validate(&self) -> Result<(), TopologyError> {
        if !(self.alpha > 0.0) || !(self.r_ul > 0.0) || !(self.r_dl > 0.0) {
            return Err(TopologyError::InvalidPathLoss);
        }
        Ok(())
    }
}

/// Large-scale power gains per direction, indexed `[server][device]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkGains {
    pub ul: Vec<Vec<f64>>,
    pub dl: Vec<Vec<f64>>,
}

impl LinkGains {
    pub fn server_count(&self) -> usize {
        self.ul.len()
    }

    pub fn device_count(&self) -> usize {
        self.ul.first().map_or(0, Vec::len)
    }
}

/// Gain-threshold connectivity: which devices a server hears and which
/// servers a device hears, plus the modal cardinalities of those sets.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivitySets {
    /// Device indices heard by each server (uplink gain >= threshold).
    pub devices_per_server: Vec<Vec<usize>>,
    /// Server indices heard by each device (downlink gain >= threshold).
    pub servers_per_device: Vec<Vec<usize>>,
    pub threshold: f64,
    /// Modal `|devices_per_server|` (ties resolved toward the smaller value).
    pub typical_devices_per_server: usize,
    /// Modal `|servers_per_device|` (ties resolved toward the smaller value).
    pub typical_servers_per_device: usize,
}

impl ConnectivitySets {
    /// Servers that hear no device at all; a deployment smell, not an error.
    pub fn isolated_servers(&self) -> Vec<usize> {
        self.devices_per_server
            .iter()
            .enumerate()
            .filter(|(_, set)| set.is_empty())
            .map(|(s, _)| s)
            .collect()
    }

    /// Devices that hear no server at all.
    pub fn isolated_devices(&self) -> Vec<usize> {
        self.servers_per_device
            .iter()
            .enumerate()
            .filter(|(_, set)| set.is_empty())
            .map(|(k, _)| k)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TopologyError {
    #[error("cell_count must be >= 1 and isd must be > 0")]
    InvalidGrid,
    #[error("path-loss parameters must be positive")]
    InvalidPathLoss,
    #[error("device {device} coincides with server {server}; link distance is zero")]
    CoincidentNodes { server: usize, device: usize },
    #[error("deployment has no devices or no servers")]
    EmptyDeployment,
}

/// How cell-edge devices are drawn on the Voronoi boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlacementMode {
    /// Uniform over the shared hexagon edges between adjacent cells.
    UniformEdge,
    /// Uniform over the hexagon corners (distance to the nearest server is
    /// exactly `isd / sqrt(3)`).
    VerticesOnly,
}

// Axial neighbor directions, in spiral-walk order.
const HEX_DIRS: [(i64, i64); 6] = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)];

fn axial_to_cartesian(q: i64, r: i64, isd: f64) -> [f64; 2] {
    [
        isd * (q as f64 + r as f64 / 2.0),
        isd * (3.0f64.sqrt() / 2.0) * r as f64,
    ]
}

/// Builds `cell_count` server sites on a hexagonal lattice with spacing
/// `isd`, filled ring by ring from the center in a fixed spiral order.
pub fn build_hex_grid(cell_count: usize, isd: f64) -> Result<Deployment, TopologyError> {
    if cell_count < 1 || !(isd > 0.0) {
        return Err(TopologyError::InvalidGrid);
    }
    let mut sites = vec![(0i64, 0i64)];
    let mut ring = 1i64;
    while sites.len() < cell_count {
        // Ring walk: start one step in direction 4 per ring radius, then
        // sweep the six directions `ring` steps each.
        let (mut q, mut r) = (HEX_DIRS[4].0 * ring, HEX_DIRS[4].1 * ring);
        for dir in HEX_DIRS {
            for _ in 0..ring {
                sites.push((q, r));
                q += dir.0;
                r += dir.1;
            }
        }
        ring += 1;
    }
    sites.truncate(cell_count);
    Ok(Deployment {
        es_positions: sites
            .into_iter()
            .map(|(q, r)| axial_to_cartesian(q, r, isd))
            .collect(),
        ed_positions: Vec::new(),
        inter_site_distance: isd,
    })
}

pub fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

/// The cell-boundary segments devices may occupy. With two or more adjacent
/// servers these are the shared Voronoi edges (every point is equidistant
/// from the two servers that share it); an isolated lattice degenerates to
/// the nominal hexagon sides of each cell. All segments have length
/// `isd / sqrt(3)`.
fn boundary_segments(dep: &Deployment) -> Vec<([f64; 2], [f64; 2])> {
    let isd = dep.inter_site_distance;
    let mut segments = Vec::new();
    for i in 0..dep.es_positions.len() {
        for j in (i + 1)..dep.es_positions.len() {
            let a = dep.es_positions[i];
            let b = dep.es_positions[j];
            if distance(a, b) <= isd * (1.0 + 1e-9) {
                let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
                let len = distance(a, b);
                let perp = [-(b[1] - a[1]) / len, (b[0] - a[0]) / len];
                let half = isd / (2.0 * 3.0f64.sqrt());
                segments.push((
                    [mid[0] - perp[0] * half, mid[1] - perp[1] * half],
                    [mid[0] + perp[0] * half, mid[1] + perp[1] * half],
                ));
            }
        }
    }
    if segments.is_empty() {
        // No adjacency: fall back to each cell's own hexagon sides.
        let radius = isd / 3.0f64.sqrt();
        for center in &dep.es_positions {
            let corner = |j: i64| -> [f64; 2] {
                let angle = core::f64::consts::FRAC_PI_6 * (1 + 2 * j) as f64;
                [
                    center[0] + radius * angle.cos(),
                    center[1] + radius * angle.sin(),
                ]
            };
            for j in 0..6 {
                segments.push((corner(j), corner((j + 1) % 6)));
            }
        }
    }
    segments
}

/// Places `ed_count` devices on the cell edge, deterministically for a given
/// seed. Returns a new deployment with `ed_positions` filled.
pub fn place_cell_edge_eds(
    dep: &Deployment,
    ed_count: usize,
    mode: PlacementMode,
    seed: u64,
) -> Result<Deployment, TopologyError> {
    if ed_count < 1 || dep.es_positions.is_empty() {
        return Err(TopologyError::EmptyDeployment);
    }
    let segments = boundary_segments(dep);
    let mut rng = SeedTree::new(seed).stream(Purpose::EdPlacement, &[]);
    let mut placed = dep.clone();
    placed.ed_positions.clear();
    match mode {
        PlacementMode::UniformEdge => {
            // Segments share one length, so a uniform segment index followed
            // by a uniform offset is uniform over the whole boundary.
            for _ in 0..ed_count {
                let (a, b) = segments[rng.random_range(0..segments.len())];
                let t: f64 = rng.random();
                placed
                    .ed_positions
                    .push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
            }
        }
        PlacementMode::VerticesOnly => {
            let tol = dep.inter_site_distance * 1e-9;
            let mut keys: Vec<(i64, i64)> = segments
                .iter()
                .flat_map(|&(a, b)| [a, b])
                .map(|p| ((p[0] / tol).round() as i64, (p[1] / tol).round() as i64))
                .collect();
            keys.sort_unstable();
            keys.dedup();
            for _ in 0..ed_count {
                let (kx, ky) = keys[rng.random_range(0..keys.len())];
                placed
                    .ed_positions
                    .push([kx as f64 * tol, ky as f64 * tol]);
            }
        }
    }
    Ok(placed)
}

/// Computes both gain matrices from the stored geometry:
/// `ul[s][k] = (d_sk / r_ul)^-alpha`, `dl[s][k] = (d_sk / r_dl)^-alpha`.
pub fn compute_link_gains(
    dep: &Deployment,
    plp: &PathLossParams,
) -> Result<LinkGains, TopologyError> {
    plp.validate()?;
    if dep.es_positions.is_empty() || dep.ed_positions.is_empty() {
        return Err(TopologyError::EmptyDeployment);
    }
    let mut ul = vec![vec![0.0; dep.ed_positions.len()]; dep.es_positions.len()];
    let mut dl = ul.clone();
    for (s, es) in dep.es_positions.iter().enumerate() {
        for (k, ed) in dep.ed_positions.iter().enumerate() {
            let d = distance(*es, *ed);
            if d <= 0.0 {
                return Err(TopologyError::CoincidentNodes { server: s, device: k });
            }
            ul[s][k] = (d / plp.r_ul).powf(-plp.alpha);
            dl[s][k] = (d / plp.r_dl).powf(-plp.alpha);
        }
    }
    Ok(LinkGains { ul, dl })
}

/// Default connectivity cutoff: the gain at 1.5x the median nearest-server
/// distance of the placed devices. On the reference geometry (devices at
/// cell corners, `r = isd/sqrt(3)`) this lands between the first and second
/// neighbor ring and yields roughly 6 devices per server and 3 servers per
/// device.
pub fn default_connectivity_threshold(dep: &Deployment, plp: &PathLossParams) -> f64 {
    let mut nearest: Vec<f64> = dep
        .ed_positions
        .iter()
        .map(|ed| {
            dep.es_positions
                .iter()
                .map(|es| distance(*es, *ed))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    nearest.sort_by(|a, b| a.partial_cmp(b).expect("non-finite distance"));
    let median = nearest[nearest.len() / 2];
    (1.5 * median / plp.r_ul).powf(-plp.alpha)
}

fn modal_cardinality(sets: &[Vec<usize>]) -> usize {
    let mut counts: Vec<(usize, usize)> = Vec::new(); // (cardinality, frequency)
    for set in sets {
        match counts.iter_mut().find(|(c, _)| *c == set.len()) {
            Some((_, f)) => *f += 1,
            None => counts.push((set.len(), 1)),
        }
    }
    counts.sort_unstable();
    counts
        .iter()
        .copied()
        .max_by_key(|&(c, f)| (f, usize::MAX - c))
        .map_or(0, |(c, _)| c)
}

/// Thresholds the gain matrices into connectivity sets. Membership is
/// `gain >= threshold` in the matching direction.
pub fn connectivity_sets(gains: &LinkGains, threshold: f64) -> ConnectivitySets {
    assert!(threshold > 0.0, "threshold must be positive");
    let devices_per_server: Vec<Vec<usize>> = gains
        .ul
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, &g)| g >= threshold)
                .map(|(k, _)| k)
                .collect()
        })
        .collect();
    let device_count = gains.device_count();
    let servers_per_device: Vec<Vec<usize>> = (0..device_count)
        .map(|k| {
            gains
                .dl
                .iter()
                .enumerate()
                .filter(|(_, row)| row[k] >= threshold)
                .map(|(s, _)| s)
                .collect()
        })
        .collect();
    ConnectivitySets {
        typical_devices_per_server: modal_cardinality(&devices_per_server),
        typical_servers_per_device: modal_cardinality(&servers_per_device),
        devices_per_server,
        servers_per_device,
        threshold,
    }
}
