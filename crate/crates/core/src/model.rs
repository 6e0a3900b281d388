//! Interference-channel instances and random channel generation.

use nalgebra::{DMatrix, DMatrixView};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{complex_normal, rng_for};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Antenna and stream counts of a K-user interference channel.
///
/// User `k` is the pair (TX `k`, RX `k`); TX `k` sends `d[k]` streams to RX `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AntennaConfig {
    n_tx: Vec<usize>,
    n_rx: Vec<usize>,
    d: Vec<usize>,
}

impl AntennaConfig {
    pub fn new(n_tx: Vec<usize>, n_rx: Vec<usize>, d: Vec<usize>) -> Result<Self> {
        let k = n_tx.len();
        if k == 0 {
            return Err(Error::InvalidConfig("at least one user is required".into()));
        }
        if n_rx.len() != k || d.len() != k {
            return Err(Error::InvalidConfig(format!(
                "length mismatch: {} TX counts, {} RX counts, {} stream counts",
                k,
                n_rx.len(),
                d.len()
            )));
        }
        for u in 0..k {
            if n_tx[u] == 0 || n_rx[u] == 0 || d[u] == 0 {
                return Err(Error::InvalidConfig(format!("user {u} has a zero count")));
            }
            if d[u] > n_tx[u].min(n_rx[u]) {
                return Err(Error::InvalidConfig(format!(
                    "user {u}: {} streams exceed min({}, {}) antennas",
                    d[u], n_tx[u], n_rx[u]
                )));
            }
        }
        Ok(Self { n_tx, n_rx, d })
    }

    /// Every TX with `n_tx`, every RX with `n_rx` antennas, `d` streams each.
    pub fn symmetric(users: usize, n_tx: usize, n_rx: usize, d: usize) -> Result<Self> {
        Self::new(vec![n_tx; users], vec![n_rx; users], vec![d; users])
    }

    /// Single-antenna, single-stream network (the Wyner and network-MIMO setting).
    pub fn single_antenna(users: usize) -> Result<Self> {
        Self::symmetric(users, 1, 1, 1)
    }

    pub fn users(&self) -> usize {
        self.n_tx.len()
    }
    pub fn n_tx(&self, j: usize) -> usize {
        self.n_tx[j]
    }
    pub fn n_rx(&self, i: usize) -> usize {
        self.n_rx[i]
    }
    pub fn streams(&self, k: usize) -> usize {
        self.d[k]
    }
    pub fn tx_antennas(&self) -> &[usize] {
        &self.n_tx
    }
    pub fn rx_antennas(&self) -> &[usize] {
        &self.n_rx
    }
    pub fn stream_counts(&self) -> &[usize] {
        &self.d
    }
    pub fn total_tx(&self) -> usize {
        self.n_tx.iter().sum()
    }
    pub fn total_rx(&self) -> usize {
        self.n_rx.iter().sum()
    }
    pub fn tx_offset(&self, j: usize) -> usize {
        self.n_tx[..j].iter().sum()
    }
    pub fn rx_offset(&self, i: usize) -> usize {
        self.n_rx[..i].iter().sum()
    }
    pub fn is_single_antenna(&self) -> bool {
        self.n_tx.iter().chain(&self.n_rx).all(|&n| n == 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Topology {
    IidRayleigh,
    /// 1-D Wyner model; `gamma` is the interference level log(INR)/log(SNR).
    Wyner1d { gamma: f64 },
}

impl Topology {
    pub fn wyner(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::Domain(format!("interference level {gamma} outside [0, 1]")));
        }
        Ok(Topology::Wyner1d { gamma })
    }
}

/// One draw of the full network channel, stored densely. Block `(i, j)` holds
/// the `n_rx[i] × n_tx[j]` channel from TX `j` to RX `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    config: AntennaConfig,
    matrix: CMatrix,
    snr: f64,
    topology: Topology,
}

impl ChannelRealization {
    /// Wraps an explicit channel matrix; used for hand-built test channels.
    pub fn from_matrix(
        config: AntennaConfig,
        matrix: CMatrix,
        snr: f64,
        topology: Topology,
    ) -> Result<Self> {
        if matrix.shape() != (config.total_rx(), config.total_tx()) {
            return Err(Error::DimensionMismatch(format!(
                "channel is {:?}, configuration needs {}x{}",
                matrix.shape(),
                config.total_rx(),
                config.total_tx()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("channel has non-finite entries".into()));
        }
        Ok(Self { config, matrix, snr, topology })
    }

    pub fn config(&self) -> &AntennaConfig {
        &self.config
    }
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
    pub fn snr(&self) -> f64 {
        self.snr
    }
    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn block(&self, i: usize, j: usize) -> DMatrixView<'_, C64> {
        let c = &self.config;
        self.matrix
            .view((c.rx_offset(i), c.tx_offset(j)), (c.n_rx(i), c.n_tx(j)))
    }
}

/// Power attenuation `P^(gamma - 1)` of the Wyner cross links.
pub fn interference_scale(p: f64, gamma: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::Domain(format!("transmit power {p} must exceed 1")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Domain(format!("interference level {gamma} outside [0, 1]")));
    }
    Ok(p.powf(gamma - 1.0))
}

/// Draws a channel realization. Entries are unit-variance circularly-symmetric
/// complex normal; in the Wyner model the first off-diagonals have variance
/// `interference_scale(p, gamma)` and everything further is exactly zero.
///
/// The underlying normal variates depend only on `seed`, so the same seed at
/// different `p` gives the same channel up to the cross-link scaling.
pub fn gen_channel(
    config: &AntennaConfig,
    topology: Topology,
    p: f64,
    seed: u64,
) -> Result<ChannelRealization> {
    let mut rng = rng_for(seed, &[0x4348]);
    let matrix = match topology {
        Topology::IidRayleigh => {
            let (r, c) = (config.total_rx(), config.total_tx());
            let mut m = CMatrix::zeros(r, c);
            for a in 0..r {
                for b in 0..c {
                    m[(a, b)] = complex_normal(&mut rng, 1.0);
                }
            }
            m
        }
        Topology::Wyner1d { gamma } => {
            if !config.is_single_antenna() {
                return Err(Error::TopologyMismatch(
                    "the Wyner model is defined for single-antenna nodes only".into(),
                ));
            }
            let amp = interference_scale(p, gamma)?.sqrt();
            let k = config.users();
            let mut m = CMatrix::zeros(k, k);
            for i in 0..k {
                for j in i.saturating_sub(1)..(i + 2).min(k) {
                    let z = complex_normal(&mut rng, 1.0);
                    m[(i, j)] = if i == j { z } else { z * amp };
                }
            }
            m
        }
    };
    ChannelRealization::from_matrix(config.clone(), matrix, p, topology)
}

/// Median over `draws` Wyner realizations of `|(H^-1)[i][i+k]|` for every
/// offset `k` in `0..=max_offset` (pooled over all valid `i`). Draws with an
/// ill-conditioned channel are skipped.
pub fn inverse_decay_profile(
    users: usize,
    gamma: f64,
    p: f64,
    draws: usize,
    max_offset: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if max_offset >= users {
        return Err(Error::InvalidConfig(format!("offset {max_offset} needs more than {users} users")));
    }
    let config = AntennaConfig::single_antenna(users)?;
    let topology = Topology::wyner(gamma)?;
    let mut pooled = vec![Vec::new(); max_offset + 1];
    for draw in 0..draws {
        let h = gen_channel(&config, topology, p, crate::rng::derive_seed(seed, &[draw as u64]))?;
        let Ok(inv) = crate::linalg::guarded_inverse(h.matrix()) else { continue };
        for (k, bucket) in pooled.iter_mut().enumerate() {
            bucket.extend((0..users - k).map(|i| inv[(i, i + k)].norm()));
        }
    }
    pooled
        .into_iter()
        .map(|mut v| {
            if v.is_empty() {
                return Err(Error::IllConditioned(f64::INFINITY));
            }
            v.sort_by(f64::total_cmp);
            let n = v.len();
            Ok(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
        })
        .collect()
}
