//! Properness counting over interference-constraint subsets.

use crate::error::{Error, Result};
use crate::model::AntennaConfig;

/// Largest constraint count for which properness is checked exhaustively.
pub const MAX_CONSTRAINTS: usize = 20;

/// Sub-interference-channel: a subset of TXs and a subset of RXs (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubIc {
    tx_set: Vec<usize>,
    rx_set: Vec<usize>,
}

impl SubIc {
    pub fn new(mut tx_set: Vec<usize>, mut rx_set: Vec<usize>, users: usize) -> Result<Self> {
        tx_set.sort_unstable();
        tx_set.dedup();
        rx_set.sort_unstable();
        rx_set.dedup();
        if tx_set.is_empty() || rx_set.is_empty() {
            return Err(Error::InvalidConfig("sub-IC with an empty TX or RX set".into()));
        }
        if tx_set.iter().chain(&rx_set).any(|&u| u >= users) {
            return Err(Error::InvalidConfig(format!("sub-IC index outside 0..{users}")));
        }
        Ok(Self { tx_set, rx_set })
    }

    pub fn full(users: usize) -> Self {
        Self { tx_set: (0..users).collect(), rx_set: (0..users).collect() }
    }

    pub fn tx_set(&self) -> &[usize] {
        &self.tx_set
    }

    pub fn rx_set(&self) -> &[usize] {
        &self.rx_set
    }

    pub fn has_tx(&self, k: usize) -> bool {
        self.tx_set.binary_search(&k).is_ok()
    }

    pub fn has_rx(&self, i: usize) -> bool {
        self.rx_set.binary_search(&i).is_ok()
    }

    /// `self ⊆ other` on both index sets.
    pub fn is_within(&self, other: &SubIc) -> bool {
        self.tx_set.iter().all(|&k| other.has_tx(k)) && self.rx_set.iter().all(|&i| other.has_rx(i))
    }

    pub fn node_count(&self) -> usize {
        self.tx_set.len() + self.rx_set.len()
    }
}

/// Reduced IA system: effective antenna counts (antennas beyond the effective
/// count are switched off for alignment) and RXs that zero-force all of their
/// interference on their own and therefore impose no constraint.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConstraintSystem {
    d: Vec<usize>,
    n_tx: Vec<usize>,
    n_rx: Vec<usize>,
    absorbed_rx: Vec<bool>,
}

impl ConstraintSystem {
    pub fn new(config: &AntennaConfig) -> Self {
        Self {
            d: config.stream_counts().to_vec(),
            n_tx: config.tx_antennas().to_vec(),
            n_rx: config.rx_antennas().to_vec(),
            absorbed_rx: vec![false; config.users()],
        }
    }

    pub fn from_parts(
        config: &AntennaConfig,
        n_tx: Vec<usize>,
        n_rx: Vec<usize>,
        absorbed_rx: Vec<bool>,
    ) -> Result<Self> {
        let k = config.users();
        if n_tx.len() != k || n_rx.len() != k || absorbed_rx.len() != k {
            return Err(Error::DimensionMismatch("constraint system length".into()));
        }
        for u in 0..k {
            let d = config.streams(u);
            if n_tx[u] < d || n_tx[u] > config.n_tx(u) || n_rx[u] < d || n_rx[u] > config.n_rx(u) {
                return Err(Error::InvalidConfig(format!("effective antennas of user {u}")));
            }
        }
        Ok(Self { d: config.stream_counts().to_vec(), n_tx, n_rx, absorbed_rx })
    }

    pub fn users(&self) -> usize {
        self.d.len()
    }
    pub fn streams(&self, k: usize) -> usize {
        self.d[k]
    }
    pub fn n_tx(&self, k: usize) -> usize {
        self.n_tx[k]
    }
    pub fn n_rx(&self, i: usize) -> usize {
        self.n_rx[i]
    }
    pub fn n_tx_all(&self) -> &[usize] {
        &self.n_tx
    }
    pub fn n_rx_all(&self) -> &[usize] {
        &self.n_rx
    }
    pub fn is_absorbed(&self, i: usize) -> bool {
        self.absorbed_rx[i]
    }
    pub fn absorbed(&self) -> &[bool] {
        &self.absorbed_rx
    }

    pub(crate) fn freeze_tx(&mut self, k: usize) {
        self.n_tx[k] -= 1;
    }
    pub(crate) fn freeze_rx(&mut self, i: usize) {
        self.n_rx[i] -= 1;
    }
    pub(crate) fn absorb_rx(&mut self, i: usize) {
        self.absorbed_rx[i] = true;
    }

    /// RXs still taking part in alignment.
    pub fn active_rx(&self) -> Vec<usize> {
        (0..self.users()).filter(|&i| !self.absorbed_rx[i]).collect()
    }

    pub fn tx_variables(&self, k: usize) -> usize {
        self.d[k] * (self.n_tx[k] - self.d[k])
    }

    pub fn rx_variables(&self, i: usize) -> usize {
        if self.absorbed_rx[i] {
            0
        } else {
            self.d[i] * (self.n_rx[i] - self.d[i])
        }
    }

    /// Interference constraints `(rx, tx)` of a sub-IC.
    pub fn constraints(&self, s: &SubIc) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &i in s.rx_set() {
            if self.absorbed_rx[i] {
                continue;
            }
            for &k in s.tx_set() {
                if i != k {
                    out.push((i, k));
                }
            }
        }
        out
    }

    pub fn variable_count(&self, s: &SubIc) -> usize {
        s.tx_set().iter().map(|&k| self.tx_variables(k)).sum::<usize>()
            + s.rx_set().iter().map(|&i| self.rx_variables(i)).sum::<usize>()
    }

    pub fn constraint_count(&self, s: &SubIc) -> usize {
        self.constraints(s).iter().map(|&(i, k)| self.d[i] * self.d[k]).sum()
    }

    /// Every subset of the constraints touches at least as many variables as
    /// it imposes equations.
    pub fn is_proper(&self, s: &SubIc) -> Result<bool> {
        let cons = self.constraints(s);
        let m = cons.len();
        if m > MAX_CONSTRAINTS {
            return Err(Error::EnumerationLimit { what: "constraints", count: m, limit: MAX_CONSTRAINTS });
        }
        let k = self.users();
        let eqs: Vec<usize> = cons.iter().map(|&(i, t)| self.d[i] * self.d[t]).collect();
        let tx_vars: Vec<usize> = (0..k).map(|t| self.tx_variables(t)).collect();
        let rx_vars: Vec<usize> = (0..k).map(|i| self.rx_variables(i)).collect();
        for mask in 1u32..(1u32 << m) {
            let (mut txs, mut rxs, mut need) = (0u64, 0u64, 0usize);
            for (c, &(i, t)) in cons.iter().enumerate() {
                if mask >> c & 1 == 1 {
                    rxs |= 1 << i;
                    txs |= 1 << t;
                    need += eqs[c];
                }
            }
            let have: usize = (0..k)
                .map(|u| {
                    (if txs >> u & 1 == 1 { tx_vars[u] } else { 0 })
                        + (if rxs >> u & 1 == 1 { rx_vars[u] } else { 0 })
                })
                .sum();
            if have < need {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Proper with exactly as many variables as equations.
    pub fn is_tightly_feasible(&self, s: &SubIc) -> Result<bool> {
        if self.variable_count(s) != self.constraint_count(s) {
            // Still enforce the enumeration guard.
            let m = self.constraints(s).len();
            if m > MAX_CONSTRAINTS {
                return Err(Error::EnumerationLimit { what: "constraints", count: m, limit: MAX_CONSTRAINTS });
            }
            return Ok(false);
        }
        self.is_proper(s)
    }

    /// Proper with surplus variables.
    pub fn is_super_feasible(&self, s: &SubIc) -> Result<bool> {
        Ok(self.variable_count(s) > self.constraint_count(s) && self.is_proper(s)?)
    }

    /// Channel coefficients from `tx_set` to `rx_set` under the effective
    /// antenna counts.
    pub fn scalar_count(&self, s: &SubIc) -> usize {
        let rows: usize = s.rx_set().iter().map(|&i| self.n_rx[i]).sum();
        let cols: usize = s.tx_set().iter().map(|&k| self.n_tx[k]).sum();
        rows * cols
    }

    /// Sub-IC over every TX and every active RX (`None` when all RXs are absorbed).
    pub fn full_subic(&self) -> Option<SubIc> {
        let rx = self.active_rx();
        (!rx.is_empty()).then(|| SubIc { tx_set: (0..self.users()).collect(), rx_set: rx })
    }

    /// Does TX `k` face any constraint at all?
    pub fn tx_is_constrained(&self, k: usize) -> bool {
        (0..self.users()).any(|i| i != k && !self.absorbed_rx[i])
    }
}

pub fn is_proper(config: &AntennaConfig, s: &SubIc) -> Result<bool> {
    ConstraintSystem::new(config).is_proper(s)
}

pub fn is_tightly_feasible(config: &AntennaConfig, s: &SubIc) -> Result<bool> {
    ConstraintSystem::new(config).is_tightly_feasible(s)
}

/// Properness of the whole network.
pub fn is_proper_network(config: &AntennaConfig) -> Result<bool> {
    is_proper(config, &SubIc::full(config.users()))
}
