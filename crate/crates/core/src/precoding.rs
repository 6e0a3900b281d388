//! Network-MIMO precoders under centralized and distributed CSIT.
//!
//! Every TX `j` computes a full precoding matrix from what it knows and keeps
//! only its own row block. Power is normalized the same way everywhere: the
//! full matrix is scaled by `sqrt(P) / max(floor, largest per-TX row-block
//! norm)`, so each TX meets its power budget and TXs holding identical
//! estimates apply identical scalings.

use crate::csit::{DistributedCsit, ScalingAllocation};
use crate::error::{Error, Result};
use crate::linalg::{guarded_inverse, normalize_columns, right_pseudo_inverse};
use crate::model::{AntennaConfig, ChannelRealization, CMatrix, C64};

/// Coefficient magnitude used when the active TX's channel estimate vanishes.
pub const APZF_CLAMP: f64 = 1e6;
/// Channel magnitude below which the active coefficient is clamped.
pub const APZF_MIN_GAIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerNormalization {
    /// Lower bound on the normalizing row-block norm.
    pub floor: f64,
}

impl Default for PowerNormalization {
    fn default() -> Self {
        Self { floor: 1.0 }
    }
}

impl PowerNormalization {
    /// Default for AP-ZF: large enough that moderate coefficient estimates at
    /// different TXs lead to the same scaling.
    pub fn apzf_default() -> Self {
        Self { floor: 4.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PrecoderFlags {
    /// The TX could not invert its estimate and sent its own stream only.
    pub fallback: bool,
    /// A coefficient hit the clamp.
    pub clamped: bool,
}

/// Precoder actually applied to the true channel: row block `j` comes from TX `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectivePrecoder {
    matrix: CMatrix,
    power: Vec<f64>,
    flags: Vec<PrecoderFlags>,
}

impl EffectivePrecoder {
    /// `total_tx × streams`; column `k` carries stream `k`.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
    pub fn power(&self) -> &[f64] {
        &self.power
    }
    pub fn flags(&self) -> &[PrecoderFlags] {
        &self.flags
    }
    pub fn any_fallback(&self) -> bool {
        self.flags.iter().any(|f| f.fallback)
    }
    pub fn any_clamped(&self) -> bool {
        self.flags.iter().any(|f| f.clamped)
    }
}

fn block_norm(config: &AntennaConfig, t: &CMatrix, j: usize) -> f64 {
    t.rows(config.tx_offset(j), config.n_tx(j)).norm()
}

/// Scales TX `j`'s full view and returns its own row block.
fn own_rows(config: &AntennaConfig, view: &CMatrix, j: usize, p: f64, norm: PowerNormalization) -> CMatrix {
    let largest = (0..config.users())
        .map(|m| block_norm(config, view, m))
        .fold(norm.floor, f64::max);
    view.rows(config.tx_offset(j), config.n_tx(j)) * C64::new(p.sqrt() / largest, 0.0)
}

fn assemble(
    config: &AntennaConfig,
    views: &[CMatrix],
    flags: Vec<PrecoderFlags>,
    p: f64,
    norm: PowerNormalization,
) -> EffectivePrecoder {
    let streams = views[0].ncols();
    let mut matrix = CMatrix::zeros(config.total_tx(), streams);
    let mut power = Vec::with_capacity(config.users());
    for (j, view) in views.iter().enumerate() {
        let rows = own_rows(config, view, j, p, norm);
        power.push(rows.norm_squared());
        matrix.rows_mut(config.tx_offset(j), config.n_tx(j)).copy_from(&rows);
    }
    EffectivePrecoder { matrix, power, flags }
}

fn check_power(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("transmit power must be positive, got {p}")))
    }
}

/// Centralized zero-forcing: the unit-column inverse of the square network
/// channel, commonly scaled to meet every per-TX power budget.
pub fn zf_global(h: &ChannelRealization, p: f64) -> Result<EffectivePrecoder> {
    check_power(p)?;
    let mut t = guarded_inverse(h.matrix())?;
    normalize_columns(&mut t);
    let c = h.config();
    let views = vec![t; c.users()];
    Ok(assemble(c, &views, vec![PrecoderFlags::default(); c.users()], p, PowerNormalization::default()))
}

/// ZF view of one TX: the unit-column right pseudo-inverse of the rows it
/// knows anything about (unknown entries read as zero). Streams of rows it
/// knows nothing about get no coefficient. Returns `None` when the TX cannot
/// form a usable inverse.
fn local_zf_view(csit: &DistributedCsit, j: usize) -> Option<CMatrix> {
    let est = csit.estimate(j);
    let k = csit.config().users();
    let filled = est.zero_filled();
    let rows: Vec<usize> = (0..k).filter(|&i| (0..k).any(|c| est.is_known(i, c))).collect();
    if !rows.contains(&j) {
        return None;
    }
    let a = CMatrix::from_fn(rows.len(), k, |r, c| filled[(rows[r], c)]);
    let mut pinv = if rows.len() == k { guarded_inverse(&a) } else { right_pseudo_inverse(&a) }.ok()?;
    normalize_columns(&mut pinv);
    let mut view = CMatrix::zeros(k, k);
    for (col, &i) in rows.iter().enumerate() {
        view.set_column(i, &pinv.column(col));
    }
    Some(view)
}

/// Fallback view: TX `j` serves its own user with a matched coefficient.
fn matched_view(csit: &DistributedCsit, j: usize) -> CMatrix {
    let k = csit.config().users();
    let est = csit.estimate(j);
    let g = if est.is_known(j, j) { est.values()[(j, j)] } else { C64::new(0.0, 0.0) };
    let coef = if g.norm() > 0.0 { g.conj() / g.norm() } else { C64::new(1.0, 0.0) };
    let mut v = CMatrix::zeros(k, k);
    v[(j, j)] = coef;
    v
}

fn require_single_antenna(config: &AntennaConfig) -> Result<()> {
    if config.is_single_antenna() {
        Ok(())
    } else {
        Err(Error::Unsupported("distributed precoding needs single-antenna nodes".into()))
    }
}

/// Conventional distributed ZF: each TX inverts its own estimate.
pub fn zf_distributed(csit: &DistributedCsit, p: f64) -> Result<EffectivePrecoder> {
    check_power(p)?;
    let c = csit.config();
    require_single_antenna(c)?;
    let mut flags = vec![PrecoderFlags::default(); c.users()];
    let views: Vec<CMatrix> = (0..c.users())
        .map(|j| {
            local_zf_view(csit, j).unwrap_or_else(|| {
                flags[j].fallback = true;
                matched_view(csit, j)
            })
        })
        .collect();
    Ok(assemble(c, &views, flags, p, PowerNormalization::default()))
}

/// Coefficient the active TX uses so that `row · t = 0` when the passive TX
/// sends 1. `row` holds the channel from each TX to the RX being protected.
/// Returns the coefficient and whether it was clamped.
pub fn apzf_active_coefficient(row: [C64; 2], active: usize) -> (C64, bool) {
    let passive = 1 - active;
    let ha = row[active];
    if ha.norm() < APZF_MIN_GAIN {
        let dir = if row[passive].norm() > 0.0 { -row[passive] / row[passive].norm() } else { C64::new(-1.0, 0.0) };
        let phase = if ha.norm() > 0.0 { ha.conj() / ha.norm() } else { C64::new(1.0, 0.0) };
        return (dir * phase * APZF_CLAMP, true);
    }
    (-row[passive] / ha, false)
}

/// TX with the worse CSI on the row to protect stays passive (lower index on
/// ties). Indexed by stream.
pub fn apzf_passive_tx(scaling: &ScalingAllocation) -> [usize; 2] {
    let mut out = [0; 2];
    for (k, slot) in out.iter_mut().enumerate() {
        let row = 1 - k;
        *slot = if scaling.alpha(row, 1) < scaling.alpha(row, 0) { 1 } else { 0 };
    }
    out
}

/// Active-Passive ZF for two single-antenna TXs.
pub fn apzf(
    csit: &DistributedCsit,
    scaling: &ScalingAllocation,
    p: f64,
    norm: PowerNormalization,
) -> Result<EffectivePrecoder> {
    check_power(p)?;
    let c = csit.config();
    require_single_antenna(c)?;
    if c.users() != 2 || scaling.users() != 2 {
        return Err(Error::Unsupported("active-passive ZF is defined for two users".into()));
    }
    if !(norm.floor > 0.0) {
        return Err(Error::Domain("normalization floor must be positive".into()));
    }
    let passive = apzf_passive_tx(scaling);
    let mut flags = vec![PrecoderFlags::default(); 2];
    let views: Vec<CMatrix> = (0..2)
        .map(|j| {
            let est = csit.estimate(j).zero_filled();
            let mut v = CMatrix::zeros(2, 2);
            for k in 0..2 {
                let row = 1 - k;
                let (pas, act) = (passive[k], 1 - passive[k]);
                let (coef, clamped) = apzf_active_coefficient([est[(row, 0)], est[(row, 1)]], act);
                if clamped && act == j {
                    flags[j].clamped = true;
                }
                v[(pas, k)] = C64::new(1.0, 0.0);
                v[(act, k)] = coef;
            }
            v
        })
        .collect();
    Ok(assemble(c, &views, flags, p, norm))
}
