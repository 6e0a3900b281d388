//! Rates and degrees-of-freedom estimates.

use crate::error::{Error, Result};
use crate::model::{ChannelRealization, CMatrix};

fn sinr_rates(effective: &CMatrix, noise: f64) -> Vec<f64> {
    (0..effective.nrows())
        .map(|i| {
            let signal = effective[(i, i)].norm_sqr();
            let interference: f64 = (0..effective.ncols())
                .filter(|&k| k != i)
                .map(|k| effective[(i, k)].norm_sqr())
                .sum();
            (1.0 + signal / (noise + interference)).log2()
        })
        .collect()
}

/// Per-user rates of single-antenna receivers treating residual interference
/// as noise. Column `k` of `t` carries the stream of user `k`.
pub fn user_rates(h: &ChannelRealization, t: &CMatrix, noise: f64) -> Result<Vec<f64>> {
    let c = h.config();
    if !c.rx_antennas().iter().all(|&n| n == 1) || t.nrows() != c.total_tx() || t.ncols() != c.users() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} precoder for a network with {} TX antennas and {} single-antenna users",
            t.nrows(),
            t.ncols(),
            c.total_tx(),
            c.users()
        )));
    }
    Ok(sinr_rates(&(h.matrix() * t), noise))
}

/// Per-user rates when RX `i` first combines its antennas with the unit-norm
/// filter `filters[i]` (`n_rx[i] × 1`).
pub fn user_rates_filtered(
    h: &ChannelRealization,
    t: &CMatrix,
    filters: &[CMatrix],
    noise: f64,
) -> Result<Vec<f64>> {
    let c = h.config();
    if t.nrows() != c.total_tx() || t.ncols() != c.users() || filters.len() != c.users() {
        return Err(Error::DimensionMismatch("precoder or filter count".into()));
    }
    let mut eff = CMatrix::zeros(c.users(), c.users());
    for (i, g) in filters.iter().enumerate() {
        if g.shape() != (c.n_rx(i), 1) {
            return Err(Error::DimensionMismatch(format!("filter of RX {i}")));
        }
        let rows = h.matrix().rows(c.rx_offset(i), c.n_rx(i));
        eff.set_row(i, &(g.adjoint() * rows * t).row(0));
    }
    Ok(sinr_rates(&eff, noise))
}

/// Least-squares slope of `rates` against `log2 P` for SNR points in dB.
pub fn slope_vs_log2_snr(snr_db: &[f64], rates: &[f64]) -> Result<f64> {
    if snr_db.len() != rates.len() {
        return Err(Error::DimensionMismatch("SNR and rate series differ in length".into()));
    }
    if snr_db.len() < 2 {
        return Err(Error::Domain("a slope needs at least two points".into()));
    }
    let x: Vec<f64> = snr_db.iter().map(|db| db / 10.0 * 10f64.log2()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = rates.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("all points at the same SNR".into()));
    }
    let sxy: f64 = x.iter().zip(rates).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(sxy / sxx)
}
