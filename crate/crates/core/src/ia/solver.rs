//! Alternating leakage minimization.

use std::collections::BTreeMap;

use crate::csit::LocalEstimate;
use crate::error::{Error, Result};
use crate::ia::feasibility::{ConstraintSystem, SubIc};
use crate::linalg::{frob_sq, leading_right_singular_vectors, least_eigvecs, orthonormalize};
use crate::model::{AntennaConfig, ChannelRealization, CMatrix};
use crate::rng::{complex_normal, rng_for};

/// Where the solver reads channel blocks from.
pub trait BlockSource {
    /// Leading `rows × cols` corner of the block from TX `tx` to RX `rx`.
    fn block(&self, rx: usize, tx: usize, rows: usize, cols: usize) -> Result<CMatrix>;
}

impl BlockSource for ChannelRealization {
    fn block(&self, rx: usize, tx: usize, rows: usize, cols: usize) -> Result<CMatrix> {
        Ok(ChannelRealization::block(self, rx, tx).view((0, 0), (rows, cols)).into_owned())
    }
}

/// A single TX's estimate; reading a block it does not know is an error.
#[derive(Debug, Clone, Copy)]
pub struct EstimateView<'a> {
    pub owner: usize,
    pub config: &'a AntennaConfig,
    pub estimate: &'a LocalEstimate,
}

impl BlockSource for EstimateView<'_> {
    fn block(&self, rx: usize, tx: usize, rows: usize, cols: usize) -> Result<CMatrix> {
        let (r0, c0) = (self.config.rx_offset(rx), self.config.tx_offset(tx));
        let known = (0..rows).all(|r| (0..cols).all(|c| self.estimate.is_known(r0 + r, c0 + c)));
        if !known {
            return Err(Error::InsufficientCsit { tx: self.owner, rx, from: tx });
        }
        Ok(self.estimate.values().view((r0, c0), (rows, cols)).into_owned())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IaOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for IaOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 5000 }
    }
}

/// Starting precoders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IaInit {
    /// Random orthonormal precoders drawn from the seed.
    Seeded(u64),
    /// Leading right singular vectors of the direct channel when it belongs to
    /// the sub-IC, identity columns otherwise. Needs no shared randomness.
    Canonical,
}

/// Solution of one alignment problem, in effective (reduced) dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct SubSolution {
    pub precoders: BTreeMap<usize, CMatrix>,
    pub filters: BTreeMap<usize, CMatrix>,
    /// Leakage after every filter update; `history[0]` is the initial point.
    pub history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl SubSolution {
    pub fn leakage(&self) -> f64 {
        *self.history.last().unwrap_or(&0.0)
    }
}

/// Full-network solution with unit-norm columns.
#[derive(Debug, Clone, PartialEq)]
pub struct IaSolution {
    pub precoders: Vec<CMatrix>,
    pub filters: Vec<CMatrix>,
    pub leakage: f64,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<f64>,
}

struct Link {
    rx: usize,
    tx: usize,
    h: CMatrix,
}

fn initial_precoder(
    system: &ConstraintSystem,
    subic: &SubIc,
    k: usize,
    source: &dyn BlockSource,
    init: IaInit,
) -> Result<CMatrix> {
    let (n, d) = (system.n_tx(k), system.streams(k));
    if n == d {
        return Ok(CMatrix::identity(n, d));
    }
    match init {
        IaInit::Canonical if subic.has_rx(k) => {
            let direct = source.block(k, k, system.n_rx(k), n)?;
            Ok(leading_right_singular_vectors(&direct, d))
        }
        IaInit::Canonical => Ok(CMatrix::identity(n, d)),
        IaInit::Seeded(seed) => {
            let mut rng = rng_for(seed, &[0x1a, k as u64]);
            let m = CMatrix::from_fn(n, d, |_, _| complex_normal(&mut rng, 1.0));
            Ok(orthonormalize(&m))
        }
    }
}

/// Aligns the interference of `subic` under `system`, keeping the precoders in
/// `fixed` untouched. Precoders and filters live in effective dimensions.
pub fn solve_subic(
    system: &ConstraintSystem,
    subic: &SubIc,
    fixed: &BTreeMap<usize, CMatrix>,
    source: &dyn BlockSource,
    init: IaInit,
    opts: IaOptions,
) -> Result<SubSolution> {
    let cons = system.constraints(subic);
    let links = cons
        .iter()
        .map(|&(rx, tx)| {
            Ok(Link { rx, tx, h: source.block(rx, tx, system.n_rx(rx), system.n_tx(tx))? })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut precoders = BTreeMap::new();
    for &k in subic.tx_set() {
        let t = match fixed.get(&k) {
            Some(t) => {
                if t.shape() != (system.n_tx(k), system.streams(k)) {
                    return Err(Error::DimensionMismatch(format!("fixed precoder of TX {k}")));
                }
                t.clone()
            }
            None => initial_precoder(system, subic, k, source, init)?,
        };
        precoders.insert(k, t);
    }
    let free: Vec<usize> = subic
        .tx_set()
        .iter()
        .copied()
        .filter(|k| !fixed.contains_key(k) && system.n_tx(*k) > system.streams(*k))
        .collect();
    let mut receivers: Vec<usize> = links.iter().map(|l| l.rx).collect();
    receivers.dedup();

    let mut filters = BTreeMap::new();
    let mut history = Vec::new();
    let mut iterations = 0;
    let converged = loop {
        for &i in &receivers {
            let n = system.n_rx(i);
            let mut q = CMatrix::zeros(n, n);
            for l in links.iter().filter(|l| l.rx == i) {
                let v = &l.h * &precoders[&l.tx];
                q += &v * v.adjoint();
            }
            filters.insert(i, least_eigvecs(&q, system.streams(i)));
        }
        let leak: f64 = links
            .iter()
            .map(|l| frob_sq(&(filters[&l.rx].adjoint() * &l.h * &precoders[&l.tx])))
            .sum();
        history.push(leak);
        if leak < opts.tol {
            break true;
        }
        if iterations >= opts.max_iter {
            break false;
        }
        for &k in &free {
            let n = system.n_tx(k);
            let mut q = CMatrix::zeros(n, n);
            for l in links.iter().filter(|l| l.tx == k) {
                let v = l.h.adjoint() * &filters[&l.rx];
                q += &v * v.adjoint();
            }
            precoders.insert(k, least_eigvecs(&q, system.streams(k)));
        }
        iterations += 1;
    };
    Ok(SubSolution { precoders, filters, history, iterations, converged })
}

/// Embeds an effective-dimension matrix into `n` rows (trailing rows zero).
pub fn pad_rows(m: &CMatrix, n: usize) -> CMatrix {
    let mut out = CMatrix::zeros(n, m.ncols());
    out.view_mut((0, 0), m.shape()).copy_from(m);
    out
}

/// IA over the whole network with full CSI.
pub fn ia_solve(h: &ChannelRealization, opts: IaOptions, init: IaInit) -> Result<IaSolution> {
    let config = h.config();
    let system = ConstraintSystem::new(config);
    let sub = solve_subic(&system, &SubIc::full(config.users()), &BTreeMap::new(), h, init, opts)?;
    let precoders: Vec<CMatrix> = (0..config.users()).map(|k| sub.precoders[&k].clone()).collect();
    let mut filters = receive_filters(h, &precoders)?;
    for (i, g) in &sub.filters {
        filters[*i] = g.clone();
    }
    Ok(IaSolution {
        precoders,
        filters,
        leakage: sub.leakage(),
        iterations: sub.iterations,
        converged: sub.converged,
        history: sub.history,
    })
}

/// Interference-minimizing filters for given precoders on the true channel:
/// the least-interfered `d_i` directions at each RX, or the matched direction
/// when an RX sees no interference.
pub fn receive_filters(h: &ChannelRealization, precoders: &[CMatrix]) -> Result<Vec<CMatrix>> {
    let c = h.config();
    check_precoders(c, precoders)?;
    Ok((0..c.users())
        .map(|i| {
            let n = c.n_rx(i);
            let mut q = CMatrix::zeros(n, n);
            for k in (0..c.users()).filter(|&k| k != i) {
                let v = h.block(i, k) * &precoders[k];
                q += &v * v.adjoint();
            }
            if frob_sq(&q) == 0.0 {
                let signal = h.block(i, i) * &precoders[i];
                leading_right_singular_vectors(&signal.adjoint(), c.streams(i))
            } else {
                least_eigvecs(&q, c.streams(i))
            }
        })
        .collect())
}

fn check_precoders(c: &AntennaConfig, precoders: &[CMatrix]) -> Result<()> {
    if precoders.len() != c.users()
        || precoders
            .iter()
            .enumerate()
            .any(|(k, t)| t.shape() != (c.n_tx(k), c.streams(k)))
    {
        return Err(Error::DimensionMismatch("precoder shapes".into()));
    }
    Ok(())
}

/// Total interference leakage `sum_{i != k} |g_i^H H_ik t_k|_F^2`.
pub fn leakage(h: &ChannelRealization, precoders: &[CMatrix], filters: &[CMatrix]) -> Result<f64> {
    let c = h.config();
    check_precoders(c, precoders)?;
    if filters.len() != c.users()
        || filters
            .iter()
            .enumerate()
            .any(|(i, g)| g.shape() != (c.n_rx(i), c.streams(i)))
    {
        return Err(Error::DimensionMismatch("filter shapes".into()));
    }
    let mut total = 0.0;
    for i in 0..c.users() {
        for k in (0..c.users()).filter(|&k| k != i) {
            total += frob_sq(&(filters[i].adjoint() * h.block(i, k) * &precoders[k]));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{gen_channel, Topology};

    fn channel(c: &AntennaConfig, seed: u64) -> ChannelRealization {
        gen_channel(c, Topology::IidRayleigh, 100.0, seed).unwrap()
    }

    #[test]
    fn single_user_has_no_leakage() {
        let c = AntennaConfig::symmetric(1, 3, 2, 2).unwrap();
        let s = ia_solve(&channel(&c, 1), IaOptions::default(), IaInit::Seeded(1)).unwrap();
        assert_eq!((s.leakage, s.iterations, s.converged), (0.0, 0, true));
    }

    #[test]
    fn homogeneous_three_user_aligns() {
        let c = AntennaConfig::symmetric(3, 2, 2, 1).unwrap();
        let ok = (0..20)
            .filter(|&seed| {
                let s = ia_solve(&channel(&c, seed), IaOptions::default(), IaInit::Seeded(seed)).unwrap();
                s.converged
            })
            .count();
        assert!(ok >= 19, "{ok}/20");
    }

    #[test]
    fn single_antenna_three_user_does_not_converge() {
        let c = AntennaConfig::single_antenna(3).unwrap();
        let s = ia_solve(&channel(&c, 3), IaOptions { tol: 1e-8, max_iter: 50 }, IaInit::Seeded(3)).unwrap();
        assert!(!s.converged && s.leakage > 1e-3);
    }

    #[test]
    fn leakage_history_is_monotone() {
        let c = AntennaConfig::new(vec![2, 3, 2], vec![3, 2, 2], vec![1, 2, 1]).unwrap();
        for seed in 0..5 {
            let s = ia_solve(&channel(&c, seed), IaOptions { tol: 0.0, max_iter: 200 }, IaInit::Seeded(seed))
                .unwrap();
            for w in s.history.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-300, "{} > {}", w[1], w[0]);
            }
        }
    }

    #[test]
    fn solution_columns_are_unit_norm() {
        let c = AntennaConfig::symmetric(3, 2, 2, 1).unwrap();
        let s = ia_solve(&channel(&c, 8), IaOptions::default(), IaInit::Canonical).unwrap();
        for m in s.precoders.iter().chain(&s.filters) {
            for col in m.column_iter() {
                assert!((col.norm() - 1.0).abs() < 1e-12);
            }
        }
        let l = leakage(&channel(&c, 8), &s.precoders, &s.filters).unwrap();
        assert!((l - s.leakage).abs() < 1e-12);
    }

    #[test]
    fn receive_zero_forcing_nulls_everything() {
        // 2 RX antennas per RX against a single interfering stream each (K=2):
        // the orthogonal complement of the interference direction kills it.
        let c = AntennaConfig::new(vec![1, 1], vec![2, 2], vec![1, 1]).unwrap();
        let h = channel(&c, 4);
        let t = vec![CMatrix::identity(1, 1); 2];
        let g = receive_filters(&h, &t).unwrap();
        assert!(leakage(&h, &t, &g).unwrap() <= 1e-20);
    }

    #[test]
    fn random_filters_leak() {
        let c = AntennaConfig::symmetric(3, 2, 2, 1).unwrap();
        let h = channel(&c, 5);
        let mut rng = rng_for(5, &[]);
        let mut rand = |n| {
            let m = CMatrix::from_fn(n, 1, |_, _| complex_normal(&mut rng, 1.0));
            orthonormalize(&m)
        };
        let t: Vec<CMatrix> = (0..3).map(|_| rand(2)).collect();
        let g: Vec<CMatrix> = (0..3).map(|_| rand(2)).collect();
        assert!(leakage(&h, &t, &g).unwrap() > 0.0);
    }

    #[test]
    fn estimate_view_reports_missing_block() {
        use crate::csit::{build_distributed_csit, CsitAllocation, CsitSource, Precision, QuantizerKind};
        let c = AntennaConfig::symmetric(3, 2, 2, 1).unwrap();
        let h = channel(&c, 6);
        let mut a = CsitAllocation::complete(&c);
        a.set_row(1, 2, Precision::None);
        let d = build_distributed_csit(&h, CsitSource::Allocation(&a), QuantizerKind::Surrogate, 0).unwrap();
        let view = EstimateView { owner: 1, config: &c, estimate: d.estimate(1) };
        assert_eq!(view.block(2, 0, 2, 2), Err(Error::InsufficientCsit { tx: 1, rx: 2, from: 0 }));
        assert_eq!(view.block(0, 2, 2, 2).unwrap(), h.block(0, 2).into_owned());
    }
}
