//! Precoder design when each TX only knows the channel of its own sub-IC.
//!
//! Every TX solves the sub-ICs of the plan that lie strictly inside its own,
//! innermost first, then its own sub-IC with the inner precoders held fixed.
//! All solves start from the canonical initialization, so two TXs holding the
//! same exact blocks compute bit-identical inner precoders.

use std::collections::BTreeMap;

use crate::csit::DistributedCsit;
use crate::error::{Error, Result};
use crate::ia::feasibility::{ConstraintSystem, SubIc};
use crate::ia::solver::{pad_rows, solve_subic, BlockSource, EstimateView, IaInit, IaOptions};
use crate::model::{AntennaConfig, CMatrix};

/// Which reduced system the network aligns over and which sub-IC each TX is
/// responsible for (`None`: the TX faces no constraint and needs no CSIT).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentPlan {
    pub system: ConstraintSystem,
    pub subics: Vec<Option<SubIc>>,
}

impl AlignmentPlan {
    /// Everyone solves the whole network.
    pub fn full(config: &AntennaConfig) -> Self {
        Self {
            system: ConstraintSystem::new(config),
            subics: vec![Some(SubIc::full(config.users())); config.users()],
        }
    }

    /// Distinct sub-ICs of the plan strictly inside `outer`, ordered by node
    /// count and then lexicographically.
    fn inner(&self, outer: &SubIc) -> Vec<SubIc> {
        let mut v: Vec<SubIc> = self
            .subics
            .iter()
            .flatten()
            .filter(|s| *s != outer && s.is_within(outer))
            .cloned()
            .collect();
        v.sort_by(|a, b| (a.node_count(), a).cmp(&(b.node_count(), b)));
        v.dedup();
        v
    }
}

/// Precoders one TX computes: its own plus everything it derived on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct TxView {
    /// Full-dimension precoders keyed by TX index.
    pub precoders: BTreeMap<usize, CMatrix>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IncompleteSolution {
    /// Column block of TX `k`, computed by TX `k` alone.
    pub precoders: Vec<CMatrix>,
    pub converged: Vec<bool>,
}

type Memo = BTreeMap<SubIc, (BTreeMap<usize, CMatrix>, bool)>;

fn solve_nested(
    plan: &AlignmentPlan,
    s: &SubIc,
    source: &dyn BlockSource,
    opts: IaOptions,
    memo: &mut Memo,
) -> Result<(BTreeMap<usize, CMatrix>, bool)> {
    if let Some(r) = memo.get(s) {
        return Ok(r.clone());
    }
    let mut fixed = BTreeMap::new();
    let mut ok = true;
    for t in plan.inner(s) {
        let (pre, conv) = solve_nested(plan, &t, source, opts, memo)?;
        ok &= conv;
        for (k, m) in pre {
            fixed.entry(k).or_insert(m);
        }
    }
    let sol = solve_subic(&plan.system, s, &fixed, source, IaInit::Canonical, opts)?;
    let out = (sol.precoders, ok && sol.converged);
    memo.insert(s.clone(), out.clone());
    Ok(out)
}

fn canonical_unconstrained(config: &AntennaConfig, k: usize) -> CMatrix {
    CMatrix::identity(config.n_tx(k), config.streams(k))
}

/// What TX `tx` computes from its own estimate.
pub fn tx_view(csit: &DistributedCsit, plan: &AlignmentPlan, tx: usize, opts: IaOptions) -> Result<TxView> {
    let config = csit.config();
    if plan.subics.len() != config.users() || plan.system.users() != config.users() {
        return Err(Error::DimensionMismatch("plan and CSIT describe different networks".into()));
    }
    let Some(own) = &plan.subics[tx] else {
        let mut precoders = BTreeMap::new();
        precoders.insert(tx, canonical_unconstrained(config, tx));
        return Ok(TxView { precoders, converged: true });
    };
    let source = EstimateView { owner: tx, config, estimate: csit.estimate(tx) };
    let mut memo = Memo::new();
    let (pre, converged) = solve_nested(plan, own, &source, opts, &mut memo)?;
    let precoders = pre
        .into_iter()
        .map(|(k, m)| (k, pad_rows(&m, config.n_tx(k))))
        .collect();
    Ok(TxView { precoders, converged })
}

/// Each TX's own precoder, computed independently from its own estimate.
pub fn ia_solve_incomplete(
    csit: &DistributedCsit,
    plan: &AlignmentPlan,
    opts: IaOptions,
) -> Result<IncompleteSolution> {
    let k = csit.config().users();
    let mut precoders = Vec::with_capacity(k);
    let mut converged = Vec::with_capacity(k);
    for j in 0..k {
        let mut v = tx_view(csit, plan, j, opts)?;
        precoders.push(v.precoders.remove(&j).ok_or_else(|| {
            Error::InvalidConfig(format!("sub-IC of TX {j} does not contain TX {j}"))
        })?);
        converged.push(v.converged);
    }
    Ok(IncompleteSolution { precoders, converged })
}
