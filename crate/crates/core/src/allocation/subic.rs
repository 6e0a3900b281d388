//! CSIT allocations that preserve IA feasibility by handing each TX only the
//! channel of a small tightly-feasible sub-IC.

use crate::csit::{BlockShape, CsitAllocation};
use crate::error::{Error, Result};
use crate::ia::{AlignmentPlan, ConstraintSystem, SubIc};
use crate::model::AntennaConfig;

/// Largest network for which sub-ICs are enumerated.
pub const MAX_SEARCH_USERS: usize = 5;

/// An allocation together with the alignment plan the TXs follow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IaAllocation {
    pub csit: CsitAllocation,
    pub plan: AlignmentPlan,
}

impl IaAllocation {
    pub fn scalars(&self) -> u64 {
        self.csit.size().scalars
    }
}

fn subsets(items: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (1u32..(1 << items.len())).map(move |m| {
        items
            .iter()
            .enumerate()
            .filter(|(b, _)| m >> b & 1 == 1)
            .map(|(_, &x)| x)
            .collect()
    })
}

/// Cheapest tightly-feasible sub-IC of `system` containing TX `tx`, ties
/// broken by the sorted index sets. Falls back to the full active network.
pub fn smallest_tf_subic_in(system: &ConstraintSystem, tx: usize) -> Result<SubIc> {
    let k = system.users();
    if k > MAX_SEARCH_USERS {
        return Err(Error::EnumerationLimit { what: "users", count: k, limit: MAX_SEARCH_USERS });
    }
    let all: Vec<usize> = (0..k).collect();
    let active = system.active_rx();
    let mut best: Option<(usize, SubIc)> = None;
    for tx_set in subsets(&all).filter(|s| s.contains(&tx)) {
        for rx_set in subsets(&active) {
            let s = SubIc::new(tx_set.clone(), rx_set, k)?;
            let cost = system.scalar_count(&s);
            if best.as_ref().is_some_and(|(c, b)| (*c, b) <= (cost, &s)) {
                continue;
            }
            if system.is_tightly_feasible(&s)? {
                best = Some((cost, s));
            }
        }
    }
    match best {
        Some((_, s)) => Ok(s),
        None => system
            .full_subic()
            .ok_or_else(|| Error::InvalidConfig("every RX is absorbed".into())),
    }
}

pub fn smallest_tf_subic(config: &AntennaConfig, tx: usize) -> Result<SubIc> {
    smallest_tf_subic_in(&ConstraintSystem::new(config), tx)
}

/// Exact blocks of every TX's sub-IC under the plan's effective dimensions.
pub fn allocation_from_plan(config: &AntennaConfig, plan: &AlignmentPlan) -> CsitAllocation {
    let mut a = CsitAllocation::none(config);
    for (j, s) in plan.subics.iter().enumerate() {
        let Some(s) = s else { continue };
        for &i in s.rx_set() {
            for &k in s.tx_set() {
                let shape = BlockShape::new(plan.system.n_rx(i), plan.system.n_tx(k));
                a.set_exact_block(j, i, k, shape);
            }
        }
    }
    a
}

fn plan_for(system: &ConstraintSystem, every_tx: bool) -> Result<AlignmentPlan> {
    let subics = (0..system.users())
        .map(|j| {
            if every_tx || system.tx_is_constrained(j) {
                smallest_tf_subic_in(system, j).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AlignmentPlan { system: system.clone(), subics })
}

fn plan_scalars(plan: &AlignmentPlan) -> usize {
    plan.subics.iter().flatten().map(|s| plan.system.scalar_count(s)).sum()
}

fn require_proper(system: &ConstraintSystem) -> Result<()> {
    match system.full_subic() {
        Some(full) if !system.is_proper(&full)? => Err(Error::Infeasible),
        _ => Ok(()),
    }
}

/// Each TX gets exactly the blocks of its smallest tightly-feasible sub-IC.
pub fn tightly_feasible_allocation(config: &AntennaConfig) -> Result<IaAllocation> {
    let system = ConstraintSystem::new(config);
    require_proper(&system)?;
    let plan = plan_for(&system, true)?;
    Ok(IaAllocation { csit: allocation_from_plan(config, &plan), plan })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Move {
    FreezeRx(usize),
    AbsorbRx(usize),
    FreezeTx(usize),
}

fn candidate_moves(config: &AntennaConfig, s: &ConstraintSystem) -> Vec<Move> {
    let k = s.users();
    let total_streams: usize = config.stream_counts().iter().sum();
    let mut moves = Vec::new();
    for i in 0..k {
        if !s.is_absorbed(i) && s.n_rx(i) > s.streams(i) {
            moves.push(Move::FreezeRx(i));
        }
    }
    for i in 0..k {
        if !s.is_absorbed(i) && config.n_rx(i) >= total_streams {
            moves.push(Move::AbsorbRx(i));
        }
    }
    for t in 0..k {
        if s.n_tx(t) > s.streams(t) {
            moves.push(Move::FreezeTx(t));
        }
    }
    moves
}

fn apply(s: &ConstraintSystem, m: Move) -> ConstraintSystem {
    let mut out = s.clone();
    match m {
        Move::FreezeRx(i) => out.freeze_rx(i),
        Move::AbsorbRx(i) => out.absorb_rx(i),
        Move::FreezeTx(t) => out.freeze_tx(t),
    }
    out
}

fn greedy_descent(config: &AntennaConfig, start: ConstraintSystem) -> Result<(usize, AlignmentPlan)> {
    let mut plan = plan_for(&start, false)?;
    let mut size = plan_scalars(&plan);
    loop {
        let mut best: Option<(usize, AlignmentPlan)> = None;
        for m in candidate_moves(config, &plan.system) {
            let next = apply(&plan.system, m);
            if require_proper(&next).is_err() {
                continue;
            }
            let p = plan_for(&next, false)?;
            let s = plan_scalars(&p);
            if best.as_ref().is_none_or(|(b, _)| s < *b) {
                best = Some((s, p));
            }
        }
        match best {
            Some((s, p)) if s < size => {
                size = s;
                plan = p;
            }
            _ => return Ok((size, plan)),
        }
    }
}

/// Greedy reduction of a super-feasible network. Surplus antennas are
/// switched off, or an RX with enough antennas zero-forces all of its
/// interference alone, whenever that shrinks the allocation while keeping the
/// reduced system proper. The descent is restarted from every set of
/// self-sufficient RXs absorbed up front and the smallest result is kept.
/// TXs left without any constraint get no CSIT. Networks without surplus get
/// the tightly-feasible allocation.
pub fn superfeasible_heuristic_allocation(config: &AntennaConfig) -> Result<IaAllocation> {
    let base = ConstraintSystem::new(config);
    require_proper(&base)?;
    if !base.is_super_feasible(&SubIc::full(config.users()))? {
        return tightly_feasible_allocation(config);
    }
    let total_streams: usize = config.stream_counts().iter().sum();
    let absorbable: Vec<usize> =
        (0..config.users()).filter(|&i| config.n_rx(i) >= total_streams).collect();
    let mut best: Option<(usize, AlignmentPlan)> = None;
    for m in 0u32..(1 << absorbable.len()) {
        let mut start = base.clone();
        for (b, &i) in absorbable.iter().enumerate() {
            if m >> b & 1 == 1 {
                start.absorb_rx(i);
            }
        }
        if require_proper(&start).is_err() {
            continue;
        }
        let (s, p) = greedy_descent(config, start)?;
        if best.as_ref().is_none_or(|(b, _)| s < *b) {
            best = Some((s, p));
        }
    }
    let (_, plan) = best.ok_or(Error::Infeasible)?;
    Ok(IaAllocation { csit: allocation_from_plan(config, &plan), plan })
}
