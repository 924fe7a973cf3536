//! Budget-constrained restoration.
//!
//! The strategic plan is computed first on a scratch copy. Its per-step LCC
//! energies `theta_r` and link costs `c_r` then feed a 0/1 knapsack that is
//! re-solved as the available budget grows in ten steps of `0.1 * B`. Newly
//! selected plan entries are executed on the live graph in plan order; an
//! entry that cannot be replayed yet waits for a later increment.
//!
//! Costs are real numbers; the knapsack table is indexed by integer cents,
//! so all budget bookkeeping happens in cents.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::report::format_real;
use crate::restore::{
    link, max_degree_node, record_step, strategic_restore, OpKind, RestoreOptions, RewirePlan,
    RewireRecord,
};
use crate::scalar::Scalar;
use crate::trust::TrustProfile;

/// Number of budget increments.
pub const INCREMENTS: u64 = 10;

/// Whole cents in `x` units, rounded down. Values within float noise of a
/// whole cent snap to it.
fn floor_cents(x: f64) -> u64 {
    let cents = x * 100.0;
    let nearest = cents.round();
    if (cents - nearest).abs() < 1e-6 {
        nearest as u64
    } else {
        cents.floor() as u64
    }
}

/// Converts a positive cost to cents, rounding down so that the cents of a
/// plan never add up to more than its total cost.
pub fn to_cents<T: Scalar>(cost: T) -> Result<u64> {
    let x = cost.as_f64();
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain(format!("cost {x} must be positive")));
    }
    match floor_cents(x) {
        0 => Err(Error::domain(format!("cost {x} is below one cent"))),
        cents => Ok(cents),
    }
}

/// Budget in cents, rounded down.
pub fn budget_to_cents<T: Scalar>(budget: T) -> Result<u64> {
    let x = budget.as_f64();
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain(format!(
            "budget {budget} must be non-negative"
        )));
    }
    Ok(floor_cents(x))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnapsackSelection<T> {
    /// Selected item indices, ascending.
    pub indices: Vec<usize>,
    pub value: T,
    pub cost_cents: u64,
}

/// 0/1 knapsack over integer costs, maximizing the summed value subject to
/// `sum(cost) <= budget`. An item is only taken when it strictly improves
/// the table entry, so ties favour leaving later items out.
pub fn knapsack_cents<T: Scalar>(
    values: &[T],
    costs: &[u64],
    budget: u64,
) -> Result<KnapsackSelection<T>> {
    if values.len() != costs.len() {
        return Err(Error::domain(format!(
            "{} values but {} costs",
            values.len(),
            costs.len()
        )));
    }
    if let Some(i) = costs.iter().position(|&c| c == 0) {
        return Err(Error::domain(format!("item {i} has zero cost")));
    }
    let n = values.len();
    // capacity beyond the total cost cannot change the optimum
    let cap = budget.min(costs.iter().sum()) as usize;
    let width = cap + 1;
    let mut table = vec![T::zero(); (n + 1) * width];
    let mut keep = vec![false; (n + 1) * width];
    for i in 1..=n {
        let (c_i, v_i) = (costs[i - 1] as usize, values[i - 1]);
        for c in 0..=cap {
            let skip = table[(i - 1) * width + c];
            if c_i <= c && v_i + table[(i - 1) * width + c - c_i] > skip {
                table[i * width + c] = v_i + table[(i - 1) * width + c - c_i];
                keep[i * width + c] = true;
            } else {
                table[i * width + c] = skip;
            }
        }
    }
    let mut indices = Vec::new();
    let mut rest = cap;
    for i in (1..=n).rev() {
        if keep[i * width + rest] {
            indices.push(i - 1);
            rest -= costs[i - 1] as usize;
        }
    }
    indices.reverse();
    let cost_cents = indices.iter().map(|&i| costs[i]).sum();
    Ok(KnapsackSelection {
        indices,
        value: table[n * width + cap],
        cost_cents,
    })
}

/// Knapsack over real costs, discretized to cents.
pub fn knapsack<T: Scalar>(values: &[T], costs: &[T], budget: T) -> Result<KnapsackSelection<T>> {
    let cents = costs
        .iter()
        .map(|&c| to_cents(c))
        .collect::<Result<Vec<_>>>()?;
    knapsack_cents(values, &cents, budget_to_cents(budget)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget<T> {
    /// Total cost of the full strategic plan.
    Auto,
    Units(T),
}

/// One plan entry executed on the live graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExecutedOp<T> {
    /// 1-based execution order.
    pub step: usize,
    /// Budget increment (1..=10) that paid for it.
    pub increment: usize,
    /// Index into the strategic plan.
    pub plan_index: usize,
    pub kind: OpKind,
    pub anchor: usize,
    pub attached: usize,
    pub removed: Option<Edge>,
    /// Anchors had to be recomputed on the live graph.
    pub reanchored: bool,
    /// LCC energy after execution.
    pub theta: T,
    /// Planned cost charged against the budget.
    pub cost: T,
    /// Weight of the link actually created.
    pub link_cost: T,
    pub robustness_index: T,
    pub density: T,
    pub n_lcc: usize,
    pub m_lcc: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetIncrement {
    /// 1..=10.
    pub index: usize,
    /// `index * 0.1 * B`, in cents.
    pub budget_cents: u64,
    /// Cumulative spend after this increment, in cents.
    pub spent_cents: u64,
    /// Positions in [`BudgetSchedule::executed`] added by this increment.
    pub executed: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetSchedule<T> {
    pub total_budget_cents: u64,
    /// Number of entries in the strategic plan.
    pub plan_len: usize,
    pub increments: Vec<BudgetIncrement>,
    pub executed: Vec<ExecutedOp<T>>,
}

impl<T: Scalar> BudgetSchedule<T> {
    /// LCC energies in execution order.
    pub fn energies(&self) -> Vec<T> {
        self.executed.iter().map(|op| op.theta).collect()
    }

    /// Table rows: budget then energies executed so far, newest first.
    pub fn rows(&self) -> Vec<(u64, Vec<T>)> {
        let mut done = 0;
        self.increments
            .iter()
            .map(|inc| {
                done += inc.executed.len();
                let energies = self.executed[..done]
                    .iter()
                    .rev()
                    .map(|op| op.theta)
                    .collect();
                (inc.budget_cents, energies)
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("budget");
        for c in 0..self.plan_len {
            let _ = write!(out, ",{c}");
        }
        out.push('\n');
        for (budget, energies) in self.rows() {
            out.push_str(&format_real(budget as f64 / 100.0));
            for c in 0..self.plan_len {
                out.push(',');
                if let Some(e) = energies.get(c) {
                    out.push_str(&format_real(e.as_f64()));
                }
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetOutcome<T> {
    pub graph: Graph<T>,
    pub schedule: BudgetSchedule<T>,
    /// Strategic plan the schedule draws from.
    pub plan: RewirePlan<T>,
}

/// Budget-constrained restoration of a copy of `g`.
///
/// `rng` drives the scratch strategic run first, then any tie-breaks needed
/// while re-anchoring on the live graph. With the same seed as a standalone
/// strategic run and a budget covering the whole plan, the final edge set is
/// identical to the strategic one.
pub fn budget_restore<T: Scalar, R: Rng + ?Sized>(
    g: &Graph<T>,
    trust: &TrustProfile<T>,
    budget: Budget<T>,
    opts: &RestoreOptions,
    rng: &mut R,
) -> Result<BudgetOutcome<T>> {
    if let Budget::Units(b) = budget {
        if b.is_nan() || b <= T::zero() {
            return Err(Error::config(format!("budget must be positive, got {b}")));
        }
    }
    let (_, plan) = strategic_restore(g, trust, opts, rng)?;
    let costs = plan
        .costs()
        .into_iter()
        .map(to_cents)
        .collect::<Result<Vec<_>>>()?;
    let values = plan.energies();
    let total_cents = match budget {
        Budget::Auto => costs.iter().sum(),
        Budget::Units(b) => budget_to_cents(b)?,
    };

    let mut live = g.clone();
    let mut done = vec![false; plan.len()];
    let mut schedule = BudgetSchedule {
        total_budget_cents: total_cents,
        plan_len: plan.len(),
        increments: Vec::new(),
        executed: Vec::new(),
    };
    let mut spent = 0u64;
    for k in 1..=INCREMENTS {
        let budget_cents = k * total_cents / INCREMENTS;
        let open: Vec<usize> = (0..plan.len()).filter(|&r| !done[r]).collect();
        let open_values: Vec<T> = open.iter().map(|&r| values[r]).collect();
        let open_costs: Vec<u64> = open.iter().map(|&r| costs[r]).collect();
        let pick = knapsack_cents(
            &open_values,
            &open_costs,
            budget_cents.saturating_sub(spent),
        )?;
        let mut pending: Vec<usize> = pick.indices.iter().map(|&slot| open[slot]).collect();
        let mut added = Vec::new();
        // Entries picked out of plan order may not be replayable yet; retry
        // them until nothing changes, then leave them for a later increment.
        loop {
            let mut progressed = false;
            let mut still = Vec::new();
            for r in pending {
                let step = schedule.executed.len() + 1;
                match replay(&mut live, &plan, r, trust, step, k as usize)? {
                    Some(op) => {
                        spent += costs[r];
                        done[r] = true;
                        added.push(schedule.executed.len());
                        schedule.executed.push(op);
                        progressed = true;
                    }
                    None => still.push(r),
                }
            }
            pending = still;
            if !progressed || pending.is_empty() {
                break;
            }
        }
        if k == INCREMENTS {
            for r in pending {
                let step = schedule.executed.len() + 1;
                let op = reanchor(&mut live, &plan, r, trust, opts, rng, step, k as usize)?;
                spent += costs[r];
                done[r] = true;
                added.push(schedule.executed.len());
                schedule.executed.push(op);
            }
        }
        schedule.increments.push(BudgetIncrement {
            index: k as usize,
            budget_cents,
            spent_cents: spent,
            executed: added,
        });
    }
    Ok(BudgetOutcome {
        graph: live,
        schedule,
        plan,
    })
}

/// Replays plan entry `r` verbatim if it still merges two components
/// without splitting any; `None` when it cannot run yet.
fn replay<T: Scalar>(
    live: &mut Graph<T>,
    plan: &RewirePlan<T>,
    r: usize,
    trust: &TrustProfile<T>,
    step: usize,
    increment: usize,
) -> Result<Option<ExecutedOp<T>>> {
    let entry = &plan.records[r];
    let partition = live.components();
    if partition.component_of(entry.anchor) == partition.component_of(entry.attached) {
        return Ok(None);
    }
    if let Some(e) = entry.removed {
        if !live.has_edge(e.u, e.v) || !live.survives_removal(e.u, e.v) {
            return Ok(None);
        }
        live.remove_edge(e.u, e.v);
    }
    let cost = trust.link_cost(entry.anchor, entry.attached)?;
    live.add_weighted_edge(entry.anchor, entry.attached, cost)?;
    executed(
        live,
        entry,
        r,
        entry.kind,
        entry.anchor,
        entry.attached,
        entry.removed,
        false,
        cost,
        step,
        increment,
    )
    .map(Some)
}

/// Runs plan entry `r` with anchors recomputed on the live graph.
#[allow(clippy::too_many_arguments)]
fn reanchor<T: Scalar, R: Rng + ?Sized>(
    live: &mut Graph<T>,
    plan: &RewirePlan<T>,
    r: usize,
    trust: &TrustProfile<T>,
    opts: &RestoreOptions,
    rng: &mut R,
    step: usize,
    increment: usize,
) -> Result<ExecutedOp<T>> {
    let entry = &plan.records[r];
    let partition = live.components();
    let target_comp = partition.component_of(entry.attached);
    if target_comp == 0 {
        return Err(Error::domain(format!(
            "plan entry {} targets node {} already inside the LCC",
            entry.step, entry.attached
        )));
    }
    let target = max_degree_node(live, partition.get(target_comp)).expect("non-empty component");
    let anchor = max_degree_node(live, partition.lcc()).expect("non-empty LCC");
    log::info!(
        "plan entry {} re-anchored to ({anchor}, {target}) on the live graph",
        entry.step
    );
    let cost = trust.link_cost(anchor, target)?;
    let (kind, removed) = link(
        live,
        anchor,
        target,
        entry.kind == OpKind::Rewire,
        cost,
        opts.tie_break,
        rng,
    )?;
    executed(
        live, entry, r, kind, anchor, target, removed, true, cost, step, increment,
    )
}

#[allow(clippy::too_many_arguments)]
fn executed<T: Scalar>(
    live: &Graph<T>,
    entry: &RewireRecord<T>,
    r: usize,
    kind: OpKind,
    anchor: usize,
    attached: usize,
    removed: Option<Edge>,
    reanchored: bool,
    link_cost: T,
    step: usize,
    increment: usize,
) -> Result<ExecutedOp<T>> {
    let rec = record_step(live, step, kind, anchor, attached, removed, link_cost)?;
    Ok(ExecutedOp {
        step,
        increment,
        plan_index: r,
        kind,
        anchor,
        attached,
        removed,
        reanchored,
        theta: rec.theta,
        cost: entry.cost,
        link_cost,
        robustness_index: rec.robustness_index,
        density: rec.density,
        n_lcc: rec.n_lcc,
        m_lcc: rec.m_lcc,
    })
}
