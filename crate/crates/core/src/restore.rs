//! Strategic restoration of a fragmented graph.
//!
//! Each step joins the largest disconnected component to the LCC through
//! the LCC's maximum-degree node `i` and the component's maximum-degree node
//! `l`. While the LCC holds more edges than the threshold allows, the new
//! link is paid for by detaching an existing edge `(i, j)`; otherwise the
//! link is simply added.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ComponentPartition, Edge, Graph};
use crate::metrics::MetricsSnapshot;
use crate::report::format_real;
use crate::scalar::Scalar;
use crate::trust::TrustProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Rewire,
    Add,
}

impl OpKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OpKind::Rewire => "rewire",
            OpKind::Add => "add",
        }
    }
}

/// When the LCC has enough edges to rewire instead of add.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Threshold {
    /// Rewire while `m_LCC > n_total`.
    #[default]
    TotalNodes,
    /// Rewire while `m_LCC > n_total - 1`.
    TotalNodesMinusOne,
    /// Always try to rewire. Used to compare single rewiring moves.
    AlwaysRewire,
}

impl Threshold {
    pub fn allows_rewire(self, m_lcc: usize, n_total: usize) -> bool {
        match self {
            Threshold::TotalNodes => m_lcc > n_total,
            Threshold::TotalNodesMinusOne => m_lcc + 1 > n_total,
            Threshold::AlwaysRewire => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Equal-degree candidates are ordered by the run's RNG.
    #[default]
    Seeded,
    /// Smallest id wins.
    Deterministic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RestoreOptions {
    pub threshold: Threshold,
    pub tie_break: TieBreak,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewireRecord<T> {
    /// 1-based step.
    pub step: usize,
    pub kind: OpKind,
    /// LCC node the new link starts from.
    pub anchor: usize,
    /// Node of the joined component.
    pub attached: usize,
    /// Detached edge, present only for rewires.
    pub removed: Option<Edge>,
    /// Laplacian energy of the LCC after the step.
    pub theta: T,
    /// Weight of the created link.
    pub cost: T,
    pub robustness_index: T,
    pub density: T,
    pub n_lcc: usize,
    pub m_lcc: usize,
}

/// Ordered log of restoration steps.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RewirePlan<T> {
    pub records: Vec<RewireRecord<T>>,
}

impl<T: Scalar> RewirePlan<T> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn energies(&self) -> Vec<T> {
        self.records.iter().map(|r| r.theta).collect()
    }

    pub fn costs(&self) -> Vec<T> {
        self.records.iter().map(|r| r.cost).collect()
    }

    pub fn anchors(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.anchor).collect()
    }

    pub fn attached(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.attached).collect()
    }

    pub fn total_cost(&self) -> T {
        self.records.iter().fold(T::zero(), |acc, r| acc + r.cost)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,kind,i,j,removed_u,removed_v,theta,cost,S,rho,n_lcc,m_lcc\n");
        for r in &self.records {
            let (ru, rv) = r.removed.map_or((String::new(), String::new()), |e| {
                (e.u.to_string(), e.v.to_string())
            });
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                r.step,
                r.kind.as_str(),
                r.anchor,
                r.attached,
                ru,
                rv,
                format_real(r.theta.as_f64()),
                format_real(r.cost.as_f64()),
                format_real(r.robustness_index.as_f64()),
                format_real(r.density.as_f64()),
                r.n_lcc,
                r.m_lcc
            );
        }
        out
    }
}

/// Maximum-degree node of `nodes`, smallest id on ties.
pub fn max_degree_node<W: Copy>(g: &Graph<W>, nodes: &[usize]) -> Option<usize> {
    nodes
        .iter()
        .copied()
        .min_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)))
}

pub fn pick_lcc_anchor<W: Copy>(g: &Graph<W>, lcc: &[usize]) -> Result<usize> {
    max_degree_node(g, lcc).ok_or_else(|| Error::domain("empty LCC"))
}

/// Largest component other than the LCC and its maximum-degree node.
/// Returns the component index within `partition`.
pub fn pick_component_anchor<W: Copy>(
    g: &Graph<W>,
    partition: &ComponentPartition,
) -> Result<(usize, usize)> {
    if partition.len() < 2 {
        return Err(Error::domain("no component outside the LCC"));
    }
    // partition order already puts the largest, lowest-id component first
    let node = max_degree_node(g, partition.get(1)).expect("components are non-empty");
    Ok((1, node))
}

/// Neighbor `j` of `anchor` whose edge can be detached without splitting
/// `j` off: degree at least 2, scanned in descending degree order, and the
/// edge must not be a bridge.
pub fn select_detach<W: Copy, R: Rng + ?Sized>(
    g: &Graph<W>,
    anchor: usize,
    tie_break: TieBreak,
    rng: &mut R,
) -> Option<usize> {
    let mut candidates: Vec<usize> = g.neighbors(anchor).filter(|&j| g.degree(j) >= 2).collect();
    if tie_break == TieBreak::Seeded {
        candidates.shuffle(rng);
    }
    // stable sort keeps the shuffled (or ascending) order within a degree class
    candidates.sort_by_key(|&x| std::cmp::Reverse(g.degree(x)));
    candidates
        .into_iter()
        .find(|&j| g.survives_removal(anchor, j))
}

/// Links `target` to `anchor`, detaching a safe edge `(anchor, j)` first when
/// `rewire` is requested and such an edge exists.
pub(crate) fn link<T: Scalar, R: Rng + ?Sized>(
    g: &mut Graph<T>,
    anchor: usize,
    target: usize,
    rewire: bool,
    cost: T,
    tie_break: TieBreak,
    rng: &mut R,
) -> Result<(OpKind, Option<Edge>)> {
    let detached = if rewire {
        let j = select_detach(g, anchor, tie_break, rng);
        if j.is_none() {
            log::debug!("node {anchor} has no detachable neighbor, adding instead");
        }
        j
    } else {
        None
    };
    if let Some(j) = detached {
        g.remove_edge(anchor, j);
    }
    if !g.add_weighted_edge(anchor, target, cost)? {
        return Err(Error::domain(format!(
            "edge ({anchor}, {target}) already present"
        )));
    }
    Ok(match detached {
        Some(j) => (OpKind::Rewire, Some(Edge::new(anchor, j))),
        None => (OpKind::Add, None),
    })
}

pub(crate) fn record_step<T: Scalar>(
    g: &Graph<T>,
    step: usize,
    kind: OpKind,
    anchor: usize,
    attached: usize,
    removed: Option<Edge>,
    cost: T,
) -> Result<RewireRecord<T>> {
    let snap = MetricsSnapshot::<T>::of(g)?;
    Ok(RewireRecord {
        step,
        kind,
        anchor,
        attached,
        removed,
        theta: snap.laplacian_energy,
        cost,
        robustness_index: snap.robustness_index,
        density: snap.density,
        n_lcc: snap.n_lcc,
        m_lcc: snap.m_lcc,
    })
}

/// One strategic step on `g`. Returns `None` once the graph is connected.
pub fn strategic_step<T: Scalar, R: Rng + ?Sized>(
    g: &mut Graph<T>,
    trust: &TrustProfile<T>,
    opts: &RestoreOptions,
    rng: &mut R,
    step: usize,
) -> Result<Option<RewireRecord<T>>> {
    let partition = g.components();
    if partition.len() < 2 {
        return Ok(None);
    }
    let lcc = partition.lcc();
    let anchor = pick_lcc_anchor(g, lcc)?;
    let (_, target) = pick_component_anchor(g, &partition)?;
    let m_lcc = lcc.iter().map(|&x| g.degree(x)).sum::<usize>() / 2;
    let rewire = opts.threshold.allows_rewire(m_lcc, g.node_count());
    let cost = trust.link_cost(anchor, target)?;
    let (kind, removed) = link(g, anchor, target, rewire, cost, opts.tie_break, rng)?;
    record_step(g, step, kind, anchor, target, removed, cost).map(Some)
}

/// Restores connectivity of a copy of `g`, returning the restored graph and
/// the plan of operations.
pub fn strategic_restore<T: Scalar, R: Rng + ?Sized>(
    g: &Graph<T>,
    trust: &TrustProfile<T>,
    opts: &RestoreOptions,
    rng: &mut R,
) -> Result<(Graph<T>, RewirePlan<T>)> {
    if trust.len() < g.node_count() {
        return Err(Error::UndefinedTrust { node: trust.len() });
    }
    let mut work = g.clone();
    let mut plan = RewirePlan::default();
    while let Some(record) = strategic_step(&mut work, trust, opts, rng, plan.len() + 1)? {
        plan.records.push(record);
    }
    Ok((work, plan))
}

/// Result of one random rewiring move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomRewire {
    pub removed: Edge,
    pub added: Edge,
}

/// Baseline move: detach one end of a uniformly random LCC edge and attach
/// the kept end to a random node of a random other component. Bridges are
/// not protected. Returns `None` if the graph is connected or the LCC has no
/// edge.
pub fn random_rewire<W: Copy, R: Rng + ?Sized>(
    g: &mut Graph<W>,
    rng: &mut R,
) -> Result<Option<RandomRewire>> {
    let partition = g.components();
    if partition.len() < 2 {
        return Ok(None);
    }
    let lcc_edges: Vec<Edge> = g
        .edges()
        .filter(|e| partition.component_of(e.u) == 0)
        .collect();
    let Some(&edge) = lcc_edges.choose(rng) else {
        return Ok(None);
    };
    let (keep, drop) = if rng.gen_bool(0.5) {
        (edge.u, edge.v)
    } else {
        (edge.v, edge.u)
    };
    let comp = rng.gen_range(1..partition.len());
    let target = *partition
        .get(comp)
        .choose(rng)
        .expect("components are non-empty");
    g.remove_edge(keep, drop);
    g.add_edge(keep, target)?;
    Ok(Some(RandomRewire {
        removed: edge,
        added: Edge::new(keep, target),
    }))
}
