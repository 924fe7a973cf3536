//! Progressive edge-removal attacks.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::metrics::{component_energy, robustness_from_partition};
use crate::report::format_real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackMode {
    /// Uniformly random surviving edge.
    Random,
    /// Edge with the largest endpoint degree sum.
    Targeted,
}

impl std::str::FromStr for AttackMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(AttackMode::Random),
            "targeted" => Ok(AttackMode::Targeted),
            other => Err(Error::config(format!("unknown attack mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AttackSpec {
    pub mode: AttackMode,
    /// Stop once the graph has at least this many components.
    pub target_components: usize,
    pub seed: u64,
    pub max_removals: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackStep {
    pub step: usize,
    pub edge: Edge,
    pub components: usize,
    /// Laplacian energy of the LCC after the removal.
    pub laplacian_energy: f64,
    pub robustness_index: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AttackTrace {
    pub steps: Vec<AttackStep>,
}

impl AttackTrace {
    pub fn removed_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.steps.iter().map(|s| s.edge)
    }

    /// Applies the recorded removals to a copy of `original`.
    pub fn replay<W: Copy>(&self, original: &Graph<W>) -> Result<Graph<W>> {
        let mut g = original.clone();
        for e in self.removed_edges() {
            if !g.remove_edge(e.u, e.v) {
                return Err(Error::domain(format!("trace removes absent edge {e}")));
            }
        }
        Ok(g)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,u,v,components,L_E,S\n");
        for s in &self.steps {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                s.step,
                s.edge.u,
                s.edge.v,
                s.components,
                format_real(s.laplacian_energy),
                format_real(s.robustness_index)
            );
        }
        out
    }
}

/// Edge maximizing `deg(u) + deg(v)`; ties go to the lexicographically
/// smallest pair.
pub fn targeted_victim<W: Copy>(g: &Graph<W>) -> Result<Edge> {
    let mut best: Option<(usize, Edge)> = None;
    for e in g.edges() {
        let score = g.degree(e.u) + g.degree(e.v);
        if best.is_none_or(|(s, _)| score > s) {
            best = Some((score, e));
        }
    }
    best.map(|(_, e)| e)
        .ok_or_else(|| Error::domain("no edge left to attack"))
}

/// Removes edges until the graph has at least `spec.target_components`
/// components. The input is left untouched.
pub fn fragment<W: Copy>(g: &Graph<W>, spec: &AttackSpec) -> Result<(Graph<W>, AttackTrace)> {
    let n = g.node_count();
    let q = spec.target_components;
    if q < 2 || q > n {
        return Err(Error::config(format!(
            "target of {q} components invalid for {n} nodes"
        )));
    }
    let initial = g.components().len();
    if initial >= q {
        return Err(Error::domain(format!(
            "graph already has {initial} components, target is {q}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut work = g.clone();
    let mut pool: Vec<Edge> = g.edges().collect();
    let mut trace = AttackTrace::default();
    let mut components = initial;

    while components < q {
        let cap_hit = spec
            .max_removals
            .is_some_and(|cap| trace.steps.len() >= cap);
        if cap_hit || work.edge_count() == 0 {
            return Err(Error::AttackFailed {
                target: q,
                reached: components,
                trace: Box::new(trace),
            });
        }
        let victim = match spec.mode {
            AttackMode::Random => pool.swap_remove(rng.gen_range(0..pool.len())),
            AttackMode::Targeted => targeted_victim(&work)?,
        };
        work.remove_edge(victim.u, victim.v);

        let partition = work.components();
        components = partition.len();
        trace.steps.push(AttackStep {
            step: trace.steps.len() + 1,
            edge: victim,
            components,
            laplacian_energy: component_energy(&work, partition.lcc())?,
            robustness_index: robustness_from_partition(n, &partition)?,
        });
    }
    Ok((work, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, edges.iter().copied()).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let pairs: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        graph(n, &pairs)
    }

    fn spec(mode: AttackMode, q: usize) -> AttackSpec {
        AttackSpec {
            mode,
            target_components: q,
            seed: 3,
            max_removals: None,
        }
    }

    #[test]
    fn path_splits_after_one_removal() {
        let p3 = graph(3, &[(0, 1), (1, 2)]);
        for mode in [AttackMode::Random, AttackMode::Targeted] {
            let (g, trace) = fragment(&p3, &spec(mode, 2)).unwrap();
            assert_eq!(trace.steps.len(), 1);
            assert_eq!(g.edge_count(), 1);
            assert_eq!(p3.edge_count(), 2);
        }
    }

    #[test]
    fn complete_graph_robustness_drops_with_first_split() {
        let (_, trace) = fragment(&complete(4), &spec(AttackMode::Random, 2)).unwrap();
        let last = trace.steps.last().unwrap();
        assert_eq!(last.components, 2);
        for s in &trace.steps[..trace.steps.len() - 1] {
            assert_eq!(s.components, 1);
            assert_eq!(s.robustness_index, 1.0);
        }
        assert!(last.robustness_index < 1.0);
    }

    #[test]
    fn victim_choice_by_degree_sum() {
        let star = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(targeted_victim(&star).unwrap(), Edge::new(0, 1));
        let p3 = graph(3, &[(0, 1), (1, 2)]);
        assert!(targeted_victim(&p3).unwrap().contains(1));
        let mut k5 = complete(5);
        k5.remove_edge(0, 1);
        let e = targeted_victim(&k5).unwrap();
        assert_eq!(e, Edge::new(2, 3));
        assert!(targeted_victim(&graph(3, &[])).is_err());
    }

    #[test]
    fn cap_reports_partial_trace() {
        let s = AttackSpec {
            max_removals: Some(2),
            ..spec(AttackMode::Random, 4)
        };
        match fragment(&complete(6), &s) {
            Err(Error::AttackFailed {
                target,
                reached,
                trace,
            }) => {
                assert_eq!(target, 4);
                assert_eq!(reached, 1);
                assert_eq!(trace.steps.len(), 2);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn precondition_and_target_validation() {
        let g = graph(4, &[(0, 1), (2, 3)]);
        assert!(matches!(
            fragment(&g, &spec(AttackMode::Random, 2)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            fragment(&g, &spec(AttackMode::Random, 5)),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            fragment(&g, &spec(AttackMode::Random, 1)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn replay_reproduces_fragmented_graph() {
        let g = complete(8);
        let (frag, trace) = fragment(&g, &spec(AttackMode::Random, 3)).unwrap();
        assert_eq!(trace.replay(&g).unwrap(), frag);
        let again = fragment(&g, &spec(AttackMode::Random, 3)).unwrap();
        assert_eq!(again.1, trace);
    }

    #[test]
    fn trace_csv_header() {
        let (_, trace) =
            fragment(&graph(3, &[(0, 1), (1, 2)]), &spec(AttackMode::Targeted, 2)).unwrap();
        let csv = trace.to_csv();
        assert!(csv.starts_with("step,u,v,components,L_E,S\n1,0,1,2,"));
    }
}
