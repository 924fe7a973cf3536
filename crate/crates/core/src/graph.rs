//! Undirected simple graph with dense node ids and optional edge weights.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Unordered node pair, stored with `u < v`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
}

impl Edge {
    /// Canonicalizes the pair. Self-loops are rejected by the graph, not here.
    pub fn new(a: usize, b: usize) -> Self {
        if a <= b {
            Edge { u: a, v: b }
        } else {
            Edge { u: b, v: a }
        }
    }

    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn contains(&self, x: usize) -> bool {
        self.u == x || self.v == x
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

/// Undirected simple graph on nodes `0..n`.
///
/// Weights are cost metadata: they never enter the Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph<W = f64> {
    adj: Vec<BTreeSet<usize>>,
    weights: BTreeMap<Edge, W>,
    edge_count: usize,
}

impl<W: Copy> Graph<W> {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![BTreeSet::new(); n],
            weights: BTreeMap::new(),
            edge_count: 0,
        }
    }

    /// Builds a graph from node pairs. Duplicate pairs collapse; self-loops and
    /// out-of-range endpoints are errors.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::new(n);
        for (a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        let n = self.node_count();
        if a >= n || b >= n {
            return Err(Error::domain(format!(
                "edge ({a}, {b}) has an endpoint outside 0..{n}"
            )));
        }
        if a == b {
            return Err(Error::domain(format!("self-loop on node {a}")));
        }
        Ok(())
    }

    /// Inserts `{a, b}`. Returns `false` when the edge was already present.
    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<bool> {
        self.check_pair(a, b)?;
        if !self.adj[a].insert(b) {
            return Ok(false);
        }
        self.adj[b].insert(a);
        self.edge_count += 1;
        Ok(true)
    }

    pub fn add_weighted_edge(&mut self, a: usize, b: usize, w: W) -> Result<bool> {
        let inserted = self.add_edge(a, b)?;
        self.weights.insert(Edge::new(a, b), w);
        Ok(inserted)
    }

    /// Removes `{a, b}` and its weight. Returns `false` if it was absent.
    pub fn remove_edge(&mut self, a: usize, b: usize) -> bool {
        if a >= self.node_count() || b >= self.node_count() || !self.adj[a].remove(&b) {
            return false;
        }
        self.adj[b].remove(&a);
        self.weights.remove(&Edge::new(a, b));
        self.edge_count -= 1;
        true
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.node_count() && self.adj[a].contains(&b)
    }

    pub fn degree(&self, x: usize) -> usize {
        self.adj[x].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(BTreeSet::len).collect()
    }

    /// Neighbors of `x` in ascending id order.
    pub fn neighbors(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[x].iter().copied()
    }

    /// All edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.range(u + 1..).map(move |&v| Edge { u, v }))
    }

    pub fn set_weight(&mut self, a: usize, b: usize, w: W) -> Result<()> {
        if !self.has_edge(a, b) {
            return Err(Error::domain(format!("no edge ({a}, {b}) to weigh")));
        }
        self.weights.insert(Edge::new(a, b), w);
        Ok(())
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<W> {
        self.weights.get(&Edge::new(a, b)).copied()
    }

    /// Copy of the structure with every weight dropped.
    pub fn unweighted(&self) -> Self {
        Graph {
            adj: self.adj.clone(),
            weights: BTreeMap::new(),
            edge_count: self.edge_count,
        }
    }

    /// Subgraph induced by `nodes`, relabelled `0..nodes.len()` in the given order.
    /// The returned vector maps new ids back to the original ones.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> (Self, Vec<usize>) {
        let mut index = vec![usize::MAX; self.node_count()];
        for (new, &old) in nodes.iter().enumerate() {
            index[old] = new;
        }
        let mut sub = Graph::new(nodes.len());
        for (new_u, &old_u) in nodes.iter().enumerate() {
            for old_v in self.neighbors(old_u) {
                let new_v = index[old_v];
                if new_v != usize::MAX && new_u < new_v {
                    sub.adj[new_u].insert(new_v);
                    sub.adj[new_v].insert(new_u);
                    sub.edge_count += 1;
                    if let Some(w) = self.weight(old_u, old_v) {
                        sub.weights.insert(Edge::new(new_u, new_v), w);
                    }
                }
            }
        }
        (sub, nodes.to_vec())
    }

    /// Nodes reachable from `start`, in BFS order.
    pub fn reachable_from(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.node_count()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for y in self.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        order
    }

    /// True when `a` and `b` stay connected after deleting the edge `{a, b}`,
    /// i.e. the edge is not a bridge. Absent edges count as not removable.
    pub fn survives_removal(&self, a: usize, b: usize) -> bool {
        if !self.has_edge(a, b) {
            return false;
        }
        let mut seen = vec![false; self.node_count()];
        let mut queue = VecDeque::from([b]);
        seen[b] = true;
        while let Some(x) = queue.pop_front() {
            for y in self.neighbors(x) {
                if x == b && y == a {
                    continue;
                }
                if y == a {
                    return true;
                }
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        false
    }

    pub fn components(&self) -> ComponentPartition {
        ComponentPartition::of(self)
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() <= 1 || self.reachable_from(0).len() == self.node_count()
    }
}

/// Connected components, largest first.
///
/// Ties in size are ordered by the smallest node id they contain; node lists
/// are ascending. Index 0 is the largest connected component (LCC).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentPartition {
    components: Vec<Vec<usize>>,
    membership: Vec<usize>,
}

impl ComponentPartition {
    fn of<W: Copy>(g: &Graph<W>) -> Self {
        let n = g.node_count();
        let mut label = vec![usize::MAX; n];
        let mut comps: Vec<Vec<usize>> = Vec::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = Vec::new();
            let mut queue = VecDeque::from([start]);
            label[start] = id;
            while let Some(x) = queue.pop_front() {
                members.push(x);
                for y in g.neighbors(x) {
                    if label[y] == usize::MAX {
                        label[y] = id;
                        queue.push_back(y);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        // discovery order is by smallest member, so a stable sort keeps the tie rule
        let mut order: Vec<usize> = (0..comps.len()).collect();
        order.sort_by(|&a, &b| comps[b].len().cmp(&comps[a].len()));
        let mut rank = vec![0; comps.len()];
        for (r, &c) in order.iter().enumerate() {
            rank[c] = r;
        }
        let membership = label.into_iter().map(|c| rank[c]).collect();
        let mut slots: Vec<Option<Vec<usize>>> = comps.into_iter().map(Some).collect();
        let components = order
            .into_iter()
            .map(|c| slots[c].take().expect("each component taken once"))
            .collect();
        ComponentPartition {
            components,
            membership,
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Largest connected component. Empty for the empty graph.
    pub fn lcc(&self) -> &[usize] {
        self.components.first().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn get(&self, idx: usize) -> &[usize] {
        &self.components[idx]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.components.iter().map(Vec::as_slice)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }

    /// Index of the component holding `node`.
    pub fn component_of(&self, node: usize) -> usize {
        self.membership[node]
    }
}
