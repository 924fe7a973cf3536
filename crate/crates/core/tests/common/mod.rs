#![allow(dead_code)]

use netmend::graph::Graph;
use netmend::Rational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// G(n, p) built without the library generator.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

pub fn cycle(n: usize) -> Graph<f64> {
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
}

pub fn complete(n: usize) -> Graph<f64> {
    Graph::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).unwrap()
}

/// Random simple d-regular graph by pairing stubs and retrying on clashes.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Graph<f64> {
    assert!((n * d).is_multiple_of(2) && d < n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: loop {
        let mut stubs: Vec<usize> = (0..n).flat_map(|x| std::iter::repeat_n(x, d)).collect();
        stubs.shuffle(&mut rng);
        let mut g = Graph::new(n);
        for pair in stubs.chunks(2) {
            if pair[0] == pair[1] || g.has_edge(pair[0], pair[1]) {
                continue 'attempt;
            }
            g.add_edge(pair[0], pair[1]).unwrap();
        }
        return g;
    }
}

/// Exact energy from the Laplacian matrix: `tr(L^2)/n - (tr(L)/n)^2`.
pub fn trace_energy(g: &Graph<f64>) -> Rational {
    let n = g.node_count();
    let mut lap = vec![vec![0i128; n]; n];
    for e in g.edges() {
        lap[e.u][e.v] = -1;
        lap[e.v][e.u] = -1;
        lap[e.u][e.u] += 1;
        lap[e.v][e.v] += 1;
    }
    let tr: i128 = (0..n).map(|i| lap[i][i]).sum();
    let tr_sq: i128 = lap.iter().flatten().map(|x| x * x).sum();
    let n = n as i128;
    Rational::new(tr_sq, n) - Rational::new(tr * tr, n * n)
}

/// Component labels by union-find.
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut x = x;
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    pub fn of(g: &Graph<f64>) -> Self {
        let mut uf = UnionFind::new(g.node_count());
        for e in g.edges() {
            uf.union(e.u, e.v);
        }
        uf
    }

    pub fn count(&mut self) -> usize {
        (0..self.parent.len())
            .filter(|&x| self.find(x) == x)
            .count()
    }
}

/// Best subset by exhaustive enumeration: (value, cost) of the optimum.
pub fn brute_force_knapsack(values: &[f64], costs: &[u64], budget: u64) -> f64 {
    let n = values.len();
    let mut best = 0.0f64;
    for mask in 0u32..(1 << n) {
        let (mut v, mut c) = (0.0, 0u64);
        for i in 0..n {
            if mask & (1 << i) != 0 {
                v += values[i];
                c += costs[i];
            }
        }
        if c <= budget && v > best {
            best = v;
        }
    }
    best
}

/// Greedy by value/cost ratio.
pub fn greedy_knapsack(values: &[f64], costs: &[u64], budget: u64) -> f64 {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        (values[b] / costs[b] as f64)
            .partial_cmp(&(values[a] / costs[a] as f64))
            .unwrap()
    });
    let (mut v, mut c) = (0.0, 0u64);
    for i in order {
        if c + costs[i] <= budget {
            c += costs[i];
            v += values[i];
        }
    }
    v
}

/// Log-likelihood of `phi` given `s` successes and `f` failures.
pub fn log_likelihood(phi: f64, s: u64, f: u64) -> f64 {
    let term = |k: u64, p: f64| if k == 0 { 0.0 } else { k as f64 * p.ln() };
    term(s, phi) + term(f, 1.0 - phi)
}

/// Grid argmax of the likelihood over `points` evenly spaced values in [0, 1].
pub fn grid_mle(s: u64, f: u64, points: usize) -> f64 {
    let step = 1.0 / (points - 1) as f64;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..points {
        let phi = i as f64 * step;
        let ll = log_likelihood(phi, s, f);
        if ll > best.0 {
            best = (ll, phi);
        }
    }
    best.1
}
