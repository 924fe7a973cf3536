//! Node trust from transaction tallies and trust-based edge weights.
//!
//! Each node's trust `phi` is the maximum-likelihood success probability of
//! its transactions: the log-likelihood `psi ln(phi) + eta ln(1 - phi)` is
//! stationary at `phi = psi / (psi + eta)`. Edge weights combine the trust
//! product with a cosine similarity of the two trust values:
//!
//! ```text
//! gamma(phi_i, phi_j) = (cos|phi_i - phi_j| + 1) / 2 * phi_i * phi_j
//! w_ij = gamma + a_ij
//! ```

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::scalar::Scalar;

/// Trust assigned to nodes without any recorded transaction.
pub const DEFAULT_TRUST: f64 = 0.5;

/// Closed-form MLE of the success probability.
pub fn trust_mle<T: Scalar>(successes: u64, failures: u64) -> Result<T> {
    let total = successes
        .checked_add(failures)
        .ok_or_else(|| Error::domain("transaction tally overflow"))?;
    if total == 0 {
        return Err(Error::domain("trust undefined without transactions"));
    }
    let s = T::from_u64(successes).ok_or_else(|| Error::Numeric("tally overflow".into()))?;
    let t = T::from_u64(total).ok_or_else(|| Error::Numeric("tally overflow".into()))?;
    Ok(s / t)
}

fn check_unit<T: Scalar>(name: &str, x: T) -> Result<()> {
    if x >= T::zero() && x <= T::one() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {x} outside [0, 1]")))
    }
}

/// Trust similarity term; lies in `[0, 1]` and is symmetric.
pub fn gamma<T: Scalar>(phi_i: T, phi_j: T) -> Result<T> {
    check_unit("phi_i", phi_i)?;
    check_unit("phi_j", phi_j)?;
    let two = T::lit(2.0);
    let delta = (phi_i - phi_j).abs();
    Ok((delta.cos() + T::one()) / two * (phi_i * phi_j))
}

/// `w = gamma(phi_i, phi_j) + a`, with `a` the adjacency indicator.
pub fn edge_weight<T: Scalar>(phi_i: T, phi_j: T, adjacent: bool) -> Result<T> {
    let a = if adjacent { T::one() } else { T::zero() };
    Ok(gamma(phi_i, phi_j)? + a)
}

/// Symmetric success/failure counts, nonzero only on edges.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TransactionMatrices {
    n: usize,
    tallies: BTreeMap<Edge, (u64, u64)>,
}

impl TransactionMatrices {
    pub fn new(n: usize) -> Self {
        TransactionMatrices {
            n,
            tallies: BTreeMap::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Sets `s_ij = s_ji = successes` and `f_ij = f_ji = failures`.
    pub fn set(&mut self, i: usize, j: usize, successes: u64, failures: u64) -> Result<()> {
        if i >= self.n || j >= self.n || i == j {
            return Err(Error::domain(format!(
                "transaction pair ({i}, {j}) invalid for {} nodes",
                self.n
            )));
        }
        self.tallies.insert(Edge::new(i, j), (successes, failures));
        Ok(())
    }

    pub fn successes(&self, i: usize, j: usize) -> u64 {
        self.tallies.get(&Edge::new(i, j)).map_or(0, |t| t.0)
    }

    pub fn failures(&self, i: usize, j: usize) -> u64 {
        self.tallies.get(&Edge::new(i, j)).map_or(0, |t| t.1)
    }

    /// Nonzero pairs in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (Edge, u64, u64)> + '_ {
        self.tallies.iter().map(|(&e, &(s, f))| (e, s, f))
    }

    /// Checks that every recorded pair is an edge of `g`.
    pub fn check_support<W: Copy>(&self, g: &Graph<W>) -> Result<()> {
        if g.node_count() != self.n {
            return Err(Error::config(format!(
                "transactions cover {} nodes, graph has {}",
                self.n,
                g.node_count()
            )));
        }
        match self.tallies.keys().find(|e| !g.has_edge(e.u, e.v)) {
            Some(e) => Err(Error::config(format!(
                "transactions recorded on non-edge {e}"
            ))),
            None => Ok(()),
        }
    }
}

/// Draws `T_ij`, `U_ij` uniformly from `lo..=hi` for every edge, redrawing
/// pairs that sum to zero.
pub fn generate_transactions<W: Copy>(
    g: &Graph<W>,
    seed: u64,
    lo: u64,
    hi: u64,
) -> Result<TransactionMatrices> {
    if hi < lo || hi == 0 {
        return Err(Error::config(format!(
            "invalid transaction range [{lo}, {hi}]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tm = TransactionMatrices::new(g.node_count());
    for e in g.edges() {
        let (s, f) = loop {
            let s = rng.gen_range(lo..=hi);
            let f = rng.gen_range(lo..=hi);
            if s + f > 0 {
                break (s, f);
            }
        };
        tm.tallies.insert(e, (s, f));
    }
    Ok(tm)
}

/// Per-node tallies `psi`, `eta` and trust `phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustProfile<T> {
    successes: Vec<u64>,
    failures: Vec<u64>,
    trust: Vec<T>,
}

impl<T: Scalar> TrustProfile<T> {
    pub fn from_transactions(tm: &TransactionMatrices) -> Result<Self> {
        let mut successes = vec![0u64; tm.n];
        let mut failures = vec![0u64; tm.n];
        for (e, s, f) in tm.iter() {
            for x in [e.u, e.v] {
                successes[x] += s;
                failures[x] += f;
            }
        }
        let trust = successes
            .iter()
            .zip(&failures)
            .map(|(&s, &f)| {
                if s + f == 0 {
                    Ok(T::lit(DEFAULT_TRUST))
                } else {
                    trust_mle(s, f)
                }
            })
            .collect::<Result<Vec<T>>>()?;
        Ok(TrustProfile {
            successes,
            failures,
            trust,
        })
    }

    /// Every node gets the same trust and no tallies.
    pub fn uniform(n: usize, phi: T) -> Result<Self> {
        check_unit("phi", phi)?;
        Ok(TrustProfile {
            successes: vec![0; n],
            failures: vec![0; n],
            trust: vec![phi; n],
        })
    }

    /// Explicit trust values, e.g. loaded from elsewhere.
    pub fn from_values(values: Vec<T>) -> Result<Self> {
        for &phi in &values {
            check_unit("phi", phi)?;
        }
        let n = values.len();
        Ok(TrustProfile {
            successes: vec![0; n],
            failures: vec![0; n],
            trust: values,
        })
    }

    pub fn len(&self) -> usize {
        self.trust.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trust.is_empty()
    }

    pub fn successes(&self, i: usize) -> u64 {
        self.successes[i]
    }

    pub fn failures(&self, i: usize) -> u64 {
        self.failures[i]
    }

    pub fn trust(&self, i: usize) -> Result<T> {
        self.trust
            .get(i)
            .copied()
            .ok_or(Error::UndefinedTrust { node: i })
    }

    /// Cost of creating edge `{i, l}`: its weight once the edge exists.
    pub fn link_cost(&self, i: usize, l: usize) -> Result<T> {
        edge_weight(self.trust(i)?, self.trust(l)?, true)
    }
}

/// Copy of `g` where every edge carries `gamma(phi_i, phi_j) + 1`.
pub fn weigh_graph<T: Scalar>(g: &Graph<T>, profile: &TrustProfile<T>) -> Result<Graph<T>> {
    if profile.len() < g.node_count() {
        return Err(Error::UndefinedTrust {
            node: profile.len(),
        });
    }
    let mut out = g.clone();
    for e in g.edges() {
        out.set_weight(e.u, e.v, profile.link_cost(e.u, e.v)?)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mle_closed_form() {
        assert_eq!(trust_mle::<f64>(3, 1).unwrap(), 0.75);
        assert_eq!(trust_mle::<f64>(7, 3).unwrap(), 0.7);
        assert_eq!(trust_mle::<f32>(5, 0).unwrap(), 1.0);
        assert_eq!(trust_mle::<f64>(0, 4).unwrap(), 0.0);
        assert!(trust_mle::<f64>(0, 0).is_err());
    }

    #[test]
    fn weights_for_equal_trust() {
        let low: f64 = edge_weight(0.1, 0.1, true).unwrap();
        assert!((low - 1.01).abs() < 1e-12);
        let high: f64 = edge_weight(0.99, 0.99, true).unwrap();
        assert!((high - 1.9801).abs() < 1e-12);
    }

    #[test]
    fn weight_with_trust_gap() {
        let w: f64 = edge_weight(0.8, 0.5, false).unwrap();
        let expected = (0.3f64.cos() + 1.0) / 2.0 * 0.4;
        assert!((w - expected).abs() < 1e-15);
        assert!((w - 0.391067).abs() < 1e-6);
    }

    #[test]
    fn weight_rejects_out_of_range_trust() {
        assert!(edge_weight(1.2f64, 0.5, true).is_err());
        assert!(edge_weight(0.5f64, -0.1, true).is_err());
        assert!(gamma(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn generated_transactions_are_reproducible() {
        let k3: Graph = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let a = generate_transactions(&k3, 11, 1, 10).unwrap();
        let b = generate_transactions(&k3, 11, 1, 10).unwrap();
        assert_eq!(a, b);
        for (e, s, f) in a.iter() {
            assert!((2..=20).contains(&(s + f)));
            assert_eq!(a.successes(e.v, e.u), s);
            assert_eq!(a.failures(e.v, e.u), f);
        }
        assert_eq!(a.iter().count(), 3);
        assert_eq!(a.successes(0, 0), 0);
    }

    #[test]
    fn zero_range_draws_at_least_one_transaction() {
        let g: Graph = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let tm = generate_transactions(&g, 3, 0, 1).unwrap();
        assert!(tm.iter().all(|(_, s, f)| s + f >= 1));
        assert!(generate_transactions(&g, 3, 0, 0).is_err());
        assert!(generate_transactions(&g, 3, 5, 2).is_err());
    }

    #[test]
    fn edgeless_graph_has_no_transactions() {
        let g: Graph = Graph::new(5);
        let tm = generate_transactions(&g, 1, 1, 10).unwrap();
        assert_eq!(tm.iter().count(), 0);
        let profile = TrustProfile::<f64>::from_transactions(&tm).unwrap();
        assert!((0..5).all(|i| profile.trust(i).unwrap() == DEFAULT_TRUST));
    }

    #[test]
    fn profile_aggregates_both_endpoints() {
        let mut tm = TransactionMatrices::new(3);
        tm.set(0, 1, 3, 1).unwrap();
        tm.set(1, 2, 4, 2).unwrap();
        let p = TrustProfile::<f64>::from_transactions(&tm).unwrap();
        assert_eq!((p.successes(1), p.failures(1)), (7, 3));
        assert_eq!(p.trust(0).unwrap(), 0.75);
        assert_eq!(p.trust(1).unwrap(), 0.7);
        assert!(matches!(p.trust(3), Err(Error::UndefinedTrust { node: 3 })));
    }

    #[test]
    fn weighing_constant_trust() {
        let g: Graph = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let p = TrustProfile::uniform(4, 0.6).unwrap();
        let w = weigh_graph(&g, &p).unwrap();
        for e in w.edges() {
            assert!((w.weight(e.u, e.v).unwrap() - 1.36).abs() < 1e-12);
        }
        let short = TrustProfile::uniform(2, 0.6).unwrap();
        assert!(matches!(
            weigh_graph(&g, &short),
            Err(Error::UndefinedTrust { node: 2 })
        ));
    }

    #[test]
    fn transactions_must_sit_on_edges() {
        let g: Graph = Graph::from_edges(3, [(0, 1)]).unwrap();
        let mut tm = TransactionMatrices::new(3);
        tm.set(1, 2, 1, 1).unwrap();
        assert!(tm.check_support(&g).is_err());
    }
}
