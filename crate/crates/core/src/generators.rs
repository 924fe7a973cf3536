//! Seeded synthetic network generators.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneratorSpec {
    ErdosRenyi { n: usize, p: f64, seed: u64 },
    PowerLaw { n: usize, gamma: f64, seed: u64 },
}

impl GeneratorSpec {
    pub fn generate<W: Copy>(&self) -> Result<Graph<W>> {
        match *self {
            GeneratorSpec::ErdosRenyi { n, p, seed } => gen_er(n, p, seed),
            GeneratorSpec::PowerLaw { n, gamma, seed } => gen_power_law(n, gamma, seed),
        }
    }

    pub fn node_count(&self) -> usize {
        match *self {
            GeneratorSpec::ErdosRenyi { n, .. } | GeneratorSpec::PowerLaw { n, .. } => n,
        }
    }
}

/// G(n, p): every unordered pair is an edge independently with probability `p`.
pub fn gen_er<W: Copy>(n: usize, p: f64, seed: u64) -> Result<Graph<W>> {
    if n < 2 {
        return Err(Error::config(format!("G(n, p) needs n >= 2, got {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::config(format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

/// Largest degree the power-law sampler can draw for `n` nodes.
pub fn power_law_cutoff(n: usize) -> usize {
    // with a cutoff of 1 an odd node count could never reach an even degree sum
    ((n as f64).sqrt().floor() as usize).max(2)
}

/// Configuration model over degrees drawn from `p(k) ~ k^-gamma` on
/// `1..=floor(sqrt(n))`. Self-loops and repeated pairs produced by the
/// stub matching are dropped.
pub fn gen_power_law<W: Copy>(n: usize, gamma: f64, seed: u64) -> Result<Graph<W>> {
    if n < 2 {
        return Err(Error::config(format!(
            "power-law graph needs n >= 2, got {n}"
        )));
    }
    if !gamma.is_finite() || gamma <= 2.0 {
        return Err(Error::config(format!(
            "power-law exponent must exceed 2, got {gamma}"
        )));
    }
    let kmax = power_law_cutoff(n);
    let masses: Vec<f64> = (1..=kmax).map(|k| (k as f64).powf(-gamma)).collect();
    let dist = WeightedIndex::new(&masses)
        .map_err(|e| Error::Numeric(format!("degree distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut degrees: Vec<usize> = (0..n).map(|_| dist.sample(&mut rng) + 1).collect();
    while degrees.iter().sum::<usize>() % 2 == 1 {
        let x = rng.gen_range(0..n);
        degrees[x] = dist.sample(&mut rng) + 1;
    }
    let mut stubs: Vec<usize> = degrees
        .iter()
        .enumerate()
        .flat_map(|(x, &k)| std::iter::repeat_n(x, k))
        .collect();
    stubs.shuffle(&mut rng);
    let mut g = Graph::new(n);
    for pair in stubs.chunks_exact(2) {
        if pair[0] != pair[1] {
            g.add_edge(pair[0], pair[1])?;
        }
    }
    Ok(g)
}
