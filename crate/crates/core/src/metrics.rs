//! Robustness metrics: Laplacian energy, robustness index and density.
//!
//! The Laplacian energy used here is the variance of the eigenvalues of the
//! combinatorial Laplacian `L = D - A`:
//!
//! ```text
//! L_E = (1/n) * sum_i (lambda_i - mean(lambda))^2
//!     = (1/n) * [2m + sum_i k_i^2 - 4m^2/n]
//! ```
//!
//! The second form only needs the edge count and the degree sequence, so
//! [`laplacian_energy_fast`] is exact integer arithmetic up to the final
//! division. [`laplacian_energy_spectral`] goes through an eigendecomposition
//! and is kept as an independent cross-check.

use nalgebra::{DMatrix, RealField, SymmetricEigen};
use num_traits::{FromPrimitive, Num};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ComponentPartition, Graph};
use crate::scalar::Scalar;

fn convert<T: FromPrimitive>(x: u128) -> Result<T> {
    T::from_u128(x).ok_or_else(|| Error::Numeric(format!("{x} does not fit the scalar type")))
}

/// Energy from a degree sequence. `n * L_E * n` is an integer, so the only
/// rounding happens in the final division.
pub fn energy_from_degrees<T, I>(degrees: I) -> Result<T>
where
    T: Num + FromPrimitive,
    I: IntoIterator<Item = usize>,
{
    let mut n: u128 = 0;
    let mut degree_sum: u128 = 0;
    let mut square_sum: u128 = 0;
    for k in degrees {
        let k = k as u128;
        n += 1;
        degree_sum += k;
        square_sum += k * k;
    }
    if n == 0 {
        return Err(Error::domain("Laplacian energy of a graph with no nodes"));
    }
    // degree_sum = 2m, so n(2m + sum k^2) - 4m^2 = n(2m + sum k^2) - degree_sum^2
    let numerator = n * (degree_sum + square_sum) - degree_sum * degree_sum;
    Ok(convert::<T>(numerator)? / convert::<T>(n * n)?)
}

/// Closed-form Laplacian energy in `O(n + m)`.
pub fn laplacian_energy_fast<T, W>(g: &Graph<W>) -> Result<T>
where
    T: Num + FromPrimitive,
    W: Copy,
{
    energy_from_degrees(g.degrees())
}

/// Laplacian energy of a connected component of `g`. Components are closed
/// under adjacency, so full-graph degrees are the induced-subgraph degrees.
pub fn component_energy<T, W>(g: &Graph<W>, component: &[usize]) -> Result<T>
where
    T: Num + FromPrimitive,
    W: Copy,
{
    energy_from_degrees(component.iter().map(|&x| g.degree(x)))
}

/// Laplacian energy as the variance of the Laplacian spectrum.
pub fn laplacian_energy_spectral<T, W>(g: &Graph<W>) -> Result<T>
where
    T: Scalar + RealField,
    W: Copy,
{
    let n = g.node_count();
    if n == 0 {
        return Err(Error::domain("Laplacian energy of a graph with no nodes"));
    }
    let mut lap = DMatrix::<T>::zeros(n, n);
    for x in 0..n {
        lap[(x, x)] = T::from_count(g.degree(x));
    }
    for e in g.edges() {
        lap[(e.u, e.v)] = -T::one();
        lap[(e.v, e.u)] = -T::one();
    }
    let eigen = SymmetricEigen::try_new(lap, T::default_epsilon(), 10_000)
        .ok_or_else(|| Error::Numeric("Laplacian eigensolver did not converge".into()))?;
    let count = T::from_count(n);
    let mean = eigen.eigenvalues.iter().fold(T::zero(), |acc, &l| acc + l) / count;
    let var = eigen
        .eigenvalues
        .iter()
        .fold(T::zero(), |acc, &l| acc + (l - mean) * (l - mean))
        / count;
    Ok(var)
}

/// `S = |LCC| / n`.
pub fn robustness_index<T, W>(g: &Graph<W>) -> Result<T>
where
    T: Num + FromPrimitive,
    W: Copy,
{
    robustness_from_partition(g.node_count(), &g.components())
}

pub(crate) fn robustness_from_partition<T>(n: usize, partition: &ComponentPartition) -> Result<T>
where
    T: Num + FromPrimitive,
{
    if n == 0 {
        return Err(Error::domain("robustness index of a graph with no nodes"));
    }
    Ok(convert::<T>(partition.lcc().len() as u128)? / convert::<T>(n as u128)?)
}

/// `rho = 2m / (n (n - 1))`.
pub fn density<T, W>(g: &Graph<W>) -> Result<T>
where
    T: Num + FromPrimitive,
    W: Copy,
{
    density_of(g.node_count(), g.edge_count())
}

pub(crate) fn density_of<T: Num + FromPrimitive>(n: usize, m: usize) -> Result<T> {
    if n < 2 {
        return Err(Error::domain(format!(
            "density needs at least 2 nodes, got {n}"
        )));
    }
    let n = n as u128;
    Ok(convert::<T>(2 * m as u128)? / convert::<T>(n * (n - 1))?)
}

/// Laplacian energy rebuilt from the density and the degree second moment:
/// `rho (n-1) [1 - rho (n-1)] + (1/n) sum k_i^2`.
pub fn energy_from_density<T: Scalar, W: Copy>(g: &Graph<W>) -> Result<T> {
    let n = g.node_count();
    let rho: T = density(g)?;
    let mean_degree = rho * T::from_count(n - 1);
    let squares = g
        .degrees()
        .into_iter()
        .fold(T::zero(), |acc, k| acc + T::from_count(k * k));
    Ok(mean_degree * (T::one() - mean_degree) + squares / T::from_count(n))
}

/// Metrics after one step. Energy is measured on the LCC; `S` and `rho` on
/// the whole graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsSnapshot<T> {
    pub laplacian_energy: T,
    pub robustness_index: T,
    pub density: T,
    pub n_lcc: usize,
    pub m_lcc: usize,
}

impl<T: Scalar> MetricsSnapshot<T> {
    pub fn of<W: Copy>(g: &Graph<W>) -> Result<Self> {
        Self::with_partition(g, &g.components())
    }

    pub fn with_partition<W: Copy>(g: &Graph<W>, partition: &ComponentPartition) -> Result<Self> {
        let lcc = partition.lcc();
        let m_lcc = lcc.iter().map(|&x| g.degree(x)).sum::<usize>() / 2;
        Ok(MetricsSnapshot {
            laplacian_energy: component_energy(g, lcc)?,
            robustness_index: robustness_from_partition(g.node_count(), partition)?,
            density: density(g)?,
            n_lcc: lcc.len(),
            m_lcc,
        })
    }
}
