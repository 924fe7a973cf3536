//! Network fragmentation and restoration toolkit.
//!
//! A graph is fragmented by progressive edge removal ([`attack`]) and then
//! reconnected either strategically ([`restore`]) or under a budget
//! ([`budget`]). Robustness is tracked at every step through the Laplacian
//! energy of the largest connected component, the robustness index and the
//! edge density ([`metrics`], [`report`]). Edge costs come from node trust
//! values estimated from transaction tallies ([`trust`]).
//!
//! All numeric routines are generic over the scalar type through
//! [`Scalar`]; the aliases at the crate root fix the common choices. The
//! closed-form energy, density and robustness index additionally accept
//! exact rationals (see [`Rational`]).

pub mod attack;
pub mod budget;
pub mod error;
pub mod generators;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod report;
pub mod restore;
pub mod scalar;
pub mod trust;

pub use error::{Error, Result};
pub use graph::{ComponentPartition, Edge};
pub use scalar::Scalar;

/// Exact rational used for closed-form metrics.
pub type Rational = num_rational::Ratio<i128>;

pub type Graph64 = graph::Graph<f64>;
pub type Graph32 = graph::Graph<f32>;
pub type TrustProfile64 = trust::TrustProfile<f64>;
pub type TrustProfile32 = trust::TrustProfile<f32>;
pub type RewirePlan64 = restore::RewirePlan<f64>;
pub type RewirePlan32 = restore::RewirePlan<f32>;
pub type BudgetSchedule64 = budget::BudgetSchedule<f64>;
pub type BudgetSchedule32 = budget::BudgetSchedule<f32>;
pub type MetricsSeries64 = report::MetricsSeries<f64>;
pub type MetricsSnapshot64 = metrics::MetricsSnapshot<f64>;
