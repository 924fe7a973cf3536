//! Per-step metric series and their CSV/JSON output.
//!
//! Output is byte-stable: fixed column order, reals printed with six
//! significant digits, LF line endings.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::MetricsSnapshot;
use crate::scalar::Scalar;

/// Formats a real with six significant digits, `%g` style.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let fixed = format!("{x:.*}", (5 - exp) as usize);
    trim_zeros(&fixed).to_owned()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn rounded(x: f64) -> f64 {
    format_real(x).parse().unwrap_or(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Attack,
    Restore,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mechanism {
    /// Attack rows belong to no restoration mechanism.
    None,
    Strategic,
    Budget,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Attack => "attack",
            Phase::Restore => "restore",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "attack" => Some(Phase::Attack),
            "restore" => Some(Phase::Restore),
            _ => None,
        }
    }
}

impl Mechanism {
    pub fn as_str(self) -> &'static str {
        match self {
            Mechanism::None => "none",
            Mechanism::Strategic => "strategic",
            Mechanism::Budget => "budget",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "none" => Some(Mechanism::None),
            "strategic" => Some(Mechanism::Strategic),
            "budget" => Some(Mechanism::Budget),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRow<T> {
    pub step: usize,
    pub phase: Phase,
    pub mechanism: Mechanism,
    pub laplacian_energy: T,
    pub robustness_index: T,
    pub density: T,
    pub n_lcc: usize,
    pub m_lcc: usize,
    pub cum_cost: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

const HEADER: &str = "step,phase,mechanism,L_E,S,rho,n_lcc,m_lcc,cum_cost";

/// Ordered snapshots. Steps count from 0 within each (phase, mechanism) run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsSeries<T> {
    pub rows: Vec<SeriesRow<T>>,
}

impl<T: Scalar> MetricsSeries<T> {
    pub fn new() -> Self {
        MetricsSeries { rows: Vec::new() }
    }

    fn last_of(&self, phase: Phase, mechanism: Mechanism) -> Option<&SeriesRow<T>> {
        self.rows
            .iter()
            .rev()
            .find(|r| r.phase == phase && r.mechanism == mechanism)
    }

    /// Appends a snapshot of `g` that cost `cost` to reach.
    pub fn record<W: Copy>(
        &mut self,
        g: &Graph<W>,
        phase: Phase,
        mechanism: Mechanism,
        cost: T,
    ) -> Result<()> {
        let snap = MetricsSnapshot::<T>::of(g)?;
        self.push_snapshot(&snap, phase, mechanism, cost);
        Ok(())
    }

    /// Appends precomputed metrics.
    pub fn push_snapshot(
        &mut self,
        snap: &MetricsSnapshot<T>,
        phase: Phase,
        mechanism: Mechanism,
        cost: T,
    ) {
        let (step, cum_cost) = match self.last_of(phase, mechanism) {
            Some(prev) => (prev.step + 1, prev.cum_cost + cost),
            None => (0, cost),
        };
        self.rows.push(SeriesRow {
            step,
            phase,
            mechanism,
            laplacian_energy: snap.laplacian_energy,
            robustness_index: snap.robustness_index,
            density: snap.density,
            n_lcc: snap.n_lcc,
            m_lcc: snap.m_lcc,
            cum_cost,
        });
    }

    pub fn select(
        &self,
        phase: Phase,
        mechanism: Mechanism,
    ) -> impl Iterator<Item = &SeriesRow<T>> {
        self.rows
            .iter()
            .filter(move |r| r.phase == phase && r.mechanism == mechanism)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.step,
                r.phase.as_str(),
                r.mechanism.as_str(),
                format_real(r.laplacian_energy.as_f64()),
                format_real(r.robustness_index.as_f64()),
                format_real(r.density.as_f64()),
                r.n_lcc,
                r.m_lcc,
                format_real(r.cum_cost.as_f64())
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "step": r.step,
                    "phase": r.phase.as_str(),
                    "mechanism": r.mechanism.as_str(),
                    "L_E": rounded(r.laplacian_energy.as_f64()),
                    "S": rounded(r.robustness_index.as_f64()),
                    "rho": rounded(r.density.as_f64()),
                    "n_lcc": r.n_lcc,
                    "m_lcc": r.m_lcc,
                    "cum_cost": rounded(r.cum_cost.as_f64()),
                })
            })
            .collect();
        let mut out = serde_json::to_string_pretty(&Value::Array(rows)).expect("plain JSON values");
        out.push('\n');
        out
    }

    pub fn emit(&self, format: Format, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let body = match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        };
        fs::write(path, body).map_err(|e| Error::io(path, e))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |line: usize, message: String| Error::Parse {
            path: "<metrics>".into(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h == HEADER => {}
            _ => return Err(bad(1, "missing metrics header".into())),
        }
        let mut series = MetricsSeries::new();
        for (i, line) in lines {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 9 {
                return Err(bad(i + 1, format!("expected 9 fields, found {}", f.len())));
            }
            let int = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| bad(i + 1, format!("`{s}`: {e}")))
            };
            let real = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .and_then(T::from_f64)
                    .ok_or_else(|| bad(i + 1, format!("bad real `{s}`")))
            };
            series.rows.push(SeriesRow {
                step: int(f[0])?,
                phase: Phase::parse(f[1])
                    .ok_or_else(|| bad(i + 1, format!("bad phase `{}`", f[1])))?,
                mechanism: Mechanism::parse(f[2])
                    .ok_or_else(|| bad(i + 1, format!("bad mechanism `{}`", f[2])))?,
                laplacian_energy: real(f[3])?,
                robustness_index: real(f[4])?,
                density: real(f[5])?,
                n_lcc: int(f[6])?,
                m_lcc: int(f[7])?,
                cum_cost: real(f[8])?,
            });
        }
        Ok(series)
    }
}
