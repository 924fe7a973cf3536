//! End-to-end runs: build or load a network, attack it, restore it and
//! write every artifact to an output directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::attack::{fragment, AttackMode, AttackSpec, AttackTrace};
use crate::budget::{budget_restore, Budget, BudgetOutcome};
use crate::error::{Error, Result};
use crate::generators::GeneratorSpec;
use crate::graph::Graph;
use crate::io::{format_edge_list, load_edge_list, load_transactions};
use crate::metrics::{
    density, laplacian_energy_fast, laplacian_energy_spectral, robustness_index, MetricsSnapshot,
};
use crate::report::{format_real, Format, Mechanism, MetricsSeries, Phase};
use crate::restore::{strategic_restore, RestoreOptions, RewirePlan, Threshold, TieBreak};
use crate::trust::{generate_transactions, weigh_graph, TransactionMatrices, TrustProfile};

/// Environment variable that overrides the output directory.
pub const OUT_ENV: &str = "NETMEND_OUT";

/// Largest graph for which `metrics` also runs the eigensolver.
pub const SPECTRAL_LIMIT: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Generator(GeneratorSpec),
    Dataset(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MechanismChoice {
    Strategic,
    Budget,
    Both,
}

impl MechanismChoice {
    pub fn strategic(self) -> bool {
        matches!(self, MechanismChoice::Strategic | MechanismChoice::Both)
    }

    pub fn budget(self) -> bool {
        matches!(self, MechanismChoice::Budget | MechanismChoice::Both)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: Source,
    pub attack: AttackMode,
    pub target_components: usize,
    pub max_removals: Option<usize>,
    pub mechanism: MechanismChoice,
    pub budget: Budget<f64>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub threshold: Threshold,
    pub tie_break: TieBreak,
    pub tx_range: (u64, u64),
    pub transactions: Option<PathBuf>,
    /// Reduce the input network to its largest connected component first.
    pub giant_component: bool,
}

/// Unvalidated settings as read from a config file and flags. Every field
/// is the raw string value of the key of the same name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

const KEYS: &[&str] = &[
    "gen",
    "n",
    "p",
    "gamma",
    "dataset",
    "attack",
    "q",
    "max_removals",
    "mechanism",
    "budget",
    "seed",
    "out",
    "threshold",
    "tie_break",
    "tx_range",
    "transactions",
    "giant_component",
    "repeats",
];

impl RawConfig {
    /// Parses flat `key = value` lines; `#` starts a comment line.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Parse {
                    path: origin.to_path_buf(),
                    line: i + 1,
                    message: "expected `key = value`".into(),
                });
            };
            raw.set(k.trim(), v.trim()).map_err(|e| Error::Parse {
                path: origin.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        Ok(raw)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(Error::config(format!("unknown key `{key}`")));
        }
        self.values.insert(key.to_owned(), value.into());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Layers `other` on top of `self`.
    pub fn merge(&mut self, other: &RawConfig) {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), v.clone());
        }
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| Error::config(format!("bad value `{v}` for `{key}`: {e}")))
            })
            .transpose()
    }

    fn required<T: std::str::FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.parsed(key)?
            .ok_or_else(|| Error::config(format!("missing required `{key}`")))
    }

    pub fn repeats(&self) -> Result<usize> {
        let k = self.parsed::<usize>("repeats")?.unwrap_or(1);
        if k == 0 {
            return Err(Error::config("repeats must be at least 1"));
        }
        Ok(k)
    }

    pub fn build(&self) -> Result<RunConfig> {
        let seed: u64 = self.required("seed")?;
        let source = match (self.get("gen"), self.get("dataset")) {
            (Some(_), Some(_)) => {
                return Err(Error::config("set either `gen` or `dataset`, not both"))
            }
            (None, None) => return Err(Error::config("one of `gen` or `dataset` is required")),
            (None, Some(path)) => Source::Dataset(PathBuf::from(path)),
            (Some(kind), None) => {
                let n: usize = self.required("n")?;
                match kind {
                    "er" | "erdos_renyi" => Source::Generator(GeneratorSpec::ErdosRenyi {
                        n,
                        p: self.required("p")?,
                        seed,
                    }),
                    "power-law" | "power_law" | "powerlaw" => {
                        Source::Generator(GeneratorSpec::PowerLaw {
                            n,
                            gamma: self.required("gamma")?,
                            seed,
                        })
                    }
                    other => return Err(Error::config(format!("unknown generator `{other}`"))),
                }
            }
        };
        let mechanism = match self.get("mechanism").unwrap_or("both") {
            "strategic" => MechanismChoice::Strategic,
            "budget" => MechanismChoice::Budget,
            "both" => MechanismChoice::Both,
            other => return Err(Error::config(format!("unknown mechanism `{other}`"))),
        };
        let budget = match self.get("budget").unwrap_or("auto") {
            "auto" => Budget::Auto,
            v => {
                let b: f64 = v
                    .parse()
                    .map_err(|e| Error::config(format!("bad budget `{v}`: {e}")))?;
                if !(b > 0.0 && b.is_finite()) {
                    return Err(Error::config(format!("budget must be positive, got {v}")));
                }
                Budget::Units(b)
            }
        };
        let threshold = match self.get("threshold").unwrap_or("n") {
            "n" => Threshold::TotalNodes,
            "n-1" => Threshold::TotalNodesMinusOne,
            other => {
                return Err(Error::config(format!(
                    "threshold must be `n` or `n-1`, got `{other}`"
                )))
            }
        };
        let tie_break = match self.get("tie_break").unwrap_or("seeded") {
            "seeded" => TieBreak::Seeded,
            "deterministic" => TieBreak::Deterministic,
            other => return Err(Error::config(format!("unknown tie_break `{other}`"))),
        };
        let tx_range = match self.get("tx_range") {
            None => (1, 10),
            Some(v) => {
                let (lo, hi) = v
                    .split_once(',')
                    .ok_or_else(|| Error::config(format!("tx_range must be `lo,hi`, got `{v}`")))?;
                let parse = |s: &str| {
                    s.trim()
                        .parse::<u64>()
                        .map_err(|e| Error::config(format!("bad tx_range bound `{s}`: {e}")))
                };
                (parse(lo)?, parse(hi)?)
            }
        };
        if tx_range.1 < tx_range.0 || tx_range.1 == 0 {
            return Err(Error::config(format!(
                "invalid tx_range {},{}",
                tx_range.0, tx_range.1
            )));
        }
        let giant_component = match self.get("giant_component").unwrap_or("true") {
            "true" | "yes" | "1" => true,
            "false" | "no" | "0" => false,
            other => {
                return Err(Error::config(format!(
                    "giant_component must be a boolean, got `{other}`"
                )))
            }
        };
        Ok(RunConfig {
            source,
            attack: self.get("attack").unwrap_or("random").parse()?,
            target_components: self.required("q")?,
            max_removals: self.parsed("max_removals")?,
            mechanism,
            budget,
            seed,
            out_dir: PathBuf::from(self.get("out").unwrap_or("out")),
            threshold,
            tie_break,
            tx_range,
            transactions: self.get("transactions").map(PathBuf::from),
            giant_component,
        })
    }
}

/// Independent RNG seed for one stage of a run.
pub fn stage_seed(seed: u64, stage: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ stage.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const STAGE_TRANSACTIONS: u64 = 1;
const STAGE_ATTACK: u64 = 2;
const STAGE_RESTORE: u64 = 3;

/// Everything a run produced, also written to disk.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub original: Graph<f64>,
    pub labels: Option<Vec<String>>,
    pub trust: TrustProfile<f64>,
    pub fragmented: Graph<f64>,
    pub trace: AttackTrace,
    pub strategic: Option<(Graph<f64>, RewirePlan<f64>)>,
    pub budget: Option<BudgetOutcome<f64>>,
    pub series: MetricsSeries<f64>,
}

fn write(dir: &Path, name: &str, body: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| Error::io(path, e))
}

fn load_input(cfg: &RunConfig) -> Result<(Graph<f64>, Option<Vec<String>>)> {
    let (mut g, mut labels) = match &cfg.source {
        Source::Generator(spec) => (spec.generate::<f64>()?, None),
        Source::Dataset(path) => {
            let lg = load_edge_list::<f64>(path)?;
            if lg.duplicates + lg.self_loops > 0 {
                log::info!(
                    "{}: dropped {} duplicate edges and {} self-loops",
                    path.display(),
                    lg.duplicates,
                    lg.self_loops
                );
            }
            (lg.graph, Some(lg.labels))
        }
    };
    if g.node_count() == 0 {
        return Err(Error::config("input network has no nodes"));
    }
    if cfg.giant_component {
        let partition = g.components();
        if partition.len() > 1 {
            let (sub, map) = g.induced_subgraph(partition.lcc());
            labels = Some(match labels {
                Some(l) => map.iter().map(|&x| l[x].clone()).collect(),
                None => map.iter().map(|x| x.to_string()).collect(),
            });
            g = sub;
        }
    }
    Ok((g, labels))
}

fn transactions(
    cfg: &RunConfig,
    g: &Graph<f64>,
    labels: Option<&[String]>,
) -> Result<TransactionMatrices> {
    match &cfg.transactions {
        None => generate_transactions(
            g,
            stage_seed(cfg.seed, STAGE_TRANSACTIONS),
            cfg.tx_range.0,
            cfg.tx_range.1,
        ),
        Some(path) => {
            let index: BTreeMap<String, usize> = match labels {
                Some(l) => l.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect(),
                None => (0..g.node_count()).map(|i| (i.to_string(), i)).collect(),
            };
            let tm = load_transactions(path, g.node_count(), |s| index.get(s).copied())?;
            tm.check_support(g)?;
            Ok(tm)
        }
    }
}

/// Executes one configured run and writes its artifacts to `cfg.out_dir`.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunReport> {
    fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::io(&cfg.out_dir, e))?;
    let dir = cfg.out_dir.as_path();

    let (base, labels) = load_input(cfg)?;
    let tm = transactions(cfg, &base, labels.as_deref())?;
    let trust = TrustProfile::<f64>::from_transactions(&tm)?;
    let original = weigh_graph(&base, &trust)?;
    write(
        dir,
        "graph_original.txt",
        &format_edge_list(&original, labels.as_deref()),
    )?;

    let spec = AttackSpec {
        mode: cfg.attack,
        target_components: cfg.target_components,
        seed: stage_seed(cfg.seed, STAGE_ATTACK),
        max_removals: cfg.max_removals,
    };
    let (fragmented, trace) = match fragment(&original, &spec) {
        Ok(out) => out,
        Err(Error::AttackFailed {
            target,
            reached,
            trace,
        }) => {
            write(dir, "attack_trace.csv", &trace.to_csv())?;
            return Err(Error::AttackFailed {
                target,
                reached,
                trace,
            });
        }
        Err(e) => return Err(e),
    };
    write(dir, "attack_trace.csv", &trace.to_csv())?;
    write(
        dir,
        "graph_fragmented.txt",
        &format_edge_list(&fragmented, labels.as_deref()),
    )?;

    let mut series = MetricsSeries::<f64>::new();
    let mut replay = original.clone();
    series.record(&replay, Phase::Attack, Mechanism::None, 0.0)?;
    for e in trace.removed_edges() {
        replay.remove_edge(e.u, e.v);
        series.record(&replay, Phase::Attack, Mechanism::None, 0.0)?;
    }
    let start = MetricsSnapshot::<f64>::of(&fragmented)?;

    let opts = RestoreOptions {
        threshold: cfg.threshold,
        tie_break: cfg.tie_break,
    };
    let restore_seed = stage_seed(cfg.seed, STAGE_RESTORE);

    let strategic = if cfg.mechanism.strategic() {
        let mut rng = ChaCha8Rng::seed_from_u64(restore_seed);
        let (restored, plan) = strategic_restore(&fragmented, &trust, &opts, &mut rng)?;
        write(dir, "plan_strategic.csv", &plan.to_csv())?;
        write(
            dir,
            "graph_restored_strategic.txt",
            &format_edge_list(&restored, labels.as_deref()),
        )?;
        series.push_snapshot(&start, Phase::Restore, Mechanism::Strategic, 0.0);
        for r in &plan.records {
            let snap = MetricsSnapshot {
                laplacian_energy: r.theta,
                robustness_index: r.robustness_index,
                density: r.density,
                n_lcc: r.n_lcc,
                m_lcc: r.m_lcc,
            };
            series.push_snapshot(&snap, Phase::Restore, Mechanism::Strategic, r.cost);
        }
        Some((restored, plan))
    } else {
        None
    };

    let budget = if cfg.mechanism.budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(restore_seed);
        let outcome = budget_restore(&fragmented, &trust, cfg.budget, &opts, &mut rng)?;
        write(dir, "budget_schedule.csv", &outcome.schedule.to_csv())?;
        write(dir, "plan_budget.csv", &executed_csv(&outcome))?;
        write(
            dir,
            "graph_restored_budget.txt",
            &format_edge_list(&outcome.graph, labels.as_deref()),
        )?;
        series.push_snapshot(&start, Phase::Restore, Mechanism::Budget, 0.0);
        for op in &outcome.schedule.executed {
            let snap = MetricsSnapshot {
                laplacian_energy: op.theta,
                robustness_index: op.robustness_index,
                density: op.density,
                n_lcc: op.n_lcc,
                m_lcc: op.m_lcc,
            };
            series.push_snapshot(&snap, Phase::Restore, Mechanism::Budget, op.cost);
        }
        Some(outcome)
    } else {
        None
    };

    series.emit(Format::Csv, dir.join("metrics.csv"))?;
    series.emit(Format::Json, dir.join("metrics.json"))?;

    let mut summary = json!({
        "seed": cfg.seed,
        "n": original.node_count(),
        "m_original": original.edge_count(),
        "m_fragmented": fragmented.edge_count(),
        "components_fragmented": fragmented.components().len(),
        "edges_removed": trace.steps.len(),
    });
    if let Some((g, plan)) = &strategic {
        summary["m_restored_strategic"] = json!(g.edge_count());
        summary["steps_strategic"] = json!(plan.len());
    }
    if let Some(out) = &budget {
        summary["m_restored_budget"] = json!(out.graph.edge_count());
        summary["components_budget"] = json!(out.graph.components().len());
        summary["budget_total"] =
            json!(format_real(out.schedule.total_budget_cents as f64 / 100.0));
    }
    let mut text = serde_json::to_string_pretty(&summary).expect("plain JSON values");
    text.push('\n');
    write(dir, "summary.json", &text)?;

    Ok(RunReport {
        original,
        labels,
        trust,
        fragmented,
        trace,
        strategic,
        budget,
        series,
    })
}

fn executed_csv(outcome: &BudgetOutcome<f64>) -> String {
    let mut out = String::from(
        "step,increment,plan_r,kind,i,j,removed_u,removed_v,reanchored,theta,cost,S,rho,n_lcc,m_lcc\n",
    );
    for op in &outcome.schedule.executed {
        let (ru, rv) = op.removed.map_or((String::new(), String::new()), |e| {
            (e.u.to_string(), e.v.to_string())
        });
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            op.step,
            op.increment,
            op.plan_index + 1,
            op.kind.as_str(),
            op.anchor,
            op.attached,
            ru,
            rv,
            op.reanchored,
            format_real(op.theta),
            format_real(op.cost),
            format_real(op.robustness_index),
            format_real(op.density),
            op.n_lcc,
            op.m_lcc
        ));
    }
    out
}

/// Runs `repeats` seeds (`cfg.seed`, `cfg.seed + 1`, ...) concurrently, each
/// writing to its own `seed-<s>` subdirectory.
pub fn run_repeats(cfg: &RunConfig, repeats: usize) -> Vec<(u64, Result<RunReport>)> {
    if repeats <= 1 {
        return vec![(cfg.seed, cmd_run(cfg))];
    }
    let configs: Vec<RunConfig> = (0..repeats as u64)
        .map(|k| {
            let seed = cfg.seed.wrapping_add(k);
            let mut c = cfg.clone();
            c.seed = seed;
            if let Source::Generator(spec) = &mut c.source {
                match spec {
                    GeneratorSpec::ErdosRenyi { seed: s, .. }
                    | GeneratorSpec::PowerLaw { seed: s, .. } => *s = seed,
                }
            }
            c.out_dir = cfg.out_dir.join(format!("seed-{seed}"));
            c
        })
        .collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| scope.spawn(move || (c.seed, cmd_run(c))))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("run thread panicked"))
            .collect()
    })
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

/// Summary metrics of an edge-list file, as a JSON value.
pub fn cmd_metrics(path: impl AsRef<Path>) -> Result<serde_json::Value> {
    let lg = load_edge_list::<f64>(path)?;
    let g = &lg.graph;
    let n = g.node_count();
    if n == 0 {
        return Err(Error::domain("graph file contains no nodes"));
    }
    let fast: f64 = laplacian_energy_fast(g)?;
    let spectral = if n <= SPECTRAL_LIMIT {
        Some(round6(laplacian_energy_spectral::<f64, _>(g)?))
    } else {
        None
    };
    let rho = if n >= 2 {
        Some(round6(density::<f64, _>(g)?))
    } else {
        None
    };
    Ok(json!({
        "n": n,
        "m": g.edge_count(),
        "components": g.components().len(),
        "L_E": round6(fast),
        "L_E_spectral": spectral,
        "S": round6(robustness_index::<f64, _>(g)?),
        "rho": rho,
    }))
}

/// Process exit code for a failed run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::AttackFailed { .. } => 3,
        _ => 2,
    }
}
