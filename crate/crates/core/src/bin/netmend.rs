use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use netmend::pipeline::{cmd_metrics, exit_code, run_repeats, RawConfig, OUT_ENV};

#[derive(Parser)]
#[command(
    name = "netmend",
    version,
    about = "Fragment and restore trust-weighted networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Attack a network, restore it and write all artifacts.
    Run(Box<RunArgs>),
    /// Print summary metrics of an edge-list file as JSON.
    Metrics { path: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Generator: `er` or `power-law`.
    #[arg(long)]
    gen: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Edge-list file to use instead of a generator.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// `random` or `targeted`.
    #[arg(long)]
    attack: Option<String>,
    /// Target number of components.
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    max_removals: Option<usize>,
    /// `strategic`, `budget` or `both`.
    #[arg(long)]
    mechanism: Option<String>,
    /// Positive amount or `auto`.
    #[arg(long)]
    budget: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// `n` or `n-1`.
    #[arg(long)]
    threshold: Option<String>,
    /// `seeded` or `deterministic`.
    #[arg(long)]
    tie_break: Option<String>,
    /// Transaction count range `lo,hi`.
    #[arg(long)]
    tx_range: Option<String>,
    /// CSV of `i,j,T,U` rows.
    #[arg(long)]
    transactions: Option<PathBuf>,
    #[arg(long)]
    giant_component: Option<bool>,
    #[arg(long)]
    repeats: Option<usize>,
}

impl RunArgs {
    fn overrides(&self) -> netmend::Result<RawConfig> {
        let mut raw = RawConfig::default();
        let path = |p: &PathBuf| p.display().to_string();
        let pairs: [(&str, Option<String>); 18] = [
            ("gen", self.gen.clone()),
            ("n", self.n.map(|v| v.to_string())),
            ("p", self.p.map(|v| v.to_string())),
            ("gamma", self.gamma.map(|v| v.to_string())),
            ("dataset", self.dataset.as_ref().map(path)),
            ("attack", self.attack.clone()),
            ("q", self.q.map(|v| v.to_string())),
            ("max_removals", self.max_removals.map(|v| v.to_string())),
            ("mechanism", self.mechanism.clone()),
            ("budget", self.budget.clone()),
            ("seed", self.seed.map(|v| v.to_string())),
            ("out", self.out.as_ref().map(path)),
            ("threshold", self.threshold.clone()),
            ("tie_break", self.tie_break.clone()),
            ("tx_range", self.tx_range.clone()),
            ("transactions", self.transactions.as_ref().map(path)),
            (
                "giant_component",
                self.giant_component.map(|v| v.to_string()),
            ),
            ("repeats", self.repeats.map(|v| v.to_string())),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                raw.set(k, v)?;
            }
        }
        Ok(raw)
    }
}

fn run(args: &RunArgs) -> netmend::Result<i32> {
    let mut raw = match &args.config {
        Some(path) => RawConfig::load(path)?,
        None => RawConfig::default(),
    };
    raw.merge(&args.overrides()?);
    if let Ok(dir) = std::env::var(OUT_ENV) {
        raw.set("out", dir)?;
    }
    let cfg = raw.build()?;
    let mut code = 0;
    for (seed, result) in run_repeats(&cfg, raw.repeats()?) {
        if let Err(e) = result {
            eprintln!("netmend: seed {seed}: {e}");
            code = code.max(exit_code(&e));
        }
    }
    Ok(code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => run(&args).unwrap_or_else(|e| {
            eprintln!("netmend: {e}");
            exit_code(&e)
        }),
        Command::Metrics { path } => match cmd_metrics(&path) {
            Ok(v) => {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&v).expect("plain JSON values")
                );
                0
            }
            Err(e) => {
                eprintln!("netmend: {e}");
                exit_code(&e)
            }
        },
    };
    ExitCode::from(code as u8)
}
