use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qirl::harness::{
    self, read_episodes_csv, read_summary, AgentKind, AgentParams, RunConfig, EPISODES_FILE,
    MOVING_AVERAGE_WINDOW, SUMMARY_FILE,
};
use qirl::oracle::dp_optimal;
use qirl::Error;

/// Quantum-inspired RL for UAV trajectory planning.
#[derive(Parser)]
#[command(name = "qirl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train an agent over several seeds and write CSV/JSON outputs.
    Run {
        /// Environment layout file (TOML), optionally with an [agents] table.
        #[arg(long)]
        config: PathBuf,
        /// qirl, ql_eps or ql_boltz.
        #[arg(long)]
        agent: String,
        #[arg(long)]
        episodes: usize,
        /// Comma-separated seeds, e.g. `1,2,3`, or a range `1..=20`.
        #[arg(long)]
        seeds: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the exact optimal return and path for a layout.
    Oracle {
        #[arg(long)]
        config: PathBuf,
    },
    /// Recompute convergence metrics from a run directory.
    Metrics {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn parse_seeds(text: &str) -> Result<Vec<u64>, Error> {
    let bad = |s: &str| Error::Config {
        line: None,
        message: format!("invalid seed list `{s}`"),
    };
    if let Some((lo, hi)) = text.split_once("..=") {
        let lo: u64 = lo.trim().parse().map_err(|_| bad(text))?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad(text))?;
        if lo > hi {
            return Err(bad(text));
        }
        return Ok((lo..=hi).collect());
    }
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse().map_err(|_| bad(text)))
        .collect()
}

fn cmd_run(
    config: PathBuf,
    agent: &str,
    episodes: usize,
    seeds: &str,
    out: PathBuf,
) -> Result<(), Error> {
    let run = RunConfig {
        env_file: config,
        agent: agent.parse::<AgentKind>()?,
        episodes,
        seeds: parse_seeds(seeds)?,
        params: AgentParams::default(),
        output_dir: out.clone(),
    };
    let summary = harness::run(&run)?;
    println!(
        "{} | {} seeds x {} episodes | oracle return {:.6e}",
        summary.agent,
        summary.seeds.len(),
        summary.episodes,
        summary.oracle_return
    );
    for s in &summary.seeds {
        println!(
            "seed {:>6}  greedy {:.6e}  steps {:>4}  terminal {:<5}  gap {:.4}  ep90 {}",
            s.seed,
            s.greedy_return,
            s.greedy_steps,
            s.greedy_reached_terminal,
            s.metric.oracle_gap,
            s.metric
                .episodes_to_90pct
                .map_or_else(|| "-".to_string(), |e| e.to_string())
        );
    }
    println!("outputs written to {}", out.display());
    Ok(())
}

fn cmd_oracle(config: &Path) -> Result<(), Error> {
    let (env, _, hash) = harness::load_experiment(config)?;
    let dp = dp_optimal(&env);
    println!("config hash      {hash}");
    println!("cells            {}x{}", env.n1(), env.n2());
    println!("step budget      {}", env.max_steps());
    println!("terminal bonus   {:.6e}", env.bonus());
    if !dp.feasible {
        println!("infeasible: terminal unreachable within the budget");
        return Ok(());
    }
    println!("optimal return   {:.6e}", dp.optimal_return);
    println!("steps used       {}", dp.horizon_used);
    println!(
        "mean step reward {:.6e}",
        dp.optimal_return / dp.horizon_used.max(1) as f64
    );
    // runs of one repeated pair of cells are printed once with a count
    let cells: Vec<String> = dp
        .optimal_path
        .iter()
        .map(|s| env.cell_of(*s).to_string())
        .collect();
    let mut parts: Vec<String> = Vec::new();
    let mut k = 0;
    while k < cells.len() {
        let mut reps = 0;
        while k + 2 * reps + 3 < cells.len()
            && cells[k + 2 * reps + 2] == cells[k]
            && cells[k + 2 * reps + 3] == cells[k + 1]
        {
            reps += 1;
        }
        if reps > 0 {
            parts.push(format!("[{} {}]x{}", cells[k], cells[k + 1], reps + 1));
            k += 2 * (reps + 1);
        } else {
            parts.push(cells[k].clone());
            k += 1;
        }
    }
    println!("path             {}", parts.join(" "));
    Ok(())
}

fn cmd_metrics(dir: &Path) -> Result<(), Error> {
    let rows = read_episodes_csv(&dir.join(EPISODES_FILE))?;
    let summary = read_summary(&dir.join(SUMMARY_FILE))?;
    println!(
        "{} | oracle return {:.6e} | window {}",
        summary.agent, summary.oracle_return, MOVING_AVERAGE_WINDOW
    );
    let mut medians = Vec::new();
    for s in &summary.seeds {
        let returns: Vec<f64> = rows
            .iter()
            .filter(|r| r.seed == s.seed)
            .map(|r| r.total_return)
            .collect();
        let (ep90, final_mean) = harness::curve_summary(&returns);
        if let Some(e) = ep90 {
            medians.push(e);
        }
        println!(
            "seed {:>6}  episodes {:>6}  ep90 {:>6}  final mean {:>14}  gap {:.4}",
            s.seed,
            returns.len(),
            ep90.map_or_else(|| "-".into(), |e| e.to_string()),
            final_mean.map_or_else(|| "-".into(), |m| format!("{m:.6e}")),
            s.metric.oracle_gap
        );
    }
    medians.sort_unstable();
    if !medians.is_empty() {
        let mid = medians.len() / 2;
        let median = if medians.len() % 2 == 1 {
            medians[mid] as f64
        } else {
            (medians[mid - 1] + medians[mid]) as f64 / 2.0
        };
        println!("median ep90 {median}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            agent,
            episodes,
            seeds,
            out,
        } => cmd_run(config, &agent, episodes, &seeds, out),
        Command::Oracle { config } => cmd_oracle(&config),
        Command::Metrics { input } => cmd_metrics(&input),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
