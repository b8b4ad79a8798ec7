//! Seeded experiment runner.
//!
//! Every seed gets a fresh agent and its own `ChaCha8Rng` created with
//! `ChaCha8Rng::seed_from_u64(seed)`; every random decision an agent makes
//! draws from that stream and nothing else, so a `(config, seed)` pair fully
//! determines a run. Seeds are trained in parallel and merged back in the
//! order they were given.

mod metrics;
mod output;
mod params;

use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::agents::{greedy_policy, Agent, GreedyRollout, QLearningAgent, QirlAgent, Transition};
use crate::error::{Error, Result};
use crate::gridworld::{Action, GridWorld};
use crate::oracle::{dp_optimal, DpResult};

pub use metrics::{
    convergence_metrics, curve_summary, moving_average, ConvergenceMetric, MOVING_AVERAGE_WINDOW,
};
pub use output::{
    read_episodes_csv, read_summary, read_trajectory_csv, write_episodes_csv, write_summary,
    write_trajectory_csv, EpisodeRow, SeedSummary, Summary, TrajectoryRow, EPISODES_FILE,
    SUMMARY_FILE, TRAJECTORY_FILE,
};
pub use params::{AgentParams, BoltzmannParams, EpsilonParams};

/// Deterministic generator used for every seed.
pub type SimRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgentKind {
    Qirl,
    QlEps,
    QlBoltz,
}

impl AgentKind {
    pub const ALL: [AgentKind; 3] = [AgentKind::Qirl, AgentKind::QlEps, AgentKind::QlBoltz];

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Qirl => "qirl",
            AgentKind::QlEps => "ql_eps",
            AgentKind::QlBoltz => "ql_boltz",
        }
    }
}

impl FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AgentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::config(
                    None,
                    format!("unknown agent `{s}` (expected qirl, ql_eps or ql_boltz)"),
                )
            })
    }
}

impl std::fmt::Display for AgentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One training episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeLog {
    /// 1-based episode number.
    pub episode: usize,
    pub total_return: f64,
    pub steps: usize,
    pub reached_terminal: bool,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub env_file: PathBuf,
    pub agent: AgentKind,
    pub episodes: usize,
    pub seeds: Vec<u64>,
    /// Hyperparameter overrides; unset fields take environment-scaled defaults.
    pub params: AgentParams,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.episodes == 0 {
            return Err(Error::config(None, "episodes must be at least 1"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config(None, "at least one seed is required"));
        }
        if !self.env_file.is_file() {
            return Err(Error::config(
                None,
                format!(
                    "environment file {} does not exist",
                    self.env_file.display()
                ),
            ));
        }
        Ok(())
    }
}

/// Everything produced for one seed.
#[derive(Debug, Clone)]
pub struct SeedRun {
    pub seed: u64,
    pub logs: Vec<EpisodeLog>,
    pub greedy: GreedyRollout,
    pub metric: ConvergenceMetric,
}

/// Builds a fresh agent of `kind` for `env`.
pub fn make_agent(
    kind: AgentKind,
    env: &GridWorld,
    params: &AgentParams,
) -> Result<Box<dyn Agent>> {
    Ok(match kind {
        AgentKind::Qirl => Box::new(QirlAgent::new(env.n_states(), params.qirl_config(env))?),
        AgentKind::QlEps => {
            let (schedule, lr, gamma) = params.epsilon_settings(env)?;
            Box::new(QLearningAgent::new(env.n_states(), schedule, lr, gamma)?)
        }
        AgentKind::QlBoltz => {
            let (schedule, lr, gamma) = params.boltzmann_settings(env)?;
            Box::new(QLearningAgent::new(env.n_states(), schedule, lr, gamma)?)
        }
    })
}

/// Runs one episode from the start cell until the terminal cell or the step
/// budget, calling `after_update` after every agent update.
pub fn run_episode<A, F>(
    env: &GridWorld,
    agent: &mut A,
    episode: usize,
    rng: &mut SimRng,
    mut actions: Option<&mut Vec<Action>>,
    after_update: &mut F,
) -> Result<EpisodeLog>
where
    A: Agent + ?Sized,
    F: FnMut(&A, &Transition) -> Result<()>,
{
    agent.begin_episode(episode);
    let mut state = env.start();
    let mut log = EpisodeLog {
        episode: episode + 1,
        total_return: 0.0,
        steps: 0,
        reached_terminal: false,
    };
    while log.steps < env.max_steps() {
        let action = agent.select(state, rng)?;
        let out = env.step(state, action);
        log.steps += 1;
        let truncated = !out.terminal && log.steps == env.max_steps();
        let t = Transition::new(state, action, out, truncated);
        agent.update(&t)?;
        after_update(agent, &t)?;
        if let Some(a) = actions.as_deref_mut() {
            a.push(action);
        }
        log.total_return += out.reward;
        state = out.next_state;
        if out.terminal {
            log.reached_terminal = true;
            break;
        }
    }
    Ok(log)
}

/// Trains `agent` for `episodes` episodes. Every hundredth episode is
/// replayed through the environment to confirm its logged return.
pub fn train<A, F>(
    env: &GridWorld,
    agent: &mut A,
    episodes: usize,
    rng: &mut SimRng,
    mut after_update: F,
) -> Result<Vec<EpisodeLog>>
where
    A: Agent + ?Sized,
    F: FnMut(&A, &Transition) -> Result<()>,
{
    let mut logs = Vec::with_capacity(episodes);
    let mut actions = Vec::new();
    for ep in 0..episodes {
        let spot_check = ep % 100 == 0;
        actions.clear();
        let log = run_episode(
            env,
            agent,
            ep,
            rng,
            spot_check.then_some(&mut actions),
            &mut after_update,
        )?;
        if spot_check {
            let replayed = env.replay_return(&actions);
            if replayed != log.total_return {
                return Err(Error::Consistency(format!(
                    "episode {} logged return {} but replay gives {replayed}",
                    log.episode, log.total_return
                )));
            }
        }
        logs.push(log);
    }
    Ok(logs)
}

/// Trains a fresh agent on one seed and evaluates its greedy policy.
pub fn run_seed(
    env: &GridWorld,
    kind: AgentKind,
    params: &AgentParams,
    episodes: usize,
    seed: u64,
    oracle: &DpResult,
) -> Result<SeedRun> {
    let mut agent = make_agent(kind, env, params)?;
    let mut rng = seeded_rng(seed);
    let logs = train(env, agent.as_mut(), episodes, &mut rng, |_, _| Ok(()))?;
    let greedy = greedy_policy(agent.as_ref(), env);
    if greedy.reached_terminal && greedy.total_return > oracle.optimal_return * (1.0 + 1e-12) {
        return Err(Error::Consistency(format!(
            "seed {seed}: greedy return {} exceeds the DP optimum {}",
            greedy.total_return, oracle.optimal_return
        )));
    }
    let metric = convergence_metrics(&logs, &greedy, oracle);
    Ok(SeedRun {
        seed,
        logs,
        greedy,
        metric,
    })
}

/// Runs every seed in parallel, returning results in seed-list order.
pub fn run_seeds(
    env: &GridWorld,
    kind: AgentKind,
    params: &AgentParams,
    episodes: usize,
    seeds: &[u64],
) -> Result<(DpResult, Vec<SeedRun>)> {
    let oracle = dp_optimal(env);
    if !oracle.feasible {
        return Err(Error::config(
            None,
            "terminal cell is unreachable within the step budget",
        ));
    }
    let runs = seeds
        .par_iter()
        .map(|&seed| run_seed(env, kind, params, episodes, seed, &oracle))
        .collect::<Result<Vec<_>>>()?;
    Ok((oracle, runs))
}

/// Loads the environment and agent parameters from a layout file.
pub fn load_experiment(path: &Path) -> Result<(GridWorld, AgentParams, String)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let layout = crate::gridworld::parse_layout(&text)?;
    let params = AgentParams::from_layout(layout.agents.as_ref(), &text)?;
    let env = GridWorld::build(layout.env)?;
    Ok((env, params, hex::encode(Sha256::digest(&bytes))))
}

/// The `run` command: trains, then writes the episode, trajectory and summary files.
pub fn run(config: &RunConfig) -> Result<Summary> {
    config.validate()?;
    let (env, file_params, hash) = load_experiment(&config.env_file)?;
    let params = file_params.overridden_by(&config.params);
    let (oracle, runs) = run_seeds(&env, config.agent, &params, config.episodes, &config.seeds)?;

    std::fs::create_dir_all(&config.output_dir).map_err(|e| Error::io(&config.output_dir, e))?;
    write_episodes_csv(&config.output_dir.join(EPISODES_FILE), &runs)?;
    write_trajectory_csv(&config.output_dir.join(TRAJECTORY_FILE), &env, &runs)?;
    let summary = Summary::new(config.agent, hash, config.episodes, &oracle, &runs);
    write_summary(&config.output_dir.join(SUMMARY_FILE), &summary)?;
    Ok(summary)
}
