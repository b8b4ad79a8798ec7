use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AgentKind, ConvergenceMetric, SeedRun};
use crate::error::{Error, Result};
use crate::gridworld::GridWorld;
use crate::oracle::DpResult;

pub const EPISODES_FILE: &str = "episodes.csv";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRow {
    pub seed: u64,
    pub episode: usize,
    #[serde(rename = "return")]
    pub total_return: f64,
    pub steps: usize,
    pub reached_terminal: bool,
}

/// One cell of a greedy trajectory; step 0 is the start cell with reward 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub seed: u64,
    pub step: usize,
    pub cell_i: usize,
    pub cell_j: usize,
    pub x_m: f64,
    pub y_m: f64,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub seed: u64,
    #[serde(flatten)]
    pub metric: ConvergenceMetric,
    pub greedy_return: f64,
    pub greedy_steps: usize,
    /// Greedy return divided by steps flown.
    pub greedy_mean_step_reward: f64,
    pub greedy_reached_terminal: bool,
    pub greedy_cycled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub agent: String,
    /// SHA-256 of the layout file.
    pub config_hash: String,
    pub episodes: usize,
    pub oracle_return: f64,
    pub oracle_steps: usize,
    pub oracle_mean_step_reward: f64,
    pub median_episodes_to_90pct: Option<f64>,
    pub seeds: Vec<SeedSummary>,
}

impl Summary {
    pub fn new(
        agent: AgentKind,
        config_hash: String,
        episodes: usize,
        oracle: &DpResult,
        runs: &[SeedRun],
    ) -> Self {
        let seeds: Vec<SeedSummary> = runs
            .iter()
            .map(|r| SeedSummary {
                seed: r.seed,
                metric: r.metric,
                greedy_return: r.greedy.total_return,
                greedy_steps: r.greedy.steps(),
                greedy_mean_step_reward: r.greedy.mean_step_reward(),
                greedy_reached_terminal: r.greedy.reached_terminal,
                greedy_cycled: r.greedy.cycled,
            })
            .collect();
        Summary {
            agent: agent.name().to_string(),
            config_hash,
            episodes,
            oracle_return: oracle.optimal_return,
            oracle_steps: oracle.horizon_used,
            oracle_mean_step_reward: oracle.optimal_return / oracle.horizon_used.max(1) as f64,
            median_episodes_to_90pct: median(
                seeds.iter().filter_map(|s| s.metric.episodes_to_90pct),
            ),
            seeds,
        }
    }
}

/// Median of the values, averaging the middle pair for even counts.
pub(crate) fn median(values: impl Iterator<Item = usize>) -> Option<f64> {
    let mut v: Vec<usize> = values.collect();
    if v.is_empty() {
        return None;
    }
    v.sort_unstable();
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid] as f64
    } else {
        (v[mid - 1] + v[mid]) as f64 / 2.0
    })
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

pub fn write_episodes_csv(path: &Path, runs: &[SeedRun]) -> Result<()> {
    let mut w = writer(path)?;
    for run in runs {
        for log in &run.logs {
            w.serialize(EpisodeRow {
                seed: run.seed,
                episode: log.episode,
                total_return: log.total_return,
                steps: log.steps,
                reached_terminal: log.reached_terminal,
            })?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_trajectory_csv(path: &Path, env: &GridWorld, runs: &[SeedRun]) -> Result<()> {
    let mut w = writer(path)?;
    for run in runs {
        for (step, state) in run.greedy.states.iter().enumerate() {
            let cell = env.cell_of(*state);
            let center = env.cell_center(*state)?;
            w.serialize(TrajectoryRow {
                seed: run.seed,
                step,
                cell_i: cell.i,
                cell_j: cell.j,
                x_m: center.x,
                y_m: center.y,
                reward: if step == 0 {
                    0.0
                } else {
                    run.greedy.rewards[step - 1]
                },
            })?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_summary(path: &Path, summary: &Summary) -> Result<()> {
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    csv::Reader::from_reader(file)
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(Error::from)
}

pub fn read_episodes_csv(path: &Path) -> Result<Vec<EpisodeRow>> {
    read_rows(path)
}

pub fn read_trajectory_csv(path: &Path) -> Result<Vec<TrajectoryRow>> {
    read_rows(path)
}

pub fn read_summary(path: &Path) -> Result<Summary> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median([3, 1, 2].into_iter()), Some(2.0));
        assert_eq!(median([4, 1, 2, 3].into_iter()), Some(2.5));
        assert_eq!(median(std::iter::empty()), None);
    }

    #[test]
    fn episode_rows_round_trip_through_csv() {
        use proptest::prelude::*;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(EPISODES_FILE);
        let mut runner = proptest::test_runner::TestRunner::default();
        runner
            .run(
                &proptest::collection::vec(
                    (
                        any::<u64>(),
                        1usize..10_000,
                        any::<f64>().prop_filter("finite", |x| x.is_finite()),
                        0usize..900,
                        any::<bool>(),
                    ),
                    1..40,
                ),
                |rows| {
                    let rows: Vec<EpisodeRow> = rows
                        .into_iter()
                        .map(|(seed, episode, r, steps, reached)| EpisodeRow {
                            seed,
                            episode,
                            total_return: r,
                            steps,
                            reached_terminal: reached,
                        })
                        .collect();
                    let mut w = writer(&path).unwrap();
                    for r in &rows {
                        w.serialize(r).unwrap();
                    }
                    w.flush().unwrap();
                    drop(w);
                    prop_assert_eq!(read_episodes_csv(&path).unwrap(), rows);
                    Ok(())
                },
            )
            .unwrap();
    }
}
