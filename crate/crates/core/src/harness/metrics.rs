use serde::{Deserialize, Serialize};

use super::EpisodeLog;
use crate::agents::GreedyRollout;
use crate::oracle::DpResult;

/// Window of the return moving average.
pub const MOVING_AVERAGE_WINDOW: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceMetric {
    /// First episode whose moving average reaches 90% of the final moving
    /// average; `None` with fewer than [`MOVING_AVERAGE_WINDOW`] episodes.
    pub episodes_to_90pct: Option<usize>,
    /// Moving average over the last window.
    pub final_return_mean: Option<f64>,
    /// `(oracle − greedy) / oracle`; 1 when the greedy rollout never reaches
    /// the terminal cell.
    pub oracle_gap: f64,
}

/// Trailing means over full windows: entry `k` averages episodes
/// `k + 1 ..= k + window` (1-based).
pub fn moving_average(returns: &[f64], window: usize) -> Vec<f64> {
    if window == 0 || returns.len() < window {
        return Vec::new();
    }
    returns
        .windows(window)
        .map(|w| w.iter().sum::<f64>() / window as f64)
        .collect()
}

pub fn convergence_metrics(
    logs: &[EpisodeLog],
    greedy: &GreedyRollout,
    oracle: &DpResult,
) -> ConvergenceMetric {
    let returns: Vec<f64> = logs.iter().map(|l| l.total_return).collect();
    let oracle_gap = oracle_gap(
        greedy.reached_terminal,
        greedy.total_return,
        oracle.optimal_return,
    );
    let (episodes_to_90pct, final_return_mean) = curve_summary(&returns);
    ConvergenceMetric {
        episodes_to_90pct,
        final_return_mean,
        oracle_gap,
    }
}

/// `(episodes_to_90pct, final_return_mean)` of a return curve.
pub fn curve_summary(returns: &[f64]) -> (Option<usize>, Option<f64>) {
    let ma = moving_average(returns, MOVING_AVERAGE_WINDOW);
    let Some(&last) = ma.last() else {
        return (None, None);
    };
    let threshold = 0.9 * last;
    let first = ma
        .iter()
        .position(|m| *m >= threshold)
        .map(|k| k + MOVING_AVERAGE_WINDOW);
    (first, Some(last))
}

pub(crate) fn oracle_gap(reached_terminal: bool, greedy_return: f64, oracle_return: f64) -> f64 {
    if !reached_terminal {
        return 1.0;
    }
    (oracle_return - greedy_return) / oracle_return
}

#[cfg(test)]
mod tests {
    use super::*;

    fn logs(returns: &[f64]) -> Vec<EpisodeLog> {
        returns
            .iter()
            .enumerate()
            .map(|(k, r)| EpisodeLog {
                episode: k + 1,
                total_return: *r,
                steps: 1,
                reached_terminal: true,
            })
            .collect()
    }

    fn rollout(total: f64, reached: bool) -> GreedyRollout {
        GreedyRollout {
            states: vec![],
            actions: vec![],
            rewards: vec![],
            total_return: total,
            reached_terminal: reached,
            cycled: false,
            had_ties: false,
        }
    }

    fn oracle(v: f64) -> DpResult {
        DpResult {
            optimal_return: v,
            optimal_path: vec![],
            actions: vec![],
            horizon_used: 0,
            feasible: true,
        }
    }

    #[test]
    fn flat_curve_converges_at_the_window() {
        let m = convergence_metrics(&logs(&[5.0; 200]), &rollout(13.0, true), &oracle(13.0));
        assert_eq!(m.episodes_to_90pct, Some(MOVING_AVERAGE_WINDOW));
        assert_eq!(m.final_return_mean, Some(5.0));
        assert_eq!(m.oracle_gap, 0.0);
    }

    #[test]
    fn step_curve_by_hand() {
        // MA at episode e is c·(e − 100)/50 for 100 < e < 150; ≥ 0.9c once e ≥ 145
        let mut r = vec![0.0; 100];
        r.extend(std::iter::repeat(4.0).take(300));
        let (first, last) = curve_summary(&r);
        assert_eq!(last, Some(4.0));
        let first = first.unwrap();
        assert!((101..=101 + MOVING_AVERAGE_WINDOW).contains(&first));
        assert_eq!(first, 145);
    }

    #[test]
    fn short_runs_are_undefined() {
        let m = convergence_metrics(&logs(&[1.0; 49]), &rollout(1.0, true), &oracle(2.0));
        assert_eq!(m.episodes_to_90pct, None);
        assert_eq!(m.final_return_mean, None);
        assert_eq!(m.oracle_gap, 0.5);
    }

    #[test]
    fn non_terminal_rollout_has_full_gap() {
        assert_eq!(oracle_gap(false, 100.0, 13.0), 1.0);
        assert_eq!(oracle_gap(true, 13.0, 13.0), 0.0);
    }

    #[test]
    fn moving_average_windows() {
        assert_eq!(
            moving_average(&[1.0, 2.0, 3.0, 4.0], 2),
            vec![1.5, 2.5, 3.5]
        );
        assert!(moving_average(&[1.0], 2).is_empty());
    }
}
