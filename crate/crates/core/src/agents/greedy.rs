use super::Agent;
use crate::gridworld::{Action, GridWorld, StateId};

/// A deterministic rollout of an agent's exploitation policy.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyRollout {
    /// Visited cells, starting with the start cell.
    pub states: Vec<StateId>,
    pub actions: Vec<Action>,
    /// Reward of each step; `rewards[k]` was earned entering `states[k + 1]`.
    pub rewards: Vec<f64>,
    pub total_return: f64,
    pub reached_terminal: bool,
    /// A state repeated, so the stationary policy loops until the budget runs out.
    pub cycled: bool,
    /// Some argmax along the way was a tie resolved by action order.
    pub had_ties: bool,
}

impl GreedyRollout {
    pub fn steps(&self) -> usize {
        self.actions.len()
    }

    /// Average reward per flown step.
    pub fn mean_step_reward(&self) -> f64 {
        if self.actions.is_empty() {
            0.0
        } else {
            self.total_return / self.actions.len() as f64
        }
    }

    pub fn converged(&self) -> bool {
        self.reached_terminal && !self.cycled
    }
}

/// Follows the agent's argmax action from the start cell until the terminal
/// cell or the step budget.
pub fn greedy_policy(agent: &dyn Agent, env: &GridWorld) -> GreedyRollout {
    let mut seen = vec![false; env.n_states()];
    let mut state = env.start();
    seen[state.0] = true;
    let mut rollout = GreedyRollout {
        states: vec![state],
        actions: Vec::new(),
        rewards: Vec::new(),
        total_return: 0.0,
        reached_terminal: false,
        cycled: false,
        had_ties: false,
    };
    for _ in 0..env.max_steps() {
        let (action, tied) = agent.greedy_action(state);
        rollout.had_ties |= tied;
        let out = env.step(state, action);
        rollout.actions.push(action);
        rollout.rewards.push(out.reward);
        rollout.total_return += out.reward;
        rollout.states.push(out.next_state);
        state = out.next_state;
        if out.terminal {
            rollout.reached_terminal = true;
            break;
        }
        if std::mem::replace(&mut seen[state.0], true) {
            rollout.cycled = true;
        }
    }
    rollout
}
