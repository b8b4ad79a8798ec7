#![allow(dead_code)]

use std::path::PathBuf;

use qirl::channel::{CarrierConfig, Position3};
use qirl::gridworld::{Cell, EnvConfig, GridSpec, GridWorld, RewardSource};

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join("configs")
        .join(name)
}

pub const GRID_3X3: &str = "grid_3x3.toml";
pub const UAV_10X10: &str = "uav_10x10.toml";

/// A user-free grid with the given rewards; 20 m cells at 100 m altitude.
pub fn tiny_env(
    n1: usize,
    n2: usize,
    rewards: RewardSource,
    start: Cell,
    terminal: Cell,
    max_steps: usize,
) -> qirl::Result<GridWorld> {
    GridWorld::build(EnvConfig {
        grid: GridSpec {
            n1,
            n2,
            cell_size: 20.0,
            origin: Position3::new(10.0, 10.0, 0.0)?,
            altitude: 100.0,
        },
        users: vec![],
        carrier: CarrierConfig::new(2.0e9)?,
        start,
        terminal,
        max_steps,
        total_bandwidth: 10.0e6,
        rewards,
        boundary_penalty: 0.0,
    })
}

pub fn uniform_3x3() -> GridWorld {
    tiny_env(
        3,
        3,
        RewardSource::Constant(1.0),
        Cell::new(0, 0),
        Cell::new(2, 2),
        4,
    )
    .unwrap()
}
