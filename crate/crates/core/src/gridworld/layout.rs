//! TOML environment layout files.
//!
//! ```toml
//! [grid]
//! n1 = 10
//! n2 = 10
//! cell_size = 20.0          # meters, V·T
//! origin = [10.0, 10.0]     # center of cell (0, 0)
//! altitude = 100.0
//!
//! [episode]
//! start = [0, 9]
//! terminal = [9, 0]
//! max_steps = 900           # or flight_time + slot_duration
//!
//! [channel]
//! carrier_freq = 2.0e9
//! total_bandwidth = 10.0e6
//! boundary_penalty = 0.0    # optional
//!
//! [[users]]
//! x = 30.0
//! y = 150.0
//! tx_power = 1.0
//! noise_power = 1.0
//! bandwidth = 2.0e6
//!
//! [rewards]                 # optional synthetic override
//! constant = 1.0            # or table = [[row j = 0], [row j = 1], ...]
//! ```
//!
//! An `[agents]` table may also be present; it is read by the harness.

use std::ops::Range;
use std::path::Path;

use serde::Deserialize;
use toml::Spanned;

use super::{Cell, ConfigField, EnvConfig, GridSpec, RewardSource};
use crate::channel::{CarrierConfig, GroundUser, Position3};
use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayout {
    grid: Spanned<RawGrid>,
    episode: Spanned<RawEpisode>,
    channel: Spanned<RawChannel>,
    #[serde(default)]
    users: Vec<Spanned<RawUser>>,
    rewards: Option<Spanned<RawRewards>>,
    #[serde(default)]
    #[allow(dead_code)]
    agents: Option<toml::Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    n1: Spanned<usize>,
    n2: Spanned<usize>,
    cell_size: Spanned<f64>,
    origin: Spanned<[f64; 2]>,
    altitude: Spanned<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEpisode {
    start: Spanned<[usize; 2]>,
    terminal: Spanned<[usize; 2]>,
    max_steps: Option<Spanned<usize>>,
    /// Total flight time `E` in seconds.
    flight_time: Option<Spanned<f64>>,
    /// Slot length `T` in seconds.
    slot_duration: Option<Spanned<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    carrier_freq: Spanned<f64>,
    total_bandwidth: Spanned<f64>,
    #[serde(default)]
    boundary_penalty: Option<Spanned<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUser {
    x: f64,
    y: f64,
    tx_power: f64,
    noise_power: f64,
    bandwidth: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRewards {
    constant: Option<f64>,
    table: Option<Vec<Vec<f64>>>,
}

/// A parsed layout file.
#[derive(Debug, Clone)]
pub struct Layout {
    pub env: EnvConfig,
    /// Raw `[agents]` table, if any.
    pub agents: Option<toml::Value>,
}

pub fn load_layout(path: &Path) -> Result<Layout> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_layout(&text)
}

pub fn parse_layout(text: &str) -> Result<Layout> {
    let raw: RawLayout = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| line_of(text, s.start));
        Error::config(line, e.message().to_string())
    })?;
    let at = |span: Range<usize>| Some(line_of(text, span.start));

    let grid = raw.grid.get_ref();
    let origin = grid.origin.get_ref();
    let episode = raw.episode.get_ref();
    let channel = raw.channel.get_ref();

    let carrier = CarrierConfig::new(*channel.carrier_freq.get_ref())
        .map_err(|e| Error::config(at(channel.carrier_freq.span()), e.to_string()))?;

    let users = raw
        .users
        .iter()
        .map(|u| {
            let r = u.get_ref();
            GroundUser::new(r.x, r.y, r.tx_power, r.noise_power, r.bandwidth)
                .map_err(|e| Error::config(at(u.span()), e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;

    let max_steps = match (
        &episode.max_steps,
        &episode.flight_time,
        &episode.slot_duration,
    ) {
        (Some(m), None, None) => *m.get_ref(),
        (None, Some(e), Some(t)) => {
            let (e_val, t_val) = (*e.get_ref(), *t.get_ref());
            if !(e_val.is_finite() && e_val >= 0.0 && t_val.is_finite() && t_val > 0.0) {
                return Err(Error::config(
                    at(t.span()),
                    "flight_time must be non-negative and slot_duration positive",
                ));
            }
            (e_val / t_val).floor() as usize
        }
        _ => {
            return Err(Error::config(
                at(raw.episode.span()),
                "episode needs either max_steps or both flight_time and slot_duration",
            ))
        }
    };

    let rewards = match raw.rewards.as_ref().map(|r| (r, r.get_ref())) {
        None => RewardSource::Channel,
        Some((
            _,
            RawRewards {
                constant: Some(c),
                table: None,
            },
        )) => RewardSource::Constant(*c),
        Some((
            _,
            RawRewards {
                constant: None,
                table: Some(rows),
            },
        )) => {
            let n1 = *grid.n1.get_ref();
            let mut flat = Vec::with_capacity(rows.len() * n1);
            for row in rows {
                if row.len() != n1 {
                    return Err(Error::config(
                        at(raw.rewards.as_ref().unwrap().span()),
                        format!(
                            "reward table row has {} entries, expected n1 = {n1}",
                            row.len()
                        ),
                    ));
                }
                flat.extend_from_slice(row);
            }
            RewardSource::Table(flat)
        }
        Some((span, _)) => {
            return Err(Error::config(
                at(span.span()),
                "rewards needs exactly one of `constant` or `table`",
            ))
        }
    };

    let env = EnvConfig {
        grid: GridSpec {
            n1: *grid.n1.get_ref(),
            n2: *grid.n2.get_ref(),
            cell_size: *grid.cell_size.get_ref(),
            origin: Position3 {
                x: origin[0],
                y: origin[1],
                z: 0.0,
            },
            altitude: *grid.altitude.get_ref(),
        },
        users,
        carrier,
        start: Cell::new(episode.start.get_ref()[0], episode.start.get_ref()[1]),
        terminal: Cell::new(episode.terminal.get_ref()[0], episode.terminal.get_ref()[1]),
        max_steps,
        total_bandwidth: *channel.total_bandwidth.get_ref(),
        rewards,
        boundary_penalty: channel
            .boundary_penalty
            .as_ref()
            .map_or(0.0, |p| *p.get_ref()),
    };

    if let Err(violation) = env.validate() {
        let span = match violation.field {
            ConfigField::GridSize => grid.n1.span(),
            ConfigField::CellSize => grid.cell_size.span(),
            ConfigField::Altitude => grid.altitude.span(),
            ConfigField::Origin => grid.origin.span(),
            ConfigField::Start => episode.start.span(),
            ConfigField::Terminal => episode.terminal.span(),
            ConfigField::MaxSteps => episode
                .max_steps
                .as_ref()
                .map_or_else(|| raw.episode.span(), |m| m.span()),
            ConfigField::TotalBandwidth => channel.total_bandwidth.span(),
            ConfigField::Users => raw.users.first().map_or(0..0, |u| u.span()),
            ConfigField::Rewards => raw.rewards.as_ref().map_or(0..0, |r| r.span()),
            ConfigField::BoundaryPenalty => {
                channel.boundary_penalty.as_ref().map_or(0..0, |p| p.span())
            }
        };
        return Err(Error::config(at(span), violation.message));
    }

    Ok(Layout {
        env,
        agents: raw.agents,
    })
}

/// 1-based line containing byte offset `pos`.
pub(crate) fn line_of(text: &str, pos: usize) -> usize {
    text[..pos.min(text.len())].matches('\n').count() + 1
}
