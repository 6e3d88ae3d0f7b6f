//! The four subcommands, returning their output text.

use galimech_core::Error as CoreError;
use nalgebra::Vector3;
use log::info;

use crate::config::{ConfigError, ScenarioConfig};
use crate::report::Report;
use crate::suites::{self, dynamics, generating, Family, Suite};

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CommandError {
    /// 2 for configuration problems, 3 for a non-finite state, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) => 2,
            CommandError::Core(CoreError::NonFiniteState { .. }) => 3,
            CommandError::Core(_) | CommandError::Io(_) => 1,
        }
    }
}

/// Trajectory CSV of the configured motion integrated in frame `frame`.
pub fn simulate(config: &ScenarioConfig, frame: usize) -> Result<String, CommandError> {
    let model = config.model()?;
    let u = config.frame(frame)?;
    info!("integrating {} steps of {} in frame {frame}", config.steps, config.step);
    let traj = model.integrate(&u, &config.initial_state(&model, &u), config.step, config.steps)?;
    Ok(traj.to_csv_string(&model))
}

/// World-lines, momentum offsets and boosted shell states across the configured frames.
pub fn boost_check(config: &ScenarioConfig, corrupt: bool) -> Result<Report, CommandError> {
    if config.frames.len() < 2 {
        return Err(ConfigError::Invalid {
            field: "frames".into(),
            message: format!("boost-check needs at least 2 frames, got {}", config.frames.len()),
        }
        .into());
    }
    let model = config.model()?;
    let tol = &config.tolerances;
    let frames = config.all_frames();
    let x0 = config.initial_event();
    let w0 = Vector3::from(config.initial_velocity);
    info!("integrating in {} frames", frames.len());
    let runs = dynamics::integrate_all(&model, &frames, &x0, &w0, config.step, config.steps)?;
    let tol_events = if config.potential.is_free() { tol.worldline_free } else { tol.worldline };
    let (events, offsets) = dynamics::worldlines(&model, &runs, tol_events, tol.momentum_offset, corrupt);
    let shell = dynamics::trajectory_shell_preservation(&model, &runs, tol.boost_shell, corrupt);
    let h = config.step;
    let equivariance = dynamics::boost_equivariance(
        &model,
        &frames[0],
        &frames[1],
        &config.initial_state(&model, &frames[0]),
        h,
        100,
        tol.boost_membership_factor * h.powi(4),
        corrupt,
    );
    Ok(Report::new(vec![events, offsets, shell, equivariance]))
}

pub fn morse_check(config: &ScenarioConfig, family: Family, seed: u64) -> Result<Report, CommandError> {
    let sc = generating::grid_scenario(config)?;
    info!("checking {family:?} on {} grid points", sc.grid.len());
    Ok(Report::new(generating::family_checks(family, &sc, seed, &config.tolerances)))
}

pub fn invariants(config: &ScenarioConfig, suite: Suite, seed: u64) -> Result<Report, CommandError> {
    config.model()?;
    info!("running suite {suite:?} with seed {seed}");
    Ok(Report::new(suites::run(suite, config, seed)))
}
