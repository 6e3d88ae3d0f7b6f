//! Scenario configuration loaded from a single JSON file.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use galimech_core::dynamics::PhasePoint;
use galimech_core::potential::{FreePotential, Harmonic, Potential, UniformForce};
use galimech_core::{Event, Frame, NewtonModel, SpatialMetric};
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::ExprPotential;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse config {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("invalid config field `{field}`: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.into(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PotentialSpec {
    #[default]
    Free,
    Uniform {
        force: [f64; 3],
    },
    Harmonic {
        k: f64,
        #[serde(default)]
        center: [f64; 3],
    },
    /// Expression in `t, q1, q2, q3`.
    Custom {
        expr: String,
    },
}

impl PotentialSpec {
    pub fn build(&self) -> Result<Arc<dyn Potential>, ConfigError> {
        Ok(match self {
            PotentialSpec::Free => Arc::new(FreePotential),
            PotentialSpec::Uniform { force } => {
                finite("potential.force", force)?;
                Arc::new(UniformForce { force: Vector3::from(*force) })
            }
            PotentialSpec::Harmonic { k, center } => {
                finite("potential.k", &[*k])?;
                finite("potential.center", center)?;
                Arc::new(Harmonic { k: *k, center: Vector3::from(*center) })
            }
            PotentialSpec::Custom { expr } => {
                Arc::new(ExprPotential::parse(expr).map_err(|e| invalid("potential.expr", e.to_string()))?)
            }
        })
    }

    pub fn is_free(&self) -> bool {
        matches!(self, PotentialSpec::Free)
    }
}

/// Per-check tolerances. Defaults are the acceptance thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub cocycle: f64,
    pub lagrangian_difference: f64,
    pub legendre: f64,
    pub mass_shell: f64,
    pub shell_tangency: f64,
    pub boost_shell: f64,
    pub symplectic: f64,
    /// Membership tolerance is this factor times `h^4`.
    pub boost_membership_factor: f64,
    pub worldline_free: f64,
    pub worldline: f64,
    pub momentum_offset: f64,
    pub energy: f64,
    pub equivalence: f64,
    pub vanishing: f64,
    pub kappa_lift: f64,
    pub hessian_symmetry: f64,
    pub chart: f64,
    pub vector_space: f64,
    pub stationarity: f64,
    pub section_derivative: f64,
    pub section_constant: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cocycle: 1e-12,
            lagrangian_difference: 1e-10,
            legendre: 1e-6,
            mass_shell: 1e-10,
            shell_tangency: 1e-8,
            boost_shell: 1e-12,
            symplectic: 1e-10,
            boost_membership_factor: 10.0,
            worldline_free: 1e-9,
            worldline: 1e-7,
            momentum_offset: 1e-9,
            energy: 1e-8,
            equivalence: 1e-8,
            vanishing: 1e-10,
            kappa_lift: 1e-9,
            hessian_symmetry: 1e-6,
            chart: 1e-10,
            vector_space: 1e-12,
            stationarity: 1e-8,
            section_derivative: 1e-6,
            section_constant: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mass: f64,
    /// Row-major spatial metric.
    pub metric: [[f64; 3]; 3],
    pub potential: PotentialSpec,
    /// Spatial velocities of the frames.
    pub frames: Vec<[f64; 3]>,
    /// `[t, q1, q2, q3]`.
    pub initial_event: [f64; 4],
    /// Spatial velocity of the initial motion.
    pub initial_velocity: [f64; 3],
    pub step: f64,
    pub steps: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            mass: 1.0,
            metric: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            potential: PotentialSpec::Free,
            frames: vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
            initial_event: [0.0; 4],
            initial_velocity: [1.0, 0.0, 0.0],
            step: 1e-3,
            steps: 1000,
            seed: 42,
            tolerances: Tolerances::default(),
        }
    }
}

fn finite(field: &str, values: &[f64]) -> Result<(), ConfigError> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(invalid(field, format!("entries must be finite, got {v}"))),
        None => Ok(()),
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        let config: ScenarioConfig =
            serde_json::from_str(&text).map_err(|source| ConfigError::Parse { path: path.into(), source })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(invalid("mass", format!("must be positive and finite, got {}", self.mass)));
        }
        self.metric()?;
        self.potential.build()?;
        for (i, f) in self.frames.iter().enumerate() {
            finite(&format!("frames[{i}]"), f)?;
        }
        finite("initial_event", &self.initial_event)?;
        finite("initial_velocity", &self.initial_velocity)?;
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(invalid("step", format!("must be positive and finite, got {}", self.step)));
        }
        if self.steps == 0 {
            return Err(invalid("steps", "must be at least 1"));
        }
        Ok(())
    }

    pub fn metric(&self) -> Result<SpatialMetric, ConfigError> {
        let rows: Vec<f64> = self.metric.iter().flatten().copied().collect();
        SpatialMetric::new(Matrix3::from_row_slice(&rows)).map_err(|e| invalid("metric", e.to_string()))
    }

    pub fn model(&self) -> Result<NewtonModel, ConfigError> {
        NewtonModel::new(self.mass, self.metric()?, self.potential.build()?)
            .map_err(|e| invalid("mass", e.to_string()))
    }

    pub fn frame(&self, index: usize) -> Result<Frame, ConfigError> {
        self.frames
            .get(index)
            .map(|v| Frame::new(Vector3::from(*v)))
            .ok_or_else(|| invalid("frames", format!("no frame with index {index} ({} configured)", self.frames.len())))
    }

    pub fn all_frames(&self) -> Vec<Frame> {
        self.frames.iter().map(|v| Frame::new(Vector3::from(*v))).collect()
    }

    pub fn initial_event(&self) -> Event {
        Event::from_coords(self.initial_event)
    }

    /// Initial state in frame `u`: the configured event and the momentum of the
    /// configured velocity as seen from `u`.
    pub fn initial_state(&self, model: &NewtonModel, u: &Frame) -> PhasePoint {
        let w = Frame::new(Vector3::from(self.initial_velocity));
        PhasePoint { x: self.initial_event(), p: model.legendre_inhom(u, &w) }
    }
}
