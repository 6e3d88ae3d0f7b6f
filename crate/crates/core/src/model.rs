use std::sync::Arc;

use crate::error::{Error, Result};
use crate::galilean::{Frame, SpatialMetric};
use crate::potential::{FreePotential, Potential};

/// One massive particle in Newtonian space-time: mass, spatial metric and potential.
///
/// Frame-dependent quantities take the frame as an argument. Frame-independent
/// classes are stored in the reference chart [`NewtonModel::reference_frame`].
#[derive(Debug, Clone)]
pub struct NewtonModel {
    mass: f64,
    metric: SpatialMetric,
    potential: Arc<dyn Potential>,
}

impl NewtonModel {
    pub fn new(mass: f64, metric: SpatialMetric, potential: Arc<dyn Potential>) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidMass(mass));
        }
        Ok(NewtonModel { mass, metric, potential })
    }

    /// Unit mass, Euclidean metric, no potential.
    pub fn free_unit() -> Self {
        NewtonModel { mass: 1.0, metric: SpatialMetric::identity(), potential: Arc::new(FreePotential) }
    }

    pub fn with_potential(&self, potential: Arc<dyn Potential>) -> Self {
        NewtonModel { potential, ..self.clone() }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn metric(&self) -> &SpatialMetric {
        &self.metric
    }

    pub fn potential(&self) -> &dyn Potential {
        self.potential.as_ref()
    }

    pub fn potential_arc(&self) -> Arc<dyn Potential> {
        Arc::clone(&self.potential)
    }

    /// The chart in which class representatives are stored.
    pub fn reference_frame(&self) -> Frame {
        Frame::rest()
    }
}
