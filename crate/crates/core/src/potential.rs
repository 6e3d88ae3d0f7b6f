//! Scalar potentials on space-time.

use nalgebra::Vector3;

use crate::galilean::{Covector4, Event};
use crate::numdiff;

/// A potential `phi: N -> R`.
///
/// Gradients default to central differences with step `1e-6 (1 + |coordinate|)`;
/// implementations with closed forms should override them.
pub trait Potential: Send + Sync + std::fmt::Debug {
    fn value(&self, x: &Event) -> f64;

    /// Full differential `d phi(x)` as a covector.
    fn gradient(&self, x: &Event) -> Covector4 {
        let g = numdiff::gradient(|c| self.value(&Event::from_coords([c[0], c[1], c[2], c[3]])), &x.coords());
        Covector4([g[0], g[1], g[2], g[3]])
    }

    /// Differential along the simultaneity directions only.
    fn spatial_gradient(&self, x: &Event) -> Vector3<f64> {
        self.gradient(x).spatial()
    }

    /// True when `phi` does not depend on the time coordinate.
    fn is_time_independent(&self) -> bool {
        false
    }
}

/// `phi = 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreePotential;

impl Potential for FreePotential {
    fn value(&self, _x: &Event) -> f64 {
        0.0
    }

    fn gradient(&self, _x: &Event) -> Covector4 {
        Covector4::ZERO
    }

    fn is_time_independent(&self) -> bool {
        true
    }
}

/// Constant force field: `phi(x) = -<F, q>`.
#[derive(Debug, Clone, Copy)]
pub struct UniformForce {
    pub force: Vector3<f64>,
}

impl Potential for UniformForce {
    fn value(&self, x: &Event) -> f64 {
        -self.force.dot(&x.q)
    }

    fn gradient(&self, _x: &Event) -> Covector4 {
        Covector4::from_parts(0.0, -self.force)
    }

    fn is_time_independent(&self) -> bool {
        true
    }
}

/// Isotropic oscillator `phi(x) = k/2 |q - c|^2` (Euclidean in chart coordinates).
#[derive(Debug, Clone, Copy)]
pub struct Harmonic {
    pub k: f64,
    pub center: Vector3<f64>,
}

impl Harmonic {
    pub fn unit() -> Self {
        Harmonic { k: 1.0, center: Vector3::zeros() }
    }
}

impl Potential for Harmonic {
    fn value(&self, x: &Event) -> f64 {
        0.5 * self.k * (x.q - self.center).norm_squared()
    }

    fn gradient(&self, x: &Event) -> Covector4 {
        Covector4::from_parts(0.0, self.k * (x.q - self.center))
    }

    fn is_time_independent(&self) -> bool {
        true
    }
}

/// A potential given by a closure, with finite-difference gradients.
pub struct FnPotential<F> {
    f: F,
    time_independent: bool,
}

impl<F> FnPotential<F>
where
    F: Fn(&Event) -> f64 + Send + Sync,
{
    pub fn new(f: F, time_independent: bool) -> Self {
        FnPotential { f, time_independent }
    }
}

impl<F> std::fmt::Debug for FnPotential<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnPotential").field("time_independent", &self.time_independent).finish()
    }
}

impl<F> Potential for FnPotential<F>
where
    F: Fn(&Event) -> f64 + Send + Sync,
{
    fn value(&self, x: &Event) -> f64 {
        (self.f)(x)
    }

    fn is_time_independent(&self) -> bool {
        self.time_independent
    }
}
