//! Linear and affine algebra of Newtonian space-time in a fixed global chart.
//!
//! Events are `(t, q1, q2, q3)`. The time covector is `TAU = (1, 0, 0, 0)`, so the
//! simultaneity directions `E0 = ker TAU` are the vectors with vanishing first
//! component and `E0*` is represented by the three spatial components of a
//! covector. Inertial frames are the vectors with `<TAU, u> = 1`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest eigenvalue a spatial metric may have.
pub const PD_EIGENVALUE_FLOOR: f64 = 1e-12;

/// Element of the model vector space `V`. Component 0 is the time component.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vector4(pub [f64; 4]);

/// Element of `V*`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Covector4(pub [f64; 4]);

/// The time covector.
pub const TAU: Covector4 = Covector4([1.0, 0.0, 0.0, 0.0]);

macro_rules! four_vector_ops {
    ($ty:ident) => {
        impl $ty {
            pub const ZERO: $ty = $ty([0.0; 4]);

            pub fn new(c0: f64, c1: f64, c2: f64, c3: f64) -> Self {
                $ty([c0, c1, c2, c3])
            }

            pub fn from_parts(time: f64, spatial: Vector3<f64>) -> Self {
                $ty([time, spatial.x, spatial.y, spatial.z])
            }

            /// Component along the time direction.
            pub fn time(&self) -> f64 {
                self.0[0]
            }

            /// The three spatial components.
            pub fn spatial(&self) -> Vector3<f64> {
                Vector3::new(self.0[1], self.0[2], self.0[3])
            }

            pub fn is_finite(&self) -> bool {
                self.0.iter().all(|c| c.is_finite())
            }

            /// Largest absolute component.
            pub fn max_abs(&self) -> f64 {
                self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
            }
        }

        impl Add for $ty {
            type Output = $ty;
            fn add(self, rhs: $ty) -> $ty {
                $ty(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
            }
        }

        impl AddAssign for $ty {
            fn add_assign(&mut self, rhs: $ty) {
                for i in 0..4 {
                    self.0[i] += rhs.0[i];
                }
            }
        }

        impl Sub for $ty {
            type Output = $ty;
            fn sub(self, rhs: $ty) -> $ty {
                $ty(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
            }
        }

        impl Neg for $ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                $ty(self.0.map(|c| -c))
            }
        }

        impl Mul<$ty> for f64 {
            type Output = $ty;
            fn mul(self, rhs: $ty) -> $ty {
                $ty(rhs.0.map(|c| self * c))
            }
        }
    };
}

four_vector_ops!(Vector4);
four_vector_ops!(Covector4);

impl Covector4 {
    /// The canonical pairing `<self, v>`.
    pub fn pair(&self, v: &Vector4) -> f64 {
        self.0.iter().zip(v.0.iter()).map(|(a, c)| a * c).sum()
    }
}

/// A point of space-time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub t: f64,
    pub q: Vector3<f64>,
}

impl Event {
    pub fn new(t: f64, q1: f64, q2: f64, q3: f64) -> Self {
        Event { t, q: Vector3::new(q1, q2, q3) }
    }

    pub fn origin() -> Self {
        Event { t: 0.0, q: Vector3::zeros() }
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.t, self.q.x, self.q.y, self.q.z]
    }

    pub fn from_coords(c: [f64; 4]) -> Self {
        Event::new(c[0], c[1], c[2], c[3])
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.q.iter().all(|c| c.is_finite())
    }
}

impl Sub for Event {
    type Output = Vector4;
    fn sub(self, rhs: Event) -> Vector4 {
        Vector4::from_parts(self.t - rhs.t, self.q - rhs.q)
    }
}

impl Add<Vector4> for Event {
    type Output = Event;
    fn add(self, v: Vector4) -> Event {
        Event { t: self.t + v.time(), q: self.q + v.spatial() }
    }
}

/// Euclidean metric `g: E0 -> E0*` on the simultaneity directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialMetric {
    matrix: Matrix3<f64>,
    inverse: Matrix3<f64>,
}

impl SpatialMetric {
    /// Validates symmetry and positive definiteness.
    pub fn new(matrix: Matrix3<f64>) -> Result<Self> {
        if matrix.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidMetric("non-finite entry".into()));
        }
        let scale = matrix.amax().max(1.0);
        if (matrix - matrix.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidMetric("matrix is not symmetric".into()));
        }
        let min_eig = SymmetricEigen::new(matrix).eigenvalues.min();
        if min_eig <= PD_EIGENVALUE_FLOOR {
            return Err(Error::InvalidMetric(format!(
                "matrix is not positive definite (smallest eigenvalue {min_eig:e})"
            )));
        }
        let inverse = matrix
            .try_inverse()
            .ok_or_else(|| Error::InvalidMetric("matrix is singular".into()))?;
        Ok(SpatialMetric { matrix, inverse })
    }

    pub fn identity() -> Self {
        SpatialMetric { matrix: Matrix3::identity(), inverse: Matrix3::identity() }
    }

    pub fn diagonal(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(Matrix3::from_diagonal(&Vector3::new(a, b, c)))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    pub fn inverse_matrix(&self) -> &Matrix3<f64> {
        &self.inverse
    }

    /// `g(v)` for `v` in `E0`.
    pub fn lower(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.matrix * v
    }

    /// `g^{-1}(a)` for `a` in `E0*`.
    pub fn raise(&self, a: &Vector3<f64>) -> Vector3<f64> {
        self.inverse * a
    }

    /// `<g(v), v>`.
    pub fn norm_sq(&self, v: &Vector3<f64>) -> f64 {
        v.dot(&(self.matrix * v))
    }

    /// `<a, g^{-1}(a)>`.
    pub fn dual_norm_sq(&self, a: &Vector3<f64>) -> f64 {
        a.dot(&(self.inverse * a))
    }
}

impl Default for SpatialMetric {
    fn default() -> Self {
        Self::identity()
    }
}

/// An inertial frame: an element of `E1 = {v : <TAU, v> = 1}`.
///
/// Also used for particle velocities, which live in the same affine space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame(Vector4);

impl Frame {
    /// Frame moving with the given spatial velocity relative to the chart.
    pub fn new(velocity: Vector3<f64>) -> Self {
        Frame(Vector4::from_parts(1.0, velocity))
    }

    /// The chart's own rest frame `(1, 0, 0, 0)`.
    pub fn rest() -> Self {
        Frame(Vector4([1.0, 0.0, 0.0, 0.0]))
    }

    /// Accepts `v` when `|<TAU, v> - 1| <= 1e-12`; the time component is then set to 1.
    pub fn from_vector(v: Vector4) -> Result<Self> {
        if !v.is_finite() || (v.time() - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnitTime { tau_v: v.time() });
        }
        Ok(Frame::new(v.spatial()))
    }

    pub fn velocity(&self) -> Vector3<f64> {
        self.0.spatial()
    }

    pub fn vector(&self) -> Vector4 {
        self.0
    }

    /// Affine midpoint `(self + other) / 2`, again a frame.
    pub fn midpoint(&self, other: &Frame) -> Frame {
        Frame::new(0.5 * (self.velocity() + other.velocity()))
    }
}

/// Time elapsed from `x_prime` to `x`: `<TAU, x - x_prime>`.
pub fn time_between(x: &Event, x_prime: &Event) -> f64 {
    TAU.pair(&(*x - *x_prime))
}

/// Distance between two simultaneous events.
pub fn spatial_distance(x: &Event, x_prime: &Event, g: &SpatialMetric) -> Result<f64> {
    let dt = time_between(x, x_prime);
    if dt.abs() >= 1e-12 * (1.0 + x.t.abs().max(x_prime.t.abs())) {
        return Err(Error::NotSimultaneous { dt });
    }
    let d = (*x - *x_prime).spatial();
    Ok(g.norm_sq(&d).sqrt())
}

/// Projection `v - <TAU, v> u` onto `E0` along the frame.
pub fn iota_u(u: &Frame, v: &Vector4) -> Vector4 {
    *v - v.time() * u.vector()
}

/// Dual of [`iota_u`]: embeds `a` in `E0*` into `V*` as the covector
/// `v -> <a, iota_u(v)>`.
pub fn iota_u_star(u: &Frame, a: &Vector3<f64>) -> Covector4 {
    Covector4::from_parts(-a.dot(&u.velocity()), *a)
}

/// Canonical restriction `V* -> E0*`.
pub fn iota_star(p: &Covector4) -> Vector3<f64> {
    p.spatial()
}

/// `v -> (iota_u(v), <TAU, v>)`.
pub fn split(u: &Frame, v: &Vector4) -> (Vector3<f64>, f64) {
    (iota_u(u, v).spatial(), v.time())
}

/// Inverse of [`split`].
pub fn unsplit(u: &Frame, spatial: &Vector3<f64>, time: f64) -> Vector4 {
    Vector4::from_parts(0.0, *spatial) + time * u.vector()
}

/// `p -> (iota*(p), <p, u>)`; the second slot is the frame energy.
pub fn cosplit(u: &Frame, p: &Covector4) -> (Vector3<f64>, f64) {
    (iota_star(p), p.pair(&u.vector()))
}

/// Inverse of [`cosplit`].
pub fn uncosplit(u: &Frame, spatial: &Vector3<f64>, frame_energy: f64) -> Covector4 {
    Covector4::from_parts(frame_energy - spatial.dot(&u.velocity()), *spatial)
}

/// The degenerate contravariant tensor `iota o g^{-1} o iota*`. Its kernel is spanned by `TAU`.
pub fn g_prime(g: &SpatialMetric, p: &Covector4) -> Vector4 {
    Vector4::from_parts(0.0, g.raise(&p.spatial()))
}

/// The cocycle `sigma(u', u) = iota*_{(u'+u)/2}(g(u' - u))`.
pub fn sigma(g: &SpatialMetric, u_prime: &Frame, u: &Frame) -> Covector4 {
    let dv = u_prime.velocity() - u.velocity();
    iota_u_star(&u_prime.midpoint(u), &g.lower(&dv))
}
