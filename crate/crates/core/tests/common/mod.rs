#![allow(dead_code)]

use std::sync::Arc;

use galimech_core::potential::{Harmonic, Potential, UniformForce};
use galimech_core::{Covector4, Event, Frame, NewtonModel, SpatialMetric, Vector4};
use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;

pub fn vec3(range: f64) -> impl Strategy<Value = Vector3<f64>> {
    prop::array::uniform3(-range..range).prop_map(Vector3::from)
}

pub fn frame() -> impl Strategy<Value = Frame> {
    vec3(2.0).prop_map(Frame::new)
}

pub fn event() -> impl Strategy<Value = Event> {
    (-5.0..5.0f64, vec3(5.0)).prop_map(|(t, q)| Event { t, q })
}

pub fn future_vector() -> impl Strategy<Value = Vector4> {
    (0.3..3.0f64, vec3(3.0)).prop_map(|(t, s)| Vector4::from_parts(t, s))
}

pub fn covector() -> impl Strategy<Value = Covector4> {
    prop::array::uniform4(-3.0..3.0f64).prop_map(Covector4)
}

/// `A^T A + I/2` for a random `A`.
pub fn spd_metric() -> impl Strategy<Value = SpatialMetric> {
    prop::array::uniform9(-1.0..1.0f64).prop_map(|a| {
        let a = Matrix3::from_row_slice(&a);
        SpatialMetric::new(a.transpose() * a + 0.5 * Matrix3::identity()).unwrap()
    })
}

pub fn potential() -> impl Strategy<Value = Arc<dyn Potential>> {
    prop_oneof![
        Just(Arc::new(galimech_core::potential::FreePotential) as Arc<dyn Potential>),
        vec3(2.0).prop_map(|force| Arc::new(UniformForce { force }) as Arc<dyn Potential>),
        (0.1..3.0f64, vec3(1.0)).prop_map(|(k, center)| Arc::new(Harmonic { k, center }) as Arc<dyn Potential>),
    ]
}

pub fn model() -> impl Strategy<Value = NewtonModel> {
    (0.2..5.0f64, spd_metric(), potential()).prop_map(|(m, g, phi)| NewtonModel::new(m, g, phi).unwrap())
}

/// Direct transcription of `sigma(u', u) = iota*_{(u+u')/2}(g(u' - u))`.
pub fn sigma_oracle(g: &SpatialMetric, u_prime: &Frame, u: &Frame) -> Covector4 {
    let a = g.matrix() * (u_prime.velocity() - u.velocity());
    let mid = 0.5 * (u_prime.velocity() + u.velocity());
    Covector4::new(-a.dot(&mid), a[0], a[1], a[2])
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

pub fn max_rel4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    (0..4).map(|i| rel(a[i], b[i])).fold(0.0, f64::max)
}
