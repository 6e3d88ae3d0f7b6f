//! Seeded random inputs for the property checks.

use std::sync::Arc;

use galimech_core::potential::{FreePotential, Harmonic, Potential, UniformForce};
use galimech_core::{Covector4, Event, Frame, NewtonModel, SpatialMetric, Vector4};
use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn uniform(rng: &mut ChaCha8Rng, half_width: f64) -> f64 {
    rng.random_range(-half_width..half_width)
}

pub fn vec3(rng: &mut ChaCha8Rng, half_width: f64) -> Vector3<f64> {
    Vector3::new(uniform(rng, half_width), uniform(rng, half_width), uniform(rng, half_width))
}

pub fn frame(rng: &mut ChaCha8Rng) -> Frame {
    Frame::new(vec3(rng, 2.0))
}

pub fn event(rng: &mut ChaCha8Rng) -> Event {
    Event { t: uniform(rng, 5.0), q: vec3(rng, 3.0) }
}

pub fn future_vector(rng: &mut ChaCha8Rng) -> Vector4 {
    Vector4::from_parts(rng.random_range(0.3..3.0), vec3(rng, 3.0))
}

pub fn covector(rng: &mut ChaCha8Rng) -> Covector4 {
    Covector4::new(uniform(rng, 3.0), uniform(rng, 3.0), uniform(rng, 3.0), uniform(rng, 3.0))
}

/// `A^T A + I/2` with `A` uniform in `[-1, 1]`.
pub fn spd_metric(rng: &mut ChaCha8Rng) -> SpatialMetric {
    let a = Matrix3::from_fn(|_, _| uniform(rng, 1.0));
    SpatialMetric::new(a.transpose() * a + 0.5 * Matrix3::identity()).expect("shifted Gram matrices are SPD")
}

/// Free, uniform-force or harmonic, by `kind % 3`.
pub fn potential(rng: &mut ChaCha8Rng, kind: usize) -> Arc<dyn Potential> {
    match kind % 3 {
        0 => Arc::new(FreePotential),
        1 => Arc::new(UniformForce { force: vec3(rng, 2.0) }),
        _ => Arc::new(Harmonic { k: rng.random_range(0.1..3.0), center: vec3(rng, 1.0) }),
    }
}

pub fn model(rng: &mut ChaCha8Rng) -> NewtonModel {
    let kind = rng.random_range(0..3);
    let mass = rng.random_range(0.2..5.0);
    let g = spd_metric(rng);
    NewtonModel::new(mass, g, potential(rng, kind)).expect("sampled masses are positive")
}

/// `max_i |a_i - b_i| / max(1, |b_i|)`.
pub fn rel_err_slice(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| galimech_core::numdiff::rel_err(*x, *y)).fold(0.0, f64::max)
}

/// The configured frames, padded with sampled ones up to `count`.
pub fn frames_at_least(frames: &[Frame], count: usize, seed: u64) -> Vec<Frame> {
    let mut out = frames.to_vec();
    let mut r = rng(seed, 0xF7A3);
    while out.len() < count {
        out.push(frame(&mut r));
    }
    out
}
