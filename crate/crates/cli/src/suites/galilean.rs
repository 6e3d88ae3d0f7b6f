//! Space-time structure: the cocycle `sigma`, the lagrangian-difference identity,
//! `g'` and the spatial projection.

use galimech_core::galilean::{g_prime, iota_u, sigma};
use galimech_core::{Covector4, SpatialMetric, Vector4, Frame, TAU};

use super::sample::{self, rel_err_slice};
use crate::report::{max_err, Check};

/// Direct transcription of `sigma(u', u) = iota*_{(u+u')/2}(g(u' - u))`.
fn sigma_oracle(g: &SpatialMetric, u_prime: &Frame, u: &Frame) -> Covector4 {
    let a = g.matrix() * (u_prime.velocity() - u.velocity());
    let mid = 0.5 * (u_prime.velocity() + u.velocity());
    Covector4::new(-a.dot(&mid), a[0], a[1], a[2])
}

/// `sigma(u', u) = -sigma(u, u')` and agreement with the defining formula.
pub fn sigma_antisymmetry(seed: u64, n: usize, tol: f64) -> Check {
    let mut rng = sample::rng(seed, 101);
    let err = max_err((0..n).map(|_| {
        let g = sample::spd_metric(&mut rng);
        let (u, u2) = (sample::frame(&mut rng), sample::frame(&mut rng));
        let s = sigma(&g, &u2, &u);
        rel_err_slice(&s.0, &(-sigma(&g, &u, &u2)).0).max(rel_err_slice(&s.0, &sigma_oracle(&g, &u2, &u).0))
    }));
    Check::new("sigma_antisymmetry", err, tol, n)
}

/// `sigma(u'', u') + sigma(u', u) = sigma(u'', u)`.
pub fn sigma_cocycle(seed: u64, n: usize, tol: f64) -> Check {
    let mut rng = sample::rng(seed, 102);
    let err = max_err((0..n).map(|_| {
        let g = sample::spd_metric(&mut rng);
        let (u, u1, u2) = (sample::frame(&mut rng), sample::frame(&mut rng), sample::frame(&mut rng));
        let lhs = sigma(&g, &u2, &u1) + sigma(&g, &u1, &u);
        rel_err_slice(&lhs.0, &sigma(&g, &u2, &u).0)
    }));
    Check::new("sigma_cocycle", err, tol, n)
}

/// `l_{h,u}(x,v) - l_{h,u'}(x,v) = m <sigma(u',u), v>`.
pub fn lagrangian_difference(seed: u64, n: usize, tol: f64) -> Check {
    let mut rng = sample::rng(seed, 103);
    let err = max_err((0..n).map(|_| {
        let model = sample::model(&mut rng);
        let (u, u2) = (sample::frame(&mut rng), sample::frame(&mut rng));
        let x = sample::event(&mut rng);
        let v = sample::future_vector(&mut rng);
        let diff = model.lagrangian_hom(&u, &x, &v).unwrap() - model.lagrangian_hom(&u2, &x, &v).unwrap();
        let expected = model.mass() * sigma(model.metric(), &u2, &u).pair(&v);
        galimech_core::numdiff::rel_err(diff, expected)
    }));
    Check::new("lagrangian_difference", err, tol, n)
}

/// `g'(tau) = 0`, and `g'` inverts `g` on covectors vanishing on `u_ref`.
pub fn g_prime_structure(seed: u64, n: usize, tol: f64) -> Check {
    let mut rng = sample::rng(seed, 104);
    let err = max_err((0..n).map(|_| {
        let g = sample::spd_metric(&mut rng);
        let a = sample::vec3(&mut rng, 3.0);
        let kernel = g_prime(&g, &(sample::uniform(&mut rng, 3.0) * TAU)).max_abs();
        let raised = g_prime(&g, &Covector4::from_parts(0.0, a));
        let lowered = g.matrix() * raised.spatial();
        kernel.max(raised.time().abs()).max(rel_err_slice(lowered.as_slice(), a.as_slice()))
    }));
    Check::new("g_prime_structure", err, tol, n)
}

/// `iota_u(v) = v` for simultaneity directions `v`.
pub fn iota_idempotent(seed: u64, n: usize) -> Check {
    let mut rng = sample::rng(seed, 105);
    let err = max_err((0..n).map(|_| {
        let u = sample::frame(&mut rng);
        let v = Vector4::from_parts(0.0, sample::vec3(&mut rng, 5.0));
        (iota_u(&u, &v) - v).max_abs()
    }));
    Check::new("iota_idempotent_on_E0", err, 0.0, n)
}

pub fn run(seed: u64, tol: &crate::config::Tolerances) -> Vec<Check> {
    vec![
        sigma_antisymmetry(seed, 1000, tol.cocycle),
        sigma_cocycle(seed, 1000, tol.cocycle),
        lagrangian_difference(seed, 1000, tol.lagrangian_difference),
        g_prime_structure(seed, 200, tol.cocycle),
        iota_idempotent(seed, 200),
    ]
}
