//! Frame mechanics: Legendre maps, mass shells, boosts, world-lines and energy.

use galimech_core::dynamics::{CotangentPoint, HomogeneousTangent, PhasePoint, Trajectory};
use galimech_core::galilean::{iota_star, sigma};
use galimech_core::numdiff;
use galimech_core::{Covector4, Event, Frame, NewtonModel, Vector4};
use nalgebra::Vector3;

use super::sample::{self, rel_err_slice};
use crate::report::{max_err, Check};

/// Fraction by which the corrupted boost over-shifts momenta.
pub const CORRUPTION: f64 = 1e-2;

/// The boost `p -> p + m sigma(u', u)`, optionally with a deliberately wrong cocycle.
pub fn boost(model: &NewtonModel, u_prime: &Frame, u: &Frame, c: &CotangentPoint, corrupt: bool) -> CotangentPoint {
    let b = model.boost(u_prime, u, c);
    if corrupt {
        let extra = CORRUPTION * model.mass() * sigma(model.metric(), u_prime, u);
        CotangentPoint { x: b.x, p: b.p + extra }
    } else {
        b
    }
}

/// Legendre maps against central differences of their lagrangians.
pub fn legendre_consistency(seed: u64, n: usize, tol: f64) -> Check {
    let mut rng = sample::rng(seed, 201);
    let err = max_err((0..n).map(|_| {
        let model = sample::model(&mut rng);
        let u = sample::frame(&mut rng);
        let x = sample::event(&mut rng);
        let v = sample::future_vector(&mut rng);
        let w = sample::vec3(&mut rng, 3.0);
        let hom = model.legendre_hom(&u, &x, &v).unwrap();
        let fd = numdiff::gradient(|c| model.lagrangian_hom(&u, &x, &Vector4([c[0], c[1], c[2], c[3]])).unwrap(), &v.0);
        let inhom = model.legendre_inhom(&u, &Frame::new(w));
        let fdi = numdiff::gradient(
            |c| model.lagrangian_inhom(&u, &x, &Frame::new(Vector3::new(c[0], c[1], c[2]))),
            w.as_slice(),
        );
        rel_err_slice(&hom.0, &fd).max(rel_err_slice(inhom.as_slice(), &fdi))
    }));
    Check::new("legendre_finite_differences", err, tol, n)
}

/// Every Legendre image satisfies the mass-shell equation; `n` samples per potential kind.
pub fn mass_shell_legendre(seed: u64, n: usize, tol: f64) -> Check {
    let mut rng = sample::rng(seed, 202);
    let mut errs = Vec::with_capacity(3 * n);
    for kind in 0..3 {
        for _ in 0..n {
            let phi = sample::potential(&mut rng, kind);
            let model = NewtonModel::new(rng_mass(&mut rng), sample::spd_metric(&mut rng), phi).unwrap();
            let u = sample::frame(&mut rng);
            let x = sample::event(&mut rng);
            let v = sample::future_vector(&mut rng);
            let p = model.legendre_hom(&u, &x, &v).unwrap();
            errs.push(model.mass_shell_residual(&u, &x, &p).abs());
        }
    }
    Check::new("legendre_image_on_mass_shell", max_err(errs), tol, 3 * n)
}

fn rng_mass(rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
    use rand::Rng;
    rng.random_range(0.2..5.0)
}

/// The homogeneous equations are tangent to the mass shell.
pub fn shell_tangency(seed: u64, n: usize, tol: f64) -> Check {
    let mut rng = sample::rng(seed, 203);
    let err = max_err((0..n).map(|_| {
        let model = sample::model(&mut rng);
        let u = sample::frame(&mut rng);
        let x = sample::event(&mut rng);
        let v = sample::future_vector(&mut rng);
        let p = model.legendre_hom(&u, &x, &v).unwrap();
        let pdot = -v.time() * model.potential().gradient(&x);
        model.mass_shell_rate(&u, &x, &p, &v, &pdot).abs()
    }));
    Check::new("mass_shell_tangency", err, tol, n)
}

/// `res_u(Phi(p)) = res_u'(p)` for arbitrary momenta, relative to the size of the terms.
pub fn boost_shell_preservation(seed: u64, n: usize, tol: f64) -> Check {
    let mut rng = sample::rng(seed, 204);
    let err = max_err((0..n).map(|_| {
        let model = sample::model(&mut rng);
        let (u, u2) = (sample::frame(&mut rng), sample::frame(&mut rng));
        let c = CotangentPoint { x: sample::event(&mut rng), p: sample::covector(&mut rng) };
        let b = model.boost(&u2, &u, &c);
        let before = model.mass_shell_residual(&u2, &c.x, &c.p);
        let after = model.mass_shell_residual(&u, &b.x, &b.p);
        let scale = 1.0 + model.metric().dual_norm_sq(&b.p.spatial()) / (2.0 * model.mass()) + b.p.max_abs();
        (after - before).abs() / scale
    }));
    Check::new("boost_preserves_mass_shell", err, tol, n)
}

fn omega(d1: &[f64], d2: &[f64]) -> f64 {
    (0..4).map(|i| d2[4 + i] * d1[i] - d1[4 + i] * d2[i]).sum()
}

fn apply(jac: &[Vec<f64>], d: &[f64]) -> Vec<f64> {
    jac.iter().map(|row| row.iter().zip(d).map(|(a, b)| a * b).sum()).collect()
}

/// The canonical form on `T*N` is preserved by the boost, via a finite-difference tangent map.
pub fn boost_symplectic(seed: u64, n: usize, tol: f64) -> Check {
    let mut rng = sample::rng(seed, 205);
    let err = max_err((0..n).map(|_| {
        let model = sample::model(&mut rng);
        let (u, u2) = (sample::frame(&mut rng), sample::frame(&mut rng));
        let x = sample::event(&mut rng);
        let p = sample::covector(&mut rng);
        let d1: Vec<f64> = (0..8).map(|_| sample::uniform(&mut rng, 1.0)).collect();
        let d2: Vec<f64> = (0..8).map(|_| sample::uniform(&mut rng, 1.0)).collect();
        let map = |z: &[f64]| {
            let c = CotangentPoint { x: Event::from_coords([z[0], z[1], z[2], z[3]]), p: Covector4([z[4], z[5], z[6], z[7]]) };
            let b = model.boost(&u2, &u, &c);
            let mut out = b.x.coords().to_vec();
            out.extend(b.p.0);
            out
        };
        let mut z = x.coords().to_vec();
        z.extend(p.0);
        let jac = numdiff::jacobian(map, &z, 1e-3);
        (omega(&apply(&jac, &d1), &apply(&jac, &d2)) - omega(&d1, &d2)).abs()
    }));
    Check::new("boost_symplectic", err, tol, n)
}

/// Five-point central derivative of a sampled sequence at index `k`.
fn stencil<T: Copy>(seq: &[T], k: usize, h: f64, f: impl Fn(T) -> [f64; 4]) -> [f64; 4] {
    let (a, b, c, d) = (f(seq[k - 2]), f(seq[k - 1]), f(seq[k + 1]), f(seq[k + 2]));
    std::array::from_fn(|i| (a[i] - 8.0 * b[i] + 8.0 * c[i] - d[i]) / (12.0 * h))
}

fn failed(name: &str, tol: f64, err: impl std::fmt::Display) -> Check {
    Check::new(name, f64::NAN, tol, 0).with_note(err.to_string())
}

/// Integrates in `u'`, lifts to the shell, boosts each state to `u` and tests
/// membership in the frame-`u` homogeneous dynamics. Derivatives along the
/// trajectory use a five-point stencil.
pub fn boost_equivariance(
    model: &NewtonModel,
    u_prime: &Frame,
    u: &Frame,
    initial: &PhasePoint,
    h: f64,
    steps: usize,
    tol: f64,
    corrupt: bool,
) -> Check {
    let name = "boost_equivariance";
    let traj = match model.integrate(u_prime, initial, h, steps.max(4)) {
        Ok(t) => t,
        Err(e) => return failed(name, tol, e),
    };
    let lifted: Vec<CotangentPoint> = traj.points.iter().map(|s| model.lift_to_shell(u_prime, s)).collect();
    let ks = 2..lifted.len() - 2;
    let count = ks.len();
    let err = max_err(ks.map(|k| {
        let xdot = Vector4(stencil(&lifted, k, h, |c| c.x.coords()));
        let pdot = Covector4(stencil(&lifted, k, h, |c| c.p.0));
        let b = boost(model, u_prime, u, &lifted[k], corrupt);
        let e = HomogeneousTangent { x: b.x, p: b.p, xdot, pdot };
        model.homogeneous_dynamics_defect(u, &e).unwrap_or(f64::INFINITY)
    }));
    Check::new(name, err, tol, count).with_note(format!("tolerance {tol:e} = C h^4 with h = {h:e}"))
}

/// Boosted shell states of a trajectory stay on the other frame's shell.
pub fn trajectory_shell_preservation(model: &NewtonModel, runs: &[(Frame, Trajectory)], tol: f64, corrupt: bool) -> Check {
    let mut errs = Vec::new();
    for (u_prime, traj) in runs {
        for (u, _) in runs {
            for s in &traj.points {
                let b = boost(model, u_prime, u, &model.lift_to_shell(u_prime, s), corrupt);
                let scale = 1.0 + b.p.max_abs();
                errs.push(model.mass_shell_residual(u, &b.x, &b.p).abs() / scale);
            }
        }
    }
    let n = errs.len();
    Check::new("boosted_shell_residual", max_err(errs), tol, n)
}

/// Integrates the same motion (configured event and velocity) in each frame.
pub fn integrate_all(
    model: &NewtonModel,
    frames: &[Frame],
    x0: &Event,
    w0: &Vector3<f64>,
    h: f64,
    steps: usize,
) -> galimech_core::Result<Vec<(Frame, Trajectory)>> {
    frames
        .iter()
        .map(|u| {
            let start = PhasePoint { x: *x0, p: model.legendre_inhom(u, &Frame::new(*w0)) };
            Ok((*u, model.integrate(u, &start, h, steps)?))
        })
        .collect()
}

/// World-lines agree across frames, and momenta differ by the constant `m g(u' - u)`.
pub fn worldlines(
    model: &NewtonModel,
    runs: &[(Frame, Trajectory)],
    tol_events: f64,
    tol_offset: f64,
    corrupt: bool,
) -> (Check, Check) {
    let (u0, reference) = &runs[0];
    let mut event_err = 0.0_f64;
    let mut offset_err = 0.0_f64;
    let mut n = 0;
    for (u, run) in &runs[1..] {
        let mut shift = iota_star(&sigma(model.metric(), u0, u)) * model.mass();
        if corrupt {
            shift *= 1.0 + CORRUPTION;
        }
        for (a, b) in reference.points.iter().zip(&run.points) {
            event_err = event_err.max((a.x.q - b.x.q).amax()).max((a.x.t - b.x.t).abs());
            offset_err = offset_err.max(rel_err_slice((b.p - a.p).as_slice(), shift.as_slice()));
            n += 1;
        }
    }
    (
        Check::new("worldline_identity", event_err, tol_events, n)
            .with_note(format!("RK4 global error is O(h^4); tolerance {tol_events:e}")),
        Check::new("momentum_offset", offset_err, tol_offset, n),
    )
}

/// Drift of `hamiltonian_inhom` along a trajectory.
pub fn energy_conservation(model: &NewtonModel, traj: &Trajectory, tol: f64) -> Check {
    let h0 = model.hamiltonian_inhom(&traj.points[0].x, &traj.points[0].p);
    let drift = max_err(traj.points.iter().map(|s| (model.hamiltonian_inhom(&s.x, &s.p) - h0).abs()));
    Check::new("energy_conservation", drift, tol, traj.len())
}

/// The suite over the configured scenario.
pub fn run(config: &crate::config::ScenarioConfig, seed: u64) -> Vec<Check> {
    let tol = &config.tolerances;
    let mut checks = vec![
        legendre_consistency(seed, 500, tol.legendre),
        mass_shell_legendre(seed, 500, tol.mass_shell),
        shell_tangency(seed, 500, tol.shell_tangency),
        boost_shell_preservation(seed, 1000, tol.boost_shell),
        boost_symplectic(seed, 100, tol.symplectic),
    ];
    let model = match config.model() {
        Ok(m) => m,
        Err(e) => {
            checks.push(failed("scenario_model", 0.0, e));
            return checks;
        }
    };
    let h = config.step;
    let frames = sample::frames_at_least(&config.all_frames(), 5, seed);
    let x0 = config.initial_event();
    let w0 = Vector3::from(config.initial_velocity);
    let start = PhasePoint { x: x0, p: model.legendre_inhom(&frames[0], &Frame::new(w0)) };
    checks.push(boost_equivariance(
        &model,
        &frames[0],
        &frames[1],
        &start,
        h,
        100,
        tol.boost_membership_factor * h.powi(4),
        false,
    ));
    match integrate_all(&model, &frames, &x0, &w0, h, config.steps) {
        Ok(runs) => {
            let tol_events = if config.potential.is_free() { tol.worldline_free } else { tol.worldline };
            let (events, offsets) = worldlines(&model, &runs, tol_events, tol.momentum_offset, false);
            checks.push(events);
            checks.push(offsets);
        }
        Err(e) => checks.push(failed("worldline_identity", tol.worldline, e)),
    }
    if model.potential().is_time_independent() {
        let rest = Frame::rest();
        let start = PhasePoint { x: x0, p: model.legendre_inhom(&rest, &Frame::new(w0)) };
        match model.integrate(&rest, &start, h, config.steps) {
            Ok(traj) => checks.push(energy_conservation(&model, &traj, tol.energy)),
            Err(e) => checks.push(failed("energy_conservation", tol.energy, e)),
        }
    }
    checks
}
