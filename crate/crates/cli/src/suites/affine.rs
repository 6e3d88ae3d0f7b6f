//! Frame-independent objects: chart independence of every class operation,
//! the vector-space structure of `W`, duality, the Tulczyjew maps, `P0` and the
//! affine-metric section.

use galimech_core::affine::{
    affine_lagrangian, affine_lagrangian_via, alpha, beta, beta_inv, eval_affine, gamma, hamiltonian_fun,
    dynamics_membership_universal, inhomogeneous_dynamics_membership, inhomogeneous_dynamics_membership_in_chart,
    lift_p0, p0_chart_offset, pairing, pairing_in_chart, project_p0, project_p0_in_chart, psi_m, psi_m_chart,
    section_from_affine_metric, universal_hamiltonian_residual, w_add, w_add_charts, w_scale, AffineMetric,
    CotangentPhase, PElement, TangentPhase, WElement,
};
use galimech_core::dynamics::{CotangentPoint, HomogeneousTangent};
use galimech_core::generating::numerical_rank;
use galimech_core::galilean::iota_star;
use galimech_core::numdiff::{self, rel_err};
use galimech_core::Vector4;
use nalgebra::{DMatrix, Matrix3, Vector3};
use rand_chacha::ChaCha8Rng;

use super::sample::{self, rel_err_slice};
use crate::report::{max_err, Check};

fn w_sample(rng: &mut ChaCha8Rng) -> WElement {
    WElement { v: Vector4::from_parts(sample::uniform(rng, 3.0), sample::vec3(rng, 3.0)), r: sample::uniform(rng, 3.0) }
}

fn w_gap(a: &WElement, b: &WElement) -> f64 {
    rel_err_slice(&a.v.0, &b.v.0).max(rel_err(a.r, b.r))
}

/// Each class operation fed with representatives from a random chart against
/// its single-chart formula. One check per operation.
pub fn chart_independence(seed: u64, n: usize, tol: f64) -> Vec<Check> {
    let mut rng = sample::rng(seed, 401);
    let mut errs: [Vec<f64>; 5] = Default::default();
    let mut membership_mismatch = 0usize;
    for k in 0..n {
        let model = sample::model(&mut rng);
        let u = sample::frame(&mut rng);
        let x = sample::event(&mut rng);
        let v = sample::future_vector(&mut rng);
        let p_u = sample::covector(&mut rng);
        let r_u = sample::uniform(&mut rng, 3.0);
        let w = WElement::from_chart(&model, &u, v, r_u);
        let p = PElement::from_chart(&model, &u, p_u);

        errs[0].push(rel_err(eval_affine(&w, &p), p_u.pair(&v) - r_u));
        errs[1].push(w_gap(&pairing(&p, &v), &pairing_in_chart(&model, &u, &p_u, &v)));
        errs[2].push(rel_err(psi_m(&model, &p), psi_m_chart(&model, &u, &p_u)));
        let lag = affine_lagrangian(&model, &x, &v).and_then(|a| affine_lagrangian_via(&model, &u, &x, &v).map(|b| w_gap(&a, &b)));
        errs[3].push(lag.unwrap_or(f64::NAN));
        let single = model.lagrangian_hom(&u, &x, &v).map(|l| p_u.pair(&v) - l);
        let h = hamiltonian_fun(&model, &x, &v, &p).and_then(|a| single.map(|b| rel_err(a, b)));
        errs[4].push(h.unwrap_or(f64::NAN));

        // On-shell states of frame u, every other one pushed off the shell.
        let mut p_shell = model.legendre_hom(&u, &x, &v).expect("sampled velocities are future-directed");
        if k % 2 == 1 {
            p_shell.0[0] += 0.1;
        }
        let pdot = -v.time() * model.potential().gradient(&x);
        let e = HomogeneousTangent { x, p: p_shell, xdot: v, pdot };
        let in_chart = model.in_homogeneous_dynamics(&u, &e, tol);
        let class = PElement::from_chart(&model, &u, p_shell);
        if in_chart != dynamics_membership_universal(&model, &x, &class, &v, &pdot, tol) || in_chart != (k % 2 == 0) {
            membership_mismatch += 1;
        }
    }
    let names = [
        "chart_independence_eval_affine",
        "chart_independence_pairing",
        "chart_independence_psi_m",
        "chart_independence_affine_lagrangian",
        "chart_independence_hamiltonian_fun",
    ];
    let mut checks: Vec<Check> = names.iter().zip(errs).map(|(name, e)| Check::new(*name, max_err(e), tol, n)).collect();
    checks.push(Check::new("chart_independence_dynamics_membership", membership_mismatch as f64, 0.0, n));
    checks
}

/// Vector-space axioms on random triples, and addition of representatives
/// taken in two different charts.
pub fn w_vector_space(seed: u64, n: usize, tol: f64) -> Check {
    let mut rng = sample::rng(seed, 402);
    let err = max_err((0..n).map(|_| {
        let (a, b, c) = (w_sample(&mut rng), w_sample(&mut rng), w_sample(&mut rng));
        let (l, mu) = (sample::uniform(&mut rng, 3.0), sample::uniform(&mut rng, 3.0));
        let assoc = w_gap(&w_add(&w_add(&a, &b), &c), &w_add(&a, &w_add(&b, &c)));
        let comm = w_gap(&w_add(&a, &b), &w_add(&b, &a));
        let zero = w_gap(&w_add(&a, &WElement::ZERO), &a);
        let inverse = w_gap(&w_add(&a, &w_scale(-1.0, &a)), &WElement::ZERO);
        let dist_w = w_gap(&w_scale(l, &w_add(&a, &b)), &w_add(&w_scale(l, &a), &w_scale(l, &b)));
        let dist_s = w_gap(&w_scale(l + mu, &a), &w_add(&w_scale(l, &a), &w_scale(mu, &a)));
        let compat = w_gap(&w_scale(l * mu, &a), &w_scale(l, &w_scale(mu, &a)));
        let unit = w_gap(&w_scale(1.0, &a), &a);
        let zeta = rel_err_slice(&w_add(&a, &b).zeta().0, &(a.zeta() + b.zeta()).0);

        let model = sample::model(&mut rng);
        let (u, u2) = (sample::frame(&mut rng), sample::frame(&mut rng));
        let (ubar, v, r) = w_add_charts(&model, (&u, &a.v, a.in_chart(&model, &u)), (&u2, &b.v, b.in_chart(&model, &u2)));
        let mixed = w_gap(&WElement::from_chart(&model, &ubar, v, r), &w_add(&a, &b));
        [assoc, comm, zero, inverse, dist_w, dist_s, compat, unit, zeta, mixed].into_iter().fold(0.0, f64::max)
    }));
    Check::new("w_vector_space_axioms", err, tol, n)
}

/// `f_{w1}(p) = 1` for every class `p`, with no rounding allowed.
pub fn f_w1_is_one(seed: u64, n: usize) -> Check {
    let mut rng = sample::rng(seed, 403);
    let err = max_err((0..n).map(|_| {
        let model = sample::model(&mut rng);
        let u = sample::frame(&mut rng);
        let p = PElement::from_chart(&model, &u, sample::covector(&mut rng));
        (eval_affine(&WElement::ONE, &p) - 1.0).abs()
    }));
    Check::new("f_w1_identically_one", err, 0.0, n)
}

/// `w -> f_w` is linear and separates points: the 5x5 evaluation matrix of five
/// generic `w` against five generic `p` has full rank.
pub fn duality(seed: u64, n: usize, tol: f64) -> Vec<Check> {
    let mut rng = sample::rng(seed, 404);
    let mut lin = Vec::with_capacity(n);
    let mut deficit = 0usize;
    for _ in 0..n {
        let (a, b) = (w_sample(&mut rng), w_sample(&mut rng));
        let l = sample::uniform(&mut rng, 3.0);
        let p = PElement { p: sample::covector(&mut rng) };
        let lhs = eval_affine(&w_add(&a, &w_scale(l, &b)), &p);
        lin.push(rel_err(lhs, eval_affine(&a, &p) + l * eval_affine(&b, &p)));

        let ws: Vec<WElement> = (0..5).map(|_| w_sample(&mut rng)).collect();
        let ps: Vec<PElement> = (0..5).map(|_| PElement { p: sample::covector(&mut rng) }).collect();
        let m = DMatrix::from_fn(5, 5, |i, j| eval_affine(&ws[i], &ps[j]));
        deficit = deficit.max(5 - numerical_rank(&m, 1e-10));
    }
    vec![
        Check::new("duality_linear_in_w", max_err(lin), tol, n),
        Check::new("duality_evaluation_rank", deficit as f64, 0.0, n).with_note("rank of 5x5 evaluation matrices"),
    ]
}

/// Universal residual of `class(u, p)` against the frame-`u` shell residual.
pub fn k_m_consistency(seed: u64, n: usize, tol: f64) -> Check {
    let mut rng = sample::rng(seed, 405);
    let err = max_err((0..n).map(|_| {
        let model = sample::model(&mut rng);
        let u = sample::frame(&mut rng);
        let x = sample::event(&mut rng);
        let p = sample::covector(&mut rng);
        rel_err(universal_hamiltonian_residual(&model, &x, &PElement::from_chart(&model, &u, p)), model.mass_shell_residual(&u, &x, &p))
    }));
    Check::new("k_m_consistency", err, tol, n)
}

/// `class(u', p') = class(u, Phi(p'))` with `Phi` the boost from frame `u'` to `u`.
pub fn boost_commutes_with_classes(seed: u64, n: usize, tol: f64) -> Check {
    let mut rng = sample::rng(seed, 406);
    let err = max_err((0..n).map(|_| {
        let model = sample::model(&mut rng);
        let (u, u2) = (sample::frame(&mut rng), sample::frame(&mut rng));
        let state = CotangentPoint { x: sample::event(&mut rng), p: sample::covector(&mut rng) };
        let boosted = model.boost(&u2, &u, &state);
        let a = PElement::from_chart(&model, &u2, state.p);
        let b = PElement::from_chart(&model, &u, boosted.p);
        rel_err_slice(&a.p.0, &b.p.0)
    }));
    Check::new("boost_commutes_with_class_formation", err, tol, n)
}

/// `gamma = alpha . beta^{-1}` and `beta^{-1} . beta = id`, bit for bit.
pub fn tulczyjew(seed: u64, n: usize) -> Check {
    let mut rng = sample::rng(seed, 407);
    let mut wrong = 0usize;
    for _ in 0..n {
        let c = CotangentPhase {
            x: sample::event(&mut rng),
            p: PElement { p: sample::covector(&mut rng) },
            a: sample::covector(&mut rng),
            b: sample::future_vector(&mut rng),
        };
        let t = TangentPhase { x: c.x, p: c.p, v: c.b, a: c.a };
        if gamma(&c) != alpha(&beta_inv(&c)) || beta_inv(&beta(&t)) != t {
            wrong += 1;
        }
    }
    Check::new("tulczyjew_gamma_is_alpha_beta_inverse", wrong as f64, 0.0, n)
}

/// `P0` coordinates transform by the known offset and `project . lift = id`.
pub fn p0_covariance(seed: u64, n: usize, tol: f64) -> Check {
    let mut rng = sample::rng(seed, 408);
    let err = max_err((0..n).map(|_| {
        let model = sample::model(&mut rng);
        let u = sample::frame(&mut rng);
        let p = PElement { p: sample::covector(&mut rng) };
        let in_chart = iota_star(&p.in_chart(&model, &u));
        let covariant = rel_err_slice(in_chart.as_slice(), project_p0_in_chart(&model, &u, &p).as_slice());
        let p0 = sample::vec3(&mut rng, 3.0);
        let round = rel_err_slice(project_p0(&lift_p0(&p0, sample::uniform(&mut rng, 3.0))).as_slice(), p0.as_slice());
        let shifted = p.translate(&(7.0 * galimech_core::TAU));
        covariant.max(round).max(rel_err_slice(project_p0(&shifted).as_slice(), project_p0(&p).as_slice()))
    }));
    Check::new("p0_chart_covariance", err, tol, n)
}

/// States satisfying the frame-`u` equations pass in chart `u` and, after the
/// offset, in the reference chart; perturbed forces fail in both.
pub fn inhomogeneous_membership(seed: u64, n: usize, tol: f64) -> Check {
    let mut rng = sample::rng(seed, 409);
    let mut wrong = 0usize;
    for _ in 0..n {
        let model = sample::model(&mut rng);
        let u = sample::frame(&mut rng);
        let x = sample::event(&mut rng);
        let p0 = sample::vec3(&mut rng, 3.0);
        let xdot = model.velocity_of(&u, &p0).vector();
        let force = -model.potential().spatial_gradient(&x);
        let p0_ref = p0 + p0_chart_offset(&model, &u);
        let good = inhomogeneous_dynamics_membership_in_chart(&model, &u, &x, &p0, &xdot, &force, tol)
            && inhomogeneous_dynamics_membership(&model, &x, &p0_ref, &xdot, &force, tol);
        let kicked = force + Vector3::new(1.0, 0.0, 0.0);
        let bad = inhomogeneous_dynamics_membership_in_chart(&model, &u, &x, &p0, &xdot, &kicked, tol)
            || inhomogeneous_dynamics_membership(&model, &x, &p0_ref, &xdot, &kicked, tol);
        if !good || bad {
            wrong += 1;
        }
    }
    Check::new("inhomogeneous_dynamics_membership", wrong as f64, 0.0, n)
}

fn affine_metric_sample(rng: &mut ChaCha8Rng) -> AffineMetric {
    let model = sample::model(rng);
    if rng_bit(rng) {
        AffineMetric::legendre_inhom(&model, &sample::frame(rng))
    } else {
        let linear: Matrix3<f64> = model.mass() * model.metric().matrix();
        AffineMetric::new(sample::vec3(rng, 2.0), sample::vec3(rng, 3.0), linear).expect("m g is SPD")
    }
}

fn rng_bit(rng: &mut ChaCha8Rng) -> bool {
    sample::uniform(rng, 1.0) > 0.0
}

/// Finite-difference derivative of the section against `h`, and the spread of
/// the difference between sections built from two base points.
pub fn affine_metric_section(seed: u64, n: usize, tol_derivative: f64, tol_constant: f64) -> Vec<Check> {
    let mut rng = sample::rng(seed, 410);
    let mut deriv = Vec::with_capacity(n);
    let mut spread = Vec::new();
    let per_metric = 10;
    for chunk in 0..n.div_ceil(per_metric) {
        let h = affine_metric_sample(&mut rng);
        let s = section_from_affine_metric(&h);
        let other = section_from_affine_metric(&h.rebased(h.base() + sample::vec3(&mut rng, 1.5)));
        let mut diffs = Vec::new();
        for _ in 0..per_metric.min(n - chunk * per_metric) {
            let b = h.base() + sample::vec3(&mut rng, 2.0);
            let fd = numdiff::gradient(|c| s.eval(&Vector3::new(c[0], c[1], c[2])), b.as_slice());
            deriv.push(rel_err_slice(&fd, h.apply(&b).as_slice()));
            diffs.push(s.eval(&b) - other.eval(&b));
        }
        let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
        spread.push((diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / diffs.len() as f64).sqrt());
    }
    vec![
        Check::new("affine_metric_section_derivative", max_err(deriv), tol_derivative, n),
        Check::new("affine_metric_section_constant_shift", max_err(spread), tol_constant, n)
            .with_note(format!("largest std-dev over groups of {per_metric} points")),
    ]
}

pub fn run(seed: u64, tol: &crate::config::Tolerances) -> Vec<Check> {
    let mut checks = chart_independence(seed, 1000, tol.chart);
    checks.push(w_vector_space(seed, 1000, tol.vector_space));
    checks.push(f_w1_is_one(seed, 1000));
    checks.extend(duality(seed, 200, tol.vector_space));
    checks.push(k_m_consistency(seed, 1000, tol.chart));
    checks.push(boost_commutes_with_classes(seed, 1000, tol.vector_space));
    checks.push(tulczyjew(seed, 100));
    checks.push(p0_covariance(seed, 1000, tol.vector_space));
    checks.push(inhomogeneous_membership(seed, 500, tol.chart));
    checks.extend(affine_metric_section(seed, 200, tol.section_derivative, tol.section_constant));
    checks
}

#[cfg(test)]
mod tests {
    use super::*;
    use galimech_core::Frame;

    #[test]
    fn small_battery_passes() {
        let tol = crate::config::Tolerances::default();
        for c in chart_independence(7, 50, tol.chart) {
            assert!(c.passed(), "{c:?}");
        }
        assert!(w_vector_space(7, 50, tol.vector_space).passed());
        assert!(tulczyjew(7, 20).passed());
        for c in affine_metric_section(7, 30, tol.section_derivative, tol.section_constant) {
            assert!(c.passed(), "{c:?}");
        }
    }

    #[test]
    fn rest_frame_class_is_its_representative() {
        let model = galimech_core::NewtonModel::free_unit();
        let p = PElement::from_chart(&model, &Frame::rest(), galimech_core::Covector4::new(0.0, 1.0, 0.0, 0.0));
        assert_eq!(psi_m(&model, &p), 0.5);
    }
}
