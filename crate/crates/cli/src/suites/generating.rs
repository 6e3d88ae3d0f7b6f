//! Morse families: Hessian ranks, generated covectors and the reduction of
//! `fam1` to `fam2`.

use galimech_core::affine::{
    complete_on_shell, fam3, fam4, fam4_stationary, project_p0, psi_m, psi_m_chart, universal_hamiltonian_residual, PElement,
};
use galimech_core::families::{decode_xp, encode_xp, fam1, fam1_fiber, fam1_section, fam2, tq_example};
use galimech_core::generating::{
    generate, hessian, is_morse, kappa, reduce_family, solve_critical, CriticalPoint, FunctionFamily,
    GeneratedCovector, DEFAULT_RANK_TOL,
};
use galimech_core::numdiff::rel_err;
use galimech_core::{Covector4, Event, Frame, NewtonModel};
use nalgebra::Vector3;

use super::{sample, Family};
use crate::config::{ConfigError, ScenarioConfig, Tolerances};
use crate::report::{max_err, Check};

const SOLVE_TOL: f64 = 1e-11;

/// 5x5 grid of on-shell base points of frame `u` around the configured motion:
/// positions shifted along `q1`, velocities along `w1`.
pub fn shell_grid(model: &NewtonModel, u: &Frame, x0: &Event, w0: &Vector3<f64>) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(25);
    for i in 0..5 {
        for j in 0..5 {
            let x = Event { t: x0.t, q: x0.q + Vector3::new(0.25 * (i as f64 - 2.0), 0.1, -0.1) };
            let w = w0 + Vector3::new(0.25 * (j as f64 - 2.0), 0.2, 0.1);
            let v = galimech_core::Vector4::from_parts(1.0, w);
            let p = model.legendre_hom(u, &x, &v).expect("unit-time velocities are future-directed");
            out.push(encode_xp(&x, &p));
        }
    }
    out
}

fn rank_check(name: &str, fam: &FunctionFamily, points: &[CriticalPoint], expected_points: usize) -> Check {
    let report = is_morse(fam, points, DEFAULT_RANK_TOL);
    let deficit = report.ranks.iter().map(|&r| (report.expected as f64 - r as f64).abs()).fold(0.0, f64::max);
    let missing = expected_points.saturating_sub(points.len()) as f64;
    let ranks: Vec<String> = report.ranks.iter().map(usize::to_string).collect();
    let mut distinct = ranks.clone();
    distinct.dedup();
    Check::new(name, deficit.max(missing), 0.0, points.len())
        .with_note(format!("expected rank {}, observed {}", report.expected, distinct.join("/")))
}

fn solve_all(fam: &FunctionFamily, grid: &[Vec<f64>], seed_fiber: &[f64]) -> Vec<CriticalPoint> {
    grid.iter()
        .flat_map(|b| solve_critical(fam, b, &[seed_fiber.to_vec()], SOLVE_TOL).points)
        .collect()
}

/// The cotangent-bundle example with harmonic `L` has Hessian rank `dim Q = 3`.
pub fn example_rank(seed: u64, n: usize) -> Check {
    let mut rng = sample::rng(seed, 301);
    let fam = tq_example(1.0 + sample::uniform(&mut rng, 0.5), 1.0 + sample::uniform(&mut rng, 0.5));
    let grid: Vec<Vec<f64>> = (0..n).map(|_| (0..6).map(|_| sample::uniform(&mut rng, 2.0)).collect()).collect();
    rank_check("example_hessian_rank", &fam, &solve_all(&fam, &grid, &[0.0; 3]), n)
}

fn covector_gap(a: &[GeneratedCovector], b: &[GeneratedCovector]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    max_err(a.iter().zip(b).flat_map(|(x, y)| x.covector.iter().zip(&y.covector).map(|(p, q)| (p - q).abs())))
}

/// `fam1` reduced over the spatial velocity block generates the `fam2` set, and
/// `H_{h,u}` vanishes on the reduced critical set.
pub fn fam1_fam2_equivalence(model: &NewtonModel, u: &Frame, grid: &[Vec<f64>], tol_eq: f64, tol_zero: f64) -> Vec<Check> {
    let f1 = fam1(model, *u);
    let probes = vec![(grid[0].clone(), vec![1.0])];
    let reduced = match reduce_family(&f1, 3, vec![vec![0.0; 3]], &probes, 1e-12) {
        Ok(r) => r,
        Err(e) => return vec![Check::new("fam1_fam2_equivalence", f64::NAN, tol_eq, 0).with_note(e.to_string())],
    };
    let rf = reduced.family();
    let a = generate(&rf, grid, &[vec![1.0]], SOLVE_TOL);
    let b = generate(&fam2(model, *u), grid, &[vec![1.0]], SOLVE_TOL);
    let (a, b) = match (a, b) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            return vec![Check::new("fam1_fam2_equivalence", f64::NAN, tol_eq, 0).with_note(e.to_string())]
        }
    };
    let gap = covector_gap(&a, &b);
    let vanishing = max_err(a.iter().map(|g| {
        let cp = &g.source;
        match reduced.section(&cp.base, &cp.fiber) {
            Ok(s) => f1.eval(&cp.base, &[s.as_slice(), cp.fiber.as_slice()].concat()).abs(),
            Err(_) => f64::NAN,
        }
    }));
    vec![
        Check::new("fam1_fam2_equivalence", gap, tol_eq, grid.len()),
        Check::new("fam1_vanishes_on_reduced_critical_set", vanishing, tol_zero, a.len()),
    ]
}

/// Rank of `fam1` at its critical points over the grid (4 = fiber dimension).
pub fn fam1_rank(model: &NewtonModel, u: &Frame, grid: &[Vec<f64>]) -> Check {
    let fam = fam1(model, *u);
    rank_check("fam1_hessian_rank", &fam, &solve_all(&fam, grid, &[0.0, 0.0, 0.0, 1.0]), grid.len())
}

pub fn fam2_rank(model: &NewtonModel, u: &Frame, grid: &[Vec<f64>]) -> Check {
    let fam = fam2(model, *u);
    rank_check("fam2_hessian_rank", &fam, &solve_all(&fam, grid, &[1.0]), grid.len())
}

/// Critical points of `fam2` exist exactly over the mass shell.
pub fn fam2_critical_set(model: &NewtonModel, u: &Frame, grid: &[Vec<f64>]) -> Check {
    let fam = fam2(model, *u);
    let mut wrong = 0usize;
    for (k, base) in grid.iter().enumerate() {
        let shift = if k % 2 == 0 { 0.0 } else { 0.05 * (k as f64) };
        let (x, p) = decode_xp(base);
        let p = p + Covector4::new(shift, 0.0, 0.0, 0.0);
        let found = !solve_critical(&fam, &encode_xp(&x, &p), &[vec![1.0]], SOLVE_TOL).points.is_empty();
        let on_shell = model.mass_shell_residual(u, &x, &p).abs() <= SOLVE_TOL;
        if found != on_shell {
            wrong += 1;
        }
    }
    Check::new("fam2_critical_set_is_mass_shell", wrong as f64, 0.0, grid.len())
}

/// Pairings of `dF` with two different lifts of a base vector agree at critical points.
pub fn kappa_lift_independence(seed: u64, model: &NewtonModel, u: &Frame, grid: &[Vec<f64>], tol: f64) -> Check {
    let mut rng = sample::rng(seed, 302);
    let fam = fam1(model, *u);
    let mut errs = Vec::new();
    for cp in solve_all(&fam, grid, &[0.0, 0.0, 0.0, 1.0]) {
        let Ok(k) = kappa(&fam, &cp, SOLVE_TOL) else {
            errs.push(f64::NAN);
            continue;
        };
        let (gb, gf) = fam.gradient(&cp.base, &cp.fiber);
        let dv: Vec<f64> = (0..8).map(|_| sample::uniform(&mut rng, 1.0)).collect();
        let kv: f64 = k.covector.iter().zip(&dv).map(|(a, b)| a * b).sum();
        for _ in 0..2 {
            let lift: Vec<f64> = (0..4).map(|_| sample::uniform(&mut rng, 2.0)).collect();
            let pair: f64 = gb.iter().zip(&dv).map(|(a, b)| a * b).sum::<f64>()
                + gf.iter().zip(&lift).map(|(a, b)| a * b).sum::<f64>();
            errs.push((pair - kv).abs());
        }
    }
    let n = errs.len();
    Check::new("kappa_lift_independence", max_err(errs), tol, n)
}

/// The fiber block of the Hessian of `fam1` is symmetric.
pub fn hessian_symmetry(model: &NewtonModel, u: &Frame, grid: &[Vec<f64>], tol: f64) -> Check {
    let fam = fam1(model, *u);
    let err = max_err(grid.iter().map(|base| {
        let (_, p) = decode_xp(base);
        let cp = CriticalPoint { base: base.clone(), fiber: fam1_fiber(&fam1_section(model, u, &p, 1.0)), residual: 0.0 };
        let h = hessian(&fam, &cp);
        let block = h.columns(8, 4).into_owned();
        (&block - block.transpose()).amax()
    }));
    Check::new("hessian_fiber_block_symmetry", err, tol, grid.len())
}

/// `Psi_m` of one class read in `charts` random charts.
pub fn fam3_chart_independence(seed: u64, model: &NewtonModel, grid: &[Vec<f64>], charts: usize, tol: f64) -> Check {
    let mut rng = sample::rng(seed, 303);
    let mut errs = Vec::new();
    for base in grid {
        let (x, p) = decode_xp(base);
        let class = PElement { p };
        let reference = universal_hamiltonian_residual(model, &x, &class);
        for _ in 0..charts {
            let u = sample::frame(&mut rng);
            let in_chart = psi_m_chart(model, &u, &class.in_chart(model, &u)) + model.potential().value(&x);
            errs.push(rel_err(in_chart, reference));
        }
    }
    let n = errs.len();
    Check::new("fam3_chart_independence", max_err(errs), tol, n)
}

/// `fam3` and `fam2` in the reference frame generate the same covectors.
pub fn fam3_matches_fam2(model: &NewtonModel, grid: &[Vec<f64>], tol: f64) -> Check {
    let a = generate(&fam3(model), grid, &[vec![1.0]], SOLVE_TOL);
    let b = generate(&fam2(model, Frame::rest()), grid, &[vec![1.0]], SOLVE_TOL);
    match (a, b) {
        (Ok(a), Ok(b)) => Check::new("fam3_matches_reference_fam2", covector_gap(&a, &b), tol, grid.len()),
        (Err(e), _) | (_, Err(e)) => Check::new("fam3_matches_reference_fam2", f64::NAN, tol, 0).with_note(e.to_string()),
    }
}

pub fn fam3_rank(model: &NewtonModel, grid: &[Vec<f64>]) -> Check {
    let fam = fam3(model);
    rank_check("fam3_hessian_rank", &fam, &solve_all(&fam, grid, &[1.0]), grid.len())
}

pub fn fam4_rank(model: &NewtonModel, grid: &[Vec<f64>]) -> Check {
    let fam = fam4(model);
    rank_check("fam4_hessian_rank", &fam, &solve_all(&fam, grid, &[0.0, 0.0, 0.0, 1.0]), grid.len())
}

/// Stationarity of `fam4` over `v` with `<tau, v> = 1`, completed along `tau`, lands on `K_m`
/// over the same point of `P0`. The leftover `tau` derivative is `-(Psi_m + phi)`.
pub fn fam4_stationarity(seed: u64, model: &NewtonModel, n: usize, tol: f64) -> Check {
    let mut rng = sample::rng(seed, 304);
    let err = max_err((0..n).map(|_| {
        let x = sample::event(&mut rng);
        let p = PElement { p: sample::covector(&mut rng) };
        match fam4_stationary(model, &x, &p, 1e-12) {
            Ok((v, tau_grad)) => {
                let leftover = rel_err(tau_grad, -(psi_m(model, &p) + model.potential().value(&x)));
                match complete_on_shell(model, &x, &v) {
                    Ok(q) => {
                        let same_p0 = (project_p0(&q) - project_p0(&p)).amax();
                        universal_hamiltonian_residual(model, &x, &q).abs().max(same_p0).max(leftover)
                    }
                    Err(_) => f64::NAN,
                }
            }
            Err(_) => f64::NAN,
        }
    }));
    Check::new("fam4_stationarity_reaches_shell", err, tol, n)
}

/// Model, frame and on-shell grids built from a scenario.
pub struct GridScenario {
    pub model: NewtonModel,
    pub frame: Frame,
    /// On the shell of `frame`.
    pub grid: Vec<Vec<f64>>,
    /// On the shell of the reference frame.
    pub reference_grid: Vec<Vec<f64>>,
}

pub fn grid_scenario(config: &ScenarioConfig) -> Result<GridScenario, ConfigError> {
    let model = config.model()?;
    let frame = config.frame(0)?;
    let x0 = config.initial_event();
    let w0 = Vector3::from(config.initial_velocity);
    let grid = shell_grid(&model, &frame, &x0, &w0);
    let reference_grid = shell_grid(&model, &Frame::rest(), &x0, &w0);
    Ok(GridScenario { model, frame, grid, reference_grid })
}

/// The checks attached to one family.
pub fn family_checks(family: Family, sc: &GridScenario, seed: u64, tol: &Tolerances) -> Vec<Check> {
    let (model, u) = (&sc.model, &sc.frame);
    match family {
        Family::Example31 => vec![example_rank(seed, 100)],
        Family::Fam1 => {
            let mut checks = vec![fam1_rank(model, u, &sc.grid)];
            checks.extend(fam1_fam2_equivalence(model, u, &sc.grid, tol.equivalence, tol.vanishing));
            checks.push(kappa_lift_independence(seed, model, u, &sc.grid, tol.kappa_lift));
            checks.push(hessian_symmetry(model, u, &sc.grid, tol.hessian_symmetry));
            checks
        }
        Family::Fam2 => {
            let mut checks = vec![fam2_rank(model, u, &sc.grid), fam2_critical_set(model, u, &sc.grid)];
            checks.extend(fam1_fam2_equivalence(model, u, &sc.grid, tol.equivalence, tol.vanishing));
            checks
        }
        Family::Fam3 => vec![
            fam3_rank(model, &sc.reference_grid),
            fam3_matches_fam2(model, &sc.reference_grid, tol.equivalence),
            fam3_chart_independence(seed, model, &sc.reference_grid, 20, tol.chart),
        ],
        Family::Fam4 => vec![fam4_rank(model, &sc.reference_grid), fam4_stationarity(seed, model, 25, tol.stationarity)],
    }
}

/// Every family over the configured scenario.
pub fn run(config: &ScenarioConfig, seed: u64) -> Vec<Check> {
    let tol = &config.tolerances;
    let sc = match grid_scenario(config) {
        Ok(sc) => sc,
        Err(e) => return vec![Check::new("scenario_model", f64::NAN, 0.0, 0).with_note(e.to_string())],
    };
    let mut checks = Vec::new();
    for family in [Family::Example31, Family::Fam1, Family::Fam2, Family::Fam3, Family::Fam4] {
        for c in family_checks(family, &sc, seed, tol) {
            if !checks.iter().any(|d: &Check| d.name == c.name) {
                checks.push(c);
            }
        }
    }
    checks
}
