//! Families of functions over product fibrations `R^b x R^f -> R^b` and the
//! lagrangian sets they generate.
//!
//! A point of the total space is a pair `(base, fiber)`. The critical set is
//! where the fiber gradient vanishes; at a critical point the generated
//! covector is the base gradient (any lift of a base vector pairs the same way
//! with `dF` there). The Hessian of the family is the `f x (b + f)` matrix of
//! mixed partials, rows along the fiber, columns over base then fiber.

use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::dynamics::fmt17;
use crate::error::{Error, Result};
use crate::numdiff;

pub type FamilyValue = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;
/// Returns `(base gradient, fiber gradient)`.
pub type FamilyGradient = Arc<dyn Fn(&[f64], &[f64]) -> (Vec<f64>, Vec<f64>) + Send + Sync>;

/// Singular values below this fraction of the largest count as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

const MAX_NEWTON_ITERS: usize = 100;

#[derive(Clone)]
pub struct FunctionFamily {
    base_dim: usize,
    fiber_dim: usize,
    value: FamilyValue,
    gradient: Option<FamilyGradient>,
}

impl fmt::Debug for FunctionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionFamily")
            .field("base_dim", &self.base_dim)
            .field("fiber_dim", &self.fiber_dim)
            .field("analytic_gradient", &self.gradient.is_some())
            .finish()
    }
}

impl FunctionFamily {
    pub fn new<F>(base_dim: usize, fiber_dim: usize, value: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        FunctionFamily { base_dim, fiber_dim, value: Arc::new(value), gradient: None }
    }

    pub fn with_gradient<G>(mut self, gradient: G) -> Self
    where
        G: Fn(&[f64], &[f64]) -> (Vec<f64>, Vec<f64>) + Send + Sync + 'static,
    {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn eval(&self, base: &[f64], fiber: &[f64]) -> f64 {
        debug_assert_eq!(base.len(), self.base_dim);
        debug_assert_eq!(fiber.len(), self.fiber_dim);
        (self.value)(base, fiber)
    }

    fn eval_total(&self, n: &[f64]) -> f64 {
        let (b, f) = n.split_at(self.base_dim);
        (self.value)(b, f)
    }

    /// Analytic gradient when available, central differences otherwise.
    pub fn gradient(&self, base: &[f64], fiber: &[f64]) -> (Vec<f64>, Vec<f64>) {
        match &self.gradient {
            Some(g) => g(base, fiber),
            None => self.fd_gradient(base, fiber),
        }
    }

    /// Central-difference gradient, ignoring any analytic one.
    pub fn fd_gradient(&self, base: &[f64], fiber: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = [base, fiber].concat();
        let mut g = numdiff::gradient(|y| self.eval_total(y), &n);
        let fib = g.split_off(self.base_dim);
        (g, fib)
    }

    fn fiber_gradient_total(&self, n: &[f64]) -> Vec<f64> {
        let (b, f) = n.split_at(self.base_dim);
        self.gradient(b, f).1
    }
}

/// A point of the critical set.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub base: Vec<f64>,
    pub fiber: Vec<f64>,
    /// Euclidean norm of the fiber gradient at the point.
    pub residual: f64,
}

/// Base point together with the covector generated from a critical point over it.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedCovector {
    pub base: Vec<f64>,
    pub covector: Vec<f64>,
    pub source: CriticalPoint,
}

/// Outcome of a multi-seed critical-point search.
#[derive(Debug, Clone, Default)]
pub struct CriticalSolve {
    pub points: Vec<CriticalPoint>,
    /// Seeds that failed, by index, with the reason.
    pub failures: Vec<(usize, Error)>,
}

/// Fiber-direction partial gradient of the family.
pub fn fiber_gradient(fam: &FunctionFamily, base: &[f64], fiber: &[f64]) -> Vec<f64> {
    fam.gradient(base, fiber).1
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Columns `cols` of the Hessian (mixed partials fiber x total) at total point `n`.
fn hessian_columns(fam: &FunctionFamily, n: &[f64], cols: std::ops::Range<usize>) -> DMatrix<f64> {
    let b = fam.base_dim;
    let f = fam.fiber_dim;
    let mut h = DMatrix::zeros(f, cols.len());
    if fam.gradient.is_some() {
        let mut work = n.to_vec();
        for (c, j) in cols.enumerate() {
            let step = 1e-5 * (1.0 + n[j].abs());
            work[j] = n[j] + step;
            let gp = fam.fiber_gradient_total(&work);
            work[j] = n[j] - step;
            let gm = fam.fiber_gradient_total(&work);
            work[j] = n[j];
            for i in 0..f {
                h[(i, c)] = (gp[i] - gm[i]) / (2.0 * step);
            }
        }
        return h;
    }
    let step = |k: usize| 1e-4 * (1.0 + n[k].abs());
    let f0 = fam.eval_total(n);
    for (c, j) in cols.enumerate() {
        for i in 0..f {
            let fi = b + i;
            let mut work = n.to_vec();
            h[(i, c)] = if fi == j {
                let hs = step(j);
                work[j] = n[j] + hs;
                let fp = fam.eval_total(&work);
                work[j] = n[j] - hs;
                let fm = fam.eval_total(&work);
                (fp - 2.0 * f0 + fm) / (hs * hs)
            } else {
                let (hi, hj) = (step(fi), step(j));
                let mut corner = |si: f64, sj: f64| {
                    work[fi] = n[fi] + si * hi;
                    work[j] = n[j] + sj * hj;
                    fam.eval_total(&work)
                };
                (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0) + corner(-1.0, -1.0)) / (4.0 * hi * hj)
            };
        }
    }
    h
}

/// Hessian of the family at `n`: rows are fiber directions, columns are base
/// then fiber directions.
pub fn hessian(fam: &FunctionFamily, n: &CriticalPoint) -> DMatrix<f64> {
    let total = [n.base.as_slice(), n.fiber.as_slice()].concat();
    hessian_columns(fam, &total, 0..fam.base_dim + fam.fiber_dim)
}

/// Number of singular values above `tol_rank * sigma_max`.
pub fn numerical_rank(m: &DMatrix<f64>, tol_rank: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.max();
    if smax <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol_rank * smax).count()
}

/// Newton on the fiber gradient from one seed. The linear step uses the SVD
/// pseudo-inverse so degenerate fiber directions are left untouched.
fn newton_from_seed(fam: &FunctionFamily, base: &[f64], seed: &[f64], tol: f64) -> Result<CriticalPoint> {
    let b = fam.base_dim;
    let mut fiber = seed.to_vec();
    let mut grad = fiber_gradient(fam, base, &fiber);
    let mut gnorm = norm(&grad);
    for _ in 0..MAX_NEWTON_ITERS {
        if !gnorm.is_finite() {
            return Err(Error::NoConvergence { residual: gnorm });
        }
        if gnorm <= tol {
            return Ok(CriticalPoint { base: base.to_vec(), fiber, residual: gnorm });
        }
        let total = [base, fiber.as_slice()].concat();
        let jac = hessian_columns(fam, &total, b..b + fam.fiber_dim);
        let svd = jac.svd(true, true);
        let eps = 1e-12 * svd.singular_values.max();
        let step = match svd.solve(&DVector::from_column_slice(&grad), eps) {
            Ok(s) if s.iter().all(|c| c.is_finite()) && s.norm() > 0.0 => -s,
            _ => return Err(Error::NoConvergence { residual: gnorm }),
        };
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = fiber.iter().zip(step.iter()).map(|(x, s)| x + alpha * s).collect();
            let tgrad = fiber_gradient(fam, base, &trial);
            let tnorm = norm(&tgrad);
            if tnorm.is_finite() && tnorm < gnorm {
                fiber = trial;
                grad = tgrad;
                gnorm = tnorm;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if gnorm <= tol {
        Ok(CriticalPoint { base: base.to_vec(), fiber, residual: gnorm })
    } else {
        Err(Error::NoConvergence { residual: gnorm })
    }
}

/// Critical points over `base` reached from each seed by damped Newton.
/// Points closer than `10 tol` are merged; failing seeds are reported, not fatal.
pub fn solve_critical(fam: &FunctionFamily, base: &[f64], seeds: &[Vec<f64>], tol: f64) -> CriticalSolve {
    let mut out = CriticalSolve::default();
    for (i, seed) in seeds.iter().enumerate() {
        match newton_from_seed(fam, base, seed, tol) {
            Ok(cp) => {
                if !out.points.iter().any(|p| distance(&p.fiber, &cp.fiber) <= 10.0 * tol) {
                    out.points.push(cp);
                }
            }
            Err(e) => out.failures.push((i, e)),
        }
    }
    out
}

/// Per-point Hessian ranks against the maximal rank (the fiber dimension).
#[derive(Debug, Clone, PartialEq)]
pub struct MorseReport {
    pub ranks: Vec<usize>,
    pub expected: usize,
}

impl MorseReport {
    pub fn is_morse(&self) -> bool {
        !self.ranks.is_empty() && self.ranks.iter().all(|&r| r == self.expected)
    }
}

pub fn is_morse(fam: &FunctionFamily, points: &[CriticalPoint], tol_rank: f64) -> MorseReport {
    let ranks = points.iter().map(|p| numerical_rank(&hessian(fam, p), tol_rank)).collect();
    MorseReport { ranks, expected: fam.fiber_dim }
}

/// The covector generated at a critical point: the base part of `dF`.
pub fn kappa(fam: &FunctionFamily, n: &CriticalPoint, tol: f64) -> Result<GeneratedCovector> {
    let (base_grad, fiber_grad) = fam.gradient(&n.base, &n.fiber);
    let fnorm = norm(&fiber_grad);
    if !(fnorm <= tol) {
        return Err(Error::NotCritical { norm: fnorm, tol });
    }
    Ok(GeneratedCovector { base: n.base.clone(), covector: base_grad, source: n.clone() })
}

/// Samples the generated lagrangian set over the given base points.
pub fn generate(
    fam: &FunctionFamily,
    bases: &[Vec<f64>],
    seeds: &[Vec<f64>],
    tol: f64,
) -> Result<Vec<GeneratedCovector>> {
    let mut out = Vec::new();
    for base in bases {
        let solve = solve_critical(fam, base, seeds, tol);
        let report = is_morse(fam, &solve.points, DEFAULT_RANK_TOL);
        if let Some(&rank) = report.ranks.iter().find(|&&r| r != report.expected) {
            return Err(Error::NotMorse { rank, expected: report.expected });
        }
        for cp in &solve.points {
            out.push(kappa(fam, cp, tol)?);
        }
    }
    Ok(out)
}

/// CSV export: one row per generated covector, base coordinates then covector.
pub fn write_covectors_csv<W: Write>(covectors: &[GeneratedCovector], mut out: W) -> io::Result<()> {
    let Some(first) = covectors.first() else {
        return Ok(());
    };
    let header: Vec<String> = (0..first.base.len())
        .map(|i| format!("base{i}"))
        .chain((0..first.covector.len()).map(|i| format!("covector{i}")))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for c in covectors {
        let row: Vec<String> = c.base.iter().chain(&c.covector).map(|x| fmt17(*x)).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// A family with the leading block of fiber coordinates eliminated through the
/// section of stationary points.
#[derive(Debug, Clone)]
pub struct ReducedFamily {
    original: FunctionFamily,
    eliminated: usize,
    seeds: Vec<Vec<f64>>,
    tol: f64,
}

impl ReducedFamily {
    /// The family over `(base, kept fiber)` whose eliminated coordinates are
    /// held fixed and become the unknowns.
    fn block_family(&self) -> FunctionFamily {
        let b = self.original.base_dim;
        let k = self.eliminated;
        let orig = self.original.clone();
        let value = move |bk: &[f64], s1: &[f64]| {
            let (base, kept) = bk.split_at(b);
            orig.eval(base, &[s1, kept].concat())
        };
        let mut fam = FunctionFamily::new(b + self.original.fiber_dim - k, k, value);
        if self.original.gradient.is_some() {
            let orig = self.original.clone();
            fam = fam.with_gradient(move |bk: &[f64], s1: &[f64]| {
                let (base, kept) = bk.split_at(b);
                let (mut gb, mut gf) = orig.gradient(base, &[s1, kept].concat());
                let g_kept = gf.split_off(k);
                gb.extend(g_kept);
                (gb, gf)
            });
        }
        fam
    }

    /// Stationary values of the eliminated block at `(base, kept)`.
    pub fn section(&self, base: &[f64], kept: &[f64]) -> Result<Vec<f64>> {
        if self.eliminated == 0 {
            return Ok(Vec::new());
        }
        let inner = self.block_family();
        let bk = [base, kept].concat();
        let solve = solve_critical(&inner, &bk, &self.seeds, self.tol);
        let Some(first) = solve.points.first() else {
            let residual = solve
                .failures
                .iter()
                .map(|(_, e)| match e {
                    Error::NoConvergence { residual } => *residual,
                    _ => f64::NAN,
                })
                .fold(f64::INFINITY, f64::min);
            return Err(Error::NoConvergence { residual });
        };
        for other in &solve.points[1..] {
            let sep = distance(&other.fiber, &first.fiber);
            let scale = 1e-8 * (1.0 + norm(&first.fiber));
            if sep > scale {
                return Err(Error::SectionNotUnique { separation: sep });
            }
        }
        Ok(first.fiber.clone())
    }

    /// The reduced family over `base x R^{f - eliminated}`. Its gradient is the
    /// original gradient at the section point (the eliminated derivatives vanish there).
    /// Evaluations where the section cannot be solved return NaN.
    pub fn family(&self) -> FunctionFamily {
        let b = self.original.base_dim;
        let kept_dim = self.original.fiber_dim - self.eliminated;
        let me = self.clone();
        let value = move |base: &[f64], kept: &[f64]| match me.section(base, kept) {
            Ok(s1) => me.original.eval(base, &[s1.as_slice(), kept].concat()),
            Err(_) => f64::NAN,
        };
        let me = self.clone();
        let gradient = move |base: &[f64], kept: &[f64]| match me.section(base, kept) {
            Ok(s1) => {
                let (gb, mut gf) = me.original.gradient(base, &[s1.as_slice(), kept].concat());
                (gb, gf.split_off(me.eliminated))
            }
            Err(_) => (vec![f64::NAN; b], vec![f64::NAN; kept_dim]),
        };
        FunctionFamily::new(b, kept_dim, value).with_gradient(gradient)
    }

    pub fn eliminated(&self) -> usize {
        self.eliminated
    }
}

/// Eliminates the first `eliminate` fiber coordinates by solving their
/// stationarity equations from `seeds`. Every `(base, kept)` pair in `probes` is
/// checked up front; distinct solutions there give `SectionNotUnique`.
pub fn reduce_family(
    fam: &FunctionFamily,
    eliminate: usize,
    seeds: Vec<Vec<f64>>,
    probes: &[(Vec<f64>, Vec<f64>)],
    tol: f64,
) -> Result<ReducedFamily> {
    if eliminate > fam.fiber_dim {
        return Err(Error::InvalidArgument(format!(
            "cannot eliminate {eliminate} of {} fiber coordinates",
            fam.fiber_dim
        )));
    }
    if eliminate > 0 && (seeds.is_empty() || seeds.iter().any(|s| s.len() != eliminate)) {
        return Err(Error::InvalidArgument("seeds must match the eliminated block".into()));
    }
    let reduced = ReducedFamily { original: fam.clone(), eliminated: eliminate, seeds, tol };
    for (base, kept) in probes {
        reduced.section(base, kept)?;
    }
    Ok(reduced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn xs_family() -> FunctionFamily {
        FunctionFamily::new(1, 1, |b, s| b[0] * s[0] - 0.5 * s[0] * s[0])
    }

    fn cp(base: f64, fiber: f64) -> CriticalPoint {
        CriticalPoint { base: vec![base], fiber: vec![fiber], residual: 0.0 }
    }

    #[test]
    fn fiber_gradient_examples() {
        assert_abs_diff_eq!(fiber_gradient(&xs_family(), &[1.0], &[1.0])[0], 0.0, epsilon = 1e-9);
        let constant = FunctionFamily::new(1, 1, |_, _| 3.0);
        assert_eq!(fiber_gradient(&constant, &[0.3], &[-2.0])[0], 0.0);
        let linear = FunctionFamily::new(1, 1, |_, s| s[0]);
        assert_abs_diff_eq!(fiber_gradient(&linear, &[5.0], &[7.0])[0], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn solve_critical_examples() {
        let sol = solve_critical(&xs_family(), &[2.0], &[vec![0.0]], 1e-9);
        assert_eq!(sol.points.len(), 1);
        assert_abs_diff_eq!(sol.points[0].fiber[0], 2.0, epsilon = 1e-8);
        let linear = FunctionFamily::new(1, 1, |_, s| s[0]);
        let none = solve_critical(&linear, &[1.0], &[vec![0.0], vec![4.0]], 1e-9);
        assert!(none.points.is_empty());
        assert_eq!(none.failures.len(), 2);
        assert!(matches!(none.failures[0].1, Error::NoConvergence { .. }));
    }

    #[test]
    fn solve_critical_merges_duplicates() {
        let sol = solve_critical(&xs_family(), &[2.0], &[vec![0.0], vec![5.0], vec![-3.0]], 1e-9);
        assert_eq!(sol.points.len(), 1);
        let quartic = FunctionFamily::new(1, 1, |_, s| (s[0] * s[0] - 1.0).powi(2));
        let two = solve_critical(&quartic, &[0.0], &[vec![1.5], vec![-1.5]], 1e-9);
        assert_eq!(two.points.len(), 2);
    }

    #[test]
    fn hessian_examples() {
        let h = hessian(&xs_family(), &cp(1.0, 1.0));
        assert_abs_diff_eq!(h[(0, 0)], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(h[(0, 1)], -1.0, epsilon = 1e-6);
        assert_eq!(numerical_rank(&h, DEFAULT_RANK_TOL), 1);
        let sq = FunctionFamily::new(1, 1, |_, s| s[0] * s[0]);
        let h = hessian(&sq, &cp(0.4, 0.0));
        assert_abs_diff_eq!(h[(0, 0)], 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(h[(0, 1)], 2.0, epsilon = 1e-6);
    }

    #[test]
    fn hessian_with_analytic_gradient() {
        let fam = xs_family().with_gradient(|b, s| (vec![s[0]], vec![b[0] - s[0]]));
        let h = hessian(&fam, &cp(0.5, 0.5));
        assert_abs_diff_eq!(h[(0, 0)], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(h[(0, 1)], -1.0, epsilon = 1e-9);
    }

    #[test]
    fn morse_examples() {
        let pts = solve_critical(&xs_family(), &[0.7], &[vec![0.0]], 1e-9).points;
        assert!(is_morse(&xs_family(), &pts, DEFAULT_RANK_TOL).is_morse());
        let quartic = FunctionFamily::new(1, 1, |b, s| s[0].powi(4) - b[0] * s[0]);
        let report = is_morse(&quartic, &[cp(0.0, 0.0)], DEFAULT_RANK_TOL);
        assert!(report.is_morse());
        let cubic = FunctionFamily::new(1, 1, |_, s| s[0].powi(3));
        let report = is_morse(&cubic, &[cp(0.0, 0.0)], DEFAULT_RANK_TOL);
        assert_eq!(report.ranks, vec![0]);
        assert!(!report.is_morse());
    }

    #[test]
    fn kappa_examples() {
        let fam = xs_family();
        for x in [-1.5, 0.0, 0.25, 3.0] {
            let pt = solve_critical(&fam, &[x], &[vec![0.0]], 1e-10).points.remove(0);
            let k = kappa(&fam, &pt, 1e-9).unwrap();
            assert_abs_diff_eq!(k.covector[0], x, epsilon = 1e-7);
        }
        let pullback = FunctionFamily::new(2, 1, |b, _| b[0] * b[0] + 3.0 * b[1]);
        let k = kappa(&pullback, &CriticalPoint { base: vec![2.0, 1.0], fiber: vec![0.0], residual: 0.0 }, 1e-9);
        let k = k.unwrap();
        assert_abs_diff_eq!(k.covector[0], 4.0, epsilon = 1e-7);
        assert_abs_diff_eq!(k.covector[1], 3.0, epsilon = 1e-7);
        assert!(matches!(kappa(&fam, &cp(1.0, 0.0), 1e-9), Err(Error::NotCritical { .. })));
    }

    #[test]
    fn kappa_is_lift_independent() {
        let fam = FunctionFamily::new(2, 2, |b, s| {
            b[0] * s[0] + b[1] * b[0] * s[1] - 0.5 * s[0] * s[0] - s[1] * s[1] + b[1].sin()
        });
        let base = vec![0.8, -0.3];
        let pt = solve_critical(&fam, &base, &[vec![0.0, 0.0]], 1e-10).points.remove(0);
        let k = kappa(&fam, &pt, 1e-9).unwrap();
        let (gb, gf) = fam.gradient(&pt.base, &pt.fiber);
        let v = [0.4, 1.1];
        for lift in [[0.0, 0.0], [3.0, -2.0]] {
            let pairing: f64 = gb.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>()
                + gf.iter().zip(&lift).map(|(a, b)| a * b).sum::<f64>();
            let kv: f64 = k.covector.iter().zip(&v).map(|(a, b)| a * b).sum();
            assert_abs_diff_eq!(pairing, kv, epsilon = 1e-9);
        }
    }

    #[test]
    fn generate_examples() {
        let grid: Vec<Vec<f64>> = (-3..=3).map(|i| vec![i as f64 * 0.5]).collect();
        let set = generate(&xs_family(), &grid, &[vec![0.0]], 1e-10).unwrap();
        assert_eq!(set.len(), grid.len());
        for c in &set {
            assert_abs_diff_eq!(c.covector[0], c.base[0], epsilon = 1e-7);
        }
        let cubic = FunctionFamily::new(1, 1, |b, s| s[0].powi(3) - b[0] * b[0] * s[0]);
        assert!(matches!(generate(&cubic, &[vec![0.0]], &[vec![0.0]], 1e-10), Err(Error::NotMorse { .. })));
    }

    #[test]
    fn reduce_quadratic_family() {
        let fam = FunctionFamily::new(1, 2, |b, s| {
            b[0] * s[0] - 0.5 * s[0] * s[0] + b[0] * s[1] - 0.5 * s[1] * s[1]
        });
        let reduced = reduce_family(&fam, 1, vec![vec![0.0]], &[(vec![1.0], vec![0.0])], 1e-10).unwrap();
        let rf = reduced.family();
        assert_eq!(rf.fiber_dim(), 1);
        for (x, s2) in [(1.0, 0.5), (-2.0, 3.0), (0.3, -1.0)] {
            let expected = 0.5 * x * x + x * s2 - 0.5 * s2 * s2;
            assert_abs_diff_eq!(rf.eval(&[x], &[s2]), expected, epsilon = 1e-9);
        }
        let grid: Vec<Vec<f64>> = (-2..=2).map(|i| vec![i as f64]).collect();
        let a = generate(&fam, &grid, &[vec![0.0, 0.0]], 1e-9).unwrap();
        let b = generate(&rf, &grid, &[vec![0.0]], 1e-9).unwrap();
        for (ca, cb) in a.iter().zip(&b) {
            assert_abs_diff_eq!(ca.covector[0], cb.covector[0], epsilon = 1e-7);
        }
    }

    #[test]
    fn reduce_empty_block_is_identity() {
        let fam = xs_family();
        let rf = reduce_family(&fam, 0, vec![], &[], 1e-10).unwrap().family();
        assert_eq!(rf.fiber_dim(), 1);
        assert_abs_diff_eq!(rf.eval(&[0.3], &[1.2]), fam.eval(&[0.3], &[1.2]));
    }

    #[test]
    fn reduce_detects_non_unique_section() {
        let quartic = FunctionFamily::new(1, 2, |b, s| (s[0] * s[0] - 1.0).powi(2) + b[0] * s[1]);
        let res = reduce_family(&quartic, 1, vec![vec![1.5], vec![-1.5]], &[(vec![0.0], vec![0.0])], 1e-10);
        assert!(matches!(res, Err(Error::SectionNotUnique { .. })), "{res:?}");
    }

    #[test]
    fn covector_csv_export() {
        let set = generate(&xs_family(), &[vec![1.0]], &[vec![0.0]], 1e-10).unwrap();
        let mut buf = Vec::new();
        write_covectors_csv(&set, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("base0,covector0\n"));
        assert_eq!(text.lines().count(), 2);
    }
}
