//! Frame-independent objects: the quotient spaces `W` and `P`, their
//! operations and pairing, the affine lagrangian, the Tulczyjew maps and the
//! inhomogeneous reduction.
//!
//! A class is stored by its representative in the reference chart
//! `u_ref = (1, 0, 0, 0)`. Constructors taking a frame canonicalize at once, and
//! `in_chart` recovers the representative for any other frame.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::dynamics::HomogeneousTangent;
use crate::error::{Error, Result};
use crate::families::{decode_xp, fam1};
use crate::galilean::{g_prime, iota_star, sigma, uncosplit, Covector4, Event, Frame, SpatialMetric, Vector4};
use crate::generating::{reduce_family, FunctionFamily};
use crate::model::NewtonModel;
use crate::numdiff::rel_err;

/// Representative change for `W`: `(v, r)` in chart `u` becomes
/// `(v, r - m <sigma(u', u), v>)` in chart `u'`.
pub fn w_change_chart(model: &NewtonModel, v: &Vector4, r: f64, u: &Frame, u_prime: &Frame) -> f64 {
    r - model.mass() * sigma(model.metric(), u_prime, u).pair(v)
}

/// Representative change for `P`: `p` in chart `u` becomes `p - m sigma(u', u)` in chart `u'`.
pub fn p_change_chart(model: &NewtonModel, p: &Covector4, u: &Frame, u_prime: &Frame) -> Covector4 {
    *p - model.mass() * sigma(model.metric(), u_prime, u)
}

/// Element of `W`, stored in the reference chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WElement {
    pub v: Vector4,
    pub r: f64,
}

impl WElement {
    /// The zero `w0 = [u, 0, 0]`.
    pub const ZERO: WElement = WElement { v: Vector4::ZERO, r: 0.0 };
    /// `w1 = [u, 0, -1]`, the same in every chart.
    pub const ONE: WElement = WElement { v: Vector4::ZERO, r: -1.0 };

    /// The class of `(u, v, r)`.
    pub fn from_chart(model: &NewtonModel, u: &Frame, v: Vector4, r: f64) -> Self {
        WElement { v, r: w_change_chart(model, &v, r, u, &Frame::rest()) }
    }

    /// The `r` of the representative in chart `u`.
    pub fn in_chart(&self, model: &NewtonModel, u: &Frame) -> f64 {
        w_change_chart(model, &self.v, self.r, &Frame::rest(), u)
    }

    /// The projection `zeta: W -> V`.
    pub fn zeta(&self) -> Vector4 {
        self.v
    }
}

/// Sum of classes. Representatives in one chart add componentwise.
pub fn w_add(a: &WElement, b: &WElement) -> WElement {
    WElement { v: a.v + b.v, r: a.r + b.r }
}

/// `lambda [u, v, r] = [u, lambda v, lambda r]`.
pub fn w_scale(lambda: f64, w: &WElement) -> WElement {
    WElement { v: lambda * w.v, r: lambda * w.r }
}

/// Sum of representatives given in two different charts:
/// `[u,v,r] + [u',v',r'] = [ubar, v + v', r + r' + m(<sigma(u,ubar),v> + <sigma(u',ubar),v'>)]`
/// with `ubar` the midpoint frame.
pub fn w_add_charts(
    model: &NewtonModel,
    (u, v, r): (&Frame, &Vector4, f64),
    (u2, v2, r2): (&Frame, &Vector4, f64),
) -> (Frame, Vector4, f64) {
    let ubar = u.midpoint(u2);
    let g = model.metric();
    let m = model.mass();
    let rbar = r + r2 + m * (sigma(g, u, &ubar).pair(v) + sigma(g, u2, &ubar).pair(v2));
    (ubar, *v + *v2, rbar)
}

/// Element of the affine phase space `P`, stored in the reference chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PElement {
    pub p: Covector4,
}

impl PElement {
    pub fn from_chart(model: &NewtonModel, u: &Frame, p: Covector4) -> Self {
        PElement { p: p_change_chart(model, &p, u, &Frame::rest()) }
    }

    pub fn in_chart(&self, model: &NewtonModel, u: &Frame) -> Covector4 {
        p_change_chart(model, &self.p, &Frame::rest(), u)
    }

    /// Affine action of `V*`.
    pub fn translate(&self, a: &Covector4) -> Self {
        PElement { p: self.p + *a }
    }

    /// The unique `a` with `self = other + a`.
    pub fn difference(&self, other: &PElement) -> Covector4 {
        self.p - other.p
    }
}

/// The affine function `f_w(p) = <p, v> - r`.
pub fn eval_affine(w: &WElement, p: &PElement) -> f64 {
    p.p.pair(&w.v) - w.r
}

/// `<p, v> = [u, v, <p_u, v>]`.
pub fn pairing(p: &PElement, v: &Vector4) -> WElement {
    WElement { v: *v, r: p.p.pair(v) }
}

/// The same pairing built from the representative in chart `u`.
pub fn pairing_in_chart(model: &NewtonModel, u: &Frame, p_u: &Covector4, v: &Vector4) -> WElement {
    WElement::from_chart(model, u, *v, p_u.pair(v))
}

/// `<p, g'p>/2m + <p, u>` for a representative `p` in chart `u`.
pub fn psi_m_chart(model: &NewtonModel, u: &Frame, p_u: &Covector4) -> f64 {
    p_u.pair(&g_prime(model.metric(), p_u)) / (2.0 * model.mass()) + p_u.pair(&u.vector())
}

/// `Psi_m` on `P`; the chart expression is constant on classes.
pub fn psi_m(model: &NewtonModel, p: &PElement) -> f64 {
    psi_m_chart(model, &Frame::rest(), &p.p)
}

/// The affine lagrangian `l_h(x, v)`, the class of `(u_ref, v, l_{h,u_ref}(x, v))`.
pub fn affine_lagrangian(model: &NewtonModel, x: &Event, v: &Vector4) -> Result<WElement> {
    affine_lagrangian_via(model, &Frame::rest(), x, v)
}

/// The affine lagrangian assembled from the frame-`u` homogeneous lagrangian.
pub fn affine_lagrangian_via(model: &NewtonModel, u: &Frame, x: &Event, v: &Vector4) -> Result<WElement> {
    let l = model.lagrangian_hom(u, x, v)?;
    Ok(WElement::from_chart(model, u, *v, l))
}

/// `Psi_m(p) + phi(x)`; zero on the universal mass shell `K_m`.
pub fn universal_hamiltonian_residual(model: &NewtonModel, x: &Event, p: &PElement) -> f64 {
    psi_m(model, p) + model.potential().value(x)
}

/// Coefficient `c` with `a - b = [u, 0, c]`; fails when the projections differ.
pub fn w_fiber_difference(a: &WElement, b: &WElement) -> Result<f64> {
    let dv = a.v - b.v;
    let scale = 1.0 + a.v.max_abs().max(b.v.max_abs());
    if dv.max_abs() > 1e-12 * scale {
        return Err(Error::ProjectionMismatch(dv.max_abs()));
    }
    Ok(a.r - b.r)
}

/// `H_h(x, v, p) = <p, v> - l_h(x, v)`, as a real number.
pub fn hamiltonian_fun(model: &NewtonModel, x: &Event, v: &Vector4, p: &PElement) -> Result<f64> {
    let l = affine_lagrangian(model, x, v)?;
    w_fiber_difference(&pairing(p, v), &l)
}

/// `-H~_h(x, p, r) = -r (Psi_m(p) + phi(x))` over `N x P` (reference-chart
/// coordinates, flattened as in [`crate::families::encode_xp`]) with fiber `r`.
pub fn fam3(model: &NewtonModel) -> FunctionFamily {
    let m1 = model.clone();
    let value = move |base: &[f64], fiber: &[f64]| {
        let r = fiber[0];
        if !(r > 0.0) {
            return f64::NAN;
        }
        let (x, p) = decode_xp(base);
        -r * universal_hamiltonian_residual(&m1, &x, &PElement { p })
    };
    let m2 = model.clone();
    let gradient = move |base: &[f64], fiber: &[f64]| {
        let r = fiber[0];
        if !(r > 0.0) {
            return (vec![f64::NAN; 8], vec![f64::NAN]);
        }
        let (x, p) = decode_xp(base);
        let dpsi = (1.0 / m2.mass()) * g_prime(m2.metric(), &p) + Frame::rest().vector();
        let dphi = m2.potential().gradient(&x);
        let mut gb: Vec<f64> = dphi.0.iter().map(|d| -r * d).collect();
        gb.extend(dpsi.0.iter().map(|c| -r * c));
        (gb, vec![-universal_hamiltonian_residual(&m2, &x, &PElement { p })])
    };
    FunctionFamily::new(8, 1, value).with_gradient(gradient)
}

/// `-H_h(x, p, v) = l_h(x, v) - <p, v>` over `N x P` with fiber `v`, in the
/// fiber order `[v1, v2, v3, v0]` of [`crate::families::fam1`].
pub fn fam4(model: &NewtonModel) -> FunctionFamily {
    fam1(model, Frame::rest())
}

/// Stationarity of [`fam4`] over `v` with the gauge `<tau, v> = 1`.
///
/// Returns the stationary velocity and the residual `-(Psi_m + phi)` left in
/// the `tau` direction of the fiber gradient.
pub fn fam4_stationary(model: &NewtonModel, x: &Event, p: &PElement, tol: f64) -> Result<(Vector4, f64)> {
    let fam = fam4(model);
    let base = crate::families::encode_xp(x, &p.p);
    let reduced = reduce_family(&fam, 3, vec![vec![0.0; 3]], &[], tol)?;
    let vs = reduced.section(&base, &[1.0])?;
    let v = Vector4([1.0, vs[0], vs[1], vs[2]]);
    let grad = fam.gradient(&base, &[vs[0], vs[1], vs[2], 1.0]).1;
    Ok((v, grad[3]))
}

/// Moves `p` onto `K_m` along `tau` so that it equals the Legendre image of `v`.
pub fn complete_on_shell(model: &NewtonModel, x: &Event, v: &Vector4) -> Result<PElement> {
    Ok(PElement { p: model.legendre_hom(&Frame::rest(), x, v)? })
}

/// Point of `T(N x P) = N x P x V x V*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentPhase {
    pub x: Event,
    pub p: PElement,
    pub v: Vector4,
    pub a: Covector4,
}

/// Point of `T*(N x P) = N x P x V* x V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CotangentPhase {
    pub x: Event,
    pub p: PElement,
    pub a: Covector4,
    pub b: Vector4,
}

/// Point of `N x V x V* x P`, the target of `alpha` and `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineCotangent {
    pub x: Event,
    pub v: Vector4,
    pub a: Covector4,
    pub p: PElement,
}

/// `(x, p, v, a) -> (x, v, a, p)`.
pub fn alpha(t: &TangentPhase) -> AffineCotangent {
    AffineCotangent { x: t.x, v: t.v, a: t.a, p: t.p }
}

/// `(x, p, v, a) -> (x, p, a, -v)`.
pub fn beta(t: &TangentPhase) -> CotangentPhase {
    CotangentPhase { x: t.x, p: t.p, a: t.a, b: -t.v }
}

/// `(x, p, a, b) -> (x, p, -b, a)`.
pub fn beta_inv(c: &CotangentPhase) -> TangentPhase {
    TangentPhase { x: c.x, p: c.p, v: -c.b, a: c.a }
}

/// `(x, p, a, v) -> (x, -v, a, p)`.
pub fn gamma(c: &CotangentPhase) -> AffineCotangent {
    AffineCotangent { x: c.x, v: -c.b, a: c.a, p: c.p }
}

/// Membership of `(x, p, xdot, pdot)` in the frame-independent dynamics `D_h`:
/// the reference-chart homogeneous equations for the canonical representative.
pub fn dynamics_membership_universal(
    model: &NewtonModel,
    x: &Event,
    p: &PElement,
    xdot: &Vector4,
    pdot: &Covector4,
    tol: f64,
) -> bool {
    let e = HomogeneousTangent { x: *x, p: p.p, xdot: *xdot, pdot: *pdot };
    model.in_homogeneous_dynamics(&Frame::rest(), &e, tol)
}

/// The class of `p` in `P0 = P / <tau>`, as its spatial part in the reference chart.
pub fn project_p0(p: &PElement) -> Vector3<f64> {
    iota_star(&p.p)
}

/// The element of `P` over `p0` whose reference-chart energy is `energy`.
pub fn lift_p0(p0: &Vector3<f64>, energy: f64) -> PElement {
    PElement { p: uncosplit(&Frame::rest(), p0, energy) }
}

/// Offset `m iota*(sigma(u, u_ref))` subtracted from reference `P0` coordinates
/// to obtain the chart-`u` ones.
pub fn p0_chart_offset(model: &NewtonModel, u: &Frame) -> Vector3<f64> {
    model.mass() * iota_star(&sigma(model.metric(), u, &Frame::rest()))
}

/// `P0` coordinates of `p` as seen from chart `u`.
pub fn project_p0_in_chart(model: &NewtonModel, u: &Frame, p: &PElement) -> Vector3<f64> {
    project_p0(p) - p0_chart_offset(model, u)
}

/// Membership in the inhomogeneous dynamics `D_i` with `P0` coordinates taken in
/// chart `u`: `xdot = u + g^{-1} p0 / m` and `p0dot = -d_s phi(x)`.
pub fn inhomogeneous_dynamics_membership_in_chart(
    model: &NewtonModel,
    u: &Frame,
    x: &Event,
    p0: &Vector3<f64>,
    xdot: &Vector4,
    p0dot: &Vector3<f64>,
    tol: f64,
) -> bool {
    if rel_err(xdot.time(), 1.0) > tol {
        return false;
    }
    let w = model.velocity_of(u, p0).velocity();
    let force = -model.potential().spatial_gradient(x);
    let xs = xdot.spatial();
    (0..3).all(|i| rel_err(xs[i], w[i]) <= tol && rel_err(p0dot[i], force[i]) <= tol)
}

/// [`inhomogeneous_dynamics_membership_in_chart`] in the reference chart.
pub fn inhomogeneous_dynamics_membership(
    model: &NewtonModel,
    x: &Event,
    p0: &Vector3<f64>,
    xdot: &Vector4,
    p0dot: &Vector3<f64>,
    tol: f64,
) -> bool {
    inhomogeneous_dynamics_membership_in_chart(model, &Frame::rest(), x, p0, xdot, p0dot, tol)
}

/// Affine map from velocities in `E1` to `P0`-momenta, given by its value at a
/// base velocity and a symmetric positive definite linear part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMetric {
    base: Vector3<f64>,
    value: Vector3<f64>,
    linear: Matrix3<f64>,
}

impl AffineMetric {
    pub fn new(base: Vector3<f64>, value: Vector3<f64>, linear: Matrix3<f64>) -> Result<Self> {
        SpatialMetric::new(linear)?;
        Ok(AffineMetric { base, value, linear })
    }

    /// The Legendre map `w -> m g(w - u)` of the inhomogeneous lagrangian in frame `u`.
    pub fn legendre_inhom(model: &NewtonModel, u: &Frame) -> Self {
        AffineMetric { base: u.velocity(), value: Vector3::zeros(), linear: model.mass() * model.metric().matrix() }
    }

    pub fn apply(&self, b: &Vector3<f64>) -> Vector3<f64> {
        self.value + self.linear * (b - self.base)
    }

    /// The same affine map described from another base velocity.
    pub fn rebased(&self, new_base: Vector3<f64>) -> Self {
        AffineMetric { base: new_base, value: self.apply(&new_base), linear: self.linear }
    }

    pub fn base(&self) -> Vector3<f64> {
        self.base
    }

    pub fn linear(&self) -> Matrix3<f64> {
        self.linear
    }
}

/// A section whose affine differential is a given [`AffineMetric`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineSection {
    pub metric: AffineMetric,
    /// Value at the base velocity.
    pub constant: f64,
}

impl AffineSection {
    /// `c + <h(a), b - a> + 1/2 <h_lin(b - a), b - a>`.
    pub fn eval(&self, b: &Vector3<f64>) -> f64 {
        let d = b - self.metric.base;
        self.constant + self.metric.value.dot(&d) + 0.5 * d.dot(&(self.metric.linear * d))
    }
}

/// The section generated by `h`, normalized to vanish at the base velocity.
pub fn section_from_affine_metric(h: &AffineMetric) -> AffineSection {
    AffineSection { metric: *h, constant: 0.0 }
}
