//! The hamiltonian generating families of the homogeneous dynamics in a frame,
//! and the cotangent-bundle example.
//!
//! Base points of `N x V*` are flattened as `[t, q1, q2, q3, p0, p1, p2, p3]`.
//! Each family evaluates to `-H`, the function attached to the fibration.

use nalgebra::Vector3;

use crate::galilean::{g_prime, Covector4, Event, Frame, Vector4};
use crate::generating::FunctionFamily;
use crate::model::NewtonModel;

pub fn encode_xp(x: &Event, p: &Covector4) -> Vec<f64> {
    let c = x.coords();
    vec![c[0], c[1], c[2], c[3], p.0[0], p.0[1], p.0[2], p.0[3]]
}

pub fn decode_xp(base: &[f64]) -> (Event, Covector4) {
    (
        Event::from_coords([base[0], base[1], base[2], base[3]]),
        Covector4([base[4], base[5], base[6], base[7]]),
    )
}

/// Fiber order of [`fam1`]: spatial components first, so the block fixed by
/// `<tau, v>` comes last.
pub fn fam1_fiber(v: &Vector4) -> Vec<f64> {
    vec![v.0[1], v.0[2], v.0[3], v.0[0]]
}

pub fn fam1_velocity(fiber: &[f64]) -> Vector4 {
    Vector4([fiber[3], fiber[0], fiber[1], fiber[2]])
}

/// `-H_{h,u}(x,p,v) = l_{h,u}(x,v) - <p,v>` over `N x V* x V+`.
/// Evaluates to NaN off `V+`.
pub fn fam1(model: &NewtonModel, u: Frame) -> FunctionFamily {
    let m1 = model.clone();
    let value = move |base: &[f64], fiber: &[f64]| {
        let (x, p) = decode_xp(base);
        let v = fam1_velocity(fiber);
        match m1.lagrangian_hom(&u, &x, &v) {
            Ok(l) => l - p.pair(&v),
            Err(_) => f64::NAN,
        }
    };
    let m2 = model.clone();
    let gradient = move |base: &[f64], fiber: &[f64]| {
        let (x, p) = decode_xp(base);
        let v = fam1_velocity(fiber);
        let Ok(lv) = m2.legendre_hom(&u, &x, &v) else {
            return (vec![f64::NAN; 8], vec![f64::NAN; 4]);
        };
        let dphi = m2.potential().gradient(&x);
        let mut gb: Vec<f64> = dphi.0.iter().map(|d| -v.0[0] * d).collect();
        gb.extend(v.0.iter().map(|c| -c));
        let dv = lv - p;
        (gb, vec![dv.0[1], dv.0[2], dv.0[3], dv.0[0]])
    };
    FunctionFamily::new(8, 4, value).with_gradient(gradient)
}

/// `-H~_{h,u}(x,p,r) = -r (<p,g'p>/2m + <p,u> + phi(x))` over `N x V* x R+`.
pub fn fam2(model: &NewtonModel, u: Frame) -> FunctionFamily {
    let m1 = model.clone();
    let value = move |base: &[f64], fiber: &[f64]| {
        let r = fiber[0];
        if !(r > 0.0) {
            return f64::NAN;
        }
        let (x, p) = decode_xp(base);
        -r * m1.mass_shell_residual(&u, &x, &p)
    };
    let m2 = model.clone();
    let gradient = move |base: &[f64], fiber: &[f64]| {
        let r = fiber[0];
        if !(r > 0.0) {
            return (vec![f64::NAN; 8], vec![f64::NAN]);
        }
        let (x, p) = decode_xp(base);
        let dphi = m2.potential().gradient(&x);
        let dres_dp = (1.0 / m2.mass()) * g_prime(m2.metric(), &p) + u.vector();
        let mut gb: Vec<f64> = dphi.0.iter().map(|d| -r * d).collect();
        gb.extend(dres_dp.0.iter().map(|c| -r * c));
        (gb, vec![-m2.mass_shell_residual(&u, &x, &p)])
    };
    FunctionFamily::new(8, 1, value).with_gradient(gradient)
}

/// Point of `V+` selected by the stationarity of [`fam1`] along the
/// `<tau, v> = r` slice: `v = r (u + g^{-1} p_s / m)`.
pub fn fam1_section(model: &NewtonModel, u: &Frame, p: &Covector4, r: f64) -> Vector4 {
    let w = model.velocity_of(u, &p.spatial());
    r * w.vector()
}

/// Cotangent-bundle example: `F(q,p;v) = L(q,v) - <p,v>` with
/// `L = m/2 |v|^2 - k/2 |q|^2`, base `(q, p)`, fiber `v`.
pub fn tq_example(mass: f64, k: f64) -> FunctionFamily {
    let value = move |base: &[f64], v: &[f64]| {
        let q = Vector3::new(base[0], base[1], base[2]);
        let p = Vector3::new(base[3], base[4], base[5]);
        let v = Vector3::new(v[0], v[1], v[2]);
        0.5 * mass * v.norm_squared() - 0.5 * k * q.norm_squared() - p.dot(&v)
    };
    let gradient = move |base: &[f64], v: &[f64]| {
        let mut gb: Vec<f64> = base[..3].iter().map(|q| -k * q).collect();
        gb.extend(v.iter().map(|c| -c));
        let gf = (0..3).map(|i| mass * v[i] - base[3 + i]).collect();
        (gb, gf)
    };
    FunctionFamily::new(6, 3, value).with_gradient(gradient)
}
