//! WebAssembly bindings for the browser demo in `www/`.
//!
//! The functions here are plain Rust; `js` re-exports them under the same
//! names. Every export returns a flat `Vec<f64>` (a `Float64Array` on the JS side)
//! whose layout is given in its doc comment.

use std::sync::Arc;

use galimech_core::affine::{w_change_chart, WElement};
use galimech_core::dynamics::PhasePoint;
use galimech_core::galilean::{iota_star, sigma};
use galimech_core::potential::{FreePotential, Harmonic, Potential};
use galimech_core::{Event, Frame, NewtonModel, SpatialMetric, Vector4};
use nalgebra::Vector3;

fn model(mass: f64, k: f64) -> Result<NewtonModel, String> {
    let potential: Arc<dyn Potential> =
        if k > 0.0 { Arc::new(Harmonic { k, center: Vector3::zeros() }) } else { Arc::new(FreePotential) };
    NewtonModel::new(mass, SpatialMetric::identity(), potential).map_err(|e| e.to_string())
}

/// Integrates one motion in the rest frame and in the frame moving with
/// velocity `(frame_vx, frame_vy, 0)`, starting at `(0, 1, 0, 0)` with
/// velocity `(0, 1, 0)`.
///
/// Layout: `[event_gap, offset_gap, n, q1_0, q2_0, q1_1, q2_1, ...]` with `n`
/// points of the shared world-line.
pub fn worldlines(mass: f64, k: f64, frame_vx: f64, frame_vy: f64, h: f64, steps: u32) -> Result<Vec<f64>, String> {
    let model = model(mass, k)?;
    let frames = [Frame::rest(), Frame::new(Vector3::new(frame_vx, frame_vy, 0.0))];
    let x0 = Event::new(0.0, 1.0, 0.0, 0.0);
    let w0 = Frame::new(Vector3::new(0.0, 1.0, 0.0));
    let mut runs = Vec::with_capacity(2);
    for u in &frames {
        let start = PhasePoint { x: x0, p: model.legendre_inhom(u, &w0) };
        runs.push(model.integrate(u, &start, h, steps as usize).map_err(|e| e.to_string())?);
    }
    let shift = mass * iota_star(&sigma(model.metric(), &frames[0], &frames[1]));
    let (mut event_gap, mut offset_gap) = (0.0_f64, 0.0_f64);
    for (a, b) in runs[0].points.iter().zip(&runs[1].points) {
        event_gap = event_gap.max((a.x.q - b.x.q).amax());
        offset_gap = offset_gap.max((b.p - a.p - shift).amax());
    }
    let mut out = vec![event_gap, offset_gap, runs[0].len() as f64];
    for s in &runs[0].points {
        out.push(s.x.q.x);
        out.push(s.x.q.y);
    }
    Ok(out)
}

/// Mass-shell residual of the on-shell momentum of velocity `(wx, wy, 0)` in the
/// rest frame, then of its boost to the frame `(frame_vx, frame_vy, 0)` with the
/// true `sigma` and with `sigma` scaled by `sigma_scale`.
///
/// Layout: `[p0, p1, p2, residual_rest, boosted_p0, boosted_p1, boosted_p2,
/// residual_boosted, residual_scaled]`.
pub fn boost_shell(mass: f64, k: f64, wx: f64, wy: f64, frame_vx: f64, frame_vy: f64, sigma_scale: f64) -> Result<Vec<f64>, String> {
    let model = model(mass, k)?;
    let rest = Frame::rest();
    let u = Frame::new(Vector3::new(frame_vx, frame_vy, 0.0));
    let x = Event::new(0.0, 1.0, 0.0, 0.0);
    let v = Vector4::new(1.0, wx, wy, 0.0);
    let p = model.legendre_hom(&rest, &x, &v).map_err(|e| e.to_string())?;
    // The rest-frame description carried to the frame u: p - m sigma(u, rest).
    let s = sigma(model.metric(), &u, &rest);
    let boosted = p - mass * s;
    let scaled = p - (mass * sigma_scale) * s;
    Ok(vec![
        p.0[0],
        p.0[1],
        p.0[2],
        model.mass_shell_residual(&rest, &x, &p),
        boosted.0[0],
        boosted.0[1],
        boosted.0[2],
        model.mass_shell_residual(&u, &x, &boosted),
        model.mass_shell_residual(&u, &x, &scaled),
    ])
}

/// `sigma(u2, u1)` for two planar frames, and the element `(v, r)` of `W`
/// given in chart `u1` read in chart `u2` and back.
///
/// Layout: `[sigma0, sigma1, sigma2, r_in_u2, r_round_trip, r_in_reference]`.
#[allow(clippy::too_many_arguments)]
pub fn sigma_chart(mass: f64, u1x: f64, u1y: f64, u2x: f64, u2y: f64, vx: f64, vy: f64, r: f64) -> Result<Vec<f64>, String> {
    let model = model(mass, 0.0)?;
    let u1 = Frame::new(Vector3::new(u1x, u1y, 0.0));
    let u2 = Frame::new(Vector3::new(u2x, u2y, 0.0));
    let v = Vector4::new(1.0, vx, vy, 0.0);
    let s = sigma(model.metric(), &u2, &u1);
    let r2 = w_change_chart(&model, &v, r, &u1, &u2);
    let back = w_change_chart(&model, &v, r2, &u2, &u1);
    let class = WElement::from_chart(&model, &u1, v, r);
    Ok(vec![s.0[0], s.0[1], s.0[2], r2, back, class.r])
}

/// Browser entry points; errors become JS exceptions.
mod js {
    use wasm_bindgen::prelude::*;

    fn err(e: String) -> JsError {
        JsError::new(&e)
    }

    #[wasm_bindgen]
    pub fn worldlines(mass: f64, k: f64, frame_vx: f64, frame_vy: f64, h: f64, steps: u32) -> Result<Vec<f64>, JsError> {
        super::worldlines(mass, k, frame_vx, frame_vy, h, steps).map_err(err)
    }

    #[wasm_bindgen]
    pub fn boost_shell(mass: f64, k: f64, wx: f64, wy: f64, frame_vx: f64, frame_vy: f64, sigma_scale: f64) -> Result<Vec<f64>, JsError> {
        super::boost_shell(mass, k, wx, wy, frame_vx, frame_vy, sigma_scale).map_err(err)
    }

    #[wasm_bindgen]
    #[allow(clippy::too_many_arguments)]
    pub fn sigma_chart(mass: f64, u1x: f64, u1y: f64, u2x: f64, u2y: f64, vx: f64, vy: f64, r: f64) -> Result<Vec<f64>, JsError> {
        super::sigma_chart(mass, u1x, u1y, u2x, u2y, vx, vy, r).map_err(err)
    }
}
