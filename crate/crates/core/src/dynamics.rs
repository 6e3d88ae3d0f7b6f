//! Mechanics in a fixed inertial frame: inhomogeneous and homogeneous
//! lagrangians, Legendre maps, mass shells, boosts and RK4 trajectories.

use std::io::{self, Write};

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::galilean::{g_prime, iota_u, iota_u_star, sigma, Covector4, Event, Frame, Vector4, TAU};
use crate::model::NewtonModel;
use crate::numdiff::rel_err;

/// State `(x, p)` of the inhomogeneous picture, `p` in `E0*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub x: Event,
    pub p: Vector3<f64>,
}

/// State `(x, p)` of the homogeneous picture, `p` in `V*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CotangentPoint {
    pub x: Event,
    pub p: Covector4,
}

/// Tangent vector `(x, p, xdot, pdot)` to `T*N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneousTangent {
    pub x: Event,
    pub p: Covector4,
    pub xdot: Vector4,
    pub pdot: Covector4,
}

/// A fixed-step trajectory. The step index of each point is its position.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub frame: Frame,
    pub mass: f64,
    pub step: f64,
    pub points: Vec<PhasePoint>,
}

/// Header of the trajectory CSV export.
pub const TRAJECTORY_CSV_HEADER: &str = "step,t,q1,q2,q3,p1,p2,p3,H";

/// Formats with 17 significant digits.
pub(crate) fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn steps(&self) -> impl Iterator<Item = (usize, &PhasePoint)> {
        self.points.iter().enumerate()
    }

    /// Writes `step,t,q1,q2,q3,p1,p2,p3,H` rows; `H` is the frame hamiltonian.
    pub fn write_csv<W: Write>(&self, model: &NewtonModel, mut out: W) -> io::Result<()> {
        writeln!(out, "{TRAJECTORY_CSV_HEADER}")?;
        for (k, s) in self.steps() {
            let h = model.hamiltonian_inhom(&s.x, &s.p);
            let cols = [s.x.t, s.x.q.x, s.x.q.y, s.x.q.z, s.p.x, s.p.y, s.p.z, h];
            let row: Vec<String> = cols.iter().map(|c| fmt17(*c)).collect();
            writeln!(out, "{k},{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self, model: &NewtonModel) -> String {
        let mut buf = Vec::new();
        self.write_csv(model, &mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

fn future_time(v: &Vector4) -> Result<f64> {
    let tv = TAU.pair(v);
    if tv > 0.0 && tv.is_finite() {
        Ok(tv)
    } else {
        Err(Error::NotFutureDirected { tau_v: tv })
    }
}

impl NewtonModel {
    /// `m/2 <g(w-u), w-u> - phi(x)` for a velocity `w` in `E1`.
    pub fn lagrangian_inhom(&self, u: &Frame, x: &Event, w: &Frame) -> f64 {
        let rel = w.velocity() - u.velocity();
        0.5 * self.mass() * self.metric().norm_sq(&rel) - self.potential().value(x)
    }

    /// Vertical derivative of [`Self::lagrangian_inhom`]: `m g(iota_u(w))`.
    pub fn legendre_inhom(&self, u: &Frame, w: &Frame) -> Vector3<f64> {
        self.mass() * self.metric().lower(&iota_u(u, &w.vector()).spatial())
    }

    /// Inverse Legendre map: the velocity `u + g^{-1}(p/m)`.
    pub fn velocity_of(&self, u: &Frame, p: &Vector3<f64>) -> Frame {
        Frame::new(u.velocity() + self.metric().raise(p) / self.mass())
    }

    /// `<p, g^{-1} p> / 2m + phi(x)`. The formula is the same in every frame;
    /// the frame enters through the meaning of `p`.
    pub fn hamiltonian_inhom(&self, x: &Event, p: &Vector3<f64>) -> f64 {
        self.metric().dual_norm_sq(p) / (2.0 * self.mass()) + self.potential().value(x)
    }

    /// Equations of motion: `xdot = g^{-1}(p/m) + u`, `pdot = -d_s phi(x)`.
    pub fn vector_field_inhom(&self, u: &Frame, state: &PhasePoint) -> (Vector4, Vector3<f64>) {
        let xdot = self.velocity_of(u, &state.p).vector();
        let pdot = -self.potential().spatial_gradient(&state.x);
        (xdot, pdot)
    }

    /// Homogeneous lagrangian `m/(2<tau,v>) <g(iota_u v), iota_u v> - <tau,v> phi(x)` on `V+`.
    pub fn lagrangian_hom(&self, u: &Frame, x: &Event, v: &Vector4) -> Result<f64> {
        let tv = future_time(v)?;
        let s = iota_u(u, v).spatial();
        Ok(self.mass() / (2.0 * tv) * self.metric().norm_sq(&s) - tv * self.potential().value(x))
    }

    /// Vertical derivative of [`Self::lagrangian_hom`]; its image is the mass shell.
    pub fn legendre_hom(&self, u: &Frame, x: &Event, v: &Vector4) -> Result<Covector4> {
        let tv = future_time(v)?;
        let s = iota_u(u, v).spatial();
        let gs = self.metric().lower(&s);
        let m = self.mass();
        let kinetic = m / (2.0 * tv * tv) * s.dot(&gs);
        Ok((m / tv) * iota_u_star(u, &gs) + (-kinetic - self.potential().value(x)) * TAU)
    }

    /// `<p, g'(p)>/2m + <p, u> + phi(x)`; zero exactly on the mass shell of frame `u`.
    pub fn mass_shell_residual(&self, u: &Frame, x: &Event, p: &Covector4) -> f64 {
        let gp = g_prime(self.metric(), p);
        p.pair(&gp) / (2.0 * self.mass()) + p.pair(&u.vector()) + self.potential().value(x)
    }

    /// Derivative of the shell residual along the tangent vector `(xdot, pdot)` at `(x, p)`.
    pub fn mass_shell_rate(&self, u: &Frame, x: &Event, p: &Covector4, xdot: &Vector4, pdot: &Covector4) -> f64 {
        let dres_dp = (1.0 / self.mass()) * g_prime(self.metric(), p) + u.vector();
        pdot.pair(&dres_dp) + self.potential().gradient(x).pair(xdot)
    }

    /// Lifts an inhomogeneous state of frame `u` to the homogeneous momentum on
    /// the frame-`u` mass shell with the same spatial part.
    pub fn lift_to_shell(&self, u: &Frame, state: &PhasePoint) -> CotangentPoint {
        let v = self.velocity_of(u, &state.p).vector();
        let p = self.legendre_hom(u, &state.x, &v).expect("velocities are future-directed");
        CotangentPoint { x: state.x, p }
    }

    /// Largest mixed error of the three homogeneous-dynamics conditions,
    /// or `None` when `xdot` is not future-directed.
    pub fn homogeneous_dynamics_defect(&self, u: &Frame, e: &HomogeneousTangent) -> Option<f64> {
        let v = e.xdot;
        let tv = future_time(&v).ok()?;
        let expected_pdot = -tv * self.potential().gradient(&e.x);
        let expected_p = self.legendre_hom(u, &e.x, &v).ok()?;
        let mut worst = 0.0_f64;
        for i in 0..4 {
            worst = worst.max(rel_err(e.pdot.0[i], expected_pdot.0[i]));
            worst = worst.max(rel_err(e.p.0[i], expected_p.0[i]));
        }
        Some(worst)
    }

    /// Membership of `(x, p, xdot, pdot)` in the homogeneous dynamics of frame `u`.
    pub fn in_homogeneous_dynamics(&self, u: &Frame, e: &HomogeneousTangent, tol: f64) -> bool {
        self.homogeneous_dynamics_defect(u, e).is_some_and(|d| d <= tol)
    }

    /// The boost `(x, p) -> (x, p + m sigma(u', u))`, carrying the frame-`u'`
    /// description to the frame-`u` one.
    pub fn boost(&self, u_prime: &Frame, u: &Frame, state: &CotangentPoint) -> CotangentPoint {
        CotangentPoint { x: state.x, p: state.p + self.mass() * sigma(self.metric(), u_prime, u) }
    }

    /// Classical fixed-step RK4 on the frame-`u` equations of motion.
    /// The time coordinate of point `k` is exactly `t0 + k h`.
    pub fn integrate(&self, u: &Frame, initial: &PhasePoint, h: f64, n: usize) -> Result<Trajectory> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("number of steps must be at least 1".into()));
        }
        if !initial.x.is_finite() || !initial.p.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFiniteState { step: 0 });
        }
        let t0 = initial.x.t;
        let rhs = |t: f64, q: Vector3<f64>, p: Vector3<f64>| {
            let (xdot, pdot) = self.vector_field_inhom(u, &PhasePoint { x: Event { t, q }, p });
            (xdot.spatial(), pdot)
        };
        let mut points = Vec::with_capacity(n + 1);
        points.push(*initial);
        let (mut q, mut p) = (initial.x.q, initial.p);
        for k in 0..n {
            let t = t0 + k as f64 * h;
            let (k1q, k1p) = rhs(t, q, p);
            let (k2q, k2p) = rhs(t + 0.5 * h, q + 0.5 * h * k1q, p + 0.5 * h * k1p);
            let (k3q, k3p) = rhs(t + 0.5 * h, q + 0.5 * h * k2q, p + 0.5 * h * k2p);
            let (k4q, k4p) = rhs(t + h, q + h * k3q, p + h * k3p);
            q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
            p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            let next = PhasePoint { x: Event { t: t0 + (k + 1) as f64 * h, q }, p };
            if !next.x.is_finite() || !p.iter().all(|c| c.is_finite()) {
                return Err(Error::NonFiniteState { step: k + 1 });
            }
            points.push(next);
        }
        Ok(Trajectory { frame: *u, mass: self.mass(), step: h, points })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galilean::SpatialMetric;
    use crate::potential::{FnPotential, Harmonic, Potential};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;
    use std::sync::Arc;

    fn e0() -> Frame {
        Frame::rest()
    }

    fn fx(vx: f64) -> Frame {
        Frame::new(Vector3::new(vx, 0.0, 0.0))
    }

    fn model(m: f64, g: SpatialMetric, phi: Arc<dyn Potential>) -> NewtonModel {
        NewtonModel::new(m, g, phi).unwrap()
    }

    fn constant_potential(c: f64) -> Arc<dyn Potential> {
        Arc::new(FnPotential::new(move |_: &Event| c, true))
    }

    #[test]
    fn lagrangian_inhom_examples() {
        let free = NewtonModel::free_unit();
        let x = Event::origin();
        let u = Frame::new(Vector3::new(0.2, 0.1, 0.0));
        assert_eq!(free.lagrangian_inhom(&u, &x, &u), 0.0);
        assert_abs_diff_eq!(free.lagrangian_inhom(&e0(), &x, &fx(1.0)), 0.5);
        let m2 = model(2.0, SpatialMetric::identity(), constant_potential(1.0));
        assert_abs_diff_eq!(m2.lagrangian_inhom(&e0(), &x, &fx(3.0)), 8.0);
    }

    #[test]
    fn legendre_inhom_examples() {
        let free = NewtonModel::free_unit();
        assert_eq!(free.legendre_inhom(&fx(0.7), &fx(0.7)), Vector3::zeros());
        let m2 = model(2.0, SpatialMetric::identity(), constant_potential(0.0));
        assert_eq!(m2.legendre_inhom(&e0(), &fx(3.0)), Vector3::new(6.0, 0.0, 0.0));
        let w = Frame::new(Vector3::new(1.0, 2.0, 0.0));
        assert_eq!(free.legendre_inhom(&fx(1.0), &w), Vector3::new(0.0, 2.0, 0.0));
    }

    #[test]
    fn hamiltonian_inhom_examples() {
        let c = model(1.0, SpatialMetric::identity(), constant_potential(2.5));
        assert_eq!(c.hamiltonian_inhom(&Event::origin(), &Vector3::zeros()), 2.5);
        let free = NewtonModel::free_unit();
        assert_abs_diff_eq!(free.hamiltonian_inhom(&Event::origin(), &Vector3::new(1.0, 0.0, 0.0)), 0.5);
        let g2 = model(2.0, SpatialMetric::diagonal(2.0, 2.0, 2.0).unwrap(), constant_potential(0.0));
        assert_abs_diff_eq!(g2.hamiltonian_inhom(&Event::origin(), &Vector3::new(2.0, 0.0, 0.0)), 0.5);
    }

    #[test]
    fn vector_field_examples() {
        let free = NewtonModel::free_unit();
        let rest = PhasePoint { x: Event::origin(), p: Vector3::zeros() };
        assert_eq!(free.vector_field_inhom(&e0(), &rest), (e0().vector(), Vector3::zeros()));
        let moving = PhasePoint { x: Event::origin(), p: Vector3::new(1.0, 0.0, 0.0) };
        assert_eq!(free.vector_field_inhom(&e0(), &moving).0, Vector4::new(1.0, 1.0, 0.0, 0.0));
        let osc = free.with_potential(Arc::new(Harmonic::unit()));
        let displaced = PhasePoint { x: Event::new(0.0, 1.0, 0.0, 0.0), p: Vector3::zeros() };
        assert_eq!(osc.vector_field_inhom(&e0(), &displaced).1, Vector3::new(-1.0, 0.0, 0.0));
    }

    #[test]
    fn lagrangian_hom_examples() {
        let free = NewtonModel::free_unit();
        let x = Event::origin();
        assert_abs_diff_eq!(free.lagrangian_hom(&e0(), &x, &Vector4::new(2.0, 2.0, 0.0, 0.0)).unwrap(), 1.0);
        let osc = free.with_potential(Arc::new(Harmonic::unit()));
        let x1 = Event::new(0.0, 0.5, 1.0, 0.0);
        let u = fx(0.3);
        let w = Frame::new(Vector3::new(1.0, -0.5, 2.0));
        assert_abs_diff_eq!(
            osc.lagrangian_hom(&u, &x1, &w.vector()).unwrap(),
            osc.lagrangian_inhom(&u, &x1, &w),
            epsilon = 1e-14
        );
        let v = Vector4::new(0.7, 1.0, -0.2, 0.4);
        assert_abs_diff_eq!(
            osc.lagrangian_hom(&u, &x1, &(3.0 * v)).unwrap(),
            3.0 * osc.lagrangian_hom(&u, &x1, &v).unwrap(),
            epsilon = 1e-13
        );
        assert!(matches!(
            free.lagrangian_hom(&e0(), &x, &Vector4::new(-1.0, 0.0, 0.0, 0.0)),
            Err(Error::NotFutureDirected { .. })
        ));
    }

    #[test]
    fn legendre_hom_examples() {
        let free = NewtonModel::free_unit();
        let x = Event::origin();
        assert_eq!(free.legendre_hom(&e0(), &x, &e0().vector()).unwrap(), Covector4::ZERO);
        let p = free.legendre_hom(&e0(), &x, &Vector4::new(1.0, 1.0, 0.0, 0.0)).unwrap();
        assert_eq!(p, Covector4::new(-0.5, 1.0, 0.0, 0.0));
        let p2 = free.legendre_hom(&e0(), &x, &Vector4::new(2.0, 2.0, 0.0, 0.0)).unwrap();
        assert_eq!(p2, p);
    }

    #[test]
    fn mass_shell_examples() {
        let free = NewtonModel::free_unit();
        let x = Event::origin();
        assert_eq!(free.mass_shell_residual(&e0(), &x, &Covector4::ZERO), 0.0);
        assert_eq!(free.mass_shell_residual(&e0(), &x, &Covector4::new(-0.5, 1.0, 0.0, 0.0)), 0.0);
    }

    #[test]
    fn homogeneous_membership_examples() {
        let free = NewtonModel::free_unit();
        let good = HomogeneousTangent {
            x: Event::new(3.0, -1.0, 2.0, 0.5),
            p: Covector4::new(-0.5, 1.0, 0.0, 0.0),
            xdot: Vector4::new(1.0, 1.0, 0.0, 0.0),
            pdot: Covector4::ZERO,
        };
        assert!(free.in_homogeneous_dynamics(&e0(), &good, 1e-12));
        let bad_pdot = HomogeneousTangent { pdot: Covector4::new(1.0, 0.0, 0.0, 0.0), ..good };
        assert!(!free.in_homogeneous_dynamics(&e0(), &bad_pdot, 1e-12));
        let reversed = HomogeneousTangent { xdot: Vector4::new(-1.0, -1.0, 0.0, 0.0), ..good };
        assert!(!free.in_homogeneous_dynamics(&e0(), &reversed, 1e-12));
    }

    #[test]
    fn boost_examples() {
        let free = NewtonModel::free_unit();
        let s = CotangentPoint { x: Event::new(1.0, 2.0, 3.0, 4.0), p: Covector4::new(0.3, 0.1, -0.2, 0.9) };
        assert_eq!(free.boost(&fx(0.4), &fx(0.4), &s), s);
        let rest = CotangentPoint { x: Event::origin(), p: Covector4::ZERO };
        assert_eq!(free.boost(&fx(1.0), &e0(), &rest).p, Covector4::new(-0.5, 1.0, 0.0, 0.0));
        // p = 0 is on the shell of u' = (1,1,0,0); its boost lies on the shell of u = e0.
        assert_eq!(free.mass_shell_residual(&fx(1.0), &rest.x, &rest.p), 0.0);
        let boosted = free.boost(&fx(1.0), &e0(), &rest);
        assert_eq!(free.mass_shell_residual(&e0(), &boosted.x, &boosted.p), 0.0);
    }

    #[test]
    fn integrate_free_particle_is_linear() {
        let free = NewtonModel::free_unit();
        let init = PhasePoint { x: Event::origin(), p: Vector3::new(1.0, 0.0, 0.0) };
        let traj = free.integrate(&e0(), &init, 0.1, 10).unwrap();
        assert_eq!(traj.len(), 11);
        for (k, s) in traj.steps() {
            assert_eq!(s.x.t, k as f64 * 0.1);
            assert_abs_diff_eq!(s.x.q.x, s.x.t, epsilon = 1e-14);
        }
    }

    #[test]
    fn integrate_harmonic_quarter_period() {
        let osc = NewtonModel::free_unit().with_potential(Arc::new(Harmonic::unit()));
        let init = PhasePoint { x: Event::new(0.0, 1.0, 0.0, 0.0), p: Vector3::zeros() };
        let errors: Vec<f64> = [100usize, 200]
            .iter()
            .map(|&n| {
                let h = FRAC_PI_2 / n as f64;
                let end = *osc.integrate(&e0(), &init, h, n).unwrap().points.last().unwrap();
                let err = end.x.q.x.abs().max((end.p.x + 1.0).abs());
                assert!(err <= 0.1 * h.powi(4), "error {err:e} for h = {h}");
                err
            })
            .collect();
        let ratio = errors[0] / errors[1];
        assert!((12.0..20.0).contains(&ratio), "convergence ratio {ratio}");
    }

    #[test]
    fn integrate_rejects_bad_arguments() {
        let free = NewtonModel::free_unit();
        let init = PhasePoint { x: Event::origin(), p: Vector3::zeros() };
        assert!(matches!(free.integrate(&e0(), &init, 0.1, 0), Err(Error::InvalidArgument(_))));
        assert!(matches!(free.integrate(&e0(), &init, -0.1, 3), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn integrate_reports_overflow() {
        let blowup = NewtonModel::free_unit()
            .with_potential(Arc::new(FnPotential::new(|x: &Event| -(x.q.x * x.q.x).exp(), true)));
        let init = PhasePoint { x: Event::new(0.0, 2.0, 0.0, 0.0), p: Vector3::zeros() };
        let res = blowup.integrate(&e0(), &init, 0.5, 200);
        assert!(matches!(res, Err(Error::NonFiniteState { .. })), "{res:?}");
    }

    #[test]
    fn csv_header_and_rows() {
        let free = NewtonModel::free_unit();
        let init = PhasePoint { x: Event::origin(), p: Vector3::new(1.0, 0.0, 0.0) };
        let csv = free.integrate(&e0(), &init, 0.5, 2).unwrap().to_csv_string(&free);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], TRAJECTORY_CSV_HEADER);
        assert_eq!(lines.len(), 4);
        let last: Vec<f64> = lines[3].split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(last[0], 2.0);
        assert_eq!(last[1], 1.0);
        assert_eq!(last[8], 0.5);
    }
}
