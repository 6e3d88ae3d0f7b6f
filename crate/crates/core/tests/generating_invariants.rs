mod common;

use std::sync::Arc;

use common::*;
use galimech_core::affine::{fam3, PElement};
use galimech_core::families::{decode_xp, encode_xp, fam1, fam1_fiber, fam1_section, fam2, tq_example};
use galimech_core::generating::*;
use galimech_core::potential::Harmonic;
use galimech_core::{Covector4, Event, Frame, NewtonModel, SpatialMetric};
use nalgebra::Vector3;
use proptest::prelude::*;

fn model() -> NewtonModel {
    NewtonModel::new(1.7, SpatialMetric::diagonal(1.0, 0.5, 2.0).unwrap(), Arc::new(Harmonic::unit())).unwrap()
}

/// 25 on-shell base points of frame `u`: a 5x5 grid in (q1, p1).
fn shell_grid(model: &NewtonModel, u: &Frame) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            let x = Event::new(0.1, -1.0 + 0.5 * i as f64, 0.3, -0.2);
            let ps = Vector3::new(-1.0 + 0.5 * j as f64, 0.4, -0.1);
            let v = model.velocity_of(u, &ps).vector();
            out.push(encode_xp(&x, &model.legendre_hom(u, &x, &v).unwrap()));
        }
    }
    out
}

#[test]
fn reduced_fam1_generates_the_fam2_set() {
    let model = model();
    let u = Frame::new(Vector3::new(0.4, 0.1, -0.3));
    let grid = shell_grid(&model, &u);
    let f1 = fam1(&model, u);
    let reduced = reduce_family(&f1, 3, vec![vec![0.0; 3]], &[(grid[0].clone(), vec![1.0])], 1e-12).unwrap();
    let rf = reduced.family();
    let a = generate(&rf, &grid, &[vec![1.0]], 1e-11).unwrap();
    let b = generate(&fam2(&model, u), &grid, &[vec![1.0]], 1e-11).unwrap();
    assert_eq!(a.len(), 25);
    assert_eq!(b.len(), 25);
    let worst = a
        .iter()
        .zip(&b)
        .flat_map(|(x, y)| x.covector.iter().zip(&y.covector).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max);
    assert!(worst <= 1e-8, "{worst:e}");
    for cp in a.iter().map(|g| &g.source) {
        let s = reduced.section(&cp.base, &cp.fiber).unwrap();
        let full = [s.as_slice(), cp.fiber.as_slice()].concat();
        assert!(f1.eval(&cp.base, &full).abs() <= 1e-10);
    }
}

#[test]
fn fam1_and_fam2_generate_the_same_covectors() {
    let model = model();
    let u = Frame::new(Vector3::new(-0.2, 0.6, 0.0));
    let grid = shell_grid(&model, &u);
    let f1 = fam1(&model, u);
    let f2 = fam2(&model, u);
    for base in &grid {
        let g1 = generate(&f1, std::slice::from_ref(base), &[vec![0.0, 0.0, 0.0, 1.0]], 1e-11).unwrap();
        let r = g1[0].source.fiber[3];
        let g2 = generate(&f2, std::slice::from_ref(base), &[vec![r]], 1e-11).unwrap();
        for (p, q) in g1[0].covector.iter().zip(&g2[0].covector) {
            assert!((p - q).abs() <= 1e-8, "{p} vs {q}");
        }
    }
}

#[test]
fn fam3_matches_fam2_in_the_reference_frame() {
    let model = model();
    let rest = Frame::rest();
    let grid = shell_grid(&model, &rest);
    let a = generate(&fam3(&model), &grid, &[vec![1.3]], 1e-11).unwrap();
    let b = generate(&fam2(&model, rest), &grid, &[vec![1.3]], 1e-11).unwrap();
    for (x, y) in a.iter().zip(&b) {
        for (p, q) in x.covector.iter().zip(&y.covector) {
            assert!((p - q).abs() <= 1e-12);
        }
    }
}

#[test]
fn fam3_base_image_is_the_universal_shell_in_any_chart() {
    let model = model();
    let u = Frame::new(Vector3::new(1.0, -0.5, 0.25));
    for base in shell_grid(&model, &u) {
        let (x, p_u) = decode_xp(&base);
        let class = PElement::from_chart(&model, &u, p_u);
        let sol = solve_critical(&fam3(&model), &encode_xp(&x, &class.p), &[vec![1.0]], 1e-11);
        assert_eq!(sol.points.len(), 1);
    }
}

#[test]
fn example_hessian_rank_is_dim_q() {
    let fam = tq_example(1.5, 2.0);
    for i in 0..100 {
        let t = i as f64 * 0.37;
        let base = vec![t.sin(), (2.0 * t).cos(), 0.3 * t - 1.0, t.cos(), -t.sin(), 0.5];
        let pt = solve_critical(&fam, &base, &[vec![0.0; 3]], 1e-12).points.remove(0);
        let report = is_morse(&fam, std::slice::from_ref(&pt), DEFAULT_RANK_TOL);
        assert_eq!(report.ranks, vec![3]);
    }
}

fn fiber_block_asymmetry(fam: &FunctionFamily, cp: &CriticalPoint) -> f64 {
    let h = hessian(fam, cp);
    let block = h.columns(fam.base_dim(), fam.fiber_dim()).into_owned();
    (&block - block.transpose()).amax()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fam1_hessian_fiber_block_is_symmetric(ps in vec3(1.5), q in vec3(1.0), u in frame(), r in 0.5..2.0f64) {
        let model = model();
        let x = Event { t: 0.0, q };
        let v = model.velocity_of(&u, &ps).vector();
        let p = model.legendre_hom(&u, &x, &v).unwrap();
        let s = fam1_section(&model, &u, &p, r);
        let cp = CriticalPoint { base: encode_xp(&x, &p), fiber: fam1_fiber(&s), residual: 0.0 };
        prop_assert!(fiber_block_asymmetry(&fam1(&model, u), &cp) <= 1e-6);
    }

    #[test]
    fn kappa_does_not_depend_on_the_lift(ps in vec3(1.5), q in vec3(1.0), u in frame(),
                                         dv in prop::array::uniform8(-1.0..1.0f64),
                                         l1 in -2.0..2.0f64, l2 in -2.0..2.0f64) {
        let model = model();
        let fam = fam2(&model, u);
        let x = Event { t: 0.0, q };
        let v = model.velocity_of(&u, &ps).vector();
        let p = model.legendre_hom(&u, &x, &v).unwrap();
        let base = encode_xp(&x, &p);
        let cp = solve_critical(&fam, &base, &[vec![1.0]], 1e-12).points.remove(0);
        let k = kappa(&fam, &cp, 1e-12).unwrap();
        let (gb, gf) = fam.gradient(&cp.base, &cp.fiber);
        let pair = |lift: f64| gb.iter().zip(&dv).map(|(a, b)| a * b).sum::<f64>() + gf[0] * lift;
        let kv: f64 = k.covector.iter().zip(&dv).map(|(a, b)| a * b).sum();
        prop_assert!((pair(l1) - pair(l2)).abs() <= 1e-9);
        prop_assert!((pair(l1) - kv).abs() <= 1e-9);
    }

    #[test]
    fn fam2_critical_set_is_the_mass_shell(ps in vec3(1.5), q in vec3(1.0), u in frame(), shift in -1.0..1.0f64) {
        let model = model();
        let x = Event { t: 0.0, q };
        let v = model.velocity_of(&u, &ps).vector();
        let p = model.legendre_hom(&u, &x, &v).unwrap() + Covector4::new(shift, 0.0, 0.0, 0.0);
        let found = !solve_critical(&fam2(&model, u), &encode_xp(&x, &p), &[vec![1.0]], 1e-12).points.is_empty();
        let on_shell = model.mass_shell_residual(&u, &x, &p).abs() <= 1e-12;
        prop_assert_eq!(found, on_shell);
    }
}
