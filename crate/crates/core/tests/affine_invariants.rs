mod common;

use common::*;
use galimech_core::affine::*;
use galimech_core::dynamics::{CotangentPoint, HomogeneousTangent};
use galimech_core::galilean::iota_star;
use galimech_core::Covector4;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn w_elem() -> impl Strategy<Value = WElement> {
    (future_vector(), -3.0..3.0f64).prop_map(|(v, r)| WElement { v, r })
}

fn p_elem() -> impl Strategy<Value = PElement> {
    covector().prop_map(|p| PElement { p })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn class_functions_are_chart_independent(
        model in model(), u in frame(), x in event(), v in future_vector(), w in w_elem(), p in p_elem(),
    ) {
        let p_u = p.in_chart(&model, &u);
        let r_u = w.in_chart(&model, &u);
        prop_assert!(rel(p_u.pair(&w.v) - r_u, eval_affine(&w, &p)) <= 1e-10);
        prop_assert!(max_rel4(&PElement::from_chart(&model, &u, p_u).p.0, &p.p.0) <= 1e-12);
        prop_assert!(rel(WElement::from_chart(&model, &u, w.v, r_u).r, w.r) <= 1e-12);

        let paired = pairing_in_chart(&model, &u, &p_u, &v);
        let canonical = pairing(&p, &v);
        prop_assert_eq!(paired.v, canonical.v);
        prop_assert!(rel(paired.r, canonical.r) <= 1e-10);

        prop_assert!(rel(psi_m_chart(&model, &u, &p_u), psi_m(&model, &p)) <= 1e-10);

        let via = affine_lagrangian_via(&model, &u, &x, &v).unwrap();
        let direct = affine_lagrangian(&model, &x, &v).unwrap();
        prop_assert!(rel(via.r, direct.r) <= 1e-10);

        let h_chart = p_u.pair(&v) - model.lagrangian_hom(&u, &x, &v).unwrap();
        prop_assert!(rel(h_chart, hamiltonian_fun(&model, &x, &v, &p).unwrap()) <= 1e-10);
    }

    #[test]
    fn membership_is_chart_independent(model in model(), u in frame(), x in event(), v in future_vector(), kick in covector()) {
        let p_u = model.legendre_hom(&u, &x, &v).unwrap();
        let pdot = -v.time() * model.potential().gradient(&x);
        let class = PElement::from_chart(&model, &u, p_u);
        let framed = HomogeneousTangent { x, p: p_u, xdot: v, pdot };
        prop_assert!(model.in_homogeneous_dynamics(&u, &framed, 1e-10));
        prop_assert!(dynamics_membership_universal(&model, &x, &class, &v, &pdot, 1e-10));
        if kick.max_abs() > 1e-3 {
            let off = class.translate(&kick);
            prop_assert!(!dynamics_membership_universal(&model, &x, &off, &v, &pdot, 1e-10));
        }
    }

    #[test]
    fn universal_shell_agrees_with_every_frame(model in model(), u in frame(), x in event(), p in covector()) {
        let class = PElement::from_chart(&model, &u, p);
        let universal = universal_hamiltonian_residual(&model, &x, &class);
        prop_assert!(rel(universal, model.mass_shell_residual(&u, &x, &p)) <= 1e-10);
    }

    #[test]
    fn boost_commutes_with_class_formation(model in model(), u in frame(), u2 in frame(), x in event(), p2 in covector()) {
        let via_u2 = PElement::from_chart(&model, &u2, p2);
        let boosted = model.boost(&u2, &u, &CotangentPoint { x, p: p2 });
        let via_u = PElement::from_chart(&model, &u, boosted.p);
        prop_assert!(max_rel4(&via_u.p.0, &via_u2.p.0) <= 1e-12);
    }

    #[test]
    fn w_chart_change_composes(model in model(), u in frame(), u1 in frame(), u2 in frame(), w in w_elem()) {
        let step = w_change_chart(&model, &w.v, w_change_chart(&model, &w.v, w.r, &u, &u1), &u1, &u2);
        let direct = w_change_chart(&model, &w.v, w.r, &u, &u2);
        prop_assert!(rel(step, direct) <= 1e-12);
        let back = w_change_chart(&model, &w.v, direct, &u2, &u);
        prop_assert!(rel(back, w.r) <= 1e-12);
        prop_assert_eq!(WElement::ONE.in_chart(&model, &u), -1.0);
    }

    #[test]
    fn w_is_a_vector_space(a in w_elem(), b in w_elem(), c in w_elem(), s in -3.0..3.0f64, t in -3.0..3.0f64) {
        let close = |x: &WElement, y: &WElement| max_rel4(&x.v.0, &y.v.0).max(rel(x.r, y.r)) <= 1e-12;
        prop_assert!(close(&w_add(&w_add(&a, &b), &c), &w_add(&a, &w_add(&b, &c))));
        prop_assert_eq!(w_add(&a, &b), w_add(&b, &a));
        prop_assert_eq!(w_add(&a, &WElement::ZERO), a);
        prop_assert!(close(&w_add(&a, &w_scale(-1.0, &a)), &WElement::ZERO));
        prop_assert!(close(&w_scale(s, &w_add(&a, &b)), &w_add(&w_scale(s, &a), &w_scale(s, &b))));
        prop_assert!(close(&w_scale(s + t, &a), &w_add(&w_scale(s, &a), &w_scale(t, &a))));
        prop_assert!(close(&w_scale(s * t, &a), &w_scale(s, &w_scale(t, &a))));
        prop_assert_eq!(w_scale(1.0, &a), a);
        prop_assert_eq!(w_add(&a, &b).zeta(), a.zeta() + b.zeta());
    }

    #[test]
    fn mixed_chart_sum_is_well_defined(model in model(), u in frame(), u2 in frame(), a in w_elem(), b in w_elem()) {
        let (ubar, v, r) = w_add_charts(&model, (&u, &a.v, a.in_chart(&model, &u)), (&u2, &b.v, b.in_chart(&model, &u2)));
        let sum = WElement::from_chart(&model, &ubar, v, r);
        let direct = w_add(&a, &b);
        prop_assert!(rel(sum.r, direct.r) <= 1e-10);
    }

    #[test]
    fn evaluation_is_linear_in_w(a in w_elem(), b in w_elem(), p in p_elem(), s in -3.0..3.0f64, t in -3.0..3.0f64) {
        let combo = w_add(&w_scale(s, &a), &w_scale(t, &b));
        let expected = s * eval_affine(&a, &p) + t * eval_affine(&b, &p);
        prop_assert!(rel(eval_affine(&combo, &p), expected) <= 1e-12);
        prop_assert_eq!(eval_affine(&WElement::ONE, &p), 1.0);
    }

    #[test]
    fn pairing_is_the_affine_function_of_a_difference(p in p_elem(), q in p_elem(), v in future_vector()) {
        let f = eval_affine(&pairing(&p, &v), &q);
        prop_assert!(rel(f, q.difference(&p).pair(&v)) <= 1e-12);
        prop_assert_eq!(pairing(&p, &v).zeta(), v);
    }

    #[test]
    fn p0_projection_is_chart_covariant(model in model(), u in frame(), p in p_elem(), c in -10.0..10.0f64) {
        prop_assert_eq!(project_p0(&p.translate(&(c * galimech_core::TAU))), project_p0(&p));
        let direct = iota_star(&p.in_chart(&model, &u));
        let predicted = project_p0_in_chart(&model, &u, &p);
        for i in 0..3 {
            prop_assert!(rel(direct[i], predicted[i]) <= 1e-12);
        }
    }

    #[test]
    fn tulczyjew_triple_composes(x in event(), p in p_elem(), v in future_vector(), a in covector()) {
        let t = TangentPhase { x, p, v, a };
        let c = beta(&t);
        prop_assert_eq!(gamma(&c), alpha(&beta_inv(&c)));
        prop_assert_eq!(beta_inv(&c), t);
    }
}

#[test]
fn evaluation_pairing_has_full_rank() {
    let ws = [
        WElement::ONE,
        WElement { v: galimech_core::Vector4::new(1.0, 0.0, 0.0, 0.0), r: 0.0 },
        WElement { v: galimech_core::Vector4::new(0.0, 1.0, 0.0, 0.0), r: 0.5 },
        WElement { v: galimech_core::Vector4::new(0.0, 0.0, 1.0, 0.0), r: -0.2 },
        WElement { v: galimech_core::Vector4::new(0.0, 0.0, 0.0, 1.0), r: 1.0 },
    ];
    let ps = [
        PElement { p: Covector4::ZERO },
        PElement { p: Covector4::new(1.0, 0.0, 0.0, 0.0) },
        PElement { p: Covector4::new(0.0, 1.0, 0.0, 0.0) },
        PElement { p: Covector4::new(0.0, 0.0, 1.0, 0.0) },
        PElement { p: Covector4::new(0.0, 0.0, 0.0, 1.0) },
    ];
    let m = DMatrix::from_fn(5, 5, |i, j| eval_affine(&ws[i], &ps[j]));
    assert_eq!(galimech_core::generating::numerical_rank(&m, 1e-8), 5);
}
