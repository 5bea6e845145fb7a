use proptest::prelude::*;
use rplab_core::et_model::*;
use rplab_core::perturbation::*;

#[test]
fn sparse_asymmetric_manifold_matches_second_order() {
    // Four intermediates at +-0.5, +-1.5 with -0.5 removed; one mode at omega_R.
    let cfg = EtConfig {
        n_intermediate: 4,
        manifold_width: 4.0,
        removed_intermediates: vec![1],
        n_modes: 1,
        lambda: 0.01,
        g: 0.01,
        ..EtConfig::baseline()
    };
    let model = build_model(&cfg).unwrap();
    let t = 100.0;
    let rep = perturbative_vs_exact(&model, &[t]).unwrap();
    assert!(rep.k_estimate * t < 0.1);
    let row = &rep.modes[0];
    let eq3 = second_order_product(&model, 0, t).unwrap().amplitude;
    assert!(row.max_dev_leading / eq3.norm() < 0.10, "{row:?}");
    // Residual is the second-order level shift of |R>, lambda^2 sum 1/Delta t ~ 2%.
    assert!(row.max_dev_complete / row.max_exact < 0.03, "{row:?}");
}

#[test]
fn symmetric_baseline_is_below_second_order_scale() {
    let times: Vec<f64> = (1..=30).map(|j| j as f64 * 0.1).collect();
    let model = build_model(&EtConfig::baseline()).unwrap();
    let rep = perturbative_vs_exact(&model, &times).unwrap();
    // Exact amplitudes stay at the lambda g t^2 scale, far below lambda g t / Delta.
    assert!(rep.suppression > 10.0, "{}", rep.suppression);
    let lam_g_t2 = 0.01 * 0.03 * 3.0_f64.powi(2);
    assert!(rep.max_exact <= 2.0 * lam_g_t2, "{}", rep.max_exact);
}

#[test]
fn complete_second_order_matches_weak_coupling_dynamics() {
    let residual = |c: f64| {
        let cfg =
            EtConfig { n_intermediate: 10, manifold_width: 1.0, n_modes: 8, lambda: c, g: c, ..EtConfig::baseline() };
        let model = build_model(&cfg).unwrap();
        let times: Vec<f64> = (1..=20).map(|j| j as f64 * 0.5).collect();
        let rep = perturbative_vs_exact(&model, &times).unwrap();
        rep.modes.iter().map(|r| r.max_dev_complete).fold(0.0, f64::max) / rep.max_exact
    };
    let (coarse, fine) = (residual(0.002), residual(0.001));
    assert!(coarse < 1e-2, "{coarse}");
    // Next correction is fourth order: relative residual scales with coupling^2.
    let ratio = coarse / fine;
    assert!((3.5..4.5).contains(&ratio), "{coarse} / {fine} = {ratio}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn odd_function_cancellation(half_m in 1usize..150, w in 0.1f64..5.0, k in 1usize..20, p_frac in 0.0f64..1.0, lambda in 1e-4f64..0.1, g in 1e-4f64..0.1, t in 0.0f64..100.0) {
        let cfg = EtConfig { n_intermediate: 2 * half_m, manifold_width: w, n_modes: k, lambda, g, ..EtConfig::baseline() };
        let model = build_model(&cfg).unwrap();
        let p = ((p_frac * k as f64) as usize).min(k - 1);
        let s = inner_sum(&model, p).unwrap();
        prop_assert!(s.total.abs() <= 1e-12 * s.positive.abs());
        prop_assert!(second_order_product(&model, p, t).unwrap().amplitude.norm() <= 1e-12 * t * s.positive.abs());
    }

    #[test]
    fn sinc_is_even(x in -1e3f64..1e3) {
        prop_assert_eq!(sinc(x), sinc(-x));
    }

    #[test]
    fn resonant_limit_error_is_first_order_in_detuning(x in 1e-4f64..0.1, t in 0.5f64..50.0) {
        // exact / limit = 1 - i x / 3 - x^2 / 12 + O(x^3).
        let cfg = EtConfig { resonant_flag: true, n_intermediate: 4, n_modes: 1, ..EtConfig::baseline() };
        let model = build_model(&cfg).unwrap();
        let delta = x / t;
        let exact = resonant_kernel(delta, t);
        let limit = rplab_core::C64::from_polar(t * t / 2.0, delta * t);
        let rel = (exact - limit).norm() / limit.norm();
        prop_assert!((rel - x / 3.0).abs() <= x * x);
        let r = second_order_resonant(&model, t).unwrap();
        prop_assert!(r.exact[0].norm() > 0.0);
    }

    #[test]
    fn coupling_linearity(scale in 0.5f64..3.0, t in 0.1f64..20.0) {
        let base = EtConfig { n_intermediate: 6, n_modes: 3, removed_intermediates: vec![2], ..EtConfig::baseline() };
        let a = build_model(&base).unwrap();
        let b = build_model(&EtConfig { lambda: base.lambda * scale, g: base.g * scale, ..base.clone() }).unwrap();
        let f1 = first_order_intermediate(&a, 1, t, false).unwrap().amplitude;
        let f2 = first_order_intermediate(&b, 1, t, false).unwrap().amplitude;
        prop_assert!((f2 - f1 * scale).norm() <= 1e-14 * f2.norm());
        let s1 = second_order_product_complete(&a, 1, t).unwrap().amplitude;
        let s2 = second_order_product_complete(&b, 1, t).unwrap().amplitude;
        prop_assert!((s2 - s1 * scale * scale).norm() <= 1e-13 * s2.norm());
    }
}
