use std::f64::consts::PI;

use num_complex::Complex;
use proptest::prelude::*;

use super::normal_form::{flatten, pick_grid};
use super::*;
use crate::grid::Grid;

type C64 = Complex<f64>;

fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

fn konst(v: f64) -> PeriodicFn<f64> {
    PeriodicFn::constant(v)
}

fn mono(n: i64, coef: C64) -> PeriodicFn<f64> {
    PeriodicFn::from_terms(&[(n, coef)], false)
}

fn close(a: &PeriodicFn<f64>, b: &PeriodicFn<f64>, tol: f64) -> bool {
    let d = a.sub(b);
    d.coeffs().iter().all(|z| z.norm() <= tol)
}

fn abs_xi() -> HomogComponent<f64> {
    HomogComponent::even(1.0, konst(1.0))
}

fn sym(m: f64, comps: Vec<HomogComponent<f64>>) -> GradedSymbol<f64> {
    GradedSymbol::new(m, comps).unwrap()
}

#[test]
fn xi_derivative_examples() {
    let d = xi_derivative(&abs_xi());
    assert_eq!(d.order, 0.0);
    assert!(close(&d.plus, &konst(1.0), 0.0));
    assert!(close(&d.minus, &konst(-1.0), 0.0));

    let d = xi_derivative(&HomogComponent::even(0.0, konst(3.0)));
    assert_eq!(d.order, -1.0);
    assert!(d.is_zero());

    let cosx = PeriodicFn::trig(0.0, &[1.0], &[]);
    let d = xi_derivative(&HomogComponent::new(2.0, cosx.clone(), cosx.clone()));
    assert!(close(&d.plus, &cosx.scale(2.0), 1e-15));
}

#[test]
fn compose_constant_symbols_multiply() {
    let a = sym(1.0, vec![abs_xi(), HomogComponent::zero(0.0), HomogComponent::zero(-1.0)]);
    let r = compose(&a, &a, 3).unwrap();
    assert_eq!(r.m, 2.0);
    assert!(close(&r.components[0].plus, &konst(1.0), 1e-14));
    assert!(r.components[1..].iter().all(|c| close(&c.plus, &konst(0.0), 1e-14)));
}

#[test]
fn compose_sign_times_abs() {
    let f = PeriodicFn::trig(0.5, &[1.0], &[0.25]);
    let a = sym(0.0, vec![HomogComponent::odd(0.0, f.clone()), HomogComponent::zero(-1.0)]);
    let b = sym(1.0, vec![abs_xi(), HomogComponent::zero(0.0)]);
    let r = compose(&a, &b, 2).unwrap();
    // f sgn ξ |ξ| = f ξ
    assert!(close(&r.components[0].plus, &f, 1e-14));
    assert!(close(&r.components[0].minus, &f.neg(), 1e-14));
    assert!(r.components[1].plus.is_constant(1e-14) && r.components[1].plus.mean().norm() < 1e-14);
}

#[test]
fn compose_trig_monomial_by_hand() {
    // |ξ| # e^{ix}|ξ| = e^{ix}ξ² + (−i)(sgn ξ)(i e^{ix})|ξ| = e^{ix}ξ² + e^{ix}ξ
    let a = sym(1.0, vec![abs_xi(), HomogComponent::zero(0.0), HomogComponent::zero(-1.0)]);
    let e = mono(1, c(1.0, 0.0));
    let b = sym(1.0, vec![HomogComponent::even(1.0, e.clone()), HomogComponent::zero(0.0), HomogComponent::zero(-1.0)]);
    let r = compose(&a, &b, 3).unwrap();
    assert!(close(&r.components[0].plus, &e, 1e-14));
    assert!(close(&r.components[0].minus, &e, 1e-14));
    assert!(close(&r.components[1].plus, &e, 1e-14));
    assert!(close(&r.components[1].minus, &e.neg(), 1e-14));
    assert!(r.components[2].is_zero() || close(&r.components[2].plus, &konst(0.0), 1e-14));
}

#[test]
fn compose_reports_missing_depth() {
    let a = sym(1.0, vec![abs_xi()]);
    match compose(&a, &a, 3) {
        Err(Error::TruncationDepth { have, need, .. }) => assert_eq!((have, need), (1, 3)),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn adjoint_examples() {
    let a = sym(1.0, vec![HomogComponent::new(1.0, konst(2.0), konst(3.0)), HomogComponent::odd(0.0, konst(0.4))]);
    let r = adjoint(&a, 2).unwrap();
    assert!(r.max_diff_per_order(&a).iter().all(|d| *d < 1e-15));

    let f = PeriodicFn::trig(0.2, &[1.0], &[]);
    let a = sym(0.0, vec![HomogComponent::odd(0.0, f.scale_complex(c(0.0, 1.0))), HomogComponent::zero(-1.0)]);
    let r = adjoint(&a, 2).unwrap();
    assert!(close(&r.components[0].plus, &f.scale_complex(c(0.0, -1.0)), 1e-15));

    // e^{ix}|ξ|: ā = e^{−ix}|ξ|, (−i) ∂ξ∂x ā = (−i)(sgn ξ)(−i e^{−ix}) = −sgn ξ e^{−ix}
    let a = sym(1.0, vec![HomogComponent::even(1.0, mono(1, c(1.0, 0.0))), HomogComponent::zero(0.0), HomogComponent::zero(-1.0)]);
    let r = adjoint(&a, 3).unwrap();
    let em = mono(-1, c(1.0, 0.0));
    assert!(close(&r.components[0].plus, &em, 1e-14));
    assert!(close(&r.components[1].plus, &em.neg(), 1e-14));
    assert!(close(&r.components[1].minus, &em, 1e-14));
    assert!(close(&r.components[2].plus, &konst(0.0), 1e-14));
}

#[test]
fn parametrix_examples() {
    let a = sym(0.0, vec![HomogComponent::even(0.0, konst(2.0)), HomogComponent::zero(-1.0)]);
    let r = parametrix(&a, 2).unwrap();
    assert!(close(&r.components[0].plus, &konst(0.5), 1e-15));

    let cst = 0.7;
    let a = sym(1.0, vec![abs_xi(), HomogComponent::even(0.0, konst(cst)), HomogComponent::zero(-1.0), HomogComponent::zero(-2.0)]);
    let r = parametrix(&a, 4).unwrap();
    // Neumann series of (|ξ| + c)^{-1}
    for (k, comp) in r.components.iter().enumerate() {
        let want = (-cst).powi(k as i32);
        assert!(close(&comp.plus, &konst(want), 1e-13), "order {k}");
        assert!(close(&comp.minus, &konst(want), 1e-13), "order {k}");
    }

    let vanishing = PeriodicFn::trig(1.0, &[1.0], &[]);
    let a = sym(1.0, vec![HomogComponent::even(1.0, vanishing), HomogComponent::zero(0.0)]);
    assert!(matches!(parametrix(&a, 2), Err(Error::NotElliptic(_))));
}

#[test]
fn parametrix_is_left_inverse_for_variable_symbols() {
    let g = PeriodicFn::trig(1.5, &[0.3, 0.1], &[0.2]);
    let h = PeriodicFn::trig(0.1, &[0.0], &[0.5]);
    let a = sym(1.0, vec![HomogComponent::even(1.0, g), HomogComponent::odd(0.0, h), HomogComponent::zero(-1.0), HomogComponent::zero(-2.0)]);
    let r = parametrix(&a, 4).unwrap();
    let id = compose(&r, &a, 4).unwrap();
    assert!(close(&id.components[0].plus, &konst(1.0), 1e-10));
    for comp in &id.components[1..] {
        assert!(close(&comp.plus, &konst(0.0), 1e-10));
        assert!(close(&comp.minus, &konst(0.0), 1e-10));
    }
}

fn arb_fn(deg: usize) -> impl Strategy<Value = PeriodicFn<f64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2 * deg + 1).prop_map(move |v| {
        let terms: Vec<(i64, C64)> =
            v.iter().enumerate().map(|(i, (re, im))| (i as i64 - deg as i64, c(*re, *im))).collect();
        PeriodicFn::from_terms(&terms, false)
    })
}

fn arb_symbol(m: f64, depth: usize) -> impl Strategy<Value = GradedSymbol<f64>> {
    prop::collection::vec((arb_fn(2), arb_fn(2)), depth).prop_map(move |v| {
        let comps = v
            .into_iter()
            .enumerate()
            .map(|(j, (p, q))| HomogComponent::new(m - j as f64, p, q))
            .collect();
        GradedSymbol::new(m, comps).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn compose_is_associative(a in arb_symbol(1.0, 4), b in arb_symbol(0.5, 4), c in arb_symbol(-1.0, 4)) {
        let left = compose(&compose(&a, &b, 4).unwrap(), &c, 4).unwrap();
        let right = compose(&a, &compose(&b, &c, 4).unwrap(), 4).unwrap();
        for d in left.max_diff_per_order(&right) {
            prop_assert!(d < 1e-9, "{d}");
        }
    }

    #[test]
    fn adjoint_is_involution(a in arb_symbol(1.0, 5)) {
        let back = adjoint(&adjoint(&a, 5).unwrap(), 5).unwrap();
        for d in back.max_diff_per_order(&a) {
            prop_assert!(d < 1e-9, "{d}");
        }
    }

    #[test]
    fn symbol_json_round_trip(a in arb_symbol(2.0, 3)) {
        let back = GradedSymbol::<f64>::from_json_str(&a.to_json_string()).unwrap();
        prop_assert_eq!(back.components, a.components);
    }
}

#[test]
fn step1_examples() {
    let s = nf_step1(&abs_xi(), 1.0).unwrap();
    assert!((s.b0.0 - 1.0).abs() < 1e-14 && (s.b0.1 - 1.0).abs() < 1e-14);
    let n = s.phi.len() - 1;
    for (j, p) in s.phi.iter().enumerate() {
        assert!((p - 2.0 * PI * j as f64 / n as f64).abs() < 1e-13);
    }

    let s = nf_step1(&HomogComponent::even(1.0, konst(2.0)), 1.0).unwrap();
    assert!((s.b0.0 - 2.0).abs() < 1e-14 && (s.b0.1 - 2.0).abs() < 1e-14);

    // √g¹¹|ξ| with √g₁₁ = 1 + ½cos x: length 2π, φ(x) = x + ½ sin x
    let inv = PeriodicFn::<f64>::trig(1.0, &[0.5], &[]).map_real(4096, |v| 1.0 / v);
    let s = nf_step1(&HomogComponent::even(1.0, inv), 1.0).unwrap();
    assert!((s.b0.0 - 1.0).abs() < 1e-12 && (s.b0.1 - 1.0).abs() < 1e-12);
    let n = s.phi.len() - 1;
    for (j, p) in s.phi.iter().enumerate() {
        let x = 2.0 * PI * j as f64 / n as f64;
        assert!((p - x - 0.5 * x.sin()).abs() < 1e-10, "{j}");
    }
    assert!(s.phi.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn step1_rejects_asymmetric_principal_symbol() {
    let a0 = HomogComponent::new(1.0, konst(1.0), konst(2.0));
    assert!(matches!(nf_step1(&a0, 1.0), Err(Error::Precondition(_))));
    let odd = HomogComponent::odd(1.0, konst(1.0));
    let s = nf_step1(&odd, 1.0).unwrap();
    assert_eq!(s.b0, (1.0, -1.0));
}

#[test]
fn step2_examples() {
    let a = sym(1.0, vec![abs_xi(), HomogComponent::odd(0.0, konst(0.3))]);
    let (k1, b1) = nf_step2(&a, 0).unwrap();
    assert!((b1.0 - 0.3).abs() < 1e-14 && (b1.1 + 0.3).abs() < 1e-14);
    assert!(close(&k1.plus, &konst(1.0), 1e-13));

    let (_, b1) = nf_step2(&a, 1).unwrap();
    assert!((b1.0 - 1.3).abs() < 1e-14);

    // exponent i∫(−cos) = −i sin x on both branches
    let a = sym(1.0, vec![abs_xi(), HomogComponent::odd(0.0, PeriodicFn::trig(0.3, &[1.0], &[]))]);
    let (k1, b1) = nf_step2(&a, 0).unwrap();
    assert!((b1.0 - 0.3).abs() < 1e-14 && (b1.1 + 0.3).abs() < 1e-14);
    for x in [0.0, 0.4, 1.7, 3.0, 5.5] {
        let want = c(0.0, -f64::sin(x)).exp();
        assert!((k1.plus.eval(x) - want).norm() < 1e-12);
        assert!((k1.minus.eval(x) - want).norm() < 1e-12);
        assert!((k1.plus.eval(x).norm() - 1.0).abs() < 1e-12);
    }
    assert!(!k1.plus.is_constant(1e-3));

    let bent = sym(1.0, vec![HomogComponent::even(1.0, PeriodicFn::trig(1.0, &[0.2], &[])), HomogComponent::zero(0.0)]);
    assert!(matches!(nf_step2(&bent, 0), Err(Error::Precondition(_))));
}

#[test]
fn normal_form_of_abs_xi() {
    let a = sym(1.0, vec![abs_xi()]).padded(5).with_self_adjoint(true);
    let mut a = a;
    a.known = 5;
    let r = normal_form(&a, 5, None).unwrap();
    assert!((r.b[0].0 - 1.0).abs() < 1e-14);
    assert!(r.b[1..].iter().all(|(p, m)| p.abs() < 1e-14 && m.abs() < 1e-14));
    assert_eq!(r.p, 0);
}

#[test]
fn normal_form_requires_flag_and_depth() {
    let a = sym(1.0, vec![abs_xi()]);
    assert!(matches!(normal_form(&a, 1, None), Err(Error::Precondition(_))));
    let a = a.with_self_adjoint(true);
    assert!(matches!(normal_form(&a, 3, None), Err(Error::TruncationDepth { .. })));
}

#[test]
fn normal_form_rejects_non_self_adjoint_input() {
    let a = sym(1.0, vec![abs_xi(), HomogComponent::odd(0.0, PeriodicFn::trig(0.3, &[1.0], &[]).scale_complex(c(0.0, 1.0)))])
        .with_self_adjoint(true);
    assert!(matches!(normal_form(&a, 2, None), Err(Error::SelfAdjointness(_))));
}

/// ½(a + a*), declared self-adjoint with every order known
fn symmetrized(a: &GradedSymbol<f64>) -> GradedSymbol<f64> {
    let k = a.depth();
    let adj = adjoint(a, k).unwrap();
    let comps = a
        .components
        .iter()
        .zip(&adj.components)
        .map(|(x, y)| HomogComponent::new(x.order, x.plus.add(&y.plus).scale(0.5), x.minus.add(&y.minus).scale(0.5)))
        .collect();
    GradedSymbol::new(a.m, comps).unwrap().with_self_adjoint(true)
}

#[test]
fn engine_matches_mean_formula_for_flat_principal_part() {
    for (m, lead) in [(1.0, 1.3), (2.0, 0.8), (-1.0, 2.0)] {
        let a1 = PeriodicFn::trig(0.35, &[0.4, 0.1], &[0.2]);
        let a2p = PeriodicFn::trig(0.1, &[0.3], &[-0.25, 0.1]);
        let a2m = PeriodicFn::trig(-0.2, &[0.1, 0.2], &[0.05]);
        let raw = sym(
            m,
            vec![
                HomogComponent::even(m, konst(lead)),
                HomogComponent::odd(m - 1.0, a1),
                HomogComponent::new(m - 2.0, a2p, a2m),
                HomogComponent::zero(m - 3.0),
            ],
        );
        let a = symmetrized(&raw);
        let r = normal_form(&a, 3, None).unwrap();
        let want = b2_closed_form(&a.components[0], &a.components[1], &a.components[2], r.b[1], m).unwrap();
        assert!((r.b[2].0 - want.0).abs() < 1e-9, "m={m}: {:?} vs {:?}", r.b[2], want);
        assert!((r.b[2].1 - want.1).abs() < 1e-9, "m={m}: {:?} vs {:?}", r.b[2], want);
        // winding shift moves b1 by m·b0 and leaves b0 alone
        let r2 = normal_form(&a, 2, Some(r.p + 1)).unwrap();
        assert!((r2.b[0].0 - r.b[0].0).abs() < 1e-12);
        assert!((r2.b[1].0 - r.b[1].0 - m * r.b[0].0).abs() < 1e-10);
        assert!((r2.b[1].1 - r.b[1].1 + m * r.b[0].1).abs() < 1e-10);
    }
}

#[test]
fn b2_formula_constant_data() {
    let a0 = abs_xi();
    let a1 = HomogComponent::odd(0.0, konst(0.3));
    let a2 = HomogComponent::even(-1.0, konst(0.45));
    let b = b2_closed_form(&a0, &a1, &a2, (0.3, -0.3), 1.0).unwrap();
    assert!((b.0 - 0.45).abs() < 1e-13 && (b.1 - 0.45).abs() < 1e-13, "{b:?}");
}

fn wobbly_symbol() -> GradedSymbol<f64> {
    let g = PeriodicFn::trig(1.2, &[0.3, -0.1], &[0.15, 0.05]);
    let h = PeriodicFn::trig(0.2, &[0.1], &[0.3]);
    let a2 = PeriodicFn::trig(0.1, &[0.2], &[0.1]);
    let raw = sym(
        1.0,
        vec![
            HomogComponent::even(1.0, g),
            HomogComponent::odd(0.0, h),
            HomogComponent::new(-1.0, a2.clone(), a2.scale(0.5)),
            HomogComponent::zero(-2.0),
        ],
    );
    symmetrized(&raw)
}

#[test]
fn transported_first_order_matches_general_pushforward() {
    let a = wobbly_symbol();
    let e1 = transported_e1(&a, 512).unwrap();
    let g: Grid<f64> = pick_grid(&a, 512);
    let flat = flatten(&g, &a.to_grid(&g), 3).unwrap();
    for br in [0, 1] {
        let d = e1[br].iter().zip(&flat.sym.comps[1][br]).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
        assert!(d < 1e-10, "branch {br}: {d}");
        // real after flattening, as required for a self-adjoint principal part
        assert!(e1[br].iter().all(|z| z.im.abs() < 1e-10));
    }
}

#[test]
fn flattened_symbol_stays_self_adjoint() {
    let a = wobbly_symbol();
    let g: Grid<f64> = pick_grid(&a, 512);
    let flat = flatten(&g, &a.to_grid(&g), 4).unwrap();
    let s = GradedSymbol::from_grid(&g, &flat.sym, false);
    let defect = self_adjoint_defect(&s, 3).unwrap();
    assert!(defect.iter().all(|d| *d < 1e-9), "{defect:?}");
}

#[test]
fn normal_form_results_are_real_and_grid_independent() {
    let a = wobbly_symbol();
    let coarse = normal_form_with(&a, &NormalFormConfig { depth: 4, grid: 256, p: None }).unwrap();
    let fine = normal_form_with(&a, &NormalFormConfig { depth: 4, grid: 2048, p: None }).unwrap();
    for k in 0..4 {
        assert!((coarse.b[k].0 - fine.b[k].0).abs() < 1e-9, "{k}");
        assert!((coarse.b[k].1 - fine.b[k].1).abs() < 1e-9, "{k}");
    }
    for (ip, im) in &fine.b_imag {
        assert!(ip.abs() < 1e-9 && im.abs() < 1e-9);
    }
    // |k1| = 1 on the grid
    for x in (0..64).map(|j| j as f64 * 2.0 * PI / 64.0) {
        assert!((fine.k1.plus.eval(x).norm() - 1.0).abs() < 1e-10);
    }
    assert!(fine.phi[0].abs() < 1e-12 && (fine.phi.last().unwrap() - 2.0 * PI).abs() < 1e-12);
    assert!(fine.phi.windows(2).all(|w| w[1] > w[0]));
}
