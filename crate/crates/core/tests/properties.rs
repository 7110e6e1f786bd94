use std::collections::BTreeMap;

use fuchsian_core::certificate::{build_h, phi_family, theta_normal_form};
use fuchsian_core::characteristics::{check_lemma8, integrate, PathOptions};
use fuchsian_core::equation::{char_exponents, FuchsianEquation};
use fuchsian_core::majorant::{norm_x, RhoPolynomial, SectorMajorant};
use fuchsian_core::num::{c_rat, rat, rational_to_f64, Coeff};
use fuchsian_core::sampling::{random_candidate, random_equation, random_target};
use fuchsian_core::series::{Lambda, MultiIndex, SeriesTX, SeriesTXZ, TxzKey, ZIndex, ZPowers};
use fuchsian_core::solver::{manufactured, residual, solve_formal, SolveOptions};
use num_traits::Signed;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn coeff() -> impl Strategy<Value = Coeff> {
    (-5i64..=5, 1i64..=4, -5i64..=5, 1i64..=4).prop_map(|(a, b, c, d)| c_rat(rat(a, b), rat(c, d)))
}

/// Rational multiples of units with rational modulus, so that `|c|` and
/// all moduli of products are exact and the norm's upper enclosure is tight.
fn exact_modulus_coeff() -> impl Strategy<Value = Coeff> {
    const UNITS: [(i64, i64, i64); 6] = [(1, 0, 1), (0, 1, 1), (3, 4, 5), (-4, 3, 5), (5, 12, 13), (8, -15, 17)];
    (-5i64..=5, 1i64..=4, 0..UNITS.len()).prop_map(|(a, b, u)| {
        let (re, im, d) = UNITS[u];
        c_rat(rat(a * re, b * d), rat(a * im, b * d))
    })
}

fn exact_series(n: usize, cap_t: u32, cap_x: u32) -> impl Strategy<Value = SeriesTX> {
    let key = (0..=cap_t, proptest::collection::vec(0..=3u32, n));
    // one coefficient per key: a sum of two such coefficients can have an irrational modulus
    proptest::collection::btree_map(key, exact_modulus_coeff(), 0..6).prop_map(move |terms| {
        SeriesTX::from_terms(n, cap_t, cap_x, terms.into_iter().map(|((k, a), c)| ((k, MultiIndex::new(a)), c)))
    })
}

fn series(n: usize, cap_t: u32, cap_x: u32) -> impl Strategy<Value = SeriesTX> {
    let key = (0..=cap_t, proptest::collection::vec(0..=3u32, n));
    proptest::collection::vec((key, coeff()), 0..6).prop_map(move |terms| {
        SeriesTX::from_terms(n, cap_t, cap_x, terms.into_iter().map(|((k, a), c)| ((k, MultiIndex::new(a)), c)))
    })
}

fn flat_series(n: usize, cap_t: u32, cap_x: u32) -> impl Strategy<Value = SeriesTX> {
    series(n, cap_t, cap_x).prop_map(move |s| {
        SeriesTX::from_terms(n, cap_t, cap_x, s.terms().filter(|((k, _), _)| *k > 0).map(|(k, c)| (k.clone(), c.clone())))
    })
}

fn txz(lambda: Lambda, caps: (u32, u32, u32)) -> impl Strategy<Value = SeriesTXZ> {
    let len = lambda.len();
    let n = lambda.n();
    let key = (0..=caps.0, proptest::collection::vec(0..=2u32, n), proptest::collection::vec(0..=1u32, len));
    proptest::collection::vec((key, coeff()), 0..5).prop_map(move |terms| {
        SeriesTXZ::from_terms(
            lambda.clone(),
            caps.0,
            caps.1,
            caps.2,
            terms.into_iter().map(|((k, a, nu), c)| (TxzKey::new(k, MultiIndex::new(a), ZPowers::from_vec(nu)), c)),
        )
    })
}

fn majorant() -> impl Strategy<Value = SectorMajorant> {
    let poly = proptest::collection::vec((0i64..=6, 1i64..=4), 1..4)
        .prop_map(|cs| RhoPolynomial::from_coeffs(cs.into_iter().map(|(a, b)| rat(a, b)).collect()));
    proptest::collection::vec((0u32..5, poly), 0..4).prop_map(SectorMajorant::from_terms)
}

fn nonneg(m: &SectorMajorant) -> bool {
    m.terms().all(|(_, p)| p.coeffs().iter().all(|c| !c.is_negative()))
}

/// Adaptive Simpson on `[a, b]`.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), eps, 40)
}

/// `∫₀ᵗ (τ/t)^a g(τ) dτ/τ` with `τ = t e^{−s}`.
fn weighted_integral(g: &dyn Fn(f64) -> f64, t: f64, a: f64) -> f64 {
    let f = |s: f64| (-a * s).exp() * g(t * (-s).exp());
    let end = 60.0 / a.min(1.0);
    let coarse = (0..2000).map(|i| f(end * (i as f64 + 0.5) / 2000.0)).sum::<f64>() * end / 2000.0;
    simpson(&f, 0.0, end, 1e-13 * coarse.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in series(2, 3, 4), b in series(2, 3, 4), c in series(2, 3, 4)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn leibniz(f in series(2, 3, 5), g in series(2, 3, 5), axis in 0usize..2) {
        let lhs = (&f * &g).dx(axis).unwrap();
        let cx = lhs.cap_x();
        let rhs = &(&f.dx(axis).unwrap() * &g.truncate(3, cx)) + &(&f.truncate(3, cx) * &g.dx(axis).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn euler_is_a_derivation(f in series(1, 4, 4), g in series(1, 4, 4)) {
        prop_assert_eq!((&f * &g).euler_t(), &(&f.euler_t() * &g) + &(&f * &g.euler_t()));
    }

    #[test]
    fn substitution_is_multiplicative(
        f in txz(Lambda::new(2, 1), (3, 4, 4)),
        g in txz(Lambda::new(2, 1), (3, 4, 4)),
        vals in proptest::collection::vec(flat_series(1, 3, 6), 5),
    ) {
        let lambda = Lambda::new(2, 1);
        let vals: BTreeMap<ZIndex, SeriesTX> = lambda.entries().iter().cloned().zip(vals).collect();
        let lhs = (&f * &g).substitute_z(&vals).unwrap();
        let rhs = &f.substitute_z(&vals).unwrap() * &g.substitute_z(&vals).unwrap();
        let (ct, cx) = (lhs.cap_t().min(rhs.cap_t()), lhs.cap_x().min(rhs.cap_x()));
        prop_assert_eq!(lhs.truncate(ct, cx), rhs.truncate(ct, cx));
    }

    #[test]
    fn majorant_operations_stay_nonnegative(f in majorant(), g in majorant(), a in 1i64..8, b in 1i64..5) {
        prop_assert!(nonneg(&f.add(&g)));
        prop_assert!(nonneg(&f.mul(&g)));
        prop_assert!(nonneg(&f.d_rho()));
        prop_assert!(nonneg(&f.integral_transform(&rat(a, b)).unwrap()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn invert_unit_is_exact(p in series(2, 0, 5), c in coeff()) {
        prop_assume!(c != Coeff::new(rat(0, 1), rat(0, 1)));
        let zero = MultiIndex::zero(2);
        let p = &p.truncate(0, 5) + &SeriesTX::constant(2, 0, 5, c - p.coeff(0, &zero) + p.coeff(0, &zero));
        prop_assume!(p.coeff(0, &zero) != Coeff::new(rat(0, 1), rat(0, 1)));
        prop_assert_eq!(&p * &p.invert_unit().unwrap(), SeriesTX::one(2, 0, 5));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn norm_is_submultiplicative(f in exact_series(2, 3, 4), g in exact_series(2, 3, 4)) {
        prop_assert!(norm_x(&(&f * &g)).dominated_by(&norm_x(&f).mul(&norm_x(&g))));
    }

    #[test]
    fn derivative_is_bounded_by_d_rho(f in exact_series(2, 3, 5), axis in 0usize..2) {
        prop_assert!(norm_x(&f.dx(axis).unwrap()).dominated_by(&norm_x(&f).d_rho()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn integral_transform_matches_quadrature(
        k in 0u32..6, j in 0usize..4, c in (1i64..10, 1i64..5), a in (1i64..12, 1i64..5),
        t in 0.01f64..1.0, rho in 0.01f64..2.0,
    ) {
        let (c, a) = (rat(c.0, c.1), rat(a.0, a.1));
        let m = SectorMajorant::monomial(k, j, c.clone());
        let closed = m.integral_transform(&a).unwrap().eval(t, rho);
        let cf = rational_to_f64(&c);
        let g = |tau: f64| cf * tau.powi(k as i32) * rho.powi(j as i32);
        let quad = weighted_integral(&g, t, rational_to_f64(&a));
        prop_assert!((closed - quad).abs() <= 1e-9 * closed.abs(), "{} vs {}", closed, quad);
    }
}

fn seeded_equation(seed: u64, n: usize) -> FuchsianEquation {
    random_equation(&mut ChaCha8Rng::seed_from_u64(seed), n, (8, 18, 8))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn manufactured_round_trip(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let template = random_equation(&mut rng, n, (6, 14, 6));
        let target = random_target(&mut rng, n, 6, 14);
        let eq = manufactured(&template, &target).unwrap();
        let sol = solve_formal(&eq, SolveOptions::order(6)).unwrap();
        prop_assert_eq!(&sol.u0, &target.truncate(6, sol.x_order));
        let r = residual(&eq, &sol.u0, 6).unwrap();
        prop_assert!(r.truncate(6, sol.x_order).is_zero());
    }

    #[test]
    fn solutions_are_consistent_across_orders(seed in any::<u64>()) {
        let eq = seeded_equation(seed, 1);
        let short = solve_formal(&eq, SolveOptions { order: 3, x_order: Some(2), reverse: false }).unwrap();
        let long = solve_formal(&eq, SolveOptions { order: 5, x_order: Some(2), reverse: false }).unwrap();
        let rev = solve_formal(&eq, SolveOptions { order: 5, x_order: Some(2), reverse: true }).unwrap();
        prop_assert_eq!(short.u0, long.u0.truncate(3, 2));
        prop_assert_eq!(rev.u0, long.u0);
    }

    #[test]
    fn normal_form_reconstructs(seed in any::<u64>(), n in 1usize..=2) {
        let eq = seeded_equation(seed, n);
        let cd = char_exponents(&eq);
        let sol = solve_formal(&eq, SolveOptions::order(2)).unwrap();
        let h = build_h(&eq, &sol.u0).unwrap();
        let dec = theta_normal_form(&h, &cd).unwrap();
        prop_assert_eq!(dec.reconstruct(), dec.theta_form.clone());
        let zero = MultiIndex::zero(n);
        prop_assert!(dec.beta0.coeff(0, &zero) == Coeff::new(rat(0, 1), rat(0, 1)));
        prop_assert!(dec.beta1.coeff(0, &zero) == Coeff::new(rat(0, 1), rat(0, 1)));
    }

    #[test]
    fn phi_family_majorizes_candidate_derivatives(seed in any::<u64>()) {
        let eq = seeded_equation(seed, 1);
        let cd = char_exponents(&eq);
        let w = random_candidate(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x5eed), 6, 8);
        // The ‖D w‖ ≪ φ and (t∂t + 2h)φ₀₀ ≪ φ₁₀ post-checks run inside.
        let phis = phi_family(&w, &cd).unwrap();
        prop_assert_eq!(phis.phi01.clone(), phis.phi00.d_rho());
        prop_assert_eq!(phis.phi02.clone(), phis.phi01.d_rho());
        prop_assert_eq!(phis.phi03.clone(), phis.phi02.d_rho());
        prop_assert_eq!(phis.phi11.clone(), phis.phi10.d_rho());
        prop_assert_eq!(phis.phi12.clone(), phis.phi11.d_rho());
    }

    #[test]
    fn paths_are_monotone(c1 in 0.0f64..3.0, c2 in 0.0f64..2.0, kappa in 0.05f64..0.5, xi in 0.01f64..0.3) {
        let b = |t: f64, rho: f64| c1 * t.powf(kappa) + c2 * rho * rho * t;
        let path = integrate(b, |_, _| 0.0, PathOptions::new(0.5, xi, 10.0)).unwrap();
        prop_assert!(path.samples.windows(2).all(|w| w[1].rho >= w[0].rho && w[1].t < w[0].t));
        let rep = check_lemma8(&path, &[c1, 0.0, 0.0, 0.0], kappa, 0.45, 0.0);
        prop_assert_eq!(rep.left_violations, 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    /// For irrational moduli the enclosure is rounded up per coefficient, so
    /// products may exceed the product of enclosures, but only at the
    /// rounding scale.
    #[test]
    fn enclosure_gap_is_at_rounding_scale(f in series(2, 3, 4), g in series(2, 3, 4)) {
        let lhs = norm_x(&(&f * &g));
        let rhs = norm_x(&f).mul(&norm_x(&g));
        for (k, p) in lhs.terms() {
            for (j, c) in p.coeffs().iter().enumerate() {
                let bound = rhs.coeff(*k, j);
                let gap = rational_to_f64(&(c - &bound));
                prop_assert!(gap <= 1e-15 * rational_to_f64(&bound), "gap {} at ({}, {})", gap, k, j);
            }
        }
    }
}

#[test]
fn quadrature_oracle_sanity() {
    // ∫₀ᵗ (τ/t)² · 2τ dτ/τ = 2t/3
    let v = weighted_integral(&|tau| 2.0 * tau, 0.5, 2.0);
    assert!((v - 1.0 / 3.0).abs() < 1e-12);
}
