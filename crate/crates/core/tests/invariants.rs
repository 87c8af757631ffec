use hypmass::geometry::fields::radial_bump;
use hypmass::mass::{mass_vector, FluxOptions};
use hypmass::ode::{integrate_geodesic, GeodesicOptions};
use hypmass::operators::{adjoint_local, duality_residual, static_residual_at, trace_identity, CompactPair};
use hypmass::rigidity::{hessian_rigidity_residual, wang_identity_check};
use hypmass::*;
use proptest::prelude::*;
use rand::SeedableRng;

fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, n).prop_filter("away from the origin", |x| {
        x.iter().map(|v| v * v).sum::<f64>() > 0.25
    })
}

fn metrics() -> Vec<MetricSpec> {
    vec![hyperbolic_metric(3).unwrap(), schwarzschild_ads(3, 0.5).unwrap()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_identity_holds(x in point(3), a in -1.0..1.0f64, b in -1.0..1.0f64, c in 0.5..2.0f64) {
        let u = FnScalar::new(move |y: &[Jet]| (y[0] * a + y[1] * y[2] * b).sin() * c + y[2] * 0.3);
        for g in metrics() {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if g.horizon_radius().is_some_and(|h| r < 1.2 * h) {
                continue;
            }
            let (l, rhs) = trace_identity(&g, &u, &x).unwrap();
            prop_assert!((l - rhs).abs() < 1e-8 * (1.0 + rhs.abs()), "{} {}", l, rhs);
        }
    }

    #[test]
    fn adjoint_trace_combination(x in point(3), a in -1.0..1.0f64, b in -0.5..0.5f64) {
        // tr L*V = (1 - n)ΔV - R V
        let v = FnScalar::new(move |y: &[Jet]| (y[1] * b).exp() + y[0] * y[2] * a);
        let g = schwarzschild_ads(3, 0.5).unwrap();
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(r > 1.2 * g.horizon_radius().unwrap());
        let pack = curvature_at(&g, &x).unwrap();
        let vl = pack.geometry.scalar(&v.jet(&x).unwrap());
        let tr = pack.geometry.trace(&adjoint_local(&pack, &vl));
        let lap = pack.geometry.laplacian(&vl);
        let expect = -2.0 * lap - pack.scalar * vl.value();
        prop_assert!((tr - expect).abs() < 1e-9 * (1.0 + expect.abs()));
    }

    #[test]
    fn hessian_rigidity_matches_static_residual_on_b(x in point(3), a in -1.0..1.0f64) {
        // Ric_b + n b = b, so both residuals are |∇²f - f b|
        let b = hyperbolic_metric(3).unwrap();
        let f = FnScalar::new(move |y: &[Jet]| (y[0] * a).cosh() + y[1] * y[2] * 0.2);
        let h = hessian_rigidity_residual(&b, &f, &x).unwrap();
        let (s, _) = static_residual_at(&b, &f, &x).unwrap();
        prop_assert!((h - s).abs() < 1e-10 * (1.0 + s));
        let v = StaticPotential::lapse(3);
        prop_assert!(hessian_rigidity_residual(&b, &v, &x).unwrap() < 1e-9);
    }

    #[test]
    fn scalar_curvature_of_b(n in 3usize..=5, seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let b = hyperbolic_metric(n).unwrap();
        let x: Vec<f64> = (0..n).map(|_| rand::Rng::random_range(&mut rng, -5.0..5.0)).collect();
        let s = curvature_at(&b, &x).unwrap().scalar;
        let want = -((n * (n - 1)) as f64);
        prop_assert!((s - want).abs() < 1e-8);
    }

    #[test]
    fn geodesic_reversal(x in point(3), d in point(3)) {
        let g = schwarzschild_ads(3, 0.5).unwrap();
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(r > 1.5 * g.horizon_radius().unwrap());
        let opts = GeodesicOptions::default();
        let fwd = match integrate_geodesic(&g, &x, &d, 2.0, &opts) {
            Ok(s) => s,
            // rays that run into the horizon are outside the chart
            Err(_) => return Ok(()),
        };
        let end = fwd.positions.last().unwrap();
        let back: Vec<f64> = fwd.velocities.last().unwrap().iter().map(|v| -v).collect();
        let ret = integrate_geodesic(&g, end, &back, 2.0, &opts).unwrap();
        let p = ret.positions.last().unwrap();
        let err = p.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-6, "{}", err);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn duality_on_random_pairs(seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let pair = CompactPair::random(3, &mut rng);
        let quad = AnnulusQuadrature::new(pair.h.inner, pair.h.outer, 32, SphereQuadrature::new(16, 32).unwrap()).unwrap();
        for g in metrics() {
            let rep = duality_residual(&g, &pair.h, &pair.u, &quad).unwrap();
            prop_assert!(rep.residual < 1e-6, "{:?}", rep);
        }
    }

    #[test]
    fn wang_identity_on_static_combinations(c in prop::collection::vec(-0.5..0.5f64, 3)) {
        let b = hyperbolic_metric(3).unwrap();
        let v = StaticPotential::new(1.0, c).unwrap();
        let rep = wang_identity_check(&b, &v, 1.0, 5.0, 16, SphereQuadrature::new(12, 24).unwrap()).unwrap();
        prop_assert!(rep.gap < 1e-8, "{}", rep.gap);
    }
}

#[test]
fn model_mass_vector_is_zero() {
    for n in 3..=5 {
        let b = hyperbolic_metric(n).unwrap();
        let opts = FluxOptions {
            quadrature: SphereQuadrature::new(8, 16).unwrap(),
            ..FluxOptions::default()
        };
        let m = mass_vector(&b, &[10.0, 30.0, 100.0], &opts).unwrap();
        assert!(m.p.iter().all(|p| *p == 0.0), "{:?}", m.p);
    }
}

#[test]
fn bump_is_compactly_supported() {
    let u = FnScalar::new(|y: &[Jet]| radial_bump(y, 2.0, 3.0, 5));
    for r in [1.0, 1.99, 3.01, 10.0] {
        assert_eq!(u.value(&[r, 0.0, 0.0]).unwrap(), 0.0);
    }
    assert!(u.value(&[2.5, 0.0, 0.0]).unwrap() > 0.0);
}
