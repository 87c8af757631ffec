//! Acceptance suite: one pass/fail line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use hypmass::fit::{linear_fit, log_ladder};
use hypmass::geometry::fields::radial_bump;
use hypmass::mass::{mass_vector, prop27_check, FluxOptions};
use hypmass::ode::{classify_growth, classify_seed, lemma_suite, seed_fan, GeodesicOptions, GrowthBands, GrowthLabel, Seed};
use hypmass::operators::{
    conformal_deform_radial, duality_residual, first_variation_check, random_pairs, static_residual, trace_identity,
    DeformOptions, PotentialField, RadialTarget, DEFAULT_EPSILONS,
};
use hypmass::rigidity::{sectional_ode_check, wang_identity_check, warped_fixture, SinhPotential, WarpBase, WarpedMetric};
use hypmass::{
    curvature_at, hyperbolic_metric, schwarzschild_ads, static_potential_basis, AnnulusQuadrature, FnScalar, Jet,
    Metric, SchwarzschildLapse, SphereQuadrature, StaticPotential,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn c1_model_space() -> Outcome {
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 3..=5 {
        let b = hyperbolic_metric(n).map_err(err)?;
        let opts = FluxOptions {
            quadrature: SphereQuadrature::new(8, 16).map_err(err)?,
            ..FluxOptions::default()
        };
        let mv = mass_vector(&b, &log_ladder(20.0, 400.0, 6), &opts).map_err(err)?;
        if mv.p.iter().any(|p| *p != 0.0) {
            return Err(format!("n = {n}: mass vector {:?} is not exactly zero", mv.p));
        }
        let want = -((n * (n - 1)) as f64);
        for _ in 0..1000 {
            // radii spread over [0, 100]
            let r = rng.random_range(0.0..100.0f64);
            let dir: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
            let x: Vec<f64> = dir.iter().map(|v| v * r / norm).collect();
            let s = curvature_at(&b, &x).map_err(err)?.scalar;
            worst = worst.max((s - want).abs());
        }
    }
    ensure(worst < 1e-8, format!("mass vectors exactly zero; max |R + n(n-1)| = {worst:.3e} over 3000 points"))
}

fn c2_static_residuals() -> Outcome {
    let mut worst = (0.0f64, 0.0f64);
    for n in 3..=5 {
        let b = hyperbolic_metric(n).map_err(err)?;
        for v in static_potential_basis(n) {
            let rep = static_residual(&b, &v, &log_ladder(0.5, 50.0, 6), 5, 1e-12).map_err(err)?;
            worst = (worst.0.max(rep.hessian_max), worst.1.max(rep.laplacian_max));
        }
    }
    ensure(
        worst.0 < 1e-8 && worst.1 < 1e-8,
        format!("max |∇²V - V b| = {:.3e}, max |ΔV - nV| = {:.3e}", worst.0, worst.1),
    )
}

fn c3_mass_consistency() -> Outcome {
    let radii = log_ladder(20.0, 400.0, 8);
    let opts = FluxOptions {
        quadrature: SphereQuadrature::new(24, 48).map_err(err)?,
        ..FluxOptions::default()
    };
    let masses = [0.25, 0.5, 1.0];
    let mut p0 = Vec::new();
    let mut spatial = 0.0f64;
    let mut gap = 0.0f64;
    for &m in &masses {
        let g = schwarzschild_ads(3, m).map_err(err)?;
        let mv = mass_vector(&g, &radii, &opts).map_err(err)?;
        p0.push(mv.p[0]);
        spatial = spatial.max(mv.p[1..].iter().fold(0.0f64, |a, v| a.max(v.abs())));
        let rep = prop27_check(&g, &StaticPotential::lapse(3), &radii, &opts, 0.01, 0.0).map_err(err)?;
        if !rep.pass {
            return Err(format!("m = {m}: Ricci flux {} against {}", rep.lhs, rep.rhs));
        }
        gap = gap.max(rep.relative_gap);
    }
    // I(r) = 16πm r(1+r²)/(r³+r-2m) tends to 16πm
    let (slope, intercept, rms) = linear_fit(&masses, &p0);
    let oracle = 16.0 * PI;
    let rel = (slope - oracle).abs() / oracle;
    ensure(
        rel < 0.01 && spatial < 1e-4 && intercept.abs() < 0.01 * oracle && rms < 1e-3 * oracle,
        format!(
            "slope {slope:.8} vs 16π (rel {rel:.2e}), intercept {intercept:.2e}, max |p_i| = {spatial:.2e}, Ricci-flux gap {gap:.2e}"
        ),
    )
}

fn c4_duality() -> Outcome {
    let sphere = SphereQuadrature::new(16, 32).map_err(err)?;
    let mut worst = 0.0f64;
    for g in [hyperbolic_metric(3).map_err(err)?, schwarzschild_ads(3, 0.5).map_err(err)?] {
        for pair in random_pairs(3, 50, 2024) {
            let quad = AnnulusQuadrature::new(pair.h.inner, pair.h.outer, 32, sphere).map_err(err)?;
            let rep = duality_residual(&g, &pair.h, &pair.u, &quad).map_err(err)?;
            worst = worst.max(rep.residual);
        }
    }
    ensure(worst < 1e-6, format!("max relative duality residual {worst:.3e} over 2 x 50 pairs"))
}

fn c5_trace_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for g in [hyperbolic_metric(3).map_err(err)?, schwarzschild_ads(3, 0.5).map_err(err)?] {
        for _ in 0..200 {
            let (a, b, c): (f64, f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let u = FnScalar::new(move |y: &[Jet]| {
                radial_bump(y, 1.5, 4.5, 6) * ((y[0] * a + y[1] * b).sin() + y[2] * c)
            });
            let r = rng.random_range(1.5..4.5);
            let d: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let nd = d.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
            let x: Vec<f64> = d.iter().map(|v| v * r / nd).collect();
            let (l, rhs) = trace_identity(&g, &u, &x).map_err(err)?;
            worst = worst.max((l - rhs).abs());
        }
    }
    ensure(worst < 1e-8, format!("max |L(ug) - (1-n)(Δu + Ru/(n-1))| = {worst:.3e} at 400 points"))
}

fn c6_ode_lemmas() -> Outcome {
    let rep = lemma_suite(200, 6, 20.0).map_err(err)?;
    let finite = rep.cases.iter().all(|c| c.certificate.is_finite() && c.certificate_half.is_finite());
    let ok = rep.max_sign_changes <= 1
        && rep.comparison_failures == 0
        && rep.decaying_failures == 0
        && rep.wronskian_failures == 0
        && finite
        && rep.certificate_ratio.0 >= 0.5
        && rep.certificate_ratio.1 <= 2.0
        && rep.worst_exponent_error < 0.1
        && rep.resonant_cases > 0
        && rep.worst_resonant_residual < 0.05;
    ensure(
        ok,
        format!(
            "200 cases: sign changes <= {}, comparison failures {}, decaying failures {}, Wronskian failures {}, C(20)/C(10) in [{:.3}, {:.3}], exponent error {:.3e}, t e^-t residual {:.3e} ({} resonant)",
            rep.max_sign_changes,
            rep.comparison_failures,
            rep.decaying_failures,
            rep.wronskian_failures,
            rep.certificate_ratio.0,
            rep.certificate_ratio.1,
            rep.worst_exponent_error,
            rep.worst_resonant_residual,
            rep.resonant_cases
        ),
    )
}

fn c7_dichotomy() -> Outcome {
    let b = hyperbolic_metric(3).map_err(err)?;
    let seeds = seed_fan(3, 64, 1.0);
    let bands = GrowthBands::default();
    let opts = GeodesicOptions::default();
    let mut counts = Vec::new();
    for v in static_potential_basis(3) {
        let labels = classify_growth(&b, &v, &seeds, 10.0, &bands, &opts).map_err(err)?;
        counts.push(labels.iter().filter(|c| c.label == GrowthLabel::LinearGrowth).count());
    }
    let axis = Seed {
        point: vec![1.0, 0.0, 0.0],
        direction: vec![1.0, 0.0, 0.0],
    };
    let v = StaticPotential::new(1.0, vec![-1.0, 0.0, 0.0]).map_err(err)?;
    let label = classify_seed(&b, &v, &axis, 10.0, &bands, &opts).map_err(err)?.label;
    let decays = matches!(label, GrowthLabel::Decay { .. });
    ensure(
        counts.iter().all(|c| *c >= 1) && decays,
        format!("linear-growth seeds per V_k {counts:?} of 64; √(1+r²) - x_1 on +x_1: {label:?}"),
    )
}

fn c8_rigidity() -> Outcome {
    let sphere = SphereQuadrature::new(16, 32).map_err(err)?;
    let b = hyperbolic_metric(3).map_err(err)?;
    let mut gap = 0.0f64;
    for r in [5.0, 10.0, 20.0] {
        for v in [StaticPotential::lapse(3), StaticPotential::new(1.0, vec![0.5, 0.0, 0.0]).map_err(err)?] {
            gap = gap.max(wang_identity_check(&b, &v, 0.0, r, 32, sphere).map_err(err)?.gap);
        }
    }
    let m = 0.5;
    let g = schwarzschild_ads(3, m).map_err(err)?;
    let inner = 1.5 * g.horizon_radius().unwrap();
    let sads = wang_identity_check(&g, &SchwarzschildLapse { n: 3, m }, inner, 6.0, 48, sphere).map_err(err)?;
    gap = gap.max(sads.gap);

    let w = WarpedMetric::new(3, WarpBase::RoundSphere).map_err(err)?;
    let pts = vec![vec![0.3, 0.2, -0.5], vec![-1.7, 1.5, 0.4], vec![2.6, -0.8, 0.1], vec![-0.4, -0.3, 1.2]];
    let fixture = warped_fixture(&w, &[0.4, -0.3], &pts).map_err(err)?;
    let frame = vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
    let opts = GeodesicOptions {
        sample_step: 0.025,
        ..GeodesicOptions::default()
    };
    let sect = sectional_ode_check(&w, &SinhPotential, &[0.0, 0.3, -0.2], &frame, 3.0, 3.0, &opts).map_err(err)?;
    // 1 - 2/(e^{2t} + 1) = tanh t
    let rho_err = sect
        .t
        .iter()
        .zip(&sect.rho)
        .fold(0.0f64, |a, (t, r)| a.max((r - (1.0 - 2.0 / ((2.0 * t).exp() + 1.0))).abs()));
    let ok = gap < 1e-8
        && fixture.hessian_residual < 1e-8
        && sect.rho_residual < 1e-5
        && sect.k_residual < 1e-5
        && rho_err < 1e-6;
    ensure(
        ok,
        format!(
            "Wang gap {gap:.2e} (SAdS lhs {:.6e}), warped |∇²f - fg| {:.2e}, ρ' residual {:.2e}, K' residual {:.2e}, |ρ - tanh t| {rho_err:.2e}",
            sads.lhs, fixture.hessian_residual, sect.rho_residual, sect.k_residual
        ),
    )
}

fn c9_first_variation() -> Outcome {
    let sphere = SphereQuadrature::new(12, 24).map_err(err)?;
    let h = random_pairs(3, 1, 11)[0].h.clone().weighted(0.1);
    let mut lines = Vec::new();
    let mut ok = true;
    for (label, g) in [("b", hyperbolic_metric(3).map_err(err)?), ("SAdS", schwarzschild_ads(3, 0.5).map_err(err)?)] {
        for (vl, v) in [("V0", StaticPotential::lapse(3)), ("x1", StaticPotential::coordinate(3, 0))] {
            let f = PotentialField::from_static(v);
            let rep = first_variation_check(&g, &f, &h, &DEFAULT_EPSILONS, 16, sphere).map_err(err)?;
            match rep.order {
                Some(o) => {
                    ok &= o >= 0.9;
                    lines.push(format!("{label}/{vl} order {o:.3}"));
                }
                // every quotient equals the derivative to rounding
                None => lines.push(format!("{label}/{vl} exact")),
            }
        }
    }
    ensure(ok, lines.join(", "))
}

fn c10_deform() -> Outcome {
    let b = hyperbolic_metric(3).map_err(err)?;
    let target = RadialTarget {
        amplitude: 0.05,
        decay: 2.0,
    };
    let rep = conformal_deform_radial(&b, &target, &DeformOptions::default()).map_err(err)?;
    let contractions: Vec<f64> = rep.newton.iter().map(|s| s.contraction).collect();
    let ok = rep.linear_residual < 1e-6 && contractions.len() == 3 && contractions.iter().all(|c| *c >= 10.0);
    ensure(
        ok,
        format!("linear residual {:.2e}, Newton contractions {:?}", rep.linear_residual, contractions),
    )
}

fn run_bin(config: &Path, out: &Path) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_hypmass"))
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(err)?;
    if !status.status.success() {
        return Err(format!("{}: exit {:?}", config.display(), status.status.code()));
    }
    std::fs::read(out.join("report.json")).map_err(err)
}

fn c11_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let configs = [
        r#"{"command":"mass","metric":{"family":"schwarzschild_ads","n":3,"params":{"m":0.5}}}"#,
        r#"{"command":"duality-check","metric":{"family":"schwarzschild_ads","n":3,"params":{"m":0.5}},"params":{"pairs":4},"numeric":{"seed":7}}"#,
        r#"{"command":"ode-verify","params":{"random_cases":8},"numeric":{"seed":3}}"#,
        r#"{"command":"rigidity-check","metric":{"family":"hyperbolic","n":3}}"#,
    ];
    let mut names = Vec::new();
    for (k, text) in configs.iter().enumerate() {
        let path = dir.path().join(format!("c{k}.json"));
        std::fs::write(&path, text).map_err(err)?;
        let a = run_bin(&path, &dir.path().join(format!("a{k}")))?;
        let b = run_bin(&path, &dir.path().join(format!("b{k}")))?;
        if a != b {
            return Err(format!("config {k} produced differing reports"));
        }
        let v: serde_json::Value = serde_json::from_slice(&a).map_err(err)?;
        names.push(v["command"].as_str().unwrap_or("?").to_string());
    }
    Ok(format!("byte-identical reports on repeated runs: {}", names.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("model-space exactness", c1_model_space),
        ("static-potential residuals", c2_static_residuals),
        ("mass consistency", c3_mass_consistency),
        ("adjoint duality", c4_duality),
        ("trace identity", c5_trace_identity),
        ("ODE lemmas", c6_ode_lemmas),
        ("dichotomy", c7_dichotomy),
        ("rigidity identities", c8_rigidity),
        ("first variation", c9_first_variation),
        ("scalar-curvature deformation", c10_deform),
        ("determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] criterion {:>2} {name}: {detail} ({:.1}s)", k + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
