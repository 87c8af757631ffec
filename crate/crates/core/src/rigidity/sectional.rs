//! Curvature along integral curves of `∇f/|∇f|` when `∇²f = f g`:
//! `ρ = f/|∇f|` solves `ρ' = 1 - ρ²`, `K = K(X∧Y)` for parallel `X, Y ⟂ γ'`
//! solves `K' = -2ρ(K + 1)`, and the mixed curvatures `K(X∧γ')` equal `-1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::fields::ScalarField;
use crate::geometry::metric::Metric;
use crate::ode::geodesic::{integrate_geodesic_with_frame, GeodesicOptions};
use crate::rigidity::warped::hessian_rigidity_residual;
use crate::tensor::{curvature_at, LocalGeometry};

/// `|∇f|` below this aborts the check.
pub const CRITICAL_GRADIENT: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionalReport {
    pub t: Vec<f64>,
    pub f: Vec<f64>,
    pub rho: Vec<f64>,
    /// `K(X∧Y)`.
    pub k: Vec<f64>,
    /// `max |K(X∧γ') + 1|, |K(Y∧γ') + 1|` over the samples.
    pub mixed_residual: f64,
    /// `max |ρ' - (1 - ρ²)|` over interior samples, `ρ'` from a 5-point stencil.
    pub rho_residual: f64,
    /// `max |K' + 2ρ(K + 1)|` over interior samples.
    pub k_residual: f64,
    /// `f ≈ C_1 e^t + C_2 e^{-t}` by least squares.
    pub f_fit: (f64, f64),
    /// `max |f - C_1 e^t - C_2 e^{-t}|`.
    pub f_fit_residual: f64,
    /// `C` in `ρ = 1 - 2/(C e^{2t} + 1)`, fitted at `t = 0`; `None` when `|ρ| ≡ 1`.
    pub rho_constant: Option<f64>,
    /// `max |ρ - 1 + 2/(C e^{2t} + 1)|`.
    pub rho_profile_error: Option<f64>,
    /// `max |∇²f - f g|_g` along the curve.
    pub hessian_residual: f64,
    pub max_drift: f64,
    pub transport_drift: f64,
}

/// Five-point central derivative at interior samples `2..len-2`.
fn stencil(y: &[f64], h: f64) -> Vec<f64> {
    (2..y.len() - 2)
        .map(|i| (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * h))
        .collect()
}

/// Runs the curve `γ` from `p` with `γ'(0) = ∇f/|∇f|` over `t ∈ [-backward, forward]`,
/// transporting `frame` (two chart vectors, orthonormalized against `γ'`).
pub fn sectional_ode_check(
    g: &dyn Metric,
    f: &dyn ScalarField,
    p: &[f64],
    frame: &[Vec<f64>],
    backward: f64,
    forward: f64,
    opts: &GeodesicOptions,
) -> Result<SectionalReport> {
    if frame.len() != 2 {
        return Err(Error::InvalidParameter("need exactly two frame vectors".into()));
    }
    if !(forward > 0.0 && backward >= 0.0) {
        return Err(Error::InvalidParameter("need forward > 0 and backward >= 0".into()));
    }
    let geo = LocalGeometry::at(g, p)?;
    let fl = geo.scalar(&f.jet(p)?);
    let grad = geo.gradient(&fl);
    let norm = geo.vector_norm(&grad);
    if norm < CRITICAL_GRADIENT {
        return Err(Error::CriticalPoint(norm));
    }
    let dir = geo.vector_to_chart(&grad);

    let fwd = integrate_geodesic_with_frame(g, p, &dir, frame, forward, opts)?;
    let mut t = Vec::new();
    let mut pos = Vec::new();
    let mut vel = Vec::new();
    let mut fr = Vec::new();
    let mut max_drift = fwd.max_drift;
    let mut transport_drift = fwd.transport_drift;
    if backward > 0.0 {
        let bwd = integrate_geodesic_with_frame(g, p, &dir, frame, -backward, opts)?;
        if (bwd.t[1] + fwd.t[1]).abs() > 1e-12 * fwd.t[1] {
            return Err(Error::InvalidParameter("backward length must be a multiple of the sample step".into()));
        }
        for k in (1..bwd.t.len()).rev() {
            t.push(bwd.t[k]);
            pos.push(bwd.positions[k].clone());
            vel.push(bwd.velocities[k].clone());
            fr.push(bwd.transported[k].clone());
        }
        max_drift = max_drift.max(bwd.max_drift);
        transport_drift = transport_drift.max(bwd.transport_drift);
    }
    t.extend_from_slice(&fwd.t);
    pos.extend(fwd.positions.iter().cloned());
    vel.extend(fwd.velocities.iter().cloned());
    fr.extend(fwd.transported.iter().cloned());
    if t.len() < 5 {
        return Err(Error::InvalidParameter("curve too short for the 5-point stencil".into()));
    }

    let mut fs = Vec::with_capacity(t.len());
    let mut rho = Vec::with_capacity(t.len());
    let mut k = Vec::with_capacity(t.len());
    let mut mixed_residual = 0.0f64;
    let mut hessian_residual = 0.0f64;
    for i in 0..t.len() {
        let x = &pos[i];
        let pack = curvature_at(g, x)?;
        let geo = &pack.geometry;
        let fl = geo.scalar(&f.jet(x)?);
        let gn = geo.vector_norm(&geo.gradient(&fl));
        if gn < CRITICAL_GRADIENT {
            return Err(Error::CriticalPoint(gn));
        }
        fs.push(fl.value());
        rho.push(fl.value() / gn);
        let (xv, yv) = (&fr[i][0], &fr[i][1]);
        k.push(pack.sectional_chart(xv, yv));
        for e in [xv, yv] {
            mixed_residual = mixed_residual.max((pack.sectional_chart(e, &vel[i]) + 1.0).abs());
        }
        hessian_residual = hessian_residual.max(hessian_rigidity_residual(g, f, x)?);
    }
    let h = t[1] - t[0];
    let drho = stencil(&rho, h);
    let dk = stencil(&k, h);
    let mut rho_residual = 0.0f64;
    let mut k_residual = 0.0f64;
    for (j, i) in (2..t.len() - 2).enumerate() {
        rho_residual = rho_residual.max((drho[j] - (1.0 - rho[i] * rho[i])).abs());
        k_residual = k_residual.max((dk[j] + 2.0 * rho[i] * (k[i] + 1.0)).abs());
    }

    // least squares for C_1, C_2
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (ti, fi) in t.iter().zip(&fs) {
        let (u, v) = (ti.exp(), (-ti).exp());
        a11 += u * u;
        a12 += u * v;
        a22 += v * v;
        b1 += u * fi;
        b2 += v * fi;
    }
    let det = a11 * a22 - a12 * a12;
    let c1 = (b1 * a22 - b2 * a12) / det;
    let c2 = (a11 * b2 - a12 * b1) / det;
    let f_fit_residual = t
        .iter()
        .zip(&fs)
        .fold(0.0f64, |m, (ti, fi)| m.max((fi - c1 * ti.exp() - c2 * (-ti).exp()).abs()));

    let i0 = t.iter().position(|v| *v == 0.0).unwrap_or(0);
    let case_one = rho.iter().all(|r| (r.abs() - 1.0).abs() < 1e-8);
    let (rho_constant, rho_profile_error) = if case_one || !(rho[i0].abs() < 1.0) {
        (None, None)
    } else {
        // ρ(t_0) = 1 - 2/(C e^{2t_0} + 1)
        let c = (1.0 + rho[i0]) / (1.0 - rho[i0]) * (-2.0 * t[i0]).exp();
        let err = t
            .iter()
            .zip(&rho)
            .fold(0.0f64, |m, (ti, r)| m.max((r - 1.0 + 2.0 / (c * (2.0 * ti).exp() + 1.0)).abs()));
        (Some(c), Some(err))
    };
    Ok(SectionalReport {
        t,
        f: fs,
        rho,
        k,
        mixed_residual,
        rho_residual,
        k_residual,
        f_fit: (c1, c2),
        f_fit_residual,
        rho_constant,
        rho_profile_error,
        hessian_residual,
        max_drift,
        transport_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::metric::hyperbolic_metric;
    use crate::geometry::potentials::StaticPotential;
    use crate::rigidity::warped::{SinhPotential, WarpBase, WarpedMetric};

    #[test]
    fn model_space_radial_curve() {
        let b = hyperbolic_metric(3).unwrap();
        let frame = vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let fine = GeodesicOptions {
            sample_step: 0.01,
            ..GeodesicOptions::default()
        };
        let rep = sectional_ode_check(&b, &StaticPotential::lapse(3), &[1.0, 0.0, 0.0], &frame, 0.3, 4.0, &fine).unwrap();
        assert!(rep.k.iter().all(|k| (k + 1.0).abs() < 1e-8));
        assert!(rep.mixed_residual < 1e-8);
        assert!(rep.rho_residual < 1e-5, "{}", rep.rho_residual);
        assert!(rep.f_fit_residual < 1e-8, "{}", rep.f_fit_residual);
        // ρ = coth(s) > 1 here, outside the profile family
        assert!(rep.rho_constant.is_none());
    }

    #[test]
    fn sphere_warped_curve() {
        let g = WarpedMetric::new(3, WarpBase::RoundSphere).unwrap();
        let frame = vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let run = |h: f64| {
            let opts = GeodesicOptions {
                sample_step: h,
                ..GeodesicOptions::default()
            };
            sectional_ode_check(&g, &SinhPotential, &[0.0, 0.3, -0.2], &frame, 3.0, 3.0, &opts).unwrap()
        };
        let rep = run(0.025);
        for (t, r) in rep.t.iter().zip(&rep.rho) {
            assert!((r - t.tanh()).abs() < 1e-6);
        }
        for (t, k) in rep.t.iter().zip(&rep.k) {
            assert!((k - (1.0 - t.sinh().powi(2)) / t.cosh().powi(2)).abs() < 1e-8);
        }
        assert!((rep.rho_constant.unwrap() - 1.0).abs() < 1e-8);
        assert!(rep.k_residual < 1e-5 && rep.rho_residual < 1e-5, "{} {}", rep.k_residual, rep.rho_residual);
        assert!(rep.mixed_residual < 1e-8);
        // stencil error is fourth order in the sample step
        let coarse = run(0.05);
        let ratio = coarse.k_residual / rep.k_residual;
        assert!(ratio > 10.0, "{ratio}");
    }

    #[test]
    fn critical_point_is_labeled() {
        let b = hyperbolic_metric(3).unwrap();
        let frame = vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let err = sectional_ode_check(&b, &StaticPotential::lapse(3), &[0.0, 0.0, 0.0], &frame, 0.0, 1.0, &GeodesicOptions::default());
        assert!(matches!(err, Err(Error::CriticalPoint(_))));
    }
}
