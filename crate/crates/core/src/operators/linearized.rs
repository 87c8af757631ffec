//! The linearized scalar-curvature operator, its formal adjoint, and the
//! pointwise and integrated identities between them.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{fit_decay, DecayEstimate};
use crate::error::{Error, Result};
use crate::geometry::fields::{ScalarField, Support, SymmetricField, TensorJet};
use crate::geometry::metric::Metric;
use crate::jet::Jet;
use crate::quadrature::{angular_grid, AnnulusQuadrature};
use crate::tensor::{curvature_at, matrix_of, CurvaturePack, LocalGeometry};

#[inline]
fn i4(n: usize, a: usize, b: usize, c: usize, d: usize) -> usize {
    ((a * n + b) * n + c) * n + d
}

/// `-Δ(tr h) + div div h - ⟨h, Ric⟩` for a local jet `h`.
pub fn linearized_local(pack: &CurvaturePack, h: &TensorJet) -> f64 {
    let geo = &pack.geometry;
    let n = geo.n;
    let d2 = geo.second_covariant_derivative(h);
    let gi = |a: usize, b: usize| geo.ginv[a * n + b];
    let mut lap_tr = 0.0;
    let mut divdiv = 0.0;
    for a in 0..n {
        for b in 0..n {
            for i in 0..n {
                for j in 0..n {
                    lap_tr += gi(a, b) * gi(i, j) * d2[i4(n, a, b, i, j)];
                    // ∇^j ∇^i h_ij
                    divdiv += gi(b, j) * gi(a, i) * d2[i4(n, b, a, i, j)];
                }
            }
        }
    }
    -lap_tr + divdiv - geo.inner(&matrix_of(h), &pack.ricci)
}

/// `-(ΔV) g + ∇²V - V Ric` for a local jet `V`, local components.
pub fn adjoint_local(pack: &CurvaturePack, v: &Jet) -> DMatrix<f64> {
    let geo = &pack.geometry;
    let hess = geo.hessian(v);
    let lap = geo.trace(&hess);
    hess - geo.metric_matrix() * lap - &pack.ricci * v.value()
}

/// `L_g h` at a chart point.
pub fn linearized_scalar(g: &dyn Metric, h: &dyn SymmetricField, x: &[f64]) -> Result<f64> {
    let pack = curvature_at(g, x)?;
    let hl = pack.geometry.tensor(&h.jet(x)?);
    Ok(linearized_local(&pack, &hl))
}

/// `L_g* V` at a chart point, chart components.
pub fn adjoint(g: &dyn Metric, v: &dyn ScalarField, x: &[f64]) -> Result<DMatrix<f64>> {
    let pack = curvature_at(g, x)?;
    let vl = pack.geometry.scalar(&v.jet(x)?);
    Ok(pack.geometry.lower_to_chart(&adjoint_local(&pack, &vl)))
}

/// Both sides of `L_g(u g) = (1 - n)(Δu + R u/(n-1))` at a chart point.
pub fn trace_identity(g: &dyn Metric, u: &dyn ScalarField, x: &[f64]) -> Result<(f64, f64)> {
    let n = g.dim() as f64;
    let pack = curvature_at(g, x)?;
    let uj = u.jet(x)?;
    let h = pack.geometry.tensor(&g.jet(x)?.scale_by(&uj));
    let lhs = linearized_local(&pack, &h);
    let ul = pack.geometry.scalar(&uj);
    let rhs = (1.0 - n) * (pack.geometry.laplacian(&ul) + pack.scalar * ul.value() / (n - 1.0));
    Ok((lhs, rhs))
}

/// `(|∇²V - (Ric + n g)V|_g, |ΔV - nV|)` at a chart point.
pub fn static_residual_at(g: &dyn Metric, v: &dyn ScalarField, x: &[f64]) -> Result<(f64, f64)> {
    let n = g.dim();
    let pack = curvature_at(g, x)?;
    let geo = &pack.geometry;
    let vl = geo.scalar(&v.jet(x)?);
    let hess = geo.hessian(&vl);
    let lap = geo.trace(&hess);
    let target = (&pack.ricci + geo.metric_matrix() * n as f64) * vl.value();
    let diff = hess - target;
    Ok((geo.norm(&diff), (lap - n as f64 * vl.value()).abs()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StaticResidualReport {
    pub radii: Vec<f64>,
    /// Per radius, `sup` over the angular samples.
    pub hessian: Vec<f64>,
    pub laplacian: Vec<f64>,
    pub hessian_max: f64,
    pub laplacian_max: f64,
    pub hessian_decay: DecayEstimate,
    pub laplacian_decay: DecayEstimate,
}

/// Static-equation residuals on the spheres `|x| = r`, `per_angle` points per angle.
pub fn static_residual(
    g: &dyn Metric,
    v: &dyn ScalarField,
    radii: &[f64],
    per_angle: usize,
    zero_tolerance: f64,
) -> Result<StaticResidualReport> {
    use rayon::prelude::*;
    let n = g.dim();
    let grid = angular_grid(n, per_angle);
    let sups = radii
        .par_iter()
        .map(|&r| -> Result<(f64, f64)> {
            let mut s = (0.0f64, 0.0f64);
            for w in &grid {
                let x: Vec<f64> = w.iter().map(|c| c * r).collect();
                let (a, b) = static_residual_at(g, v, &x)?;
                s = (s.0.max(a), s.1.max(b));
            }
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    let hessian: Vec<f64> = sups.iter().map(|s| s.0).collect();
    let laplacian: Vec<f64> = sups.iter().map(|s| s.1).collect();
    let pairs = |v: &[f64]| radii.iter().cloned().zip(v.iter().cloned()).collect::<Vec<_>>();
    Ok(StaticResidualReport {
        radii: radii.to_vec(),
        hessian_max: hessian.iter().cloned().fold(0.0, f64::max),
        laplacian_max: laplacian.iter().cloned().fold(0.0, f64::max),
        hessian_decay: fit_decay(pairs(&hessian), zero_tolerance)?,
        laplacian_decay: fit_decay(pairs(&laplacian), zero_tolerance)?,
        hessian,
        laplacian,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    /// `∫ u L_g h dμ_g`.
    pub lhs: f64,
    /// `∫ ⟨h, L_g* u⟩ dμ_g`.
    pub rhs: f64,
    /// `max(∫|u L_g h|, ∫|⟨h, L_g* u⟩|)`.
    pub scale: f64,
    pub residual: f64,
}

fn check_support(s: Support, q: &AnnulusQuadrature, what: &str) -> Result<()> {
    if !s.contained_in(q.inner, q.outer) {
        return Err(Error::Precondition(format!(
            "{what} not supported inside the quadrature annulus [{}, {}]",
            q.inner, q.outer
        )));
    }
    Ok(())
}

/// `|∫ u L_g h - ∫ ⟨h, L_g* u⟩| / scale` over a coordinate annulus (`n = 3`).
pub fn duality_residual(
    g: &dyn Metric,
    h: &dyn SymmetricField,
    u: &dyn ScalarField,
    quad: &AnnulusQuadrature,
) -> Result<DualityReport> {
    if g.dim() != 3 {
        return Err(Error::Unsupported("volume quadrature is implemented for n = 3".into()));
    }
    check_support(h.support(), quad, "h")?;
    check_support(u.support(), quad, "u")?;
    if let Some(rh) = g.horizon_radius() {
        if quad.inner <= rh {
            return Err(Error::Domain(format!("annulus reaches the horizon {rh}")));
        }
    }
    let parts = quad.integrate_many(4, |x| {
        let pack = curvature_at(g, x)?;
        let geo = &pack.geometry;
        let uj = geo.scalar(&u.jet(x)?);
        let hj = geo.tensor(&h.jet(x)?);
        let a = uj.value() * linearized_local(&pack, &hj);
        let b = geo.inner(&matrix_of(&hj), &adjoint_local(&pack, &uj));
        let w = geo.sqrt_det;
        Ok(vec![a * w, b * w, a.abs() * w, b.abs() * w])
    })?;
    let scale = parts[2].max(parts[3]);
    let residual = if scale > 0.0 { (parts[0] - parts[1]).abs() / scale } else { 0.0 };
    Ok(DualityReport {
        lhs: parts[0],
        rhs: parts[1],
        scale,
        residual,
    })
}

/// `∫ u (1 - n)(Δu + R u/(n-1)) dμ_g`, the trace-identity form of `∫ u L_g(u g)`.
pub fn trace_form_integral(g: &dyn Metric, u: &dyn ScalarField, quad: &AnnulusQuadrature) -> Result<f64> {
    let vals = quad.integrate(|x| {
        let (_, rhs) = trace_identity(g, u, x)?;
        let geo = LocalGeometry::at(g, x)?;
        Ok(u.value(x)? * rhs * geo.sqrt_det)
    })?;
    Ok(vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fields::{radial_bump, FnScalar};
    use crate::geometry::metric::{hyperbolic_metric, schwarzschild_ads, MetricAsField};
    use crate::geometry::potentials::static_potential_basis;

    #[test]
    fn metric_direction() {
        // L_g(g) = -R_g
        for g in [hyperbolic_metric(3).unwrap(), schwarzschild_ads(3, 0.5).unwrap()] {
            let x = [1.3, -0.4, 2.2];
            let l = linearized_scalar(&g, &MetricAsField(&g), &x).unwrap();
            let r = curvature_at(&g, &x).unwrap().scalar;
            assert!((l + r).abs() < 1e-9, "{l} {r}");
        }
    }

    #[test]
    fn potentials_are_static_on_background() {
        let b = hyperbolic_metric(3).unwrap();
        let x = [0.7, 2.0, -1.1];
        for v in static_potential_basis(3) {
            assert!(adjoint(&b, &v, &x).unwrap().amax() < 1e-9);
            let (a, l) = static_residual_at(&b, &v, &x).unwrap();
            assert!(a < 1e-9 && l < 1e-9);
        }
    }

    #[test]
    fn trace_identity_pointwise() {
        let g = schwarzschild_ads(3, 0.5).unwrap();
        let u = FnScalar::new(|x: &[Jet]| radial_bump(x, 1.5, 4.0, 5) * (x[0] * 0.3 + 1.0).sin());
        for x in [[2.0, 0.5, 0.3], [0.4, -2.5, 1.0]] {
            let (l, r) = trace_identity(&g, &u, &x).unwrap();
            assert!((l - r).abs() < 1e-8, "{l} {r}");
        }
    }

    #[test]
    fn adjoint_trace_combination() {
        // tr L*V = -nΔV + ΔV - R V
        let g = schwarzschild_ads(3, 0.5).unwrap();
        let v = FnScalar::new(|x: &[Jet]| (x[1] * 0.5).exp() + x[0] * x[2]);
        let x = [1.0, 2.0, -0.5];
        let pack = curvature_at(&g, &x).unwrap();
        let vl = pack.geometry.scalar(&v.jet(&x).unwrap());
        let tr = pack.geometry.trace(&adjoint_local(&pack, &vl));
        let lap = pack.geometry.laplacian(&vl);
        assert!((tr - (-3.0 * lap + lap - pack.scalar * vl.value())).abs() < 1e-10);
    }
}
