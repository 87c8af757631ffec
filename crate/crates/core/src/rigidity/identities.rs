//! The integral identity `∫ f^{-1}|∇²f - fg|² dμ_g = ∮ S(∇f, ν) dσ_g` with
//! `S = Ric_g + (n-1)g`, and its pointwise divergence form `f|S|² = div S(∇f)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::fields::ScalarField;
use crate::geometry::metric::Metric;
use crate::jet::{norm_squared, Jet};
use crate::operators::linearized::static_residual_at;
use crate::quadrature::{integrate_sphere, AnnulusQuadrature, SphereQuadrature};
use crate::tensor::{curvature_at, LocalGeometry};

/// Static-equation residual above which the identity is not expected to hold.
pub const STATIC_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WangReport {
    pub inner: f64,
    pub outer: f64,
    /// `∫ f^{-1} |∇²f - f g|² dμ_g`.
    pub lhs: f64,
    /// `∮_{outer} S(∇f, ν) dσ_g - ∮_{inner} S(∇f, ν) dσ_g`.
    pub rhs: f64,
    /// `|lhs - rhs| / max(|lhs|, |rhs|, 1)`.
    pub gap: f64,
    /// `max |∇²f - (Ric + n g) f|_g` over the volume nodes.
    pub static_residual: f64,
    /// The static residual is below [`STATIC_THRESHOLD`].
    pub static_precondition: bool,
    pub min_f: f64,
}

/// `∮_{|x|=r} S(∇f, ν) dσ_g` with `ν` the outward `g`-unit normal (`n = 3`).
fn boundary_flux(g: &dyn Metric, f: &dyn ScalarField, r: f64, sphere: &SphereQuadrature) -> Result<f64> {
    integrate_sphere(sphere, |w| {
        let x: Vec<f64> = w.iter().map(|c| c * r).collect();
        let pack = curvature_at(g, &x)?;
        let geo = &pack.geometry;
        let fl = geo.scalar(&f.jet(&x)?);
        let rl = geo.scalar(&norm_squared(&Jet::coordinates(&x)).sqrt());
        let grad_f = geo.gradient(&fl);
        let grad_r = geo.gradient(&rl);
        let s = pack.ricci_excess();
        let mut acc = 0.0;
        for i in 0..geo.n {
            for j in 0..geo.n {
                acc += s[(i, j)] * grad_f[i] * grad_r[j];
            }
        }
        // ν = ∇r/|∇r| and dσ_g = √det |dr|_g r² dω: the |∇r| factors cancel
        Ok(acc * geo.sqrt_det * r * r)
    })
}

/// Both sides of the identity on `inner <= |x| <= outer` (`inner = 0` is the ball; `n = 3`).
pub fn wang_identity_check(
    g: &dyn Metric,
    f: &dyn ScalarField,
    inner: f64,
    outer: f64,
    radial: usize,
    sphere: SphereQuadrature,
) -> Result<WangReport> {
    if g.dim() != 3 {
        return Err(Error::Unsupported("volume quadrature is implemented for n = 3".into()));
    }
    if let Some(h) = g.horizon_radius() {
        if inner <= h {
            return Err(Error::Domain(format!("region reaches the horizon {h}")));
        }
    }
    let quad = AnnulusQuadrature::new(inner, outer, radial, sphere)?;
    let nodes = quad.nodes();
    let vals = {
        use rayon::prelude::*;
        nodes
            .par_iter()
            .map(|(x, w)| -> Result<(f64, f64, f64)> {
                let geo = LocalGeometry::at(g, x)?;
                let fl = geo.scalar(&f.jet(x)?);
                let d = geo.hessian(&fl) - geo.metric_matrix() * fl.value();
                let (stat, _) = static_residual_at(g, f, x)?;
                Ok((geo.inner(&d, &d) / fl.value() * geo.sqrt_det * w, fl.value(), stat))
            })
            .collect::<Result<Vec<_>>>()?
    };
    let min_f = vals.iter().fold(f64::INFINITY, |m, v| m.min(v.1));
    if !(min_f > 0.0) {
        return Err(Error::Precondition(format!("f is not positive on the region (min {min_f})")));
    }
    let lhs = crate::quadrature::pairwise_sum(&vals.iter().map(|v| v.0).collect::<Vec<_>>());
    let static_residual = vals.iter().fold(0.0f64, |m, v| m.max(v.2));
    let mut rhs = boundary_flux(g, f, outer, &sphere)?;
    if inner > 0.0 {
        rhs -= boundary_flux(g, f, inner, &sphere)?;
    }
    Ok(WangReport {
        inner,
        outer,
        lhs,
        rhs,
        gap: (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0),
        static_residual,
        static_precondition: static_residual < STATIC_THRESHOLD,
        min_f,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceFormReport {
    pub point: Vec<f64>,
    /// `f |S|²_g`.
    pub lhs: f64,
    /// `div_g(S(∇f))` by central differences.
    pub rhs: f64,
    pub residual: f64,
    pub static_residual: f64,
}

/// Chart components of `√det g · g^{ij} S(∇f)_j`.
fn flux_density(g: &dyn Metric, f: &dyn ScalarField, x: &[f64]) -> Result<Vec<f64>> {
    let pack = curvature_at(g, x)?;
    let geo = &pack.geometry;
    let fl = geo.scalar(&f.jet(x)?);
    let grad = geo.gradient(&fl);
    let s = pack.ricci_excess();
    let n = geo.n;
    // S(∇f) as a local covector, raised
    let w: Vec<f64> = (0..n).map(|j| (0..n).map(|i| s[(i, j)] * grad[i]).sum()).collect();
    let up: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| geo.ginv[i * n + j] * w[j]).sum())
        .collect();
    Ok(geo.vector_to_chart(&up).into_iter().map(|v| v * geo.sqrt_det).collect())
}

/// `|f|S|² - div S(∇f)|` at `x`, the divergence by fourth-order central
/// differences with step `step (1 + |x|)` in each chart direction.
pub fn divergence_form_check(g: &dyn Metric, f: &dyn ScalarField, x: &[f64], step: f64) -> Result<DivergenceFormReport> {
    if !(step > 0.0) {
        return Err(Error::InvalidParameter("finite-difference step must be positive".into()));
    }
    let n = g.dim();
    let pack = curvature_at(g, x)?;
    let geo = &pack.geometry;
    let fl = geo.scalar(&f.jet(x)?);
    let s = pack.ricci_excess();
    let lhs = fl.value() * geo.inner(&s, &s);
    let h = step * (1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt());
    let mut div = 0.0;
    for k in 0..n {
        let shifted = |c: f64| -> Result<f64> {
            let mut y = x.to_vec();
            y[k] += c * h;
            Ok(flux_density(g, f, &y)?[k])
        };
        let d = (-shifted(2.0)? + 8.0 * shifted(1.0)? - 8.0 * shifted(-1.0)? + shifted(-2.0)?) / (12.0 * h);
        div += d;
    }
    let rhs = div / geo.sqrt_det;
    let (static_residual, _) = static_residual_at(g, f, x)?;
    Ok(DivergenceFormReport {
        point: x.to_vec(),
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        static_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fields::FnScalar;
    use crate::geometry::metric::{hyperbolic_metric, schwarzschild_ads};
    use crate::geometry::potentials::{SchwarzschildLapse, StaticPotential};
    use crate::rigidity::warped::{SinhPotential, WarpBase, WarpedMetric};

    fn sphere() -> SphereQuadrature {
        SphereQuadrature::new(12, 24).unwrap()
    }

    #[test]
    fn model_space_sides_vanish() {
        let b = hyperbolic_metric(3).unwrap();
        for f in [StaticPotential::lapse(3), StaticPotential::new(1.0, vec![1.0, 0.0, 0.0]).unwrap()] {
            for r in [5.0, 10.0, 20.0] {
                let rep = wang_identity_check(&b, &f, 0.0, r, 24, sphere()).unwrap();
                assert!(rep.gap < 1e-8 && rep.lhs.abs() < 1e-8 && rep.static_precondition, "{rep:?}");
            }
        }
    }

    #[test]
    fn schwarzschild_lapse_balances() {
        // exact static data with S ≠ 0: both sides are nonzero and agree
        let m = 0.5;
        let g = schwarzschild_ads(3, m).unwrap();
        let f = SchwarzschildLapse { n: 3, m };
        let rep = wang_identity_check(&g, &f, 1.0, 6.0, 48, sphere()).unwrap();
        assert!(rep.static_precondition, "{rep:?}");
        assert!(rep.lhs > 1e-2, "{rep:?}");
        assert!((rep.lhs - rep.rhs).abs() < 1e-8 * rep.lhs, "{rep:?}");
    }

    #[test]
    fn non_static_bump_breaks_the_precondition() {
        let b = hyperbolic_metric(3).unwrap();
        let f = FnScalar::new(|x: &[Jet]| {
            (1.0 + norm_squared(x)).sqrt() + crate::geometry::fields::radial_bump(x, 1.0, 3.0, 6) * 0.2
        });
        let rep = wang_identity_check(&b, &f, 0.0, 5.0, 32, sphere()).unwrap();
        assert!(!rep.static_precondition);
        assert!(rep.gap > 1e-3, "{rep:?}");
    }

    #[test]
    fn divergence_form() {
        let b = hyperbolic_metric(3).unwrap();
        let x = [0.8, -1.2, 2.0];
        let r = divergence_form_check(&b, &StaticPotential::lapse(3), &x, 1e-3).unwrap();
        assert!(r.residual < 1e-8, "{r:?}");
        let one = FnScalar::new(|x: &[Jet]| Jet::constant(x.len(), 1.0));
        let r = divergence_form_check(&b, &one, &x, 1e-3).unwrap();
        assert!(r.lhs.abs() < 1e-9 && r.rhs.abs() < 1e-8, "{r:?}");

        let m = 0.5;
        let g = schwarzschild_ads(3, m).unwrap();
        let r = divergence_form_check(&g, &SchwarzschildLapse { n: 3, m }, &[1.5, 0.4, -0.9], 1e-3).unwrap();
        assert!(r.lhs.abs() > 1e-2 && r.residual < 1e-6 * r.lhs.abs(), "{r:?}");

        // on the round-sphere warped product S = (2/cosh²t) h-part and S(∇f) = 0
        let w = WarpedMetric::new(3, WarpBase::RoundSphere).unwrap();
        let t: f64 = 1.0;
        let r = divergence_form_check(&w, &SinhPotential, &[t, 0.2, 0.1], 1e-3).unwrap();
        let expected = 8.0 * t.sinh() / t.cosh().powi(4);
        assert!((r.lhs - expected).abs() < 1e-8 && r.rhs.abs() < 1e-8, "{r:?}");
    }
}
