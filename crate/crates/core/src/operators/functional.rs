//! The volume functional
//! `F(γ) = ∫ ([L_g(γ - b) - (R(γ) + n(n-1))] f - (γ - b)·L_g* f) dμ_g`
//! and a finite-difference check of its first variation at `γ = g`.

use serde::{Deserialize, Serialize};

use super::linearized::{adjoint_local, linearized_local};
use super::potential::{AsymptoticTag, PotentialField};
use crate::error::{Error, Result};
use crate::fit::{linear_fit, log_ladder, power_law_fit, richardson_limit};
use crate::geometry::fields::{ScalarField, Support, SymmetricField};
use crate::geometry::metric::{Metric, PerturbedMetric};
use crate::quadrature::{gauss_legendre_on, pairwise_sum, AnnulusQuadrature, SphereQuadrature};
use crate::tensor::{curvature_at, matrix_of};

fn require_growth_tag(f: &PotentialField) -> Result<()> {
    if !matches!(f.tag, AsymptoticTag::LinearGrowth { .. }) {
        return Err(Error::Precondition("the functional needs a potential with linear growth".into()));
    }
    Ok(())
}

fn require_three(g: &dyn Metric) -> Result<()> {
    if g.dim() != 3 {
        return Err(Error::Unsupported("volume quadrature is implemented for n = 3".into()));
    }
    Ok(())
}

/// Integrand of `F` against `d³x` (the density `√det g` included).
pub fn functional_density(g: &dyn Metric, f: &dyn ScalarField, gamma: &dyn Metric, x: &[f64]) -> Result<f64> {
    density_and_scale(g, f, gamma, x).map(|p| p.0)
}

/// The density together with `n(n-1)|f|√det g`, the size of the terms that
/// cancel in `R(γ) + n(n-1)`.
fn density_and_scale(g: &dyn Metric, f: &dyn ScalarField, gamma: &dyn Metric, x: &[f64]) -> Result<(f64, f64)> {
    let n = g.dim() as f64;
    let pack = curvature_at(g, x)?;
    let geo = &pack.geometry;
    let e = geo.tensor(&gamma.deviation(x)?);
    let fl = geo.scalar(&f.jet(x)?);
    let r_gamma = curvature_at(gamma, x)?.scalar;
    let bulk = (linearized_local(&pack, &e) - (r_gamma + n * (n - 1.0))) * fl.value();
    let dual = geo.inner(&matrix_of(&e), &adjoint_local(&pack, &fl));
    Ok(((bulk - dual) * geo.sqrt_det, n * (n - 1.0) * fl.value().abs() * geo.sqrt_det))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalOptions {
    pub r_min: f64,
    pub r_max: f64,
    /// Logarithmic radial panels.
    pub panels: usize,
    /// Gauss nodes per panel.
    pub per_panel: usize,
    pub sphere: SphereQuadrature,
    /// The integrand counts as identically zero when every shell density is
    /// below this fraction of `∫ n(n-1)|f| dσ_g` on its shell.
    pub zero_tolerance: f64,
}

impl Default for FunctionalOptions {
    fn default() -> Self {
        FunctionalOptions {
            r_min: 1.0,
            r_max: 200.0,
            panels: 12,
            per_panel: 8,
            sphere: SphereQuadrature::new(16, 32).expect("valid rule"),
            zero_tolerance: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalValue {
    /// Quadrature over `[r_min, r_max]` plus the tail estimate.
    pub value: f64,
    pub interior: f64,
    pub tail: f64,
    /// Error bar on the tail.
    pub tail_error: f64,
    /// Fitted decay exponent of the shell density, when nonzero.
    pub shell_decay: Option<f64>,
    /// `(r, ∫_{|x|=r} integrand dσ)`.
    pub shells: Vec<(f64, f64)>,
}

/// `F(γ)` over the exterior region `|x| >= r_min` (`n = 3`).
pub fn functional_f(
    g: &dyn Metric,
    f: &PotentialField,
    gamma: &dyn Metric,
    opts: &FunctionalOptions,
) -> Result<FunctionalValue> {
    require_three(g)?;
    require_growth_tag(f)?;
    if gamma.dim() != g.dim() {
        return Err(Error::InvalidParameter("γ and g have different dimensions".into()));
    }
    if !(opts.r_min > 0.0 && opts.r_max > 10.0 * opts.r_min) || opts.panels < 2 || opts.per_panel < 2 {
        return Err(Error::InvalidParameter("functional needs r_max > 10 r_min and at least 2 panels".into()));
    }
    for h in [g.horizon_radius(), gamma.horizon_radius()].into_iter().flatten() {
        if opts.r_min <= h {
            return Err(Error::Domain(format!("r_min {} inside the horizon {h}", opts.r_min)));
        }
    }
    opts.sphere.validate()?;
    let edges = log_ladder(opts.r_min, opts.r_max, opts.panels + 1);
    let mut radii = Vec::new();
    let mut weights = Vec::new();
    for w in edges.windows(2) {
        let (z, wz) = gauss_legendre_on(opts.per_panel, w[0].ln(), w[1].ln());
        for (z, wz) in z.iter().zip(&wz) {
            let r = z.exp();
            radii.push(r);
            // dr = r dz
            weights.push(wz * r);
        }
    }
    let sphere = opts.sphere.nodes();
    let (shells, magnitudes): (Vec<(f64, f64)>, Vec<f64>) = {
        use rayon::prelude::*;
        let per: Vec<(f64, f64, f64)> = radii
            .par_iter()
            .map(|&r| -> Result<(f64, f64, f64)> {
                let mut vals = Vec::with_capacity(sphere.len());
                let mut mags = Vec::with_capacity(sphere.len());
                for (om, w) in &sphere {
                    let x: Vec<f64> = om.iter().map(|c| c * r).collect();
                    let (d, m) = density_and_scale(g, f, gamma, &x)?;
                    vals.push(d * w * r * r);
                    mags.push(m * w * r * r);
                }
                Ok((r, pairwise_sum(&vals), pairwise_sum(&mags)))
            })
            .collect::<Result<_>>()?;
        per.into_iter().map(|(r, v, m)| ((r, v), m)).unzip()
    };
    let negligible: Vec<bool> = shells
        .iter()
        .zip(&magnitudes)
        .map(|(s, m)| s.1.abs() <= opts.zero_tolerance * m)
        .collect();
    if negligible.iter().all(|z| *z) {
        return Ok(FunctionalValue {
            value: 0.0,
            interior: 0.0,
            tail: 0.0,
            tail_error: 0.0,
            shell_decay: None,
            shells,
        });
    }
    let interior = pairwise_sum(&shells.iter().zip(&weights).map(|(s, w)| s.1 * w).collect::<Vec<_>>());

    // tail from the last panel
    let tail_pts: Vec<&(f64, f64)> = shells.iter().rev().take(opts.per_panel).collect();
    let (tail, tail_error, shell_decay) = if negligible.iter().rev().take(opts.per_panel).all(|z| *z) {
        // below the noise floor: no fit, bar from the largest shell
        let bar = tail_pts.iter().fold(0.0f64, |m, s| m.max(s.1.abs())) * opts.r_max;
        (0.0, bar, None)
    } else {
        let (r, y): (Vec<f64>, Vec<f64>) = tail_pts.iter().map(|s| (s.0, s.1)).unzip();
        let fit = power_law_fit(&r, &y).ok_or_else(|| Error::Solver("tail fit failed".into()))?;
        if fit.exponent <= 1.0 {
            return Err(Error::DivergentTail(format!(
                "shell density decays like r^-{:.3}, not integrable",
                fit.exponent
            )));
        }
        let sign = tail_pts[0].1.signum();
        let t = sign * fit.amplitude * opts.r_max.powf(1.0 - fit.exponent) / (fit.exponent - 1.0);
        // error bar: the fit residual scales the tail, floored at a tenth of it
        (t, t.abs() * fit.residual.max(0.1), Some(fit.exponent))
    };
    Ok(FunctionalValue {
        value: interior + tail,
        interior,
        tail,
        tail_error,
        shell_decay,
        shells,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstVariationReport {
    pub epsilons: Vec<f64>,
    /// `(F(g + εh) - F(g))/ε`.
    pub quotients: Vec<f64>,
    /// `-∫ h·L_g* f dμ_g`.
    pub expected: f64,
    pub errors: Vec<f64>,
    /// Slope of `log error` against `log ε`; `None` when every error vanishes.
    pub order: Option<f64>,
    /// Polynomial extrapolation of the quotients to `ε = 0`.
    pub extrapolated: f64,
    /// Scale used for the error: `max(∫|h·L_g* f|, ∫|Δ density|/ε)`.
    pub scale: f64,
}

pub const DEFAULT_EPSILONS: [f64; 5] = [0.08, 0.04, 0.02, 0.01, 0.005];

/// Errors below this fraction of the scale count as exact.
const EXACT_FRACTION: f64 = 1e-13;

/// Difference quotients of `F` at `g` in the direction of a compactly
/// supported `h`, integrated over the support of `h` (`n = 3`).
pub fn first_variation_check(
    g: &dyn Metric,
    f: &PotentialField,
    h: &dyn SymmetricField,
    epsilons: &[f64],
    radial: usize,
    sphere: SphereQuadrature,
) -> Result<FirstVariationReport> {
    require_three(g)?;
    require_growth_tag(f)?;
    let Support::Annulus { inner, outer } = h.support() else {
        return Err(Error::Precondition("first variation needs a compactly supported h".into()));
    };
    if epsilons.len() < 2 || epsilons.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidParameter("need at least two positive ε".into()));
    }
    if let Some(rh) = g.horizon_radius() {
        if inner <= rh {
            return Err(Error::Domain(format!("support of h reaches the horizon {rh}")));
        }
    }
    let quad = AnnulusQuadrature::new(inner, outer, radial, sphere)?;
    let k = epsilons.len();
    let parts = quad.integrate_many(2 * k + 2, |x| {
        let pack = curvature_at(g, x)?;
        let geo = &pack.geometry;
        let hl = geo.tensor(&h.jet(x)?);
        let fl = geo.scalar(&f.jet(x)?);
        let pair = geo.inner(&matrix_of(&hl), &adjoint_local(&pack, &fl)) * geo.sqrt_det;
        let base = functional_density(g, f, g, x)?;
        let mut out = Vec::with_capacity(2 * k + 2);
        out.push(-pair);
        out.push(pair.abs());
        for &eps in epsilons {
            let ge = PerturbedMetric {
                base: g,
                field: h,
                scale: eps,
            };
            let d = (functional_density(g, f, &ge, x)? - base) / eps;
            out.push(d);
            out.push(d.abs());
        }
        Ok(out)
    })?;
    let expected = parts[0];
    let quotients: Vec<f64> = (0..k).map(|i| parts[2 + 2 * i]).collect();
    let scale = (0..k).fold(parts[1], |m, i| m.max(parts[3 + 2 * i]));
    let errors: Vec<f64> = quotients.iter().map(|q| (q - expected).abs()).collect();
    let exact = errors.iter().all(|e| *e <= EXACT_FRACTION * scale.max(f64::MIN_POSITIVE));
    let order = if exact {
        None
    } else {
        let (le, lerr): (Vec<f64>, Vec<f64>) = epsilons
            .iter()
            .zip(&errors)
            .filter(|(_, e)| **e > 0.0)
            .map(|(a, b)| (a.ln(), b.ln()))
            .unzip();
        if le.len() < 2 {
            None
        } else {
            Some(linear_fit(&le, &lerr).0)
        }
    };
    Ok(FirstVariationReport {
        epsilons: epsilons.to_vec(),
        extrapolated: richardson_limit(epsilons, &quotients),
        quotients,
        expected,
        errors,
        order,
        scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fields::ZeroTensor;
    use crate::geometry::metric::{hyperbolic_metric, schwarzschild_ads};
    use crate::geometry::potentials::StaticPotential;
    use crate::operators::bumps::random_pairs;

    fn sphere() -> SphereQuadrature {
        SphereQuadrature::new(12, 24).unwrap()
    }

    #[test]
    fn functional_vanishes_on_the_model() {
        let b = hyperbolic_metric(3).unwrap();
        let f = PotentialField::from_static(StaticPotential::lapse(3));
        let opts = FunctionalOptions {
            sphere: sphere(),
            panels: 4,
            per_panel: 4,
            ..FunctionalOptions::default()
        };
        let v = functional_f(&b, &f, &b, &opts).unwrap();
        assert!(v.value.abs() < 1e-8, "{}", v.value);
        assert_eq!(v.tail, 0.0);
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn functional_is_quadratic_along_compact_perturbations() {
        let b = hyperbolic_metric(3).unwrap();
        let f = PotentialField::from_static(StaticPotential::lapse(3));
        let h = random_pairs(3, 1, 7)[0].h.clone().weighted(0.1);
        let opts = FunctionalOptions {
            r_min: 1.0,
            r_max: 20.0,
            panels: 8,
            per_panel: 8,
            sphere: sphere(),
            zero_tolerance: 1e-10,
        };
        let vals: Vec<f64> = [1e-2, 1e-3]
            .iter()
            .map(|&eps| {
                let g = PerturbedMetric {
                    base: &b,
                    field: &h,
                    scale: eps,
                };
                functional_f(&b, &f, &g, &opts).unwrap().interior
            })
            .collect();
        let exponent = (vals[0] / vals[1]).abs().log10();
        assert!((exponent - 2.0).abs() < 0.05, "{vals:?} {exponent}");
    }

    #[test]
    fn functional_matches_flux_difference() {
        // f = V_0 is static on b, so the integrand is a divergence and
        // F = I(∞) - I(r_min) with I(r) = 16πm r(1+r²)/(r³+r-2m)
        let b = hyperbolic_metric(3).unwrap();
        let m = 0.5;
        let g = schwarzschild_ads(3, m).unwrap();
        let f = PotentialField::from_static(StaticPotential::lapse(3));
        let r0: f64 = 2.0;
        let opts = FunctionalOptions {
            r_min: r0,
            r_max: 400.0,
            panels: 12,
            per_panel: 8,
            sphere: sphere(),
            zero_tolerance: 1e-10,
        };
        let v = functional_f(&b, &f, &g, &opts).unwrap();
        let flux = |r: f64| 16.0 * std::f64::consts::PI * m * r * (1.0 + r * r) / (r.powi(3) + r - 2.0 * m);
        let exact = 16.0 * std::f64::consts::PI * m - flux(r0);
        assert!((v.value - exact).abs() < 1e-3 * exact.abs(), "{} {exact} tail {}", v.value, v.tail);
        assert_eq!(v.tail, 0.0);
    }

    #[test]
    fn first_variation_on_model_and_schwarzschild() {
        let h = random_pairs(3, 1, 11)[0].h.clone().weighted(0.1);
        let b = hyperbolic_metric(3).unwrap();
        let f = PotentialField::from_static(StaticPotential::lapse(3));
        let rep = first_variation_check(&b, &f, &h, &DEFAULT_EPSILONS, 16, sphere()).unwrap();
        assert!(rep.expected.abs() < 1e-10 * rep.scale.max(1.0));
        assert!(rep.order.unwrap() >= 0.9, "{rep:?}");

        let g = schwarzschild_ads(3, 0.5).unwrap();
        let x1 = PotentialField::from_static(StaticPotential::coordinate(3, 0));
        let rep = first_variation_check(&g, &x1, &h, &DEFAULT_EPSILONS, 16, sphere()).unwrap();
        assert!(rep.order.unwrap() >= 0.9, "{rep:?}");
        assert!((rep.extrapolated - rep.expected).abs() < 1e-3 * rep.scale, "{rep:?}");

        let zero = ZeroTensorOnAnnulus;
        let rep = first_variation_check(&b, &f, &zero, &DEFAULT_EPSILONS, 8, sphere()).unwrap();
        assert!(rep.order.is_none() && rep.expected == 0.0);
    }

    struct ZeroTensorOnAnnulus;

    impl SymmetricField for ZeroTensorOnAnnulus {
        fn jet(&self, x: &[f64]) -> Result<crate::geometry::fields::TensorJet> {
            ZeroTensor.jet(x)
        }
        fn support(&self) -> Support {
            Support::Annulus { inner: 2.0, outer: 3.0 }
        }
    }
}
