//! Mass flux `H_g(V)`, the mass vector and the Ricci-flux identity.
//!
//! For `h = g - b`, the flux through `S_r` is
//!
//! ```text
//! ∫_{S_r} [V (div̊h - d tr̊h)(ν_0) + tr̊h dV(ν_0) - h(∇̊V, ν_0)] dσ_b
//! ```
//!
//! with `ν_0 = √(1+r²) ∂_r` and `dσ_b = r^{n-1} dω`. The limit as `r → ∞`
//! is estimated from a radius ladder by fitting `I_∞ + c r^{-β}`.
//!
//! With this normalization, Schwarzschild–AdS with parameter `m` has
//! `p_0 = 2(n-1)|S^{n-1}| m`, i.e. `16π m` for `n = 3`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{extrapolate_limit, LimitFit};
use crate::geometry::fields::ScalarField;
use crate::geometry::metric::{hyperbolic_jet, Metric};
use crate::geometry::potentials::{static_potential_basis, StaticPotential};
use crate::jet::Jet;
use crate::quadrature::{integrate_sphere, sphere_area, SphereQuadrature};
use crate::tensor::{curvature_at, LocalGeometry};

/// Which objects enter the flux integrand.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxBackground {
    /// Normal, area element, divergence, trace and gradient of `b`.
    #[default]
    Hyperbolic,
    /// The same objects taken with respect to `g`.
    Physical,
}

fn radius_of(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Flux integrand (including the area factor) at a chart point `x`.
pub fn flux_density(
    g: &dyn Metric,
    v: &dyn ScalarField,
    x: &[f64],
    background: FluxBackground,
) -> Result<f64> {
    let n = x.len();
    let r = radius_of(x);
    let geo = match background {
        FluxBackground::Hyperbolic => LocalGeometry::new(x, &hyperbolic_jet(x))?,
        FluxBackground::Physical => LocalGeometry::at(g, x)?,
    };
    let h = geo.tensor(&g.deviation(x)?);
    let vj = geo.scalar(&v.jet(x)?);
    let dh = geo.covariant_derivative(&h);
    let div = geo.divergence(&h);
    let idx = |k: usize, i: usize, j: usize| (k * n + i) * n + j;
    let dtr: Vec<f64> = (0..n)
        .map(|k| {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += geo.ginv[i * n + j] * dh[idx(k, i, j)];
                }
            }
            acc
        })
        .collect();
    let mut tr = 0.0;
    for i in 0..n {
        for j in 0..n {
            tr += geo.ginv[i * n + j] * h.value(i, j);
        }
    }
    let grad = geo.gradient(&vj);
    // unit normal of S_r and area element
    let dr: Vec<f64> = x.iter().map(|xi| xi / r).collect();
    let dr_local = geo.covector_from_chart(&dr);
    let dr_up: Vec<f64> = (0..n)
        .map(|a| (0..n).map(|b| geo.ginv[a * n + b] * dr_local[b]).sum())
        .collect();
    let dr_norm = dr_up.iter().zip(&dr_local).map(|(a, b)| a * b).sum::<f64>().sqrt();
    let nu: Vec<f64> = dr_up.iter().map(|c| c / dr_norm).collect();
    let area = match background {
        FluxBackground::Hyperbolic => r.powi(n as i32 - 1),
        FluxBackground::Physical => geo.sqrt_det * dr_norm * r.powi(n as i32 - 1),
    };
    let mut val = 0.0;
    for a in 0..n {
        val += (vj.value() * (div[a] - dtr[a]) + tr * vj.d(a)) * nu[a];
        for b in 0..n {
            val -= h.value(a, b) * grad[a] * nu[b];
        }
    }
    Ok(val * area)
}

/// `(Ric_g + (n-1)g)(∇̊V, ν_0) r^{n-1}` at a chart point.
pub fn ricci_flux_density(g: &dyn Metric, v: &dyn ScalarField, x: &[f64]) -> Result<f64> {
    let n = x.len();
    let r = radius_of(x);
    let c = curvature_at(g, x)?;
    let s = c.geometry.lower_to_chart(&c.ricci_excess());
    let dv = v.jet(x)?;
    // b^{-1} = δ + x xᵀ in chart components
    let xdv: f64 = (0..n).map(|i| x[i] * dv.d(i)).sum();
    let grad: Vec<f64> = (0..n).map(|i| dv.d(i) + x[i] * xdv).collect();
    let lapse = (1.0 + r * r).sqrt();
    let nu: Vec<f64> = x.iter().map(|xi| lapse * xi / r).collect();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += s[(i, j)] * grad[i] * nu[j];
        }
    }
    Ok(acc * r.powi(n as i32 - 1))
}

fn integrate_on_sphere<F>(n: usize, r: f64, quad: &SphereQuadrature, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if n != 3 {
        return Err(Error::Unsupported(format!(
            "full angular quadrature is implemented for n = 3 only (n = {n})"
        )));
    }
    integrate_sphere(quad, |w| {
        let x: Vec<f64> = w.iter().map(|c| c * r).collect();
        f(&x)
    })
}

/// For `n >= 4`: rotationally symmetric metric, `V = c_0 V_0 + c·x`. The
/// `x_i` parts vanish by parity and the `V_0` part is constant on `S_r`.
fn reduced_sphere_integral<F>(g: &dyn Metric, v: &StaticPotential, r: f64, f: F) -> Result<f64>
where
    F: Fn(&StaticPotential, &[f64]) -> Result<f64>,
{
    let n = g.dim();
    if !g.rotationally_symmetric() {
        return Err(Error::Unsupported(format!(
            "flux integrals for n = {n} need a rotationally symmetric metric"
        )));
    }
    if v.c0 == 0.0 {
        return Ok(0.0);
    }
    let w = 1.0 / (n as f64).sqrt();
    let x = vec![w * r; n];
    Ok(v.c0 * f(&StaticPotential::lapse(n), &x)? * sphere_area(n - 1))
}

fn check_radius(g: &dyn Metric, r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius {r} must be positive")));
    }
    if let Some(rh) = g.horizon_radius() {
        if r <= rh {
            return Err(Error::Domain(format!("radius {r} inside horizon {rh}")));
        }
    }
    Ok(())
}

/// Flux of a static potential of `b` through the coordinate sphere `|x| = r`.
pub fn mass_flux_integral(
    g: &dyn Metric,
    v: &StaticPotential,
    r: f64,
    quad: &SphereQuadrature,
    background: FluxBackground,
) -> Result<f64> {
    quad.validate()?;
    check_radius(g, r)?;
    if g.dim() == 3 {
        integrate_on_sphere(3, r, quad, |x| flux_density(g, v, x, background))
    } else {
        reduced_sphere_integral(g, v, r, |p, x| flux_density(g, p, x, background))
    }
}

/// Flux of an arbitrary potential (`n = 3` only), e.g. a static potential
/// modified in a compact set.
pub fn mass_flux_integral_field(
    g: &dyn Metric,
    v: &dyn ScalarField,
    r: f64,
    quad: &SphereQuadrature,
    background: FluxBackground,
) -> Result<f64> {
    quad.validate()?;
    check_radius(g, r)?;
    integrate_on_sphere(g.dim(), r, quad, |x| flux_density(g, v, x, background))
}

pub fn ricci_flux(g: &dyn Metric, v: &StaticPotential, r: f64, quad: &SphereQuadrature) -> Result<f64> {
    quad.validate()?;
    check_radius(g, r)?;
    if g.dim() == 3 {
        integrate_on_sphere(3, r, quad, |x| ricci_flux_density(g, v, x))
    } else {
        reduced_sphere_integral(g, v, r, |p, x| ricci_flux_density(g, p, x))
    }
}

/// Samples of a flux integral over a ladder and their extrapolated limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluxReport {
    pub integrand_label: String,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub fitted_limit: f64,
    pub fit_exponent: f64,
    pub fit_residual: f64,
    pub extrapolated: bool,
}

impl FluxReport {
    pub fn from_values(label: String, radii: &[f64], values: Vec<f64>, beta0: f64, n: usize) -> Self {
        let fit: LimitFit = extrapolate_limit(radii, &values, beta0, (0.5, 2.0 * n as f64));
        FluxReport {
            integrand_label: label,
            radii: radii.to_vec(),
            values,
            fitted_limit: fit.limit,
            fit_exponent: fit.beta,
            fit_residual: fit.residual,
            extrapolated: fit.extrapolated,
        }
    }
}

/// Initial decay exponent of the flux corrections, `2q - n`, from the
/// metric's nominal decay (default `q = n`).
pub fn initial_beta(g: &dyn Metric) -> f64 {
    let n = g.dim() as f64;
    let q = g.decay_hint().unwrap_or(n);
    (2.0 * q - n).clamp(0.5, 2.0 * n)
}

pub fn check_ladder(radii: &[f64]) -> Result<()> {
    crate::asymptotics::check_ladder(radii)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluxOptions {
    pub quadrature: SphereQuadrature,
    pub background: FluxBackground,
}

impl Default for FluxOptions {
    fn default() -> Self {
        FluxOptions {
            quadrature: SphereQuadrature::default(),
            background: FluxBackground::Hyperbolic,
        }
    }
}

pub fn flux_report(g: &dyn Metric, v: &StaticPotential, radii: &[f64], opts: &FluxOptions) -> Result<FluxReport> {
    check_ladder(radii)?;
    let values = radii
        .iter()
        .map(|&r| mass_flux_integral(g, v, r, &opts.quadrature, opts.background))
        .collect::<Result<Vec<_>>>()?;
    Ok(FluxReport::from_values(v.label(), radii, values, initial_beta(g), g.dim()))
}

/// `(p_0, p_1, …, p_n)` with `p_0 = H_g(V_0)`, `p_i = H_g(x_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassVector {
    pub p: Vec<f64>,
    pub defect: f64,
    pub reports: Vec<FluxReport>,
}

impl MassVector {
    pub fn from_reports(reports: Vec<FluxReport>) -> Self {
        let p: Vec<f64> = reports.iter().map(|r| r.fitted_limit).collect();
        let defect = mass_defect(&p);
        MassVector { p, defect, reports }
    }
}

/// `p_0 = 2(n-1)|S^{n-1}| m` of Schwarzschild–AdS in this normalization.
pub fn schwarzschild_mass(n: usize, m: f64) -> f64 {
    2.0 * (n as f64 - 1.0) * sphere_area(n - 1) * m
}

/// `p_0 - |(p_1, …, p_n)|`.
pub fn mass_defect(p: &[f64]) -> f64 {
    p[0] - p[1..].iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn mass_vector(g: &dyn Metric, radii: &[f64], opts: &FluxOptions) -> Result<MassVector> {
    let reports = static_potential_basis(g.dim())
        .iter()
        .map(|v| flux_report(g, v, radii, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(MassVector::from_reports(reports))
}

/// Both sides of `lim ∫ (Ric_g + (n-1)g)(∇̊V, ν_0) dσ_b = -(n-2)/2 H_g(V)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RicciFluxReport {
    pub ricci: FluxReport,
    pub mass: FluxReport,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub relative_gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Agreement holds when `gap <= tolerance · max(|lhs|, |rhs|) + absolute`.
pub fn prop27_check(
    g: &dyn Metric,
    v: &StaticPotential,
    radii: &[f64],
    opts: &FluxOptions,
    tolerance: f64,
    absolute: f64,
) -> Result<RicciFluxReport> {
    check_ladder(radii)?;
    let n = g.dim();
    let mass = flux_report(g, v, radii, opts)?;
    let values = radii
        .iter()
        .map(|&r| ricci_flux(g, v, r, &opts.quadrature))
        .collect::<Result<Vec<_>>>()?;
    let ricci = FluxReport::from_values(format!("ricci:{}", v.label()), radii, values, initial_beta(g), n);
    let lhs = ricci.fitted_limit;
    let rhs = -0.5 * (n as f64 - 2.0) * mass.fitted_limit;
    let gap = (lhs - rhs).abs();
    let scale = lhs.abs().max(rhs.abs());
    let relative_gap = if scale > 0.0 { gap / scale } else { 0.0 };
    Ok(RicciFluxReport {
        pass: gap <= tolerance * scale + absolute,
        ricci,
        mass,
        lhs,
        rhs,
        gap,
        relative_gap,
        tolerance,
    })
}

/// A static potential altered by a compactly supported bump, for checking
/// that the limit does not see compact modifications.
pub struct ModifiedPotential<'a> {
    pub base: &'a StaticPotential,
    pub bump: &'a dyn ScalarField,
}

impl ScalarField for ModifiedPotential<'_> {
    fn jet(&self, x: &[f64]) -> Result<Jet> {
        Ok(self.base.eval(&Jet::coordinates(x)) + self.bump.jet(x)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::metric::{hyperbolic_metric, schwarzschild_ads};
    use std::f64::consts::PI;

    fn small_quad() -> SphereQuadrature {
        SphereQuadrature::new(12, 24).unwrap()
    }

    #[test]
    fn background_flux_vanishes() {
        let b = hyperbolic_metric(3).unwrap();
        for v in static_potential_basis(3) {
            let i = mass_flux_integral(&b, &v, 7.0, &small_quad(), FluxBackground::Hyperbolic).unwrap();
            assert_eq!(i, 0.0);
        }
    }

    #[test]
    fn schwarzschild_flux_matches_closed_form() {
        // I(r) = 16πm r(1+r²)/(r³+r-2m) is exact for this family
        let m = 0.5;
        let g = schwarzschild_ads(3, m).unwrap();
        for r in [3.0, 50.0] {
            let i = mass_flux_integral(&g, &StaticPotential::lapse(3), r, &small_quad(), FluxBackground::Hyperbolic)
                .unwrap();
            let exact = 16.0 * PI * m * r * (1.0 + r * r) / (r * r * r + r - 2.0 * m);
            assert!((i - exact).abs() < 1e-10 * exact, "{i} {exact}");
        }
        let odd = mass_flux_integral(&g, &StaticPotential::coordinate(3, 0), 50.0, &small_quad(), FluxBackground::Hyperbolic)
            .unwrap();
        assert!(odd.abs() < 1e-10);
    }

    #[test]
    fn ricci_flux_density_closed_form() {
        // -2m(1+r²)/(r(r³+r-2m)) times r² at each point of S_r
        let m = 0.5;
        let g = schwarzschild_ads(3, m).unwrap();
        let r: f64 = 20.0;
        let x = [r * 0.36, r * 0.48, r * 0.8];
        let d = ricci_flux_density(&g, &StaticPotential::lapse(3), &x).unwrap();
        let exact = -2.0 * m * (1.0 + r * r) / (r * (r * r * r + r - 2.0 * m)) * r * r;
        assert!((d - exact).abs() < 1e-9 * exact.abs(), "{d} {exact}");
    }

    #[test]
    fn reduced_dimension_four() {
        let m = 0.3;
        let g = schwarzschild_ads(4, m).unwrap();
        let r: f64 = 30.0;
        let i = mass_flux_integral(&g, &StaticPotential::lapse(4), r, &small_quad(), FluxBackground::Hyperbolic).unwrap();
        // 6m(1+r²)/(r(r⁴+r²-2m)) · r³ · 2π²
        let exact = 6.0 * m * (1.0 + r * r) / (r * (r.powi(4) + r * r - 2.0 * m)) * r.powi(3) * 2.0 * PI * PI;
        assert!((i - exact).abs() < 1e-9 * exact);
        let odd = mass_flux_integral(&g, &StaticPotential::coordinate(4, 2), r, &small_quad(), FluxBackground::Hyperbolic)
            .unwrap();
        assert_eq!(odd, 0.0);
    }

    #[test]
    fn rejects_coarse_quadrature() {
        let b = hyperbolic_metric(3).unwrap();
        let q = SphereQuadrature {
            polar: 3,
            azimuthal: 8,
        };
        assert!(mass_flux_integral(&b, &StaticPotential::lapse(3), 5.0, &q, FluxBackground::Hyperbolic).is_err());
    }
}
