//! Radial reductions of `Δ_g - n` and of the conformal operator
//! `T u = (1 - n)(Δ_g u + R_g u/(n-1))` on rotationally symmetric metrics.
//!
//! Radial functions are discretized by Chebyshev collocation in `z = ln r` on
//! `[r_min, r_max]`, with `v_z = 0` at `r_min` and the Robin condition
//! `v_z + s v = 0` at `r_max` selecting the `r^{-s}` branch.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::linearized::trace_identity;
use super::potential::{AsymptoticTag, PotentialField, PotentialSource};
use crate::asymptotics::{fit_decay, DecayEstimate};
use crate::error::{Error, Result};
use crate::fit::log_ladder;
use crate::geometry::fields::ScalarField;
use crate::geometry::metric::{ConformalMetric, Metric};
use crate::geometry::potentials::StaticPotential;
use crate::jet::{norm_squared, Jet};
use crate::ode::integrator::{integrate_plain, Tolerances};
use crate::quadrature::angular_grid;
use crate::tensor::curvature_at;

pub const DEFAULT_NODES: usize = 96;
pub const DEFAULT_R_MAX: f64 = 400.0;
/// Inner radius without a horizon.
pub const DEFAULT_R_MIN: f64 = 0.1;
/// Inner radius as a multiple of the horizon radius.
pub const HORIZON_FACTOR: f64 = 1.5;
/// Corrections below this at every fit radius count as zero (rounding of the source).
pub const CORRECTION_ZERO: f64 = 1e-8;

/// Chebyshev–Lobatto grid on `[z_min, z_max]`; node 0 is `z_max`.
#[derive(Clone, Debug)]
struct ChebGrid {
    z: Vec<f64>,
    weights: Vec<f64>,
    d: DMatrix<f64>,
    d2: DMatrix<f64>,
}

impl ChebGrid {
    fn new(nodes: usize, z_min: f64, z_max: f64) -> Self {
        let n = nodes;
        let x: Vec<f64> = (0..=n).map(|j| (std::f64::consts::PI * j as f64 / n as f64).cos()).collect();
        let c: Vec<f64> = (0..=n)
            .map(|j| {
                let e = if j == 0 || j == n { 2.0 } else { 1.0 };
                if j % 2 == 0 {
                    e
                } else {
                    -e
                }
            })
            .collect();
        let mut d = DMatrix::zeros(n + 1, n + 1);
        for i in 0..=n {
            for j in 0..=n {
                if i != j {
                    d[(i, j)] = c[i] / c[j] / (x[i] - x[j]);
                }
            }
        }
        for i in 0..=n {
            let s: f64 = (0..=n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
            d[(i, i)] = -s;
        }
        let scale = 2.0 / (z_max - z_min);
        let d = d * scale;
        let d2 = &d * &d;
        ChebGrid {
            z: x.iter().map(|t| z_min + 0.5 * (t + 1.0) * (z_max - z_min)).collect(),
            weights: c.iter().map(|v| 1.0 / v).collect(),
            d,
            d2,
        }
    }

    fn radii(&self) -> Vec<f64> {
        self.z.iter().map(|z| z.exp()).collect()
    }
}

/// A radial function tabulated on a Chebyshev grid in `z = ln r`, with its
/// first two `z`-derivatives; evaluated by barycentric interpolation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialFunction {
    pub n: usize,
    pub z: Vec<f64>,
    pub weights: Vec<f64>,
    pub v: Vec<f64>,
    pub vz: Vec<f64>,
    pub vzz: Vec<f64>,
}

impl RadialFunction {
    fn from_nodes(n: usize, grid: &ChebGrid, v: Vec<f64>) -> Self {
        let vec = DVector::from_vec(v.clone());
        RadialFunction {
            n,
            z: grid.z.clone(),
            weights: grid.weights.clone(),
            vz: (&grid.d * &vec).iter().cloned().collect(),
            vzz: (&grid.d2 * &vec).iter().cloned().collect(),
            v,
        }
    }

    pub fn r_min(&self) -> f64 {
        self.z[self.z.len() - 1].exp()
    }

    pub fn r_max(&self) -> f64 {
        self.z[0].exp()
    }

    /// `(v, v_z, v_zz)` at `z`.
    pub fn at_z(&self, z: f64) -> (f64, f64, f64) {
        let mut num = [0.0; 3];
        let mut den = 0.0;
        for j in 0..self.z.len() {
            let dz = z - self.z[j];
            if dz == 0.0 {
                return (self.v[j], self.vz[j], self.vzz[j]);
            }
            let w = self.weights[j] / dz;
            num[0] += w * self.v[j];
            num[1] += w * self.vz[j];
            num[2] += w * self.vzz[j];
            den += w;
        }
        (num[0] / den, num[1] / den, num[2] / den)
    }

    /// `v(r)`, erroring outside the tabulated range.
    pub fn at_radius(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(self.at_z(r.ln()).0)
    }

    fn check(&self, r: f64) -> Result<()> {
        let (a, b) = (self.r_min(), self.r_max());
        if !(r >= a * (1.0 - 1e-12) && r <= b * (1.0 + 1e-12)) {
            return Err(Error::Domain(format!("radius {r} outside the radial grid [{a}, {b}]")));
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.v.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl ScalarField for RadialFunction {
    fn jet(&self, x: &[f64]) -> Result<Jet> {
        let rj = norm_squared(&Jet::coordinates(x)).sqrt();
        let r = rj.value();
        self.check(r)?;
        let (v, vz, vzz) = self.at_z(r.ln());
        Ok(rj.chain(v, vz / r, (vzz - vz) / (r * r)))
    }
}

/// `|∇r|²_g`, `Δ_g r` and `R_g` on the sphere `|x| = r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialCoefficients {
    pub a: f64,
    pub c: f64,
    pub scalar: f64,
}

fn radial_point(n: usize, r: f64) -> Vec<f64> {
    // off-axis, away from every coordinate hyperplane
    vec![r / (n as f64).sqrt(); n]
}

pub fn radial_coefficients(g: &dyn Metric, r: f64) -> Result<RadialCoefficients> {
    let x = radial_point(g.dim(), r);
    let pack = curvature_at(g, &x)?;
    let geo = &pack.geometry;
    let rj = geo.scalar(&norm_squared(&Jet::coordinates(&x)).sqrt());
    let grad = geo.gradient(&rj);
    let a = (0..geo.n).map(|i| rj.d(i) * grad[i]).sum();
    Ok(RadialCoefficients {
        a,
        c: geo.laplacian(&rj),
        scalar: pack.scalar,
    })
}

/// Inner radius of the radial domain for `g`.
pub fn default_r_min(g: &dyn Metric) -> f64 {
    g.horizon_radius().map_or(DEFAULT_R_MIN, |h| HORIZON_FACTOR * h)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialOptions {
    pub nodes: usize,
    /// Defaults to [`default_r_min`].
    pub r_min: Option<f64>,
    pub r_max: f64,
}

impl Default for RadialOptions {
    fn default() -> Self {
        RadialOptions {
            nodes: DEFAULT_NODES,
            r_min: None,
            r_max: DEFAULT_R_MAX,
        }
    }
}

impl RadialOptions {
    fn domain(&self, g: &dyn Metric) -> Result<(f64, f64)> {
        if self.nodes < 8 {
            return Err(Error::InvalidParameter("radial grid needs at least 8 nodes".into()));
        }
        let r_min = self.r_min.unwrap_or_else(|| default_r_min(g));
        if !(r_min > 0.0 && self.r_max > 2.0 * r_min) {
            return Err(Error::InvalidParameter(format!("bad radial domain [{r_min}, {}]", self.r_max)));
        }
        if let Some(h) = g.horizon_radius() {
            if r_min <= h {
                return Err(Error::Domain(format!("r_min {r_min} inside the horizon {h}")));
            }
        }
        Ok((r_min, self.r_max))
    }
}

fn require_symmetric(g: &dyn Metric) -> Result<()> {
    if !g.rotationally_symmetric() {
        return Err(Error::Precondition("radial solvers need a rotationally symmetric metric".into()));
    }
    Ok(())
}

/// Solves `α v_zz + β v_z + γ v = S` at the interior nodes with `v_z = 0` at
/// `z_min` and `v_z + s v = 0` at `z_max`.
fn collocate(grid: &ChebGrid, alpha: &[f64], beta: &[f64], gamma: &[f64], source: &[f64], s: f64) -> Result<Vec<f64>> {
    let m = grid.z.len();
    let mut a = DMatrix::zeros(m, m);
    let mut b = DVector::zeros(m);
    for i in 1..m - 1 {
        for j in 0..m {
            a[(i, j)] = alpha[i] * grid.d2[(i, j)] + beta[i] * grid.d[(i, j)];
        }
        a[(i, i)] += gamma[i];
        b[i] = source[i];
    }
    for j in 0..m {
        a[(0, j)] = grid.d[(0, j)];
        a[(m - 1, j)] = grid.d[(m - 1, j)];
    }
    a[(0, 0)] += s;
    a.lu()
        .solve(&b)
        .map(|v| v.iter().cloned().collect())
        .ok_or_else(|| Error::Solver("singular collocation matrix".into()))
}

/// `(Δ - n)` with `α = a/r²`, `β = c/r - a/r²`, `γ = -n` in `z`.
fn helmholtz_terms(n: usize, c: &RadialCoefficients, r: f64) -> (f64, f64, f64) {
    let al = c.a / (r * r);
    (al, c.c / r - al, -(n as f64))
}

/// `-(Δ_g - n)√(1+r²)` at radius `r`.
fn lapse_source(g: &dyn Metric, r: f64) -> Result<f64> {
    let n = g.dim();
    let x = radial_point(n, r);
    let pack = curvature_at(g, &x)?;
    let geo = &pack.geometry;
    let v0 = geo.scalar(&StaticPotential::lapse(n).eval(&Jet::coordinates(&x)));
    Ok(n as f64 * v0.value() - geo.laplacian(&v0))
}

/// The solution of the truncated problem by backward shooting in `z`,
/// sampled at the grid nodes.
fn shoot(g: &dyn Metric, grid: &ChebGrid, s: f64) -> Result<Vec<f64>> {
    let n = g.dim();
    let z_max = grid.z[0];
    let rhs = |homogeneous: bool| {
        move |z: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
            let r = z.exp();
            let c = radial_coefficients(g, r)?;
            let (al, be, ga) = helmholtz_terms(n, &c, r);
            let src = if homogeneous { 0.0 } else { lapse_source(g, r)? };
            dy[0] = y[1];
            dy[1] = (src - be * y[1] - ga * y[0]) / al;
            Ok(())
        }
    };
    let tol = Tolerances::default();
    let times = &grid.z[1..];
    let h = integrate_plain(rhs(true), z_max, &[1.0, -s], times, &tol)?;
    let p = integrate_plain(rhs(false), z_max, &[0.0, 0.0], times, &tol)?;
    let last = times.len() - 1;
    if h[last][1] == 0.0 {
        return Err(Error::Solver("homogeneous shooting solution has a critical point at r_min".into()));
    }
    let k = -p[last][1] / h[last][1];
    let mut out = vec![k];
    out.extend(p.iter().zip(&h).map(|(a, b)| a[0] + k * b[0]));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenfunctionReport {
    pub potential: PotentialField,
    pub r_min: f64,
    pub r_max: f64,
    /// Robin exponent `s = q - 1`.
    pub far_field_rate: f64,
    /// `max |Δf_0 - n f_0|` over the check radii.
    pub residual_max: f64,
    pub residual_radii: (f64, f64),
    /// Largest nodal difference between the collocation and shooting solutions.
    pub shooting_difference: f64,
    /// Decay of `f_0 - √(1+r²)`.
    pub correction_decay: DecayEstimate,
    /// The fitted decay is below 0.5.
    pub slow_decay: bool,
    pub min_value: f64,
}

pub fn radial_eigenfunction(g: &dyn Metric, which: usize, opts: &RadialOptions) -> Result<EigenfunctionReport> {
    if which != 0 {
        return Err(Error::Unsupported("only the radial eigenfunction f_0 is available".into()));
    }
    require_symmetric(g)?;
    let n = g.dim();
    let (r_min, r_max) = opts.domain(g)?;
    let s = g.decay_hint().unwrap_or(n as f64) - 1.0;
    let grid = ChebGrid::new(opts.nodes, r_min.ln(), r_max.ln());
    let radii = grid.radii();
    let mut alpha = Vec::with_capacity(radii.len());
    let mut beta = Vec::with_capacity(radii.len());
    let mut gamma = Vec::with_capacity(radii.len());
    let mut source = Vec::with_capacity(radii.len());
    for &r in &radii {
        let c = radial_coefficients(g, r)?;
        let (al, be, ga) = helmholtz_terms(n, &c, r);
        alpha.push(al);
        beta.push(be);
        gamma.push(ga);
        source.push(lapse_source(g, r)?);
    }
    let v = collocate(&grid, &alpha, &beta, &gamma, &source, s)?;
    let shot = shoot(g, &grid, s)?;
    let shooting_difference = v.iter().zip(&shot).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let correction = RadialFunction::from_nodes(n, &grid, v);

    let min_value = radii
        .iter()
        .zip(&correction.v)
        .fold(f64::INFINITY, |m, (r, v)| m.min((1.0 + r * r).sqrt() + v));
    let decay_radii = log_ladder(10.0, r_max.min(200.0), 8);
    let samples: Vec<(f64, f64)> = decay_radii
        .iter()
        .map(|&r| correction.at_radius(r).map(|v| (r, v.abs())))
        .collect::<Result<_>>()?;
    let correction_decay = fit_decay(samples, CORRECTION_ZERO)?;
    let slow_decay = correction_decay.exponent().is_some_and(|q| q < 0.5);

    let potential = PotentialField {
        source: PotentialSource::Corrected {
            base: StaticPotential::lapse(n),
            correction,
        },
        tag: AsymptoticTag::LinearGrowth {
            a0: 1.0,
            a: vec![0.0; n],
        },
    };
    let residual_radii = (5.0f64.max(r_min), 150.0f64.min(r_max));
    let mut residual_max = 0.0f64;
    let dirs = angular_grid(n, 3);
    for r in log_ladder(residual_radii.0, residual_radii.1, 16) {
        for w in &dirs {
            let x: Vec<f64> = w.iter().map(|c| c * r).collect();
            let pack = curvature_at(g, &x)?;
            let f = pack.geometry.scalar(&potential.jet(&x)?);
            residual_max = residual_max.max((pack.geometry.laplacian(&f) - n as f64 * f.value()).abs());
        }
    }
    Ok(EigenfunctionReport {
        potential,
        r_min,
        r_max,
        far_field_rate: s,
        residual_max,
        residual_radii,
        shooting_difference,
        correction_decay,
        slow_decay,
        min_value,
    })
}

/// `φ = A (1 + r²)^{-s/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialTarget {
    pub amplitude: f64,
    pub decay: f64,
}

impl ScalarField for RadialTarget {
    fn jet(&self, x: &[f64]) -> Result<Jet> {
        let w = norm_squared(&Jet::coordinates(x)) + 1.0;
        Ok(w.powf(-0.5 * self.decay) * self.amplitude)
    }
}

impl RadialTarget {
    pub fn at(&self, r: f64) -> f64 {
        self.amplitude * (1.0 + r * r).powf(-0.5 * self.decay)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformOptions {
    pub radial: RadialOptions,
    pub newton_steps: usize,
    /// Radii for the three-dimensional residual check.
    pub check_radii: (f64, f64),
}

impl Default for DeformOptions {
    fn default() -> Self {
        DeformOptions {
            radial: RadialOptions::default(),
            newton_steps: 3,
            check_radii: (0.5, 100.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonStep {
    /// `max |R((1+u_k)g) - R_g - φ|` over interior nodes, after the step.
    pub residual: f64,
    /// Previous residual over this one.
    pub contraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformReport {
    pub target: RadialTarget,
    pub target_decay: DecayEstimate,
    /// Solution of the linear problem `T u = φ`.
    pub u: RadialFunction,
    /// `max |L_g(u g) - φ|` over the check points.
    pub linear_residual: f64,
    /// Largest difference to the solution on the halved grid, at the check radii.
    pub halved_grid_difference: f64,
    pub u_decay: DecayEstimate,
    pub initial_residual: f64,
    pub newton: Vec<NewtonStep>,
    /// Conformal factor after the Newton iterations.
    pub newton_u: RadialFunction,
}

/// `T_g` in `z`: `(1-n)(α v_zz + β v_z) - R v`.
fn conformal_terms(n: usize, c: &RadialCoefficients, r: f64) -> (f64, f64, f64) {
    let k = 1.0 - n as f64;
    let al = c.a / (r * r);
    (k * al, k * (c.c / r - al), -c.scalar)
}

fn solve_conformal(
    g: &dyn Metric,
    grid: &ChebGrid,
    rhs: &[f64],
    s: f64,
) -> Result<Vec<f64>> {
    let n = g.dim();
    let (mut al, mut be, mut ga) = (vec![], vec![], vec![]);
    for r in grid.radii() {
        let c = radial_coefficients(g, r)?;
        let t = conformal_terms(n, &c, r);
        al.push(t.0);
        be.push(t.1);
        ga.push(t.2);
    }
    collocate(grid, &al, &be, &ga, rhs, s)
}

/// Solves `T_g u = φ` radially and Newton-iterates `R((1+u)g) = R_g + φ`.
pub fn conformal_deform_radial(g: &dyn Metric, target: &RadialTarget, opts: &DeformOptions) -> Result<DeformReport> {
    require_symmetric(g)?;
    let n = g.dim();
    let (r_min, r_max) = opts.radial.domain(g)?;
    let fit_radii = log_ladder(20.0, 200.0, 8);
    let target_decay = fit_decay(fit_radii.iter().map(|&r| (r, target.at(r).abs())).collect(), 0.0)?;
    let s = match target_decay.exponent() {
        None => target.decay,
        Some(s) => s,
    };
    if !(s > -1.0 && s < n as f64) {
        return Err(Error::InvalidParameter(format!("target decay {s} outside (-1, {n})")));
    }
    let grid = ChebGrid::new(opts.radial.nodes, r_min.ln(), r_max.ln());
    let radii = grid.radii();
    let phi: Vec<f64> = radii.iter().map(|&r| target.at(r)).collect();
    let u = RadialFunction::from_nodes(n, &grid, solve_conformal(g, &grid, &phi, s)?);

    let half = ChebGrid::new(opts.radial.nodes / 2, r_min.ln(), r_max.ln());
    let phi_half: Vec<f64> = half.radii().iter().map(|&r| target.at(r)).collect();
    let u_half = RadialFunction::from_nodes(n, &half, solve_conformal(g, &half, &phi_half, s)?);

    let (c_lo, c_hi) = (opts.check_radii.0.max(r_min), opts.check_radii.1.min(r_max));
    let dirs = angular_grid(n, 3);
    let mut linear_residual = 0.0f64;
    let mut halved_grid_difference = 0.0f64;
    for r in log_ladder(c_lo, c_hi, 16) {
        halved_grid_difference = halved_grid_difference.max((u.at_radius(r)? - u_half.at_radius(r)?).abs());
        for w in &dirs {
            let x: Vec<f64> = w.iter().map(|c| c * r).collect();
            let (lhs, _) = trace_identity(g, &u, &x)?;
            linear_residual = linear_residual.max((lhs - target.at(r)).abs());
        }
    }
    let decay_samples: Vec<(f64, f64)> = fit_radii
        .iter()
        .filter(|&&r| r <= r_max)
        .map(|&r| u.at_radius(r).map(|v| (r, v.abs())))
        .collect::<Result<_>>()?;
    let u_decay = fit_decay(decay_samples, 1e-14)?;

    // Newton on the nodal values, starting from u_0 = 0
    let scalar_g: Vec<f64> = radii
        .iter()
        .map(|&r| radial_coefficients(g, r).map(|c| c.scalar))
        .collect::<Result<_>>()?;
    let interior = 1..radii.len() - 1;
    let initial_residual = interior.clone().fold(0.0f64, |m, i| m.max(phi[i].abs()));
    let mut uk = RadialFunction::from_nodes(n, &grid, vec![0.0; radii.len()]);
    let mut newton = Vec::with_capacity(opts.newton_steps);
    let mut prev = initial_residual;
    let mut rhs: Vec<f64> = phi.clone();
    for _ in 0..opts.newton_steps {
        let gk = ConformalMetric { base: g, u: &uk };
        let (mut al, mut be, mut ga) = (vec![], vec![], vec![]);
        for &r in &radii {
            let c = radial_coefficients(&gk, r)?;
            let t = conformal_terms(n, &c, r);
            al.push(t.0);
            be.push(t.1);
            ga.push(t.2);
        }
        let w = collocate(&grid, &al, &be, &ga, &rhs, s)?;
        let next: Vec<f64> = uk.v.iter().zip(&w).map(|(u, w)| u + w * (1.0 + u)).collect();
        uk = RadialFunction::from_nodes(n, &grid, next);
        let gk = ConformalMetric { base: g, u: &uk };
        let mut res = 0.0f64;
        for i in 0..radii.len() {
            let rk = radial_coefficients(&gk, radii[i])?.scalar;
            rhs[i] = scalar_g[i] + phi[i] - rk;
            if interior.contains(&i) {
                res = res.max(rhs[i].abs());
            }
        }
        newton.push(NewtonStep {
            residual: res,
            contraction: if res > 0.0 { prev / res } else { f64::INFINITY },
        });
        prev = res;
    }
    Ok(DeformReport {
        target: *target,
        target_decay,
        u,
        linear_residual,
        halved_grid_difference,
        u_decay,
        initial_residual,
        newton,
        newton_u: uk,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::metric::{hyperbolic_metric, schwarzschild_ads};

    #[test]
    fn chebyshev_derivatives() {
        let grid = ChebGrid::new(40, -1.0, 2.0);
        let f = RadialFunction::from_nodes(3, &grid, grid.z.iter().map(|z| (0.7 * z).sin()).collect());
        for z in [-0.9, 0.3, 1.7] {
            let (v, vz, vzz) = f.at_z(z);
            assert!((v - (0.7 * z).sin()).abs() < 1e-13);
            assert!((vz - 0.7 * (0.7 * z).cos()).abs() < 1e-11);
            assert!((vzz + 0.49 * (0.7 * z).sin()).abs() < 1e-9);
        }
    }

    #[test]
    fn hyperbolic_coefficients() {
        let b = hyperbolic_metric(3).unwrap();
        let r: f64 = 2.5;
        let c = radial_coefficients(&b, r).unwrap();
        assert!((c.a - (1.0 + r * r)).abs() < 1e-12);
        // Δ_b r = (n-1)(1+r²)/r + r
        assert!((c.c - (2.0 * (1.0 + r * r) / r + r)).abs() < 1e-11);
        assert!((c.scalar + 6.0).abs() < 1e-10);
    }

    #[test]
    fn eigenfunction_on_hyperbolic_space_is_the_lapse() {
        let b = hyperbolic_metric(3).unwrap();
        let rep = radial_eigenfunction(&b, 0, &RadialOptions::default()).unwrap();
        match &rep.potential.source {
            PotentialSource::Corrected { correction, .. } => assert!(correction.max_abs() < 1e-8, "{}", correction.max_abs()),
            _ => unreachable!(),
        }
        assert!(rep.correction_decay.exponent().is_none());
    }

    #[test]
    fn eigenfunction_schwarzschild() {
        let g = schwarzschild_ads(3, 0.5).unwrap();
        let rep = radial_eigenfunction(&g, 0, &RadialOptions::default()).unwrap();
        assert!(rep.residual_max < 1e-7, "{}", rep.residual_max);
        assert!(rep.shooting_difference < 1e-6, "{}", rep.shooting_difference);
        assert!(rep.correction_decay.exponent().unwrap() >= 1.8, "{:?}", rep.correction_decay.exponent());
        assert!(rep.min_value > 0.0);
        assert!(radial_eigenfunction(&g, 1, &RadialOptions::default()).is_err());
    }

    #[test]
    fn deform_hyperbolic() {
        let b = hyperbolic_metric(3).unwrap();
        let target = RadialTarget {
            amplitude: 0.05,
            decay: 2.0,
        };
        let rep = conformal_deform_radial(&b, &target, &DeformOptions::default()).unwrap();
        assert!(rep.linear_residual < 1e-6, "{}", rep.linear_residual);
        for s in &rep.newton {
            assert!(s.contraction >= 10.0, "{:?}", rep.newton);
        }
        assert!((rep.u_decay.exponent().unwrap() - 2.0).abs() < 0.2, "{:?}", rep.u_decay.exponent());
    }

    #[test]
    fn deform_rejects_out_of_range_decay() {
        let b = hyperbolic_metric(3).unwrap();
        let t = RadialTarget {
            amplitude: 0.1,
            decay: 3.5,
        };
        assert!(conformal_deform_radial(&b, &t, &DeformOptions::default()).is_err());
        let zero = RadialTarget {
            amplitude: 0.0,
            decay: 2.0,
        };
        let rep = conformal_deform_radial(&b, &zero, &DeformOptions::default()).unwrap();
        assert_eq!(rep.u.max_abs(), 0.0);
    }
}
