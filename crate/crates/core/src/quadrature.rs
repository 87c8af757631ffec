//! Gauss–Legendre rules, product rules on spheres and annuli, and a
//! deterministic pairwise reduction.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::chart::unit_direction;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let m = (order + 1) / 2;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 0..order {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = order as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[order - 1 - i] = z;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    if order % 2 == 1 {
        nodes[order / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(order: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let (h, c) = (0.5 * (b - a), 0.5 * (b + a));
    (
        x.iter().map(|t| c + h * t).collect(),
        w.iter().map(|v| v * h).collect(),
    )
}

/// Sum in a fixed binary-tree order, independent of thread scheduling.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        2..=8 => v.iter().sum(),
        len => {
            let (a, b) = v.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Angular resolution of the product rule on `S²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereQuadrature {
    /// Gauss–Legendre nodes in `cos θ_1`.
    pub polar: usize,
    /// Trapezoid nodes in `θ_2`.
    pub azimuthal: usize,
}

impl Default for SphereQuadrature {
    fn default() -> Self {
        SphereQuadrature {
            polar: 48,
            azimuthal: 96,
        }
    }
}

impl SphereQuadrature {
    pub fn new(polar: usize, azimuthal: usize) -> Result<Self> {
        let q = SphereQuadrature { polar, azimuthal };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.polar < 4 || self.azimuthal < 4 {
            return Err(Error::Quadrature(format!(
                "need at least 4 nodes per angle, got {}x{}",
                self.polar, self.azimuthal
            )));
        }
        Ok(())
    }

    /// Unit directions and weights of the product rule on `S²`; weights sum to `4π`.
    /// Gauss nodes never sit on the poles.
    pub fn nodes(&self) -> Vec<(Vec<f64>, f64)> {
        let (mu, w) = gauss_legendre(self.polar);
        let dphi = 2.0 * PI / self.azimuthal as f64;
        let mut out = Vec::with_capacity(self.polar * self.azimuthal);
        for (m, wm) in mu.iter().zip(&w) {
            let theta = m.acos();
            for k in 0..self.azimuthal {
                let phi = (k as f64 + 0.5) * dphi;
                out.push((unit_direction(&[theta, phi]), wm * dphi));
            }
        }
        out
    }

    pub fn doubled(&self) -> Self {
        SphereQuadrature {
            polar: 2 * self.polar,
            azimuthal: 2 * self.azimuthal,
        }
    }
}

/// `|S^{k}|`, the area of the unit `k`-sphere.
pub fn sphere_area(k: usize) -> f64 {
    // |S^0| = 2, |S^1| = 2π, |S^k| = 2π/(k-1) |S^{k-2}|
    let mut a = if k % 2 == 0 { 2.0 } else { 2.0 * PI };
    let mut j = if k % 2 == 0 { 0 } else { 1 };
    while j < k {
        j += 2;
        a *= 2.0 * PI / (j as f64 - 1.0);
    }
    a
}

/// Integrates `f(ω)` over `S²` with deterministic reduction.
pub fn integrate_sphere<F>(quad: &SphereQuadrature, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    quad.validate()?;
    let nodes = quad.nodes();
    let vals: Vec<f64> = nodes
        .par_iter()
        .map(|(w, wt)| f(w).map(|v| v * wt))
        .collect::<Result<_>>()?;
    Ok(pairwise_sum(&vals))
}

/// Off-pole angular sample grid with `per_angle` points per angle on `S^{n-1}`.
pub fn angular_grid(n: usize, per_angle: usize) -> Vec<Vec<f64>> {
    let k = n - 1;
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let angles: Vec<f64> = idx
            .iter()
            .enumerate()
            .map(|(j, &i)| {
                let span = if j + 1 < k { PI } else { 2.0 * PI };
                (i as f64 + 0.5) * span / per_angle as f64
            })
            .collect();
        out.push(unit_direction(&angles));
        let mut j = 0;
        loop {
            if j == k {
                return out;
            }
            idx[j] += 1;
            if idx[j] < per_angle {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Tensor-product rule on the coordinate annulus `inner <= |x| <= outer` in ℝ³:
/// Gauss–Legendre in `r` times the sphere rule. Returns Cartesian nodes and
/// Euclidean volume weights `r² dr dω`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnulusQuadrature {
    pub inner: f64,
    pub outer: f64,
    pub radial: usize,
    pub sphere: SphereQuadrature,
}

impl AnnulusQuadrature {
    pub fn new(inner: f64, outer: f64, radial: usize, sphere: SphereQuadrature) -> Result<Self> {
        if !(inner >= 0.0 && outer > inner) {
            return Err(Error::Quadrature(format!("bad annulus [{inner}, {outer}]")));
        }
        if radial < 4 {
            return Err(Error::Quadrature("need at least 4 radial nodes".into()));
        }
        sphere.validate()?;
        Ok(AnnulusQuadrature {
            inner,
            outer,
            radial,
            sphere,
        })
    }

    pub fn nodes(&self) -> Vec<(Vec<f64>, f64)> {
        let (rs, wr) = gauss_legendre_on(self.radial, self.inner, self.outer);
        let sph = self.sphere.nodes();
        let mut out = Vec::with_capacity(rs.len() * sph.len());
        for (r, w) in rs.iter().zip(&wr) {
            for (om, ws) in &sph {
                out.push((om.iter().map(|v| v * r).collect(), w * ws * r * r));
            }
        }
        out
    }

    /// `∫ f dx` (Euclidean); callers multiply by the density themselves.
    pub fn integrate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        let nodes = self.nodes();
        let vals: Vec<f64> = nodes
            .par_iter()
            .map(|(x, w)| f(x).map(|v| v * w))
            .collect::<Result<_>>()?;
        Ok(pairwise_sum(&vals))
    }

    /// Several integrands sharing one pass over the nodes.
    pub fn integrate_many<F>(&self, k: usize, f: F) -> Result<Vec<f64>>
    where
        F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
    {
        let nodes = self.nodes();
        let vals: Vec<Vec<f64>> = nodes
            .par_iter()
            .map(|(x, w)| f(x).map(|v| v.into_iter().map(|e| e * w).collect()))
            .collect::<Result<_>>()?;
        Ok((0..k)
            .map(|c| pairwise_sum(&vals.iter().map(|v| v[c]).collect::<Vec<_>>()))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let (x, w) = gauss_legendre(7);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // exact up to degree 13
        let i12: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((i12 - 2.0 / 13.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn sphere_rule_moments() {
        let q = SphereQuadrature::default();
        let area = integrate_sphere(&q, |_| Ok(1.0)).unwrap();
        assert!((area - 4.0 * PI).abs() < 1e-12);
        let z2 = integrate_sphere(&q, |w| Ok(w[0] * w[0])).unwrap();
        assert!((z2 - 4.0 * PI / 3.0).abs() < 1e-12);
        let odd = integrate_sphere(&q, |w| Ok(w[1] * w[1] * w[2])).unwrap();
        assert!(odd.abs() < 1e-14);
        assert!(SphereQuadrature::new(3, 10).is_err());
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0 * PI).abs() < 1e-15);
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn annulus_volume() {
        let q = AnnulusQuadrature::new(1.0, 2.0, 8, SphereQuadrature::new(8, 16).unwrap()).unwrap();
        let v = q.integrate(|_| Ok(1.0)).unwrap();
        assert!((v - 4.0 * PI / 3.0 * 7.0).abs() < 1e-12);
    }

    #[test]
    fn grid_avoids_poles() {
        let g = angular_grid(3, 8);
        assert_eq!(g.len(), 64);
        assert!(g.iter().all(|w| w[0].abs() < 0.99));
    }

    #[test]
    fn pairwise_is_order_fixed() {
        let v: Vec<f64> = (0..1000).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        assert_eq!(pairwise_sum(&v), pairwise_sum(&v.clone()));
        assert!((pairwise_sum(&v) - v.iter().sum::<f64>()).abs() < 1e-12);
    }
}
