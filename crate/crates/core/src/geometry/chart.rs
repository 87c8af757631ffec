//! The exterior chart of the hyperboloid model: spherical coordinates
//! `(r, θ_1, …, θ_{n-1})` and the Cartesian image `x ∈ ℝⁿ`.
//!
//! Convention: `x_1 = r cos θ_1`, `x_k = r sin θ_1 ⋯ sin θ_{k-1} cos θ_k`,
//! `x_n = r sin θ_1 ⋯ sin θ_{n-1}`, with `θ_1..θ_{n-2} ∈ [0, π]` and
//! `θ_{n-1} ∈ [0, 2π)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{Jet, MAX_DIM};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub n: usize,
    pub r: f64,
    pub angles: Vec<f64>,
}

pub fn check_dim(n: usize) -> Result<()> {
    if !(3..=MAX_DIM).contains(&n) {
        return Err(Error::Dimension(n));
    }
    Ok(())
}

impl ChartPoint {
    pub fn new(n: usize, r: f64, angles: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidPoint(format!("r = {r} must be positive")));
        }
        if angles.len() != n - 1 {
            return Err(Error::InvalidPoint(format!(
                "expected {} angles, got {}",
                n - 1,
                angles.len()
            )));
        }
        for (j, &a) in angles.iter().enumerate() {
            let ok = if j + 1 < n - 1 {
                (0.0..=PI).contains(&a)
            } else {
                (0.0..2.0 * PI).contains(&a)
            };
            if !ok {
                return Err(Error::InvalidPoint(format!("angle θ_{} = {a} out of range", j + 1)));
            }
        }
        Ok(ChartPoint { n, r, angles })
    }

    /// Spherical coordinates of a nonzero Cartesian point.
    pub fn from_cartesian(x: &[f64]) -> Result<Self> {
        let n = x.len();
        check_dim(n)?;
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            return Err(Error::InvalidPoint("origin has no spherical coordinates".into()));
        }
        let mut angles = Vec::with_capacity(n - 1);
        for j in 0..n - 2 {
            let tail = x[j + 1..].iter().map(|v| v * v).sum::<f64>().sqrt();
            angles.push(tail.atan2(x[j]));
        }
        let mut last = x[n - 1].atan2(x[n - 2]);
        if last < 0.0 {
            last += 2.0 * PI;
        }
        if last >= 2.0 * PI {
            last = 0.0;
        }
        angles.push(last);
        Ok(ChartPoint { n, r, angles })
    }

    pub fn to_cartesian(&self) -> Vec<f64> {
        let mut x = unit_direction(&self.angles);
        for v in &mut x {
            *v *= self.r;
        }
        x
    }

    /// `Π_{k<j} sin θ_k` for `j = 0..n-1` (empty product first).
    pub fn sin_products(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n);
        let mut p = 1.0;
        out.push(p);
        for a in &self.angles {
            p *= a.sin();
            out.push(p);
        }
        out
    }

    /// Smallest distance of the polar angles from the poles; frames degenerate at 0.
    pub fn pole_distance(&self) -> f64 {
        self.angles[..self.n - 2]
            .iter()
            .map(|&a| a.min(PI - a))
            .fold(f64::INFINITY, f64::min)
    }

    /// `∂x_i/∂y_a` with `y = (r, θ_1, …)`, row-major `[i * n + a]`.
    pub fn jacobian(&self) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![self.r];
        y.extend_from_slice(&self.angles);
        let yj = Jet::coordinates(&y);
        let xs = cartesian_jets(&yj);
        let mut jac = vec![0.0; n * n];
        for i in 0..n {
            for a in 0..n {
                jac[i * n + a] = xs[i].d(a);
            }
        }
        jac
    }
}

/// Unit vector `ω(θ)` on the sphere.
pub fn unit_direction(angles: &[f64]) -> Vec<f64> {
    let n = angles.len() + 1;
    let mut x = vec![0.0; n];
    let mut p = 1.0;
    for (k, a) in angles.iter().enumerate() {
        let (s, c) = a.sin_cos();
        x[k] = p * c;
        p *= s;
    }
    x[n - 1] = p;
    x
}

/// Cartesian coordinates as jets of spherical chart jets `y = (r, θ…)`.
pub fn cartesian_jets(y: &[Jet]) -> Vec<Jet> {
    let n = y.len();
    let mut x = Vec::with_capacity(n);
    let mut p = y[0];
    for a in &y[1..] {
        x.push(p * a.cos());
        p = p * a.sin();
    }
    x.push(p);
    x
}

/// Rotation of a point: `R x` for a row-major orthogonal matrix.
pub fn rotate(rot: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| (0..n).map(|j| rot[i * n + j] * x[j]).sum())
        .collect()
}

/// Validates a rotation matrix: orthogonal with determinant +1.
pub fn check_rotation(n: usize, rot: &[f64]) -> Result<()> {
    if rot.len() != n * n {
        return Err(Error::InvalidParameter(format!("rotation must be {n}x{n}")));
    }
    let m = nalgebra::DMatrix::from_row_slice(n, n, rot);
    let defect = (&m * m.transpose() - nalgebra::DMatrix::identity(n, n)).abs().max();
    if defect > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "rotation not orthogonal (defect {defect:e})"
        )));
    }
    if m.determinant() < 0.0 {
        return Err(Error::InvalidParameter("rotation has determinant -1".into()));
    }
    Ok(())
}

/// Rotation by `angle` in the `(i, j)` coordinate plane, row-major.
pub fn plane_rotation(n: usize, i: usize, j: usize, angle: f64) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for k in 0..n {
        m[k * n + k] = 1.0;
    }
    let (s, c) = angle.sin_cos();
    m[i * n + i] = c;
    m[j * n + j] = c;
    m[i * n + j] = -s;
    m[j * n + i] = s;
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cartesian_round_trip() {
        let p = ChartPoint::new(4, 2.5, vec![0.3, 2.0, 5.0]).unwrap();
        let x = p.to_cartesian();
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((r - 2.5).abs() < 1e-12 * 2.5);
        let q = ChartPoint::from_cartesian(&x).unwrap();
        assert!((q.r - p.r).abs() < 1e-10);
        for (a, b) in p.angles.iter().zip(&q.angles) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_points() {
        assert!(ChartPoint::new(2, 1.0, vec![0.0]).is_err());
        assert!(ChartPoint::new(3, -1.0, vec![0.0, 0.0]).is_err());
        assert!(ChartPoint::new(3, 1.0, vec![4.0, 0.0]).is_err());
        assert!(ChartPoint::new(3, 1.0, vec![1.0, 7.0]).is_err());
    }

    #[test]
    fn jacobian_radial_column_is_unit_direction() {
        let p = ChartPoint::new(3, 2.0, vec![1.1, 0.4]).unwrap();
        let j = p.jacobian();
        let w = unit_direction(&p.angles);
        for i in 0..3 {
            assert!((j[i * 3] - w[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn rotation_validation() {
        let r = plane_rotation(3, 0, 1, 0.7);
        check_rotation(3, &r).unwrap();
        let mut bad = r.clone();
        bad[0] = 2.0;
        assert!(check_rotation(3, &bad).is_err());
        let reflect = vec![-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        assert!(check_rotation(3, &reflect).is_err());
    }
}
