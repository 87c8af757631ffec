//! The `b`-orthonormal frame `e_1 = √(1+r²) ∂_r`,
//! `e_{j+1} = (r sin θ_1 ⋯ sin θ_{j-1})^{-1} ∂_{θ_j}` and frame components of
//! symmetric 2-tensors.

use serde::Serialize;

use crate::error::Result;
use crate::geometry::chart::ChartPoint;
use crate::geometry::metric::{hyperbolic_jet, Metric};

#[derive(Clone, Debug, Serialize)]
pub struct FramePoint {
    pub point: ChartPoint,
    /// `frame[i][a]`: coefficient of `e_{i+1}` on `∂/∂y_a`, `y = (r, θ_1, …)`.
    pub frame: Vec<Vec<f64>>,
    /// `b_ab` in `(r, θ)` coordinates, row-major.
    pub b: Vec<f64>,
    /// `g_ab` in `(r, θ)` coordinates when a metric was attached.
    pub g: Option<Vec<f64>>,
}

pub fn frame_at(point: &ChartPoint) -> FramePoint {
    let n = point.n;
    let s = point.sin_products();
    let mut frame = vec![vec![0.0; n]; n];
    frame[0][0] = (1.0 + point.r * point.r).sqrt();
    for j in 1..n {
        frame[j][j] = 1.0 / (point.r * s[j - 1]);
    }
    let b = spherical_components(point, &hyperbolic_jet(&point.to_cartesian()).values());
    FramePoint {
        point: point.clone(),
        frame,
        b,
        g: None,
    }
}

pub fn frame_at_metric(g: &dyn Metric, point: &ChartPoint) -> Result<FramePoint> {
    let mut f = frame_at(point);
    let gx = g.jet(&point.to_cartesian())?;
    f.g = Some(spherical_components(point, &gx.values()));
    Ok(f)
}

/// `Jᵀ T J`: Cartesian components (row-major) pulled back to `(r, θ)`.
pub fn spherical_components(point: &ChartPoint, cart: &[f64]) -> Vec<f64> {
    let n = point.n;
    let jac = point.jacobian();
    let mut out = vec![0.0; n * n];
    for a in 0..n {
        for b in a..n {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += jac[i * n + a] * cart[i * n + j] * jac[j * n + b];
                }
            }
            out[a * n + b] = acc;
            out[b * n + a] = acc;
        }
    }
    out
}

/// `κ(e_i, e_j)` for a tensor given by its `(r, θ)` components.
pub fn frame_components(tensor: &[f64], point: &ChartPoint) -> Vec<f64> {
    let n = point.n;
    let f = frame_at(point).frame;
    // the frame is diagonal in (r, θ)
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = f[i][i] * f[j][j] * tensor[i * n + j];
        }
    }
    out
}

/// Frame components of a tensor given by Cartesian components.
pub fn frame_components_cartesian(cart: &[f64], point: &ChartPoint) -> Vec<f64> {
    frame_components(&spherical_components(point, cart), point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::metric::schwarzschild_ads;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn radial_coefficient() {
        let p = ChartPoint::new(3, 0.75, vec![1.0, 2.0]).unwrap();
        assert!((frame_at(&p).frame[0][0] - 1.25).abs() < 1e-15);
        let q = ChartPoint::new(3, 2.0, vec![FRAC_PI_2, 0.0]).unwrap();
        assert!((frame_at(&q).frame[1][1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn background_is_identity_in_frame() {
        let p = ChartPoint::new(4, 3.0, vec![0.4, 1.9, 4.0]).unwrap();
        let f = frame_at(&p);
        let k = frame_components(&f.b, &p);
        for i in 0..4 {
            for j in 0..4 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((k[i * 4 + j] - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn schwarzschild_radial_deviation() {
        let g = schwarzschild_ads(3, 1.0).unwrap();
        let p = ChartPoint::new(3, 10.0, vec![1.0, 0.5]).unwrap();
        let d = g.deviation(&p.to_cartesian()).unwrap().values();
        let k = frame_components_cartesian(&d, &p);
        let expect = 101.0 * (1.0 / 100.8 - 1.0 / 101.0);
        assert!((k[0] - expect).abs() < 1e-13);
        assert!(k[1].abs() < 1e-14 && k[4].abs() < 1e-14);
    }
}
