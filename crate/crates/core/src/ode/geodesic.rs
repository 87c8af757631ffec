//! Arc-length geodesics with optional parallel transport of a frame.

use serde::{Deserialize, Serialize};

use super::integrator::{integrate, Tolerances};
use crate::error::{Error, Result};
use crate::geometry::metric::Metric;
use crate::tensor::LocalGeometry;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicOptions {
    /// Spacing of the output samples in arc length.
    pub sample_step: f64,
    pub rtol: f64,
    /// Project the velocity back to the unit sphere of `g` after every step.
    pub renormalize: bool,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        GeodesicOptions {
            sample_step: 0.05,
            rtol: 1e-12,
            renormalize: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSample {
    pub base_point: Vec<f64>,
    pub direction: Vec<f64>,
    pub t: Vec<f64>,
    pub positions: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    /// `max |g(γ', γ') - 1|` before projection, over the steps ending in each sample interval.
    pub drift: Vec<f64>,
    pub max_drift: f64,
    /// Transported vectors per sample, when a frame was supplied.
    pub transported: Vec<Vec<Vec<f64>>>,
    /// Largest g-length of the correction applied when re-orthonormalizing the frame.
    pub transport_drift: f64,
}

impl GeodesicSample {
    pub fn radii(&self) -> Vec<f64> {
        self.positions
            .iter()
            .map(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect()
    }

    /// Smallest `C` with `C^{-1} e^t <= |γ(t)| <= C e^t` over the samples with `t > 0`.
    pub fn comparability(&self) -> f64 {
        self.t
            .iter()
            .zip(self.radii())
            .filter(|(t, _)| **t > 0.0)
            .fold(1.0, |c, (t, r)| c.max(r / t.exp()).max(t.exp() / r))
    }
}

fn gram(geo: &LocalGeometry, a: &[f64], b: &[f64]) -> f64 {
    let la = geo.vector_from_chart(a);
    let lb = geo.vector_from_chart(b);
    geo.apply(&la, &lb)
}

/// `Γ(v, w)` in chart components.
fn christoffel_contract(geo: &LocalGeometry, v: &[f64], w: &[f64]) -> Vec<f64> {
    let n = geo.n;
    let lv = geo.vector_from_chart(v);
    let lw = geo.vector_from_chart(w);
    let out: Vec<f64> = (0..n)
        .map(|k| {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += geo.christoffel(k, i, j) * lv[i] * lw[j];
                }
            }
            acc
        })
        .collect();
    geo.vector_to_chart(&out)
}

/// Geodesic from `p` with initial chart velocity `dir` (rescaled to unit
/// speed) over arc length `length`. Negative `length` runs backward.
pub fn integrate_geodesic(
    g: &dyn Metric,
    p: &[f64],
    dir: &[f64],
    length: f64,
    opts: &GeodesicOptions,
) -> Result<GeodesicSample> {
    integrate_geodesic_with_frame(g, p, dir, &[], length, opts)
}

/// As [`integrate_geodesic`], transporting the chart vectors `frame`
/// (orthonormalized against `γ'` and each other at the start).
pub fn integrate_geodesic_with_frame(
    g: &dyn Metric,
    p: &[f64],
    dir: &[f64],
    frame: &[Vec<f64>],
    length: f64,
    opts: &GeodesicOptions,
) -> Result<GeodesicSample> {
    let n = g.dim();
    if p.len() != n || dir.len() != n || frame.iter().any(|v| v.len() != n) {
        return Err(Error::InvalidParameter(format!("geodesic data must have dimension {n}")));
    }
    if !(opts.sample_step > 0.0) || !length.is_finite() || length == 0.0 {
        return Err(Error::InvalidParameter("geodesic needs a nonzero length and positive step".into()));
    }
    let geo0 = LocalGeometry::at(g, p)?;
    let speed = gram(&geo0, dir, dir).sqrt();
    if !(speed > 0.0) {
        return Err(Error::InvalidParameter("initial direction is zero".into()));
    }
    let sign = length.signum();
    let v0: Vec<f64> = dir.iter().map(|c| c / speed).collect();
    let mut basis = vec![v0.clone()];
    for f in frame {
        basis.push(orthonormalize(&geo0, f, &basis)?);
    }
    let m = frame.len();
    // running backward flips the velocity only
    let mut y0 = p.to_vec();
    y0.extend(v0.iter().map(|c| c * sign));
    for b in &basis[1..] {
        y0.extend_from_slice(b);
    }
    let steps = (length.abs() / opts.sample_step).round().max(1.0) as usize;
    let times: Vec<f64> = (0..=steps).map(|k| length.abs() * k as f64 / steps as f64).collect();
    let mut step_drift: Vec<(f64, f64)> = Vec::new();
    let mut frame_fix = 0.0f64;
    let tol = Tolerances {
        rtol: opts.rtol,
        atol: opts.rtol * 1e-3,
        ..Tolerances::default()
    };
    let (states, _) = integrate(
        |_, y, dy| {
            let x = &y[..n];
            let geo = LocalGeometry::at(g, x)?;
            let v = &y[n..2 * n];
            dy[..n].copy_from_slice(v);
            let a = christoffel_contract(&geo, v, v);
            for i in 0..n {
                dy[n + i] = -a[i];
            }
            for k in 0..m {
                let off = n * (2 + k);
                let w = &y[off..off + n];
                let c = christoffel_contract(&geo, v, w);
                for i in 0..n {
                    dy[off + i] = -c[i];
                }
            }
            Ok(())
        },
        0.0,
        &y0,
        &times,
        &tol,
        |t, y| {
            let Ok(geo) = LocalGeometry::at(g, &y[..n]) else {
                return;
            };
            let v: Vec<f64> = y[n..2 * n].to_vec();
            let norm2 = gram(&geo, &v, &v);
            step_drift.push((t, (norm2 - 1.0).abs()));
            if opts.renormalize {
                let s = norm2.sqrt();
                for i in 0..n {
                    y[n + i] /= s;
                }
            }
            if m > 0 {
                let mut done = vec![y[n..2 * n].to_vec()];
                for k in 0..m {
                    let off = n * (2 + k);
                    let w = y[off..off + n].to_vec();
                    if let Ok(u) = orthonormalize(&geo, &w, &done) {
                        let dw: Vec<f64> = w.iter().zip(&u).map(|(a, b)| a - b).collect();
                        frame_fix = frame_fix.max(gram(&geo, &dw, &dw).sqrt());
                        y[off..off + n].copy_from_slice(&u);
                        done.push(u);
                    }
                }
            }
        },
    )?;
    let mut drift = vec![0.0f64; times.len()];
    let mut k = 1;
    for (t, d) in &step_drift {
        while k + 1 < times.len() && *t > times[k] {
            k += 1;
        }
        drift[k] = drift[k].max(*d);
    }
    let max_drift = drift.iter().cloned().fold(0.0, f64::max);
    let flip = |v: &[f64]| -> Vec<f64> { v.iter().map(|c| c * sign).collect() };
    Ok(GeodesicSample {
        base_point: p.to_vec(),
        direction: v0,
        t: times.iter().map(|t| t * sign).collect(),
        positions: states.iter().map(|s| s[..n].to_vec()).collect(),
        velocities: states.iter().map(|s| flip(&s[n..2 * n])).collect(),
        drift,
        max_drift,
        transported: states
            .iter()
            .map(|s| (0..m).map(|k| s[n * (2 + k)..n * (3 + k)].to_vec()).collect())
            .collect(),
        transport_drift: frame_fix,
    })
}

/// Gram–Schmidt of `w` against the g-orthonormal `done`, then normalized.
fn orthonormalize(geo: &LocalGeometry, w: &[f64], done: &[Vec<f64>]) -> Result<Vec<f64>> {
    let mut u = w.to_vec();
    for e in done {
        let c = gram(geo, &u, e);
        for i in 0..u.len() {
            u[i] -= c * e[i];
        }
    }
    let s = gram(geo, &u, &u).sqrt();
    if !(s > 1e-12) {
        return Err(Error::InvalidParameter("frame vector is degenerate".into()));
    }
    Ok(u.iter().map(|c| c / s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::metric::{hyperbolic_metric, schwarzschild_ads};

    #[test]
    fn hyperbolic_radial_geodesic() {
        let b = hyperbolic_metric(3).unwrap();
        let r0: f64 = 0.5;
        let p = [0.0, r0, 0.0];
        let s = integrate_geodesic(&b, &p, &[0.0, 1.0, 0.0], 8.0, &GeodesicOptions::default()).unwrap();
        for (t, r) in s.t.iter().zip(s.radii()) {
            let exact = (r0.asinh() + t).sinh();
            assert!((r / exact - 1.0).abs() < 1e-9, "{t} {r} {exact}");
        }
        assert!(s.max_drift < 1e-8);
    }

    #[test]
    fn reversal_returns_to_start() {
        let g = schwarzschild_ads(3, 0.5).unwrap();
        let p = [2.0, 1.0, 0.5];
        let s = integrate_geodesic(&g, &p, &[0.3, -0.2, 1.0], 3.0, &GeodesicOptions::default()).unwrap();
        let end = s.positions.last().unwrap();
        let back: Vec<f64> = s.velocities.last().unwrap().iter().map(|v| -v).collect();
        let r = integrate_geodesic(&g, end, &back, 3.0, &GeodesicOptions::default()).unwrap();
        let home = r.positions.last().unwrap();
        let err = home.iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn transported_frame_stays_orthonormal() {
        let g = schwarzschild_ads(3, 0.5).unwrap();
        let p = [3.0, 0.0, 0.0];
        let frame = vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let s = integrate_geodesic_with_frame(&g, &p, &[1.0, 0.2, 0.0], &frame, 2.0, &GeodesicOptions::default())
            .unwrap();
        assert!(s.transport_drift < 1e-8, "{}", s.transport_drift);
        let x = s.positions.last().unwrap();
        let geo = LocalGeometry::at(&g, x).unwrap();
        let (e1, e2) = (&s.transported.last().unwrap()[0], &s.transported.last().unwrap()[1]);
        assert!(gram(&geo, e1, e2).abs() < 1e-10);
        assert!(gram(&geo, e1, s.velocities.last().unwrap()).abs() < 1e-10);
    }
}
