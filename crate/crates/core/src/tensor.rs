//! Christoffel symbols, curvature and covariant derivatives at a point.
//!
//! Chart components of the model metric are badly conditioned far out
//! (`b_rr ~ r^{-2}`), so every point is processed in the linear chart
//! `x = p + F y`, where `F = L^{-T}` and `g(p) = L Lᵀ`. In `y` the metric is the
//! identity at `p` up to rounding. Fields enter as chart jets and are mapped to
//! local jets with [`LocalGeometry::scalar`] and [`LocalGeometry::tensor`];
//! results come back to chart components with the `*_to_chart` helpers.
//!
//! Index layouts (flat, row-major, local components):
//! - `dg[k][i][j] = ∂_k g_ij`
//! - `gamma[k][i][j] = Γ^k_ij`
//! - `dgamma[l][k][i][j] = ∂_l Γ^k_ij`
//! - `riemann[k][j][l][i] = R_kjli = g(∇_k ∇_j ∂_l - ∇_j ∇_k ∂_l, ∂_i)`

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::fields::{ScalarField, SymmetricField, TensorJet};
use crate::geometry::metric::Metric;
use crate::jet::Jet;

/// Metric, inverse and connection at one point, in local components.
#[derive(Clone, Debug)]
pub struct LocalGeometry {
    pub n: usize,
    /// Chart position of the point.
    pub x: Vec<f64>,
    /// `F`: local basis vectors as chart columns.
    pub frame: DMatrix<f64>,
    /// `F^{-1}`.
    pub coframe: DMatrix<f64>,
    pub g: Vec<f64>,
    pub ginv: Vec<f64>,
    /// `√det g` in chart components, the density of `dμ_g` against `d^n x`.
    pub sqrt_det: f64,
    pub dg: Vec<f64>,
    pub gamma: Vec<f64>,
    pub dgamma: Vec<f64>,
}

#[inline]
fn i3(n: usize, a: usize, b: usize, c: usize) -> usize {
    (a * n + b) * n + c
}

#[inline]
fn i4(n: usize, a: usize, b: usize, c: usize, d: usize) -> usize {
    ((a * n + b) * n + c) * n + d
}

fn push_jet(frame: &DMatrix<f64>, v: &Jet) -> Jet {
    let n = frame.nrows();
    let grad: Vec<f64> = (0..n)
        .map(|a| (0..n).map(|k| frame[(k, a)] * v.d(k)).sum())
        .collect();
    // H̃ = Fᵀ H F
    let mut hf = vec![0.0; n * n];
    for k in 0..n {
        for b in 0..n {
            hf[k * n + b] = (0..n).map(|l| v.dd(k, l) * frame[(l, b)]).sum();
        }
    }
    let mut hess = vec![0.0; n * n];
    for a in 0..n {
        for b in a..n {
            let s: f64 = (0..n).map(|k| frame[(k, a)] * hf[k * n + b]).sum();
            hess[a * n + b] = s;
            hess[b * n + a] = s;
        }
    }
    Jet::from_parts(v.value(), &grad, &hess)
}

impl LocalGeometry {
    pub fn new(x: &[f64], gj: &TensorJet) -> Result<Self> {
        let n = gj.dim();
        let gx = DMatrix::from_row_slice(n, n, &gj.values());
        let chol = gx.cholesky().ok_or_else(|| Error::NotPositiveDefinite(x.to_vec()))?;
        let l = chol.l();
        let coframe = l.transpose();
        let frame = coframe
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::NotPositiveDefinite(x.to_vec()))?;
        let chart_sqrt_det: f64 = l.diagonal().iter().product();

        let local = push_tensor(&frame, gj);
        let g = local.values();
        let m = DMatrix::from_row_slice(n, n, &g);
        let lchol = m.cholesky().ok_or_else(|| Error::NotPositiveDefinite(x.to_vec()))?;
        let inv = lchol.inverse();
        let ginv: Vec<f64> = (0..n * n).map(|k| inv[(k / n, k % n)]).collect();

        let mut dg = vec![0.0; n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    dg[i3(n, k, i, j)] = local.d(i, j, k);
                }
            }
        }
        // ∂_l g^{ab} = -g^{ac} ∂_l g_cd g^{db}
        let mut dginv = vec![0.0; n * n * n];
        for l in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let mut acc = 0.0;
                    for c in 0..n {
                        for d in 0..n {
                            acc += ginv[a * n + c] * dg[i3(n, l, c, d)] * ginv[d * n + b];
                        }
                    }
                    dginv[i3(n, l, a, b)] = -acc;
                }
            }
        }
        // first-kind symbols [ij, m] and their derivatives
        let mut first = vec![0.0; n * n * n];
        let mut dfirst = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for m_ in 0..n {
                    first[i3(n, i, j, m_)] =
                        0.5 * (dg[i3(n, i, j, m_)] + dg[i3(n, j, i, m_)] - dg[i3(n, m_, i, j)]);
                    for l in 0..n {
                        dfirst[i4(n, l, i, j, m_)] = 0.5
                            * (local.dd(j, m_, l, i) + local.dd(i, m_, l, j)
                                - local.dd(i, j, l, m_));
                    }
                }
            }
        }
        let mut gamma = vec![0.0; n * n * n];
        let mut dgamma = vec![0.0; n * n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut acc = 0.0;
                    for m_ in 0..n {
                        acc += ginv[k * n + m_] * first[i3(n, i, j, m_)];
                    }
                    gamma[i3(n, k, i, j)] = acc;
                    gamma[i3(n, k, j, i)] = acc;
                    for l in 0..n {
                        let mut acc = 0.0;
                        for m_ in 0..n {
                            acc += dginv[i3(n, l, k, m_)] * first[i3(n, i, j, m_)]
                                + ginv[k * n + m_] * dfirst[i4(n, l, i, j, m_)];
                        }
                        dgamma[i4(n, l, k, i, j)] = acc;
                        dgamma[i4(n, l, k, j, i)] = acc;
                    }
                }
            }
        }
        Ok(LocalGeometry {
            n,
            x: x.to_vec(),
            frame,
            coframe,
            g,
            ginv,
            sqrt_det: chart_sqrt_det,
            dg,
            gamma,
            dgamma,
        })
    }

    pub fn at(metric: &dyn Metric, x: &[f64]) -> Result<Self> {
        LocalGeometry::new(x, &metric.jet(x)?)
    }

    /// Chart jet of a scalar to a local jet.
    pub fn scalar(&self, v: &Jet) -> Jet {
        push_jet(&self.frame, v)
    }

    /// Chart jet of a covariant 2-tensor to a local jet.
    pub fn tensor(&self, t: &TensorJet) -> TensorJet {
        push_tensor(&self.frame, t)
    }

    /// Local vector to chart components, `v_x = F v_y`.
    pub fn vector_to_chart(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|a| self.frame[(i, a)] * v[a]).sum())
            .collect()
    }

    /// Chart vector to local components.
    pub fn vector_from_chart(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|a| (0..n).map(|i| self.coframe[(a, i)] * v[i]).sum())
            .collect()
    }

    /// Chart covector to local components, `w_y = Fᵀ w_x`.
    pub fn covector_from_chart(&self, w: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|a| (0..n).map(|i| self.frame[(i, a)] * w[i]).sum())
            .collect()
    }

    /// Local covariant 2-tensor to chart components, `F^{-T} T F^{-1}`.
    pub fn lower_to_chart(&self, t: &DMatrix<f64>) -> DMatrix<f64> {
        self.coframe.transpose() * t * &self.coframe
    }

    #[inline]
    pub fn christoffel(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[i3(self.n, k, i, j)]
    }

    /// `∇²V_ij = ∂_ij V - Γ^k_ij ∂_k V` for a local jet.
    pub fn hessian(&self, v: &Jet) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |i, j| {
            let mut acc = v.dd(i, j);
            for k in 0..n {
                acc -= self.christoffel(k, i, j) * v.d(k);
            }
            acc
        })
    }

    pub fn laplacian(&self, v: &Jet) -> f64 {
        self.trace(&self.hessian(v))
    }

    /// `g^{ij} ∂_j V`.
    pub fn gradient(&self, v: &Jet) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.ginv[i * n + j] * v.d(j)).sum())
            .collect()
    }

    pub fn trace(&self, t: &DMatrix<f64>) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.ginv[i * n + j] * t[(i, j)];
            }
        }
        acc
    }

    /// `g^{ia} g^{jb} a_ij b_ab`.
    pub fn inner(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        let n = self.n;
        let up = self.raise_both(b);
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += a[(i, j)] * up[(i, j)];
            }
        }
        acc
    }

    pub fn norm(&self, t: &DMatrix<f64>) -> f64 {
        self.inner(t, t).max(0.0).sqrt()
    }

    pub fn vector_norm(&self, v: &[f64]) -> f64 {
        self.apply(v, v).max(0.0).sqrt()
    }

    /// `g(v, w)` for local vectors.
    pub fn apply(&self, v: &[f64], w: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.g[i * n + j] * v[i] * w[j];
            }
        }
        acc
    }

    fn raise_both(&self, t: &DMatrix<f64>) -> DMatrix<f64> {
        let gi = DMatrix::from_row_slice(self.n, self.n, &self.ginv);
        &gi * t * &gi
    }

    pub fn metric_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.g)
    }

    /// Columns form a `g`-orthonormal local frame.
    pub fn orthonormal_frame(&self) -> DMatrix<f64> {
        let chol = self
            .metric_matrix()
            .cholesky()
            .expect("metric checked positive definite on construction");
        chol.l()
            .transpose()
            .try_inverse()
            .expect("triangular factor of a positive definite matrix is invertible")
    }

    /// Norm of a covariant tensor of the given rank (flat, row-major local components).
    pub fn tensor_norm(&self, t: &[f64], rank: usize) -> f64 {
        let n = self.n;
        let f = self.orthonormal_frame();
        let mut cur = t.to_vec();
        // contract one index at a time with the frame
        for axis in 0..rank {
            let stride = n.pow((rank - 1 - axis) as u32);
            let mut next = vec![0.0; cur.len()];
            for (idx, out) in next.iter_mut().enumerate() {
                let a = (idx / stride) % n;
                let base = idx - a * stride;
                let mut acc = 0.0;
                for i in 0..n {
                    acc += cur[base + i * stride] * f[(i, a)];
                }
                *out = acc;
            }
            cur = next;
        }
        cur.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `∇_k T_ij`, layout `[k][i][j]`.
    pub fn covariant_derivative(&self, t: &TensorJet) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut acc = t.d(i, j, k);
                    for m in 0..n {
                        acc -= self.christoffel(m, k, i) * t.value(m, j)
                            + self.christoffel(m, k, j) * t.value(i, m);
                    }
                    out[i3(n, k, i, j)] = acc;
                    out[i3(n, k, j, i)] = acc;
                }
            }
        }
        out
    }

    /// `(div T)_j = g^{ik} ∇_i T_kj`.
    pub fn divergence(&self, t: &TensorJet) -> Vec<f64> {
        let n = self.n;
        let dt = self.covariant_derivative(t);
        (0..n)
            .map(|j| {
                let mut acc = 0.0;
                for i in 0..n {
                    for k in 0..n {
                        acc += self.ginv[i * n + k] * dt[i3(n, i, k, j)];
                    }
                }
                acc
            })
            .collect()
    }

    /// `∇_a ∇_b T_ij`, layout `[a][b][i][j]`.
    pub fn second_covariant_derivative(&self, t: &TensorJet) -> Vec<f64> {
        let n = self.n;
        let h1 = self.covariant_derivative(t);
        let gam = |k, i, j| self.gamma[i3(n, k, i, j)];
        let dgam = |l, k, i, j| self.dgamma[i4(n, l, k, i, j)];
        let mut out = vec![0.0; n * n * n * n];
        for a in 0..n {
            for b in 0..n {
                for i in 0..n {
                    for j in i..n {
                        // ∂_a (∇_b T_ij)
                        let mut d = t.dd(i, j, a, b);
                        for m in 0..n {
                            d -= dgam(a, m, b, i) * t.value(m, j)
                                + gam(m, b, i) * t.d(m, j, a)
                                + dgam(a, m, b, j) * t.value(i, m)
                                + gam(m, b, j) * t.d(i, m, a);
                        }
                        for m in 0..n {
                            d -= gam(m, a, b) * h1[i3(n, m, i, j)]
                                + gam(m, a, i) * h1[i3(n, b, m, j)]
                                + gam(m, a, j) * h1[i3(n, b, i, m)];
                        }
                        out[i4(n, a, b, i, j)] = d;
                        out[i4(n, a, b, j, i)] = d;
                    }
                }
            }
        }
        out
    }
}

fn push_tensor(frame: &DMatrix<f64>, t: &TensorJet) -> TensorJet {
    let n = t.dim();
    let moved = TensorJet::from_fn(n, |i, j| push_jet(frame, t.get(i, j)));
    let ft: Vec<f64> = (0..n * n).map(|k| frame[(k % n, k / n)]).collect();
    moved.congruence(&ft)
}

/// Curvature quantities at one point, in local components.
#[derive(Clone, Debug)]
pub struct CurvaturePack {
    pub geometry: LocalGeometry,
    pub riemann: Vec<f64>,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

impl CurvaturePack {
    pub fn from_geometry(geo: LocalGeometry) -> Self {
        let n = geo.n;
        let gam = |k, i, j| geo.gamma[i3(n, k, i, j)];
        let dgam = |l, k, i, j| geo.dgamma[i4(n, l, k, i, j)];
        // Rm^p_kjl = ∂_k Γ^p_jl - ∂_j Γ^p_kl + Γ^q_jl Γ^p_kq - Γ^q_kl Γ^p_jq
        let mut up = vec![0.0; n * n * n * n];
        for p in 0..n {
            for k in 0..n {
                for j in 0..n {
                    if j == k {
                        continue;
                    }
                    for l in 0..n {
                        let mut v = dgam(k, p, j, l) - dgam(j, p, k, l);
                        for q in 0..n {
                            v += gam(q, j, l) * gam(p, k, q) - gam(q, k, l) * gam(p, j, q);
                        }
                        up[i4(n, p, k, j, l)] = v;
                    }
                }
            }
        }
        let mut riemann = vec![0.0; n * n * n * n];
        for k in 0..n {
            for j in 0..n {
                for l in 0..n {
                    for i in 0..n {
                        let mut v = 0.0;
                        for p in 0..n {
                            v += geo.g[i * n + p] * up[i4(n, p, k, j, l)];
                        }
                        riemann[i4(n, k, j, l, i)] = v;
                    }
                }
            }
        }
        let ricci = DMatrix::from_fn(n, n, |j, l| (0..n).map(|k| up[i4(n, k, k, j, l)]).sum());
        let ricci = (&ricci + ricci.transpose()) * 0.5;
        let scalar = geo.trace(&ricci);
        CurvaturePack {
            geometry: geo,
            riemann,
            ricci,
            scalar,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.geometry.n
    }

    #[inline]
    pub fn riemann(&self, k: usize, j: usize, l: usize, i: usize) -> f64 {
        self.riemann[i4(self.n(), k, j, l, i)]
    }

    /// `R(X, Y, Y, X)` for local vectors.
    pub fn curvature_form(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.n();
        let mut acc = 0.0;
        for k in 0..n {
            for j in 0..n {
                for l in 0..n {
                    for i in 0..n {
                        acc += self.riemann(k, j, l, i) * x[k] * y[j] * y[l] * x[i];
                    }
                }
            }
        }
        acc
    }

    /// Sectional curvature of the plane spanned by local vectors `X`, `Y`.
    pub fn sectional(&self, x: &[f64], y: &[f64]) -> f64 {
        let geo = &self.geometry;
        let area = geo.apply(x, x) * geo.apply(y, y) - geo.apply(x, y).powi(2);
        self.curvature_form(x, y) / area
    }

    /// Sectional curvature for vectors given in chart components.
    pub fn sectional_chart(&self, x: &[f64], y: &[f64]) -> f64 {
        let geo = &self.geometry;
        self.sectional(&geo.vector_from_chart(x), &geo.vector_from_chart(y))
    }

    /// `Ric + (n - 1) g`, local components.
    pub fn ricci_excess(&self) -> DMatrix<f64> {
        &self.ricci + self.geometry.metric_matrix() * (self.n() as f64 - 1.0)
    }

    pub fn ricci_chart(&self) -> DMatrix<f64> {
        self.geometry.lower_to_chart(&self.ricci)
    }
}

pub fn curvature_at(metric: &dyn Metric, x: &[f64]) -> Result<CurvaturePack> {
    Ok(CurvaturePack::from_geometry(LocalGeometry::at(metric, x)?))
}

/// Covariant Hessian in chart components.
pub fn hessian(metric: &dyn Metric, v: &dyn ScalarField, x: &[f64]) -> Result<DMatrix<f64>> {
    let geo = LocalGeometry::at(metric, x)?;
    let h = geo.hessian(&geo.scalar(&v.jet(x)?));
    Ok(geo.lower_to_chart(&h))
}

pub fn laplacian(metric: &dyn Metric, v: &dyn ScalarField, x: &[f64]) -> Result<f64> {
    let geo = LocalGeometry::at(metric, x)?;
    Ok(geo.laplacian(&geo.scalar(&v.jet(x)?)))
}

/// Divergence as a chart covector.
pub fn divergence(metric: &dyn Metric, t: &dyn SymmetricField, x: &[f64]) -> Result<Vec<f64>> {
    let geo = LocalGeometry::at(metric, x)?;
    let d = geo.divergence(&geo.tensor(&t.jet(x)?));
    let n = geo.n;
    // w_x = F^{-T} w_y
    Ok((0..n)
        .map(|i| (0..n).map(|a| geo.coframe[(a, i)] * d[a]).sum())
        .collect())
}

pub fn trace(metric: &dyn Metric, t: &dyn SymmetricField, x: &[f64]) -> Result<f64> {
    let geo = LocalGeometry::at(metric, x)?;
    Ok(geo.trace(&matrix_of(&geo.tensor(&t.jet(x)?))))
}

/// Values of a tensor jet as a matrix.
pub fn matrix_of(t: &TensorJet) -> DMatrix<f64> {
    let n = t.dim();
    DMatrix::from_row_slice(n, n, &t.values())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fields::FnTensor;
    use crate::geometry::metric::{hyperbolic_metric, schwarzschild_ads, MetricAsField};
    use crate::geometry::potentials::StaticPotential;

    #[test]
    fn hyperbolic_curvature() {
        for n in 3..=5 {
            let b = hyperbolic_metric(n).unwrap();
            let x: Vec<f64> = (0..n).map(|i| 0.7 * i as f64 - 1.1).collect();
            let c = curvature_at(&b, &x).unwrap();
            let nf = n as f64;
            assert!((c.scalar + nf * (nf - 1.0)).abs() < 1e-10);
            assert!(c.ricci_excess().abs().max() < 1e-10);
            let ric = c.ricci_chart();
            let bx = b.jet(&x).unwrap();
            for i in 0..n {
                for j in 0..n {
                    assert!((ric[(i, j)] + (nf - 1.0) * bx.value(i, j)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn far_field_is_well_conditioned() {
        let b = hyperbolic_metric(3).unwrap();
        let g = schwarzschild_ads(3, 0.5).unwrap();
        // rounding grows like ε r² instead of ε r⁴
        for (r, tol) in [(200.0, 1e-10), (1000.0, 2e-9)] {
            let x = [0.6 * r, 0.0, 0.8 * r];
            assert!((curvature_at(&b, &x).unwrap().scalar + 6.0).abs() < tol);
            assert!((curvature_at(&g, &x).unwrap().scalar + 6.0).abs() < tol);
        }
    }

    #[test]
    fn schwarzschild_scalar_curvature() {
        let g = schwarzschild_ads(3, 0.5).unwrap();
        for r in [5.0, 10.0, 20.0] {
            let c = curvature_at(&g, &[r * 0.6, r * 0.48, r * 0.64]).unwrap();
            assert!((c.scalar + 6.0).abs() < 1e-8, "{}", c.scalar);
        }
    }

    #[test]
    fn static_potentials_on_background() {
        let b = hyperbolic_metric(3).unwrap();
        let x = [1.3, -0.2, 2.4];
        for v in [StaticPotential::lapse(3), StaticPotential::coordinate(3, 0)] {
            let h = hessian(&b, &v, &x).unwrap();
            let vx = v.value(&x).unwrap();
            let bx = b.jet(&x).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert!((h[(i, j)] - vx * bx.value(i, j)).abs() < 1e-12);
                }
            }
            assert!((laplacian(&b, &v, &x).unwrap() - 3.0 * vx).abs() < 1e-11);
        }
    }

    #[test]
    fn metric_is_parallel() {
        let g = schwarzschild_ads(4, 0.3).unwrap();
        let x = [1.0, 2.0, -0.5, 0.7];
        let geo = LocalGeometry::at(&g, &x).unwrap();
        let gj = geo.tensor(&g.jet(&x).unwrap());
        assert!(geo.covariant_derivative(&gj).iter().all(|v| v.abs() < 1e-12));
        assert!(geo.second_covariant_derivative(&gj).iter().all(|v| v.abs() < 1e-11));
        assert!(divergence(&g, &MetricAsField(&g), &x).unwrap().iter().all(|v| v.abs() < 1e-12));
        assert!((trace(&g, &MetricAsField(&g), &x).unwrap() - 4.0).abs() < 1e-13);
    }

    #[test]
    fn tensor_norm_matches_contraction() {
        let g = schwarzschild_ads(3, 0.4).unwrap();
        let x = [1.5, -0.3, 0.8];
        let geo = LocalGeometry::at(&g, &x).unwrap();
        let t = DMatrix::from_row_slice(3, 3, &[1.0, 0.2, -0.3, 0.2, 2.0, 0.5, -0.3, 0.5, -1.0]);
        let flat: Vec<f64> = (0..9).map(|k| t[(k / 3, k % 3)]).collect();
        assert!((geo.tensor_norm(&flat, 2) - geo.norm(&t)).abs() < 1e-12);
        assert!((geo.tensor_norm(&geo.g, 2) - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn round_sphere_is_positive() {
        // stereographic round metric 4δ/(1+|x|²)²
        let sphere = FnTensor::new(|x: &[Jet]| {
            let w = (1.0 + crate::jet::norm_squared(x)).powi(-2) * 4.0;
            TensorJet::from_fn(x.len(), |i, j| if i == j { w } else { Jet::constant(x.len(), 0.0) })
        });
        let x = [0.3, 0.1, -0.4];
        let gj = sphere.jet(&x).unwrap();
        let c = CurvaturePack::from_geometry(LocalGeometry::new(&x, &gj).unwrap());
        assert!((c.sectional_chart(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]) - 1.0).abs() < 1e-12);
        assert!((c.scalar - 6.0).abs() < 1e-11);
    }
}
