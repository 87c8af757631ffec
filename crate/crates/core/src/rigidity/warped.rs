//! The warped products `dt² + cosh²t · h` on `ℝ × Σ`, with `h = e^{2σ(y)} δ`
//! conformally flat on a chart of `Σ`, and the potential `f = sinh t`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::chart::check_dim;
use crate::geometry::fields::{ScalarField, TensorJet};
use crate::geometry::metric::Metric;
use crate::jet::{norm_squared, Jet};
use crate::tensor::{curvature_at, LocalGeometry};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WarpBase {
    /// Unit round sphere in stereographic coordinates, `σ = ln(2/(1+|y|²))`.
    RoundSphere,
    /// Poincaré ball, `σ = ln(2/(1-|y|²))`, `|y| < 1`.
    Hyperbolic,
    /// Poincaré ball with `σ` raised by `amplitude (1 - |y|²/radius²)^4` on `|y| < radius`;
    /// curvature `-1` outside that ball.
    BumpedHyperbolic { amplitude: f64, radius: f64 },
}

impl WarpBase {
    fn validate(&self) -> Result<()> {
        if let WarpBase::BumpedHyperbolic { amplitude, radius } = *self {
            if !(amplitude.is_finite() && radius > 0.0 && radius < 1.0) {
                return Err(Error::InvalidParameter("bump needs finite amplitude and radius in (0, 1)".into()));
            }
        }
        Ok(())
    }

    /// `e^{2σ}` as a jet of the factor coordinates.
    fn conformal_factor(&self, y: &[Jet], dim: usize) -> Result<Jet> {
        let y2 = if y.is_empty() {
            Jet::constant(dim, 0.0)
        } else {
            norm_squared(y)
        };
        match *self {
            WarpBase::RoundSphere => Ok((y2 + 1.0).powi(-2) * 4.0),
            WarpBase::Hyperbolic | WarpBase::BumpedHyperbolic { .. } => {
                if !(y2.value() < 1.0) {
                    return Err(Error::Domain(format!("|y|² = {} outside the Poincaré ball", y2.value())));
                }
                let base = (1.0 - y2).powi(-2) * 4.0;
                match *self {
                    WarpBase::BumpedHyperbolic { amplitude, radius } if y2.value() < radius * radius => {
                        let s = 1.0 - y2 / (radius * radius);
                        Ok(base * (s.powi(4) * (2.0 * amplitude)).exp())
                    }
                    _ => Ok(base),
                }
            }
        }
    }

    /// Sectional curvature of `h` where known in closed form.
    pub fn curvature(&self) -> Option<f64> {
        match self {
            WarpBase::RoundSphere => Some(1.0),
            WarpBase::Hyperbolic => Some(-1.0),
            WarpBase::BumpedHyperbolic { .. } => None,
        }
    }
}

/// `g = dt² + cosh²t e^{2σ(y)} δ` on the chart `(t, y_1, …, y_{n-1})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WarpedMetric {
    pub n: usize,
    pub base: WarpBase,
}

impl WarpedMetric {
    pub fn new(n: usize, base: WarpBase) -> Result<Self> {
        check_dim(n)?;
        base.validate()?;
        Ok(WarpedMetric { n, base })
    }
}

impl Metric for WarpedMetric {
    fn dim(&self) -> usize {
        self.n
    }

    fn jet(&self, x: &[f64]) -> Result<TensorJet> {
        if x.len() != self.n || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPoint(format!("bad warped chart point {x:?}")));
        }
        let xs = Jet::coordinates(x);
        let w = xs[0].cosh().square() * self.base.conformal_factor(&xs[1..], self.n)?;
        Ok(TensorJet::from_fn(self.n, |i, j| match (i, j) {
            (0, 0) => Jet::constant(self.n, 1.0),
            _ if i == j => w,
            _ => Jet::constant(self.n, 0.0),
        }))
    }
}

/// `f = sinh t`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SinhPotential;

impl ScalarField for SinhPotential {
    fn jet(&self, x: &[f64]) -> Result<Jet> {
        Ok(Jet::variable(x.len(), 0, x[0]).sinh())
    }
}

/// `|∇²f - f g|_g` at a chart point.
pub fn hessian_rigidity_residual(g: &dyn Metric, f: &dyn ScalarField, x: &[f64]) -> Result<f64> {
    let geo = LocalGeometry::at(g, x)?;
    let fl = geo.scalar(&f.jet(x)?);
    let diff = geo.hessian(&fl) - geo.metric_matrix() * fl.value();
    Ok(geo.norm(&diff))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSample {
    pub t: f64,
    /// `K(∂_t ∧ e_1)`.
    pub mixed: f64,
    /// `K(e_1 ∧ e_2)` for tangential coordinate directions.
    pub tangential: f64,
    /// Closed form, when the base curvature is known.
    pub tangential_expected: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarpedFixtureReport {
    pub metric: WarpedMetric,
    pub factor_point: Vec<f64>,
    pub samples: Vec<CurvatureSample>,
    /// `max |∇²f - f g|_g` over the sampled points.
    pub hessian_residual: f64,
}

/// Tangential sectional curvature `(K_h - sinh²t)/cosh²t`.
pub fn warped_tangential_curvature(k_base: f64, t: f64) -> f64 {
    (k_base - t.sinh().powi(2)) / t.cosh().powi(2)
}

pub const FIXTURE_TIMES: [f64; 6] = [-8.0, -5.0, -2.0, 2.0, 5.0, 8.0];

/// Curvatures of the fixture at `t ∈ {±2, ±5, ±8}` over `factor_point`, and
/// the Hessian residual of `sinh t` at `hessian_points`.
pub fn warped_fixture(metric: &WarpedMetric, factor_point: &[f64], hessian_points: &[Vec<f64>]) -> Result<WarpedFixtureReport> {
    let n = metric.n;
    if factor_point.len() != n - 1 {
        return Err(Error::InvalidParameter(format!("factor point needs {} coordinates", n - 1)));
    }
    let mut samples = Vec::with_capacity(FIXTURE_TIMES.len());
    for &t in &FIXTURE_TIMES {
        let mut x = vec![t];
        x.extend_from_slice(factor_point);
        let pack = curvature_at(metric, &x)?;
        let e = |k: usize| {
            let mut v = vec![0.0; n];
            v[k] = 1.0;
            v
        };
        samples.push(CurvatureSample {
            t,
            mixed: pack.sectional_chart(&e(0), &e(1)),
            tangential: pack.sectional_chart(&e(1), &e(2)),
            tangential_expected: metric.base.curvature().map(|k| warped_tangential_curvature(k, t)),
        });
    }
    let mut hessian_residual = 0.0f64;
    for x in hessian_points {
        hessian_residual = hessian_residual.max(hessian_rigidity_residual(metric, &SinhPotential, x)?);
    }
    Ok(WarpedFixtureReport {
        metric: *metric,
        factor_point: factor_point.to_vec(),
        samples,
        hessian_residual,
    })
}
