//! Riemannian metrics on a coordinate chart, and the built-in families on the
//! exterior chart of the hyperboloid model.
//!
//! Every family is written as `g = b + dev`, with `b` the hyperbolic metric in
//! Cartesian components `b_ij = δ_ij - x_i x_j / (1 + |x|²)` and `dev` the
//! family-specific deviation. Evaluating the deviation directly, rather than
//! subtracting `b` from `g`, keeps `g - b` accurate far out on the chart.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::chart::{check_dim, check_rotation};
use crate::geometry::fields::{ScalarField, SymmetricField, TensorJet};
use crate::geometry::profiles::{AngularProfile, RadialProfile};
use crate::jet::{norm_squared, Jet};

/// Components of a metric (and their first two partials) in some chart.
pub trait Metric: Send + Sync {
    fn dim(&self) -> usize;

    fn jet(&self, x: &[f64]) -> Result<TensorJet>;

    /// `g - b` on the exterior chart of the hyperboloid model.
    fn deviation(&self, x: &[f64]) -> Result<TensorJet> {
        let g = self.jet(x)?;
        let b = hyperbolic_jet(x);
        Ok(TensorJet::from_fn(x.len(), |i, j| *g.get(i, j) - *b.get(i, j)))
    }

    /// Invariant under rotations of the Cartesian chart.
    fn rotationally_symmetric(&self) -> bool {
        false
    }

    /// Outermost radius where the chart degenerates, if any.
    fn horizon_radius(&self) -> Option<f64> {
        None
    }

    /// Nominal decay rate of the frame components of `g - b`, when known.
    fn decay_hint(&self) -> Option<f64> {
        None
    }
}

/// Hyperbolic metric components as jets of the coordinate jets.
pub fn hyperbolic_components(x: &[Jet]) -> TensorJet {
    let n = x.len();
    let w = (1.0 + norm_squared(x)).recip();
    TensorJet::from_fn(n, |i, j| {
        let q = -(x[i] * x[j] * w);
        if i == j {
            q + 1.0
        } else {
            q
        }
    })
}

pub fn hyperbolic_jet(x: &[f64]) -> TensorJet {
    hyperbolic_components(&Jet::coordinates(x))
}

/// How partial derivatives of the deviation are produced.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DerivativeMode {
    Analytic,
    /// Central differences with step `relative_step · (1 + |x|)` per Cartesian
    /// direction; second derivatives by nested central differences.
    FiniteDifference { relative_step: f64 },
}

impl DerivativeMode {
    pub fn default_finite_difference() -> Self {
        DerivativeMode::FiniteDifference {
            relative_step: 1e-5,
        }
    }
}

/// Tensor shape carried by a perturbation term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TermTensor {
    /// `e_1^♭ ⊗ e_1^♭` with `e_1` the radial unit vector of `b`; the single
    /// nonzero frame component is `κ(e_1, e_1)`.
    Radial,
    /// The tangential part of `b`, `b - e_1^♭ ⊗ e_1^♭`.
    Tangential,
    /// `c ⊗ c` for a fixed Cartesian covector.
    Cartesian { covector: Vec<f64> },
}

/// One term `radial(|x|) · angular(x/|x|) · tensor` of a perturbation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationTerm {
    pub tensor: TermTensor,
    pub radial: RadialProfile,
    #[serde(default = "isotropic")]
    pub angular: AngularProfile,
}

fn isotropic() -> AngularProfile {
    AngularProfile::Isotropic
}

impl PerturbationTerm {
    fn validate(&self, n: usize) -> Result<()> {
        self.radial.validate()?;
        self.angular.validate(n)?;
        if let TermTensor::Cartesian { covector } = &self.tensor {
            if covector.len() != n {
                return Err(Error::InvalidParameter(format!("covector must have {n} entries")));
            }
        }
        Ok(())
    }

    fn components(&self, x: &[Jet]) -> TensorJet {
        let n = x.len();
        let amp = self.radial.eval(x) * self.angular.eval(x);
        if amp == Jet::constant(amp.dim(), 0.0) {
            return TensorJet::zeros(n);
        }
        match &self.tensor {
            TermTensor::Radial => {
                let r2 = norm_squared(x);
                let w = amp / (r2 * (1.0 + r2));
                TensorJet::from_fn(n, |i, j| x[i] * x[j] * w)
            }
            TermTensor::Tangential => {
                let w = amp / norm_squared(x);
                TensorJet::from_fn(n, |i, j| {
                    let q = -(x[i] * x[j] * w);
                    if i == j {
                        q + amp
                    } else {
                        q
                    }
                })
            }
            TermTensor::Cartesian { covector } => {
                TensorJet::from_fn(n, |i, j| amp * (covector[i] * covector[j]))
            }
        }
    }

    fn rotated(&self, rot: &[f64]) -> Self {
        PerturbationTerm {
            tensor: match &self.tensor {
                TermTensor::Cartesian { covector } => TermTensor::Cartesian {
                    covector: crate::geometry::chart::rotate(rot, covector),
                },
                t => t.clone(),
            },
            radial: self.radial.clone(),
            angular: self.angular.rotated(rot),
        }
    }

    fn isotropic(&self) -> bool {
        self.angular.is_isotropic() && !matches!(self.tensor, TermTensor::Cartesian { .. })
    }
}

/// Metric family on the exterior chart.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Hyperbolic,
    /// `g_rr = (1 + r² - 2m r^{2-n})^{-1}`, angular block `r² h`.
    SchwarzschildAds { m: f64 },
    /// `(1 + u) · base`.
    Conformal { base: Box<Family>, factor: RadialProfile },
    /// `base + Σ terms`.
    Perturbed {
        base: Box<Family>,
        terms: Vec<PerturbationTerm>,
    },
}

impl Family {
    fn validate(&self, n: usize) -> Result<()> {
        match self {
            Family::Hyperbolic => Ok(()),
            Family::SchwarzschildAds { m } => {
                if !(m.is_finite() && *m >= 0.0) {
                    return Err(Error::InvalidParameter(format!("mass parameter {m} must be >= 0")));
                }
                Ok(())
            }
            Family::Conformal { base, factor } => {
                factor.validate()?;
                base.validate(n)
            }
            Family::Perturbed { base, terms } => {
                for t in terms {
                    t.validate(n)?;
                }
                base.validate(n)
            }
        }
    }

    fn has_tabulated(&self) -> bool {
        match self {
            Family::Hyperbolic | Family::SchwarzschildAds { .. } => false,
            Family::Conformal { base, .. } => base.has_tabulated(),
            Family::Perturbed { .. } => true,
        }
    }

    fn symmetric(&self) -> bool {
        match self {
            Family::Hyperbolic | Family::SchwarzschildAds { .. } => true,
            Family::Conformal { base, .. } => base.symmetric(),
            Family::Perturbed { base, terms } => {
                base.symmetric() && terms.iter().all(PerturbationTerm::isotropic)
            }
        }
    }

    fn horizon(&self, n: usize) -> Option<f64> {
        match self {
            Family::Hyperbolic => None,
            Family::SchwarzschildAds { m } => schwarzschild_horizon(n, *m),
            Family::Conformal { base, .. } | Family::Perturbed { base, .. } => base.horizon(n),
        }
    }

    fn decay(&self, n: usize) -> Option<f64> {
        match self {
            Family::Hyperbolic => None,
            Family::SchwarzschildAds { m } => (*m > 0.0).then_some(n as f64),
            Family::Conformal { base, factor } => min_opt(base.decay(n), factor.decay()),
            Family::Perturbed { base, terms } => {
                let mut q = base.decay(n);
                for t in terms {
                    let p = t.radial.decay().map(|p| match t.tensor {
                        // c ⊗ c has frame components of size r² c_r²
                        TermTensor::Cartesian { .. } => p - 2.0,
                        _ => p,
                    });
                    q = min_opt(q, p);
                }
                q
            }
        }
    }

    fn rotated(&self, rot: &[f64]) -> Family {
        match self {
            Family::Hyperbolic | Family::SchwarzschildAds { .. } => self.clone(),
            Family::Conformal { base, factor } => Family::Conformal {
                base: Box::new(base.rotated(rot)),
                factor: factor.clone(),
            },
            Family::Perturbed { base, terms } => Family::Perturbed {
                base: Box::new(base.rotated(rot)),
                terms: terms.iter().map(|t| t.rotated(rot)).collect(),
            },
        }
    }

    /// Deviation from `b` as jets of the coordinate jets.
    fn deviation(&self, x: &[Jet]) -> Result<TensorJet> {
        let n = x.len();
        match self {
            Family::Hyperbolic => Ok(TensorJet::zeros(n)),
            Family::SchwarzschildAds { m } => {
                if *m == 0.0 {
                    return Ok(TensorJet::zeros(n));
                }
                let r2 = norm_squared(x);
                let pw = r2.powf(0.5 * (2.0 - n as f64)) * (2.0 * m);
                let lapse = 1.0 + r2 - pw;
                if !(lapse.value() > 0.0) {
                    return Err(Error::Domain(format!(
                        "1 + r² - 2m/r^(n-2) = {} <= 0 at r = {}",
                        lapse.value(),
                        r2.value().sqrt()
                    )));
                }
                // (g_rr - b_rr)/r² multiplies x_i x_j
                let psi = pw / ((1.0 + r2) * lapse * r2);
                Ok(TensorJet::from_fn(n, |i, j| x[i] * x[j] * psi))
            }
            Family::Conformal { base, factor } => {
                let u = factor.eval(x);
                if !(u.value() > -1.0) {
                    return Err(Error::Domain(format!(
                        "conformal factor 1 + u = {} not positive",
                        1.0 + u.value()
                    )));
                }
                let d = base.deviation(x)?;
                let b = hyperbolic_components(x);
                Ok(TensorJet::from_fn(n, |i, j| {
                    let full = *b.get(i, j) + *d.get(i, j);
                    *d.get(i, j) + full * u
                }))
            }
            Family::Perturbed { base, terms } => {
                let mut d = base.deviation(x)?;
                for t in terms {
                    d = d.add(&t.components(x));
                }
                Ok(d)
            }
        }
    }
}

fn min_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Largest root of `1 + r² - 2m r^{2-n} = 0`.
pub fn schwarzschild_horizon(n: usize, m: f64) -> Option<f64> {
    if m <= 0.0 {
        return None;
    }
    let f = |r: f64| 1.0 + r * r - 2.0 * m * r.powi(2 - n as i32);
    let (mut lo, mut hi) = (1e-12_f64, 1.0_f64);
    while f(hi) <= 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// A serializable metric specification: family, dimension, derivative mode
/// and an optional chart rotation (`g ↦ R_* g`).
#[derive(Clone, Debug, PartialEq)]
pub struct MetricSpec {
    pub n: usize,
    pub family: Family,
    pub derivatives: DerivativeMode,
    pub rotation: Option<Vec<f64>>,
}

pub fn hyperbolic_metric(n: usize) -> Result<MetricSpec> {
    MetricSpec::new(n, Family::Hyperbolic)
}

pub fn schwarzschild_ads(n: usize, m: f64) -> Result<MetricSpec> {
    MetricSpec::new(n, Family::SchwarzschildAds { m })
}

impl MetricSpec {
    /// Validated spec with the default derivative mode: analytic, except for
    /// families that carry perturbation terms, which use finite differences.
    pub fn new(n: usize, family: Family) -> Result<Self> {
        check_dim(n)?;
        family.validate(n)?;
        let derivatives = if family.has_tabulated() {
            DerivativeMode::default_finite_difference()
        } else {
            DerivativeMode::Analytic
        };
        Ok(MetricSpec {
            n,
            family,
            derivatives,
            rotation: None,
        })
    }

    pub fn with_derivatives(mut self, mode: DerivativeMode) -> Result<Self> {
        if let DerivativeMode::FiniteDifference { relative_step } = mode {
            if !(relative_step > 0.0 && relative_step < 0.1) {
                return Err(Error::InvalidParameter(format!(
                    "finite-difference step {relative_step} out of range"
                )));
            }
        }
        self.derivatives = mode;
        Ok(self)
    }

    /// Push-forward under the rotation `R` (row-major, orthogonal, det +1).
    /// The rotation is folded into the family where possible, so rotating a
    /// rotationally symmetric family is the identity.
    pub fn rotated(&self, rot: &[f64]) -> Result<Self> {
        check_rotation(self.n, rot)?;
        Ok(MetricSpec {
            n: self.n,
            family: self.family.rotated(rot),
            derivatives: self.derivatives,
            rotation: self.rotation.clone(),
        })
    }

    /// Applies `R` as an explicit chart map, `(R_* g)(x) = R g(Rᵀx) Rᵀ`.
    pub fn with_chart_rotation(mut self, rot: Vec<f64>) -> Result<Self> {
        check_rotation(self.n, &rot)?;
        self.rotation = Some(match self.rotation.take() {
            None => rot,
            Some(prev) => {
                let n = self.n;
                let a = nalgebra::DMatrix::from_row_slice(n, n, &rot);
                let b = nalgebra::DMatrix::from_row_slice(n, n, &prev);
                let c = a * b;
                (0..n * n).map(|k| c[(k / n, k % n)]).collect()
            }
        });
        Ok(self)
    }

    fn rotated_deviation_values(&self, x: &[Jet]) -> Result<TensorJet> {
        match &self.rotation {
            None => self.family.deviation(x),
            Some(rot) => {
                let n = self.n;
                // y = Rᵀ x
                let y: Vec<Jet> = (0..n)
                    .map(|i| {
                        let mut acc = Jet::constant(x[0].dim(), 0.0);
                        for (k, xk) in x.iter().enumerate() {
                            acc += *xk * rot[k * n + i];
                        }
                        acc
                    })
                    .collect();
                Ok(self.family.deviation(&y)?.congruence(rot))
            }
        }
    }

    fn deviation_fd(&self, x: &[f64], relative_step: f64) -> Result<TensorJet> {
        let n = self.n;
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let h = relative_step * (1.0 + r);
        let eval = |dx: &[(usize, f64)]| -> Result<Vec<f64>> {
            let mut y = x.to_vec();
            for &(k, s) in dx {
                y[k] += s;
            }
            let yj: Vec<Jet> = y.iter().map(|&v| Jet::constant(0, v)).collect();
            Ok(self.rotated_deviation_values(&yj)?.values())
        };
        let center = eval(&[])?;
        let mut plus = Vec::with_capacity(n);
        let mut minus = Vec::with_capacity(n);
        for k in 0..n {
            plus.push(eval(&[(k, h)])?);
            minus.push(eval(&[(k, -h)])?);
        }
        let mut second = vec![vec![0.0; n * n]; n * n];
        for k in 0..n {
            let pp = eval(&[(k, 2.0 * h)])?;
            let mm = eval(&[(k, -2.0 * h)])?;
            for c in 0..n * n {
                second[k * n + k][c] = (pp[c] - 2.0 * center[c] + mm[c]) / (4.0 * h * h);
            }
            for l in k + 1..n {
                let a = eval(&[(k, h), (l, h)])?;
                let b = eval(&[(k, h), (l, -h)])?;
                let c_ = eval(&[(k, -h), (l, h)])?;
                let d = eval(&[(k, -h), (l, -h)])?;
                for c in 0..n * n {
                    let v = (a[c] - b[c] - c_[c] + d[c]) / (4.0 * h * h);
                    second[k * n + l][c] = v;
                    second[l * n + k][c] = v;
                }
            }
        }
        Ok(TensorJet::from_fn(n, |i, j| {
            let c = i * n + j;
            let grad: Vec<f64> = (0..n)
                .map(|k| (plus[k][c] - minus[k][c]) / (2.0 * h))
                .collect();
            let hess: Vec<f64> = (0..n * n).map(|kl| second[kl][c]).collect();
            Jet::from_parts(center[c], &grad, &hess)
        }))
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::InvalidPoint(format!(
                "point has {} coordinates, metric dimension is {}",
                x.len(),
                self.n
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        Ok(())
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::Hyperbolic => "hyperbolic",
            Family::SchwarzschildAds { .. } => "schwarzschild_ads",
            Family::Conformal { .. } => "conformal",
            Family::Perturbed { .. } => "perturbed",
        }
    }

    /// `g_rr - b_rr` for Schwarzschild–AdS decays like `r^{-n-2}`, so frame
    /// components of `g - b` decay like `r^{-n}`: the open end of the
    /// admissible decay window.
    pub fn borderline_decay(&self) -> bool {
        fn walk(f: &Family) -> bool {
            match f {
                Family::SchwarzschildAds { m } => *m > 0.0,
                Family::Hyperbolic => false,
                Family::Conformal { base, .. } | Family::Perturbed { base, .. } => walk(base),
            }
        }
        walk(&self.family)
    }
}

impl Metric for MetricSpec {
    fn dim(&self) -> usize {
        self.n
    }

    fn jet(&self, x: &[f64]) -> Result<TensorJet> {
        let d = self.deviation(x)?;
        Ok(hyperbolic_jet(x).add(&d))
    }

    fn deviation(&self, x: &[f64]) -> Result<TensorJet> {
        self.check_point(x)?;
        match self.derivatives {
            DerivativeMode::Analytic => self.rotated_deviation_values(&Jet::coordinates(x)),
            DerivativeMode::FiniteDifference { relative_step } => {
                self.deviation_fd(x, relative_step)
            }
        }
    }

    fn rotationally_symmetric(&self) -> bool {
        self.family.symmetric()
    }

    fn horizon_radius(&self) -> Option<f64> {
        self.family.horizon(self.n)
    }

    fn decay_hint(&self) -> Option<f64> {
        self.family.decay(self.n)
    }
}

/// `base + scale · field`.
pub struct PerturbedMetric<'a> {
    pub base: &'a dyn Metric,
    pub field: &'a dyn SymmetricField,
    pub scale: f64,
}

impl Metric for PerturbedMetric<'_> {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn jet(&self, x: &[f64]) -> Result<TensorJet> {
        Ok(self.base.jet(x)?.add(&self.field.jet(x)?.scale(self.scale)))
    }
    fn deviation(&self, x: &[f64]) -> Result<TensorJet> {
        Ok(self
            .base
            .deviation(x)?
            .add(&self.field.jet(x)?.scale(self.scale)))
    }
    fn horizon_radius(&self) -> Option<f64> {
        self.base.horizon_radius()
    }
    fn decay_hint(&self) -> Option<f64> {
        self.base.decay_hint()
    }
}

/// `(1 + u) · base` for a scalar field `u`.
pub struct ConformalMetric<'a> {
    pub base: &'a dyn Metric,
    pub u: &'a dyn ScalarField,
}

impl Metric for ConformalMetric<'_> {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn jet(&self, x: &[f64]) -> Result<TensorJet> {
        let u = self.u.jet(x)? + 1.0;
        if !(u.value() > 0.0) {
            return Err(Error::Domain(format!("conformal factor {} not positive", u.value())));
        }
        Ok(self.base.jet(x)?.scale_by(&u))
    }
    fn deviation(&self, x: &[f64]) -> Result<TensorJet> {
        let u = self.u.jet(x)?;
        let g = self.base.jet(x)?;
        Ok(self.base.deviation(x)?.add(&g.scale_by(&u)))
    }
    fn rotationally_symmetric(&self) -> bool {
        false
    }
    fn horizon_radius(&self) -> Option<f64> {
        self.base.horizon_radius()
    }
}

/// The metric itself viewed as a symmetric tensor field.
pub struct MetricAsField<'a>(pub &'a dyn Metric);

impl SymmetricField for MetricAsField<'_> {
    fn jet(&self, x: &[f64]) -> Result<TensorJet> {
        self.0.jet(x)
    }
}

/// `g - b` viewed as a symmetric tensor field.
pub struct DeviationField<'a>(pub &'a dyn Metric);

impl SymmetricField for DeviationField<'_> {
    fn jet(&self, x: &[f64]) -> Result<TensorJet> {
        self.0.deviation(x)
    }
}

// ---------------------------------------------------------------------------
// JSON schema: {"family": ..., "n": ..., "params": {...}, "derivatives"?, "rotation"?}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    family: String,
    n: usize,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    params: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    derivatives: Option<DerivativeMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rotation: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    family: String,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    params: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SadsParams {
    m: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConformalParams {
    #[serde(default = "hyperbolic_raw")]
    base: Box<RawFamily>,
    u: RadialProfile,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PerturbedParams {
    #[serde(default = "hyperbolic_raw")]
    base: Box<RawFamily>,
    terms: Vec<PerturbationTerm>,
}

fn hyperbolic_raw() -> Box<RawFamily> {
    Box::new(RawFamily {
        family: "hyperbolic".into(),
        params: serde_json::Value::Null,
    })
}

fn parse_params<T: serde::de::DeserializeOwned>(v: &serde_json::Value) -> std::result::Result<T, String> {
    let v = if v.is_null() {
        serde_json::Value::Object(Default::default())
    } else {
        v.clone()
    };
    serde_json::from_value(v).map_err(|e| e.to_string())
}

fn family_from_raw(raw: &RawFamily) -> std::result::Result<Family, String> {
    match raw.family.as_str() {
        "hyperbolic" => {
            parse_params::<NoParams>(&raw.params)?;
            Ok(Family::Hyperbolic)
        }
        "schwarzschild_ads" => {
            let p: SadsParams = parse_params(&raw.params)?;
            Ok(Family::SchwarzschildAds { m: p.m })
        }
        "conformal" => {
            let p: ConformalParams = parse_params(&raw.params)?;
            Ok(Family::Conformal {
                base: Box::new(family_from_raw(&p.base)?),
                factor: p.u,
            })
        }
        "perturbed" => {
            let p: PerturbedParams = parse_params(&raw.params)?;
            Ok(Family::Perturbed {
                base: Box::new(family_from_raw(&p.base)?),
                terms: p.terms,
            })
        }
        other => Err(format!("unknown metric family `{other}`")),
    }
}

fn family_to_raw(f: &Family) -> RawFamily {
    let (family, params) = match f {
        Family::Hyperbolic => ("hyperbolic", serde_json::Value::Null),
        Family::SchwarzschildAds { m } => (
            "schwarzschild_ads",
            serde_json::to_value(SadsParams { m: *m }).unwrap(),
        ),
        Family::Conformal { base, factor } => (
            "conformal",
            serde_json::to_value(ConformalParams {
                base: Box::new(family_to_raw(base)),
                u: factor.clone(),
            })
            .unwrap(),
        ),
        Family::Perturbed { base, terms } => (
            "perturbed",
            serde_json::to_value(PerturbedParams {
                base: Box::new(family_to_raw(base)),
                terms: terms.clone(),
            })
            .unwrap(),
        ),
    };
    RawFamily {
        family: family.into(),
        params,
    }
}

impl TryFrom<RawSpec> for MetricSpec {
    type Error = String;
    fn try_from(raw: RawSpec) -> std::result::Result<Self, String> {
        let family = family_from_raw(&RawFamily {
            family: raw.family,
            params: raw.params,
        })?;
        let mut spec = MetricSpec::new(raw.n, family).map_err(|e| e.to_string())?;
        if let Some(mode) = raw.derivatives {
            spec = spec.with_derivatives(mode).map_err(|e| e.to_string())?;
        }
        if let Some(rows) = raw.rotation {
            if rows.len() != spec.n || rows.iter().any(|r| r.len() != spec.n) {
                return Err(format!("rotation must be {0}x{0}", spec.n));
            }
            spec = spec
                .with_chart_rotation(rows.concat())
                .map_err(|e| e.to_string())?;
        }
        Ok(spec)
    }
}

impl From<&MetricSpec> for RawSpec {
    fn from(s: &MetricSpec) -> Self {
        let f = family_to_raw(&s.family);
        let default_mode = if s.family.has_tabulated() {
            DerivativeMode::default_finite_difference()
        } else {
            DerivativeMode::Analytic
        };
        RawSpec {
            family: f.family,
            n: s.n,
            params: f.params,
            derivatives: (s.derivatives != default_mode).then_some(s.derivatives),
            rotation: s
                .rotation
                .as_ref()
                .map(|r| r.chunks(s.n).map(<[f64]>::to_vec).collect()),
        }
    }
}

impl Serialize for MetricSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawSpec::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MetricSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSpec::deserialize(d)?;
        MetricSpec::try_from(raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperbolic_radial_component() {
        // at r = 2 along x_1, g_rr = g_11 = 1/(1 + 4)
        let b = hyperbolic_metric(3).unwrap();
        let g = b.jet(&[2.0, 0.0, 0.0]).unwrap();
        assert!((g.value(0, 0) - 0.2).abs() < 1e-15);
        assert_eq!(g.value(0, 1), 0.0);
        assert!((g.value(1, 1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn schwarzschild_radial_component() {
        let g = schwarzschild_ads(3, 0.5).unwrap();
        let j = g.jet(&[10.0, 0.0, 0.0]).unwrap();
        assert!((j.value(0, 0) - 1.0 / 100.9).abs() < 1e-15);
    }

    #[test]
    fn zero_mass_is_hyperbolic() {
        let b = hyperbolic_metric(4).unwrap();
        let s = schwarzschild_ads(4, 0.0).unwrap();
        let x = [0.3, -1.2, 2.2, 0.9];
        let (gb, gs) = (b.jet(&x).unwrap(), s.jet(&x).unwrap());
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(gb.get(i, j), gs.get(i, j));
            }
        }
    }

    #[test]
    fn horizon_is_rejected() {
        let g = schwarzschild_ads(3, 0.5).unwrap();
        let rh = g.horizon_radius().unwrap();
        assert!((1.0 + rh * rh - 1.0 / rh).abs() < 1e-12);
        assert!(matches!(g.jet(&[0.5 * rh, 0.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_low_dimension_and_negative_mass() {
        assert!(matches!(hyperbolic_metric(2), Err(Error::Dimension(2))));
        assert!(schwarzschild_ads(3, -1.0).is_err());
    }

    #[test]
    fn finite_difference_matches_analytic() {
        let fam = Family::Perturbed {
            base: Box::new(Family::SchwarzschildAds { m: 0.3 }),
            terms: vec![PerturbationTerm {
                tensor: TermTensor::Radial,
                radial: RadialProfile::Decay {
                    amplitude: 0.2,
                    power: 3.0,
                },
                angular: AngularProfile::Cap {
                    axis: vec![1.0, 0.0, 0.0],
                    width: 0.7,
                },
            }],
        };
        let fd = MetricSpec::new(3, fam.clone()).unwrap();
        assert!(matches!(fd.derivatives, DerivativeMode::FiniteDifference { .. }));
        let an = fd.clone().with_derivatives(DerivativeMode::Analytic).unwrap();
        let x = [2.0, 1.0, -0.5];
        let (a, f) = (an.jet(&x).unwrap(), fd.jet(&x).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert!((a.d(i, j, k) - f.d(i, j, k)).abs() < 1e-8);
                    for l in 0..3 {
                        assert!((a.dd(i, j, k, l) - f.dd(i, j, k, l)).abs() < 1e-5);
                    }
                }
            }
        }
    }

    #[test]
    fn json_round_trip_and_strictness() {
        let text = r#"{"family":"schwarzschild_ads","n":3,"params":{"m":0.5}}"#;
        let spec: MetricSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec, schwarzschild_ads(3, 0.5).unwrap());
        let back = serde_json::to_string(&spec).unwrap();
        let again: MetricSpec = serde_json::from_str(&back).unwrap();
        assert_eq!(again, spec);
        assert!(serde_json::from_str::<MetricSpec>(r#"{"family":"hyperbolic","n":3,"extra":1}"#).is_err());
        assert!(serde_json::from_str::<MetricSpec>(r#"{"family":"schwarzschild_ads","n":3,"params":{"m":1,"q":2}}"#).is_err());
        assert!(serde_json::from_str::<MetricSpec>(r#"{"family":"kerr","n":3}"#).is_err());
        let nested = r#"{"family":"perturbed","n":3,"params":{"base":{"family":"schwarzschild_ads","params":{"m":1}},
            "terms":[{"tensor":{"kind":"radial"},"radial":{"kind":"decay","amplitude":0.1,"power":3},
                      "angular":{"kind":"cap","axis":[1,0,0],"width":0.5}}]}}"#;
        let p: MetricSpec = serde_json::from_str(nested).unwrap();
        assert_eq!(p.family_name(), "perturbed");
        let again: MetricSpec = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(again, p);
    }
}
