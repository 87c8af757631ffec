//! Scalar and symmetric 2-tensor fields evaluated as jets in chart coordinates.

use crate::error::Result;
use crate::jet::Jet;

/// Symmetric `n x n` array of jets, stored row-major.
#[derive(Clone, Debug)]
pub struct TensorJet {
    n: usize,
    c: Vec<Jet>,
}

impl TensorJet {
    pub fn zeros(n: usize) -> Self {
        TensorJet {
            n,
            c: vec![Jet::constant(n, 0.0); n * n],
        }
    }

    /// Builds the tensor from its upper triangle; `f(i, j)` is called once per `i <= j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Jet) -> Self {
        let mut t = TensorJet::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                t.c[i * n + j] = v;
                t.c[j * n + i] = v;
            }
        }
        t
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Jet {
        &self.c[i * self.n + j]
    }
    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.c[i * self.n + j].value()
    }
    /// `∂_k T_ij`
    #[inline]
    pub fn d(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[i * self.n + j].d(k)
    }
    /// `∂_k ∂_l T_ij`
    #[inline]
    pub fn dd(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.c[i * self.n + j].dd(k, l)
    }

    pub fn values(&self) -> Vec<f64> {
        self.c.iter().map(Jet::value).collect()
    }

    pub fn add(&self, other: &TensorJet) -> TensorJet {
        TensorJet::from_fn(self.n, |i, j| *self.get(i, j) + *other.get(i, j))
    }

    pub fn scale(&self, s: f64) -> TensorJet {
        TensorJet::from_fn(self.n, |i, j| *self.get(i, j) * s)
    }

    pub fn scale_by(&self, s: &Jet) -> TensorJet {
        TensorJet::from_fn(self.n, |i, j| *self.get(i, j) * *s)
    }

    /// `M T Mᵀ` for a constant matrix `M` (row-major).
    pub fn congruence(&self, m: &[f64]) -> TensorJet {
        let n = self.n;
        TensorJet::from_fn(n, |i, j| {
            let mut acc = Jet::constant(n, 0.0);
            for a in 0..n {
                for b in 0..n {
                    let w = m[i * n + a] * m[j * n + b];
                    if w != 0.0 {
                        acc += *self.get(a, b) * w;
                    }
                }
            }
            acc
        })
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|j| *j == Jet::constant(j.dim(), 0.0))
    }
}

/// Where a field is (possibly) nonzero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Support {
    /// Vanishes outside the closed coordinate annulus `inner <= |x| <= outer`.
    Annulus { inner: f64, outer: f64 },
    /// Not compactly supported; decays like `|x|^{-rate}` when known.
    Decaying { rate: Option<f64> },
}

impl Support {
    pub fn contained_in(&self, inner: f64, outer: f64) -> bool {
        match *self {
            Support::Annulus { inner: a, outer: b } => a >= inner && b <= outer,
            Support::Decaying { .. } => false,
        }
    }
}

pub trait ScalarField: Send + Sync {
    fn jet(&self, x: &[f64]) -> Result<Jet>;

    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.jet(x)?.value())
    }

    fn support(&self) -> Support {
        Support::Decaying { rate: None }
    }
}

pub trait SymmetricField: Send + Sync {
    fn jet(&self, x: &[f64]) -> Result<TensorJet>;

    fn support(&self) -> Support {
        Support::Decaying { rate: None }
    }
}

/// A scalar field given by a closure over coordinate jets.
pub struct FnScalar<F> {
    f: F,
    support: Support,
}

impl<F> FnScalar<F>
where
    F: Fn(&[Jet]) -> Jet + Send + Sync,
{
    pub fn new(f: F) -> Self {
        FnScalar {
            f,
            support: Support::Decaying { rate: None },
        }
    }
    pub fn with_support(mut self, support: Support) -> Self {
        self.support = support;
        self
    }
}

impl<F> ScalarField for FnScalar<F>
where
    F: Fn(&[Jet]) -> Jet + Send + Sync,
{
    fn jet(&self, x: &[f64]) -> Result<Jet> {
        Ok((self.f)(&Jet::coordinates(x)))
    }
    fn support(&self) -> Support {
        self.support
    }
}

/// A symmetric tensor field given by a closure over coordinate jets.
pub struct FnTensor<F> {
    f: F,
    support: Support,
}

impl<F> FnTensor<F>
where
    F: Fn(&[Jet]) -> TensorJet + Send + Sync,
{
    pub fn new(f: F) -> Self {
        FnTensor {
            f,
            support: Support::Decaying { rate: None },
        }
    }
    pub fn with_support(mut self, support: Support) -> Self {
        self.support = support;
        self
    }
}

impl<F> SymmetricField for FnTensor<F>
where
    F: Fn(&[Jet]) -> TensorJet + Send + Sync,
{
    fn jet(&self, x: &[f64]) -> Result<TensorJet> {
        Ok((self.f)(&Jet::coordinates(x)))
    }
    fn support(&self) -> Support {
        self.support
    }
}

/// The zero scalar.
pub struct ZeroScalar;

impl ScalarField for ZeroScalar {
    fn jet(&self, x: &[f64]) -> Result<Jet> {
        Ok(Jet::constant(x.len(), 0.0))
    }
    fn support(&self) -> Support {
        Support::Annulus {
            inner: 0.0,
            outer: 0.0,
        }
    }
}

/// The zero tensor.
pub struct ZeroTensor;

impl SymmetricField for ZeroTensor {
    fn jet(&self, x: &[f64]) -> Result<TensorJet> {
        Ok(TensorJet::zeros(x.len()))
    }
    fn support(&self) -> Support {
        Support::Annulus {
            inner: 0.0,
            outer: 0.0,
        }
    }
}

/// Sum of a scalar field and a scaled second one.
pub struct SumScalar<'a> {
    pub a: &'a dyn ScalarField,
    pub b: &'a dyn ScalarField,
    pub scale: f64,
}

impl ScalarField for SumScalar<'_> {
    fn jet(&self, x: &[f64]) -> Result<Jet> {
        Ok(self.a.jet(x)? + self.b.jet(x)? * self.scale)
    }
}

/// The tensor `u · T` for a scalar `u` and tensor field `T`.
pub struct ScaledTensor<'a> {
    pub scalar: &'a dyn ScalarField,
    pub tensor: &'a dyn SymmetricField,
}

impl SymmetricField for ScaledTensor<'_> {
    fn jet(&self, x: &[f64]) -> Result<TensorJet> {
        let u = self.scalar.jet(x)?;
        Ok(self.tensor.jet(x)?.scale_by(&u))
    }
    fn support(&self) -> Support {
        self.scalar.support()
    }
}

/// Compact bump `(1 - s^2)^order` in the radial coordinate, with
/// `s = (2|x| - inner - outer)/(outer - inner)`; `C^{order-1}` across the rim.
pub fn radial_bump(x: &[Jet], inner: f64, outer: f64, order: i32) -> Jet {
    let n = x.first().map_or(0, |j| j.dim());
    let r2 = crate::jet::norm_squared(x);
    let r = r2.value().sqrt();
    if r <= inner || r >= outer {
        return Jet::constant(n, 0.0);
    }
    let rj = r2.sqrt();
    let s = (rj * 2.0 - (inner + outer)) / (outer - inner);
    (1.0 - s * s).powi(order)
}
