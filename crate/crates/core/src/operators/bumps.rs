//! Compactly supported test fields built from radial bumps.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::fields::{radial_bump, ScalarField, Support, SymmetricField, TensorJet};
use crate::geometry::metric::hyperbolic_components;
use crate::jet::{norm_squared, Jet};

/// `h_ij = β(r) (A_ij + Σ_k B_kij x_k/r)` with `β` the radial bump on `[inner, outer]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpTensor {
    pub n: usize,
    pub inner: f64,
    pub outer: f64,
    pub order: i32,
    /// Symmetric `n × n`, row-major.
    pub constant: Vec<f64>,
    /// `n` symmetric `n × n` blocks, row-major.
    pub linear: Vec<f64>,
    /// Sandwich the coefficients between copies of `b`, `h = β b (A + B·x/r) b`,
    /// so that `|h|_b` is bounded by the coefficient size at every radius.
    #[serde(default)]
    pub weighted: bool,
}

impl BumpTensor {
    /// The `b`-weighted version with coefficients scaled by `amplitude`,
    /// suitable as a metric perturbation.
    pub fn weighted(mut self, amplitude: f64) -> Self {
        self.weighted = true;
        self.constant.iter_mut().for_each(|c| *c *= amplitude);
        self.linear.iter_mut().for_each(|c| *c *= amplitude);
        self
    }
}

impl SymmetricField for BumpTensor {
    fn jet(&self, x: &[f64]) -> Result<TensorJet> {
        let n = self.n;
        let xs = Jet::coordinates(x);
        let beta = radial_bump(&xs, self.inner, self.outer, self.order);
        if beta.value() == 0.0 && beta.d(0) == 0.0 {
            return Ok(TensorJet::zeros(n));
        }
        let r = norm_squared(&xs).sqrt();
        let dirs: Vec<Jet> = xs.iter().map(|c| *c / r).collect();
        let core = TensorJet::from_fn(n, |i, j| {
            let mut e = Jet::constant(n, self.constant[i * n + j]);
            for (k, dk) in dirs.iter().enumerate() {
                e += *dk * self.linear[(k * n + i) * n + j];
            }
            beta * e
        });
        if !self.weighted {
            return Ok(core);
        }
        let b = hyperbolic_components(&xs);
        Ok(TensorJet::from_fn(n, |i, j| {
            let mut acc = Jet::constant(n, 0.0);
            for k in 0..n {
                for l in 0..n {
                    acc += *b.get(i, k) * *core.get(k, l) * *b.get(l, j);
                }
            }
            acc
        }))
    }

    fn support(&self) -> Support {
        Support::Annulus {
            inner: self.inner,
            outer: self.outer,
        }
    }
}

/// `u = β(r) (c_0 + Σ c_k x_k/r + c_q x_0 x_1/r²)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpScalar {
    pub n: usize,
    pub inner: f64,
    pub outer: f64,
    pub order: i32,
    pub c0: f64,
    pub linear: Vec<f64>,
    pub quadratic: f64,
}

impl ScalarField for BumpScalar {
    fn jet(&self, x: &[f64]) -> Result<Jet> {
        let xs = Jet::coordinates(x);
        let beta = radial_bump(&xs, self.inner, self.outer, self.order);
        if beta.value() == 0.0 && beta.d(0) == 0.0 {
            return Ok(Jet::constant(self.n, 0.0));
        }
        let r2 = norm_squared(&xs);
        let r = r2.sqrt();
        let mut e = Jet::constant(self.n, self.c0);
        for (k, c) in self.linear.iter().enumerate() {
            e += xs[k] / r * *c;
        }
        e += xs[0] * xs[1] / r2 * self.quadratic;
        Ok(beta * e)
    }

    fn support(&self) -> Support {
        Support::Annulus {
            inner: self.inner,
            outer: self.outer,
        }
    }
}

/// A tensor and a scalar sharing one support annulus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactPair {
    pub h: BumpTensor,
    pub u: BumpScalar,
}

impl CompactPair {
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let inner = rng.random_range(1.5..3.0);
        let outer = inner + rng.random_range(2.0..4.0);
        let sym = |rng: &mut R| {
            let mut m = vec![0.0; n * n];
            for i in 0..n {
                for j in i..n {
                    let v = rng.random_range(-1.0..1.0);
                    m[i * n + j] = v;
                    m[j * n + i] = v;
                }
            }
            m
        };
        let constant = sym(rng);
        let linear: Vec<f64> = (0..n).flat_map(|_| sym(rng).into_iter().map(|v| 0.5 * v)).collect();
        let h = BumpTensor {
            n,
            inner,
            outer,
            order: rng.random_range(5..=8),
            constant,
            linear,
            weighted: false,
        };
        let u = BumpScalar {
            n,
            inner,
            outer,
            order: rng.random_range(5..=8),
            c0: rng.random_range(-1.0..1.0),
            linear: (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
            quadratic: rng.random_range(-1.0..1.0),
        };
        CompactPair { h, u }
    }
}

/// `count` pairs from a ChaCha stream seeded with `seed`.
pub fn random_pairs(n: usize, count: usize, seed: u64) -> Vec<CompactPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| CompactPair::random(n, &mut rng)).collect()
}
