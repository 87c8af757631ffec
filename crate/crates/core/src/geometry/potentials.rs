//! Static potentials of the hyperbolic metric: `V_0 = √(1+r²)` and `V_i = x_i`,
//! and their linear combinations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::fields::{ScalarField, Support};
use crate::jet::{norm_squared, Jet};

/// `c_0 √(1+|x|²) + Σ c_i x_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StaticPotential {
    pub c0: f64,
    pub c: Vec<f64>,
}

impl StaticPotential {
    pub fn lapse(n: usize) -> Self {
        StaticPotential {
            c0: 1.0,
            c: vec![0.0; n],
        }
    }

    /// `x_i` with a zero-based index.
    pub fn coordinate(n: usize, i: usize) -> Self {
        let mut c = vec![0.0; n];
        c[i] = 1.0;
        StaticPotential { c0: 0.0, c }
    }

    pub fn new(c0: f64, c: Vec<f64>) -> Result<Self> {
        if !c0.is_finite() || c.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("potential coefficients must be finite".into()));
        }
        Ok(StaticPotential { c0, c })
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn eval(&self, x: &[Jet]) -> Jet {
        let n = x.first().map_or(0, |j| j.dim());
        let mut v = Jet::constant(n, 0.0);
        if self.c0 != 0.0 {
            v += (1.0 + norm_squared(x)).sqrt() * self.c0;
        }
        for (xi, ci) in x.iter().zip(&self.c) {
            if *ci != 0.0 {
                v += *xi * *ci;
            }
        }
        v
    }

    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.c0 != 0.0 {
            parts.push(if self.c0 == 1.0 {
                "V0".to_string()
            } else {
                format!("{}*V0", self.c0)
            });
        }
        for (i, ci) in self.c.iter().enumerate() {
            if *ci != 0.0 {
                parts.push(if *ci == 1.0 {
                    format!("x{}", i + 1)
                } else {
                    format!("{}*x{}", ci, i + 1)
                });
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }
}

impl ScalarField for StaticPotential {
    fn jet(&self, x: &[f64]) -> Result<Jet> {
        Ok(self.eval(&Jet::coordinates(x)))
    }
    fn support(&self) -> Support {
        Support::Decaying { rate: Some(-1.0) }
    }
}

/// `V_0, V_1, …, V_n`.
pub fn static_potential_basis(n: usize) -> Vec<StaticPotential> {
    let mut out = vec![StaticPotential::lapse(n)];
    out.extend((0..n).map(|i| StaticPotential::coordinate(n, i)));
    out
}

/// `√(1 + r² - 2m r^{2-n})`, the static potential of Schwarzschild–AdS in its
/// own radial coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchwarzschildLapse {
    pub n: usize,
    pub m: f64,
}

impl ScalarField for SchwarzschildLapse {
    fn jet(&self, x: &[f64]) -> Result<Jet> {
        let xs = Jet::coordinates(x);
        let r2 = norm_squared(&xs);
        let w = 1.0 + r2 - r2.powf(0.5 * (2.0 - self.n as f64)) * (2.0 * self.m);
        if !(w.value() > 0.0) {
            return Err(Error::Domain(format!("lapse² = {} <= 0", w.value())));
        }
        Ok(w.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let x = [0.3, -2.0, 1.5];
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let b = static_potential_basis(3);
        let v0 = b[0].jet(&x).unwrap();
        assert!((v0.value() - (1.0 + r2).sqrt()).abs() < 1e-14);
        // ∂_1 V_0 = x_1 / V_0, ∂_1∂_2 V_0 = -x_1 x_2 / V_0³
        let s = (1.0 + r2).sqrt();
        assert!((v0.d(0) - x[0] / s).abs() < 1e-14);
        assert!((v0.dd(0, 1) + x[0] * x[1] / s.powi(3)).abs() < 1e-14);
        let v2 = b[2].jet(&x).unwrap();
        assert_eq!(v2.value(), -2.0);
        assert_eq!(v2.d(1), 1.0);
        assert_eq!(v2.dd(1, 1), 0.0);
        assert_eq!(b[2].label(), "x2");
    }
}
