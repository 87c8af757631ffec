//! Closed-form radial and angular profiles used to build metric families,
//! perturbations and deformation targets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::fields::radial_bump;
use crate::jet::{norm_squared, Jet};

/// A radial function of `|x|`, smooth on all of `ℝⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadialProfile {
    /// `amplitude · (1 + r²)^{-power/2}`, asymptotic to `amplitude · r^{-power}`.
    Decay { amplitude: f64, power: f64 },
    /// `amplitude · (1 - s²)^order` on `inner < r < outer`, zero elsewhere.
    Bump {
        amplitude: f64,
        inner: f64,
        outer: f64,
        #[serde(default = "default_bump_order")]
        order: i32,
    },
}

fn default_bump_order() -> i32 {
    4
}

impl RadialProfile {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RadialProfile::Decay { amplitude, power } => {
                if !amplitude.is_finite() || !power.is_finite() {
                    return Err(Error::InvalidParameter("decay profile must be finite".into()));
                }
            }
            RadialProfile::Bump {
                amplitude,
                inner,
                outer,
                order,
            } => {
                if !amplitude.is_finite() || !(inner > 0.0 && outer > inner) {
                    return Err(Error::InvalidParameter(
                        "bump profile needs 0 < inner < outer".into(),
                    ));
                }
                if order < 3 {
                    return Err(Error::InvalidParameter("bump order must be >= 3".into()));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &[Jet]) -> Jet {
        match *self {
            RadialProfile::Decay { amplitude, power } => {
                (1.0 + norm_squared(x)).powf(-0.5 * power) * amplitude
            }
            RadialProfile::Bump {
                amplitude,
                inner,
                outer,
                order,
            } => radial_bump(x, inner, outer, order) * amplitude,
        }
    }

    /// Nominal decay exponent, `None` for compact support.
    pub fn decay(&self) -> Option<f64> {
        match *self {
            RadialProfile::Decay { power, .. } => Some(power),
            RadialProfile::Bump { .. } => None,
        }
    }

    pub fn support_outer(&self) -> Option<f64> {
        match *self {
            RadialProfile::Bump { outer, .. } => Some(outer),
            RadialProfile::Decay { .. } => None,
        }
    }
}

/// A function of the direction `ω = x/|x|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AngularProfile {
    Isotropic,
    /// `exp((ω·axis - 1)/width²)`, concentrated around `axis`.
    Cap { axis: Vec<f64>, width: f64 },
    /// `1 + strength · ω·axis`.
    Dipole { axis: Vec<f64>, strength: f64 },
}

impl AngularProfile {
    pub fn validate(&self, n: usize) -> Result<()> {
        let axis = match self {
            AngularProfile::Isotropic => return Ok(()),
            AngularProfile::Cap { axis, width } => {
                if !(*width > 0.0) {
                    return Err(Error::InvalidParameter("cap width must be positive".into()));
                }
                axis
            }
            AngularProfile::Dipole { axis, strength } => {
                if strength.abs() >= 1.0 {
                    return Err(Error::InvalidParameter("dipole strength must be < 1".into()));
                }
                axis
            }
        };
        if axis.len() != n {
            return Err(Error::InvalidParameter(format!("axis must have {n} entries")));
        }
        let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("axis must be a unit vector".into()));
        }
        Ok(())
    }

    pub fn is_isotropic(&self) -> bool {
        matches!(self, AngularProfile::Isotropic)
    }

    pub fn eval(&self, x: &[Jet]) -> Jet {
        let n = x.first().map_or(0, |j| j.dim());
        let dot = |axis: &[f64]| {
            let r = norm_squared(x).sqrt();
            let mut c = Jet::constant(n, 0.0);
            for (xi, a) in x.iter().zip(axis) {
                c += *xi * *a;
            }
            c / r
        };
        match self {
            AngularProfile::Isotropic => Jet::constant(n, 1.0),
            AngularProfile::Cap { axis, width } => ((dot(axis) - 1.0) / (width * width)).exp(),
            AngularProfile::Dipole { axis, strength } => dot(axis) * *strength + 1.0,
        }
    }

    pub fn rotated(&self, rot: &[f64]) -> AngularProfile {
        let rot_axis = |axis: &[f64]| crate::geometry::chart::rotate(rot, axis);
        match self {
            AngularProfile::Isotropic => AngularProfile::Isotropic,
            AngularProfile::Cap { axis, width } => AngularProfile::Cap {
                axis: rot_axis(axis),
                width: *width,
            },
            AngularProfile::Dipole { axis, strength } => AngularProfile::Dipole {
                axis: rot_axis(axis),
                strength: *strength,
            },
        }
    }
}
