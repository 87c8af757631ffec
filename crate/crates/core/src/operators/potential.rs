//! Scalar potentials tagged with their asymptotic behavior.

use serde::{Deserialize, Serialize};

use super::radial::RadialFunction;
use crate::asymptotics::{estimate_decay_rate, sup_over_sphere};
use crate::error::Result;
use crate::geometry::fields::{ScalarField, Support};
use crate::geometry::potentials::StaticPotential;
use crate::jet::Jet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AsymptoticTag {
    /// `f = a_0 √(1+r²) - Σ a_i x_i + o(r)`.
    LinearGrowth { a0: f64, a: Vec<f64> },
    Decaying { rate: Option<f64> },
    Compact { inner: f64, outer: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSource {
    Static { potential: StaticPotential },
    /// `base + correction(|x|)`.
    Corrected { base: StaticPotential, correction: RadialFunction },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialField {
    pub source: PotentialSource,
    pub tag: AsymptoticTag,
}

impl PotentialField {
    pub fn from_static(v: StaticPotential) -> Self {
        let tag = AsymptoticTag::LinearGrowth {
            a0: v.c0,
            a: v.c.iter().map(|c| -c).collect(),
        };
        PotentialField {
            source: PotentialSource::Static { potential: v },
            tag,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.source {
            PotentialSource::Static { potential } => potential.dim(),
            PotentialSource::Corrected { base, .. } => base.dim(),
        }
    }

    /// Compares the tag with a decay fit of `sup_ω |f|` on `radii`.
    pub fn tag_consistent(&self, radii: &[f64]) -> Result<bool> {
        let n = self.dim();
        let est = estimate_decay_rate(|r| sup_over_sphere(n, 4, r, |x| self.value(x)), radii, 1e-12)?;
        Ok(match (&self.tag, est.exponent()) {
            (AsymptoticTag::LinearGrowth { .. }, Some(q)) => (q + 1.0).abs() < 0.1,
            (AsymptoticTag::LinearGrowth { a0, a }, None) => *a0 == 0.0 && a.iter().all(|c| *c == 0.0),
            (AsymptoticTag::Decaying { rate }, Some(q)) => rate.is_none_or(|s| q >= 0.9 * s),
            (AsymptoticTag::Decaying { .. }, None) => true,
            (AsymptoticTag::Compact { outer, .. }, _) => {
                radii.iter().all(|&r| r <= *outer) || est.exponent().is_none()
            }
        })
    }
}

impl ScalarField for PotentialField {
    fn jet(&self, x: &[f64]) -> Result<Jet> {
        let xs = Jet::coordinates(x);
        match &self.source {
            PotentialSource::Static { potential } => Ok(potential.eval(&xs)),
            PotentialSource::Corrected { base, correction } => Ok(base.eval(&xs) + correction.jet(x)?),
        }
    }

    fn support(&self) -> Support {
        match self.tag {
            AsymptoticTag::Compact { inner, outer } => Support::Annulus { inner, outer },
            AsymptoticTag::Decaying { rate } => Support::Decaying { rate },
            AsymptoticTag::LinearGrowth { .. } => Support::Decaying { rate: None },
        }
    }
}
