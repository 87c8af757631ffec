//! Growth/decay classification of a scalar field along geodesic rays.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::geodesic::{integrate_geodesic, GeodesicOptions};
use crate::error::{Error, Result};
use crate::fit::linear_fit;
use crate::geometry::fields::ScalarField;
use crate::geometry::metric::Metric;
use crate::quadrature::angular_grid;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seed {
    pub point: Vec<f64>,
    pub direction: Vec<f64>,
}

/// `count` Fibonacci-lattice directions on `S²`.
pub fn fibonacci_directions(count: usize) -> Vec<Vec<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
            let s = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            vec![s * phi.cos(), s * phi.sin(), z]
        })
        .collect()
}

/// Outward radial seeds `p = radius·ω`, `γ'(0) ∝ ∂_r`, over a fan of
/// directions: Fibonacci for `n = 3`, otherwise the off-pole angular grid
/// with the smallest resolution giving at least `count` points.
pub fn seed_fan(n: usize, count: usize, radius: f64) -> Vec<Seed> {
    let dirs = if n == 3 {
        fibonacci_directions(count)
    } else {
        let mut per: usize = 2;
        while per.pow((n - 1) as u32) < count {
            per += 1;
        }
        angular_grid(n, per).into_iter().take(count).collect()
    };
    dirs.into_iter()
        .map(|w| Seed {
            point: w.iter().map(|c| c * radius).collect(),
            direction: w,
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthBands {
    /// Slopes of `log|V|` against arc length counted as linear growth.
    pub linear: (f64, f64),
    /// Slopes at or below this are decay.
    pub decay_below: f64,
}

impl Default for GrowthBands {
    fn default() -> Self {
        GrowthBands {
            linear: (0.8, 1.2),
            decay_below: -0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "label", rename_all = "snake_case")]
pub enum GrowthLabel {
    LinearGrowth,
    /// `|V| ~ e^{-d t}`, i.e. `|x|^{-d}`; `d` is reported unclamped.
    Decay { d: f64 },
    /// `V` vanishes on the fitted part of the ray.
    DecayInfinite,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedClassification {
    pub seed: Seed,
    pub label: GrowthLabel,
    pub slope: Option<f64>,
    pub residual: Option<f64>,
    /// `(t, |γ(t)|, V(γ(t)))`.
    pub samples: Vec<(f64, f64, f64)>,
}

pub fn classify_seed(
    g: &dyn Metric,
    v: &dyn ScalarField,
    seed: &Seed,
    length: f64,
    bands: &GrowthBands,
    opts: &GeodesicOptions,
) -> Result<SeedClassification> {
    if !(length > 0.0) {
        return Err(Error::InvalidParameter("classification needs a positive length".into()));
    }
    let geo = integrate_geodesic(g, &seed.point, &seed.direction, length, opts)?;
    let radii = geo.radii();
    let mut samples = Vec::with_capacity(geo.t.len());
    for (k, x) in geo.positions.iter().enumerate() {
        let t = geo.t[k];
        samples.push((t, radii[k], v.value(x)?));
    }
    let tail: Vec<&(f64, f64, f64)> = samples.iter().filter(|s| s.0 >= 0.5 * length).collect();
    let nonzero: Vec<(f64, f64)> = tail.iter().filter(|s| s.2 != 0.0).map(|s| (s.0, s.2.abs().ln())).collect();
    if nonzero.is_empty() {
        return Ok(SeedClassification {
            seed: seed.clone(),
            label: GrowthLabel::DecayInfinite,
            slope: None,
            residual: None,
            samples,
        });
    }
    if nonzero.len() < 3 {
        return Err(Error::Solver("too few nonzero samples on the tail".into()));
    }
    let (t, y): (Vec<f64>, Vec<f64>) = nonzero.into_iter().unzip();
    let (slope, _, rms) = linear_fit(&t, &y);
    let label = if slope >= bands.linear.0 && slope <= bands.linear.1 {
        GrowthLabel::LinearGrowth
    } else if slope <= bands.decay_below {
        GrowthLabel::Decay { d: -slope }
    } else {
        GrowthLabel::Indeterminate
    };
    Ok(SeedClassification {
        seed: seed.clone(),
        label,
        slope: Some(slope),
        residual: Some(rms),
        samples,
    })
}

/// Labels every seed; seeds are processed in parallel, results in seed order.
pub fn classify_growth(
    g: &dyn Metric,
    v: &dyn ScalarField,
    seeds: &[Seed],
    length: f64,
    bands: &GrowthBands,
    opts: &GeodesicOptions,
) -> Result<Vec<SeedClassification>> {
    seeds
        .par_iter()
        .map(|s| classify_seed(g, v, s, length, bands, opts))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fields::FnScalar;
    use crate::geometry::metric::hyperbolic_metric;
    use crate::geometry::potentials::StaticPotential;

    #[test]
    fn axis_labels() {
        let b = hyperbolic_metric(3).unwrap();
        let seed = Seed {
            point: vec![1.0, 0.0, 0.0],
            direction: vec![1.0, 0.0, 0.0],
        };
        let opts = GeodesicOptions::default();
        let bands = GrowthBands::default();
        let x1 = StaticPotential::coordinate(3, 0);
        let c = classify_seed(&b, &x1, &seed, 10.0, &bands, &opts).unwrap();
        assert_eq!(c.label, GrowthLabel::LinearGrowth);
        let v = FnScalar::new(|x: &[crate::jet::Jet]| {
            (crate::jet::norm_squared(x) + 1.0).sqrt() - x[0]
        });
        let c = classify_seed(&b, &v, &seed, 10.0, &bands, &opts).unwrap();
        assert!(matches!(c.label, GrowthLabel::Decay { d } if (d - 1.0).abs() < 0.05), "{:?}", c.label);
    }

    #[test]
    fn fibonacci_fan_is_unit() {
        let d = fibonacci_directions(64);
        assert!(d.iter().all(|w| (w.iter().map(|c| c * c).sum::<f64>() - 1.0).abs() < 1e-14));
        assert_eq!(seed_fan(4, 64, 1.0).len(), 64);
    }
}
