//! Randomized problems in the decaying-coefficient class and the sampled
//! checks of the comparison, decaying-solution and remainder lemmas.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::problem::{
    build_decaying_solution, fundamental_pair, particular_solution, solve_ivp, Coefficient, DecayBounds, OdeProblem,
    RemainderFit,
};
use crate::error::Result;

/// Decay rates drawn for the random class; `1` is the resonant case.
pub const RATES: [f64; 6] = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0];

/// `u'' = P u' + Q u` with `Q = q_0 + b e^{-dt} > 0`.
pub fn random_general(rng: &mut impl Rng, horizon: f64) -> OdeProblem {
    let d = rng.random_range(0.5..3.0);
    let q0 = rng.random_range(0.2..2.0);
    let mut q = Coefficient::exp(rng.random_range(-0.5 * q0..1.0), d);
    q.0.push(super::problem::ExpTerm {
        amplitude: q0,
        rate: 0.0,
        power: 0,
        frequency: 0.0,
    });
    OdeProblem {
        p: Coefficient::exp(rng.random_range(-0.5..0.5), d),
        q,
        f: Coefficient::zero(),
        q_offset: 0.0,
        horizon,
        bounds: DecayBounds { c0: 1.0, d },
        grid_step: 0.05,
    }
}

/// `u'' = P u' + (1 + Q) u + f` with `|P|, |Q|, |f| <= c_0 e^{-dt}`.
pub fn random_perturbed(rng: &mut impl Rng, horizon: f64) -> OdeProblem {
    let d = RATES[rng.random_range(0..RATES.len())];
    let a = rng.random_range(-0.5..0.5);
    let b = rng.random_range(-0.5..0.5);
    let c = rng.random_range(0.5..1.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let p = Coefficient::exp(a, d);
    let q = Coefficient::exp(b, d);
    let f = Coefficient::exp(c, d);
    let c0 = a.abs().max(b.abs()).max(c.abs());
    OdeProblem::new(p, q, f, horizon, DecayBounds { c0, d })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaCase {
    pub index: usize,
    pub general: OdeProblem,
    pub perturbed: OdeProblem,
    /// Sign changes of a random nonzero solution of the general problem.
    pub sign_changes: usize,
    /// `u > v` and `u' > v'` for `t > 0` when `u(0) >= v(0)`, `u'(0) >= v'(0)`.
    pub comparison_holds: bool,
    /// Decaying solution positive, decreasing, and reached by a monotone exhaustion.
    pub decaying_ok: bool,
    pub certificate: f64,
    /// Certificate on half the horizon.
    pub certificate_half: f64,
    pub wronskian_bound_holds: bool,
    pub remainder: RemainderFit,
}

impl LemmaCase {
    pub fn certificate_ratio(&self) -> f64 {
        self.certificate / self.certificate_half
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaSuiteReport {
    pub seed: u64,
    pub horizon: f64,
    pub max_sign_changes: usize,
    pub comparison_failures: usize,
    pub decaying_failures: usize,
    pub wronskian_failures: usize,
    pub max_certificate: f64,
    /// Range of `C(T)/C(T/2)` over the cases.
    pub certificate_ratio: (f64, f64),
    /// Worst `|λ - d|/d` over the non-resonant cases.
    pub worst_exponent_error: f64,
    /// Worst relative residual of the `c t e^{-t}` profile over the resonant cases.
    pub worst_resonant_residual: f64,
    pub resonant_cases: usize,
    pub cases: Vec<LemmaCase>,
}

fn run_case(index: usize, seed: u64, horizon: f64) -> Result<LemmaCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(index as u64));
    let general = random_general(&mut rng, horizon);
    let perturbed = random_perturbed(&mut rng, horizon);

    let angle = rng.random_range(0.0..std::f64::consts::TAU);
    let sign_changes = solve_ivp(&general, angle.cos(), angle.sin())?.sign_changes();

    let (v0, dv0) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let (mut e0, mut e1) = (rng.random_range(0.0..0.5), rng.random_range(0.0..0.5));
    match rng.random_range(0..3) {
        0 => e0 = 0.0,
        1 => e1 = 0.0,
        _ => {}
    }
    if e0 + e1 < 0.05 {
        e0 += 0.05;
    }
    let u = solve_ivp(&general, v0 + e0, dv0 + e1)?;
    let v = solve_ivp(&general, v0, dv0)?;
    let comparison_holds = (1..u.t.len()).all(|k| u.u[k] > v.u[k] && u.du[k] > v.du[k]);

    let homogeneous = OdeProblem {
        f: Coefficient::zero(),
        ..perturbed.clone()
    };
    let dec = build_decaying_solution(&homogeneous)?;
    let decaying_ok = dec.monotone
        && dec.solution.u.iter().all(|u| *u > 0.0)
        && dec.solution.du.iter().all(|d| *d < 0.0);
    let pair = fundamental_pair(&perturbed)?;
    let half = fundamental_pair(&perturbed.with_horizon(horizon / 2.0))?;
    let remainder = particular_solution(&perturbed)?.fit;
    Ok(LemmaCase {
        index,
        general,
        perturbed,
        sign_changes,
        comparison_holds,
        decaying_ok,
        certificate: pair.certificate,
        certificate_half: half.certificate,
        wronskian_bound_holds: pair.wronskian_bound_holds,
        remainder,
    })
}

/// Runs `count` random cases on `[0, horizon]`; case `k` is seeded with `seed + k`.
pub fn lemma_suite(count: usize, seed: u64, horizon: f64) -> Result<LemmaSuiteReport> {
    let cases = (0..count)
        .into_par_iter()
        .map(|k| run_case(k, seed, horizon))
        .collect::<Result<Vec<_>>>()?;
    let mut ratio = (f64::INFINITY, 0.0f64);
    let mut worst_exponent_error = 0.0f64;
    let mut worst_resonant_residual = 0.0f64;
    let mut resonant_cases = 0;
    for c in &cases {
        let q = c.certificate_ratio();
        ratio = (ratio.0.min(q), ratio.1.max(q));
        match c.remainder {
            RemainderFit::Exponential { relative_error, .. } => {
                worst_exponent_error = worst_exponent_error.max(relative_error)
            }
            RemainderFit::LinearTimesExp { residual, .. } => {
                resonant_cases += 1;
                worst_resonant_residual = worst_resonant_residual.max(residual)
            }
            RemainderFit::Zero => {}
        }
    }
    Ok(LemmaSuiteReport {
        seed,
        horizon,
        max_sign_changes: cases.iter().map(|c| c.sign_changes).max().unwrap_or(0),
        comparison_failures: cases.iter().filter(|c| !c.comparison_holds).count(),
        decaying_failures: cases.iter().filter(|c| !c.decaying_ok).count(),
        wronskian_failures: cases.iter().filter(|c| !c.wronskian_bound_holds).count(),
        max_certificate: cases.iter().map(|c| c.certificate).fold(0.0, f64::max),
        certificate_ratio: ratio,
        worst_exponent_error,
        worst_resonant_residual,
        resonant_cases,
        cases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_problems_are_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            random_general(&mut rng, 10.0).validate().unwrap();
            random_perturbed(&mut rng, 20.0).check_bounds().unwrap();
        }
    }

    #[test]
    fn small_suite() {
        let rep = lemma_suite(12, 11, 20.0).unwrap();
        assert!(rep.max_sign_changes <= 1);
        assert_eq!(rep.comparison_failures, 0);
        assert_eq!(rep.decaying_failures, 0);
        assert_eq!(rep.wronskian_failures, 0);
        assert!(rep.certificate_ratio.0 >= 0.5 && rep.certificate_ratio.1 <= 2.0);
        assert!(rep.worst_exponent_error < 0.1, "{}", rep.worst_exponent_error);
        assert!(rep.worst_resonant_residual < 0.05);
    }
}
