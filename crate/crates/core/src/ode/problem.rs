//! Second-order linear problems `u'' = P u' + (κ + Q) u + f` on `[0, T]`,
//! their fundamental solutions and the variation-of-parameters remainder.
//!
//! `κ = 1` gives the perturbed equation `u'' = Pu' + (1+Q)u + f`; `κ = 0`
//! gives the general form `u'' = Pu' + Qu` with `Q > 0`.

use serde::{Deserialize, Serialize};

use super::integrator::{integrate_plain, Tolerances};
use crate::error::{Error, Result};
use crate::fit::linear_fit;

/// `amplitude · t^power · e^{-rate t} · cos(frequency t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpTerm {
    pub amplitude: f64,
    #[serde(default)]
    pub rate: f64,
    #[serde(default)]
    pub power: u32,
    #[serde(default)]
    pub frequency: f64,
}

impl ExpTerm {
    pub fn eval(&self, t: f64) -> f64 {
        let mut v = self.amplitude * (-self.rate * t).exp();
        if self.power > 0 {
            v *= t.powi(self.power as i32);
        }
        if self.frequency != 0.0 {
            v *= (self.frequency * t).cos();
        }
        v
    }
}

/// A coefficient function, as a finite sum of [`ExpTerm`]s.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Coefficient(pub Vec<ExpTerm>);

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient(Vec::new())
    }

    pub fn exp(amplitude: f64, rate: f64) -> Self {
        Coefficient(vec![ExpTerm {
            amplitude,
            rate,
            power: 0,
            frequency: 0.0,
        }])
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.0.iter().map(|e| e.eval(t)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|e| e.amplitude == 0.0)
    }
}

/// Claimed bound `|P|, |Q|, |f| <= c0 e^{-d t}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayBounds {
    pub c0: f64,
    pub d: f64,
}

fn one() -> f64 {
    1.0
}

fn default_step() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeProblem {
    #[serde(default)]
    pub p: Coefficient,
    #[serde(default)]
    pub q: Coefficient,
    #[serde(default)]
    pub f: Coefficient,
    /// `κ` in `u'' = P u' + (κ + Q) u + f`.
    #[serde(default = "one")]
    pub q_offset: f64,
    pub horizon: f64,
    pub bounds: DecayBounds,
    /// Spacing of the output grid.
    #[serde(default = "default_step")]
    pub grid_step: f64,
}

/// Largest `j` in the exhaustion `u_j(0) = 1, u_j(j) = 0`.
pub const J_MAX: usize = 40;
/// Relative rounding slack in the exhaustion monotonicity check, once
/// successive members agree to working precision.
pub const MONOTONE_SLACK: f64 = 1e-12;
/// How far past the horizon the exhaustion must reach before it is accepted.
pub const EXHAUSTION_MARGIN: f64 = 10.0;

impl OdeProblem {
    /// Perturbed problem `u'' = P u' + (1+Q) u + f`.
    pub fn new(p: Coefficient, q: Coefficient, f: Coefficient, horizon: f64, bounds: DecayBounds) -> Self {
        OdeProblem {
            p,
            q,
            f,
            q_offset: 1.0,
            horizon,
            bounds,
            grid_step: default_step(),
        }
    }

    /// `u'' = u`.
    pub fn model(horizon: f64) -> Self {
        OdeProblem::new(
            Coefficient::zero(),
            Coefficient::zero(),
            Coefficient::zero(),
            horizon,
            DecayBounds { c0: 1.0, d: 1.0 },
        )
    }

    pub fn with_horizon(&self, horizon: f64) -> Self {
        OdeProblem {
            horizon,
            ..self.clone()
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        let k = (self.horizon / self.grid_step).round().max(1.0) as usize;
        (0..=k).map(|i| self.horizon * i as f64 / k as f64).collect()
    }

    /// `κ + Q(t)`.
    pub fn potential(&self, t: f64) -> f64 {
        self.q_offset + self.q.eval(t)
    }

    /// Horizon, grid and positivity of `κ + Q` on the grid.
    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidParameter(format!("horizon {} must be positive", self.horizon)));
        }
        if !(self.grid_step > 0.0 && self.grid_step <= self.horizon) {
            return Err(Error::InvalidParameter(format!("grid step {} out of range", self.grid_step)));
        }
        if let Some(t) = self.grid().into_iter().find(|&t| !(self.potential(t) > 0.0)) {
            return Err(Error::Precondition(format!("κ + Q not positive at t = {t}")));
        }
        Ok(())
    }

    /// The claimed bounds hold on the grid.
    pub fn check_bounds(&self) -> Result<()> {
        self.validate()?;
        let DecayBounds { c0, d } = self.bounds;
        if !(c0 > 0.0 && d > 0.0) {
            return Err(Error::InvalidParameter("bounds need c0 > 0 and d > 0".into()));
        }
        for t in self.grid() {
            let cap = c0 * (-d * t).exp() * (1.0 + 1e-12);
            for (name, c) in [("P", &self.p), ("Q", &self.q), ("f", &self.f)] {
                if c.eval(t).abs() > cap {
                    return Err(Error::Precondition(format!("|{name}({t})| exceeds c0 e^(-dt)")));
                }
            }
        }
        Ok(())
    }

    fn accel(&self, t: f64, u: f64, du: f64, forced: bool) -> f64 {
        let mut a = self.p.eval(t) * du + self.potential(t) * u;
        if forced {
            a += self.f.eval(t);
        }
        a
    }
}

/// Samples of a solution and its derivative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub t: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
}

impl Solution {
    fn from_states(t: Vec<f64>, states: &[Vec<f64>], scale: f64) -> Self {
        Solution {
            u: states.iter().map(|s| s[0] * scale).collect(),
            du: states.iter().map(|s| s[1] * scale).collect(),
            t,
        }
    }

    /// Number of sign changes along the samples.
    pub fn sign_changes(&self) -> usize {
        let mut last = 0.0f64;
        let mut count = 0;
        for &u in &self.u {
            if u != 0.0 {
                if last != 0.0 && (u > 0.0) != (last > 0.0) {
                    count += 1;
                }
                last = u;
            }
        }
        count
    }
}

fn ode_tol() -> Tolerances {
    Tolerances::relative(1e-12)
}

/// Solves the (forced) problem from `u(0) = u0`, `u'(0) = du0` on the grid.
pub fn solve_ivp(prob: &OdeProblem, u0: f64, du0: f64) -> Result<Solution> {
    prob.validate()?;
    let t = prob.grid();
    let states = integrate_plain(
        |s, y, dy| {
            dy[0] = y[1];
            dy[1] = prob.accel(s, y[0], y[1], true);
            Ok(())
        },
        0.0,
        &[u0, du0],
        &t,
        &Tolerances {
            atol: 1e-14 * (u0.abs() + du0.abs()).max(1e-300),
            ..Tolerances::default()
        },
    )?;
    Ok(Solution::from_states(t, &states, 1.0))
}

/// Homogeneous two-point solution `u_j(0) = 1`, `u_j(j) = 0` on the grid
/// (zero past `j`), obtained by integrating back from `t = j`.
fn exhaustion_member(prob: &OdeProblem, j: f64, grid: &[f64]) -> Result<Solution> {
    let inside: Vec<f64> = grid.iter().rev().cloned().filter(|&t| t <= j).collect();
    let states = integrate_plain(
        |s, y, dy| {
            dy[0] = y[1];
            dy[1] = prob.accel(s, y[0], y[1], false);
            Ok(())
        },
        j,
        &[0.0, -1.0],
        &inside,
        &ode_tol(),
    )?;
    let w0 = states.last().map(|s| s[0]).unwrap_or(0.0);
    if !(w0 > 0.0) {
        return Err(Error::Solver(format!("two-point problem on [0, {j}] is singular")));
    }
    let mut u = vec![0.0; grid.len()];
    let mut du = vec![0.0; grid.len()];
    // `inside` is descending and covers the leading grid points
    let m = inside.len();
    for (k, s) in states.iter().enumerate() {
        u[m - 1 - k] = s[0] / w0;
        du[m - 1 - k] = s[1] / w0;
    }
    Ok(Solution {
        t: grid.to_vec(),
        u,
        du,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayingSolution {
    pub solution: Solution,
    /// Exhaustion index at acceptance.
    pub j: usize,
    /// `max |u_j - u_{j-1}|` on the grid, per `j`.
    pub differences: Vec<f64>,
    /// `u_j < u_{j+1}` on `(0, j]` throughout the exhaustion.
    pub monotone: bool,
}

/// Positive decreasing solution by the exhaustion `u_j(0) = 1, u_j(j) = 0`.
pub fn build_decaying_solution(prob: &OdeProblem) -> Result<DecayingSolution> {
    prob.validate()?;
    let grid = prob.grid();
    let mut prev: Option<Solution> = None;
    let mut differences = Vec::new();
    let mut monotone = true;
    for j in 1..=J_MAX {
        let jf = j as f64;
        let cur = exhaustion_member(prob, jf, &grid)?;
        if let Some(p) = &prev {
            let diff = p.u.iter().zip(&cur.u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            differences.push(diff);
            let pj = jf - 1.0;
            monotone &= grid
                .iter()
                .zip(p.u.iter().zip(&cur.u))
                .filter(|(t, _)| **t > 0.0 && **t <= pj)
                .all(|(_, (a, b))| a < b || (a - b).abs() <= MONOTONE_SLACK * b.abs());
            if diff < 1e-10 && jf >= prob.horizon + EXHAUSTION_MARGIN {
                if cur.u.iter().any(|&u| !(u > 0.0)) || cur.du.iter().any(|&d| !(d < 0.0)) {
                    return Err(Error::Solver("limit solution is not positive and decreasing".into()));
                }
                return Ok(DecayingSolution {
                    solution: cur,
                    j,
                    differences,
                    monotone,
                });
            }
        }
        prev = Some(cur);
    }
    Err(Error::Solver(format!(
        "exhaustion did not converge by j = {J_MAX} (horizon {})",
        prob.horizon
    )))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FundamentalPair {
    pub t: Vec<f64>,
    pub u1: Vec<f64>,
    pub du1: Vec<f64>,
    pub u2: Vec<f64>,
    pub du2: Vec<f64>,
    pub wronskian: Vec<f64>,
    /// Smallest `C` with `C^{-1} e^{±t} <= u_1, u_1', u_2, -u_2' <= C e^{±t}` on the grid.
    pub certificate: f64,
    /// `W <= -2/C²` on the grid.
    pub wronskian_bound_holds: bool,
    pub exhaustion_j: usize,
}

/// Slack for the Wronskian bound against rounding.
pub const WRONSKIAN_SLACK: f64 = 1e-12;

pub fn fundamental_pair(prob: &OdeProblem) -> Result<FundamentalPair> {
    prob.check_bounds()?;
    let homogeneous = OdeProblem {
        f: Coefficient::zero(),
        ..prob.clone()
    };
    let s1 = solve_ivp(&homogeneous, 1.0, 1.0)?;
    let s2 = build_decaying_solution(&homogeneous)?;
    let (t, u1, du1) = (s1.t, s1.u, s1.du);
    let Solution { u: u2, du: du2, .. } = s2.solution;
    let mut c = 1.0f64;
    for k in 0..t.len() {
        let (ep, em) = (t[k].exp(), (-t[k]).exp());
        for (v, scale) in [(u1[k], ep), (du1[k], ep), (u2[k], em), (-du2[k], em)] {
            if !(v > 0.0) {
                return Err(Error::Solver(format!("fundamental solution not positive at t = {}", t[k])));
            }
            c = c.max(v / scale).max(scale / v);
        }
    }
    let wronskian: Vec<f64> = (0..t.len()).map(|k| u1[k] * du2[k] - u2[k] * du1[k]).collect();
    let bound = -2.0 / (c * c);
    let ok = wronskian.iter().all(|w| *w <= bound + WRONSKIAN_SLACK);
    Ok(FundamentalPair {
        t,
        u1,
        du1,
        u2,
        du2,
        wronskian,
        certificate: c,
        wronskian_bound_holds: ok,
        exhaustion_j: s2.j,
    })
}

/// Shape fitted to the remainder on the tail half of the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RemainderFit {
    /// Remainder vanishes identically.
    Zero,
    /// `log|R| ≈ a - λ t`; compared with `λ = d`.
    Exponential { exponent: f64, predicted: f64, relative_error: f64, residual: f64 },
    /// `R e^t ≈ c t + c'`; `residual` is relative to the RMS of `R e^t`.
    LinearTimesExp { slope: f64, intercept: f64, residual: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParticularSolution {
    /// `A_1 = lim α_1`.
    pub c1: f64,
    /// `A_2 = lim α_2` when `d > 1`, else 0.
    pub c2: f64,
    pub t: Vec<f64>,
    /// `u_p - (c_1 u_1 + c_2 u_2)`.
    pub remainder: Vec<f64>,
    pub fit: RemainderFit,
}

/// Variation of parameters with `u_p = α_1 u_1 + α_2 u_2`, `u_p(0) = u_p'(0) = 0`.
///
/// The remainder is assembled from tail integrals, `(α_1 - A_1) = ∫_t^∞ u_2 f/W`
/// and (for `d > 1`) `(α_2 - A_2) = -∫_t^∞ u_1 f/W`, integrated backward
/// together with `u_1` and `u_2` so nothing is lost to cancellation. The
/// Wronskian is `W = W(0) exp ∫_0^t P`. The sweep starts at the exhaustion
/// cut-off `J_MAX`; beyond it the `u_1` tail is closed with its local exponential rate.
pub fn particular_solution(prob: &OdeProblem) -> Result<ParticularSolution> {
    prob.check_bounds()?;
    let grid = prob.grid();
    if prob.f.is_zero() {
        return Ok(ParticularSolution {
            c1: 0.0,
            c2: 0.0,
            remainder: vec![0.0; grid.len()],
            t: grid,
            fit: RemainderFit::Zero,
        });
    }
    let j0 = J_MAX as f64;
    if prob.horizon + EXHAUSTION_MARGIN > j0 {
        return Err(Error::InvalidParameter(format!(
            "horizon {} too long for the exhaustion cut-off {J_MAX}",
            prob.horizon
        )));
    }
    // forward: (u1, u1', Φ = ∫P, J = ∫ u1 f e^{-Φ})
    let mut fwd_times = grid.clone();
    fwd_times.extend([j0 - 1.0, j0]);
    let fwd = integrate_plain(
        |s, y, dy| {
            dy[0] = y[1];
            dy[1] = prob.accel(s, y[0], y[1], false);
            dy[2] = prob.p.eval(s);
            dy[3] = y[0] * prob.f.eval(s) * (-y[2]).exp();
            Ok(())
        },
        0.0,
        &[1.0, 1.0, 0.0, 0.0],
        &fwd_times,
        &ode_tol(),
    )?;
    let end = fwd[fwd.len() - 1].clone();
    let before = &fwd[fwd.len() - 2];
    let d = prob.bounds.d;
    // ∫_{j0}^∞ u1 f e^{-Φ}, from the local exponential rate of the integrand
    let density = |y: &[f64], s: f64| y[0] * prob.f.eval(s) * (-y[2]).exp();
    let (i1, i0) = (density(&end, j0), density(before, j0 - 1.0));
    let tail2 = if d > 1.0 && i1 != 0.0 {
        let rate = (i0 / i1).ln();
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::DivergentTail(format!("∫ u1 f/W does not converge for claimed d = {d}")));
        }
        i1 / rate
    } else {
        0.0
    };
    let back_times: Vec<f64> = grid.iter().rev().cloned().collect();
    let back = integrate_plain(
        |s, y, dy| {
            let fs = prob.f.eval(s);
            let e = (-y[4]).exp();
            dy[0] = y[1];
            dy[1] = prob.accel(s, y[0], y[1], false);
            dy[2] = y[3];
            dy[3] = prob.accel(s, y[2], y[3], false);
            dy[4] = prob.p.eval(s);
            dy[5] = -y[0] * fs * e;
            dy[6] = -y[2] * fs * e;
            Ok(())
        },
        j0,
        &[0.0, -1.0, end[0], end[1], end[2], 0.0, tail2],
        &back_times,
        &ode_tol(),
    )?;
    let m = grid.len();
    let at = |k: usize| &back[m - 1 - k];
    let w0 = at(0)[0];
    let u2 = |k: usize| at(k)[0] / w0;
    let du2_0 = at(0)[1] / w0;
    let wr0 = fwd[0][0] * du2_0 - u2(0) * fwd[0][1];
    let mut remainder = Vec::with_capacity(m);
    for k in 0..m {
        let tail1 = at(k)[5] / w0 / wr0;
        let c2t = if d > 1.0 { -at(k)[6] / wr0 } else { fwd[k][3] / wr0 };
        remainder.push(tail1 * fwd[k][0] + c2t * u2(k));
    }
    let c1 = -at(0)[5] / w0 / wr0;
    let c2 = if d > 1.0 { at(0)[6] / wr0 } else { 0.0 };
    let fit = fit_remainder(&grid, &remainder, d);
    Ok(ParticularSolution {
        c1,
        c2,
        t: grid,
        remainder,
        fit,
    })
}

/// Tolerance on `d` for the `d = 1` profile.
const RESONANT: f64 = 1e-9;

fn fit_remainder(t: &[f64], r: &[f64], d: f64) -> RemainderFit {
    let half = t[t.len() - 1] / 2.0;
    let idx: Vec<usize> = (0..t.len()).filter(|&k| t[k] >= half && r[k] != 0.0).collect();
    if idx.len() < 3 {
        return RemainderFit::Zero;
    }
    let tx: Vec<f64> = idx.iter().map(|&k| t[k]).collect();
    if (d - 1.0).abs() < RESONANT {
        let y: Vec<f64> = idx.iter().map(|&k| r[k] * t[k].exp()).collect();
        let (slope, intercept, rms) = linear_fit(&tx, &y);
        let scale = (y.iter().map(|v| v * v).sum::<f64>() / y.len() as f64).sqrt();
        RemainderFit::LinearTimesExp {
            slope,
            intercept,
            residual: rms / scale,
        }
    } else {
        let y: Vec<f64> = idx.iter().map(|&k| r[k].abs().ln()).collect();
        let (slope, _, rms) = linear_fit(&tx, &y);
        RemainderFit::Exponential {
            exponent: -slope,
            predicted: d,
            relative_error: (-slope - d).abs() / d,
            residual: rms,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponentials() {
        let p = OdeProblem::model(10.0);
        let up = solve_ivp(&p, 1.0, 1.0).unwrap();
        for (t, u) in up.t.iter().zip(&up.u) {
            assert!((u / t.exp() - 1.0).abs() < 1e-10);
        }
        let dn = solve_ivp(&p.with_horizon(5.0), 1.0, -1.0).unwrap();
        for (t, u) in dn.t.iter().zip(&dn.u) {
            assert!((u - (-t).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn model_decaying_solution() {
        let s = build_decaying_solution(&OdeProblem::model(20.0)).unwrap();
        assert!(s.monotone);
        for (t, u) in s.solution.t.iter().zip(&s.solution.u) {
            assert!((u - (-t).exp()).abs() < 1e-8);
        }
    }

    #[test]
    fn model_pair_certificate() {
        let fp = fundamental_pair(&OdeProblem::model(20.0)).unwrap();
        assert!((fp.certificate - 1.0).abs() < 1e-6, "{}", fp.certificate);
        assert!(fp.wronskian_bound_holds);
    }

    #[test]
    fn remainder_oracles() {
        let mut p = OdeProblem::model(20.0);
        p.f = Coefficient::exp(1.0, 2.0);
        p.bounds = DecayBounds { c0: 1.0, d: 2.0 };
        let ps = particular_solution(&p).unwrap();
        let worst = ps
            .t
            .iter()
            .zip(&ps.remainder)
            .map(|(t, r)| (r * 3.0 * (2.0 * t).exp() - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-9, "{worst}");
        p.f = Coefficient::exp(1.0, 1.0);
        p.bounds.d = 1.0;
        let ps = particular_solution(&p).unwrap();
        for (t, r) in ps.t.iter().zip(&ps.remainder) {
            let exact = -(t / 2.0 + 0.25) * (-t).exp();
            assert!((r - exact).abs() < 1e-9 * exact.abs());
        }
        assert!(matches!(ps.fit, RemainderFit::LinearTimesExp { residual, .. } if residual < 1e-6));
    }

    #[test]
    fn rejects_violated_bounds() {
        let mut p = OdeProblem::model(5.0);
        p.q = Coefficient::exp(2.0, 1.0);
        assert!(fundamental_pair(&p).is_err());
        p.q = Coefficient::exp(-3.0, 0.0);
        assert!(p.validate().is_err());
    }
}
