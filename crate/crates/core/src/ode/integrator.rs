//! Adaptive Dormand–Prince 5(4) integrator with output at prescribed times and
//! an optional projection hook after every accepted step.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-12,
            atol: 1e-14,
            max_steps: 2_000_000,
        }
    }
}

impl Tolerances {
    /// Pure relative control, for solutions spanning many orders of magnitude.
    pub fn relative(rtol: f64) -> Self {
        Tolerances {
            rtol,
            atol: 1e-300,
            ..Tolerances::default()
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights equal the last row of A; E = b5 - b4
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = rhs(t, y)` from `t0` and returns the state at each of
/// `times` (monotone, on one side of `t0`; backward integration allowed).
/// `post(t, y)` runs after every accepted step and may project `y`.
pub fn integrate<F, P>(
    mut rhs: F,
    t0: f64,
    y0: &[f64],
    times: &[f64],
    tol: &Tolerances,
    mut post: P,
) -> Result<(Vec<Vec<f64>>, StepStats)>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    P: FnMut(f64, &mut [f64]),
{
    let dim = y0.len();
    let mut out = Vec::with_capacity(times.len());
    let mut stats = StepStats::default();
    let Some(&t_last) = times.last() else {
        return Ok((out, stats));
    };
    let dir = if t_last >= t0 { 1.0 } else { -1.0 };
    if times.windows(2).any(|w| (w[1] - w[0]) * dir < 0.0) || (times[0] - t0) * dir < 0.0 {
        return Err(Error::InvalidParameter("output times must be monotone away from t0".into()));
    }
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k = vec![vec![0.0; dim]; 7];
    let mut stage = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    let span = (t_last - t0).abs();
    let mut h = dir * (span * 1e-3).clamp(1e-6, 0.1);
    for &target in times {
        while (target - t) * dir > 0.0 {
            let remaining = target - t;
            let last_in_interval = (h * dir) >= remaining * dir;
            let step = if last_in_interval { remaining } else { h };
            if step.abs() < 1e-14 * t.abs().max(1.0) && !last_in_interval {
                return Err(Error::StepUnderflow(t));
            }
            rhs(t, &y, &mut k[0])?;
            for s in 1..7 {
                for i in 0..dim {
                    let mut acc = y[i];
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += step * A[s][j] * kj[i];
                    }
                    stage[i] = acc;
                }
                rhs(t + C[s] * step, &stage, &mut k[s])?;
            }
            // the seventh stage is evaluated at the fifth-order solution
            y_new.copy_from_slice(&stage);
            let mut err = 0.0;
            for i in 0..dim {
                let mut e = 0.0;
                for (s, ks) in k.iter().enumerate() {
                    e += E[s] * ks[i];
                }
                let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
                err += (step * e / sc).powi(2);
            }
            err = (err / dim as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::Solver(format!("non-finite state at t = {t}")));
            }
            if err <= 1.0 {
                t = if last_in_interval { target } else { t + step };
                y.copy_from_slice(&y_new);
                post(t, &mut y);
                stats.accepted += 1;
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last_in_interval {
                    h = step * grow;
                } else {
                    h = h.abs().max(step.abs() * grow) * dir;
                }
            } else {
                stats.rejected += 1;
                h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                if h.abs() < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::StepUnderflow(t));
                }
            }
            if stats.accepted + stats.rejected > tol.max_steps {
                return Err(Error::Solver(format!("step budget exhausted at t = {t}")));
            }
        }
        out.push(y.clone());
    }
    Ok((out, stats))
}

/// `integrate` without a projection hook.
pub fn integrate_plain<F>(rhs: F, t0: f64, y0: &[f64], times: &[f64], tol: &Tolerances) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    integrate(rhs, t0, y0, times, tol, |_, _| {}).map(|(v, _)| v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic(_t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        dy[0] = y[1];
        dy[1] = -y[0];
        Ok(())
    }

    #[test]
    fn harmonic_oscillator() {
        let times: Vec<f64> = (0..=20).map(|k| k as f64).collect();
        let ys = integrate_plain(harmonic, 0.0, &[0.0, 1.0], &times, &Tolerances::default()).unwrap();
        for (t, y) in times.iter().zip(&ys) {
            assert!((y[0] - t.sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn backward_exponential() {
        let ys = integrate_plain(
            |_, y, dy| {
                dy[0] = y[0];
                Ok(())
            },
            5.0,
            &[1.0],
            &[4.0, 0.0],
            &Tolerances::relative(1e-12),
        )
        .unwrap();
        assert!((ys[1][0] - (-5f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_monotone_output() {
        assert!(integrate_plain(harmonic, 0.0, &[0.0, 1.0], &[2.0, 1.0], &Tolerances::default()).is_err());
    }
}
