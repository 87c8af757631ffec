//! Least-squares fits used for decay rates and limits at infinity.

use serde::{Deserialize, Serialize};

/// Ordinary least squares `y ≈ slope·x + intercept`, with RMS residual.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}

/// `|y| ≈ A r^{-q}` fitted in log–log coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub amplitude: f64,
    pub residual: f64,
}

pub fn power_law_fit(r: &[f64], y: &[f64]) -> Option<PowerFit> {
    let mut lx = Vec::with_capacity(r.len());
    let mut ly = Vec::with_capacity(r.len());
    for (a, b) in r.iter().zip(y) {
        if *b != 0.0 && b.is_finite() {
            lx.push(a.ln());
            ly.push(b.abs().ln());
        }
    }
    if lx.len() < 2 {
        return None;
    }
    let (s, c, res) = linear_fit(&lx, &ly);
    Some(PowerFit {
        exponent: -s,
        amplitude: c.exp(),
        residual: res,
    })
}

/// Result of fitting `I(r) = I_∞ + c r^{-β}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitFit {
    pub limit: f64,
    pub coefficient: f64,
    pub beta: f64,
    /// RMS residual of the fit, in the units of `I`.
    pub residual: f64,
    /// False when the model was not fitted and `limit` is the last value.
    pub extrapolated: bool,
}

fn solve_linear(r: &[f64], y: &[f64], beta: f64) -> (f64, f64, f64) {
    let t: Vec<f64> = r.iter().map(|v| v.powf(-beta)).collect();
    let (c, a, rms) = linear_fit(&t, y);
    (a, c, rms)
}

/// Variable-projection fit of `I_∞ + c r^{-β}` with `β` in `bounds`:
/// linear least squares in `(I_∞, c)` for fixed `β`, golden-section search
/// in `β` after a coarse scan seeded at `beta0`.
pub fn extrapolate_limit(r: &[f64], y: &[f64], beta0: f64, bounds: (f64, f64)) -> LimitFit {
    let last = *y.last().unwrap_or(&0.0);
    let fallback = LimitFit {
        limit: last,
        coefficient: 0.0,
        beta: beta0,
        residual: 0.0,
        extrapolated: false,
    };
    if y.iter().all(|v| *v == y[0]) {
        return LimitFit {
            limit: y[0],
            extrapolated: true,
            ..fallback
        };
    }
    if r.len() < 3 || y.iter().any(|v| !v.is_finite()) {
        return fallback;
    }
    let (lo, hi) = bounds;
    let objective = |b: f64| solve_linear(r, y, b).2;
    let steps = 64;
    let mut best = (beta0.clamp(lo, hi), objective(beta0.clamp(lo, hi)));
    for k in 0..=steps {
        let b = lo + (hi - lo) * k as f64 / steps as f64;
        let f = objective(b);
        if f < best.1 {
            best = (b, f);
        }
    }
    let h = (hi - lo) / steps as f64;
    let (mut a, mut d) = ((best.0 - h).max(lo), (best.0 + h).min(hi));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut b = d - phi * (d - a);
    let mut c = a + phi * (d - a);
    let (mut fb, mut fc) = (objective(b), objective(c));
    for _ in 0..100 {
        if fb < fc {
            d = c;
            c = b;
            fc = fb;
            b = d - phi * (d - a);
            fb = objective(b);
        } else {
            a = b;
            b = c;
            fb = fc;
            c = a + phi * (d - a);
            fc = objective(c);
        }
    }
    let beta = if fb < fc { b } else { c };
    let (limit, coefficient, residual) = solve_linear(r, y, beta);
    let span = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - y.iter().cloned().fold(f64::INFINITY, f64::min);
    if !limit.is_finite() || (limit - last).abs() > 10.0 * span.max(f64::MIN_POSITIVE) {
        return fallback;
    }
    LimitFit {
        limit,
        coefficient,
        beta,
        residual,
        extrapolated: true,
    }
}

/// Polynomial extrapolation of `A(h)` to `h = 0` (Neville).
pub fn richardson_limit(h: &[f64], a: &[f64]) -> f64 {
    let mut p = a.to_vec();
    let k = p.len();
    for m in 1..k {
        for i in 0..k - m {
            p[i] = (h[i + m] * p[i] - h[i] * p[i + 1]) / (h[i + m] - h[i]);
        }
    }
    p[0]
}

/// `n` logarithmically spaced radii in `[a, b]`.
pub fn log_ladder(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            if k + 1 == n {
                b
            } else {
                (a.ln() + (b.ln() - a.ln()) * k as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_exponent() {
        let r = log_ladder(20.0, 200.0, 8);
        let y: Vec<f64> = r.iter().map(|v| 3.0 * v.powi(-2)).collect();
        let f = power_law_fit(&r, &y).unwrap();
        assert!((f.exponent - 2.0).abs() < 1e-12);
        assert!((f.amplitude - 3.0).abs() < 1e-10);
    }

    #[test]
    fn recovers_limit() {
        let r = log_ladder(20.0, 200.0, 8);
        let y: Vec<f64> = r.iter().map(|v| 5.0 + 2.0 * v.powf(-1.7)).collect();
        let f = extrapolate_limit(&r, &y, 1.0, (0.5, 6.0));
        assert!(f.extrapolated);
        assert!((f.limit - 5.0).abs() < 1e-9, "{f:?}");
        assert!((f.beta - 1.7).abs() < 1e-5);
    }

    #[test]
    fn constant_values_are_exact() {
        let r = log_ladder(20.0, 200.0, 8);
        let f = extrapolate_limit(&r, &vec![0.0; 8], 3.0, (0.5, 6.0));
        assert_eq!(f.limit, 0.0);
    }

    #[test]
    fn richardson_linear_error() {
        let h = [0.1, 0.05, 0.025];
        let a: Vec<f64> = h.iter().map(|h| 1.0 + 3.0 * h + h * h).collect();
        assert!((richardson_limit(&h, &a) - 1.0).abs() < 1e-12);
    }
}
