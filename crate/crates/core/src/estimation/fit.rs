use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::series::DecaySeries;
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 500;
const STEP_TOLERANCE: f64 = 1e-10;
const INITIAL_DAMPING: f64 = 1e-3;
const MAX_DAMPING: f64 = 1e16;

/// Least-squares fit of c1·e^{−rate·t} + c0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub c1: f64,
    pub c0: f64,
    raw_rate: f64,
    pub rms_residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl FitResult {
    /// The fitted decay rate; `None` when the fit did not converge.
    pub fn rate(&self) -> Option<f64> {
        self.converged.then_some(self.raw_rate)
    }

    /// Last iterate of the rate regardless of convergence, for diagnostics.
    pub fn last_rate(&self) -> f64 {
        self.raw_rate
    }

    pub fn model(&self, t: f64) -> f64 {
        self.c1 * (-self.raw_rate * t).exp() + self.c0
    }
}

/// Damped Gauss–Newton fit of a single exponential decay with offset.
///
/// Starts from c0 = last value, c1 = first − last and the log-slope of the
/// first half of the series. The damping factor starts at 1e-3 and moves by
/// ×10 / ÷10 on rejected / accepted steps. Convergence is declared once the
/// largest relative parameter step drops below 1e-10; after 500 iterations
/// the result is returned with `converged = false`.
pub fn fit_exponential(series: &DecaySeries) -> Result<FitResult> {
    let n = series.len();
    if n < 4 {
        return Err(Error::NotEnoughData { needed: 4, got: n });
    }
    let t = series.times();
    let y = series.values();

    let mut p = initial_guess(t, y);
    let mut cost = sum_sq(t, y, &p);
    let mut damping = INITIAL_DAMPING;
    let mut converged = cost == 0.0;
    let mut iterations = 0;

    while !converged && iterations < MAX_ITERATIONS {
        iterations += 1;
        let (jtj, jtr) = normal_equations(t, y, &p);
        loop {
            let mut lhs = jtj;
            for i in 0..3 {
                lhs[(i, i)] += damping * jtj[(i, i)].max(f64::MIN_POSITIVE);
            }
            let Some(step) = lhs.cholesky().map(|c| c.solve(&-jtr)) else {
                damping *= 10.0;
                if damping > MAX_DAMPING {
                    break;
                }
                continue;
            };
            let trial = p + step;
            let trial_cost = sum_sq(t, y, &trial);
            let rel = relative_step(&step, &p);
            if trial_cost.is_finite() && trial_cost <= cost {
                p = trial;
                cost = trial_cost;
                damping = (damping / 10.0).max(1e-15);
                converged = rel < STEP_TOLERANCE || cost == 0.0;
                break;
            }
            damping *= 10.0;
            if rel < STEP_TOLERANCE || damping > MAX_DAMPING {
                // No descent left at machine precision: we sit on the minimum.
                converged = rel < STEP_TOLERANCE;
                break;
            }
        }
        if damping > MAX_DAMPING {
            break;
        }
    }

    Ok(FitResult {
        c1: p[0],
        raw_rate: p[1],
        c0: p[2],
        rms_residual: (cost / n as f64).sqrt(),
        converged,
        iterations,
    })
}

fn initial_guess(t: &[f64], y: &[f64]) -> Vector3<f64> {
    let n = y.len();
    let c0 = y[n - 1];
    let c1 = y[0] - c0;
    let half = n / 2;
    let span = t[half] - t[0];
    let (a, b) = ((y[0] - c0).abs(), (y[half] - c0).abs());
    let mut rate = if a > 0.0 && b > 0.0 && span > 0.0 {
        (a / b).ln() / span
    } else {
        0.0
    };
    if !(rate.is_finite() && rate > 0.0) {
        rate = 1.0 / (t[n - 1] - t[0]);
    }
    Vector3::new(c1, rate, c0)
}

fn sum_sq(t: &[f64], y: &[f64], p: &Vector3<f64>) -> f64 {
    t.iter()
        .zip(y)
        .map(|(&ti, &yi)| {
            let r = p[0] * (-p[1] * ti).exp() + p[2] - yi;
            r * r
        })
        .sum()
}

fn normal_equations(t: &[f64], y: &[f64], p: &Vector3<f64>) -> (Matrix3<f64>, Vector3<f64>) {
    let mut jtj = Matrix3::zeros();
    let mut jtr = Vector3::zeros();
    for (&ti, &yi) in t.iter().zip(y) {
        let e = (-p[1] * ti).exp();
        let r = p[0] * e + p[2] - yi;
        let j = Vector3::new(e, -p[0] * ti * e, 1.0);
        jtj += j * j.transpose();
        jtr += j * r;
    }
    (jtj, jtr)
}

/// Largest parameter step relative to its scale. Amplitude and offset are
/// measured against |c1| + |c0| so an offset that happens to sit near zero
/// does not turn roundoff into an apparent step.
fn relative_step(step: &Vector3<f64>, p: &Vector3<f64>) -> f64 {
    let signal = (p[0].abs() + p[2].abs()).max(1e-300);
    let rate = p[1].abs().max(1e-300);
    (step[0].abs() / signal)
        .max(step[1].abs() / rate)
        .max(step[2].abs() / signal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::series::uniform_times;

    fn series(f: impl Fn(f64) -> f64, end: f64, n: usize) -> DecaySeries {
        let t = uniform_times(end, n);
        let y = t.iter().map(|&x| f(x)).collect();
        DecaySeries::new(t, y).unwrap()
    }

    #[test]
    fn exact_model_recovered() {
        let s = series(|t| 2.0 * (-0.01 * t).exp() - 1.0, 100.0, 100);
        let fit = fit_exponential(&s).unwrap();
        assert!(fit.converged);
        assert!((fit.rate().unwrap() - 0.01).abs() < 1e-9);
        assert!((fit.c1 - 2.0).abs() < 1e-7);
        assert!((fit.c0 + 1.0).abs() < 1e-7);
        assert!(fit.rms_residual < 1e-10);
    }

    #[test]
    fn ramsey_window() {
        let s = series(|t| 0.97 * (-0.1 * t).exp() + 0.013, 10.0, 100);
        let fit = fit_exponential(&s).unwrap();
        assert!((fit.rate().unwrap() - 0.1).abs() < 1e-9);
    }

    #[test]
    fn rising_curve() {
        let s = series(|t| 1.0 - (-0.5 * t).exp(), 8.0, 40);
        let fit = fit_exponential(&s).unwrap();
        assert!((fit.rate().unwrap() - 0.5).abs() < 1e-9);
        assert!((fit.c1 + 1.0).abs() < 1e-8);
    }

    #[test]
    fn too_few_points() {
        let s = DecaySeries::new(vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.25]).unwrap();
        assert!(matches!(
            fit_exponential(&s),
            Err(Error::NotEnoughData { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn non_convergence_is_reported() {
        // Pure noise around a constant: rate is unidentifiable.
        let t = uniform_times(10.0, 30);
        let y: Vec<f64> = (0..30)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let fit = fit_exponential(&DecaySeries::new(t, y).unwrap()).unwrap();
        if !fit.converged {
            assert!(fit.rate().is_none());
        }
        assert!(fit.rms_residual >= 0.0);
    }
}
