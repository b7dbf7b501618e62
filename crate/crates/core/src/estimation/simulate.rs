//! Noiseless (or shot-noise) simulation of the three estimation experiments.

use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::series::DecaySeries;
use crate::error::{invalid, Result};
use crate::gd::{BlochGenerator, PerturbedGdParams};

/// State-preparation and measurement error after twirling.
///
/// Preparation shrinks the Bloch vector by (1 − k); measurement maps an
/// expectation value v to (1 − n1)·v + n2.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SpamParams {
    pub k: f64,
    pub n1: f64,
    pub n2: f64,
}

impl SpamParams {
    pub fn new(k: f64, n1: f64, n2: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&k) {
            return Err(invalid("k", format!("{k} outside [0, 1)")));
        }
        if !(0.0..1.0).contains(&n1) {
            return Err(invalid("n1", format!("{n1} outside [0, 1)")));
        }
        if !n2.is_finite() {
            return Err(invalid("n2", "must be finite"));
        }
        Ok(Self { k, n1, n2 })
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn prepare(&self, r0: &Vector3<f64>) -> Vector3<f64> {
        r0 * (1.0 - self.k)
    }

    pub fn measure(&self, value: f64) -> f64 {
        apply_spam(value, self)
    }
}

/// (1 − n1)·v + n2.
pub fn apply_spam(trace_value: f64, spam: &SpamParams) -> f64 {
    (1.0 - spam.n1) * trace_value + spam.n2
}

/// How the averaged Ramsey experiment integrates over preparation angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AngleAverage {
    /// Exact continuum average via the trace of the xy block.
    Analytic,
    /// Mean over `n` equally spaced angles ω = 2πj/n.
    Discrete(usize),
}

/// Q1(t) = −r_z(t) after preparing the excited state.
pub fn simulate_population_inversion(
    params: &PerturbedGdParams,
    spam: &SpamParams,
    times: &[f64],
) -> Result<DecaySeries> {
    let prop = BlochGenerator::from_params(params).propagator();
    let r0 = spam.prepare(&Vector3::new(0.0, 0.0, -1.0));
    let values = times
        .iter()
        .map(|&t| spam.measure(-prop.evolve(&r0, t)[2]))
        .collect();
    DecaySeries::new(times.to_vec(), values)
}

/// Q2(t) = r_x(t) after preparing |+⟩ along the fixed x axis.
pub fn simulate_static_ramsey(
    params: &PerturbedGdParams,
    spam: &SpamParams,
    times: &[f64],
) -> Result<DecaySeries> {
    let prop = BlochGenerator::from_params(params).propagator();
    let r0 = spam.prepare(&Vector3::new(1.0, 0.0, 0.0));
    let values = times
        .iter()
        .map(|&t| spam.measure(prop.evolve(&r0, t)[0]))
        .collect();
    DecaySeries::new(times.to_vec(), values)
}

/// Ramsey signal averaged over preparation/measurement angle in the xy plane.
pub fn simulate_avg_ramsey(
    params: &PerturbedGdParams,
    spam: &SpamParams,
    times: &[f64],
    mode: AngleAverage,
) -> Result<DecaySeries> {
    let prop = BlochGenerator::from_params(params).propagator();
    let values = match mode {
        AngleAverage::Analytic => times
            .iter()
            .map(|&t| {
                let (linear, _) = prop.at(t);
                let avg = 0.5 * (linear[(0, 0)] + linear[(1, 1)]);
                spam.measure((1.0 - spam.k) * avg)
            })
            .collect(),
        AngleAverage::Discrete(n) => {
            if n == 0 {
                return Err(invalid("n_angles", "must be at least 1"));
            }
            let dirs: Vec<Vector3<f64>> = (0..n)
                .map(|j| {
                    let w = 2.0 * PI * j as f64 / n as f64;
                    Vector3::new(w.cos(), w.sin(), 0.0)
                })
                .collect();
            times
                .iter()
                .map(|&t| {
                    let sum: f64 = dirs
                        .iter()
                        .map(|u| {
                            let r = prop.evolve(&spam.prepare(u), t);
                            spam.measure(u.dot(&r))
                        })
                        .sum();
                    sum / n as f64
                })
                .collect()
        }
    };
    DecaySeries::new(times.to_vec(), values)
}

/// Replaces each expectation value of a ±1 observable by the mean of `shots`
/// single-shot outcomes.
pub fn with_shot_noise<R: Rng + ?Sized>(
    series: &DecaySeries,
    shots: u64,
    rng: &mut R,
) -> Result<DecaySeries> {
    if shots == 0 {
        return Err(invalid("shots", "must be positive"));
    }
    let values = series
        .values()
        .iter()
        .map(|&v| {
            let p = (0.5 * (1.0 + v)).clamp(0.0, 1.0);
            let ups = Binomial::new(shots, p)
                .expect("probability clamped to [0, 1]")
                .sample(rng);
            2.0 * ups as f64 / shots as f64 - 1.0
        })
        .collect();
    DecaySeries::new(series.times().to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::series::uniform_times;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn base() -> PerturbedGdParams {
        PerturbedGdParams::from_total_dephasing(0.1, 0.01, 1.0).unwrap()
    }

    #[test]
    fn spam_formula() {
        assert_eq!(apply_spam(1.0, &SpamParams::none()), 1.0);
        let s = SpamParams::new(0.0, 0.02, 0.01).unwrap();
        assert!((apply_spam(0.5, &s) - (0.5 * 0.98 + 0.01)).abs() < 1e-16);
        assert!(SpamParams::new(1.0, 0.0, 0.0).is_err());
        assert!(SpamParams::new(0.0, -0.1, 0.0).is_err());
    }

    #[test]
    fn population_inversion_unperturbed() {
        let times = uniform_times(100.0, 11);
        let s = simulate_population_inversion(&base(), &SpamParams::none(), &times).unwrap();
        assert_eq!(s.values()[0], 1.0);
        for (t, v) in s.times().iter().zip(s.values()) {
            let want = 2.0 * (-0.01 * t).exp() - 1.0;
            assert!((v - want).abs() < 1e-15);
        }
    }

    #[test]
    fn population_inversion_finite_temperature() {
        let p = PerturbedGdParams::from_total_dephasing(0.1, 0.01, 0.85).unwrap();
        let times = uniform_times(100.0, 7);
        let s = simulate_population_inversion(&p, &SpamParams::none(), &times).unwrap();
        for (t, v) in s.times().iter().zip(s.values()) {
            let want = 2.0 * 0.85 * (-0.01 * t).exp() - 2.0 * 0.85 + 1.0;
            assert!((v - want).abs() < 1e-15);
        }
    }

    #[test]
    fn static_ramsey_alpha_r_only() {
        let p = base().with_perturbation(1e-3, 0.0, 0.0, 0.0).unwrap();
        let times = uniform_times(10.0, 9);
        let s = simulate_static_ramsey(&p, &SpamParams::none(), &times).unwrap();
        assert_eq!(s.values()[0], 1.0);
        for (t, v) in s.times().iter().zip(s.values()) {
            assert!((v - ((1e-3 - 0.1) * t).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn averaged_ramsey_beta_zero_is_mean_of_pair() {
        let p = base().with_perturbation(2e-3, -1e-3, -3e-3, 3e-3).unwrap();
        let times = uniform_times(10.0, 9);
        let s =
            simulate_avg_ramsey(&p, &SpamParams::none(), &times, AngleAverage::Analytic).unwrap();
        let a = p.alpha_abs();
        for (t, v) in s.times().iter().zip(s.values()) {
            let want = 0.5 * (((a - 0.1) * t).exp() + ((-a - 0.1) * t).exp());
            assert!((v - want).abs() < 1e-14);
        }
    }

    #[test]
    fn averaged_ramsey_unperturbed() {
        let times = uniform_times(10.0, 5);
        let s = simulate_avg_ramsey(&base(), &SpamParams::none(), &times, AngleAverage::Analytic)
            .unwrap();
        for (t, v) in s.times().iter().zip(s.values()) {
            assert!((v - (-0.1 * t).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn discrete_average_converges_to_analytic() {
        let p = base().with_perturbation(4e-4, -7e-4, 9e-4, -3e-4).unwrap();
        let spam = SpamParams::new(0.01, 0.015, -0.007).unwrap();
        let times = uniform_times(10.0, 25);
        let a = simulate_avg_ramsey(&p, &spam, &times, AngleAverage::Analytic).unwrap();
        let d = simulate_avg_ramsey(&p, &spam, &times, AngleAverage::Discrete(256)).unwrap();
        for (x, y) in a.values().iter().zip(d.values()) {
            assert!((x - y).abs() < 1e-10);
        }
        assert!(simulate_avg_ramsey(&p, &spam, &times, AngleAverage::Discrete(0)).is_err());
    }

    #[test]
    fn shot_noise_is_seeded_and_bounded() {
        let times = uniform_times(100.0, 20);
        let s = simulate_population_inversion(&base(), &SpamParams::none(), &times).unwrap();
        let a = with_shot_noise(&s, 500, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let b = with_shot_noise(&s, 500, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(a, b);
        assert!(a.values().iter().all(|v| (-1.0..=1.0).contains(v)));
        assert_eq!(a.values()[0], 1.0);
    }
}
