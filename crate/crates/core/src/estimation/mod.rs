//! Simulated T1/T2 estimation experiments and the exponential fitter.

mod bias;
mod fit;
mod series;
mod simulate;

pub use bias::{predicted_estimator_bias, PredictedEstimates};
pub use fit::{fit_exponential, FitResult};
pub use series::{fmt_f64, uniform_times, DecaySeries};
pub use simulate::{
    apply_spam, simulate_avg_ramsey, simulate_population_inversion, simulate_static_ramsey,
    with_shot_noise, AngleAverage, SpamParams,
};
