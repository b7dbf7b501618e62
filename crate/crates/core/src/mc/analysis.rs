//! Reductions from per-trial records to the numbers plotted and checked.

use serde::{Deserialize, Serialize};

use crate::estimation::fmt_f64;

/// Least-squares line through (log10 s, log10 y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepFit {
    pub slope: f64,
    /// Intercept of the log10-log10 line, i.e. log10 of the fitted y at s = 1.
    pub intercept: f64,
    pub points: usize,
}

/// Fits mean error against strength on log-log axes. Points with a
/// non-positive coordinate are skipped; fewer than four usable points give
/// `None`.
pub fn sweep_slope(points: &[(f64, f64)]) -> Option<SweepFit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(s, y)| *s > 0.0 && *y > 0.0 && s.is_finite() && y.is_finite())
        .map(|(s, y)| (s.log10(), y.log10()))
        .collect();
    if logs.len() < 4 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(SweepFit {
        slope,
        intercept: my - slope * mx,
        points: logs.len(),
    })
}

/// Strength at which `robust` first reaches `general`, interpolated linearly
/// in log s. Input is (s, robust, general) in any order. `None` if the robust
/// bound stays below everywhere or is already above at the smallest s.
pub fn crossover_strength(points: &[(f64, f64, f64)]) -> Option<f64> {
    let mut pts: Vec<_> = points.iter().copied().filter(|p| p.0 > 0.0).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let diff = |p: &(f64, f64, f64)| p.1 - p.2;
    if pts.is_empty() || diff(&pts[0]) >= 0.0 {
        return None;
    }
    pts.windows(2).find_map(|w| {
        let (d0, d1) = (diff(&w[0]), diff(&w[1]));
        (d0 < 0.0 && d1 >= 0.0).then(|| {
            let (l0, l1) = (w[0].0.ln(), w[1].0.ln());
            (l0 + (l1 - l0) * (-d0) / (d1 - d0)).exp()
        })
    })
}

/// One (p, r-bin) cell of the channel survey.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fig4Bin {
    pub p: f64,
    pub r_lo: f64,
    pub r_hi: f64,
    pub count: usize,
    pub mean_oracle: f64,
    pub mean_bound_new: f64,
    pub mean_general: Option<f64>,
    /// Share of channels in the bin whose new bound beats the general one.
    pub improvement_fraction: Option<f64>,
}

/// Per-channel inputs to [`fig4_binning`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinSample {
    pub p: f64,
    pub r: f64,
    pub oracle: f64,
    pub bound_new: f64,
    pub general: Option<f64>,
}

/// Groups channels by p and by r into bins [k·w, (k+1)·w) up to `r_max`.
/// Empty bins are omitted; output is sorted by p, then r.
pub fn fig4_binning(samples: &[BinSample], width: f64, r_max: f64) -> Vec<Fig4Bin> {
    let nbins = (r_max / width).round().max(1.0) as usize;
    let mut ps: Vec<f64> = samples.iter().map(|s| s.p).collect();
    ps.sort_by(f64::total_cmp);
    ps.dedup();

    let mut out = Vec::new();
    for &p in &ps {
        for k in 0..nbins {
            let (lo, hi) = (k as f64 * width, (k + 1) as f64 * width);
            let cell: Vec<&BinSample> = samples
                .iter()
                .filter(|s| s.p == p && s.r >= lo && s.r < hi)
                .collect();
            if cell.is_empty() {
                continue;
            }
            let n = cell.len() as f64;
            let mean = |f: &dyn Fn(&BinSample) -> f64| cell.iter().map(|s| f(s)).sum::<f64>() / n;
            let generals: Option<Vec<(f64, f64)>> =
                cell.iter().map(|s| s.general.map(|g| (g, s.bound_new))).collect();
            out.push(Fig4Bin {
                p,
                r_lo: lo,
                r_hi: hi,
                count: cell.len(),
                mean_oracle: mean(&|s| s.oracle),
                mean_bound_new: mean(&|s| s.bound_new),
                mean_general: generals
                    .as_ref()
                    .map(|g| g.iter().map(|x| x.0).sum::<f64>() / n),
                improvement_fraction: generals
                    .as_ref()
                    .map(|g| g.iter().filter(|x| x.1 < x.0).count() as f64 / n),
            });
        }
    }
    out
}

/// A line of summary.csv. Columns that do not apply are left empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub metric: String,
    pub label: String,
    pub gamma2_prime: Option<f64>,
    pub strength: Option<f64>,
    pub r_lo: Option<f64>,
    pub r_hi: Option<f64>,
    pub value: f64,
    pub count: usize,
}

impl SummaryRow {
    pub const CSV_HEADER: [&'static str; 8] = [
        "metric",
        "label",
        "gamma2_prime",
        "strength",
        "r_lo",
        "r_hi",
        "value",
        "count",
    ];

    pub fn new(
        metric: &str,
        label: &str,
        gamma2_prime: impl Into<Option<f64>>,
        value: f64,
        count: usize,
    ) -> Self {
        Self {
            metric: metric.to_string(),
            label: label.to_string(),
            gamma2_prime: gamma2_prime.into(),
            strength: None,
            r_lo: None,
            r_hi: None,
            value,
            count,
        }
    }

    pub fn at_strength(mut self, s: f64) -> Self {
        self.strength = Some(s);
        self
    }

    pub fn in_bin(mut self, lo: f64, hi: f64) -> Self {
        self.r_lo = Some(lo);
        self.r_hi = Some(hi);
        self
    }

    pub fn csv_row(&self) -> [String; 8] {
        let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
        [
            self.metric.clone(),
            self.label.clone(),
            opt(self.gamma2_prime),
            opt(self.strength),
            opt(self.r_lo),
            opt(self.r_hi),
            fmt_f64(self.value),
            self.count.to_string(),
        ]
    }
}

pub(crate) fn mean(xs: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs
        .into_iter()
        .fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn slope_of_quadratic_law() {
        let pts: Vec<_> = [1e-4, 3e-4, 1e-3, 3e-3, 1e-2]
            .iter()
            .map(|&s| (s, 0.7 * s * s))
            .collect();
        let fit = sweep_slope(&pts).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 0.7f64.log10()).abs() < 1e-10);
    }

    #[test]
    fn slope_needs_four_points() {
        let pts = [(1e-3, 1e-6), (1e-2, 1e-4), (0.0, 1.0), (1e-1, -1.0), (1.0, 1.0)];
        assert!(sweep_slope(&pts).is_none());
    }

    #[test]
    fn crossover_interpolates_in_log_strength() {
        // robust − general goes −1 → +1 between s = 1e-3 and 1e-1.
        let pts = [(1e-1, 2.0, 1.0), (1e-3, 0.0, 1.0), (1e-4, 0.0, 2.0)];
        let s = crossover_strength(&pts).unwrap();
        assert!((s - 1e-2).abs() < 1e-12);
    }

    #[test]
    fn crossover_absent() {
        assert!(crossover_strength(&[(1e-3, 0.0, 1.0), (1e-2, 0.5, 1.0)]).is_none());
        assert!(crossover_strength(&[(1e-3, 2.0, 1.0), (1e-2, 3.0, 1.0)]).is_none());
        assert!(crossover_strength(&[]).is_none());
    }

    fn sample(p: f64, r: f64, general: Option<f64>) -> BinSample {
        BinSample {
            p,
            r,
            oracle: 2.0 * r,
            bound_new: 3.0 * r,
            general,
        }
    }

    #[test]
    fn bins_by_p_and_r() {
        let s = [
            sample(0.0, 0.001, Some(1.0)),
            sample(0.0, 0.004, Some(0.0)),
            sample(0.0, 0.007, Some(1.0)),
            sample(0.1, 0.002, Some(1.0)),
            sample(0.1, 0.2, Some(1.0)),
        ];
        let bins = fig4_binning(&s, 0.005, 0.05);
        assert_eq!(bins.len(), 3);
        assert_eq!((bins[0].p, bins[0].count), (0.0, 2));
        assert!((bins[0].mean_oracle - 0.005).abs() < 1e-15);
        assert_eq!(bins[0].improvement_fraction, Some(0.5));
        assert_eq!(bins[1].r_lo, 0.005);
        assert_eq!((bins[2].p, bins[2].count), (0.1, 1));
    }

    #[test]
    fn bins_without_general_bound() {
        let bins = fig4_binning(&[sample(0.0, 0.001, None)], 0.005, 0.05);
        assert_eq!(bins[0].mean_general, None);
        assert_eq!(bins[0].improvement_fraction, None);
    }

    proptest! {
        #[test]
        fn binning_conserves_in_range_channels(rs in prop::collection::vec(0.0f64..0.08, 0..60)) {
            let s: Vec<_> = rs.iter().map(|&r| sample(0.0, r, None)).collect();
            let total: usize = fig4_binning(&s, 0.005, 0.05).iter().map(|b| b.count).sum();
            prop_assert_eq!(total, rs.iter().filter(|&&r| r < 0.05).count());
        }

        #[test]
        fn slope_recovers_power_law(a in 0.1f64..10.0, k in 0.5f64..3.0) {
            let pts: Vec<_> = [1e-4, 1e-3, 1e-2, 1e-1].iter().map(|&s: &f64| (s, a * s.powf(k))).collect();
            let fit = sweep_slope(&pts).unwrap();
            prop_assert!((fit.slope - k).abs() < 1e-9);
        }
    }
}
