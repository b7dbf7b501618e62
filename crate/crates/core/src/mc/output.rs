//! trials.csv, summary.csv and meta.json.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::json;

use super::{Dataset, TrialRecord};
use crate::diamond::BoundReport;
use crate::error::Result;
use crate::estimation::fmt_f64;
use crate::rb::RbReport;

pub const TRIALS_FILE: &str = "trials.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const META_FILE: &str = "meta.json";

pub const RNG_DESCRIPTION: &str =
    "ChaCha8Rng (rand_chacha 0.3), seed_from_u64(seed), stream = global trial index";

const PARAM_COLUMNS: [&str; 9] = [
    "trial",
    "gamma2_prime_group",
    "strength",
    "gamma1",
    "gamma2",
    "lambda",
    "alpha_r",
    "alpha_i",
    "beta_raw",
];

const ESTIMATE_COLUMNS: [&str; 11] = [
    "delta_raw",
    "spam_k",
    "spam_n1",
    "spam_n2",
    "estimator",
    "truth",
    "estimate",
    "error",
    "predicted_error",
    "iterations",
    "rms_residual",
];

const CHANNEL_COLUMNS: [&str; 5] = [
    "delta_raw",
    "gamma1_discrete",
    "gamma2_discrete",
    "r_gd",
    "esum_true",
];

const CHANNEL_TAIL: [&str; 3] = ["oracle_spread", "oracle_flagged", "completely_positive"];

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn param_fields(t: &TrialRecord) -> Vec<String> {
    let p = &t.params;
    let mut v = vec![t.index.to_string()];
    v.extend(
        [
            t.group, t.strength, p.gamma1, p.gamma2, p.lambda, p.alpha_r, p.alpha_i, p.beta_raw,
        ]
        .map(fmt_f64),
    );
    v
}

impl Dataset {
    fn is_channel_study(&self) -> bool {
        self.config.experiment.is_channel_study()
    }

    pub fn trials_header(&self) -> Vec<&'static str> {
        let mut h = PARAM_COLUMNS.to_vec();
        if self.is_channel_study() {
            h.extend(CHANNEL_COLUMNS);
            h.extend(RbReport::CSV_HEADER);
            h.extend(BoundReport::CSV_HEADER);
            h.extend(CHANNEL_TAIL);
        } else {
            h.extend(ESTIMATE_COLUMNS);
        }
        h
    }

    /// One row per fitted estimate, or one per channel for the bound studies.
    pub fn write_trials_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(self.trials_header())?;
        for t in &self.trials {
            if let Some(c) = &t.channel {
                let mut row = param_fields(t);
                row.push(fmt_f64(t.params.delta_raw));
                row.extend([c.gamma1_discrete, c.gamma2_discrete, c.r_gd].map(fmt_f64));
                row.push(opt(c.esum_true));
                row.extend(c.rb.csv_row());
                row.extend(c.bounds.csv_row());
                row.push(fmt_f64(c.oracle_spread));
                row.push(c.oracle_flagged.to_string());
                row.push(c.completely_positive.to_string());
                out.write_record(&row)?;
            }
            for e in &t.estimates {
                let mut row = param_fields(t);
                row.extend([t.params.delta_raw, t.spam.k, t.spam.n1, t.spam.n2].map(fmt_f64));
                row.push(e.estimator.as_str().to_string());
                row.push(fmt_f64(e.truth));
                row.push(opt(e.estimate));
                row.push(opt(e.error()));
                row.push(opt(e.predicted_error));
                row.push(e.iterations.to_string());
                row.push(fmt_f64(e.rms_residual));
                out.write_record(&row)?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_summary_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(super::SummaryRow::CSV_HEADER)?;
        for row in &self.summary {
            out.write_record(row.csv_row())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn meta(&self) -> serde_json::Value {
        json!({
            "experiment": self.config.experiment.as_str(),
            "seed": self.config.seed,
            "version": env!("CARGO_PKG_VERSION"),
            "rng": RNG_DESCRIPTION,
            "config": self.config,
            "config_text": self.config.to_key_values(),
            "work_items": self.trials.len(),
            "fit_failures": self.fit_failures,
            "general_bound": self.general_bound,
        })
    }

    /// Writes the three output files into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        self.write_trials_csv(fs::File::create(dir.join(TRIALS_FILE))?)?;
        self.write_summary_csv(fs::File::create(dir.join(SUMMARY_FILE))?)?;
        let mut meta = serde_json::to_string_pretty(&self.meta())?;
        meta.push('\n');
        fs::write(dir.join(META_FILE), meta)?;
        Ok(())
    }
}
