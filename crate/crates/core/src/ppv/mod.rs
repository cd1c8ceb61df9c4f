//! Process-parameter-variation Monte Carlo.
//!
//! Each chip draws one deviation per physical cell. A cell whose deviation
//! exceeds its kind's margin is faulty and misbehaves with probability
//! `misfire` on every evaluation. A chip then carries `messages` random
//! messages through encoder and decoder, and the number of wrong deliveries
//! `N` is recorded. Over many chips this gives the distribution of `N`.
//!
//! Chip `i` uses random streams derived from `(seed, i)`, so results do not
//! depend on how chips are spread across threads.

mod calibrate;
mod chip;
mod config;

pub use calibrate::{
    calibrate_fault_model, Calibration, CalibrationGrid, Targets, REFERENCE_TARGETS, TOLERANCE,
};
pub use chip::{
    derive_seed, inject_and_run, run_trial, sample_chip, sample_deviations, stream_rng,
    ChipInstance, Faults, Setup, Stream,
};
pub use config::{Distribution, Margins, PpvConfig, CALIBRATED_CONFIG};

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;

/// The four links compared in the experiment, in table order.
pub const SETUPS: [&str; 4] = ["none", "rm13", "hamming74", "hamming84"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CdfPoint {
    pub n: usize,
    pub cdf: f64,
}

/// Empirical distribution of erroneous-message counts over chips.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CdfSeries {
    pub setup: String,
    pub chips: usize,
    pub messages: usize,
    /// `histogram[n]` chips saw exactly `n` erroneous messages.
    pub histogram: Vec<u64>,
    pub points: Vec<CdfPoint>,
    pub zero_error_prob: f64,
}

impl CdfSeries {
    pub fn from_counts(setup: &str, counts: &[usize], messages: usize) -> Self {
        let mut histogram = vec![0u64; messages + 1];
        for &n in counts {
            histogram[n.min(messages)] += 1;
        }
        let chips = counts.len();
        let mut acc = 0;
        let points = histogram
            .iter()
            .enumerate()
            .map(|(n, &h)| {
                acc += h;
                CdfPoint {
                    n,
                    cdf: if chips == 0 {
                        1.0
                    } else {
                        acc as f64 / chips as f64
                    },
                }
            })
            .collect::<Vec<_>>();
        CdfSeries {
            setup: setup.to_string(),
            chips,
            messages,
            zero_error_prob: points[0].cdf,
            histogram,
            points,
        }
    }

    pub fn cdf(&self, n: usize) -> f64 {
        self.points[n.min(self.messages)].cdf
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,cdf\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{:.6}", p.n, p.cdf);
        }
        out
    }
}

/// Erroneous-message count for every chip, in chip order.
pub fn chip_counts(setup: &Setup, cfg: &PpvConfig) -> Result<Vec<usize>> {
    cfg.validate()?;
    Ok((0..cfg.chips)
        .into_par_iter()
        .map(|i| run_trial(setup, &sample_chip(&setup.netlist, cfg, i), cfg))
        .collect())
}

pub fn monte_carlo(setup: &Setup, cfg: &PpvConfig) -> Result<CdfSeries> {
    Ok(CdfSeries::from_counts(
        &setup.name,
        &chip_counts(setup, cfg)?,
        cfg.messages,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ManifestEntry {
    pub setup: String,
    pub netlist_hash: String,
    pub zero_error_prob: f64,
    pub csv: String,
}

/// Everything needed to reproduce a Monte Carlo run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config: PpvConfig,
    pub runs: Vec<ManifestEntry>,
}

impl RunManifest {
    pub fn new(cfg: &PpvConfig) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: cfg.seed,
            config: cfg.clone(),
            runs: Vec::new(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(rho: f64, misfire: f64) -> PpvConfig {
        PpvConfig {
            margins: Margins::uniform(rho),
            misfire,
            chips: 200,
            seed: 11,
            ..PpvConfig::default()
        }
    }

    #[test]
    fn cdf_is_monotone_and_ends_at_one() {
        let cdf = CdfSeries::from_counts("x", &[0, 3, 3, 100, 7], 100);
        assert!(cdf.points.windows(2).all(|w| w[0].cdf <= w[1].cdf));
        assert_eq!(cdf.points.last().unwrap().cdf, 1.0);
        assert_eq!(cdf.zero_error_prob, 0.2);
        assert_eq!(cdf.cdf(3), 0.6);
        assert_eq!(cdf.points.len(), 101);
    }

    #[test]
    fn csv_has_one_row_per_count() {
        let cdf = CdfSeries::from_counts("x", &[0, 1], 2);
        assert_eq!(cdf.to_csv(), "n,cdf\n0,0.500000\n1,1.000000\n2,1.000000\n");
    }

    #[test]
    fn zero_spread_is_a_step_at_zero() {
        let setup = Setup::named("hamming84").unwrap();
        let cfg = PpvConfig {
            spread: 0.0,
            ..quick(0.0, 1.0)
        };
        let cdf = monte_carlo(&setup, &cfg).unwrap();
        assert!(cdf.points.iter().all(|p| p.cdf == 1.0));
    }

    #[test]
    fn reruns_are_identical() {
        let setup = Setup::named("rm13").unwrap();
        let a = monte_carlo(&setup, &quick(0.15, 0.05)).unwrap();
        let b = monte_carlo(&setup, &quick(0.15, 0.05)).unwrap();
        assert_eq!(a, b);
        assert!(a.zero_error_prob < 1.0);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let setup = Setup::named("hamming74").unwrap();
        let cfg = quick(0.16, 0.1);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let three = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let a = one.install(|| chip_counts(&setup, &cfg)).unwrap();
        let b = three.install(|| chip_counts(&setup, &cfg)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let setup = Setup::named("none").unwrap();
        let cfg = PpvConfig {
            chips: 0,
            ..quick(0.1, 0.1)
        };
        assert!(monte_carlo(&setup, &cfg).is_err());
    }
}
