use rayon::prelude::*;
use serde::Serialize;

use super::chip::{sample_deviations, stream_rng, ChipInstance, Setup, Stream};
use super::config::{Margins, PpvConfig};
use super::SETUPS;
use crate::error::{Error, Result};
use rand::Rng;

/// Zero-error probabilities for `none`, `rm13`, `hamming74`, `hamming84`.
pub type Targets = [f64; 4];

pub const REFERENCE_TARGETS: Targets = [0.800, 0.867, 0.898, 0.927];

/// Largest acceptable absolute deviation from any target.
pub const TOLERANCE: f64 = 0.05;

/// Search space: margins as fractions of the spread, and misfire probabilities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationGrid {
    pub margin_fractions: Vec<f64>,
    pub misfire: Vec<f64>,
}

impl Default for CalibrationGrid {
    /// Margins from σ down to 0.8σ in steps of σ/100; misfire log-spaced
    /// over 1e-4..1 with four points per decade.
    fn default() -> Self {
        CalibrationGrid {
            margin_fractions: (0..=20).map(|i| 1.0 - f64::from(i) / 100.0).collect(),
            misfire: (0..=16)
                .map(|i| 10f64.powf(-4.0 + f64::from(i) / 4.0))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Calibration {
    pub config: PpvConfig,
    pub targets: Targets,
    pub achieved: Targets,
    pub deviations: Targets,
    pub max_deviation: f64,
    pub converged: bool,
    /// Monte Carlo runs spent, one per setup evaluated.
    pub evaluations: usize,
    pub budget_exhausted: bool,
}

struct Prepared {
    setup: Setup,
    /// Per-chip deviations; independent of margins and misfire.
    deviations: Vec<Vec<f64>>,
}

fn clean(setup: &Setup, chip: &ChipInstance, cfg: &PpvConfig) -> bool {
    if cfg.misfire == 0.0 || chip.fault_count() == 0 {
        return true;
    }
    let mut messages = stream_rng(cfg.seed, chip.index, Stream::Messages);
    let mut faults = stream_rng(cfg.seed, chip.index, Stream::Faults);
    let mut state = setup.compiled().new_state();
    let span = 1u64 << setup.message_bits();
    (0..cfg.messages).all(|_| {
        let sent = messages.random_range(0..span);
        let mut d = super::Faults {
            faulty: &chip.faulty,
            misfire: cfg.misfire,
            rng: &mut faults,
        };
        let received = setup.compiled().run_message(&mut state, sent, &mut d);
        !setup.is_erroneous(sent, received, cfg.count_detected_as_error)
    })
}

/// Same value as the zero-error probability of a full run, without
/// resampling deviations and stopping each chip at its first error.
fn zero_error_prob(p: &Prepared, cfg: &PpvConfig) -> f64 {
    let ok = p
        .deviations
        .par_iter()
        .enumerate()
        .filter(|(i, devs)| {
            let chip =
                ChipInstance::from_deviations(&p.setup.netlist, &cfg.margins, *i, (*devs).clone())
                    .expect("deviations sampled for this netlist");
            clean(&p.setup, &chip, cfg)
        })
        .count();
    ok as f64 / p.deviations.len() as f64
}

/// Grid search over a shared margin and the misfire probability,
/// minimising the largest deviation from `targets`.
///
/// `base` supplies spread, distribution, seed and sizes. Grid points whose
/// running deviation already exceeds the best found are abandoned early.
/// At most `budget` Monte Carlo runs are spent.
pub fn calibrate_fault_model(
    targets: Targets,
    base: &PpvConfig,
    grid: &CalibrationGrid,
    budget: usize,
) -> Result<Calibration> {
    base.validate()?;
    let bad: Vec<String> = targets
        .iter()
        .zip(SETUPS)
        .filter(|(t, _)| !(0.0..=1.0).contains(*t))
        .map(|(_, s)| format!("targets.{s}"))
        .collect();
    if !bad.is_empty() {
        return Err(Error::InvalidConfig {
            details: bad
                .iter()
                .map(|k| format!("{k}: must lie in [0, 1]"))
                .collect(),
            keys: bad,
        });
    }
    if grid.margin_fractions.is_empty() || grid.misfire.is_empty() {
        return Err(Error::invalid("calibration grid is empty"));
    }
    if let Some(q) = grid.misfire.iter().find(|q| !(0.0..=1.0).contains(*q)) {
        return Err(Error::invalid(format!("grid misfire {q} not in [0, 1]")));
    }
    if let Some(f) = grid
        .margin_fractions
        .iter()
        .find(|f| !(**f >= 0.0 && f.is_finite()))
    {
        return Err(Error::invalid(format!(
            "grid margin fraction {f} must be >= 0"
        )));
    }

    let prepared = SETUPS
        .iter()
        .map(|name| {
            let setup = Setup::named(name)?;
            let deviations = (0..base.chips)
                .into_par_iter()
                .map(|i| sample_deviations(&setup.netlist, base, i))
                .collect();
            Ok(Prepared { setup, deviations })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best: Option<(f64, PpvConfig, Targets)> = None;
    let mut evaluations = 0;
    let mut exhausted = false;
    'search: for &frac in &grid.margin_fractions {
        for &q in &grid.misfire {
            let cfg = PpvConfig {
                margins: Margins::uniform(frac * base.spread),
                misfire: q,
                ..base.clone()
            };
            let bound = best.as_ref().map_or(f64::INFINITY, |b| b.0);
            let mut achieved = [0.0; 4];
            let mut worst: f64 = 0.0;
            for (i, p) in prepared.iter().enumerate() {
                if evaluations == budget {
                    exhausted = true;
                    break 'search;
                }
                evaluations += 1;
                achieved[i] = zero_error_prob(p, &cfg);
                worst = worst.max((achieved[i] - targets[i]).abs());
                if worst >= bound {
                    break;
                }
            }
            if worst < bound {
                best = Some((worst, cfg, achieved));
            }
        }
    }

    let Some((max_deviation, config, achieved)) = best else {
        return Err(Error::NotConverged(format!(
            "budget of {budget} runs ended before one grid point was evaluated"
        )));
    };
    let deviations = std::array::from_fn(|i| achieved[i] - targets[i]);
    Ok(Calibration {
        config,
        targets,
        achieved,
        deviations,
        max_deviation,
        converged: max_deviation <= TOLERANCE,
        evaluations,
        budget_exhausted: exhausted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ppv::monte_carlo;

    fn small() -> PpvConfig {
        PpvConfig {
            chips: 100,
            messages: 20,
            seed: 3,
            ..PpvConfig::default()
        }
    }

    #[test]
    fn shortcut_matches_full_run() {
        let base = small();
        let cfg = PpvConfig {
            margins: Margins::uniform(0.15),
            misfire: 0.05,
            ..base.clone()
        };
        let setup = Setup::named("hamming84").unwrap();
        let p = Prepared {
            deviations: (0..base.chips)
                .map(|i| sample_deviations(&setup.netlist, &base, i))
                .collect(),
            setup,
        };
        let full = monte_carlo(&p.setup, &cfg).unwrap().zero_error_prob;
        assert_eq!(zero_error_prob(&p, &cfg), full);
    }

    #[test]
    fn all_ones_picks_margin_equal_to_spread() {
        let grid = CalibrationGrid {
            margin_fractions: vec![1.0, 0.9],
            misfire: vec![0.01, 0.1],
        };
        let cal = calibrate_fault_model([1.0; 4], &small(), &grid, 100).unwrap();
        assert_eq!(cal.max_deviation, 0.0);
        assert!(cal.converged);
        assert_eq!(cal.config.margins, Margins::uniform(0.2));
    }

    #[test]
    fn all_zero_is_not_reached() {
        let grid = CalibrationGrid {
            margin_fractions: vec![1.0, 0.95],
            misfire: vec![0.001],
        };
        let cal = calibrate_fault_model([0.0; 4], &small(), &grid, 100).unwrap();
        assert!(!cal.converged);
    }

    #[test]
    fn budget_is_respected() {
        let cal =
            calibrate_fault_model(REFERENCE_TARGETS, &small(), &CalibrationGrid::default(), 6)
                .unwrap();
        assert!(cal.evaluations <= 6);
        assert!(cal.budget_exhausted);
    }

    #[test]
    fn bad_targets_name_their_setup() {
        match calibrate_fault_model(
            [0.5, 1.5, 0.5, -0.1],
            &small(),
            &CalibrationGrid::default(),
            10,
        ) {
            Err(Error::InvalidConfig { keys, .. }) => {
                assert_eq!(keys, ["targets.rm13", "targets.hamming84"])
            }
            other => panic!("{other:?}"),
        }
    }
}
