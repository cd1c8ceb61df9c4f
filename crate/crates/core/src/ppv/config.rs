use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synth::CellKind;

/// Shipped fault model calibrated against reference zero-error rates.
pub const CALIBRATED_CONFIG: &str = include_str!("../../data/ppv_calibrated.toml");

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distribution {
    /// Uniform over `[-spread, spread]`.
    #[default]
    Uniform,
    /// Normal with standard deviation `spread / 2`, redrawn until it falls
    /// inside `[-spread, spread]`.
    GaussianTruncated,
}

/// Per-kind margin: a cell is faulty when `|deviation|` exceeds it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Margins {
    pub xor: f64,
    pub dff: f64,
    pub splitter: f64,
    pub sfq2dc: f64,
}

impl Margins {
    pub fn uniform(rho: f64) -> Self {
        Margins {
            xor: rho,
            dff: rho,
            splitter: rho,
            sfq2dc: rho,
        }
    }

    /// `None` for cells that cannot fail (inputs and the clock source).
    pub fn get(&self, kind: CellKind) -> Option<f64> {
        match kind {
            CellKind::Xor => Some(self.xor),
            CellKind::Dff => Some(self.dff),
            CellKind::Splitter => Some(self.splitter),
            CellKind::Sfq2Dc => Some(self.sfq2dc),
            CellKind::Input | CellKind::ClockInput => None,
        }
    }

    fn entries(&self) -> [(&'static str, f64); 4] {
        [
            ("margins.xor", self.xor),
            ("margins.dff", self.dff),
            ("margins.splitter", self.splitter),
            ("margins.sfq2dc", self.sfq2dc),
        ]
    }
}

impl Default for Margins {
    fn default() -> Self {
        Margins::uniform(0.2)
    }
}

/// Monte Carlo parameters. The default has margins equal to the spread, so
/// no cell can fail; see [`PpvConfig::calibrated`] for the shipped model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PpvConfig {
    /// Fractional parameter spread σ.
    pub spread: f64,
    pub distribution: Distribution,
    pub margins: Margins,
    /// Probability that a faulty cell misbehaves on one evaluation.
    pub misfire: f64,
    pub seed: u64,
    pub chips: usize,
    pub messages: usize,
    /// Whether detected but uncorrectable messages count as erroneous.
    pub count_detected_as_error: bool,
}

impl Default for PpvConfig {
    fn default() -> Self {
        PpvConfig {
            spread: 0.2,
            distribution: Distribution::Uniform,
            margins: Margins::default(),
            misfire: 0.0,
            seed: 0,
            chips: 1000,
            messages: 100,
            count_detected_as_error: true,
        }
    }
}

impl PpvConfig {
    pub fn calibrated() -> Self {
        PpvConfig::from_toml(CALIBRATED_CONFIG, "ppv_calibrated.toml")
            .expect("shipped config parses")
    }

    /// Parses and validates. Missing keys take their default.
    pub fn from_toml(text: &str, source_name: &str) -> Result<Self> {
        let cfg: PpvConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(0, |s| {
                text[..s.start.min(text.len())].matches('\n').count() + 1
            });
            Error::Parse {
                source_name: source_name.to_string(),
                line,
                message: e.message().to_string(),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks every range invariant and reports all offending keys at once.
    pub fn validate(&self) -> Result<()> {
        let mut keys = Vec::new();
        let mut details = Vec::new();
        let mut bad = |key: &str, why: String| {
            keys.push(key.to_string());
            details.push(format!("{key}: {why}"));
        };
        if !(0.0..=1.0).contains(&self.spread) {
            bad("spread", format!("{} not in [0, 1]", self.spread));
        }
        for (key, rho) in self.margins.entries() {
            if !(rho >= 0.0 && rho.is_finite()) {
                bad(key, format!("{rho} must be a finite value >= 0"));
            }
        }
        if !(0.0..=1.0).contains(&self.misfire) {
            bad("misfire", format!("{} not in [0, 1]", self.misfire));
        }
        if self.chips == 0 {
            bad("chips", "must be at least 1".to_string());
        }
        if self.messages == 0 {
            bad("messages", "must be at least 1".to_string());
        }
        if keys.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig { keys, details })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_toml() {
        let cfg = PpvConfig {
            distribution: Distribution::GaussianTruncated,
            margins: Margins::uniform(0.17),
            misfire: 0.03,
            seed: 99,
            ..PpvConfig::default()
        };
        let back = PpvConfig::from_toml(&cfg.to_toml(), "x").unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn missing_keys_default() {
        let cfg = PpvConfig::from_toml("seed = 5\n", "x").unwrap();
        assert_eq!(cfg.seed, 5);
        assert_eq!((cfg.chips, cfg.messages), (1000, 100));
        assert_eq!(cfg.spread, 0.2);
    }

    #[test]
    fn validation_lists_every_bad_key() {
        let text = "spread = 1.5\nmisfire = -0.1\nmessages = 0\n[margins]\nxor = -1.0\ndff = 0.1\nsplitter = 0.1\nsfq2dc = 0.1\n";
        match PpvConfig::from_toml(text, "x").unwrap_err() {
            Error::InvalidConfig { keys, .. } => {
                assert_eq!(keys, ["spread", "margins.xor", "misfire", "messages"]);
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn unknown_key_reports_line() {
        match PpvConfig::from_toml("seed = 1\nbogus = 2\n", "cfg.toml").unwrap_err() {
            Error::Parse {
                source_name, line, ..
            } => {
                assert_eq!(source_name, "cfg.toml");
                assert_eq!(line, 2);
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn shipped_config_is_valid() {
        let cfg = PpvConfig::calibrated();
        assert_eq!(cfg.spread, 0.2);
        assert_eq!((cfg.chips, cfg.messages), (1000, 100));
    }
}
