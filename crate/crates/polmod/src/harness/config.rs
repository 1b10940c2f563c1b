//! Scenario configuration: a flat text format of dotted `key = value` lines
//! with `#` comments, grouped by section prefix (scenario.*, fading.*,
//! code.*, sweep.*, stop.*). Unknown keys are rejected so typos surface
//! instead of silently running the default.
//!
//! Noise calibration: with unit symbol energy, an Eb/N0 axis value maps to
//! N0 = 1 / (10^(EbN0_dB/10) * SE * Rc) where SE is the scheme's spectral
//! efficiency in information bits per channel use and Rc the code rate
//! (1 when uncoded).

use crate::baselines::SchemeKind;
use crate::channel::FadingParams;
use crate::constellation::ConstellationKind;
use crate::fec::{CodeConfig, FecCodec};
use crate::pmod::DemodKind;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected 'key = value', got '{text}'")]
    BadLine { line: usize, text: String },
    #[error("unknown configuration key '{0}'")]
    UnknownKey(String),
    #[error("key '{key}': cannot parse '{value}': {message}")]
    BadValue { key: String, value: String, message: String },
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

/// Which scenario parameter the sweep axis varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepKind {
    /// Axis is Eb/N0 in dB.
    Ebn0,
    /// Axis is cross-polarization discrimination in dB.
    Xpd,
    /// Axis is the channel-estimate error power |xi|^2.
    CsiError,
}

impl SweepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepKind::Ebn0 => "ebn0",
            SweepKind::Xpd => "xpd",
            SweepKind::CsiError => "csi_error",
        }
    }
}

impl FromStr for SweepKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ebn0" => Ok(SweepKind::Ebn0),
            "xpd" => Ok(SweepKind::Xpd),
            "csi_error" => Ok(SweepKind::CsiError),
            other => Err(format!("unknown sweep kind '{other}' (expected ebn0|xpd|csi_error)")),
        }
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Inclusive arithmetic axis start..=stop in increments of step.
#[derive(Clone, Copy, Debug)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepSpec {
    /// Axis points, endpoint included up to rounding slack.
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start + i as f64 * self.step).collect()
    }

    fn validate(&self) -> Result<(), String> {
        if !self.step.is_finite() || self.step <= 0.0 {
            return Err(format!("sweep step must be positive, got {}", self.step));
        }
        if !self.start.is_finite() || !self.stop.is_finite() || self.stop < self.start {
            return Err(format!("sweep range [{}, {}] is empty", self.start, self.stop));
        }
        if self.kind == SweepKind::CsiError && self.start < 0.0 {
            return Err("csi_error axis must be nonnegative".into());
        }
        Ok(())
    }
}

/// A point stops at `min_block_errors` observed block errors, or at
/// `max_blocks` simulated blocks, whichever comes first.
#[derive(Clone, Copy, Debug)]
pub struct StopRule {
    pub min_block_errors: u64,
    pub max_blocks: u64,
}

#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub scheme: SchemeKind,
    /// Polarized-modulation demodulator; only valid with the pmod scheme.
    pub demod: Option<DemodKind>,
    pub constellation: ConstellationKind,
    pub coded: bool,
    /// Symbols per block in uncoded runs.
    pub block_symbols: usize,
    /// Bearer information bitrate R for throughput T = R (1 - BLER) G.
    pub bitrate_kbps: f64,
    /// Operating Eb/N0 in dB when the sweep axis is not ebn0.
    pub ebn0_db: f64,
    /// Cross-polarization discrimination in dB when not swept.
    pub xpd_db: f64,
    /// Channel-estimate error power |xi|^2 when not swept.
    pub csi_error: f64,
    /// Adds the six cochannel beams and enables the MMSE front end.
    pub interference: bool,
    /// Keep coupling coefficient signs instead of magnitudes.
    pub interference_signed: bool,
    pub seed: u64,
    pub fading: FadingParams,
    pub code: CodeConfig,
    pub sweep: SweepSpec,
    pub stop: StopRule,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            scheme: SchemeKind::Pmod,
            demod: None,
            constellation: ConstellationKind::Qpsk,
            coded: true,
            block_symbols: 512,
            bitrate_kbps: 40.0,
            ebn0_db: 20.0,
            xpd_db: 15.0,
            csi_error: 0.0,
            interference: false,
            interference_signed: false,
            seed: 1,
            fading: FadingParams::default(),
            code: CodeConfig::default(),
            sweep: SweepSpec { kind: SweepKind::Ebn0, start: 0.0, stop: 12.0, step: 1.0 },
            stop: StopRule { min_block_errors: 100, max_blocks: 1_000_000 },
        }
    }
}

fn parse_value<T>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T: FromStr,
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        message: e.to_string(),
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" | "on" | "yes" => Ok(true),
        "false" | "off" | "no" => Ok(false),
        _ => Err(ConfigError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
            message: "expected true|false".into(),
        }),
    }
}

impl ScenarioConfig {
    /// Parses config text on top of the defaults. Call [`validate`]
    /// (Self::validate) once any command-line overrides are applied.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ScenarioConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::BadLine {
                line: idx + 1,
                text: raw.trim().to_string(),
            })?;
            cfg.apply(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    /// Sets a single dotted key, the same path used for `--override`.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "scenario.scheme" => self.scheme = parse_value(key, value)?,
            "scenario.demod" => self.demod = Some(parse_value(key, value)?),
            "scenario.constellation" => self.constellation = parse_value(key, value)?,
            "scenario.coded" => self.coded = parse_bool(key, value)?,
            "scenario.block_symbols" => self.block_symbols = parse_value(key, value)?,
            "scenario.bitrate_kbps" => self.bitrate_kbps = parse_value(key, value)?,
            "scenario.ebn0_db" => self.ebn0_db = parse_value(key, value)?,
            "scenario.xpd_db" => self.xpd_db = parse_value(key, value)?,
            "scenario.csi_error" => self.csi_error = parse_value(key, value)?,
            "scenario.interference" => self.interference = parse_bool(key, value)?,
            "scenario.interference_signed" => self.interference_signed = parse_bool(key, value)?,
            "scenario.seed" => self.seed = parse_value(key, value)?,
            "fading.k_factor" => self.fading.k_factor = parse_value(key, value)?,
            "fading.rho" => self.fading.rho = parse_value(key, value)?,
            "fading.doppler_hz" => self.fading.doppler_hz = parse_value(key, value)?,
            "fading.symbol_rate_hz" => self.fading.symbol_rate_hz = parse_value(key, value)?,
            "code.info_bits" => self.code.info_bits = parse_value(key, value)?,
            "sweep.kind" => self.sweep.kind = parse_value(key, value)?,
            "sweep.start" => self.sweep.start = parse_value(key, value)?,
            "sweep.stop" => self.sweep.stop = parse_value(key, value)?,
            "sweep.step" => self.sweep.step = parse_value(key, value)?,
            "stop.min_block_errors" => self.stop.min_block_errors = parse_value(key, value)?,
            "stop.max_blocks" => self.stop.max_blocks = parse_value(key, value)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// The demodulator to run; soft decision unless configured otherwise.
    pub fn demod(&self) -> DemodKind {
        self.demod.unwrap_or(DemodKind::Sd)
    }

    /// Coded bits consumed per scheduling step: one channel use, except the
    /// orthogonal block code which maps pairs of uses.
    pub fn bits_per_step(&self) -> usize {
        let b = self.constellation.bits_per_symbol();
        match self.scheme {
            SchemeKind::Pmod => b + 1,
            SchemeKind::Reference => b,
            SchemeKind::Vblast | SchemeKind::Ostbc => 2 * b,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.fading.validate().map_err(ConfigError::Invalid)?;
        self.sweep.validate().map_err(ConfigError::Invalid)?;
        if !(self.bitrate_kbps.is_finite() && self.bitrate_kbps > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "bitrate must be positive, got {}",
                self.bitrate_kbps
            )));
        }
        if !self.ebn0_db.is_finite() || !self.xpd_db.is_finite() {
            return Err(ConfigError::Invalid("operating point must be finite".into()));
        }
        if !(self.csi_error.is_finite() && self.csi_error >= 0.0) {
            return Err(ConfigError::Invalid(format!(
                "csi_error must be nonnegative, got {}",
                self.csi_error
            )));
        }
        if self.demod.is_some() && self.scheme != SchemeKind::Pmod {
            return Err(ConfigError::Invalid(format!(
                "scenario.demod applies to the pmod scheme, not {}",
                self.scheme.as_str()
            )));
        }
        if self.stop.min_block_errors == 0 || self.stop.max_blocks == 0 {
            return Err(ConfigError::Invalid("stop rule thresholds must be at least 1".into()));
        }
        if self.coded {
            self.code.validate().map_err(ConfigError::Invalid)?;
            let coded_bits = FecCodec::new(self.code).coded_bits();
            let step = self.bits_per_step();
            if coded_bits % step != 0 {
                return Err(ConfigError::Invalid(format!(
                    "codeword of {coded_bits} bits does not divide into {step}-bit groups; \
                     adjust code.info_bits or the constellation"
                )));
            }
        } else {
            if self.block_symbols == 0 {
                return Err(ConfigError::Invalid("block_symbols must be at least 1".into()));
            }
            if self.scheme == SchemeKind::Ostbc && self.block_symbols % 2 != 0 {
                return Err(ConfigError::Invalid(
                    "the orthogonal block scheme needs an even block_symbols".into(),
                ));
            }
        }
        Ok(())
    }
}
