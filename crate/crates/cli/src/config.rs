use crate::error::CliError;
use outagelab::optimizer::OptimizeOptions;
use outagelab::MiConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

pub const BUDGET_ENV: &str = "OUTAGELAB_BUDGET_OPS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutageMethodChoice {
    /// Boundary integration for B=2, ray Monte Carlo otherwise.
    #[default]
    Auto,
    /// Counting Monte Carlo over fading draws.
    Mc,
    /// Radially conditioned Monte Carlo over fading directions.
    Ray,
    Boundary,
}

/// SNR list in dB: a number, an explicit list, or `"a:b:step"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaSpec {
    Single(f64),
    List(Vec<f64>),
    Range(String),
}

impl GammaSpec {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        match self {
            GammaSpec::Single(v) => Ok(vec![*v]),
            GammaSpec::List(v) if v.is_empty() => Err(CliError::config("field `gamma_db`: empty list")),
            GammaSpec::List(v) => Ok(v.clone()),
            GammaSpec::Range(s) => parse_range("gamma_db", s),
        }
    }
}

/// Parses `"x"` or `"a:b:step"` into an inclusive grid.
pub fn parse_range(field: &str, text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| CliError::config(format!("field `{field}`: `{s}` is not a number")))
    };
    match parts.as_slice() {
        [x] => Ok(vec![num(x)?]),
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) || b < a {
                return Err(CliError::config(format!("field `{field}`: range `{text}` needs a <= b and step > 0")));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|k| round_grid(a + step * k as f64)).collect())
        }
        _ => Err(CliError::config(format!("field `{field}`: expected `x` or `a:b:step`, got `{text}`"))),
    }
}

fn round_grid(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

/// Every setting of a run. Flags override values loaded from `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub constellation: Option<String>,
    pub constellation_file: Option<PathBuf>,
    #[serde(rename = "B")]
    pub dim: Option<usize>,
    #[serde(rename = "R")]
    pub rate: Option<f64>,
    pub m: Option<f64>,
    #[serde(rename = "Rc")]
    pub rc: Option<f64>,
    pub theta_deg: Option<f64>,
    pub theta1_deg: Option<f64>,
    pub phases_deg: Option<Vec<f64>>,
    pub lambda0_sign: Option<i8>,
    pub gamma_db: Option<GammaSpec>,
    /// Fading gains for `mi`; defaults to all ones.
    pub alpha: Option<Vec<f64>>,
    /// Sweep grid in degrees, `"a:b:step"`.
    pub theta_range_deg: Option<String>,
    /// Constellation names compared by `expand`.
    pub constellations: Option<Vec<String>>,
    pub method: OutageMethodChoice,
    pub outage_samples: usize,
    pub rays: usize,
    pub boundary_intervals: usize,
    pub seed: u64,
    pub engine: MiConfig,
    pub optimize: OptimizeOptions,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            constellation: None,
            constellation_file: None,
            dim: None,
            rate: None,
            m: None,
            rc: None,
            theta_deg: None,
            theta1_deg: None,
            phases_deg: None,
            lambda0_sign: None,
            gamma_db: None,
            alpha: None,
            theta_range_deg: None,
            constellations: None,
            method: OutageMethodChoice::Auto,
            outage_samples: 100_000,
            rays: 2000,
            boundary_intervals: outagelab::outage::DEFAULT_TRACE_INTERVALS,
            seed: 1,
            engine: MiConfig::default(),
            optimize: OptimizeOptions::default(),
            format: Format::Csv,
            out: None,
            threads: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            let msg = msg.rsplit_once(" at line ").map_or(msg.as_str(), |(m, _)| m);
            CliError::config(format!("{origin}:{}:{}: {msg}", e.line(), e.column()))
        })
    }

    /// Applies the budget override from the environment and copies the run
    /// seed into the engine settings.
    pub fn finalize(mut self) -> Result<Self, CliError> {
        self.engine.seed = self.seed;
        if let Ok(v) = std::env::var(BUDGET_ENV) {
            let ops = v
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite() && *x >= 1.0)
                .ok_or_else(|| CliError::config(format!("{BUDGET_ENV}: `{v}` is not a positive number")))?;
            self.engine.budget_ops = ops as u64;
        }
        self.engine.validate().map_err(|e| CliError::config(format!("field `engine`: {e}")))?;
        if self.outage_samples < 1000 {
            return Err(CliError::config("field `outage_samples`: at least 1000 samples are required"));
        }
        if self.rays < outagelab::outage::MIN_RAYS {
            return Err(CliError::config(format!(
                "field `rays`: at least {} rays are required",
                outagelab::outage::MIN_RAYS
            )));
        }
        if let Some(0) = self.threads {
            return Err(CliError::config("field `threads`: must be at least 1"));
        }
        Ok(self)
    }

    /// SHA-256 over the settings that influence results, truncated to 16 hex digits.
    pub fn hash(&self) -> String {
        let mut canon = self.clone();
        canon.out = None;
        canon.threads = None;
        canon.format = Format::Csv;
        let bytes = serde_json::to_vec(&canon).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn gammas_db(&self) -> Result<Vec<f64>, CliError> {
        self.gamma_db
            .as_ref()
            .ok_or_else(|| CliError::config("missing `--gamma-db`"))?
            .values()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_are_inclusive() {
        assert_eq!(parse_range("g", "0:10:2.5").unwrap(), vec![0.0, 2.5, 5.0, 7.5, 10.0]);
        assert_eq!(parse_range("g", "3").unwrap(), vec![3.0]);
        assert!(parse_range("g", "1:0:1").is_err());
        assert!(parse_range("g", "1:x:1").is_err());
    }

    #[test]
    fn config_errors_carry_positions() {
        let err = ExperimentConfig::parse("{\n  \"R\": 0.9,\n  \"bogus\": 1\n}", "cfg.json").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cfg.json:3:"), "{msg}");
        assert!(msg.contains("bogus"), "{msg}");
    }

    #[test]
    fn hash_ignores_output_settings() {
        let a = ExperimentConfig { rate: Some(0.9), ..Default::default() };
        let b = ExperimentConfig { out: Some("x.csv".into()), threads: Some(3), ..a.clone() };
        let c = ExperimentConfig { seed: 2, ..a.clone() };
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 16);
    }

    #[test]
    fn gamma_spec_forms() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"gamma_db": "0:4:2"}"#).unwrap();
        assert_eq!(c.gammas_db().unwrap(), vec![0.0, 2.0, 4.0]);
        let c: ExperimentConfig = serde_json::from_str(r#"{"gamma_db": [1, 5]}"#).unwrap();
        assert_eq!(c.gammas_db().unwrap(), vec![1.0, 5.0]);
        let c: ExperimentConfig = serde_json::from_str(r#"{"gamma_db": 8}"#).unwrap();
        assert_eq!(c.gammas_db().unwrap(), vec![8.0]);
    }
}
