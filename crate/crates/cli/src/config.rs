//! Scenario files and flag overrides.
//!
//! ```toml
//! models = ["push", "pull", "hybrid"]
//! push_lambda = 0.5
//!
//! [market]
//! d = 1.0
//! d_max = 15.0
//!
//! [ad]
//! a1 = 1.0            # or: pool = "pool.toml"
//!
//! [sweep]
//! var = "ba1"         # or "b"
//! start = 0.0
//! stop = 150.0
//! step = 1.0
//!
//! [output]
//! format = "csv"
//! path = "out.csv"
//! ```

use std::path::{Path, PathBuf};

use iot_pricing::model::CloudOverhead;
use iot_pricing::{AdvertiserPool, MarketParams, Model};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const CONFIG_DIR_ENV: &str = "IOT_PRICING_CONFIG_DIR";
/// Loaded from the config directory when no `--config` is given.
pub const DEFAULT_CONFIG_NAME: &str = "scenario.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub market: MarketSection,
    #[serde(default)]
    pub ad: AdSection,
    #[serde(default = "all_models")]
    pub models: Vec<Model>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default = "default_lambda")]
    pub push_lambda: f64,
    #[serde(default)]
    pub output: OutputSection,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            market: MarketSection::default(),
            ad: AdSection::default(),
            models: all_models(),
            sweep: None,
            push_lambda: default_lambda(),
            output: OutputSection::default(),
        }
    }
}

fn all_models() -> Vec<Model> {
    Model::ALL.to_vec()
}

fn default_lambda() -> f64 {
    iot_pricing::DEFAULT_PUSH_LAMBDA
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketSection {
    pub d: f64,
    pub d_max: f64,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
}

impl Default for MarketSection {
    fn default() -> Self {
        Self {
            d: 1.0,
            d_max: 15.0,
            alpha: 1.0,
            beta: 1.0,
            kappa: default_kappa(),
        }
    }
}

fn one() -> f64 {
    1.0
}

fn default_kappa() -> f64 {
    iot_pricing::model::DEFAULT_KAPPA
}

impl MarketSection {
    pub fn params(&self) -> Result<MarketParams, CliError> {
        MarketParams::new(self.d, self.d_max)
            .and_then(|m| m.with_intensities(self.alpha, self.beta))
            .and_then(|m| m.with_overhead(CloudOverhead::Affine { kappa: self.kappa }))
            .map_err(|e| CliError::config("market", e))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdSection {
    /// Ad volume per user when sweeping `ba1` directly; defaults to 1.
    pub a1: Option<f64>,
    /// Fixed ad price; with `a1` gives the single point `b * a1`.
    pub b: Option<f64>,
    /// Advertiser pool file, resolved relative to the scenario file.
    pub pool: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVar {
    Ba1,
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_var")]
    pub var: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

fn default_var() -> SweepVar {
    SweepVar::Ba1
}

impl SweepSpec {
    pub fn ba1(start: f64, stop: f64, step: f64) -> Self {
        Self {
            var: SweepVar::Ba1,
            start,
            stop,
            step,
        }
    }

    /// `VAR:START:STOP:STEP`, with `VAR` one of `ba1`, `b`.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = text.split(':').collect();
        let [var, start, stop, step] = parts.as_slice() else {
            return Err(CliError::Config(format!(
                "--sweep: expected VAR:START:STOP:STEP, got {text:?}"
            )));
        };
        let var = match *var {
            "ba1" => SweepVar::Ba1,
            "b" => SweepVar::B,
            other => {
                return Err(CliError::Config(format!(
                    "--sweep: unknown variable {other:?}"
                )))
            }
        };
        let num = |name: &str, s: &str| {
            s.parse::<f64>()
                .map_err(|_| CliError::Config(format!("--sweep: {name} {s:?} is not a number")))
        };
        Ok(Self {
            var,
            start: num("start", start)?,
            stop: num("stop", stop)?,
            step: num("step", step)?,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |why: String| Err(CliError::Config(format!("sweep: {why}")));
        if ![self.start, self.stop, self.step]
            .iter()
            .all(|x| x.is_finite())
        {
            return bad("start, stop and step must be finite".into());
        }
        if self.start < 0.0 {
            return bad(format!("start = {} is negative", self.start));
        }
        if self.start > self.stop {
            return bad(format!("start = {} > stop = {}", self.start, self.stop));
        }
        if self.step <= 0.0 {
            return bad(format!("step = {} must be positive", self.step));
        }
        Ok(())
    }

    /// `start, start + step, ...` up to `stop`, inclusive up to rounding.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start + self.step * i as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

/// Pool file: `valuations`, `a_max`, `b_max`, optional `volume_per_firm`
/// and optional `[g_model]` with `firms` for a linear participation curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolFile {
    #[serde(default)]
    pub valuations: Vec<f64>,
    pub a_max: f64,
    pub b_max: f64,
    pub volume_per_firm: Option<f64>,
    pub g_model: Option<LinearG>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearG {
    pub firms: f64,
}

impl PoolFile {
    pub fn load(path: &Path) -> Result<AdvertiserPool, CliError> {
        let text = read(path)?;
        let file: PoolFile = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        file.into_pool()
            .map_err(|e| CliError::config(&format!("{}", path.display()), e))
    }

    pub fn into_pool(self) -> iot_pricing::Result<AdvertiserPool> {
        let mut pool = match self.g_model {
            Some(g) => AdvertiserPool::linear(g.firms, self.a_max, self.b_max)?,
            None => AdvertiserPool::discrete(self.valuations, self.a_max, self.b_max)?,
        };
        if let Some(v) = self.volume_per_firm {
            pool.volume_per_firm = v;
            pool.validate()?;
        }
        Ok(pool)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// A scenario plus the directory its relative paths resolve against.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: ScenarioConfig,
    pub base_dir: PathBuf,
}

impl Loaded {
    pub fn pool(&self, override_path: Option<&Path>) -> Result<Option<AdvertiserPool>, CliError> {
        let path = match (override_path, &self.config.ad.pool) {
            (Some(p), _) => p.to_path_buf(),
            (None, Some(p)) => self.base_dir.join(p),
            (None, None) => return Ok(None),
        };
        PoolFile::load(&path).map(Some)
    }
}

/// `--config` if given (relative paths also tried under the config
/// directory), else `scenario.toml` in the config directory if present, else
/// built-in defaults.
pub fn load(explicit: Option<&Path>) -> Result<Loaded, CliError> {
    let dir = std::env::var_os(CONFIG_DIR_ENV).map(PathBuf::from);
    let path = match explicit {
        Some(p) if p.exists() || p.is_absolute() => Some(p.to_path_buf()),
        Some(p) => match &dir {
            Some(d) if d.join(p).exists() => Some(d.join(p)),
            _ => Some(p.to_path_buf()),
        },
        None => dir
            .map(|d| d.join(DEFAULT_CONFIG_NAME))
            .filter(|p| p.exists()),
    };
    let Some(path) = path else {
        return Ok(Loaded {
            config: ScenarioConfig::default(),
            base_dir: PathBuf::from("."),
        });
    };
    let text = read(&path)?;
    let config: ScenarioConfig =
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let base_dir = path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    Ok(Loaded { config, base_dir })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_points_include_stop() {
        let s = SweepSpec::ba1(0.0, 150.0, 1.0);
        assert_eq!(s.points().len(), 151);
        assert_eq!(*s.points().last().unwrap(), 150.0);
        let s = SweepSpec::ba1(0.0, 1.0, 0.1);
        assert_eq!(s.points().len(), 11);
        assert_eq!(SweepSpec::ba1(3.0, 3.0, 1.0).points(), vec![3.0]);
    }

    #[test]
    fn sweep_flag_parsing() {
        assert_eq!(
            SweepSpec::parse("ba1:0:10:0.5").unwrap(),
            SweepSpec::ba1(0.0, 10.0, 0.5)
        );
        assert_eq!(SweepSpec::parse("b:1:2:1").unwrap().var, SweepVar::B);
        assert!(SweepSpec::parse("ba1:0:10").is_err());
        assert!(SweepSpec::parse("x:0:10:1").is_err());
        assert!(SweepSpec::parse("ba1:0:ten:1").is_err());
    }

    #[test]
    fn sweep_validation() {
        assert!(SweepSpec::ba1(5.0, 1.0, 1.0).validate().is_err());
        assert!(SweepSpec::ba1(0.0, 1.0, 0.0).validate().is_err());
        assert!(SweepSpec::ba1(-1.0, 1.0, 1.0).validate().is_err());
        assert!(SweepSpec::ba1(0.0, 1.0, 1.0).validate().is_ok());
    }

    #[test]
    fn scenario_parses_with_defaults() {
        let cfg: ScenarioConfig = toml::from_str(
            r#"
            models = ["pull"]
            [market]
            d = 2.0
            d_max = 30.0
            [sweep]
            start = 0.0
            stop = 10.0
            step = 2.0
            "#,
        )
        .unwrap();
        assert_eq!(cfg.models, vec![Model::Pull]);
        assert_eq!(cfg.market.alpha, 1.0);
        assert_eq!(cfg.push_lambda, 0.5);
        assert_eq!(cfg.sweep.unwrap().var, SweepVar::Ba1);
        assert!(toml::from_str::<ScenarioConfig>("bogus = 1").is_err());
    }

    #[test]
    fn pool_file_variants() {
        let discrete: PoolFile =
            toml::from_str("valuations = [1, 2, 3]\na_max = 10\nb_max = 4").unwrap();
        assert!(discrete.into_pool().is_ok());
        let linear: PoolFile =
            toml::from_str("a_max = 5\nb_max = 4\n[g_model]\nfirms = 8").unwrap();
        assert!(linear.into_pool().is_ok());
        let bad: PoolFile = toml::from_str("valuations = [5]\na_max = 10\nb_max = 4").unwrap();
        assert!(bad.into_pool().is_err());
    }
}
