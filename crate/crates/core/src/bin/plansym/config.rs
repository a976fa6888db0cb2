use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use plansym::conflicts::AnalysisConfig;
use plansym::object_graph::Encoding;
use plansym::state_space::DEFAULT_STATE_CAP;
use plansym::wl::{Aggregation, Algorithm, DEFAULT_FWL2_MAX_VERTICES};

pub const DEFAULT_WITNESSES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingChoice {
    Plain,
    Goalmark,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggChoice {
    Multiset,
    Set,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgChoice {
    Wl1,
    Fwl2,
    Both,
}

/// Settings read from `--config`; every key optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub states_max: Option<usize>,
    pub fwl2_max_vertices: Option<usize>,
    pub encoding: Option<EncodingChoice>,
    pub agg: Option<AggChoice>,
    pub alg: Option<AlgChoice>,
    pub out: Option<PathBuf>,
    pub witnesses: Option<usize>,
    pub cache: Option<PathBuf>,
    pub fail_on_conflict: Option<bool>,
    pub jobs: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Same keys as [`FileConfig`], taken from the command line.
#[derive(Debug, Clone, Default)]
pub struct FlagConfig {
    pub states_max: Option<usize>,
    pub fwl2_max_vertices: Option<usize>,
    pub encoding: Option<EncodingChoice>,
    pub agg: Option<AggChoice>,
    pub alg: Option<AlgChoice>,
    pub out: Option<PathBuf>,
    pub witnesses: Option<usize>,
    pub cache: Option<PathBuf>,
    pub fail_on_conflict: bool,
    pub jobs: Option<usize>,
}

/// The effective configuration, echoed into every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub states_max: usize,
    pub fwl2_max_vertices: usize,
    pub encoding: EncodingChoice,
    pub agg: AggChoice,
    pub alg: AlgChoice,
    pub out: Option<PathBuf>,
    pub witnesses: usize,
    pub cache: Option<PathBuf>,
    pub fail_on_conflict: bool,
    pub jobs: Option<usize>,
}

impl RunConfig {
    /// Flags win over the file, the file over defaults.
    pub fn resolve(flags: FlagConfig, file: FileConfig) -> Result<Self, String> {
        let cfg = RunConfig {
            states_max: flags.states_max.or(file.states_max).unwrap_or(DEFAULT_STATE_CAP),
            fwl2_max_vertices: flags
                .fwl2_max_vertices
                .or(file.fwl2_max_vertices)
                .unwrap_or(DEFAULT_FWL2_MAX_VERTICES),
            encoding: flags.encoding.or(file.encoding).unwrap_or(EncodingChoice::Both),
            agg: flags.agg.or(file.agg).unwrap_or(AggChoice::Both),
            alg: flags.alg.or(file.alg).unwrap_or(AlgChoice::Both),
            out: flags.out.or(file.out),
            witnesses: flags.witnesses.or(file.witnesses).unwrap_or(DEFAULT_WITNESSES),
            cache: flags.cache.or(file.cache),
            fail_on_conflict: flags.fail_on_conflict || file.fail_on_conflict.unwrap_or(false),
            jobs: flags.jobs.or(file.jobs),
        };
        if cfg.states_max == 0 {
            return Err("--states-max must be positive".into());
        }
        if cfg.fwl2_max_vertices == 0 {
            return Err("--fwl2-max-vertices must be positive".into());
        }
        if cfg.jobs == Some(0) {
            return Err("--jobs must be positive".into());
        }
        Ok(cfg)
    }

    /// Selected configurations in table order.
    pub fn analysis_configs(&self) -> Vec<AnalysisConfig> {
        AnalysisConfig::all()
            .into_iter()
            .filter(|c| {
                matches!(
                    (self.alg, c.algorithm),
                    (AlgChoice::Both, _) | (AlgChoice::Wl1, Algorithm::Wl1) | (AlgChoice::Fwl2, Algorithm::Fwl2)
                )
            })
            .filter(|c| {
                matches!(
                    (self.agg, c.aggregation),
                    (AggChoice::Both, _) | (AggChoice::Multiset, Aggregation::Multiset) | (AggChoice::Set, Aggregation::Set)
                )
            })
            .filter(|c| {
                matches!(
                    (self.encoding, c.encoding),
                    (EncodingChoice::Both, _)
                        | (EncodingChoice::Plain, Encoding::Plain)
                        | (EncodingChoice::Goalmark, Encoding::GoalMarking)
                )
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let file: FileConfig = toml::from_str("states-max = 50\nwitnesses = 3\nalg = \"wl1\"").unwrap();
        let flags = FlagConfig {
            states_max: Some(7),
            ..FlagConfig::default()
        };
        let cfg = RunConfig::resolve(flags, file).unwrap();
        assert_eq!(cfg.states_max, 7);
        assert_eq!(cfg.witnesses, 3);
        assert_eq!(cfg.alg, AlgChoice::Wl1);
        assert_eq!(cfg.fwl2_max_vertices, DEFAULT_FWL2_MAX_VERTICES);
        assert_eq!(cfg.analysis_configs().len(), 4);
    }

    #[test]
    fn rejects_zero_caps_and_unknown_keys() {
        let flags = FlagConfig {
            states_max: Some(0),
            ..FlagConfig::default()
        };
        assert!(RunConfig::resolve(flags, FileConfig::default()).is_err());
        assert!(toml::from_str::<FileConfig>("bogus = 1").is_err());
    }
}
