use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::{BoundMode, ConstructionMethod, PairwiseConfig};
use crate::majorclaim::{MajorClaimMethod, ProbabilityDirection};
use crate::metrics::Weighting;
use crate::Language;

const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("config file must start with `version = {CONFIG_VERSION}`")]
    MissingVersion,
    #[error("unsupported config version {0}")]
    UnsupportedVersion(u32),
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("invalid value {value:?} for {key}: {reason}")]
    InvalidValue { key: String, value: String, reason: String },
    #[error("neutral_threshold {0} outside [0.5, 1.0]")]
    Threshold(f64),
    #[error("bound_factor {0} outside (0, 1]")]
    BoundFactor(f64),
    #[error("max_iterations must be at least 1")]
    MaxIterations,
    #[error("{key} file {path} does not exist")]
    MissingFile { key: &'static str, path: PathBuf },
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Whether units come from the text or from a benchmark graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    EndToEnd,
    PresetAdus,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::EndToEnd => "end-to-end",
            Mode::PresetAdus => "preset",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "end-to-end" | "e2e" => Ok(Mode::EndToEnd),
            "preset" | "preset-adus" => Ok(Mode::PresetAdus),
            other => Err(format!("unknown mode {other:?} (end-to-end, preset)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub language: Language,
    pub mc_method: MajorClaimMethod,
    pub constructor: ConstructionMethod,
    pub neutral_threshold: f64,
    pub pairwise: PairwiseConfig,
    pub probability_direction: ProbabilityDirection,
    pub mode: Mode,
    pub weighting: Weighting,
    /// Word vectors; the bundled sample vectors are used when unset.
    pub vectors: Option<PathBuf>,
    pub adu_model: Option<PathBuf>,
    pub claim_model: Option<PathBuf>,
    pub relation_model: Option<PathBuf>,
    /// Directory overriding the built-in lexicon files.
    pub lexicons: Option<PathBuf>,
    /// Worker threads for corpus evaluation; 0 lets the pool decide.
    pub workers: usize,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            language: Language::En,
            mc_method: MajorClaimMethod::Centroid,
            constructor: ConstructionMethod::Position,
            neutral_threshold: 0.6,
            pairwise: PairwiseConfig::default(),
            probability_direction: ProbabilityDirection::Incoming,
            mode: Mode::EndToEnd,
            weighting: Weighting::Length,
            vectors: None,
            adu_model: None,
            claim_model: None,
            relation_model: None,
            lexicons: None,
            workers: 0,
            seed: 0,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::InvalidValue {
        key: key.to_owned(),
        value: value.to_owned(),
        reason: e.to_string(),
    })
}

impl PipelineConfig {
    pub const KEYS: [&'static str; 17] = [
        "language",
        "mc_method",
        "constructor",
        "neutral_threshold",
        "bound_factor",
        "bound_mode",
        "max_iterations",
        "probability_direction",
        "mode",
        "weighting",
        "vectors",
        "adu_model",
        "claim_model",
        "relation_model",
        "lexicons",
        "workers",
        "seed",
    ];

    /// Sets one key. Relative paths are resolved against `base`.
    pub fn set(&mut self, key: &str, value: &str, base: Option<&Path>) -> Result<(), ConfigError> {
        let path = |v: &str| {
            let p = PathBuf::from(v);
            match base {
                Some(b) if p.is_relative() => b.join(p),
                _ => p,
            }
        };
        match key {
            "language" => self.language = parse_value(key, value)?,
            "mc_method" => self.mc_method = parse_value(key, value)?,
            "constructor" => self.constructor = parse_value(key, value)?,
            "neutral_threshold" => self.neutral_threshold = parse_value(key, value)?,
            "bound_factor" => self.pairwise.bound_factor = parse_value(key, value)?,
            "bound_mode" => self.pairwise.bound_mode = parse_value::<BoundMode>(key, value)?,
            "max_iterations" => self.pairwise.max_iterations = parse_value(key, value)?,
            "probability_direction" => {
                self.probability_direction = match value {
                    "incoming" => ProbabilityDirection::Incoming,
                    "both" => ProbabilityDirection::Both,
                    _ => {
                        return Err(ConfigError::InvalidValue {
                            key: key.to_owned(),
                            value: value.to_owned(),
                            reason: "expected incoming or both".into(),
                        })
                    }
                }
            }
            "mode" => self.mode = parse_value(key, value)?,
            "weighting" => self.weighting = parse_value(key, value)?,
            "vectors" => self.vectors = Some(path(value)),
            "adu_model" => self.adu_model = Some(path(value)),
            "claim_model" => self.claim_model = Some(path(value)),
            "relation_model" => self.relation_model = Some(path(value)),
            "lexicons" => self.lexicons = Some(path(value)),
            "workers" => self.workers = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            other => return Err(ConfigError::UnknownKey(other.to_owned())),
        }
        Ok(())
    }

    /// Parses a config file body: `key = value` lines, `#` comments, and a
    /// leading `version = 1`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self, ConfigError> {
        let mut config = PipelineConfig::default();
        let mut version = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                message: "expected `key = value`".into(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if version.is_none() {
                if key != "version" {
                    return Err(ConfigError::MissingVersion);
                }
                let v: u32 = parse_value(key, value)?;
                if v != CONFIG_VERSION {
                    return Err(ConfigError::UnsupportedVersion(v));
                }
                version = Some(v);
                continue;
            }
            config.set(key, value, base)?;
        }
        if version.is_none() {
            return Err(ConfigError::MissingVersion);
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text, path.parent())
    }

    /// Writes the config back in file form.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("version = {CONFIG_VERSION}\n");
        for (k, v) in self.entries() {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        let mut e = vec![
            ("language", self.language.to_string()),
            ("mc_method", self.mc_method.to_string()),
            ("constructor", self.constructor.to_string()),
            ("neutral_threshold", self.neutral_threshold.to_string()),
            ("bound_factor", self.pairwise.bound_factor.to_string()),
            (
                "bound_mode",
                match self.pairwise.bound_mode {
                    BoundMode::Relative => "relative",
                    BoundMode::Absolute => "absolute",
                }
                .to_string(),
            ),
            ("max_iterations", self.pairwise.max_iterations.to_string()),
            (
                "probability_direction",
                match self.probability_direction {
                    ProbabilityDirection::Incoming => "incoming",
                    ProbabilityDirection::Both => "both",
                }
                .to_string(),
            ),
            ("mode", self.mode.to_string()),
            (
                "weighting",
                match self.weighting {
                    Weighting::Length => "length",
                    Weighting::Uniform => "uniform",
                }
                .to_string(),
            ),
        ];
        let paths = [
            ("vectors", &self.vectors),
            ("adu_model", &self.adu_model),
            ("claim_model", &self.claim_model),
            ("relation_model", &self.relation_model),
            ("lexicons", &self.lexicons),
        ];
        for (k, p) in paths {
            if let Some(p) = p {
                e.push((k, p.display().to_string()));
            }
        }
        e.push(("seed", self.seed.to_string()));
        e
    }

    /// Canonical one-line description of everything that affects results.
    pub fn fingerprint(&self) -> String {
        self.entries()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Range checks plus existence of every referenced file.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.5..=1.0).contains(&self.neutral_threshold) {
            return Err(ConfigError::Threshold(self.neutral_threshold));
        }
        if !(self.pairwise.bound_factor > 0.0 && self.pairwise.bound_factor <= 1.0) {
            return Err(ConfigError::BoundFactor(self.pairwise.bound_factor));
        }
        if self.pairwise.max_iterations == 0 {
            return Err(ConfigError::MaxIterations);
        }
        let files: [(&'static str, &Option<PathBuf>); 4] = [
            ("vectors", &self.vectors),
            ("adu_model", &self.adu_model),
            ("claim_model", &self.claim_model),
            ("relation_model", &self.relation_model),
        ];
        for (key, p) in files {
            if let Some(p) = p {
                if !p.is_file() {
                    return Err(ConfigError::MissingFile { key, path: p.clone() });
                }
            }
        }
        if let Some(p) = &self.lexicons {
            if !p.is_dir() {
                return Err(ConfigError::MissingFile {
                    key: "lexicons",
                    path: p.clone(),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        PipelineConfig::default().validate().unwrap();
    }

    #[test]
    fn parse_and_round_trip() {
        let text = "# run settings\nversion = 1\nlanguage = de\nmc_method = pairwise  # trailing\nconstructor = flat\nneutral_threshold = 0.8\nbound_factor = 0.9\nmax_iterations = 4\nmode = preset\nseed = 7\n";
        let c = PipelineConfig::parse(text, None).unwrap();
        assert_eq!(c.language, Language::De);
        assert_eq!(c.mc_method, MajorClaimMethod::Pairwise);
        assert_eq!(c.constructor, ConstructionMethod::Flat);
        assert_eq!(c.neutral_threshold, 0.8);
        assert_eq!(c.pairwise.max_iterations, 4);
        assert_eq!(c.mode, Mode::PresetAdus);
        assert_eq!(c.seed, 7);
        let again = PipelineConfig::parse(&c.to_file_string(), None).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn relative_paths_follow_the_file() {
        let c = PipelineConfig::parse("version = 1\nvectors = vec.txt\n", Some(Path::new("/data/run"))).unwrap();
        assert_eq!(c.vectors, Some(PathBuf::from("/data/run/vec.txt")));
    }

    #[test]
    fn errors() {
        assert!(matches!(PipelineConfig::parse("language = en\n", None), Err(ConfigError::MissingVersion)));
        assert!(matches!(PipelineConfig::parse("", None), Err(ConfigError::MissingVersion)));
        assert!(matches!(
            PipelineConfig::parse("version = 2\n", None),
            Err(ConfigError::UnsupportedVersion(2))
        ));
        assert!(matches!(
            PipelineConfig::parse("version = 1\ncolour = red\n", None),
            Err(ConfigError::UnknownKey(_))
        ));
        assert!(matches!(
            PipelineConfig::parse("version = 1\nmc_method = loudest\n", None),
            Err(ConfigError::InvalidValue { .. })
        ));
        assert!(matches!(
            PipelineConfig::parse("version = 1\njust words\n", None),
            Err(ConfigError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn range_checks() {
        let c = PipelineConfig {
            neutral_threshold: 0.4,
            ..Default::default()
        };
        assert!(matches!(c.validate(), Err(ConfigError::Threshold(_))));
        let mut c = PipelineConfig::default();
        c.pairwise.bound_factor = 1.5;
        assert!(matches!(c.validate(), Err(ConfigError::BoundFactor(_))));
        let c = PipelineConfig {
            vectors: Some("/nonexistent/vectors.txt".into()),
            ..Default::default()
        };
        assert!(matches!(c.validate(), Err(ConfigError::MissingFile { key: "vectors", .. })));
    }

    #[test]
    fn fingerprint_changes_with_settings() {
        let a = PipelineConfig::default();
        let b = PipelineConfig {
            neutral_threshold: 0.7,
            ..Default::default()
        };
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert!(a.fingerprint().contains("constructor=position"));
    }
}
