//! Simulation scenario files (TOML).
//!
//! ```toml
//! N = 20
//! m = 9
//! S = 3
//! trials = 50
//! seed = 1
//! schemes = ["BRI", "BACC", "LCC", "MatDot", "EP"]
//! k_policy = "first_k"        # first_k | first_k(17) | deadline(0.05) | all_nonstragglers
//!
//! [thresholds]
//! EP = 20
//!
//! [delay]
//! extra_dist = "uniform"      # fixed | uniform | exponential | never
//! extra_params = [0.005, 0.015]
//! ```
//!
//! Unknown keys are rejected. Every error names the offending key.

use std::collections::BTreeMap;
use std::path::Path;

use bri_core::codec::{NodeScheme, Scheme};
use bri_core::sim::{DelayModel, ExtraDelay, KPolicy, SchemeModel, SimScenario};
use bri_core::tasks::TaskSpec;
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    /// Dotted key path, or the file path for whole-file problems.
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(rename = "N")]
    pub workers: usize,
    pub m: usize,
    #[serde(rename = "S")]
    pub stragglers: usize,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    pub schemes: Vec<String>,
    /// Recovery-threshold overrides keyed by scheme name.
    #[serde(default)]
    pub thresholds: BTreeMap<String, usize>,
    #[serde(default)]
    pub k_policy: Option<String>,
    /// Blending degree of the rational code.
    #[serde(default = "default_d")]
    pub d: usize,
    #[serde(default)]
    pub node_scheme: Option<String>,
    /// Rows and columns of each source block.
    #[serde(default = "default_block")]
    pub block: [usize; 2],
    #[serde(default)]
    pub delay: DelayFile,
}

fn default_d() -> usize {
    2
}

fn default_block() -> [usize; 2] {
    [100, 100]
}

/// Delay keys in seconds. Missing values fall back to the flop-proportional
/// model for the configured block shape.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelayFile {
    pub base: Option<f64>,
    pub jitter: Option<f64>,
    pub latency: Option<f64>,
    pub extra_dist: Option<String>,
    pub extra_params: Option<Vec<f64>>,
}

pub fn parse_scenario(text: &str) -> Result<ScenarioFile, ConfigError> {
    let de = toml::Deserializer::parse(text).map_err(|e| ConfigError::at("<file>", e.to_string().trim_end()))?;
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::at(
            if path == "." { "<root>".into() } else { path },
            e.into_inner().message().to_string(),
        )
    })
}

pub fn load_scenario(path: &Path) -> Result<SimScenario, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::at(path.display().to_string(), e.to_string()))?;
    parse_scenario(&text)?.into_scenario()
}

/// `first_k`, `first_k(K)`, `deadline(T)` or `all_nonstragglers`.
pub fn parse_k_policy(text: &str, default_k: usize) -> Result<KPolicy, String> {
    let t = text.trim();
    if t == "first_k" {
        return Ok(KPolicy::FirstK(default_k));
    }
    if t == "all_nonstragglers" {
        return Ok(KPolicy::AllNonStragglers);
    }
    let arg = |prefix: &str| {
        t.strip_prefix(prefix)
            .and_then(|r| r.strip_prefix('('))
            .and_then(|r| r.strip_suffix(')'))
    };
    if let Some(k) = arg("first_k") {
        let k: usize = k.trim().parse().map_err(|_| format!("bad k in '{t}'"))?;
        if k == 0 {
            return Err("first_k needs k ≥ 1".into());
        }
        return Ok(KPolicy::FirstK(k));
    }
    if let Some(v) = arg("deadline") {
        let v: f64 = v.trim().parse().map_err(|_| format!("bad deadline in '{t}'"))?;
        if !(v.is_finite() && v >= 0.0) {
            return Err("deadline must be finite and non-negative".into());
        }
        return Ok(KPolicy::Deadline(v));
    }
    Err(format!("unknown policy '{t}'"))
}

pub fn parse_extra(dist: &str, params: &[f64]) -> Result<ExtraDelay, String> {
    let want = |n: usize| {
        if params.len() == n {
            Ok(())
        } else {
            Err(format!("'{dist}' takes {n} parameter(s), got {}", params.len()))
        }
    };
    let extra = match dist {
        "fixed" => {
            want(1)?;
            ExtraDelay::Fixed(params[0])
        }
        "uniform" => {
            want(2)?;
            ExtraDelay::Uniform {
                lo: params[0],
                hi: params[1],
            }
        }
        "exponential" => {
            want(1)?;
            ExtraDelay::Exponential { rate: params[0] }
        }
        "never" => {
            want(0)?;
            ExtraDelay::Never
        }
        other => return Err(format!("unknown distribution '{other}'")),
    };
    extra.validate().map_err(|e| e.to_string())?;
    Ok(extra)
}

impl ScenarioFile {
    pub fn into_scenario(self) -> Result<SimScenario, ConfigError> {
        if self.workers == 0 {
            return Err(ConfigError::at("N", "must be at least 1"));
        }
        if self.stragglers > self.workers {
            return Err(ConfigError::at("S", "must not exceed N"));
        }
        if self.trials == 0 {
            return Err(ConfigError::at("trials", "must be at least 1"));
        }
        if self.d > self.m {
            return Err(ConfigError::at("d", format!("must not exceed m = {}", self.m)));
        }
        if self.schemes.is_empty() {
            return Err(ConfigError::at("schemes", "list at least one scheme"));
        }
        let mut schemes = Vec::new();
        for (i, name) in self.schemes.iter().enumerate() {
            let scheme: Scheme = name
                .parse()
                .map_err(|_| ConfigError::at(format!("schemes[{i}]"), format!("unknown scheme '{name}'")))?;
            schemes.push(SchemeModel::new(scheme));
        }
        for (name, &k) in &self.thresholds {
            let key = format!("thresholds.{name}");
            let scheme: Scheme = name.parse().map_err(|_| ConfigError::at(&key, "unknown scheme"))?;
            if matches!(scheme, Scheme::Bri | Scheme::Bacc) {
                return Err(ConfigError::at(&key, "flexible schemes have no threshold"));
            }
            if k == 0 {
                return Err(ConfigError::at(&key, "threshold must be at least 1"));
            }
            let model = schemes
                .iter_mut()
                .find(|s| s.scheme == scheme)
                .ok_or_else(|| ConfigError::at(&key, "scheme is not listed in schemes"))?;
            model.threshold = Some(k);
        }
        let default_k = (self.workers - self.stragglers).max(1);
        let k_policy = match &self.k_policy {
            None => KPolicy::FirstK(default_k),
            Some(p) => parse_k_policy(p, default_k).map_err(|e| ConfigError::at("k_policy", e))?,
        };
        let node_scheme = match &self.node_scheme {
            None => NodeScheme::Chebyshev2,
            Some(s) => match s.parse() {
                Ok(NodeScheme::Custom) | Err(_) => {
                    return Err(ConfigError::at("node_scheme", "expected chebyshev2 or equispaced"))
                }
                Ok(v) => v,
            },
        };
        let [rows, cols] = self.block;
        if rows == 0 || cols == 0 {
            return Err(ConfigError::at("block", "dimensions must be positive"));
        }
        let mut delay = DelayModel::flop_proportional(rows, cols);
        let df = &self.delay;
        for (key, value, slot) in [
            ("delay.base", df.base, &mut delay.base_compute),
            ("delay.jitter", df.jitter, &mut delay.jitter),
            ("delay.latency", df.latency, &mut delay.latency),
        ] {
            if let Some(v) = value {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(ConfigError::at(key, "must be finite and non-negative"));
                }
                *slot = v;
            }
        }
        match (&df.extra_dist, &df.extra_params) {
            (Some(dist), params) => {
                delay.straggler_extra = parse_extra(dist, params.as_deref().unwrap_or(&[]))
                    .map_err(|e| ConfigError::at("delay.extra_params", e))?;
            }
            (None, Some(_)) => return Err(ConfigError::at("delay.extra_params", "requires delay.extra_dist")),
            (None, None) => {}
        }
        Ok(SimScenario {
            workers: self.workers,
            m: self.m,
            stragglers: self.stragglers,
            schemes,
            trials: self.trials,
            seed: self.seed,
            k_policy,
            delay,
            d: self.d,
            node_scheme,
            task: TaskSpec::gram(),
            block_rows: rows,
            block_cols: cols,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "N = 20\nm = 9\nS = 3\ntrials = 5\nschemes = [\"BRI\", \"EP\"]\n";

    #[test]
    fn minimal_file_gets_defaults() {
        let sc = parse_scenario(BASE).unwrap().into_scenario().unwrap();
        assert_eq!(sc.k_policy, KPolicy::FirstK(17));
        assert_eq!(sc.delay, DelayModel::flop_proportional(100, 100));
        assert_eq!(sc.schemes[1].threshold, None);
    }

    #[test]
    fn unknown_keys_are_reported_with_path() {
        let err = parse_scenario(&format!("{BASE}bogus = 1\n")).unwrap_err();
        assert!(err.message.contains("bogus"), "{err}");
        let err = parse_scenario(&format!("{BASE}[delay]\nbse = 1.0\n")).unwrap_err();
        assert!(err.path.starts_with("delay"), "{err}");
    }

    #[test]
    fn wrong_types_name_the_key() {
        let err = parse_scenario("N = \"twenty\"\nm = 9\nS = 3\ntrials = 5\nschemes = []\n").unwrap_err();
        assert_eq!(err.path, "N", "{err}");
    }

    #[test]
    fn semantic_errors_name_the_key() {
        let bad = |extra: &str| {
            parse_scenario(&format!("{BASE}{extra}"))
                .unwrap()
                .into_scenario()
                .unwrap_err()
                .path
        };
        assert_eq!(bad("[thresholds]\nLCC = 19\n"), "thresholds.LCC");
        assert_eq!(bad("k_policy = \"sometimes\"\n"), "k_policy");
        assert_eq!(
            bad("[delay]\nextra_dist = \"uniform\"\nextra_params = [1.0]\n"),
            "delay.extra_params"
        );
        assert_eq!(bad("d = 10\n"), "d");
    }

    #[test]
    fn policies_parse() {
        assert_eq!(parse_k_policy("first_k(11)", 3), Ok(KPolicy::FirstK(11)));
        assert_eq!(parse_k_policy("deadline(0.5)", 3), Ok(KPolicy::Deadline(0.5)));
        assert_eq!(parse_k_policy("all_nonstragglers", 3), Ok(KPolicy::AllNonStragglers));
        assert!(parse_k_policy("first_k(0)", 3).is_err());
    }
}
