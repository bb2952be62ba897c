//! Flat `key = value` experiment configs.
//!
//! ```text
//! # comment
//! kind = classical-trajectory
//! output_dir = out/fig3
//! seed = 0
//! omega_a = 1
//! phi_b = pi/2
//! ```
//!
//! `kind`, `output_dir` and `seed` are reserved; every other key is a
//! parameter of the kind. Numbers may be written as `pi`, `2*pi`, `pi/2`
//! or `3*pi/4`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    ClassicalTrajectory,
    WignerStudy,
    InvariantSuite,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::ClassicalTrajectory => "classical-trajectory",
            Kind::WignerStudy => "wigner-study",
            Kind::InvariantSuite => "invariant-suite",
        }
    }

    /// Accepted parameter keys and whether each is required.
    pub fn keys(self) -> &'static [(&'static str, bool)] {
        match self {
            Kind::ClassicalTrajectory => &[
                ("omega_a", true),
                ("omega_b", true),
                ("a0", true),
                ("b0", true),
                ("phi_a", true),
                ("phi_b", true),
                ("t_end", false),
                ("dt", false),
                ("integrator", false),
                ("sample_every", false),
                ("tolerance", false),
            ],
            Kind::WignerStudy => &[
                ("mode", true),
                ("alpha", false),
                ("alpha_a", false),
                ("alpha_b", false),
                ("level_a", false),
                ("level_b", false),
                ("n", false),
                ("length", false),
            ],
            Kind::InvariantSuite => &[("states", false), ("n", false), ("length", false)],
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical-trajectory" => Ok(Kind::ClassicalTrajectory),
            "wigner-study" => Ok(Kind::WignerStudy),
            "invariant-suite" => Ok(Kind::InvariantSuite),
            _ => Err(CliError::Config(format!("unknown kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub parameters: BTreeMap<String, String>,
}

/// Parses `2.5`, `pi`, `-pi/2`, `3*pi/4` and the like.
pub fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, s),
    };
    let (num, den) = match body.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim().parse::<f64>().ok()?),
        None => (body, 1.0),
    };
    let factor = match num.split_once('*') {
        Some((c, p)) if p.trim() == "pi" => c.trim().parse::<f64>().ok()?,
        None if num == "pi" => 1.0,
        _ => return None,
    };
    let v = sign * factor * PI / den;
    v.is_finite().then_some(v)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut kind = None;
        let mut output_dir = None;
        let mut seed = 0;
        let mut parameters = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(CliError::Config(format!(
                    "line {}: empty key or value",
                    lineno + 1
                )));
            }
            match key {
                "kind" => kind = Some(value.parse::<Kind>()?),
                "output_dir" => output_dir = Some(PathBuf::from(value)),
                "seed" => {
                    seed = value.parse().map_err(|_| {
                        CliError::Config(format!(
                            "seed must be a non-negative integer, got {value:?}"
                        ))
                    })?
                }
                _ => {
                    if parameters
                        .insert(key.to_string(), value.to_string())
                        .is_some()
                    {
                        return Err(CliError::Config(format!("duplicate key {key:?}")));
                    }
                }
            }
        }
        let kind = kind.ok_or_else(|| CliError::Config("missing kind".into()))?;
        let config = Self {
            kind,
            output_dir: output_dir.unwrap_or_else(|| PathBuf::from("out")),
            seed,
            parameters,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let keys = self.kind.keys();
        for key in self.parameters.keys() {
            if !keys.iter().any(|(k, _)| k == key) {
                return Err(CliError::Config(format!(
                    "{} does not take {key:?}",
                    self.kind
                )));
            }
        }
        for (key, required) in keys {
            if *required && !self.parameters.contains_key(*key) {
                return Err(CliError::Config(format!("{} requires {key:?}", self.kind)));
            }
        }
        Ok(())
    }

    pub fn with_output_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.output_dir = dir.into();
        self
    }

    pub fn number(&self, key: &str) -> Result<Option<f64>> {
        self.parameters
            .get(key)
            .map(|v| {
                parse_number(v)
                    .ok_or_else(|| CliError::Config(format!("{key} = {v:?} is not a number")))
            })
            .transpose()
    }

    pub fn number_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.number(key)?.unwrap_or(default))
    }

    pub fn positive_or(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.number_or(key, default)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(CliError::Config(format!("{key} must be positive, got {v}")))
        }
    }

    pub fn required(&self, key: &str) -> Result<f64> {
        self.number(key)?
            .ok_or_else(|| CliError::Config(format!("missing {key:?}")))
    }

    pub fn integer_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.parameters.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| {
                CliError::Config(format!("{key} must be a non-negative integer, got {v:?}"))
            }),
        }
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        self.parameters.get(key).map(String::as_str)
    }

    /// The config written back in its own format, keys sorted.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "kind = {}\noutput_dir = {}\nseed = {}\n",
            self.kind,
            self.output_dir.display(),
            self.seed
        );
        for (k, v) in &self.parameters {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }
}
