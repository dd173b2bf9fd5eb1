//! Flat `key = value` experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::game::PayoffMatrix;
use crate::learners::Dynamics;
use crate::rates::Preset;

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Adversarial { delta: f64 },
    MatchingPennies,
    File(PathBuf),
}

impl Instance {
    /// Build the payoff matrix; `m` and `n` are ignored for fixed-size games.
    pub fn matrix(&self, m: usize, n: usize) -> Result<PayoffMatrix> {
        match self {
            Instance::Adversarial { delta } => PayoffMatrix::adversarial(m, n, *delta),
            Instance::MatchingPennies => Ok(PayoffMatrix::matching_pennies()),
            Instance::File(path) => PayoffMatrix::load(path),
        }
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instance::Adversarial { delta } => write!(f, "adversarial(delta={delta})"),
            Instance::MatchingPennies => f.write_str("matching_pennies"),
            Instance::File(path) => write!(f, "file:{}", path.display()),
        }
    }
}

pub const DEFAULT_GAMMA_GRID: [f64; 19] = [
    0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80,
    0.85, 0.90, 0.95,
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub m: usize,
    pub n: usize,
    pub horizon: usize,
    pub instance: Instance,
    pub presets: Vec<Preset>,
    pub dynamics: Dynamics,
    pub out: PathBuf,
    /// Emit every `cadence`-th round (the final round is always emitted).
    pub cadence: usize,
    pub gamma_grid: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            m: 2,
            n: 10_000,
            horizon: 2000,
            instance: Instance::Adversarial { delta: 1.0 },
            presets: Preset::ALL.to_vec(),
            dynamics: Dynamics::Hedge,
            out: PathBuf::from("results"),
            cadence: 1,
            gamma_grid: DEFAULT_GAMMA_GRID.to_vec(),
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse '{value}'")))
}

fn parse_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl ExperimentConfig {
    /// Defaults overridden by the `key = value` lines of `text`. Blank lines
    /// and lines starting with `#` are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(
                    format!("line {}", lno + 1),
                    format!("expected key = value, found '{line}'"),
                )
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    /// Set one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "m" => self.m = parse_num(key, value)?,
            "n" => self.n = parse_num(key, value)?,
            "T" | "horizon" => self.horizon = parse_num(key, value)?,
            "delta" => {
                let delta = parse_num(key, value)?;
                match &mut self.instance {
                    Instance::Adversarial { delta: d } => *d = delta,
                    _ => self.instance = Instance::Adversarial { delta },
                }
            }
            "instance" => {
                self.instance = match value {
                    "adversarial" => Instance::Adversarial {
                        delta: match self.instance {
                            Instance::Adversarial { delta } => delta,
                            _ => 1.0,
                        },
                    },
                    "matching_pennies" => Instance::MatchingPennies,
                    other => match other.strip_prefix("file:") {
                        Some(path) if !path.is_empty() => Instance::File(PathBuf::from(path)),
                        _ => {
                            return Err(Error::config(
                                key,
                                format!("expected adversarial, matching_pennies or file:<path>, found '{value}'"),
                            ))
                        }
                    },
                }
            }
            "presets" | "preset" => {
                self.presets = if value.eq_ignore_ascii_case("all") {
                    Preset::ALL.to_vec()
                } else {
                    parse_list(value)
                        .map(|p| p.parse().map_err(|e: Error| Error::config(key, e.to_string())))
                        .collect::<Result<_>>()?
                }
            }
            "algo" | "algorithm" => {
                self.dynamics = value.parse().map_err(|e: Error| Error::config(key, e.to_string()))?
            }
            "out" => self.out = PathBuf::from(value),
            "cadence" => self.cadence = parse_num(key, value)?,
            "gamma_grid" => {
                self.gamma_grid = if value == "default" {
                    DEFAULT_GAMMA_GRID.to_vec()
                } else {
                    parse_list(value).map(|g| parse_num(key, g)).collect::<Result<_>>()?
                }
            }
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    /// Check the invariants and, for file instances, adopt the file's size.
    pub fn validate(&mut self) -> Result<()> {
        if let Instance::File(_) = self.instance {
            let a = self.instance.matrix(0, 0)?;
            self.m = a.rows();
            self.n = a.cols();
        } else if self.instance == Instance::MatchingPennies {
            self.m = 2;
            self.n = 2;
        }
        if self.m == 0 {
            return Err(Error::config("m", "must be >= 1"));
        }
        if self.n == 0 {
            return Err(Error::config("n", "must be >= 1"));
        }
        if self.horizon == 0 {
            return Err(Error::config("T", "must be >= 1"));
        }
        if let Instance::Adversarial { delta } = self.instance {
            if !(delta > 0.0 && delta <= 1.0) {
                return Err(Error::config("delta", format!("{delta} outside (0, 1]")));
            }
            if self.m < 2 || self.n < 2 {
                return Err(Error::config(
                    "m",
                    "the adversarial instance needs m, n >= 2",
                ));
            }
        }
        if self.presets.is_empty() {
            return Err(Error::config("presets", "at least one preset is required"));
        }
        if self.cadence == 0 {
            return Err(Error::config("cadence", "must be >= 1"));
        }
        Ok(())
    }

    pub fn emits(&self, t: usize) -> bool {
        t.is_multiple_of(self.cadence) || t == self.horizon
    }
}
