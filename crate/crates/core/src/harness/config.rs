//! Flat `key = value` experiment configuration.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use crate::arith::count::geometric_grid;
use crate::arith::{nmax_for_diameter, IntPolar};

use super::HarnessError;

/// Parameters of one experiment run.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// Root of the orbit search.
    pub seed_chain: SeedChain,
    /// Maximal number of `σT` syllables.
    pub depth: u32,
    pub eps_max: f64,
    pub eps_min: f64,
    pub eps_ratio: f64,
    pub bins: usize,
    /// Sample count for the Monte Carlo checks of `verify`.
    pub samples: usize,
    pub out: PathBuf,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    pub seed: u64,
    /// Class budget of the orbit search.
    pub max_classes: usize,
}

/// The chain whose orbit is enumerated.
#[derive(Clone, Debug, PartialEq)]
pub enum SeedChain {
    StandardVertical,
    /// Doubled numerators of a `q = 1` polar point.
    Polar([i64; 12]),
}

impl SeedChain {
    pub fn polar(&self) -> IntPolar {
        match self {
            SeedChain::StandardVertical => IntPolar::seed(),
            SeedChain::Polar(n) => IntPolar::from_doubled(n).expect("validated on parse"),
        }
    }
}

impl fmt::Display for SeedChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedChain::StandardVertical => write!(f, "standard_vertical"),
            SeedChain::Polar(n) => {
                let parts: Vec<String> = n.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
        }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed_chain: SeedChain::StandardVertical,
            depth: 12,
            eps_max: 0.8,
            eps_min: 0.3,
            eps_ratio: 0.9,
            bins: 3,
            samples: 20_000,
            out: PathBuf::from("out"),
            workers: 0,
            seed: 1,
            max_classes: 5_000_000,
        }
    }
}

const KEYS: [&str; 11] =
    ["seed_chain", "depth", "eps_max", "eps_min", "eps_ratio", "bins", "samples", "out", "workers", "seed", "max_classes"];

fn bad(line: usize, msg: impl fmt::Display) -> HarnessError {
    HarnessError::Config(if line == 0 { msg.to_string() } else { format!("line {line}: {msg}") })
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T, HarnessError> {
    value.parse().map_err(|_| bad(line, format!("`{key}` expects a number, got `{value}`")))
}

fn parse_seed_chain(value: &str, line: usize) -> Result<SeedChain, HarnessError> {
    if value == "standard_vertical" {
        return Ok(SeedChain::StandardVertical);
    }
    let nums: Vec<i64> = value
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| bad(line, "`seed_chain` is `standard_vertical` or 12 comma-separated integers"))?;
    let arr: [i64; 12] = nums.try_into().map_err(|_| bad(line, "`seed_chain` needs exactly 12 integers"))?;
    let p = IntPolar::from_doubled(&arr).map_err(|e| bad(line, format!("`seed_chain`: {e}")))?;
    if p.q() != 1 {
        return Err(bad(line, "`seed_chain` polar must satisfy q = 1"));
    }
    Ok(SeedChain::Polar(arr))
}

impl ExperimentConfig {
    /// Parses `key = value` lines; `#` starts a comment. Unknown and
    /// repeated keys are errors; missing keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| bad(line, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(bad(line, format!("unknown key `{key}`")));
            }
            if !seen.insert(key.to_string()) {
                return Err(bad(line, format!("duplicate key `{key}`")));
            }
            cfg.set(key, value, line)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Sets one key from its textual value; `line` 0 marks a command-line
    /// or environment override.
    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), HarnessError> {
        match key {
            "seed_chain" => self.seed_chain = parse_seed_chain(value, line)?,
            "depth" => self.depth = parse_num(key, value, line)?,
            "eps_max" => self.eps_max = parse_num(key, value, line)?,
            "eps_min" => self.eps_min = parse_num(key, value, line)?,
            "eps_ratio" => self.eps_ratio = parse_num(key, value, line)?,
            "bins" => self.bins = parse_num(key, value, line)?,
            "samples" => self.samples = parse_num(key, value, line)?,
            "out" => self.out = PathBuf::from(value),
            "workers" => self.workers = parse_num(key, value, line)?,
            "seed" => self.seed = parse_num(key, value, line)?,
            "max_classes" => self.max_classes = parse_num(key, value, line)?,
            _ => return Err(bad(line, format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.depth < 1 {
            return Err(bad(0, "`depth` must be at least 1"));
        }
        if !(self.eps_min.is_finite() && self.eps_min > 0.0) {
            return Err(bad(0, "`eps_min` must be positive"));
        }
        if !(self.eps_max.is_finite() && self.eps_max >= self.eps_min) {
            return Err(bad(0, "`eps_max` must be at least `eps_min`"));
        }
        if !(self.eps_ratio > 0.0 && self.eps_ratio < 1.0) {
            return Err(bad(0, "`eps_ratio` must lie in (0, 1)"));
        }
        if !(2..=6).contains(&self.bins) {
            return Err(bad(0, "`bins` must lie in 2..=6"));
        }
        if self.samples < 1000 {
            return Err(bad(0, "`samples` must be at least 1000"));
        }
        if self.max_classes < 1 {
            return Err(bad(0, "`max_classes` must be positive"));
        }
        if self.grid()?.len() < 3 {
            return Err(bad(0, "the epsilon grid needs at least 3 points"));
        }
        Ok(())
    }

    /// The strictly decreasing geometric ε grid.
    pub fn grid(&self) -> Result<Vec<f64>, HarnessError> {
        geometric_grid(self.eps_max, self.eps_min, self.eps_ratio).map_err(|e| bad(0, e))
    }

    /// Smallest diameter the orbit search must keep.
    pub fn diam_min(&self) -> Result<f64, HarnessError> {
        Ok(*self.grid()?.last().expect("validated non-empty"))
    }

    pub fn nmax(&self) -> Result<i64, HarnessError> {
        nmax_for_diameter(self.diam_min()?).map_err(|e| bad(0, e))
    }

    pub fn worker_count(&self) -> Option<usize> {
        (self.workers > 0).then_some(self.workers)
    }

    /// The configuration as parseable text.
    pub fn to_text(&self) -> String {
        format!(
            "seed_chain = {}\ndepth = {}\neps_max = {}\neps_min = {}\neps_ratio = {}\nbins = {}\nsamples = {}\nout = {}\nworkers = {}\nseed = {}\nmax_classes = {}\n",
            self.seed_chain,
            self.depth,
            self.eps_max,
            self.eps_min,
            self.eps_ratio,
            self.bins,
            self.samples,
            self.out.display(),
            self.workers,
            self.seed,
            self.max_classes
        )
    }
}
