//! INI-style experiment configuration.
//!
//! Three sections: `[process]` describes the data-generating process,
//! `[grid]` the sample sizes, replication counts and toggles, `[output]` the
//! target directory. Keys not present fall back to desk-scale defaults.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct Ini {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl Ini {
    pub fn parse(text: &str) -> Result<Ini> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Parse(format!("line {}: unterminated section", lineno + 1)))?;
                current = name.trim().to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected key = value", lineno + 1))
            })?;
            if current.is_empty() {
                return Err(Error::Parse(format!(
                    "line {}: key outside of any section",
                    lineno + 1
                )));
            }
            sections
                .get_mut(&current)
                .unwrap()
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Ini { sections })
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(|s| s.as_str())
    }
}

/// The data-generating process of an experiment.
#[derive(Debug, Clone)]
pub enum ProcessSpec {
    MemoryChain { rho: f64, lags: Vec<usize> },
    Seasonal { rho: f64, theta: f64, tau: usize },
    Markov {
        states: Vec<f64>,
        transition: Vec<Vec<f64>>,
        initial: Vec<f64>,
    },
}

/// Declarative description of an experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub process: ProcessSpec,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    pub concentration_n: usize,
    pub concentration_replications: usize,
    pub bdd_n: usize,
    pub bdd_replications: usize,
    pub noise_per_atom: usize,
    pub seed: u64,
    pub calibrate_bounds: bool,
    pub run_rate: bool,
    pub run_concentration: bool,
    pub run_bdd: bool,
    pub run_consistency: bool,
    pub out_dir: Option<PathBuf>,
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|item| {
            item.trim()
                .parse::<T>()
                .map_err(|_| Error::Parse(format!("bad {what} entry '{item}'")))
        })
        .collect()
}

fn parse_scalar<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse::<T>()
        .map_err(|_| Error::Parse(format!("bad {what} '{s}'")))
}

fn parse_bool(s: &str, what: &str) -> Result<bool> {
    match s.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(Error::Parse(format!("bad {what} '{other}'"))),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let ini = Ini::parse(text)?;

        let kind = ini.get("process", "kind").unwrap_or("memory_chain");
        let process = match kind {
            "memory_chain" => {
                let rho = parse_scalar(ini.get("process", "rho").unwrap_or("0.99"), "rho")?;
                let lags = parse_list(ini.get("process", "lags").unwrap_or("2,5,10"), "lags")?;
                if lags.is_empty() {
                    return Err(Error::Parse("need at least one lag".into()));
                }
                ProcessSpec::MemoryChain { rho, lags }
            }
            "seasonal" => ProcessSpec::Seasonal {
                rho: parse_scalar(ini.get("process", "rho").unwrap_or("0.3"), "rho")?,
                theta: parse_scalar(ini.get("process", "theta").unwrap_or("0.2"), "theta")?,
                tau: parse_scalar(ini.get("process", "tau").unwrap_or("4"), "tau")?,
            },
            "markov" => {
                let states: Vec<f64> = parse_list(
                    ini.get("process", "states")
                        .ok_or_else(|| Error::Parse("markov process needs states".into()))?,
                    "states",
                )?;
                let rows = ini
                    .get("process", "transition")
                    .ok_or_else(|| Error::Parse("markov process needs transition".into()))?;
                let transition: Vec<Vec<f64>> = rows
                    .split(';')
                    .map(|row| parse_list(row, "transition row"))
                    .collect::<Result<_>>()?;
                let initial = match ini.get("process", "initial") {
                    Some(s) => parse_list(s, "initial")?,
                    None => vec![1.0 / states.len() as f64; states.len()],
                };
                ProcessSpec::Markov {
                    states,
                    transition,
                    initial,
                }
            }
            other => {
                return Err(Error::Parse(format!("unknown process kind '{other}'")));
            }
        };

        let grid = |key: &str| ini.get("grid", key);
        let n_grid: Vec<usize> =
            parse_list(grid("n_list").unwrap_or("250,500,1000,2000"), "n_list")?;
        if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse(
                "n_list must be non-empty and strictly increasing".into(),
            ));
        }
        let replications = parse_scalar(grid("replications").unwrap_or("200"), "replications")?;
        if replications < 1 {
            return Err(Error::Parse("replications must be at least 1".into()));
        }
        let config = ExperimentConfig {
            process,
            n_grid,
            replications,
            concentration_n: parse_scalar(
                grid("concentration_n").unwrap_or("1000"),
                "concentration_n",
            )?,
            concentration_replications: parse_scalar(
                grid("concentration_replications").unwrap_or("500"),
                "concentration_replications",
            )?,
            bdd_n: parse_scalar(grid("bdd_n").unwrap_or("100"), "bdd_n")?,
            bdd_replications: parse_scalar(
                grid("bdd_replications").unwrap_or("400"),
                "bdd_replications",
            )?,
            noise_per_atom: parse_scalar(grid("noise_per_atom").unwrap_or("4"), "noise_per_atom")?,
            seed: parse_scalar(grid("seed").unwrap_or("0"), "seed")?,
            calibrate_bounds: parse_bool(
                grid("calibrate_bounds").unwrap_or("true"),
                "calibrate_bounds",
            )?,
            run_rate: parse_bool(grid("run_rate").unwrap_or("true"), "run_rate")?,
            run_concentration: parse_bool(
                grid("run_concentration").unwrap_or("true"),
                "run_concentration",
            )?,
            run_bdd: parse_bool(grid("run_bdd").unwrap_or("false"), "run_bdd")?,
            run_consistency: parse_bool(
                grid("run_consistency").unwrap_or("false"),
                "run_consistency",
            )?,
            out_dir: ini.get("output", "dir").map(PathBuf::from),
        };
        Ok(config)
    }
}
