//! Flat key=value configuration. Keys are the long flag names; `_` and `-` are
//! interchangeable in a config file. Command-line flags win over the file.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::path::Path;

use clap::Args;

use crate::CliError;

/// Every recognised key, in flag spelling.
pub const KEYS: &[&str] = &[
    "alpha", "trunc-n", "dt", "tfinal", "seed", "ensemble", "out", "steps", "coeffs", "kind", "s", "chain-len",
    "burn-in", "thinning", "pcn-beta", "samples", "knots", "iterations", "paths", "coupling", "eps", "kappa",
    "dt-factor", "scales", "lemma", "zeta-step", "measure", "control", "constant", "checkpoint", "resume",
];

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Cutoff N, or a comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    pub trunc_n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub dt: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub tfinal: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub seed: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub ensemble: Option<String>,
    /// Output directory.
    #[arg(long, allow_hyphen_values = true)]
    pub out: Option<String>,
    /// key=value file; flags override its entries.
    #[arg(long, allow_hyphen_values = true)]
    pub config: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub steps: Option<String>,
    /// Coefficients a_0, a_1, ... of the even potential sum a_j z^{2j}.
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub kind: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub chain_len: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub burn_in: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub thinning: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub pcn_beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub samples: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub knots: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub iterations: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub paths: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub coupling: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub dt_factor: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub scales: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub lemma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub zeta_step: Option<String>,
    /// mu or rho.
    #[arg(long, allow_hyphen_values = true)]
    pub measure: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub control: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub constant: Option<String>,
    /// Where to write the final state.
    #[arg(long, allow_hyphen_values = true)]
    pub checkpoint: Option<String>,
    /// Checkpoint to continue from.
    #[arg(long, allow_hyphen_values = true)]
    pub resume: Option<String>,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("alpha", &self.alpha),
            ("trunc-n", &self.trunc_n),
            ("dt", &self.dt),
            ("tfinal", &self.tfinal),
            ("seed", &self.seed),
            ("ensemble", &self.ensemble),
            ("out", &self.out),
            ("steps", &self.steps),
            ("coeffs", &self.coeffs),
            ("kind", &self.kind),
            ("s", &self.s),
            ("chain-len", &self.chain_len),
            ("burn-in", &self.burn_in),
            ("thinning", &self.thinning),
            ("pcn-beta", &self.pcn_beta),
            ("samples", &self.samples),
            ("knots", &self.knots),
            ("iterations", &self.iterations),
            ("paths", &self.paths),
            ("coupling", &self.coupling),
            ("eps", &self.eps),
            ("kappa", &self.kappa),
            ("dt-factor", &self.dt_factor),
            ("scales", &self.scales),
            ("lemma", &self.lemma),
            ("zeta-step", &self.zeta_step),
            ("measure", &self.measure),
            ("control", &self.control),
            ("constant", &self.constant),
            ("checkpoint", &self.checkpoint),
            ("resume", &self.resume),
        ]
    }
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Validation(format!("config line {}: expected key=value", i + 1)))?;
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Validation(format!("config line {}: unknown key '{}'", i + 1, k.trim())));
        }
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(CliError::Validation(format!("config line {}: duplicate key '{key}'", i + 1)));
        }
    }
    Ok(out)
}

/// Resolved parameters. Every lookup, defaults included, is remembered so the
/// record can echo the effective configuration.
#[derive(Debug)]
pub struct Params {
    values: BTreeMap<String, String>,
    used: RefCell<BTreeMap<String, String>>,
}

impl Params {
    pub fn from_map(values: BTreeMap<String, String>) -> Self {
        Self { values, used: RefCell::new(BTreeMap::new()) }
    }

    pub fn resolve(flags: &Flags) -> Result<Self, CliError> {
        let mut values = match &flags.config {
            Some(p) => {
                let text = std::fs::read_to_string(Path::new(p))
                    .map_err(|e| CliError::Validation(format!("cannot read config {p}: {e}")))?;
                parse_config_text(&text)?
            }
            None => BTreeMap::new(),
        };
        for (k, v) in flags.pairs() {
            if let Some(v) = v {
                values.insert(k.to_string(), v.clone());
            }
        }
        Ok(Self::from_map(values))
    }

    pub fn effective(&self) -> BTreeMap<String, String> {
        self.used.borrow().clone()
    }

    fn raw(&self, key: &str) -> Option<String> {
        debug_assert!(KEYS.contains(&key), "unregistered key {key}");
        self.values.get(key).cloned()
    }

    fn note(&self, key: &str, v: String) {
        self.used.borrow_mut().insert(key.to_string(), v);
    }

    fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
        v.trim().parse().map_err(|_| CliError::Validation(format!("--{key}: cannot parse '{v}'")))
    }

    pub fn get<T: std::str::FromStr + ToString>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.raw(key) {
            Some(v) => {
                let x: T = Self::parse(key, &v)?;
                self.note(key, x.to_string());
                Ok(Some(x))
            }
            None => Ok(None),
        }
    }

    pub fn req<T: std::str::FromStr + ToString>(&self, key: &str) -> Result<T, CliError> {
        self.get(key)?.ok_or_else(|| CliError::Validation(format!("missing required --{key}")))
    }

    pub fn or<T: std::str::FromStr + ToString>(&self, key: &str, default: T) -> Result<T, CliError> {
        match self.get(key)? {
            Some(x) => Ok(x),
            None => {
                self.note(key, default.to_string());
                Ok(default)
            }
        }
    }

    fn list_from<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, CliError> {
        let xs = v.split(',').filter(|s| !s.trim().is_empty()).map(|s| Self::parse(key, s)).collect::<Result<Vec<T>, _>>()?;
        if xs.is_empty() {
            return Err(CliError::Validation(format!("--{key}: empty list")));
        }
        Ok(xs)
    }

    pub fn list<T: std::str::FromStr + ToString>(&self, key: &str) -> Result<Option<Vec<T>>, CliError> {
        match self.raw(key) {
            Some(v) => {
                let xs: Vec<T> = Self::list_from(key, &v)?;
                self.note(key, xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
                Ok(Some(xs))
            }
            None => Ok(None),
        }
    }

    pub fn list_req<T: std::str::FromStr + ToString>(&self, key: &str) -> Result<Vec<T>, CliError> {
        self.list(key)?.ok_or_else(|| CliError::Validation(format!("missing required --{key}")))
    }

    pub fn list_or<T: std::str::FromStr + ToString + Clone>(&self, key: &str, default: &[T]) -> Result<Vec<T>, CliError> {
        match self.list(key)? {
            Some(x) => Ok(x),
            None => {
                self.note(key, default.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
                Ok(default.to_vec())
            }
        }
    }

    /// alpha, required and > 1.
    pub fn alpha(&self) -> Result<f64, CliError> {
        let a: f64 = self.req("alpha")?;
        check_alpha(a)?;
        Ok(a)
    }

    pub fn alpha_or(&self, default: f64) -> Result<f64, CliError> {
        let a: f64 = self.or("alpha", default)?;
        check_alpha(a)?;
        Ok(a)
    }

    /// A single cutoff N >= 1.
    pub fn trunc_n(&self) -> Result<usize, CliError> {
        let ns = self.trunc_list()?;
        if ns.len() != 1 {
            return Err(CliError::Validation("--trunc-n: expected a single cutoff".into()));
        }
        Ok(ns[0])
    }

    pub fn trunc_list(&self) -> Result<Vec<usize>, CliError> {
        let ns: Vec<usize> = self.list_req("trunc-n")?;
        check_cutoffs(&ns)?;
        Ok(ns)
    }

    pub fn trunc_list_or(&self, default: &[usize]) -> Result<Vec<usize>, CliError> {
        let ns: Vec<usize> = self.list_or("trunc-n", default)?;
        check_cutoffs(&ns)?;
        Ok(ns)
    }

    pub fn positive<T: std::str::FromStr + ToString + PartialOrd + Default>(&self, key: &str, default: T) -> Result<T, CliError> {
        let x = self.or(key, default)?;
        if !(x > T::default()) {
            return Err(CliError::Validation(format!("--{key} must be positive")));
        }
        Ok(x)
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.or("seed", 0u64)
    }

    pub fn out_dir(&self) -> Result<String, CliError> {
        self.or("out", "out".to_string())
    }
}

fn check_alpha(a: f64) -> Result<(), CliError> {
    if !(a > 1.0) || !a.is_finite() {
        return Err(CliError::Validation(format!("--alpha must be > 1, got {a}")));
    }
    Ok(())
}

fn check_cutoffs(ns: &[usize]) -> Result<(), CliError> {
    if ns.contains(&0) {
        return Err(CliError::Validation("--trunc-n: cutoffs must be >= 1".into()));
    }
    Ok(())
}
