//! Experiment configuration: `key=value` file merged under command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cagmps::ed::MAX_SITES;
use cagmps::{ModelKind, ModelSpec};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Methods {
    Gmps,
    Cagmps,
    Both,
}

impl Methods {
    pub fn flags(self) -> &'static [bool] {
        match self {
            Methods::Gmps => &[false],
            Methods::Cagmps => &[true],
            Methods::Both => &[false, true],
        }
    }
}

impl FromStr for Methods {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "off" => Ok(Methods::Gmps),
            "on" => Ok(Methods::Cagmps),
            "both" => Ok(Methods::Both),
            _ => Err(format!("clifford must be on, off or both (got {s:?})")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reference {
    Ed,
    HighChi,
}

/// Bond dimension of the reference run in `high-chi` mode.
pub const HIGH_CHI: usize = 128;

impl FromStr for Reference {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ed" => Ok(Reference::Ed),
            "high-chi" | "high_chi" => Ok(Reference::HighChi),
            _ => Err(format!("reference must be ed or high-chi (got {s:?})")),
        }
    }
}

impl fmt::Display for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reference::Ed => "ed",
            Reference::HighChi => "high-chi",
        })
    }
}

pub fn parse_chi_list(s: &str) -> Result<Vec<usize>, String> {
    let chis: Vec<usize> = s
        .split(',')
        .map(|c| c.trim().parse::<usize>().map_err(|e| format!("bad chi {c:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if chis.is_empty() || chis.contains(&0) {
        return Err("chi list must contain positive integers".into());
    }
    Ok(chis)
}

/// Every setting a flag or a config file may provide; `None` means unset.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub model: Option<String>,
    pub l: Option<usize>,
    pub t: Option<f64>,
    pub v: Option<f64>,
    pub chi: Option<String>,
    pub sweeps: Option<usize>,
    pub clifford: Option<String>,
    pub seed: Option<u64>,
    pub reference: Option<String>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: Overrides) -> Overrides {
        Overrides {
            model: self.model.or(base.model),
            l: self.l.or(base.l),
            t: self.t.or(base.t),
            v: self.v.or(base.v),
            chi: self.chi.or(base.chi),
            sweeps: self.sweeps.or(base.sweeps),
            clifford: self.clifford.or(base.clifford),
            seed: self.seed.or(base.seed),
            reference: self.reference.or(base.reference),
            out: self.out.or(base.out),
        }
    }

    /// Parse a plain `key=value` file; blank lines and `#` comments are skipped.
    pub fn from_file(path: &Path) -> Result<Overrides, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Overrides::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Overrides, CliError> {
        let mut map = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key=value", n + 1)))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let mut o = Overrides::default();
        for (k, v) in map {
            let bad = |e: &dyn fmt::Display| CliError::Config(format!("{k}: {e}"));
            match k.as_str() {
                "model" => o.model = Some(v),
                "L" => o.l = Some(v.parse().map_err(|e| bad(&e))?),
                "t" => o.t = Some(v.parse().map_err(|e| bad(&e))?),
                "V" => o.v = Some(v.parse().map_err(|e| bad(&e))?),
                "chi" => o.chi = Some(v),
                "sweeps" => o.sweeps = Some(v.parse().map_err(|e| bad(&e))?),
                "clifford" => o.clifford = Some(v),
                "seed" => o.seed = Some(v.parse().map_err(|e| bad(&e))?),
                "reference" => o.reference = Some(v),
                "out" => o.out = Some(PathBuf::from(v)),
                _ => return Err(CliError::Config(format!("unknown key {k:?}"))),
            }
        }
        Ok(o)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub chis: Vec<usize>,
    pub sweeps: usize,
    pub methods: Methods,
    pub seed: u64,
    pub reference: Reference,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Defaults: t–V with t=1, V=2, L=8, χ=64, 40 sweeps, both methods, seed
    /// 1, ED reference up to the ED size limit and high-χ beyond.
    pub fn resolve(o: Overrides) -> Result<ExperimentConfig, CliError> {
        let cfg = |e: String| CliError::Config(e);
        let kind: ModelKind = o.model.as_deref().unwrap_or("tv").parse().map_err(|e: cagmps::Error| cfg(e.to_string()))?;
        let l = o.l.unwrap_or(8);
        let t = o.t.unwrap_or(1.0);
        let v = o.v.unwrap_or(2.0);
        let model = match kind {
            ModelKind::Tv => ModelSpec::tv(l, t, v),
            ModelKind::TightBinding => {
                if o.v.is_some_and(|v| v != 0.0) {
                    return Err(cfg("tight-binding has no V".into()));
                }
                ModelSpec::tight_binding(l, t)
            }
        };
        let chis = parse_chi_list(o.chi.as_deref().unwrap_or("64")).map_err(cfg)?;
        let sweeps = o.sweeps.unwrap_or(40);
        let methods: Methods = o.clifford.as_deref().unwrap_or("both").parse().map_err(cfg)?;
        let reference = match o.reference.as_deref() {
            Some(r) => r.parse().map_err(cfg)?,
            None if l <= MAX_SITES => Reference::Ed,
            None => Reference::HighChi,
        };
        let c = ExperimentConfig { model, chis, sweeps, methods, seed: o.seed.unwrap_or(1), reference, out: o.out };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let m = &self.model;
        if m.l < 2 {
            return Err(CliError::Config(format!("L = {} is below 2", m.l)));
        }
        if !(m.t.is_finite() && m.t > 0.0) || !m.v.is_finite() || m.v < 0.0 {
            return Err(CliError::Config("t must be positive and V non-negative".into()));
        }
        if self.sweeps == 0 {
            return Err(CliError::Config("sweeps must be positive".into()));
        }
        if self.reference == Reference::Ed && m.l > MAX_SITES {
            return Err(CliError::Config(format!("ed reference needs L <= {MAX_SITES} (got {})", m.l)));
        }
        Ok(())
    }
}
