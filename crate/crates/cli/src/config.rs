//! Line-oriented `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use blowup_core::diagnostics::StabilityThresholds;
use blowup_core::evolve::EvolveOptions;
use blowup_core::selfsim::default_length;
use blowup_core::{ElementKind, MediumParams};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Classify,
    Selfsim,
    Evolve,
    Stability,
    Convergence,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Classify => "classify",
            Scenario::Selfsim => "selfsim",
            Scenario::Evolve => "evolve",
            Scenario::Stability => "stability",
            Scenario::Convergence => "convergence",
        }
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "classify" => Scenario::Classify,
            "selfsim" => Scenario::Selfsim,
            "evolve" => Scenario::Evolve,
            "stability" => Scenario::Stability,
            "convergence" => Scenario::Convergence,
            other => {
                return Err(format!(
                    "unknown scenario '{other}' (classify, selfsim, evolve, stability, convergence)"
                ))
            }
        })
    }
}

/// Initial data of an evolution run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Initial {
    /// The converged self-similar profile `θ_{s,k}`.
    Profile,
    /// The elementary S-regime solution.
    Exact,
}

impl FromStr for Initial {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "profile" => Ok(Initial::Profile),
            "exact" => Ok(Initial::Exact),
            other => Err(format!("unknown initial data '{other}' (profile, exact)")),
        }
    }
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub params: MediumParams,
    pub ks: Vec<usize>,
    pub element_kind: ElementKind,
    pub elements: usize,
    pub length: f64,
    pub initial: Initial,
    pub evolve: EvolveOptions<f64>,
    pub thresholds: StabilityThresholds<f64>,
    pub factors: Vec<f64>,
    /// Support widening of the extra stability run; 0 disables it.
    pub widen: f64,
    pub levels: usize,
    pub output: PathBuf,
}

const KEYS: &[&str] = &[
    "scenario",
    "sigma",
    "beta",
    "dim",
    "t0",
    "k",
    "element_kind",
    "elements",
    "h",
    "length",
    "initial",
    "amplitude_cap",
    "max_time",
    "lambda",
    "delta_u",
    "safety",
    "adapt",
    "snapshots",
    "factors",
    "widen",
    "epsilon",
    "gamma_hold",
    "levels",
    "output",
];

/// Raw key/value pairs in file order, duplicates rejected.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut pairs = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Config(format!("line {}: expected key = value, got '{line}'", no + 1)));
        };
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(CliError::Config(format!("line {}: unknown key '{k}'", no + 1)));
        }
        if v.is_empty() {
            return Err(CliError::Config(format!("line {}: empty value for '{k}'", no + 1)));
        }
        if pairs.insert(k.to_string(), v.to_string()).is_some() {
            return Err(CliError::Config(format!("line {}: duplicate key '{k}'", no + 1)));
        }
    }
    Ok(pairs)
}

fn get<T: FromStr>(pairs: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    pairs
        .get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|e| CliError::Config(format!("{key} = {v}: {e}")))
        })
        .transpose()
}

fn list<T: FromStr>(pairs: &BTreeMap<String, String>, key: &str) -> Result<Option<Vec<T>>, CliError>
where
    T::Err: std::fmt::Display,
{
    pairs
        .get(key)
        .map(|v| {
            v.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<T>()
                        .map_err(|e| CliError::Config(format!("{key} = {v}: {e}")))
                })
                .collect()
        })
        .transpose()
}

/// `k = 1,2,4` or `k = 1..4`.
fn parse_ks(v: &str) -> Result<Vec<usize>, CliError> {
    let bad = |e: &dyn std::fmt::Display| CliError::Config(format!("k = {v}: {e}"));
    let ks: Vec<usize> = if let Some((a, b)) = v.split_once("..") {
        let a: usize = a.trim().parse().map_err(|e| bad(&e))?;
        let b: usize = b.trim().parse().map_err(|e| bad(&e))?;
        (a..=b).collect()
    } else {
        v.split(',')
            .map(|s| s.trim().parse().map_err(|e| bad(&e)))
            .collect::<Result<_, _>>()?
    };
    if ks.is_empty() || ks.contains(&0) {
        return Err(CliError::Config(format!("k = {v}: indices must be >= 1 and nonempty")));
    }
    Ok(ks)
}

impl ExperimentConfig {
    /// Parses and validates every field before anything runs. `base` resolves
    /// a relative `output`.
    pub fn parse(text: &str, base: &std::path::Path) -> Result<Self, CliError> {
        let pairs = parse_pairs(text)?;
        let need = |k: &str| {
            pairs
                .get(k)
                .ok_or_else(|| CliError::Config(format!("missing required key '{k}'")))
        };
        let scenario: Scenario = need("scenario")?.parse().map_err(CliError::Config)?;
        let sigma: f64 = get(&pairs, "sigma")?.ok_or_else(|| CliError::Config("missing required key 'sigma'".into()))?;
        let beta: f64 = get(&pairs, "beta")?.ok_or_else(|| CliError::Config("missing required key 'beta'".into()))?;
        let dim: usize = get(&pairs, "dim")?.unwrap_or(1);
        let mut params = MediumParams::new(sigma, beta, dim).map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(t0) = get::<f64>(&pairs, "t0")? {
            params = params.with_t0(t0).map_err(|e| CliError::Config(e.to_string()))?;
        }
        let ks = match pairs.get("k") {
            Some(v) => parse_ks(v)?,
            None => vec![1],
        };
        let element_kind: ElementKind = match pairs.get("element_kind") {
            Some(v) => v.parse().map_err(|e: blowup_core::Error| CliError::Config(e.to_string()))?,
            None => ElementKind::Linear,
        };
        let initial: Initial = get(&pairs, "initial")?.unwrap_or(Initial::Profile);
        if initial == Initial::Exact && !params.is_s_regime() {
            return Err(CliError::Config("initial = exact requires beta = sigma + 1".into()));
        }
        let kmax = ks.iter().copied().max().unwrap_or(1);
        let length: f64 = match get(&pairs, "length")? {
            Some(l) => l,
            None if initial == Initial::Exact && scenario == Scenario::Evolve => {
                1.5 * blowup_core::exact::fundamental_length(sigma)
            }
            None => default_length(&params, kmax),
        };
        if !(length > 0.0) || !length.is_finite() {
            return Err(CliError::Config(format!("length must be > 0, got {length}")));
        }
        let elements: usize = match (get::<usize>(&pairs, "elements")?, get::<f64>(&pairs, "h")?) {
            (Some(_), Some(_)) => return Err(CliError::Config("give either elements or h, not both".into())),
            (Some(n), None) => n,
            (None, Some(h)) if h > 0.0 && h.is_finite() => (length / h).ceil() as usize,
            (None, Some(h)) => return Err(CliError::Config(format!("h must be > 0, got {h}"))),
            (None, None) => 400,
        };
        if elements < 2 {
            return Err(CliError::Config(format!("elements must be >= 2, got {elements}")));
        }
        let defaults = EvolveOptions::<f64>::default();
        let mut snapshots: Vec<f64> = list(&pairs, "snapshots")?.unwrap_or_default();
        snapshots.sort_by(f64::total_cmp);
        if snapshots.iter().any(|g| !(*g >= 1.0) || !g.is_finite()) {
            return Err(CliError::Config("snapshots must be amplitude ratios >= 1".into()));
        }
        let evolve = EvolveOptions {
            amplitude_cap: get(&pairs, "amplitude_cap")?.unwrap_or(defaults.amplitude_cap),
            max_time: get(&pairs, "max_time")?.unwrap_or(defaults.max_time),
            lambda: get(&pairs, "lambda")?.unwrap_or(defaults.lambda),
            delta_u: get(&pairs, "delta_u")?.unwrap_or(defaults.delta_u),
            safety: get(&pairs, "safety")?.unwrap_or(defaults.safety),
            adapt: get(&pairs, "adapt")?.unwrap_or(defaults.adapt),
            snapshot_gammas: snapshots,
            ..defaults
        };
        evolve.validate().map_err(|e| CliError::Config(e.to_string()))?;
        let td = StabilityThresholds::<f64>::default();
        let thresholds = StabilityThresholds {
            epsilon: get(&pairs, "epsilon")?.unwrap_or(td.epsilon),
            gamma_hold: get(&pairs, "gamma_hold")?.unwrap_or(td.gamma_hold),
            ..td
        };
        if !(thresholds.epsilon > 0.0) || !(thresholds.gamma_hold >= 1.0) {
            return Err(CliError::Config("epsilon must be > 0 and gamma_hold >= 1".into()));
        }
        let factors: Vec<f64> = list(&pairs, "factors")?.unwrap_or_else(|| vec![0.8, 1.2]);
        if factors.iter().any(|f| !(*f > 0.0) || !f.is_finite()) {
            return Err(CliError::Config("factors must be positive".into()));
        }
        let widen: f64 = get(&pairs, "widen")?.unwrap_or(0.1);
        if !(widen >= 0.0) || !widen.is_finite() {
            return Err(CliError::Config(format!("widen must be >= 0, got {widen}")));
        }
        let levels: usize = get(&pairs, "levels")?.unwrap_or(4);
        if scenario == Scenario::Convergence && levels < 3 {
            return Err(CliError::Config(format!("levels must be >= 3, got {levels}")));
        }
        if matches!(scenario, Scenario::Evolve | Scenario::Stability) && element_kind != ElementKind::Linear {
            return Err(CliError::Config("evolution runs use element_kind = linear".into()));
        }
        let output = base.join(pairs.get("output").map(String::as_str).unwrap_or("out"));
        Ok(Self {
            scenario,
            params,
            ks,
            element_kind,
            elements,
            length,
            initial,
            evolve,
            thresholds,
            factors,
            widen,
            levels,
            output,
        })
    }
}
