//! Run configuration: strict TOML with `section.key=value` overrides.

use std::collections::BTreeMap;

use bitension_core::catalog::{self, CatalogEntry, CatalogError, Family};
use bitension_core::dsl::{parse_expression, ImmersionSpec, SpecError};
use bitension_core::Tolerances;
use serde::Deserialize;
use thiserror::Error;

/// Environment variable overriding the default residual tolerance.
pub const ENV_TOLERANCE: &str = "BITENSION_TOLERANCE";
/// Environment variable setting the worker thread count.
pub const ENV_THREADS: &str = "BITENSION_THREADS";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Syntax(String),
    #[error("override {0:?} is not of the form section.key=value")]
    BadOverride(String),
    #[error("override {key:?}: {reason}")]
    OverridePath { key: String, reason: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("{name}={value:?} is not a valid value: {reason}")]
    Env { name: &'static str, value: String, reason: String },
    #[error("immersion: {0}")]
    Catalog(#[from] CatalogError),
    #[error("immersion: {0}")]
    Spec(#[from] SpecError),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub immersion: ImmersionConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub checks: ChecksConfig,
    #[serde(default)]
    pub tolerances: TolerancesConfig,
    #[serde(default)]
    pub output: OutputConfig,
    pub scan: Option<ScanConfig>,
    /// Expected verdict label per check name (`pass`, `fail`, `not-applicable`).
    #[serde(default)]
    pub expect: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImmersionConfig {
    pub catalog: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub dsl: Option<DslConfig>,
    /// Defaults to the catalog entry's flag, or to `closed` for DSL input.
    pub compact: Option<bool>,
}

/// A domain endpoint: a number or a constant expression such as `"2*pi"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    Number(f64),
    Expr(String),
}

impl Bound {
    fn value(&self) -> Result<f64, ConfigError> {
        match self {
            Bound::Number(x) => Ok(*x),
            Bound::Expr(s) => {
                let e = parse_expression(s, &[]).map_err(|e| ConfigError::Invalid(format!("domain bound {s:?}: {e}")))?;
                e.eval(&[0.0], 0, &[])
                    .map(|j| j.value())
                    .map_err(|e| ConfigError::Invalid(format!("domain bound {s:?}: {e}")))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DslConfig {
    #[serde(default = "default_dsl_name")]
    pub name: String,
    pub params: Vec<String>,
    pub components: Vec<String>,
    pub ambient_dim: usize,
    pub domain: Vec<[Bound; 2]>,
    pub periodic: Vec<bool>,
    #[serde(default)]
    pub closed: bool,
}

fn default_dsl_name() -> String {
    "dsl".into()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub points_per_dim: usize,
    /// Relative distance kept from the ends of non-periodic axes.
    pub offset: f64,
    /// Nodes per axis for centers of mass.
    pub quadrature_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { points_per_dim: 9, offset: 0.05, quadrature_points: 17 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChecksConfig {
    pub bitension: bool,
    pub characterization: bool,
    pub prop31: bool,
    pub prop32: bool,
    pub scalar: bool,
    pub spectral: bool,
    pub gates: bool,
    pub area_ii_scan: bool,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        ChecksConfig {
            bitension: true,
            characterization: true,
            prop31: true,
            prop32: true,
            scalar: true,
            spectral: true,
            gates: true,
            area_ii_scan: false,
        }
    }
}

impl ChecksConfig {
    fn any(&self) -> bool {
        self.bitension
            || self.characterization
            || self.prop31
            || self.prop32
            || self.scalar
            || self.spectral
            || self.gates
            || self.area_ii_scan
    }
}

/// Missing fields fall back to [`Tolerances::default`], with `residual`
/// taken from the environment when set.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesConfig {
    pub constraint: Option<f64>,
    pub sphere_abort: Option<f64>,
    pub residual: Option<f64>,
    pub max_condition: Option<f64>,
    pub spectral: Option<f64>,
    pub conditioning: Option<f64>,
    pub mass: Option<f64>,
}

impl TolerancesConfig {
    pub fn resolve(&self, env_residual: Option<f64>) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            constraint: self.constraint.unwrap_or(d.constraint),
            sphere_abort: self.sphere_abort.unwrap_or(d.sphere_abort),
            residual: self.residual.or(env_residual).unwrap_or(d.residual),
            max_condition: self.max_condition.unwrap_or(d.max_condition),
            spectral: self.spectral.unwrap_or(d.spectral),
            conditioning: self.conditioning.unwrap_or(d.conditioning),
            mass: self.mass.unwrap_or(d.mass),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub format: Format,
    /// Standard output when absent.
    pub path: Option<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { format: Format::Json, path: None }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    /// `hypersphere` or `clifford`
    pub family: String,
    pub m: Option<usize>,
    pub m1: Option<usize>,
    pub m2: Option<usize>,
    pub a_min: f64,
    pub a_max: f64,
    pub step: f64,
    #[serde(default = "default_scan_quadrature")]
    pub quadrature_points: usize,
    #[serde(default = "default_scan_samples")]
    pub sample_points: usize,
}

fn default_scan_quadrature() -> usize {
    10
}

fn default_scan_samples() -> usize {
    3
}

impl ScanConfig {
    pub fn family(&self) -> Result<Family, ConfigError> {
        match self.family.as_str() {
            "hypersphere" => {
                if self.m1.is_some() || self.m2.is_some() {
                    return Err(ConfigError::Invalid("scan.m1/scan.m2 apply to the clifford family only".into()));
                }
                Ok(Family::Hypersphere { m: self.m.unwrap_or(3) })
            }
            "clifford" => {
                if self.m.is_some() {
                    return Err(ConfigError::Invalid("scan.m applies to the hypersphere family only".into()));
                }
                Ok(Family::Clifford { m1: self.m1.unwrap_or(1), m2: self.m2.unwrap_or(2) })
            }
            other => Err(ConfigError::Invalid(format!("scan.family {other:?} is not hypersphere or clifford"))),
        }
    }
}

/// Resolved immersion: its `ImmersionSpec` plus catalog metadata when available.
#[derive(Debug, Clone)]
pub struct Immersion {
    pub spec: ImmersionSpec,
    pub entry: Option<CatalogEntry>,
    pub compact: bool,
    pub params: Vec<(String, f64)>,
    pub description: String,
}

impl RunConfig {
    /// Checks that do not need the immersion itself.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !self.checks.any() {
            return Err(ConfigError::Invalid("no check is enabled".into()));
        }
        if self.grid.points_per_dim < 3 {
            return Err(ConfigError::Invalid(format!(
                "grid.points_per_dim = {} (at least 3 required)",
                self.grid.points_per_dim
            )));
        }
        if self.grid.quadrature_points < 1 {
            return Err(ConfigError::Invalid("grid.quadrature_points must be positive".into()));
        }
        if !(0.0..0.5).contains(&self.grid.offset) {
            return Err(ConfigError::Invalid(format!("grid.offset = {} must lie in [0, 0.5)", self.grid.offset)));
        }
        match (&self.immersion.catalog, &self.immersion.dsl) {
            (Some(_), Some(_)) => return Err(ConfigError::Invalid("immersion: give either catalog or dsl, not both".into())),
            (None, None) => return Err(ConfigError::Invalid("immersion: one of catalog or dsl is required".into())),
            (None, Some(_)) if !self.immersion.params.is_empty() => {
                return Err(ConfigError::Invalid("immersion.params applies to catalog entries only".into()))
            }
            _ => {}
        }
        if self.checks.area_ii_scan && self.scan.is_none() {
            return Err(ConfigError::Invalid("checks.area_ii_scan needs a [scan] section".into()));
        }
        if let Some(scan) = &self.scan {
            scan.family()?;
            if scan.quadrature_points < 1 || scan.sample_points < 3 {
                return Err(ConfigError::Invalid("scan needs quadrature_points ≥ 1 and sample_points ≥ 3".into()));
            }
        }
        for (name, label) in &self.expect {
            if !["pass", "fail", "not-applicable"].contains(&label.as_str()) {
                return Err(ConfigError::Invalid(format!("expect.{name} = {label:?} is not pass, fail or not-applicable")));
            }
        }
        Ok(())
    }

    pub fn immersion(&self) -> Result<Immersion, ConfigError> {
        let cfg = &self.immersion;
        if let Some(name) = &cfg.catalog {
            let params: Vec<(String, f64)> = cfg.params.iter().map(|(k, v)| (k.clone(), *v)).collect();
            let entry = catalog::build(name, &params)?;
            return Ok(Immersion {
                spec: entry.spec.clone(),
                compact: cfg.compact.unwrap_or(entry.compact),
                params: entry.params.clone(),
                description: entry.description.clone(),
                entry: Some(entry),
            });
        }
        let dsl = cfg.dsl.as_ref().expect("validated");
        let domain =
            dsl.domain.iter().map(|[lo, hi]| Ok((lo.value()?, hi.value()?))).collect::<Result<Vec<_>, ConfigError>>()?;
        let params: Vec<&str> = dsl.params.iter().map(String::as_str).collect();
        let comps: Vec<&str> = dsl.components.iter().map(String::as_str).collect();
        let spec = ImmersionSpec::parse(&dsl.name, &params, &comps, dsl.ambient_dim, &domain, &dsl.periodic, dsl.closed)?;
        Ok(Immersion {
            compact: cfg.compact.unwrap_or(dsl.closed),
            description: format!("{} ({}-dimensional, in S^{})", dsl.name, spec.dim(), spec.sphere_dim()),
            spec,
            entry: None,
            params: Vec::new(),
        })
    }
}

/// Parse `section.key=value`; the value is read as a TOML value, falling
/// back to a bare string.
pub fn parse_override(s: &str) -> Result<(Vec<String>, toml::Value), ConfigError> {
    let (key, raw) = s.split_once('=').ok_or_else(|| ConfigError::BadOverride(s.to_string()))?;
    let path: Vec<String> = key.trim().split('.').map(|p| p.trim().to_string()).collect();
    if path.len() < 2 || path.iter().any(String::is_empty) {
        return Err(ConfigError::BadOverride(s.to_string()));
    }
    let raw = raw.trim();
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    Ok((path, value))
}

fn apply_override(doc: &mut toml::Table, path: &[String], value: toml::Value) -> Result<(), ConfigError> {
    let key = path.join(".");
    let mut table = doc;
    for part in &path[..path.len() - 1] {
        let next = table.entry(part.clone()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = next
            .as_table_mut()
            .ok_or_else(|| ConfigError::OverridePath { key: key.clone(), reason: format!("{part} is not a section") })?;
    }
    table.insert(path[path.len() - 1].clone(), value);
    Ok(())
}

/// Parse, apply overrides in order and validate.
pub fn load_config(doc: &str, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let mut table: toml::Table = toml::from_str(doc).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    for o in overrides {
        let (path, value) = parse_override(o)?;
        apply_override(&mut table, &path, value)?;
    }
    let cfg: RunConfig = table.try_into().map_err(|e: toml::de::Error| ConfigError::Syntax(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config_file(path: &str, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let doc = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_string(), source })?;
    load_config(&doc, overrides)
}

fn env_value<T: std::str::FromStr>(name: &'static str, ok: impl Fn(&T) -> bool) -> Result<Option<T>, ConfigError>
where
    T::Err: std::fmt::Display,
{
    match std::env::var(name) {
        Err(_) => Ok(None),
        Ok(value) => match value.trim().parse::<T>() {
            Ok(v) if ok(&v) => Ok(Some(v)),
            Ok(_) => Err(ConfigError::Env { name, value, reason: "out of range".into() }),
            Err(e) => Err(ConfigError::Env { name, value, reason: e.to_string() }),
        },
    }
}

/// Default residual tolerance from the environment.
pub fn env_tolerance() -> Result<Option<f64>, ConfigError> {
    env_value::<f64>(ENV_TOLERANCE, |t| *t > 0.0 && t.is_finite())
}

/// Worker thread count from the environment.
pub fn env_threads() -> Result<Option<usize>, ConfigError> {
    env_value::<usize>(ENV_THREADS, |n| *n > 0)
}
