//! Configuration-driven verification runs, reports and `Area_II` scans.

pub mod config;
pub mod report;
pub mod run;

use std::fmt::Write as _;

use bitension_core::catalog::{self, CatalogEntry};

pub use config::{load_config, load_config_file, ConfigError, Format, RunConfig};
pub use report::{render, Report};
pub use run::{run, run_scan, RunError, EXIT_ABORT, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS};

/// One line per catalog entry at its default parameters.
pub fn catalog_listing() -> String {
    let mut out = String::new();
    for name in catalog::NAMES {
        let entry = catalog::build(name, &[]).expect("defaults are valid");
        let params: Vec<String> = entry.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "{name:<22} {}  [{}]", entry.description, params.join(", "));
    }
    out
}

/// Components, domain and the cited closed-form table of one entry.
pub fn describe_entry(entry: &CatalogEntry) -> String {
    let spec = &entry.spec;
    let mut out = String::new();
    let _ = writeln!(out, "{}: {}", entry.name, entry.description);
    for (k, v) in &entry.params {
        let _ = writeln!(out, "  param {k} = {v}");
    }
    let _ = writeln!(out, "  parameters: {}", spec.params().join(", "));
    for (i, ((lo, hi), periodic)) in spec.domain().iter().zip(spec.periodic()).enumerate() {
        let kind = if *periodic { "periodic" } else { "interval" };
        let _ = writeln!(out, "  domain[{i}] = [{lo}, {hi}] ({kind})");
    }
    for (i, c) in spec.sources().iter().enumerate() {
        let _ = writeln!(out, "  x{i} = {c}");
    }
    let ex = &entry.expected;
    let num = |out: &mut String, k: &str, c: &Option<catalog::Cited<f64>>| {
        if let Some(c) = c {
            let _ = writeln!(out, "  {k:<18} {:<22} {}", c.value, c.source);
        }
    };
    num(&mut out, "|H|", &ex.h_norm);
    num(&mut out, "|A|²", &ex.a_squared);
    num(&mut out, "s", &ex.scalar_curvature);
    num(&mut out, "λ_p", &ex.lambda_p);
    num(&mut out, "λ_q", &ex.lambda_q);
    num(&mut out, "|φ₀|", &ex.center_norm);
    let flag = |out: &mut String, k: &str, c: &Option<catalog::Cited<bool>>| {
        if let Some(c) = c {
            let _ = writeln!(out, "  {k:<18} {:<22} {}", c.value, c.source);
        }
    };
    flag(&mut out, "parallel H", &ex.parallel_h);
    flag(&mut out, "pseudo-umbilical", &ex.pseudo_umbilical);
    flag(&mut out, "mass-symmetric", &ex.mass_symmetric);
    flag(&mut out, "constant |H|", &ex.cmc);
    flag(&mut out, "biharmonic", &ex.biharmonic);
    if let Some(c) = &ex.order {
        let _ = writeln!(out, "  {:<18} {:<22} {}", "order", format!("{:?}", c.value), c.source);
    }
    if let Some(l) = &entry.lattice {
        let _ = writeln!(out, "  lattice periods    {l:?}");
    }
    out
}
