//! Run configuration: command-line flags layered over an optional TOML file
//! named by `EISCOH_CONFIG`.
//!
//! The file holds an optional `[common]` table and one table per
//! subcommand (`[weyl]`, `[kostant]`, `[constant-term]`, `[intertwine]`,
//! `[field]`, `[diagram]`). Keys are the flag names with `-` replaced by
//! `_`. Precedence, lowest first: `[common]`, the subcommand table, flags.

use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const CONFIG_ENV: &str = "EISCOH_CONFIG";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    /// Custom tower `{"k0": …, "k1": …, "k": …}`; overrides `field`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poly: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_hi: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_lo: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Not echoed in reports: results do not depend on the worker count.
    #[serde(skip_serializing)]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub list_coset_reps: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub self_test: Option<bool>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Text,
}

impl RunConfig {
    /// Fields set in `top` win.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        RunConfig {
            field: top.field.or(self.field),
            poly: top.poly.or(self.poly),
            n: top.n.or(self.n),
            k: top.k.or(self.k),
            eta: top.eta.or(self.eta),
            eta_hi: top.eta_hi.or(self.eta_hi),
            eta_lo: top.eta_lo.or(self.eta_lo),
            sigma: top.sigma.or(self.sigma),
            method: top.method.or(self.method),
            nodes: top.nodes.or(self.nodes),
            samples: top.samples.or(self.samples),
            seed: top.seed.or(self.seed),
            tol: top.tol.or(self.tol),
            format: top.format.or(self.format),
            threads: top.threads.or(self.threads),
            list_coset_reps: top.list_coset_reps.or(self.list_coset_reps),
            self_test: top.self_test.or(self.self_test),
        }
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn self_test(&self) -> bool {
        self.self_test.unwrap_or(false)
    }

    pub fn require_n(&self) -> Result<usize, String> {
        self.n.ok_or_else(|| "missing --n".to_string())
    }

    pub fn require_eta(&self) -> Result<Vec<i64>, String> {
        self.eta.clone().ok_or_else(|| "missing --eta".to_string())
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    common: Option<RunConfig>,
    weyl: Option<RunConfig>,
    kostant: Option<RunConfig>,
    #[serde(rename = "constant-term")]
    constant_term: Option<RunConfig>,
    intertwine: Option<RunConfig>,
    field: Option<RunConfig>,
    diagram: Option<RunConfig>,
}

/// Parses a config file and returns `[common]` overlaid with the table for
/// `command`.
pub fn parse_file(text: &str, command: &str) -> Result<RunConfig, String> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| format!("malformed config: {e}"))?;
    let section = match command {
        "weyl" => file.weyl,
        "kostant" => file.kostant,
        "constant-term" => file.constant_term,
        "intertwine" => file.intertwine,
        "field" => file.field,
        "diagram" => file.diagram,
        _ => None,
    };
    Ok(file.common.unwrap_or_default().overlay(section.unwrap_or_default()))
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file and then to per-command defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Field preset: gauss, zeta5, zeta8, zeta12, gauss-root-1pi.
    #[arg(long)]
    pub field: Option<String>,
    /// Custom tower as JSON {"k0": [...], "k1": [...], "k": [...]}, listing
    /// non-leading coefficients of each monic minimal polynomial.
    #[arg(long)]
    pub poly: Option<String>,
    /// Rank of GL_n.
    #[arg(long)]
    pub n: Option<usize>,
    /// Parabolic index 1 <= k <= n.
    #[arg(long)]
    pub k: Option<usize>,
    /// Infinity type, one integer per embedding in the order τ11, τ̄11, τ12, …
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub eta: Option<Vec<i64>>,
    /// Local exponent η_hi >= n at one complex place.
    #[arg(long, allow_hyphen_values = true)]
    pub eta_hi: Option<i64>,
    /// Local exponent η_lo <= 0 at one complex place (default 0).
    #[arg(long, allow_hyphen_values = true)]
    pub eta_lo: Option<i64>,
    /// Automorphism: id, conj, a cyclotomic parameter a (with optional +/-
    /// lift sign), or perm:2,1,4,3[@a]. Repeatable.
    #[arg(long)]
    pub sigma: Vec<String>,
    /// Quadrature: radial-iterated, tensor-grid or monte-carlo.
    #[arg(long)]
    pub method: Option<String>,
    /// Angular ring points (radial-iterated) or nodes per unit step of the
    /// transformed axis (tensor-grid).
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Monte Carlo draws.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Monte Carlo seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Acceptance tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker thread cap.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Run the module's invariant suite instead of a single query.
    #[arg(long)]
    pub self_test: bool,
}

impl Flags {
    pub fn into_config(self) -> Result<RunConfig, String> {
        let poly = match self.poly {
            Some(s) => Some(serde_json::from_str(&s).map_err(|e| format!("--poly is not JSON: {e}"))?),
            None => None,
        };
        Ok(RunConfig {
            field: self.field,
            poly,
            n: self.n,
            k: self.k,
            eta: self.eta,
            eta_hi: self.eta_hi,
            eta_lo: self.eta_lo,
            sigma: (!self.sigma.is_empty()).then_some(self.sigma),
            method: self.method,
            nodes: self.nodes,
            samples: self.samples,
            seed: self.seed,
            tol: self.tol,
            format: self.format,
            threads: self.threads,
            list_coset_reps: None,
            self_test: self.self_test.then_some(true),
        })
    }
}
