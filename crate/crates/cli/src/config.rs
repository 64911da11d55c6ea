//! Run configuration: a flat key-value map read from JSON, overridden by
//! command-line flags, and resolved to concrete values before a run.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Oracle,
    Green,
    Moments,
    Dist,
    Laplace,
    Bose,
    Gue,
    Compare,
    Validate,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.to_possible_value().expect("no skipped variants");
        f.write_str(name.get_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutFormat {
    Csv,
    Json,
    Both,
}

impl OutFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutFormat::Csv | OutFormat::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, OutFormat::Json | OutFormat::Both)
    }
}

/// Every key a run may use. Unset keys take the command's default when the
/// configuration is resolved.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    /// Right jump rate (0 < p < 1/2).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Time (macroscopic time for `compare`).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Highest moment order.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Support cutoff of distribution tables.
    #[arg(long, visible_alias = "M")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Argument of the tau-Laplace transform.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    /// Bose gas interaction strength.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicas: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Quadrature nodes of the selected route.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    /// Route: moments {partition, nested, monte-carlo}; dist {duality, tw,
    /// oracle, monte-carlo}; laplace {series, cauchy, mellin-barnes};
    /// compare {exact, simulation}.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    /// Sites on each side of the origin for the exact oracle.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    /// Coordinates, comma separated (`green`: final positions; `bose`).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    /// Initial positions for `green`, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    /// Arguments of `gue`, comma separated (default: the comparison grid).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<String>,
    /// Shorter validation suite.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quick: Option<bool>,
    /// Also write SVG plots.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plot: Option<bool>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_format: Option<OutFormat>,
    /// Output directory.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_path: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($field:ident),*) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field.clone(); } )*
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    /// `self` with every key set in `flags` replaced.
    pub fn overridden_by(mut self, flags: &RunConfig) -> Self {
        let base = &mut self;
        overlay!(
            base, flags, command, p, t, k, m, zeta, kappa, replicas, seed, nodes, method, window, x, y, s, quick, plot,
            out_format, out_path
        );
        self
    }

    /// Fills the command's defaults and rejects keys it does not read.
    pub fn resolve(mut self, command: Command) -> Result<Self, CliError> {
        if let Some(c) = self.command {
            if c != command {
                return Err(CliError::Usage(format!("config is for `{c}`, not `{command}`")));
            }
        }
        self.command = Some(command);
        let used = keys_for(command);
        let set = self.set_keys();
        if let Some(extra) = set.iter().find(|k| !used.contains(k) && !COMMON_KEYS.contains(k)) {
            return Err(CliError::Usage(format!("`{command}` does not take `{extra}`")));
        }
        let method = self.method.clone();
        let d = Defaults::of(command, method.as_deref())?;
        self.p.get_or_insert(0.3);
        self.out_format.get_or_insert(OutFormat::Csv);
        self.out_path.get_or_insert_with(|| PathBuf::from("asep-out"));
        self.plot.get_or_insert(false);
        for key in used {
            match *key {
                "t" => {
                    self.t.get_or_insert(d.t);
                }
                "k" => {
                    self.k.get_or_insert(d.k);
                }
                "m" => {
                    self.m.get_or_insert(d.m);
                }
                "zeta" => {
                    self.zeta.get_or_insert(-0.1);
                }
                "kappa" => {
                    self.kappa.get_or_insert(1.0);
                }
                "replicas" => {
                    self.replicas.get_or_insert(d.replicas);
                }
                "seed" => {
                    self.seed.get_or_insert(1);
                }
                "nodes" => {
                    self.nodes.get_or_insert(d.nodes);
                }
                "method" => {
                    self.method.get_or_insert_with(|| d.method.to_string());
                }
                "window" => {
                    self.window.get_or_insert(10);
                }
                "x" => {
                    self.x.get_or_insert_with(|| d.x.to_string());
                }
                "y" => {
                    self.y.get_or_insert_with(|| "0,1".to_string());
                }
                "quick" => {
                    self.quick.get_or_insert(false);
                }
                _ => {}
            }
        }
        Ok(self)
    }

    fn set_keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        let flags: [(&'static str, bool); 15] = [
            ("t", self.t.is_some()),
            ("k", self.k.is_some()),
            ("m", self.m.is_some()),
            ("zeta", self.zeta.is_some()),
            ("kappa", self.kappa.is_some()),
            ("replicas", self.replicas.is_some()),
            ("seed", self.seed.is_some()),
            ("nodes", self.nodes.is_some()),
            ("method", self.method.is_some()),
            ("window", self.window.is_some()),
            ("x", self.x.is_some()),
            ("y", self.y.is_some()),
            ("s", self.s.is_some()),
            ("quick", self.quick.is_some()),
            ("p", self.p.is_some()),
        ];
        for (k, on) in flags {
            if on {
                keys.push(k);
            }
        }
        keys
    }
}

const COMMON_KEYS: &[&str] = &["p", "plot", "out-format", "out-path"];

fn keys_for(command: Command) -> &'static [&'static str] {
    match command {
        Command::Simulate => &["t", "k", "m", "replicas", "seed"],
        Command::Oracle => &["t", "m", "window"],
        Command::Green => &["t", "x", "y", "nodes"],
        Command::Moments => &["t", "k", "method", "nodes", "replicas", "seed"],
        Command::Dist => &["t", "m", "method", "window", "replicas", "seed"],
        Command::Laplace => &["t", "zeta", "k", "method", "nodes"],
        Command::Bose => &["t", "kappa", "x", "nodes"],
        Command::Gue => &["s", "nodes"],
        Command::Compare => &["t", "method", "replicas", "seed"],
        Command::Validate => &["quick", "seed"],
    }
}

struct Defaults {
    t: f64,
    k: usize,
    m: usize,
    replicas: usize,
    nodes: usize,
    method: &'static str,
    x: &'static str,
}

impl Defaults {
    fn of(command: Command, method: Option<&str>) -> Result<Self, CliError> {
        let mut d = Defaults {
            t: 1.0,
            k: 3,
            m: 6,
            replicas: 10_000,
            nodes: 64,
            method: "",
            x: "1,2",
        };
        let allowed: &[&str] = match command {
            Command::Moments => &["partition", "nested", "monte-carlo"],
            Command::Dist => &["duality", "tw", "oracle", "monte-carlo"],
            Command::Laplace => &["series", "cauchy", "mellin-barnes"],
            Command::Compare => &["simulation", "exact"],
            _ => &[],
        };
        if let Some(m) = method {
            if !allowed.contains(&m) {
                return Err(CliError::Usage(format!(
                    "`{command}` has no method `{m}` (expected one of: {})",
                    allowed.join(", ")
                )));
            }
        }
        if let Some(first) = allowed.first() {
            d.method = first;
        }
        let chosen = method.unwrap_or(d.method);
        match (command, chosen) {
            (Command::Moments, "partition") => d.nodes = 128,
            (Command::Laplace, _) => {
                d.nodes = 128;
                d.k = 24;
            }
            (Command::Bose, _) => {
                d.t = 0.5;
                d.nodes = 128;
                d.x = "0,0";
            }
            (Command::Green, _) => d.t = 0.5,
            (Command::Compare, _) => d.t = 20.0,
            _ => {}
        }
        Ok(d)
    }
}

pub fn parse_list<T: std::str::FromStr>(key: &str, text: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("`{key}`: cannot parse `{v}` in `{text}`")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let file: RunConfig = serde_json::from_str(r#"{"p": 0.4, "t": 2.0, "method": "nested"}"#).unwrap();
        let flags = RunConfig {
            t: Some(0.5),
            ..Default::default()
        };
        let r = file.overridden_by(&flags).resolve(Command::Moments).unwrap();
        assert_eq!((r.p, r.t, r.k, r.nodes), (Some(0.4), Some(0.5), Some(3), Some(64)));
        assert_eq!(r.method.as_deref(), Some("nested"));
    }

    #[test]
    fn resolved_config_round_trips() {
        let r = RunConfig::default().resolve(Command::Dist).unwrap();
        let text = serde_json::to_string_pretty(&r).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
    }

    #[test]
    fn rejects_foreign_keys_and_methods() {
        let c = RunConfig {
            kappa: Some(1.0),
            ..Default::default()
        };
        assert!(c.resolve(Command::Moments).is_err());
        let c = RunConfig {
            method: Some("tw".into()),
            ..Default::default()
        };
        assert!(c.resolve(Command::Moments).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
    }
}
