//! Flags and JSON config files. Every setting is optional in both sources;
//! a flag wins over the file.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Deserialize;
use upg_core::bubble::{BetaPolicy, BubbleFamily};
use upg_core::solver1d::DiscretizationConfig;
use upg_core::study::{Delta, EpsilonPolicy, ProblemId};

/// Raised for anything the user can fix by changing the invocation.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Solve1d,
    Solve2d,
    Study,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BubbleArg {
    Exponential,
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Md,
    Svg,
}

/// Upwind Petrov-Galerkin solver for convection-diffusion problems with
/// boundary layers.
#[derive(Debug, Clone, Default, Parser, Deserialize)]
#[command(name = "upg", version, about)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    /// What to run.
    #[arg(long, value_enum)]
    pub command: Option<CommandKind>,

    /// f1, ex, xex or zero (1D); example1 or example2 (2D).
    #[arg(long)]
    pub problem: Option<String>,

    /// Diffusion coefficient; required unless the policy ties it to h.
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// fixed, h2 (eps = h^2) or scaled:C (eps = C h^2).
    #[arg(long)]
    pub epsilon_policy: Option<String>,

    /// Mesh size, or a comma-separated list for studies.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,

    /// Powers of two `A..B`, both ends included, e.g. 32..1024.
    #[arg(long)]
    pub n_range: Option<String>,

    #[arg(long, value_enum)]
    pub bubble: Option<BubbleArg>,

    /// `special` or a positive number (quadratic bubble only).
    #[arg(long)]
    pub beta: Option<String>,

    /// Outflow strips to exclude: `h` or numbers, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub delta: Option<Vec<String>>,

    /// 2D only: width of the excluded wall strips in units of sqrt(eps).
    #[arg(long)]
    pub wall_margin: Option<f64>,

    #[arg(long)]
    pub out_dir: Option<PathBuf>,

    #[arg(long, value_enum, value_delimiter = ',')]
    pub formats: Option<Vec<Format>>,

    /// JSON file with any of the settings above (kebab-case keys).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Testing hook for `verify`: add this to the system matrix diagonal.
    #[arg(long, hide = true)]
    pub perturb_diagonal: Option<f64>,
}

impl Settings {
    /// Fill unset flags from the config file, if one is named.
    pub fn resolve(self) -> anyhow::Result<Self> {
        match self.config.clone() {
            Some(path) => Ok(self.over(load_file(&path)?)),
            None => Ok(self),
        }
    }

    fn over(self, file: Settings) -> Self {
        Self {
            command: self.command.or(file.command),
            problem: self.problem.or(file.problem),
            epsilon: self.epsilon.or(file.epsilon),
            epsilon_policy: self.epsilon_policy.or(file.epsilon_policy),
            n: self.n.or(file.n),
            n_range: self.n_range.or(file.n_range),
            bubble: self.bubble.or(file.bubble),
            beta: self.beta.or(file.beta),
            delta: self.delta.or(file.delta),
            wall_margin: self.wall_margin.or(file.wall_margin),
            out_dir: self.out_dir.or(file.out_dir),
            formats: self.formats.or(file.formats),
            config: self.config,
            perturb_diagonal: self.perturb_diagonal.or(file.perturb_diagonal),
        }
    }

    pub fn command_kind(&self) -> anyhow::Result<CommandKind> {
        self.command.ok_or_else(|| usage("--command is required (solve1d, solve2d, study or verify)"))
    }

    pub fn problem(&self, default: Option<ProblemId>) -> anyhow::Result<ProblemId> {
        match (&self.problem, default) {
            (Some(p), _) => ProblemId::parse(p).map_err(|e| usage(e.to_string())),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(usage("--problem is required")),
        }
    }

    pub fn epsilon_policy(&self) -> anyhow::Result<EpsilonPolicy> {
        let policy = self.epsilon_policy.as_deref().unwrap_or("fixed");
        let parsed = match policy {
            "fixed" => EpsilonPolicy::Fixed(self.epsilon.ok_or_else(|| usage("--epsilon is required"))?),
            "h2" => EpsilonPolicy::HSquared,
            other => match other.strip_prefix("scaled:").map(str::parse::<f64>) {
                Some(Ok(c)) => EpsilonPolicy::Scaled(c),
                _ => return Err(usage(format!("unknown epsilon policy `{other}`"))),
            },
        };
        match parsed {
            EpsilonPolicy::Fixed(v) | EpsilonPolicy::Scaled(v) if !(v > 0.0 && v.is_finite()) => {
                Err(usage(format!("epsilon must be positive, got {v}")))
            }
            p => Ok(p),
        }
    }

    /// Single mesh size for the solve commands.
    pub fn single_n(&self) -> anyhow::Result<usize> {
        match self.n.as_deref() {
            Some([n]) if *n >= 2 => Ok(*n),
            Some([n]) => Err(usage(format!("--n must be at least 2, got {n}"))),
            Some(_) => Err(usage("solve commands take a single --n")),
            None => Err(usage("--n is required")),
        }
    }

    /// Mesh sequence for studies, from `--n-range` or an `--n` list.
    pub fn meshes(&self) -> anyhow::Result<Vec<usize>> {
        if let Some(range) = &self.n_range {
            return parse_range(range);
        }
        match &self.n {
            Some(list) if list.len() >= 2 => Ok(list.clone()),
            _ => Err(usage("studies need --n-range or at least two --n values")),
        }
    }

    pub fn discretization(&self) -> anyhow::Result<DiscretizationConfig> {
        let beta = match self.beta.as_deref() {
            None | Some("special") => BetaPolicy::Special,
            Some(b) => match b.parse::<f64>() {
                Ok(v) if v > 0.0 && v.is_finite() => BetaPolicy::Fixed(v),
                _ => return Err(usage(format!("--beta must be `special` or a positive number, got `{b}`"))),
            },
        };
        match self.bubble.unwrap_or(BubbleArg::Quadratic) {
            BubbleArg::Exponential if beta != BetaPolicy::Special => {
                Err(usage("--beta only applies to the quadratic bubble"))
            }
            BubbleArg::Exponential => Ok(DiscretizationConfig::exponential()),
            BubbleArg::Quadratic => Ok(DiscretizationConfig { family: BubbleFamily::Quadratic, beta }),
        }
    }

    /// `None` keeps the problem's default.
    pub fn deltas(&self) -> anyhow::Result<Option<Vec<Delta>>> {
        let Some(list) = &self.delta else { return Ok(None) };
        list.iter()
            .map(|d| match d.as_str() {
                "h" => Ok(Delta::MeshWidth),
                s => match s.parse::<f64>() {
                    Ok(v) if (0.0..1.0).contains(&v) => Ok(Delta::Fixed(v)),
                    _ => Err(usage(format!("--delta entries must be `h` or lie in [0, 1), got `{s}`"))),
                },
            })
            .collect::<anyhow::Result<Vec<_>>>()
            .map(Some)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from("upg-out"))
    }

    pub fn formats(&self) -> Vec<Format> {
        self.formats.clone().unwrap_or_else(|| vec![Format::Csv, Format::Md])
    }
}

fn load_file(path: &Path) -> anyhow::Result<Settings> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
}

fn parse_range(s: &str) -> anyhow::Result<Vec<usize>> {
    let bad = || usage(format!("--n-range must look like 32..1024 with power-of-two ends, got `{s}`"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a < 2 || b <= a || !a.is_power_of_two() || !b.is_power_of_two() {
        return Err(bad());
    }
    Ok(std::iter::successors(Some(a), |&n| Some(2 * n)).take_while(|&n| n <= b).collect())
}
