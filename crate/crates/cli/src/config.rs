//! Experiment configuration. Three layers in increasing precedence:
//! built-in defaults, a flat `key = value` config file, CLI flags.

use anyhow::{anyhow, bail, Context, Result};
use bakerlab::hyper::GroupingMethod;
use bakerlab::perturb::{
    EvolveOptions, PerturbationSpec, StoragePrecision, DEFAULT_MEMORY_BUDGET,
};
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PerturbChoice {
    /// Opposite y-rotations by pi*alpha on the middle qubit.
    Rotation,
    /// Identity or a sigma_x flip of the rightmost qubit.
    XFlip,
}

impl fmt::Display for PerturbChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PerturbChoice::Rotation => "rotation",
            PerturbChoice::XFlip => "x-flip",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PrecisionChoice {
    Double,
    Single,
}

impl fmt::Display for PrecisionChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrecisionChoice::Double => "double",
            PrecisionChoice::Single => "single",
        })
    }
}

/// Per-experiment flag overrides; also the shape of the config file.
#[derive(clap::Args, Clone, Debug, Default)]
pub struct RunArgs {
    /// Total number of qubits N.
    #[arg(long = "N", value_name = "QUBITS")]
    pub n_qubits: Option<usize>,
    /// Map family index n (1 = single-qubit shift, N = full shift).
    #[arg(long = "n", value_name = "INDEX")]
    pub map_index: Option<usize>,
    /// Perturbation rotation strength.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Number of map iterations.
    #[arg(long = "t", value_name = "STEPS")]
    pub t_max: Option<usize>,
    /// First iteration reported by `s-series`.
    #[arg(long = "t-from", value_name = "STEPS")]
    pub t_from: Option<usize>,
    /// Seed for the stochastic searches.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Perturbation kind.
    #[arg(long, value_enum)]
    pub pert: Option<PerturbChoice>,
    /// Comma-separated grouping methods: temporal, genetic, exhaustive.
    #[arg(long)]
    pub grouping: Option<String>,
    /// History storage precision.
    #[arg(long, value_enum)]
    pub precision: Option<PrecisionChoice>,
    /// Cap on history storage, in bytes.
    #[arg(long = "memory-budget", value_name = "BYTES")]
    pub memory_budget: Option<u64>,
}

/// Config-file fields that are not per-experiment numbers.
#[derive(Clone, Debug, Default)]
pub struct FileConfig {
    pub args: RunArgs,
    pub out_dir: Option<PathBuf>,
    pub threads: Option<usize>,
}

pub fn parse_config_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    let mut fc = FileConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}:{}: expected `key = value`", path.display(), idx + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let loc = || format!("{}:{}: key `{}`", path.display(), idx + 1, key);
        match key {
            "N" => fc.args.n_qubits = Some(value.parse().with_context(loc)?),
            "n" => fc.args.map_index = Some(value.parse().with_context(loc)?),
            "alpha" => fc.args.alpha = Some(value.parse().with_context(loc)?),
            "t" => fc.args.t_max = Some(value.parse().with_context(loc)?),
            "t-from" => fc.args.t_from = Some(value.parse().with_context(loc)?),
            "seed" => fc.args.seed = Some(value.parse().with_context(loc)?),
            "pert" => fc.args.pert = Some(parse_pert(value).with_context(loc)?),
            "grouping" => fc.args.grouping = Some(value.to_string()),
            "precision" => fc.args.precision = Some(parse_precision(value).with_context(loc)?),
            "memory-budget" => fc.args.memory_budget = Some(value.parse().with_context(loc)?),
            "out-dir" => fc.out_dir = Some(PathBuf::from(value)),
            "threads" => fc.threads = Some(value.parse().with_context(loc)?),
            _ => bail!("{}:{}: unknown config key `{}`", path.display(), idx + 1, key),
        }
    }
    Ok(fc)
}

fn parse_pert(value: &str) -> Result<PerturbChoice> {
    match value {
        "rotation" => Ok(PerturbChoice::Rotation),
        "x-flip" => Ok(PerturbChoice::XFlip),
        _ => bail!("expected `rotation` or `x-flip`, got `{value}`"),
    }
}

fn parse_precision(value: &str) -> Result<PrecisionChoice> {
    match value {
        "double" => Ok(PrecisionChoice::Double),
        "single" => Ok(PrecisionChoice::Single),
        _ => bail!("expected `double` or `single`, got `{value}`"),
    }
}

fn parse_grouping(list: &str) -> Result<Vec<GroupingMethod>> {
    let mut methods = Vec::new();
    for item in list.split(',') {
        let m = match item.trim() {
            "temporal" => GroupingMethod::Temporal,
            "genetic" => GroupingMethod::Genetic,
            "exhaustive" => GroupingMethod::Exhaustive,
            other => bail!("unknown grouping method `{other}`"),
        };
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    if methods.is_empty() {
        bail!("grouping list is empty");
    }
    Ok(methods)
}

/// Fully resolved experiment settings.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n_qubits: usize,
    pub map_index: usize,
    pub alpha: f64,
    pub t_max: usize,
    pub t_from: usize,
    pub seed: u64,
    pub pert: PerturbChoice,
    pub grouping: Vec<GroupingMethod>,
    pub precision: PrecisionChoice,
    pub memory_budget: u64,
    pub out_dir: PathBuf,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n_qubits: 5,
            map_index: 1,
            alpha: 0.2,
            t_max: 8,
            t_from: 1,
            seed: 11,
            pert: PerturbChoice::Rotation,
            grouping: vec![GroupingMethod::Temporal, GroupingMethod::Genetic],
            precision: PrecisionChoice::Double,
            memory_budget: DEFAULT_MEMORY_BUDGET,
            out_dir: PathBuf::from("."),
            threads: None,
        }
    }
}

impl RunConfig {
    /// defaults <- config file <- flags, then the cheap invariants.
    pub fn resolve(
        file: Option<&FileConfig>,
        flags: &RunArgs,
        out_dir: Option<&PathBuf>,
        threads: Option<usize>,
    ) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(fc) = file {
            cfg.apply(&fc.args)?;
            if let Some(dir) = &fc.out_dir {
                cfg.out_dir = dir.clone();
            }
            if fc.threads.is_some() {
                cfg.threads = fc.threads;
            }
        }
        cfg.apply(flags)?;
        if let Some(dir) = out_dir {
            cfg.out_dir = dir.clone();
        }
        if threads.is_some() {
            cfg.threads = threads;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, args: &RunArgs) -> Result<()> {
        if let Some(v) = args.n_qubits {
            self.n_qubits = v;
        }
        if let Some(v) = args.map_index {
            self.map_index = v;
        }
        if let Some(v) = args.alpha {
            self.alpha = v;
        }
        if let Some(v) = args.t_max {
            self.t_max = v;
        }
        if let Some(v) = args.t_from {
            self.t_from = v;
        }
        if let Some(v) = args.seed {
            self.seed = v;
        }
        if let Some(v) = args.pert {
            self.pert = v;
        }
        if let Some(list) = &args.grouping {
            self.grouping = parse_grouping(list)?;
        }
        if let Some(v) = args.precision {
            self.precision = v;
        }
        if let Some(v) = args.memory_budget {
            self.memory_budget = v;
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        let histories = 1u128 << self.t_max.min(127);
        let bytes_per = match self.precision {
            PrecisionChoice::Double => 16u128,
            PrecisionChoice::Single => 8,
        };
        let needed = histories * (1u128 << self.n_qubits) * bytes_per;
        if needed > self.memory_budget as u128 {
            bail!(
                "t = {} needs 2^{} histories x dim 2^{} = {} bytes of history \
                 storage, over the {}-byte budget",
                self.t_max,
                self.t_max,
                self.n_qubits,
                needed,
                self.memory_budget
            );
        }
        Ok(())
    }

    /// Builds the perturbation; this is also where an even N meets the
    /// middle-qubit parity requirement.
    pub fn perturbation_spec(&self) -> Result<PerturbationSpec> {
        let spec = match self.pert {
            PerturbChoice::Rotation => {
                PerturbationSpec::middle_y_rotation(self.n_qubits, self.alpha)
            }
            PerturbChoice::XFlip => PerturbationSpec::last_qubit_flip(self.n_qubits),
        };
        Ok(spec?)
    }

    pub fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions {
            precision: match self.precision {
                PrecisionChoice::Double => StoragePrecision::Double,
                PrecisionChoice::Single => StoragePrecision::Single,
            },
            memory_budget: self.memory_budget,
        }
    }

    pub fn grouping_names(&self) -> String {
        self.grouping
            .iter()
            .map(|m| match m {
                GroupingMethod::Temporal => "temporal",
                GroupingMethod::Genetic => "genetic",
                GroupingMethod::Exhaustive => "exhaustive",
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Metadata echoed into every artifact. Execution knobs (out-dir,
    /// threads) are deliberately absent so reruns are byte-identical.
    pub fn meta_pairs(&self, command: &str) -> Vec<(String, String)> {
        vec![
            ("version".into(), crate::output::VERSION.into()),
            ("command".into(), command.into()),
            ("N".into(), self.n_qubits.to_string()),
            ("n".into(), self.map_index.to_string()),
            ("alpha".into(), self.alpha.to_string()),
            ("t".into(), self.t_max.to_string()),
            ("t-from".into(), self.t_from.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("pert".into(), self.pert.to_string()),
            ("grouping".into(), self.grouping_names()),
            ("precision".into(), self.precision.to_string()),
            ("memory-budget".into(), self.memory_budget.to_string()),
        ]
    }

    pub fn meta_json(&self, command: &str) -> serde_json::Value {
        serde_json::json!({
            "version": crate::output::VERSION,
            "command": command,
            "config": {
                "N": self.n_qubits,
                "n": self.map_index,
                "alpha": self.alpha,
                "t": self.t_max,
                "t-from": self.t_from,
                "seed": self.seed,
                "pert": self.pert.to_string(),
                "grouping": self.grouping_names(),
                "precision": self.precision.to_string(),
                "memory-budget": self.memory_budget,
            },
        })
    }
}
