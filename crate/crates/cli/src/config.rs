use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "tcurv", version, about = "Verify curvature identities of the T-curvature family on coordinate charts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficient table of the 20 named presets.
    ListPresets {
        /// Dimension at which the coefficients are evaluated.
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run check suites on one manifold.
    Verify(VerifyArgs),
    /// Scan every preset pair for semisymmetry.
    Matrix(MatrixArgs),
    /// Dump the JSON spec of a built-in manifold.
    Describe {
        #[arg(long)]
        builtin: String,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

impl Command {
    pub fn format(&self) -> Format {
        self.output().format
    }

    pub fn out(&self) -> Option<&PathBuf> {
        self.output().out.as_ref()
    }

    fn output(&self) -> &OutputArgs {
        match self {
            Command::ListPresets { output, .. } | Command::Describe { output, .. } => output,
            Command::Verify(v) => &v.run.output,
            Command::Matrix(m) => &m.run.output,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Manifold source, sampling, tolerance and output shared by `verify` and `matrix`.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// Built-in manifold name.
    #[arg(long, group = "source", required_unless_present = "spec")]
    pub builtin: Option<String>,
    /// Manifold spec JSON file.
    #[arg(long, group = "source")]
    pub spec: Option<PathBuf>,
    /// Dimension of the built-in manifold.
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Number of sample points.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    /// Seed of the sample points.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Overrides every check tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Preset name for T_a (default R).
    #[arg(long, conflicts_with_all = ["coeffs_a", "semisym"])]
    pub preset_a: Option<String>,
    /// Preset name for T_b (default R).
    #[arg(long, conflicts_with_all = ["coeffs_b", "semisym"])]
    pub preset_b: Option<String>,
    /// Explicit coefficients a0,...,a7 (integers or fractions).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "semisym")]
    pub coeffs_a: Option<String>,
    /// Explicit coefficients b0,...,b7.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "semisym")]
    pub coeffs_b: Option<String>,
    /// Shorthand for `--suite semisym --preset-a A --preset-b B`.
    #[arg(long, num_args = 2, value_names = ["A", "B"], conflicts_with = "suite")]
    pub semisym: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Structure,
    Lemma,
    Flatness,
    Semisym,
    Ricci,
    All,
}

impl Suite {
    pub fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Structure => "structure",
            Suite::Lemma => "lemma",
            Suite::Flatness => "flatness",
            Suite::Semisym => "semisym",
            Suite::Ricci => "ricci",
            Suite::All => "all",
        }
    }
}
