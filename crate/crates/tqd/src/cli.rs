use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tqd_core::denseq::LogBase;
use tqd_core::lattice::Geometry;

#[derive(Debug, Parser)]
#[command(name = "tqd", version, about = "Finite-lattice reports on the total quantum dimension")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Log base (`2` or `e`) for the headline entropy of index, tee, chi and correlation.
    #[arg(long, global = true, default_value = "2")]
    pub base: LogBase,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Index of the two-blob configuration as a quotient of Pauli classes.
    Index(IndexArgs),
    /// Eve's probe family and Alice/Bob's charge measurements.
    Verify(VerifyArgs),
    /// Topological entanglement entropy from stabilizer entropies.
    Tee(TeeArgs),
    /// Fusion-tree counts and quantum dimensions.
    Fusion(FusionArgs),
    /// Conditional expectation, Pimsner-Popa, Stinespring and entropy-gain checks.
    Channel(ChannelArgs),
    /// Holevo information of the code ensemble on a dense lattice.
    Chi(ChiArgs),
    /// Irreducible correlation from the max-entropy solver.
    Correlation(CorrelationArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LatticeArgs {
    #[arg(long, default_value = "torus")]
    pub geometry: Geometry,
    #[arg(long = "L", short = 'L', default_value_t = 8)]
    #[serde(rename = "L")]
    pub l: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BlobArgs {
    /// Layout document (JSON); overrides the blob flags.
    #[arg(long)]
    pub layout: Option<PathBuf>,
    /// Blob centres as `r,c;r,c`.
    #[arg(long)]
    pub centers: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub radius: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IndexArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub lattice: LatticeArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub blobs: BlobArgs,
    #[arg(long, default_value_t = 3)]
    pub dmax: usize,
    /// Let Eve measure any Pauli on E.
    #[arg(long)]
    pub unrestricted: bool,
    /// Also report the smallest box size whose stabilizers reveal a charge.
    #[arg(long)]
    pub threshold: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub lattice: LatticeArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub blobs: BlobArgs,
    #[arg(long, default_value_t = 3)]
    pub dmax: usize,
    /// Number of sampled two-box unions.
    #[arg(long, default_value_t = 32)]
    pub samples: usize,
    /// Add the loop around Alice's blob to Eve's probes.
    #[arg(long)]
    pub encircle: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TeeShape {
    /// Three-sector disk.
    Kp,
    /// Annulus with cuts.
    Lw,
    /// Area-law fit over squares and one annulus.
    Annulus,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TeeArgs {
    #[arg(long = "L", short = 'L', default_value_t = 12)]
    #[serde(rename = "L")]
    pub l: usize,
    #[arg(long, value_enum, default_value_t = TeeShape::Annulus)]
    pub layout: TeeShape,
    /// Centre vertex as `r,c`; defaults to the middle of the lattice.
    #[arg(long)]
    pub center: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub radius: usize,
    #[arg(long, default_value_t = 1)]
    pub inner: usize,
    #[arg(long, default_value_t = 3)]
    pub outer: usize,
    /// Largest square side in the area-law fit.
    #[arg(long)]
    pub max_side: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FusionArgs {
    /// Built-in model: fibonacci, toric or trivial.
    #[arg(long, default_value = "fibonacci")]
    pub model: String,
    /// Fusion model document (JSON); overrides --model.
    #[arg(long)]
    pub model_file: Option<PathBuf>,
    #[arg(long = "nA", default_value_t = 30)]
    #[serde(rename = "nA")]
    pub n_a: usize,
    #[arg(long = "nE", default_value_t = 30)]
    #[serde(rename = "nE")]
    pub n_e: usize,
    #[arg(long = "nB", default_value_t = 30)]
    #[serde(rename = "nB")]
    pub n_b: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ChannelArgs {
    /// Multiplicity of the system factor (even).
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Random positive operators for the Pimsner-Popa test.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Random POVMs in the entropy-gain search.
    #[arg(long, default_value_t = 1000)]
    pub restarts: usize,
    /// Local-ascent steps per POVM.
    #[arg(long, default_value_t = 4)]
    pub ascent: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ChiArgs {
    #[arg(long = "L", short = 'L', default_value_t = 3)]
    #[serde(rename = "L")]
    pub l: usize,
    /// Layout document (JSON); defaults to two cells a knight's move apart.
    #[arg(long)]
    pub layout: Option<PathBuf>,
    /// Code states to include, e.g. `0,X,Z,Y`.
    #[arg(long, default_value = "0,X,Z,Y")]
    pub states: String,
    /// Sampled Paulis on Alice's blob for the superposition test.
    #[arg(long, default_value_t = 200)]
    pub probes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatePreset {
    /// Uniform mixture of even-parity bit strings.
    EvenParity,
    /// `|0…0⟩`.
    Product,
    Bell,
    Ghz,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CorrelationArgs {
    #[arg(long, value_enum, default_value_t = StatePreset::EvenParity)]
    pub state: StatePreset,
    /// Density matrix document `{"n": .., "re": [[..]], "im": [[..]]}`; overrides --state.
    #[arg(long)]
    pub state_file: Option<PathBuf>,
    /// Number of qubits for presets.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Marginal order; defaults to the number of qubits.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
}
