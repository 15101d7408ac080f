use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "qcwb", version, about = "Embedded-Hamiltonian workbench")]
pub struct Cli {
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Write CSV instead of JSON.
    #[arg(long, global = true)]
    pub csv: bool,

    /// Seed for every stochastic step.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for sweeps and batched evaluations.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues and occupation-basis decompositions.
    Spectrum(SpectrumArgs),
    /// Jordan-Wigner qubit Hamiltonian.
    Jw(JwArgs),
    /// Phase estimation of the reference state.
    Qpe(QpeArgs),
    /// QPE over a grid of ancilla and Trotter counts.
    QpeSweep(QpeSweepArgs),
    /// UCCSD-VQE.
    Vqe(VqeArgs),
    /// VQE with growing prefixes of the ansatz.
    VqeTerms(VqeArgs),
    /// Best Clifford-angle assignment of the ansatz parameters.
    VqeWarmstart(WarmStartArgs),
    /// Histogram of absolute Pauli coefficients.
    CoeffHist(CoeffHistArgs),
    /// Minimum shot counts for a target standard deviation.
    Shots(ShotsArgs),
    /// Gate counts and depth of a synthesized circuit.
    Metrics(MetricsArgs),
    /// Surface-code footprint and runtime.
    Resources(ResourcesArgs),
    /// Resource estimates over physical error rates.
    ErrorSweep(ErrorSweepArgs),
    /// Qubits against runtime over factory counts.
    Frontier(FrontierArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Jw(_) => "jw",
            Command::Qpe(_) => "qpe",
            Command::QpeSweep(_) => "qpe-sweep",
            Command::Vqe(_) => "vqe",
            Command::VqeTerms(_) => "vqe-terms",
            Command::VqeWarmstart(_) => "vqe-warmstart",
            Command::CoeffHist(_) => "coeff-hist",
            Command::Shots(_) => "shots",
            Command::Metrics(_) => "metrics",
            Command::Resources(_) => "resources",
            Command::ErrorSweep(_) => "error-sweep",
            Command::Frontier(_) => "frontier",
        }
    }
}

/// Hamiltonian input: an FCIDUMP file or a Pauli text file.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Input {
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,

    /// Electron count for Pauli text inputs (FCIDUMP files carry their own).
    #[arg(long)]
    pub electrons: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub input: Input,

    /// Smallest amplitude magnitude listed in decompositions.
    #[arg(long, default_value_t = 1e-3)]
    pub threshold: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct JwArgs {
    #[command(flatten)]
    pub input: Input,

    /// Write `<coeff> <axes>` lines instead of JSON.
    #[arg(long)]
    pub text: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScaleArgs {
    /// Spectral scale in Hartree; defaults to 1.02·max|λ| from exact diagonalization.
    #[arg(long)]
    pub scale: Option<f64>,

    /// Spectral shift in Hartree.
    #[arg(long, default_value_t = 0.0)]
    pub shift: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct QpeArgs {
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub scale: ScaleArgs,

    #[arg(long, default_value_t = 10)]
    pub ancilla: usize,

    #[arg(long, default_value_t = 1)]
    pub trotter: usize,

    /// Ancilla samples; 0 reads the exact distribution.
    #[arg(long, default_value_t = 0)]
    pub shots: u64,
}

/// Inclusive integer range written `a..b`, or a single value.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Span {
    pub start: u64,
    pub end: u64,
}

impl Span {
    pub fn values(&self) -> Vec<u64> {
        (self.start..=self.end).collect()
    }
}

pub fn parse_span(s: &str) -> Result<Span, String> {
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("bad integer {t:?} in range {s:?}"));
    let (start, end) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if start > end {
        return Err(format!("empty range {s:?}"));
    }
    Ok(Span { start, end })
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct QpeSweepArgs {
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub scale: ScaleArgs,

    #[arg(long, value_parser = parse_span, default_value = "4..10")]
    pub ancilla: Span,

    #[arg(long, value_parser = parse_span, default_value = "1..4")]
    pub trotter: Span,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerArg {
    Sqp,
    NelderMead,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingArg {
    Independent,
    Merged,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AnsatzArgs {
    /// Parameter sharing between α and β excitations.
    #[arg(long, value_enum, default_value = "independent")]
    pub pairing: PairingArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VqeArgs {
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub ansatz: AnsatzArgs,

    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,

    #[arg(long, value_enum, default_value = "sqp")]
    pub optimizer: OptimizerArg,

    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,

    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,

    /// Target standard deviation of sampled energies.
    #[arg(long, default_value_t = 1.6e-3)]
    pub epsilon: f64,

    /// Standard deviation of a seeded perturbation of the zero start.
    #[arg(long, default_value_t = 0.0)]
    pub jitter: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WarmStartArgs {
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub ansatz: AnsatzArgs,

    /// Grid angles in radians; the Clifford angles {0, π/2, π, 3π/2} by default.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CoeffHistArgs {
    #[command(flatten)]
    pub input: Input,

    #[arg(long, default_value_t = 20)]
    pub bins: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupArg {
    None,
    Qubitwise,
    General,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ShotsArgs {
    #[command(flatten)]
    pub input: Input,

    #[arg(long, default_value_t = 1.6e-3)]
    pub epsilon: f64,

    #[arg(long, value_enum, default_value = "qubitwise")]
    pub group: GroupArg,

    /// Sampled estimates on the sector ground state used to check the plan.
    #[arg(long)]
    pub validate: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KindArg {
    Uccsd,
    Qpe,
    Trotter,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisArg {
    CliffordRz,
    CliffordT,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MetricsArgs {
    /// Hamiltonian input; not needed for `--kind uccsd --active`.
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,

    #[arg(long)]
    pub electrons: Option<usize>,

    /// Circuit text file measured as is.
    #[arg(long, conflicts_with_all = ["input", "active"])]
    pub circuit: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "uccsd")]
    pub kind: KindArg,

    /// Active space `electrons/orbitals` for synthesis without an input file.
    #[arg(long)]
    pub active: Option<String>,

    #[command(flatten)]
    pub ansatz: AnsatzArgs,
    #[command(flatten)]
    pub scale: ScaleArgs,

    #[arg(long, default_value_t = 10)]
    pub ancilla: usize,

    #[arg(long, default_value_t = 1)]
    pub trotter: usize,

    #[arg(long, value_enum, default_value = "clifford-rz")]
    pub basis: BasisArg,

    /// Synthesis precision per arbitrary rotation (Clifford+T only).
    #[arg(long, default_value_t = 1e-10)]
    pub rz_precision: f64,
}

/// Source of the logical circuit costed by the resource model.
#[derive(Debug, Clone, Args, Serialize)]
pub struct WorkloadArgs {
    /// Hamiltonian whose QPE circuit is costed.
    #[arg(long = "in", value_name = "PATH", required_unless_present = "metrics")]
    pub input: Option<PathBuf>,

    #[arg(long)]
    pub electrons: Option<usize>,

    /// Metrics JSON written by `metrics --basis clifford-t`.
    #[arg(long, conflicts_with = "input")]
    pub metrics: Option<PathBuf>,

    #[command(flatten)]
    pub scale: ScaleArgs,

    #[arg(long, default_value_t = 10)]
    pub ancilla: usize,

    #[arg(long, default_value_t = 1)]
    pub trotter: usize,

    #[arg(long, default_value_t = 1e-10)]
    pub rz_precision: f64,

    /// Logical qubits; the circuit width by default.
    #[arg(long)]
    pub logical_qubits: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 50.0)]
    pub gate_time_ns: f64,

    #[arg(long, default_value_t = 100.0)]
    pub measure_time_ns: f64,

    #[arg(long, default_value_t = 1e-4)]
    pub p_phys: f64,

    #[arg(long, default_value_t = 1e-2)]
    pub p_threshold: f64,

    #[arg(long, default_value_t = 0.1)]
    pub prefactor: f64,

    #[arg(long, default_value_t = 1e-3)]
    pub target_error: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ResourcesArgs {
    #[command(flatten)]
    pub workload: WorkloadArgs,
    #[command(flatten)]
    pub model: ModelArgs,

    #[arg(long, default_value_t = 1)]
    pub factories: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ErrorSweepArgs {
    #[command(flatten)]
    pub workload: WorkloadArgs,
    #[command(flatten)]
    pub model: ModelArgs,

    #[arg(long, default_value_t = 1)]
    pub factories: u64,

    #[arg(long, value_delimiter = ',', default_value = "1e-5,1e-6,1e-7,1e-8")]
    pub p_list: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FrontierArgs {
    #[command(flatten)]
    pub workload: WorkloadArgs,
    #[command(flatten)]
    pub model: ModelArgs,

    #[arg(long = "factory-range", value_parser = parse_span, default_value = "1..16")]
    pub factories: Span,
}
