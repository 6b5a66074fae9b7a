use clap::{Args, Parser, Subcommand, ValueEnum};
use npp_core::gibbs_mcmc::Kernel;
use npp_core::solvers::Algorithm;
use npp_core::Mode;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "npp-lab", version, about = "Random number partitioning laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Master seed; every trial seed is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the artifact here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Worker threads (default: $NPP_LAB_THREADS, else all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Run exhaustive operations beyond their default size guards.
    #[arg(long, global = true)]
    pub force: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve one instance with a chosen algorithm.
    Solve(SolveArgs),
    /// Mean overlap of algorithm outputs on correlated pairs over a rho grid.
    Stability(StabilityArgs),
    /// Input distance and output Hamming distance over a rho grid.
    StabilityProfile(StabilityArgs),
    /// List every state below the energy threshold 2^(-E).
    LandscapeEnumerate(EnumerateArgs),
    /// Count near ground state pairs inside an overlap band.
    OgpPairs(PairArgs),
    /// Search m-tuples of near ground states with pairwise overlaps in a band.
    OgpMtuple(MtupleArgs),
    /// Count local optima below the energy threshold.
    LocalOptima(LocalOptimaArgs),
    /// Exact Gibbs measure, region masses and free-energy-well ratios.
    Gibbs(GibbsArgs),
    /// Escape times of the single-flip chain from the ground state.
    McmcEscape(EscapeArgs),
    /// Evaluate the stable-algorithm parameter plan.
    Plan(PlanArgs),
}

#[derive(Args, Debug, Clone)]
pub struct InstanceArgs {
    /// Instance size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Read the instance from a JSON file instead of generating it.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Arithmetic: float, quantized or quantized:B.
    #[arg(long, default_value = "quantized", value_parser = parse_mode)]
    pub mode: Mode,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, default_value = "ldm", value_parser = parse_algo)]
    pub algo: Algorithm,
    /// Seed of the greedy scan order (default: derived from --seed).
    #[arg(long)]
    pub rng_seed: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct StabilityArgs {
    #[arg(long)]
    pub n: usize,
    /// Grid as start:stop:step, or a comma separated list.
    #[arg(long, default_value = "0.5:25:0.5", value_parser = parse_grid)]
    pub rho: Grid,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value = "ldm", value_parser = parse_algo)]
    pub algo: Algorithm,
}

#[derive(Args, Debug, Clone)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Energy exponent: keep states with normalized energy <= 2^(-E).
    #[arg(long)]
    pub en: f64,
}

#[derive(Args, Debug, Clone)]
pub struct PairArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value = "quantized", value_parser = parse_mode)]
    pub mode: Mode,
    /// Energy exponent (default eps*n).
    #[arg(long)]
    pub en: Option<f64>,
    /// Sets E = eps*n and the band's lower end from the first-moment rule.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Lower end of the band.
    #[arg(long)]
    pub lo: Option<f64>,
    /// Upper end of the band (default (n-2)/n).
    #[arg(long)]
    pub hi: Option<f64>,
    /// Use signed overlaps instead of |overlap|.
    #[arg(long)]
    pub signed: bool,
    /// Witness pairs kept per trial in JSON output.
    #[arg(long, default_value_t = 5)]
    pub max_witnesses: usize,
}

#[derive(Args, Debug, Clone)]
pub struct MtupleArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value = "quantized", value_parser = parse_mode)]
    pub mode: Mode,
    /// Energy exponent (default sqrt(n)).
    #[arg(long)]
    pub en: Option<f64>,
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    /// Band [beta - eta, beta].
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
    /// Explicit band ends; override beta and eta.
    #[arg(long)]
    pub lo: Option<f64>,
    #[arg(long)]
    pub hi: Option<f64>,
    /// Use |overlap| instead of signed overlaps.
    #[arg(long)]
    pub unsigned: bool,
    /// Interpolation parameter of each member's instance (default all 0).
    #[arg(long, value_delimiter = ',')]
    pub taus: Vec<f64>,
    /// Allow a state to appear more than once in a tuple.
    #[arg(long)]
    pub allow_repeats: bool,
}

#[derive(Args, Debug, Clone)]
pub struct LocalOptimaArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value = "quantized", value_parser = parse_mode)]
    pub mode: Mode,
    /// Threshold exponent as a fraction of n.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Threshold exponent; overrides --eps.
    #[arg(long)]
    pub en: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct GibbsArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Inverse temperature (default n*2^(n*eps)).
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 0.6)]
    pub eps: f64,
    /// Region boundary (default from the pair first-moment rule at eps).
    #[arg(long)]
    pub rho: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct EscapeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value = "quantized", value_parser = parse_mode)]
    pub mode: Mode,
    #[arg(long, default_value_t = 0.6)]
    pub eps: f64,
    /// Inverse temperatures (default 0, n, n*2^(n*eps/2), n*2^(n*eps)).
    #[arg(long, value_delimiter = ',')]
    pub betas: Vec<f64>,
    /// Step budget per chain; longer runs are censored.
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: u64,
    #[arg(long, default_value = "metropolis", value_parser = parse_kernel)]
    pub kernel: Kernel,
    /// Instead of escape times, run each chain from the ground state for
    /// this many steps and emit its trace.
    #[arg(long)]
    pub trace_steps: Option<u64>,
    /// Record every k-th step of a trace.
    #[arg(long, default_value_t = 1)]
    pub trace_every: u64,
}

#[derive(Args, Debug, Clone)]
pub struct PlanArgs {
    /// One value, or a comma separated list for a sweep.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub en: Vec<f64>,
    #[arg(long)]
    pub eps: f64,
    #[arg(long = "L")]
    pub l: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid(pub Vec<f64>);

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: npp_core::NppError| e.to_string())
}

fn parse_algo(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: npp_core::NppError| e.to_string())
}

fn parse_kernel(s: &str) -> Result<Kernel, String> {
    match s {
        "metropolis" => Ok(Kernel::Metropolis),
        "glauber" => Ok(Kernel::Glauber),
        _ => Err(format!("unknown kernel {s:?} (metropolis or glauber)")),
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?} in grid"));
    let parts: Vec<&str> = s.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, step] => {
            let (a, b, h) = (num(start)?, num(stop)?, num(step)?);
            if !(h > 0.0) || !a.is_finite() || !b.is_finite() || b < a {
                return Err(format!("grid {s:?} needs start <= stop and step > 0"));
            }
            let count = ((b - a) / h + 1e-9).floor() as usize + 1;
            (0..count).map(|k| a + k as f64 * h).collect()
        }
        [list] => list.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("grid {s:?} is neither start:stop:step nor a list")),
    };
    Ok(Grid(values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_grid_hits_both_ends() {
        let g = parse_grid("0.5:25:0.5").unwrap().0;
        assert_eq!(g.len(), 50);
        assert_eq!(g[0], 0.5);
        assert_eq!(g[49], 25.0);
        assert_eq!(parse_grid("1,2.5,4").unwrap().0, vec![1.0, 2.5, 4.0]);
        assert!(parse_grid("3:1:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
    }
}
