//! Flag definitions and the small grammars they share: dimension specs like
//! `25`, `5x5`, or `31x11-oam-walsh`, and mode indices like `7` or `1,2`.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use qdirect_core::{DemoStateParams, Dims, NoiseMode};

#[derive(Parser, Debug)]
#[command(
    name = "qdirect",
    version,
    about = "Direct quantum-state measurement: projector decompositions, \
             simulated runs, reconstruction, and validation studies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decompose one column operator |a><j| into weighted projectors.
    Decompose(DecomposeArgs),
    /// Simulate a full measurement run and reconstruct the state.
    Run(RunArgs),
    /// Probability matrix, Schmidt spectrum, and diagonal phases of a state.
    Analyze(AnalyzeArgs),
    /// Mixed-state Monte Carlo study over a (dim, rank, purity) grid.
    Study(StudyArgs),
    /// Compare direct reconstruction against random-projection tomography.
    CrossValidate(CrossValidateArgs),
}

#[derive(clap::Args, Debug)]
pub struct DecomposeArgs {
    /// System shape: `N` for a single system or `AxB` for a joint one.
    #[arg(long)]
    pub dims: DimsSpec,
    /// Reference mode a: a flat index, or `a1,a2` on a joint system.
    #[arg(long = "ref")]
    pub reference: IndexSpec,
    /// Target mode j: a flat index, or `j1,j2` on a joint system.
    #[arg(long)]
    pub target: IndexSpec,
    #[arg(long, default_value = "0")]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(clap::Args, Debug)]
pub struct RunArgs {
    /// State file to measure; mutually exclusive with --demo.
    #[arg(long, conflicts_with = "demo")]
    pub state: Option<PathBuf>,
    /// Measure the built-in correlated-photon demo state.
    #[arg(long)]
    pub demo: bool,
    /// Demo shape: `DxD` (D odd) for a joint OAM subset, or
    /// `AxB-oam-walsh` for the full A-OAM-by-B-Walsh grid per photon.
    #[arg(long)]
    pub dims: Option<DimsSpec>,
    /// Override the reference mode instead of picking the most probable.
    #[arg(long = "ref")]
    pub reference: Option<IndexSpec>,
    #[arg(long, value_enum, default_value = "poisson")]
    pub noise: NoiseArg,
    /// Counts per second on a unit-probability projector.
    #[arg(long, default_value = "900")]
    pub rate: f64,
    /// Seconds spent on each off-diagonal projector.
    #[arg(long, default_value = "1")]
    pub t_off_diagonal: f64,
    /// Seconds spent on the monitor and each diagonal projector.
    #[arg(long, default_value = "20")]
    pub t_diagonal: f64,
    #[arg(long, default_value = "0")]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(clap::Args, Debug)]
pub struct AnalyzeArgs {
    /// Bipartite state file to analyze.
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long, default_value = "0")]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(clap::Args, Debug)]
pub struct StudyArgs {
    /// Study grid as JSON; defaults cover d in {4,16,64}, ranks {1,2,4},
    /// purities {0.25,0.5,0.7,0.85,1.0}.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(clap::Args, Debug)]
pub struct CrossValidateArgs {
    /// State file to validate; mutually exclusive with --demo.
    #[arg(long, conflicts_with = "demo")]
    pub state: Option<PathBuf>,
    /// Validate the built-in correlated-photon demo state.
    #[arg(long)]
    pub demo: bool,
    /// Demo shape, as in `run`.
    #[arg(long)]
    pub dims: Option<DimsSpec>,
    #[arg(long, value_enum, default_value = "poisson")]
    pub noise: NoiseArg,
    /// Direct-arm reference rate, counts per second.
    #[arg(long, default_value = "900")]
    pub rate: f64,
    #[arg(long, default_value = "1")]
    pub t_off_diagonal: f64,
    #[arg(long, default_value = "20")]
    pub t_diagonal: f64,
    #[arg(long, default_value = "8")]
    pub batches: usize,
    #[arg(long, default_value = "1000")]
    pub settings_per_batch: usize,
    /// Tomography-arm counts per second on a unit-probability projector.
    #[arg(long, default_value = "18000")]
    pub tomography_rate: f64,
    /// Tomography-arm seconds per setting.
    #[arg(long, default_value = "1")]
    pub integration_time: f64,
    #[arg(long, default_value = "0")]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum NoiseArg {
    Exact,
    Poisson,
}

impl From<NoiseArg> for NoiseMode {
    fn from(value: NoiseArg) -> Self {
        match value {
            NoiseArg::Exact => NoiseMode::Exact,
            NoiseArg::Poisson => NoiseMode::Poisson,
        }
    }
}

/// A system shape. `N` is a single system, `AxB` a joint pair of bare mode
/// counts, and `AxB-oam-walsh` a joint pair where each photon carries A OAM
/// values (A odd, centered on zero) times B Walsh values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimsSpec {
    Single(usize),
    Joint(usize, usize),
    OamWalsh { l_max: u32, k_max: u32 },
}

impl DimsSpec {
    pub fn dims(&self) -> Dims {
        match *self {
            DimsSpec::Single(d) => Dims::single(d),
            DimsSpec::Joint(d1, d2) => Dims::bipartite(d1, d2),
            DimsSpec::OamWalsh { l_max, k_max } => {
                let d = (2 * l_max as usize + 1) * (k_max as usize + 1);
                Dims::bipartite(d, d)
            }
        }
    }

    /// Demo-state parameters for this shape, when the shape names one.
    pub fn demo_params(&self) -> Result<DemoStateParams, String> {
        match *self {
            DimsSpec::OamWalsh { l_max, k_max } => {
                Ok(DemoStateParams { l_max, k_max, ..DemoStateParams::default() })
            }
            DimsSpec::Joint(d1, d2) if d1 == d2 && d1 % 2 == 1 => Ok(DemoStateParams {
                l_max: (d1 as u32 - 1) / 2,
                k_max: 0,
                ..DemoStateParams::default()
            }),
            DimsSpec::Joint(..) => Err(
                "a demo shape DxD needs equal odd sides (OAM values centered on zero); \
                 use AxB-oam-walsh for radial modes"
                    .into(),
            ),
            DimsSpec::Single(_) => Err("the demo state is bipartite; use DxD or AxB-oam-walsh".into()),
        }
    }
}

impl FromStr for DimsSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (body, oam_walsh) = match s.strip_suffix("-oam-walsh") {
            Some(body) => (body, true),
            None => (s, false),
        };
        let parse = |v: &str| -> Result<usize, String> {
            let n: usize = v.parse().map_err(|_| format!("bad dimension {v:?} in {s:?}"))?;
            if n == 0 {
                return Err(format!("zero dimension in {s:?}"));
            }
            Ok(n)
        };
        match body.split_once('x') {
            Some((a, b)) => {
                let (a, b) = (parse(a)?, parse(b)?);
                if oam_walsh {
                    if a % 2 == 0 {
                        return Err(format!(
                            "{s:?}: the OAM side must be odd (values -L..=L center on zero)"
                        ));
                    }
                    Ok(DimsSpec::OamWalsh { l_max: (a as u32 - 1) / 2, k_max: b as u32 - 1 })
                } else {
                    Ok(DimsSpec::Joint(a, b))
                }
            }
            None if oam_walsh => Err(format!("{s:?}: oam-walsh shapes are AxB-oam-walsh")),
            None => Ok(DimsSpec::Single(parse(body)?)),
        }
    }
}

/// A mode index: flat (`7`) or per-subsystem (`1,2`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexSpec {
    Flat(usize),
    Pair(usize, usize),
}

impl IndexSpec {
    /// Flat joint index under `dims`, validating subsystem bounds.
    pub fn flatten(&self, dims: Dims) -> Result<usize, String> {
        let flat = match *self {
            IndexSpec::Flat(i) => i,
            IndexSpec::Pair(a, b) => {
                if !dims.is_bipartite() {
                    return Err(format!(
                        "index {a},{b} is per-subsystem but the system is not bipartite"
                    ));
                }
                if a >= dims.d1 || b >= dims.d2 {
                    return Err(format!(
                        "index {a},{b} outside the {}x{} mode grid",
                        dims.d1, dims.d2
                    ));
                }
                dims.flatten(a, b)
            }
        };
        if flat >= dims.total() {
            return Err(format!("mode {flat} outside a {}-mode system", dims.total()));
        }
        Ok(flat)
    }
}

impl FromStr for IndexSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse =
            |v: &str| -> Result<usize, String> { v.parse().map_err(|_| format!("bad index {s:?}")) };
        match s.split_once(',') {
            Some((a, b)) => Ok(IndexSpec::Pair(parse(a)?, parse(b)?)),
            None => Ok(IndexSpec::Flat(parse(s)?)),
        }
    }
}
