//! The `qmaj` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::grids::{
    parse_angle, two_obs_families, ALPHA_GRID, LAMBDA1_GRID, THETA_GRID, THREE_OBS_ALPHA_GRID,
};
use super::output::{Dataset, Format};
use super::{
    bench_dataset, sweep_entropy_three, sweep_entropy_two, sweep_majorization, tightness_dataset,
    verify_random_with_tol, SweepKind, SweepSpec, VerifyReport,
};
use crate::bench::BenchConfig;
use crate::error::{Error, Result};
use crate::majorization::ANALYTIC_TOL;

#[derive(Debug, Parser)]
#[command(
    name = "qmaj",
    version,
    about = "Majorization and entropic uncertainty bounds for qubit states"
)]
struct Cli {
    /// Output file; standard output when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Tolerance of the majorization and inequality checks.
    #[arg(long, global = true, value_name = "X")]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Grid {
    Paper,
}

#[derive(Debug, Args)]
struct StateGridArgs {
    /// Comma-separated mixing weights λ₁.
    #[arg(
        long,
        value_delimiter = ',',
        value_name = "LIST",
        conflicts_with = "lambda1_grid"
    )]
    lambda1: Vec<f64>,
    #[arg(long, value_enum)]
    lambda1_grid: Option<Grid>,
    /// Comma-separated state angles, e.g. `0,pi/12,5pi/12`.
    #[arg(long, value_delimiter = ',', value_parser = angle, value_name = "LIST", conflicts_with = "alpha_grid")]
    alpha: Vec<f64>,
    #[arg(long, value_enum)]
    alpha_grid: Option<Grid>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Bench settings as `key = value` lines; flags below take precedence.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Relative intensity noise.
    #[arg(long, value_name = "X")]
    noise: Option<f64>,
    /// Readings per projector.
    #[arg(long, value_name = "N")]
    repeats: Option<usize>,
    /// Half-wave plate retardance error, radians.
    #[arg(long, value_name = "X")]
    retardance_hwp: Option<f64>,
    /// Quarter-wave plate retardance error, radians.
    #[arg(long, value_name = "X")]
    retardance_qwp: Option<f64>,
}

impl BenchArgs {
    fn any(&self) -> bool {
        self.config.is_some()
            || self.noise.is_some()
            || self.repeats.is_some()
            || self.retardance_hwp.is_some()
            || self.retardance_qwp.is_some()
    }

    fn resolve(&self) -> Result<BenchConfig> {
        let mut cfg = match &self.config {
            Some(path) => BenchConfig::load(path)?,
            None => BenchConfig::default(),
        };
        if let Some(x) = self.noise {
            cfg.noise_rel = x;
        }
        if let Some(n) = self.repeats {
            cfg.repeats = n;
        }
        if let Some(x) = self.retardance_hwp {
            cfg.retardance_err_hwp = x;
        }
        if let Some(x) = self.retardance_qwp {
            cfg.retardance_err_qwp = x;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Preset {
    /// All reference grids of the dataset.
    Paper,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lorenz curves of the σx, σy, σz probabilities against their bound.
    SweepMajorization {
        #[command(flatten)]
        grid: StateGridArgs,
        #[arg(long, value_enum, conflicts_with_all = ["lambda1", "lambda1_grid", "alpha", "alpha_grid"])]
        preset: Option<Preset>,
        /// Add simulated-bench points with error bars.
        #[arg(long)]
        bench: bool,
        #[command(flatten)]
        bench_args: BenchArgs,
    },
    /// Entropy sum of σz and X(θ) against the two pair bounds.
    SweepEntropy2 {
        #[command(flatten)]
        grid: StateGridArgs,
        /// Comma-separated observable angles in (0, pi/2].
        #[arg(long, value_delimiter = ',', value_parser = angle, value_name = "LIST", conflicts_with = "theta_grid")]
        theta: Vec<f64>,
        #[arg(long, value_enum)]
        theta_grid: Option<Grid>,
        #[arg(long, value_enum, conflicts_with_all = ["lambda1", "lambda1_grid", "alpha", "alpha_grid", "theta", "theta_grid"])]
        preset: Option<Preset>,
    },
    /// Entropy sum of σx, σy, σz against the four lower bounds.
    SweepEntropy3 {
        #[command(flatten)]
        grid: StateGridArgs,
        #[arg(long, value_enum, conflicts_with_all = ["lambda1", "lambda1_grid", "alpha", "alpha_grid"])]
        preset: Option<Preset>,
    },
    /// Check every relation on random states; exit status 1 on any violation.
    Verify {
        #[arg(long, default_value_t = 100_000, value_name = "N")]
        samples: usize,
    },
    /// Maximize each Lorenz partial sum over states of a fixed spectrum.
    Tightness {
        #[arg(long, value_delimiter = ',', required = true, value_name = "LIST")]
        lambda1: Vec<f64>,
        /// Polar steps of the starting grid.
        #[arg(long, default_value_t = 256, value_name = "N")]
        resolution: usize,
    },
    /// Simulated polarization bench: tomography, fidelity and bound check.
    BenchSim {
        #[command(flatten)]
        grid: StateGridArgs,
        #[command(flatten)]
        bench_args: BenchArgs,
    },
}

fn angle(text: &str) -> std::result::Result<f64, String> {
    parse_angle(text)
        .ok_or_else(|| format!("'{text}' is not an angle (examples: 0.5, pi/12, 5pi/12)"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputTarget {
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// A fully resolved command.
#[derive(Debug, Clone, PartialEq)]
pub enum Invocation {
    /// One or more sweeps whose rows are concatenated into one dataset.
    Sweep(Vec<SweepSpec>),
    Verify {
        samples: usize,
        seed: u64,
        tol: f64,
        output: OutputTarget,
    },
    Tightness {
        lambda1: Vec<f64>,
        resolution: usize,
        output: OutputTarget,
    },
}

#[derive(Debug)]
pub enum CliError {
    /// Rejected by the argument parser; carries clap's usage message.
    Usage(clap::Error),
    Invalid(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Invalid(e)
    }
}

fn state_lists(grid: &StateGridArgs) -> Result<(Vec<f64>, Vec<f64>)> {
    let lambda1 = match grid.lambda1_grid {
        Some(Grid::Paper) => LAMBDA1_GRID.to_vec(),
        None => grid.lambda1.clone(),
    };
    let alpha = match grid.alpha_grid {
        Some(Grid::Paper) => ALPHA_GRID.to_vec(),
        None => grid.alpha.clone(),
    };
    if lambda1.is_empty() {
        return Err(Error::InvalidSpec(
            "one of --lambda1 or --lambda1-grid is required".into(),
        ));
    }
    if alpha.is_empty() {
        return Err(Error::InvalidSpec(
            "one of --alpha or --alpha-grid is required".into(),
        ));
    }
    Ok((lambda1, alpha))
}

/// Parses `argv` (including the program name) into an [`Invocation`].
pub fn parse_cli<I, T>(argv: I) -> std::result::Result<Invocation, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(CliError::Usage)?;
    let tol = cli.tol.unwrap_or(ANALYTIC_TOL);
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(
            Error::InvalidSpec(format!("--tol {tol} must be finite and non-negative")).into(),
        );
    }
    let output = OutputTarget {
        path: cli.out.clone(),
        format: cli.format,
    };
    let base = |kind, lambda1_list, alpha_list| SweepSpec {
        seed: cli.seed.unwrap_or(0),
        output_path: cli.out.clone(),
        format: cli.format,
        tol,
        ..SweepSpec::new(kind, lambda1_list, alpha_list)
    };

    let specs = match cli.command {
        Command::SweepMajorization {
            grid,
            preset,
            bench,
            bench_args,
        } => {
            if !bench && bench_args.any() {
                return Err(Error::InvalidSpec("bench options require --bench".into()).into());
            }
            let (l, a) = match preset {
                Some(Preset::Paper) => (LAMBDA1_GRID.to_vec(), ALPHA_GRID.to_vec()),
                None => state_lists(&grid)?,
            };
            let mut spec = base(SweepKind::Majorization3, l, a);
            if bench {
                let cfg = bench_args.resolve()?;
                spec.seed = cli.seed.unwrap_or(cfg.seed);
                spec.bench = Some(cfg);
            }
            vec![spec]
        }
        Command::SweepEntropy2 {
            grid,
            theta,
            theta_grid,
            preset,
        } => match preset {
            Some(Preset::Paper) => two_obs_families()
                .into_iter()
                .map(|f| SweepSpec {
                    theta_list: f.theta,
                    ..base(SweepKind::Entropy2, f.lambda1, f.alpha)
                })
                .collect(),
            None => {
                let (l, a) = state_lists(&grid)?;
                let theta_list = match theta_grid {
                    Some(Grid::Paper) => THETA_GRID.to_vec(),
                    None if theta.is_empty() => {
                        return Err(Error::InvalidSpec(
                            "one of --theta or --theta-grid is required".into(),
                        )
                        .into())
                    }
                    None => theta,
                };
                vec![SweepSpec {
                    theta_list,
                    ..base(SweepKind::Entropy2, l, a)
                }]
            }
        },
        Command::SweepEntropy3 { grid, preset } => {
            let (l, a) = match preset {
                Some(Preset::Paper) => (LAMBDA1_GRID.to_vec(), THREE_OBS_ALPHA_GRID.to_vec()),
                None => state_lists(&grid)?,
            };
            vec![base(SweepKind::Entropy3, l, a)]
        }
        Command::BenchSim { grid, bench_args } => {
            let (l, a) = state_lists(&grid)?;
            let cfg = bench_args.resolve()?;
            let mut spec = base(SweepKind::Bench, l, a);
            spec.seed = cli.seed.unwrap_or(cfg.seed);
            spec.bench = Some(cfg);
            vec![spec]
        }
        Command::Verify { samples } => {
            if samples == 0 {
                return Err(Error::InvalidSpec("--samples must be at least 1".into()).into());
            }
            return Ok(Invocation::Verify {
                samples,
                seed: cli.seed.unwrap_or(0),
                tol,
                output,
            });
        }
        Command::Tightness {
            lambda1,
            resolution,
        } => {
            if let Some(&l) = lambda1.iter().find(|l| !(0.0..=0.5).contains(*l)) {
                return Err(
                    Error::InvalidSpec(format!("lambda1 = {l} is outside [0, 0.5]")).into(),
                );
            }
            if resolution == 0 {
                return Err(Error::InvalidSpec("--resolution must be at least 1".into()).into());
            }
            return Ok(Invocation::Tightness {
                lambda1,
                resolution,
                output,
            });
        }
    };
    for s in &specs {
        s.validate()?;
    }
    Ok(Invocation::Sweep(specs))
}

fn run_sweep(spec: &SweepSpec) -> Result<Dataset> {
    match spec.kind {
        SweepKind::Majorization3 => sweep_majorization(spec),
        SweepKind::Entropy2 => sweep_entropy_two(spec),
        SweepKind::Entropy3 => sweep_entropy_three(spec),
        SweepKind::Bench => bench_dataset(spec),
    }
}

fn emit(data: &Dataset, target: &OutputTarget) -> Result<()> {
    match &target.path {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            data.write(&mut w, target.format)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            data.write(&mut w, target.format)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// 0 when every relation held on every sample, 1 otherwise.
pub fn verify_status(report: &VerifyReport) -> i32 {
    i32::from(report.total_violations() > 0)
}

/// Runs a resolved invocation and returns the process exit status.
pub fn execute(inv: &Invocation) -> Result<i32> {
    match inv {
        Invocation::Sweep(specs) => {
            let mut iter = specs.iter();
            let first = iter
                .next()
                .ok_or_else(|| Error::InvalidSpec("no sweep requested".into()))?;
            let mut data = run_sweep(first)?;
            if specs.len() > 1 {
                data.spec =
                    serde_json::Value::Array(specs.iter().map(SweepSpec::to_json).collect());
            }
            for spec in iter {
                data.extend(run_sweep(spec)?);
            }
            emit(
                &data,
                &OutputTarget {
                    path: first.output_path.clone(),
                    format: first.format,
                },
            )?;
            Ok(0)
        }
        Invocation::Verify {
            samples,
            seed,
            tol,
            output,
        } => {
            let report = verify_random_with_tol(*samples, *seed, *tol);
            emit(&report.to_dataset(), output)?;
            let status = verify_status(&report);
            if status != 0 {
                eprintln!(
                    "qmaj: {} violations in {samples} samples",
                    report.total_violations()
                );
            }
            Ok(status)
        }
        Invocation::Tightness {
            lambda1,
            resolution,
            output,
        } => {
            emit(&tightness_dataset(lambda1, *resolution)?, output)?;
            Ok(0)
        }
    }
}

/// Entry point of the binary: parses, runs and reports, returning the exit
/// status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let result = parse_cli(argv).and_then(|inv| execute(&inv).map_err(CliError::Invalid));
    match result {
        Ok(code) => code,
        Err(CliError::Usage(e)) => {
            let _ = e.print();
            e.exit_code()
        }
        Err(CliError::Invalid(e)) => {
            eprintln!("qmaj: error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn parse(args: &[&str]) -> std::result::Result<Invocation, CliError> {
        parse_cli(std::iter::once("qmaj").chain(args.iter().copied()))
    }

    #[test]
    fn lorenz_sweep_invocation() {
        let inv = parse(&[
            "sweep-majorization",
            "--lambda1",
            "0.3",
            "--alpha-grid",
            "paper",
            "--out",
            "f.csv",
        ])
        .unwrap();
        let Invocation::Sweep(specs) = inv else {
            panic!()
        };
        assert_eq!(specs.len(), 1);
        assert_eq!(specs[0].lambda1_list, vec![0.3]);
        assert_eq!(specs[0].alpha_list, ALPHA_GRID.to_vec());
        assert_eq!(specs[0].output_path, Some(PathBuf::from("f.csv")));
        assert!(specs[0].bench.is_none());
    }

    #[test]
    fn angle_lists_and_global_flags() {
        let inv = parse(&[
            "--seed",
            "9",
            "sweep-entropy2",
            "--lambda1",
            "0,0.5",
            "--alpha",
            "0,pi/6",
            "--theta",
            "5pi/12",
            "--format",
            "json",
        ])
        .unwrap();
        let Invocation::Sweep(specs) = inv else {
            panic!()
        };
        assert_eq!(specs[0].alpha_list, vec![0.0, PI / 6.0]);
        assert_eq!(specs[0].theta_list, vec![5.0 * PI / 12.0]);
        assert_eq!(specs[0].seed, 9);
        assert_eq!(specs[0].format, Format::Json);
    }

    #[test]
    fn presets_expand_reference_grids() {
        let Invocation::Sweep(specs) = parse(&["sweep-entropy2", "--preset", "paper"]).unwrap()
        else {
            panic!()
        };
        assert_eq!(specs.len(), 4);
        let Invocation::Sweep(specs) = parse(&["sweep-entropy3", "--preset", "paper"]).unwrap()
        else {
            panic!()
        };
        assert_eq!(specs[0].alpha_list, THREE_OBS_ALPHA_GRID.to_vec());
    }

    #[test]
    fn verify_and_tightness() {
        assert_eq!(
            parse(&["verify", "--samples", "10", "--seed", "7"]).unwrap(),
            Invocation::Verify {
                samples: 10,
                seed: 7,
                tol: ANALYTIC_TOL,
                output: OutputTarget {
                    path: None,
                    format: Format::Csv
                },
            }
        );
        assert!(matches!(
            parse(&["tightness", "--lambda1", "0", "--resolution", "256"]).unwrap(),
            Invocation::Tightness {
                resolution: 256,
                ..
            }
        ));
    }

    #[test]
    fn bench_flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bench.toml");
        std::fs::write(&path, "noise_rel = 0.05\nrepeats = 7\nseed = 3\n").unwrap();
        let p = path.to_str().unwrap();
        let inv = parse(&[
            "bench-sim",
            "--lambda1",
            "0.2",
            "--alpha",
            "0",
            "--config",
            p,
            "--noise",
            "0.02",
        ])
        .unwrap();
        let Invocation::Sweep(specs) = inv else {
            panic!()
        };
        let cfg = specs[0].bench.as_ref().unwrap();
        assert_eq!(cfg.noise_rel, 0.02);
        assert_eq!(cfg.repeats, 7);
        assert_eq!(specs[0].seed, 3);
    }

    #[test]
    fn violations_set_exit_status() {
        let mut report = crate::harness::verify_random(5, 1);
        assert_eq!(verify_status(&report), 0);
        report.relations[0].violations = 1;
        assert_eq!(verify_status(&report), 1);
    }

    #[test]
    fn invalid_combinations_are_rejected() {
        assert!(matches!(
            parse(&["sweep-majorization", "--bogus"]),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            parse(&[
                "sweep-majorization",
                "--lambda1",
                "0.3",
                "--lambda1-grid",
                "paper",
                "--alpha",
                "0"
            ]),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            parse(&["sweep-majorization", "--lambda1", "0.3"]),
            Err(CliError::Invalid(_))
        ));
        assert!(matches!(
            parse(&["sweep-majorization", "--lambda1", "0.7", "--alpha", "0"]),
            Err(CliError::Invalid(_))
        ));
        assert!(matches!(
            parse(&[
                "sweep-majorization",
                "--lambda1",
                "0.3",
                "--alpha",
                "0",
                "--noise",
                "0.1"
            ]),
            Err(CliError::Invalid(_))
        ));
        assert!(matches!(
            parse(&[
                "sweep-entropy2",
                "--lambda1",
                "0.3",
                "--alpha",
                "0",
                "--theta",
                "pi"
            ]),
            Err(CliError::Invalid(_))
        ));
        assert!(matches!(
            parse(&["sweep-entropy2", "--alpha", "x"]),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            parse(&["verify", "--samples", "0"]),
            Err(CliError::Invalid(_))
        ));
    }
}
