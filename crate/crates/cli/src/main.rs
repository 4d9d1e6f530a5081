//! `radon`: spectrum tables and Monte Carlo experiments for Radon transforms
//! on spheres, convex bodies and the discrete torus.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use radon_core::convex_sim::{
    make_isotropic_body, run_ellipse_experiment, run_tail_checks, run_zero_one_experiment, BodyKind, LineExperiment,
};
use radon_core::report::{emit_report, Emit, Format};
use radon_core::spectrum::spectrum_table;
use radon_core::sphere_sim::{
    run_correlation_experiment, run_sharpness_check, run_sphere_experiment, SphereExperiment, SphereSet, TestFunction,
};
use radon_core::torus_sim::{eigen_check, run_torus_experiment, EigenMode, TorusConfig, TorusMode, TorusSet};
use radon_core::Error;

/// Directory used for reports when `--out` is not given.
const OUT_DIR_ENV: &str = "RADON_OUT_DIR";
const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Parser)]
#[command(name = "radon", version, about = "Radon transform spectra and random-section experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Output {
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Output file; defaults to $RADON_OUT_DIR/<command>.<ext>, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct Sampling {
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SetArg {
    Band,
    CentralBand,
    Hemisphere,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BodyArg {
    Ball,
    Cube,
    Simplex,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TorusModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FunctionArg {
    Zonal,
    Constant,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues λ²_{k,2ℓ} of S_k for ℓ = 0..=lmax.
    Spectrum {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 10)]
        lmax: u64,
        #[command(flatten)]
        output: Output,
    },
    /// σ_H(A ∩ H)/σ(A) over random k-dimensional subspaces H.
    Sphere {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, value_enum, default_value_t = SetArg::Band)]
        set: SetArg,
        /// Measure of the set (the hemisphere is always 1/2).
        #[arg(long)]
        measure: Option<f64>,
        #[arg(long, default_value_t = 60)]
        bins: usize,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        output: Output,
    },
    /// Slab ratios along random lines through an isotropic body.
    Convex {
        #[arg(long, value_enum)]
        body: BodyArg,
        #[arg(long)]
        n: usize,
        /// Slab direction: `e<i>` or comma-separated coordinates (default e1).
        #[arg(long)]
        xi: Option<String>,
        /// Run the chord/direction tail checks instead.
        #[arg(long)]
        tails: bool,
        #[arg(long, default_value_t = 60)]
        bins: usize,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        output: Output,
    },
    /// Arithmetic progressions meeting a half-density set of (Z/pZ)^n.
    Torus {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = TorusModeArg::Exhaustive)]
        mode: TorusModeArg,
        /// Apply S to every character in exact arithmetic instead.
        #[arg(long)]
        spectrum: bool,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        output: Output,
    },
    /// Random ellipses in the simplex meeting a half-measure set.
    Ellipse {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 60)]
        bins: usize,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        output: Output,
    },
    /// ∫ R_k f(H) R_{n-k} f(H^⊥) over random subspaces.
    Correlation {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = FunctionArg::Zonal)]
        function: FunctionArg,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        output: Output,
    },
    /// P(X = 0) for the half-measure band against its closed form.
    Sharpness {
        /// Comma-separated dimensions.
        #[arg(long, value_delimiter = ',', default_value = "100,1000")]
        dims: Vec<usize>,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        output: Output,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::Sphere { .. } => "sphere",
            Command::Convex { .. } => "convex",
            Command::Torus { .. } => "torus",
            Command::Ellipse { .. } => "ellipse",
            Command::Correlation { .. } => "correlation",
            Command::Sharpness { .. } => "sharpness",
        }
    }

    fn output(&self) -> &Output {
        match self {
            Command::Spectrum { output, .. }
            | Command::Sphere { output, .. }
            | Command::Convex { output, .. }
            | Command::Torus { output, .. }
            | Command::Ellipse { output, .. }
            | Command::Correlation { output, .. }
            | Command::Sharpness { output, .. } => output,
        }
    }
}

fn parse_xi(spec: &str, n: usize) -> Result<Vec<f64>, Error> {
    if let Some(index) = spec.strip_prefix('e') {
        let i: usize = index
            .parse()
            .map_err(|_| Error::Config(format!("cannot parse --xi `{spec}`")))?;
        if i == 0 || i > n {
            return Err(Error::Config(format!("--xi e{i} is not a basis vector of R^{n}")));
        }
        let mut xi = vec![0.0; n];
        xi[i - 1] = 1.0;
        return Ok(xi);
    }
    let xi = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Error::Config(format!("cannot parse --xi `{spec}`")))?;
    if xi.len() != n {
        return Err(Error::Config(format!("--xi has {} coordinates, expected {n}", xi.len())));
    }
    Ok(xi)
}

fn positive(samples: Option<usize>, default: usize) -> Result<usize, Error> {
    match samples.unwrap_or(default) {
        0 => Err(Error::Config("--samples must be >= 1".into())),
        s => Ok(s),
    }
}

fn render<T: Emit + ?Sized>(report: &T, output: &Output, name: &str) -> Result<String, Error> {
    let format = match output.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let path = output.out.clone().or_else(|| {
        std::env::var_os(OUT_DIR_ENV)
            .filter(|dir| !dir.is_empty())
            .map(|dir| Path::new(&dir).join(format!("{name}.{ext}")))
    });
    let text = emit_report(report, format, path.as_deref())?;
    Ok(if path.is_some() { String::new() } else { text })
}

fn run(command: &Command) -> Result<String, Error> {
    let name = command.name();
    let output = command.output();
    match command {
        Command::Spectrum { n, k, lmax, .. } => render(&spectrum_table(*n, *k, *lmax)?, output, name),
        Command::Sphere {
            n,
            k,
            set,
            measure,
            bins,
            sampling,
            ..
        } => {
            if *k < 2 || k >= n {
                return Err(Error::Config(format!("sphere needs 2 <= k <= n-1, got k={k}, n={n}")));
            }
            let set = match (set, measure) {
                (SetArg::Hemisphere, Some(m)) if *m != 0.5 => {
                    return Err(Error::Config("the hemisphere has measure 1/2".into()));
                }
                (SetArg::Hemisphere, _) => SphereSet::hemisphere(*n),
                (SetArg::Band, m) => SphereSet::band_with_measure(*n, check_measure(*m)?)?,
                (SetArg::CentralBand, m) => SphereSet::central_band_with_measure(*n, check_measure(*m)?)?,
            };
            let mut cfg = SphereExperiment::new(*n, *k, set, positive(sampling.samples, 100_000)?, sampling.seed);
            cfg.bins = *bins;
            render(&run_sphere_experiment(&cfg)?, output, name)
        }
        Command::Convex {
            body,
            n,
            xi,
            tails,
            bins,
            sampling,
            ..
        } => {
            let kind = match body {
                BodyArg::Ball => BodyKind::Ball,
                BodyArg::Cube => BodyKind::Cube,
                BodyArg::Simplex => BodyKind::Simplex,
            };
            let body = make_isotropic_body(kind, *n)?;
            let default = if *tails { 100_000 } else { 3000 };
            let mut cfg = LineExperiment::new(body, positive(sampling.samples, default)?, sampling.seed);
            cfg.bins = *bins;
            cfg.xi = xi.as_deref().map(|s| parse_xi(s, *n)).transpose()?;
            if *tails {
                if cfg.xi.is_some() {
                    return Err(Error::Config("--xi does not apply to --tails".into()));
                }
                render(&run_tail_checks(&cfg)?, output, name)
            } else {
                render(&run_zero_one_experiment(&cfg)?, output, name)
            }
        }
        Command::Torus {
            p,
            n,
            mode,
            spectrum,
            sampling,
            ..
        } => {
            let cfg = TorusConfig::new(*p, *n)?;
            if *spectrum {
                return render(&eigen_check(&cfg, EigenMode::Exact)?, output, name);
            }
            let mode = match mode {
                TorusModeArg::Exhaustive => {
                    if sampling.samples.is_some() {
                        return Err(Error::Config("--samples only applies to --mode sampled".into()));
                    }
                    TorusMode::Exhaustive
                }
                TorusModeArg::Sampled => TorusMode::Sampled {
                    count: positive(sampling.samples, 1_000_000)? as u64,
                    seed: sampling.seed,
                },
            };
            if matches!(mode, TorusMode::Exhaustive) && cfg.progression_count() > cfg.budget() {
                return Err(Error::Config(format!(
                    "exhaustive mode needs {} progressions, over the budget of {}",
                    cfg.progression_count(),
                    cfg.budget()
                )));
            }
            let set = TorusSet::random_half(&cfg, sampling.seed);
            render(&run_torus_experiment(&cfg, &set, mode)?, output, name)
        }
        Command::Ellipse { n, bins, sampling, .. } => {
            let report = run_ellipse_experiment(*n, positive(sampling.samples, 10_000)?, sampling.seed, *bins)?;
            render(&report, output, name)
        }
        Command::Correlation {
            n, k, function, sampling, ..
        } => {
            let function = match function {
                FunctionArg::Zonal => TestFunction::ZonalQuadratic,
                FunctionArg::Constant => TestFunction::Constant,
            };
            let report =
                run_correlation_experiment(*n, *k, positive(sampling.samples, 1_000_000)?, sampling.seed, function)?;
            render(&report, output, name)
        }
        Command::Sharpness { dims, sampling, .. } => {
            let report = run_sharpness_check(dims, positive(sampling.samples, 100_000)?, sampling.seed)?;
            render(&report, output, name)
        }
    }
}

fn check_measure(measure: Option<f64>) -> Result<f64, Error> {
    let m = measure.unwrap_or(0.5);
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::Config(format!("--measure must lie in (0, 1), got {m}")));
    }
    Ok(m)
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Numeric(_) => 3,
        _ => 2,
    }
}

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    let record = serde_json::json!({ "error": kind, "message": message, "exit_code": code });
    eprintln!("{record}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            let message = text.lines().next().unwrap_or_default().trim_start_matches("error: ");
            return fail("usage", message, 2);
        }
    };
    if let Some(workers) = cli.command.output().workers {
        if workers == 0 {
            return fail("config", "--workers must be >= 1", 2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global() {
            return fail("config", &e.to_string(), 2);
        }
    }
    match run(&cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.kind(), &e.to_string(), exit_code(&e)),
    }
}
