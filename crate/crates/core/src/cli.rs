//! The `stochgeo` command line.
//!
//! Exit codes: 0 success, 1 runtime or data error (including failed
//! validation checks), 2 usage error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytics::{
    empty_space_quantile, mhc_density, nearest_distance_ks, pair_density_empirical,
    void_probability_empirical, SecondOrderDensity,
};
use crate::bounds::{conjecture1_check, coverage_bound_detailed};
use crate::config::{ExperimentConfig, GridWindow, Source};
use crate::coverage::{
    db_to_linear, fit_mhc, simulate_coverage, ChannelParams, CoverageCurve, Deployment,
};
use crate::error::{Error, Result};
use crate::io::{read_curves, write_curves, write_curves_with_gap};
use crate::process::PointSet;
use crate::process::{
    generate_grid, load_deployment, sample_mhc, sample_ppp, AffineOverride, MhcParams,
};
use crate::window::{parse_dims, EdgePolicy, Window, MIN_TORUS_SPACINGS};

/// Environment variable holding the default seed.
pub const SEED_ENV: &str = "STOCHGEO_SEED";
const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "stochgeo",
    version,
    about = "Point-process models of base-station deployments: sampling, coverage simulation and analytic bounds",
    after_help = "The default seed is read from STOCHGEO_SEED (falling back to 1); --seed and config files override it.\nExit codes: 0 success, 1 runtime/data error or failed check, 2 usage error."
)]
pub struct Cli {
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw one realization and write it as `x_km,y_km` CSV.
    Sample(SampleArgs),
    /// Monte Carlo coverage curves for one or more deployment sources.
    Simulate(ExperimentArgs),
    /// Quadrature lower bounds on MHC coverage.
    Bound(BoundArgs),
    /// Check the analytic approximations against simulation.
    Validate(ValidateArgs),
    /// Fit MHC parameters to a target coverage curve.
    Fit(FitArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SampleKind {
    Ppp,
    Mhc,
    Grid,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SampleArgs {
    pub kind: SampleKind,
    /// PPP density (points per km²).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// MHC parent density.
    #[arg(long)]
    pub lambda_p: Option<f64>,
    /// MHC hardcore distance (km).
    #[arg(long)]
    pub d: Option<f64>,
    /// Number of lattice points.
    #[arg(long)]
    pub n: Option<usize>,
    /// Window size in km, `WxH`.
    #[arg(long, default_value = "20x20")]
    pub window: String,
    /// `torus` or `guard:<margin>`; defaults to torus for random processes
    /// and a guard band of 20% of the shorter side for the lattice.
    #[arg(long)]
    pub edge: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (default: stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Settings shared by `simulate`, `bound` and `fit`. Unset flags fall back
/// to the config file, then to the documented defaults.
#[derive(Debug, Args, Default)]
#[command(allow_negative_numbers = true)]
pub struct ExperimentArgs {
    /// Flat `key=value` config file; a previous result CSV also works.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Free-form scenario name recorded in the output.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Comma-separated deployment sources: ppp, mhc, grid, file [default: mhc].
    #[arg(long, value_delimiter = ',')]
    pub source: Option<Vec<String>>,
    /// Path-loss exponent (> 2) [default: 4].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Transmit power; fading has mean p_t [default: 1].
    #[arg(long)]
    pub p_t: Option<f64>,
    /// Noise power [default: 0.1].
    #[arg(long)]
    pub sigma2: Option<f64>,
    /// MHC parent density [default: 2].
    #[arg(long)]
    pub lambda_p: Option<f64>,
    /// MHC hardcore distance in km [default: 0.4].
    #[arg(long)]
    pub d: Option<f64>,
    /// PPP density, or `matched` for the MHC density [default: matched].
    #[arg(long)]
    pub ppp_lambda: Option<String>,
    /// Number of lattice points [default: 24].
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Lattice window: `matched` (square cells on a torus at the MHC
    /// density) or `WxH` with a guard band [default: matched].
    #[arg(long)]
    pub grid_window: Option<String>,
    /// Torus for random sources, `WxH` or `auto` (20 mean spacings) [default: auto].
    #[arg(long)]
    pub window: Option<String>,
    /// Deployment CSV for the `file` source.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Window for the deployment file, `WxH` in km [default: 100x80].
    #[arg(long)]
    pub file_window: Option<String>,
    /// Override the file header's x offset.
    #[arg(long)]
    pub offset_x: Option<f64>,
    /// Override the file header's y offset.
    #[arg(long)]
    pub offset_y: Option<f64>,
    /// Override the file header's scale.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Thresholds in dB, `start:step:end` [default: -10:1:30].
    #[arg(long, allow_hyphen_values = true)]
    pub beta_db: Option<String>,
    /// Monte Carlo trials per curve [default: 10000].
    #[arg(long)]
    pub trials: Option<usize>,
    /// Base seed [default: $STOCHGEO_SEED or 1].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (default: stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct BoundArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Comma-separated bound kinds [default: theorem1,proposition1].
    #[arg(long, value_delimiter = ',')]
    pub kind: Option<Vec<String>>,
    /// Also simulate the MHC curve and add a `gap` column.
    #[arg(long)]
    pub with_sim: bool,
    /// Multiply every quadrature grid count [default: 1].
    #[arg(long)]
    pub quad_scale: Option<usize>,
    /// Nodes in r [default: 128].
    #[arg(long)]
    pub n_r: Option<usize>,
    /// Nodes in theta over a full period [default: 256].
    #[arg(long)]
    pub n_theta: Option<usize>,
    /// Nodes per distance segment [default: 256].
    #[arg(long)]
    pub n_upsilon: Option<usize>,
    /// Truncation of the r integral in km, or `auto` for 5/sqrt(pi lambda_m).
    #[arg(long)]
    pub r_max: Option<String>,
    /// Relative tail tolerance of the distance integral [default: 1e-4].
    #[arg(long)]
    pub tail_tol: Option<f64>,
    /// Interferer exclusion rule: geometric or symmetric [default: geometric].
    #[arg(long)]
    pub exclusion: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    EmptySpace,
    Void,
    Rho2,
    Conjecture1,
    All,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ValidateArgs {
    pub check: Check,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_p: f64,
    #[arg(long, default_value_t = 0.5)]
    pub d: f64,
    /// Realizations per check.
    #[arg(long, default_value_t = 500)]
    pub realizations: usize,
    /// Distance for the void and conjecture checks [default: median
    /// nearest-station distance for void, d for conjecture1].
    #[arg(long)]
    pub r: Option<f64>,
    /// Threshold for the conjecture check, in dB.
    #[arg(long, default_value_t = 0.0)]
    pub beta_db: f64,
    #[arg(long, default_value_t = 4.0)]
    pub alpha: f64,
    /// Largest acceptable KS distance for the empty-space check.
    #[arg(long, default_value_t = 0.03)]
    pub ks_max: f64,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct FitArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Target curve CSV; without it the `--file` deployment is simulated.
    #[arg(long)]
    pub target: Option<PathBuf>,
    /// Curve label to fit within the target file [default: first curve].
    #[arg(long)]
    pub target_label: Option<String>,
    /// Candidate parent densities.
    #[arg(long, value_delimiter = ',', default_value = "1,1.5,2,2.5,3")]
    pub lambda_p_grid: Vec<f64>,
    /// Candidate hardcore distances.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6"
    )]
    pub d_grid: Vec<f64>,
}

/// Parses `args`, runs the command and maps errors to exit codes.
pub fn run_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parameter { .. } => 2,
        _ => 1,
    }
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| Error::param("threads", e.to_string()))?;
    pool.install(|| match cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Fit(a) => cmd_fit(a),
    })
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::param("seed", format!("{SEED_ENV}={s:?} is not an integer"))),
        Err(_) => Ok(None),
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn cmd_sample(a: SampleArgs) -> Result<ExitCode> {
    let seed = a.seed.or(env_seed()?).unwrap_or(DEFAULT_SEED);
    let (w, h) = parse_dims(&a.window)?;
    let edge = a
        .edge
        .as_deref()
        .map(str::parse::<EdgePolicy>)
        .transpose()?;
    let need = |v: Option<f64>, name: &'static str| {
        v.ok_or_else(|| Error::param(name, "required for this process"))
    };
    let set = match a.kind {
        SampleKind::Ppp => {
            let window = Window::new(w, h, edge.unwrap_or(EdgePolicy::Toroidal))?;
            sample_ppp(need(a.lambda, "lambda")?, window, seed)?
        }
        SampleKind::Mhc => {
            let window = Window::new(w, h, edge.unwrap_or(EdgePolicy::Toroidal))?;
            let params = MhcParams::new(need(a.lambda_p, "lambda_p")?, need(a.d, "d")?)?;
            sample_mhc(params, window, seed)?
        }
        SampleKind::Grid => {
            let window = match edge {
                Some(e) => Window::new(w, h, e)?,
                None => Window::fixed_deployment(w, h)?,
            };
            let n =
                a.n.ok_or_else(|| Error::param("n", "required for the lattice"))?;
            let (set, layout) = generate_grid(n, window)?;
            eprintln!(
                "lattice {}x{} ({} points, spacing {}x{} km)",
                layout.columns,
                layout.rows,
                set.len(),
                layout.spacing_x,
                layout.spacing_y
            );
            set
        }
    };
    emit(a.output.as_deref(), &set.to_csv())?;
    Ok(ExitCode::SUCCESS)
}

/// Defaults, then `$STOCHGEO_SEED`, then the config file, then flags.
fn resolve(a: &ExperimentArgs, command: &str) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig::default();
    if let Some(seed) = env_seed()? {
        c.seed = seed;
    }
    if let Some(path) = &a.config {
        c.apply_file(path)?;
    }
    c.command = command.into();
    let mut set = |key: &str, v: Option<String>| match v {
        Some(v) => c.set(key, &v),
        None => Ok(()),
    };
    set("scenario", a.scenario.clone())?;
    set("sources", a.source.as_ref().map(|s| s.join(",")))?;
    set("alpha", a.alpha.map(|v| v.to_string()))?;
    set("p_t", a.p_t.map(|v| v.to_string()))?;
    set("sigma2", a.sigma2.map(|v| v.to_string()))?;
    set("lambda_p", a.lambda_p.map(|v| v.to_string()))?;
    set("d", a.d.map(|v| v.to_string()))?;
    set("ppp_lambda", a.ppp_lambda.clone())?;
    set("grid_n", a.grid_n.map(|v| v.to_string()))?;
    set("grid_window", a.grid_window.clone())?;
    set("window", a.window.clone())?;
    set("file", a.file.as_ref().map(|p| p.display().to_string()))?;
    set("file_window", a.file_window.clone())?;
    set("offset_x", a.offset_x.map(|v| v.to_string()))?;
    set("offset_y", a.offset_y.map(|v| v.to_string()))?;
    set("scale", a.scale.map(|v| v.to_string()))?;
    set("beta_db", a.beta_db.clone())?;
    set("n_trials", a.trials.map(|v| v.to_string()))?;
    set("seed", a.seed.map(|v| v.to_string()))?;
    if c.n_trials == 0 {
        return Err(Error::param("trials", "must be >= 1"));
    }
    Ok(c)
}

fn channel(c: &ExperimentConfig) -> Result<ChannelParams> {
    ChannelParams::new(c.alpha, c.p_t, c.sigma2)
}

fn mhc_params(c: &ExperimentConfig) -> Result<MhcParams> {
    MhcParams::new(c.lambda_p, c.d)
}

fn random_window(c: &ExperimentConfig, density: f64) -> Result<Window> {
    match c.window {
        Some((w, h)) => Window::torus(w, h),
        None => Window::auto_torus(density),
    }
}

/// The `n`-point lattice with square cells at the given density, tiled
/// periodically until the torus spans at least [`MIN_TORUS_SPACINGS`] cells
/// in each direction. Tiling leaves the lattice unchanged but keeps the
/// interference field from being truncated at a few cells.
pub fn matched_grid(n: usize, density: f64) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::param("grid_n", "must be >= 1"));
    }
    let cols = (1..=n)
        .filter(|c| n.is_multiple_of(*c) && c * c >= n)
        .min()
        .expect("n divides itself");
    let rows = n / cols;
    let tiles = (MIN_TORUS_SPACINGS / rows as f64).ceil().max(1.0) as usize;
    let s = 1.0 / density.sqrt();
    let (nx, ny) = (cols * tiles, rows * tiles);
    let window = Window::torus(nx as f64 * s, ny as f64 * s)?;
    let (set, layout) = generate_grid(nx * ny, window)?;
    if (layout.columns, layout.rows) != (nx, ny) {
        return Err(Error::Data(format!(
            "lattice layout {}x{} differs from the requested {nx}x{ny}",
            layout.columns, layout.rows
        )));
    }
    Ok(set)
}

fn deployment(c: &ExperimentConfig, source: Source) -> Result<Deployment> {
    let params = mhc_params(c)?;
    let lambda_m = mhc_density(params);
    Ok(match source {
        Source::Ppp => {
            let lambda = c.ppp_lambda.unwrap_or(lambda_m);
            Deployment::Ppp {
                lambda,
                window: random_window(c, lambda)?,
            }
        }
        Source::Mhc => Deployment::Mhc {
            params,
            window: random_window(c, lambda_m)?,
        },
        Source::Grid => Deployment::Fixed(match c.grid_window {
            GridWindow::Matched => matched_grid(c.grid_n, lambda_m)?,
            GridWindow::Size(w, h) => generate_grid(c.grid_n, Window::fixed_deployment(w, h)?)?.0,
        }),
        Source::File => {
            let path = c
                .file
                .as_ref()
                .ok_or_else(|| Error::param("file", "the file source needs --file"))?;
            let window = Window::fixed_deployment(c.file_window.0, c.file_window.1)?;
            let overrides = AffineOverride {
                offset_x: c.offset_x,
                offset_y: c.offset_y,
                scale: c.scale,
            };
            let loaded = load_deployment(path, window, overrides)?;
            eprintln!("{}", loaded.report());
            Deployment::Fixed(loaded.points)
        }
    })
}

fn simulate_source(
    c: &ExperimentConfig,
    source: Source,
    ch: &ChannelParams,
) -> Result<CoverageCurve> {
    let dep = deployment(c, source)?;
    let run = simulate_coverage(&dep, ch, &c.beta_db.values(), c.n_trials, c.seed)?;
    for w in &run.warnings {
        eprintln!("warning ({source}): {w}");
    }
    if run.clamped > 0 {
        eprintln!(
            "note ({source}): {} trials hit the minimum-distance clamp",
            run.clamped
        );
    }
    Ok(run.curve)
}

fn cmd_simulate(a: ExperimentArgs) -> Result<ExitCode> {
    let c = resolve(&a, "simulate")?;
    let ch = channel(&c)?;
    let curves = c
        .sources
        .iter()
        .map(|&s| simulate_source(&c, s, &ch))
        .collect::<Result<Vec<_>>>()?;
    emit(a.output.as_deref(), &write_curves(&c.to_header(), &curves))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_bound(a: BoundArgs) -> Result<ExitCode> {
    let mut c = resolve(&a.experiment, "bound")?;
    let mut set = |key: &str, v: Option<String>| match v {
        Some(v) => c.set(key, &v),
        None => Ok(()),
    };
    set("kinds", a.kind.as_ref().map(|k| k.join(",")))?;
    set("quad_scale", a.quad_scale.map(|v| v.to_string()))?;
    set("n_r", a.n_r.map(|v| v.to_string()))?;
    set("n_theta", a.n_theta.map(|v| v.to_string()))?;
    set("n_upsilon", a.n_upsilon.map(|v| v.to_string()))?;
    set("r_max", a.r_max.clone())?;
    set("tail_tol", a.tail_tol.map(|v| v.to_string()))?;
    set("exclusion", a.exclusion.clone())?;
    if a.with_sim {
        c.with_sim = true;
    }
    if c.quad_scale == 0 {
        return Err(Error::param("quad_scale", "must be >= 1"));
    }
    if c.kinds.is_empty() {
        return Err(Error::param("kind", "no bound kind selected"));
    }

    let ch = channel(&c)?;
    let params = mhc_params(&c)?;
    let quad = c.effective_quad();
    let beta_db = c.beta_db.values();
    let mut curves = Vec::new();
    for &kind in &c.kinds {
        let report = coverage_bound_detailed(kind, &ch, params, &beta_db, &quad)?;
        eprintln!(
            "{kind}: r_max={:.4} max tail/mu2={:.2e} v_max in [{:.3}, {:.3}] clamped={}",
            report.r_max,
            report.max_tail_ratio,
            report.upsilon_max.0,
            report.upsilon_max.1,
            report.clamped
        );
        curves.push(report.curve);
    }
    let text = if c.with_sim {
        let sim = simulate_source(&c, Source::Mhc, &ch)?;
        let mut notes = String::new();
        for curve in &curves {
            let gaps: Vec<f64> = sim
                .p_c()
                .iter()
                .zip(curve.p_c())
                .map(|(s, b)| s - b)
                .collect();
            let mean = gaps.iter().map(|g| g.abs()).sum::<f64>() / gaps.len() as f64;
            eprintln!("{}: mean |simulation - bound| = {:.4}", curve.label(), mean);
            notes.push_str(&format!("## mean_abs_gap_{}={mean}\n", curve.label()));
        }
        write_curves_with_gap(&(c.to_header() + &notes), &sim, &curves)?
    } else {
        write_curves(&c.to_header(), &curves)
    };
    emit(a.experiment.output.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

struct CheckResult {
    name: &'static str,
    pass: bool,
    lines: Vec<String>,
}

fn check_empty_space(a: &ValidateArgs, params: MhcParams, seed: u64) -> Result<CheckResult> {
    let ks = nearest_distance_ks(params, a.realizations, 32, seed)?;
    Ok(CheckResult {
        name: "empty-space",
        pass: ks.statistic < a.ks_max,
        lines: vec![format!(
            "ks={:.5} samples={} lambda_m={:.6} ks_max={}",
            ks.statistic, ks.samples, ks.lambda_m, a.ks_max
        )],
    })
}

fn check_void(a: &ValidateArgs, params: MhcParams, seed: u64) -> Result<CheckResult> {
    let r =
        a.r.unwrap_or_else(|| empty_space_quantile(0.5, mhc_density(params)));
    let v = void_probability_empirical(params, r, a.realizations, seed)?;
    let z = (v.probability - v.approximation) / v.std_error;
    let mut lines = vec![format!(
        "r={r:.5} empirical={:.5} std_err={:.5} approximation={:.5} z={z:.2}",
        v.probability, v.std_error, v.approximation
    )];
    lines.extend(v.warning.iter().map(|w| format!("warning: {w}")));
    lines.push("n,locations,all_eliminated,empirical,geometric".into());
    lines.extend(v.elimination.iter().take(12).map(|row| {
        format!(
            "{},{},{},{:.5},{:.5}",
            row.n,
            row.locations,
            row.all_eliminated,
            row.empirical(),
            row.geometric
        )
    }));
    Ok(CheckResult {
        name: "void",
        pass: z.abs() <= 3.0,
        lines,
    })
}

fn check_rho2(a: &ValidateArgs, params: MhcParams, seed: u64) -> Result<CheckResult> {
    let d = params.d();
    if d == 0.0 {
        return Ok(CheckResult {
            name: "rho2",
            pass: true,
            lines: vec!["d=0: rho2 is constant, nothing to compare".into()],
        });
    }
    let h = 0.02 * d;
    let upsilons: Vec<f64> = (1..=10).map(|k| d + (k as f64 - 0.5) * 0.1 * d).collect();
    let est = pair_density_empirical(params, &upsilons, h, a.realizations, seed)?;
    let rho = SecondOrderDensity::new(params);
    let mut pass = true;
    let mut lines = vec!["upsilon,analytic,empirical,std_err,z".to_string()];
    for e in &est {
        let exact = rho.eval(e.upsilon);
        let z = (e.estimate - exact) / e.std_error;
        pass &= z.abs() <= 3.0;
        lines.push(format!(
            "{:.5},{exact:.6},{:.6},{:.6},{z:.2}",
            e.upsilon, e.estimate, e.std_error
        ));
    }
    Ok(CheckResult {
        name: "rho2",
        pass,
        lines,
    })
}

fn check_conjecture(a: &ValidateArgs, params: MhcParams, seed: u64) -> Result<CheckResult> {
    let ch = ChannelParams::new(a.alpha, 1.0, 0.0)?;
    let r =
        a.r.unwrap_or(if params.d() > 0.0 { params.d() } else { 0.3 });
    let rep = conjecture1_check(
        params,
        &ch,
        db_to_linear(a.beta_db),
        r,
        a.realizations.max(100),
        seed,
    )?;
    Ok(CheckResult {
        name: "conjecture1",
        pass: rep.lhs >= rep.rhs - 3.0 * rep.diff_std_err,
        lines: vec![format!(
            "r={r} beta_db={} lhs={:.6} rhs={:.6} lhs_se={:.6} rhs_se={:.6} diff_se={:.6} z={:.2}",
            a.beta_db,
            rep.lhs,
            rep.rhs,
            rep.lhs_std_err,
            rep.rhs_std_err,
            rep.diff_std_err,
            rep.z_score()
        )],
    })
}

fn cmd_validate(a: ValidateArgs) -> Result<ExitCode> {
    let seed = a.seed.or(env_seed()?).unwrap_or(DEFAULT_SEED);
    let params = MhcParams::new(a.lambda_p, a.d)?;
    let checks: Vec<Check> = match a.check {
        Check::All => vec![
            Check::EmptySpace,
            Check::Void,
            Check::Rho2,
            Check::Conjecture1,
        ],
        c => vec![c],
    };
    let mut all_pass = true;
    let mut out = String::new();
    for check in checks {
        let result = match check {
            Check::EmptySpace => check_empty_space(&a, params, seed)?,
            Check::Void => check_void(&a, params, seed)?,
            Check::Rho2 => check_rho2(&a, params, seed)?,
            Check::Conjecture1 => check_conjecture(&a, params, seed)?,
            Check::All => unreachable!("expanded above"),
        };
        all_pass &= result.pass;
        out.push_str(&format!(
            "[{}] {} (lambda_p={} d={} realizations={} seed={seed})\n",
            if result.pass { "PASS" } else { "FAIL" },
            result.name,
            a.lambda_p,
            a.d,
            a.realizations
        ));
        for line in result.lines {
            out.push_str("  ");
            out.push_str(&line);
            out.push('\n');
        }
    }
    emit(None, &out)?;
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_fit(a: FitArgs) -> Result<ExitCode> {
    let c = resolve(&a.experiment, "fit")?;
    let ch = channel(&c)?;
    let target = match &a.target {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let curves = read_curves(&text)?;
            match &a.target_label {
                Some(label) => curves
                    .into_iter()
                    .find(|cv| cv.label() == label)
                    .ok_or_else(|| {
                        Error::Data(format!("no curve labelled `{label}` in {}", path.display()))
                    })?,
                None => curves
                    .into_iter()
                    .next()
                    .ok_or_else(|| Error::Data(format!("{} holds no curves", path.display())))?,
            }
        }
        None => simulate_source(&c, Source::File, &ch)?,
    };
    let candidates = a
        .lambda_p_grid
        .iter()
        .flat_map(|&l| a.d_grid.iter().map(move |&d| MhcParams::new(l, d)))
        .collect::<Result<Vec<_>>>()?;
    let window = c.window.map(|(w, h)| Window::torus(w, h)).transpose()?;
    let fit = fit_mhc(&target, &candidates, &ch, c.n_trials, c.seed, window)?;
    eprintln!(
        "best lambda_p={} d={} mse={:.6e} (target `{}`, {} candidates)",
        fit.best.lambda_p(),
        fit.best.d(),
        fit.error,
        target.label(),
        fit.table.len()
    );
    let mut text = c.to_header();
    text.push_str(&format!(
        "## best_lambda_p={} best_d={} best_mse={}\nlambda_p,d,mse\n",
        fit.best.lambda_p(),
        fit.best.d(),
        fit.error
    ));
    for row in &fit.table {
        text.push_str(&format!(
            "{},{},{}\n",
            row.params.lambda_p(),
            row.params.d(),
            row.error
        ));
    }
    emit(a.experiment.output.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}
