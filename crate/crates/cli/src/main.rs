//! `wavediff` command-line front end.
//!
//! Exit status: 0 success, 1 a verification check failed, 2 malformed input,
//! 3 unsupported request, 4 numeric budget exhausted.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wavediff::averaging::{besicovitch_seminorm_numeric, eberlein_numeric, AveragingConfig, Window};
use wavediff::builtins::builtin;
use wavediff::closed_form::{autocorrelation, diffraction, evaluate_autocorr};
use wavediff::formats::{
    measure_to_json, parse_measure, parse_points, parse_radii, parse_wave_spec, ConvergenceJson, DiffractionSummary,
    ImageSummary, PointReport, ReportDocument,
};
use wavediff::measure::DiffractionMeasure;
use wavediff::render::{rasterize, write_pgm, PgmFormat, RenderConfig};
use wavediff::verify::{checks, run_checks, VerifyOptions};
use wavediff::wave::WaveSpec;
use wavediff::{Error, ErrorClass};

#[derive(Parser)]
#[command(name = "wavediff", version, about = "Autocorrelation and diffraction of plane and spherical wave superpositions")]
struct Cli {
    /// Worker threads for quadrature, sampling and rendering.
    #[arg(long, global = true, env = "WAVEDIFF_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form autocorrelation compared against windowed averages.
    Autocorr(AutocorrArgs),
    /// Diffraction measure and its radial decomposition.
    Diffract(DiffractArgs),
    /// Windowed p-th power means along the radius schedule.
    Seminorm(SeminormArgs),
    /// Rasterise a diffraction measure to a PGM image.
    Render(RenderArgs),
    /// Run the verification checks.
    Verify(VerifyArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SpecSource {
    /// Wave spec JSON file.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Named example: surprised, olympic or pinwheel-none.
    #[arg(long)]
    builtin: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowArg {
    Ball,
    Cube,
    NonnegInterval,
}

impl From<WindowArg> for Window {
    fn from(w: WindowArg) -> Self {
        match w {
            WindowArg::Ball => Window::Ball,
            WindowArg::Cube => Window::Cube,
            WindowArg::NonnegInterval => Window::NonnegInterval,
        }
    }
}

#[derive(Args)]
struct AveragingArgs {
    #[arg(long, value_enum)]
    window: Option<WindowArg>,
    /// Increasing comma-separated window radii.
    #[arg(long)]
    radii: Option<String>,
    /// Gauss–Legendre nodes per unit length (default: enough for the fastest term).
    #[arg(long)]
    qpr: Option<usize>,
    /// Minimum angular nodes per circle in two dimensions.
    #[arg(long)]
    qpa: Option<usize>,
    /// Monte Carlo samples per radius in three or more dimensions.
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl AveragingArgs {
    fn config(&self, spec: &WaveSpec) -> Result<AveragingConfig, Error> {
        let d = spec.dimension();
        let mut cfg = AveragingConfig::for_dimension(d);
        if let Some(w) = self.window {
            cfg.window = w.into();
        }
        if let Some(r) = &self.radii {
            cfg.radii = parse_radii(r)?;
        }
        cfg.quad_points_radial = match self.qpr {
            Some(q) => q,
            None => cfg.quad_points_radial.max((10.0 * spec.max_frequency()).ceil() as usize),
        };
        if let Some(q) = self.qpa {
            cfg.quad_points_angular = q;
        }
        if let Some(n) = self.mc_samples {
            cfg.mc_samples = n;
        }
        if let Some(s) = self.seed {
            cfg.rng_seed = s;
        }
        cfg.validate(d)?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct AutocorrArgs {
    #[command(flatten)]
    source: SpecSource,
    /// Shifts as `x,y;x,y;…` (default: five points along the first axis).
    #[arg(long)]
    points: Option<String>,
    #[command(flatten)]
    averaging: AveragingArgs,
    /// Only report the closed form.
    #[arg(long)]
    no_numeric: bool,
}

#[derive(Args)]
struct DiffractArgs {
    #[command(flatten)]
    source: SpecSource,
    /// Also write the measure as JSON, readable by `render --measure`.
    #[arg(long)]
    measure_out: Option<PathBuf>,
}

#[derive(Args)]
struct SeminormArgs {
    #[command(flatten)]
    source: SpecSource,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[command(flatten)]
    averaging: AveragingArgs,
}

#[derive(Args)]
#[group(id = "render_source", required = true, multiple = false)]
struct RenderSource {
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    builtin: Option<String>,
    /// Diffraction measure JSON file.
    #[arg(long)]
    measure: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    source: RenderSource,
    /// Output PGM path.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 241)]
    width: usize,
    /// Defaults to the width.
    #[arg(long)]
    height: Option<usize>,
    /// `xmin,ymin,xmax,ymax` (default: a square around every component).
    #[arg(long)]
    window: Option<String>,
    /// Smoothing width in physical units (default: 1.5 pixel pitches).
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Keep raw intensities instead of scaling the peak to 1.
    #[arg(long)]
    no_normalize: bool,
    /// Write a plain-text (P2) graymap.
    #[arg(long)]
    plain: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// List the checks without running them.
    #[arg(long)]
    list: bool,
    /// Run against a deliberately corrupted closed form.
    #[arg(long)]
    inject_fault: bool,
    /// Comma-separated check ids.
    #[arg(long, value_delimiter = ',')]
    only: Vec<u32>,
    /// Include wall-clock times in the report.
    #[arg(long)]
    timings: bool,
}

struct Outcome {
    report: ReportDocument,
    code: u8,
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Input => 2,
        ErrorClass::Unsupported => 3,
        ErrorClass::Numeric => 4,
    }
}

fn read_text(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn load_spec(path: Option<&PathBuf>, name: Option<&String>) -> Result<(WaveSpec, String), Error> {
    match (path, name) {
        (Some(p), _) => {
            let spec = parse_wave_spec(&read_text(p)?).map_err(|e| annotate(p, e))?;
            Ok((spec, p.display().to_string()))
        }
        (None, Some(n)) => Ok((builtin(n)?, format!("builtin:{n}"))),
        (None, None) => Err(Error::Input("no spec given".into())),
    }
}

fn annotate(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn default_points(d: usize) -> Vec<Vec<f64>> {
    (0..5)
        .map(|k| {
            let mut x = vec![0.0; d];
            x[0] = 0.5 * k as f64;
            x
        })
        .collect()
}

fn cmd_autocorr(args: &AutocorrArgs, argv: Vec<String>) -> Result<Outcome, Error> {
    let (spec, source) = load_spec(args.source.spec.as_ref(), args.source.builtin.as_ref())?;
    let d = spec.dimension();
    let points = match &args.points {
        Some(p) => parse_points(p, d)?,
        None => default_points(d),
    };
    let cfg = args.averaging.config(&spec)?;
    let mut report = ReportDocument::new("autocorr", argv);
    report.source = Some(source);
    let mut code = 0;
    let closed = match autocorrelation(&spec) {
        Ok(eta) => {
            report.set_autocorrelation(&eta);
            Some(eta)
        }
        Err(e) if e.class() == ErrorClass::Unsupported => {
            report.warnings.push(format!("closed form unavailable: {e}"));
            code = 3;
            None
        }
        Err(e) => return Err(e),
    };
    for x in points {
        let closed_value = closed.as_ref().map(|eta| evaluate_autocorr(eta, &x)).transpose()?;
        let numeric = if args.no_numeric {
            None
        } else {
            Some(eberlein_numeric(&spec, &spec, &x, &cfg)?)
        };
        let delta = match (&numeric, closed_value) {
            (Some(n), Some(c)) => n.values.last().map(|v| (v - c).norm()),
            _ => None,
        };
        report.points.push(PointReport {
            x,
            closed: closed_value.map(Into::into),
            numeric: numeric.as_ref().map(|n| ConvergenceJson::new(&cfg.radii, n)),
            delta,
        });
    }
    if !args.no_numeric {
        report.config = Some(cfg);
    }
    Ok(Outcome { report, code })
}

fn cmd_diffract(args: &DiffractArgs, argv: Vec<String>) -> Result<Outcome, Error> {
    let (spec, source) = load_spec(args.source.spec.as_ref(), args.source.builtin.as_ref())?;
    let mu = diffraction(&spec)?;
    if let Some(path) = &args.measure_out {
        write_file(path, measure_to_json(&mu).as_bytes())?;
    }
    let mut report = ReportDocument::new("diffract", argv);
    report.source = Some(source);
    report.diffraction = Some(DiffractionSummary::from(&mu));
    Ok(Outcome { report, code: 0 })
}

fn cmd_seminorm(args: &SeminormArgs, argv: Vec<String>) -> Result<Outcome, Error> {
    let (spec, source) = load_spec(args.source.spec.as_ref(), args.source.builtin.as_ref())?;
    let cfg = args.averaging.config(&spec)?;
    let rep = besicovitch_seminorm_numeric(&spec, args.p, &cfg)?;
    let mut report = ReportDocument::new("seminorm", argv);
    report.source = Some(source);
    report.seminorm = Some(ConvergenceJson::new(&cfg.radii, &rep));
    report.parseval_norm_sqr = Some(spec.parseval_norm_sqr());
    report.config = Some(cfg);
    Ok(Outcome { report, code: 0 })
}

fn default_window(mu: &DiffractionMeasure, builtin_name: Option<&str>) -> ([f64; 2], [f64; 2]) {
    let half = match builtin_name {
        Some("olympic") => 6.0,
        Some("surprised") => 4.0,
        _ => {
            let extent = mu
                .components()
                .iter()
                .map(|c| c.center.iter().fold(0.0f64, |m, v| m.max(v.abs())) + c.radius)
                .fold(0.0f64, f64::max);
            (1.25 * extent).max(1.0)
        }
    };
    ([-half, -half], [half, half])
}

fn cmd_render(args: &RenderArgs, argv: Vec<String>) -> Result<Outcome, Error> {
    let src = &args.source;
    let (mu, source) = match &src.measure {
        Some(p) => (parse_measure(&read_text(p)?).map_err(|e| annotate(p, e))?, p.display().to_string()),
        None => {
            let (spec, source) = load_spec(src.spec.as_ref(), src.builtin.as_ref())?;
            (diffraction(&spec)?, source)
        }
    };
    if mu.dimension() > 2 {
        return Err(Error::Unsupported(format!(
            "cannot render a {}-dimensional measure",
            mu.dimension()
        )));
    }
    let (window_min, window_max) = match &args.window {
        Some(w) => wavediff::formats::parse_window(w)?,
        None => default_window(&mu, src.builtin.as_deref()),
    };
    let height = args.height.unwrap_or(args.width);
    let pitch = if args.width > 1 {
        (window_max[0] - window_min[0]) / (args.width - 1) as f64
    } else {
        window_max[0] - window_min[0]
    };
    let cfg = RenderConfig {
        sigma: args.sigma.unwrap_or(1.5 * pitch),
        gamma: args.gamma,
        normalize: !args.no_normalize,
    };
    let grid = rasterize(&mu, args.width, height, window_min, window_max, &cfg)?;
    let format = if args.plain { PgmFormat::P2 } else { PgmFormat::P5 };
    write_file(&args.out, &write_pgm(&grid, format))?;
    let mean = grid.pixels.iter().sum::<f64>() / grid.pixels.len() as f64;
    let mut report = ReportDocument::new("render", argv);
    report.source = Some(source);
    report.image = Some(ImageSummary {
        path: args.out.display().to_string(),
        width: grid.width,
        height: grid.height,
        window_min: grid.window_min,
        window_max: grid.window_max,
        sigma: cfg.sigma,
        gamma: cfg.gamma,
        normalize: cfg.normalize,
        max_intensity: grid.max_value(),
        mean_intensity: mean,
    });
    Ok(Outcome { report, code: 0 })
}

fn cmd_verify(args: &VerifyArgs, argv: Vec<String>) -> Result<Option<Outcome>, Error> {
    let known = checks();
    if let Some(bad) = args.only.iter().find(|id| !known.iter().any(|c| c.id == **id)) {
        return Err(Error::Input(format!("no check with id {bad}")));
    }
    if args.list {
        let listing: String = known
            .iter()
            .filter(|c| args.only.is_empty() || args.only.contains(&c.id))
            .map(|c| format!("{:>2}  {}\n", c.id, c.name))
            .collect();
        emit(&listing);
        return Ok(None);
    }
    let opts = VerifyOptions {
        inject_fault: args.inject_fault,
    };
    let mut records = run_checks(&args.only, &opts);
    for r in &records {
        eprintln!(
            "[{}] {:>2} {}: measured {:.3e}, bound {:.3e}",
            if r.passed { "PASS" } else { "FAIL" },
            r.id,
            r.name,
            r.measured,
            r.bound
        );
    }
    if !args.timings {
        for r in &mut records {
            r.runtime_s = None;
        }
    }
    let passed = records.iter().all(|r| r.passed);
    let mut report = ReportDocument::new("verify", argv);
    report.checks = records;
    report.passed = Some(passed);
    Ok(Some(Outcome {
        report,
        code: if passed { 0 } else { 1 },
    }))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    fs::write(path, bytes).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

/// Writes to stdout; a reader that hangs up early is not an error.
fn emit(text: &str) {
    let _ = io::stdout().lock().write_all(text.as_bytes());
}

fn run(cli: &Cli, argv: Vec<String>) -> Result<Option<Outcome>, Error> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Input("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Input(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Autocorr(a) => cmd_autocorr(a, argv).map(Some),
        Command::Diffract(a) => cmd_diffract(a, argv).map(Some),
        Command::Seminorm(a) => cmd_seminorm(a, argv).map(Some),
        Command::Render(a) => cmd_render(a, argv).map(Some),
        Command::Verify(a) => cmd_verify(a, argv),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match run(&cli, argv) {
        Ok(Some(outcome)) => {
            emit(&(outcome.report.to_json() + "\n"));
            ExitCode::from(outcome.code)
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wavediff: {e}");
            ExitCode::from(exit_code(e.class()))
        }
    }
}
