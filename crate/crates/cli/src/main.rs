use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use signfem::harness::{
    self, identity_suite, run_sweep, H1Convention, ManufacturedCase, Scenario, SweepOptions,
    REFERENCE_M_LIST, UNIT,
};
use signfem::stability::{self, DEFAULT_EPSILON};
use signfem::{CountRounding, Error, MeshConfig, PhysicalConfig};

mod svg;

#[derive(Parser)]
#[command(name = "signfem", version, about = "Stability analysis and experiments for P1 FEM with sign-changing coefficients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify (kappa, r[, r_y]) as stable or unstable.
    Classify(ClassifyArgs),
    /// List critical mesh widths h_minus for m = 1..m-max.
    Critical(CriticalArgs),
    /// Run a manufactured-solution sweep and write a CSV.
    Sweep(SweepArgs),
    /// Compare the dense generalized spectrum with the predicted one.
    Spectrum(SpectrumArgs),
    /// Run the randomized analytic identity suite.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct Physics {
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    sigma_minus: f64,
    #[arg(long, default_value_t = 1.2, allow_negative_numbers = true)]
    sigma_plus: f64,
    /// Contrast sigma_plus / sigma_minus; overrides the sigma pair with
    /// sigma_minus = -1.
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
}

impl Physics {
    fn kappa(&self) -> f64 {
        self.kappa.unwrap_or(self.sigma_plus / self.sigma_minus)
    }

    fn sigma_minus(&self) -> f64 {
        if self.kappa.is_some() {
            -1.0
        } else {
            self.sigma_minus
        }
    }

    fn config(&self, half_width: f64) -> signfem::Result<PhysicalConfig> {
        match self.kappa {
            Some(k) => PhysicalConfig::from_kappa(k, half_width),
            None => PhysicalConfig::new(self.sigma_minus, self.sigma_plus, half_width),
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, ValueEnum)]
enum ScenarioArg {
    Critical,
    NearCritical,
    Flipped,
    Custom,
}

#[derive(Copy, Clone, ValueEnum)]
enum RoundingArg {
    Strict,
    Truncate,
}

#[derive(Copy, Clone, ValueEnum)]
enum H1Arg {
    Seminorm,
    Full,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    physics: Physics,
    #[arg(long)]
    r: f64,
    /// Fully discrete classification when given.
    #[arg(long)]
    ry: Option<f64>,
    /// Bounded-domain classification on (-L, L) when given.
    #[arg(long = "L")]
    half_width: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
}

#[derive(Args)]
struct CriticalArgs {
    #[command(flatten)]
    physics: Physics,
    #[arg(long)]
    r: f64,
    #[arg(long)]
    ry: Option<f64>,
    #[arg(long, default_value_t = 10)]
    m_max: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    physics: Physics,
    #[arg(long = "L")]
    half_width: Option<f64>,
    #[arg(long, value_enum, default_value = "flipped")]
    scenario: ScenarioArg,
    /// Comma-separated mesh indices; defaults to the reference list.
    #[arg(long, value_delimiter = ',')]
    m_list: Option<Vec<usize>>,
    /// Use m = 1..=m-max instead of a list.
    #[arg(long, conflicts_with = "m_list")]
    m_max: Option<usize>,
    /// Base h_minus of the custom scenario (h_minus = base / m).
    #[arg(long)]
    h_minus: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    ry: Option<f64>,
    #[arg(long, value_enum, default_value = "strict")]
    count_rounding: RoundingArg,
    #[arg(long, value_enum, default_value = "seminorm")]
    h1_norm: H1Arg,
    /// Cross-check against the dense solver where the mesh is small.
    #[arg(long)]
    dense_check: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Directory for `x y value` nodal dumps, one file per mesh.
    #[arg(long)]
    field_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    physics: Physics,
    /// Half-width; defaults to sqrt(11) pi / 4.
    #[arg(long = "L")]
    half_width: Option<f64>,
    #[arg(long, required_unless_present = "n_minus", requires_all = ["r", "ry"])]
    h_minus: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    ry: Option<f64>,
    /// Cell counts instead of `--h-minus/--r/--ry`.
    #[arg(long, conflicts_with = "h_minus", requires_all = ["n_plus", "big_m"])]
    n_minus: Option<usize>,
    #[arg(long)]
    n_plus: Option<usize>,
    #[arg(long = "M")]
    big_m: Option<usize>,
    #[arg(long, value_enum, default_value = "strict")]
    count_rounding: RoundingArg,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1000)]
    cases: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Checks(String),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(Error::Config(_) | Error::Domain(_) | Error::TooLarge { .. }) => 3,
            Failure::Lib(Error::NoRealRoot(_) | Error::NoCriticalMesh(_) | Error::NoAdmissibleRatio(_)) => 4,
            _ => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Checks(s) => write!(f, "{s}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

fn rounding(r: RoundingArg) -> CountRounding {
    match r {
        RoundingArg::Strict => CountRounding::Strict,
        RoundingArg::Truncate => CountRounding::Truncate,
    }
}

#[derive(Serialize)]
struct ClassifyDoc {
    kappa: f64,
    r: f64,
    ry: Option<f64>,
    half_width: Option<f64>,
    verdict: stability::StabilityVerdict,
}

fn classify(a: &ClassifyArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let kappa = a.physics.kappa();
    if let Some(l) = a.half_width {
        a.physics.config(l)?;
    }
    let verdict = match (a.half_width, a.ry) {
        (Some(_), ry) => stability::classify_bounded(kappa, a.r, ry, a.epsilon)?,
        (None, Some(ry)) => stability::classify_full(kappa, a.r, ry)?,
        (None, None) => stability::classify_semi(kappa, a.r)?,
    };
    let doc = ClassifyDoc {
        kappa,
        r: a.r,
        ry: a.ry,
        half_width: a.half_width,
        verdict: verdict.scaled(a.physics.sigma_minus()),
    };
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)?;
    Ok(())
}

fn critical(a: &CriticalArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let pairs = stability::critical_meshes(a.physics.kappa(), a.r, a.ry, a.m_max)?;
    match a.format {
        Format::Csv => {
            writeln!(out, "m,h_minus")?;
            for (m, h) in pairs {
                writeln!(out, "{m},{h:.16e}")?;
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Row {
                m: usize,
                h_minus: f64,
            }
            let rows: Vec<Row> = pairs.into_iter().map(|(m, h_minus)| Row { m, h_minus }).collect();
            serde_json::to_writer_pretty(&mut *out, &rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn scenario(a: &SweepArgs) -> Result<Scenario, Failure> {
    Ok(match a.scenario {
        ScenarioArg::Critical => Scenario::Critical,
        ScenarioArg::NearCritical => Scenario::NearCritical,
        ScenarioArg::Flipped => Scenario::Flipped,
        ScenarioArg::Custom => match (a.h_minus, a.r, a.ry) {
            (Some(base_h_minus), Some(r), Some(ry)) => Scenario::Custom { base_h_minus, r, ry },
            _ => {
                return Err(Error::Config("the custom scenario needs --h-minus, --r and --ry".into()).into());
            }
        },
    })
}

fn sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let phys = a.physics.config(a.half_width.unwrap_or(10.0 * UNIT))?;
    let scenario = scenario(a)?;
    let m_list = match (&a.m_list, a.m_max) {
        (Some(list), _) => list.clone(),
        (None, Some(n)) => (1..=n).collect(),
        (None, None) => REFERENCE_M_LIST.to_vec(),
    };
    let opts = SweepOptions {
        rounding: rounding(a.count_rounding),
        h1: match a.h1_norm {
            H1Arg::Seminorm => H1Convention::Seminorm,
            H1Arg::Full => H1Convention::Full,
        },
        dense_check: a.dense_check,
        spectral: true,
    };
    let records = run_sweep(scenario, &phys, &m_list, &opts)?;

    let mut sink: Box<dyn Write + '_> = match &a.out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(&mut *out),
    };
    match a.format {
        Format::Csv => harness::write_csv(&records, &mut sink)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, &records)?;
            writeln!(sink)?;
        }
    }
    drop(sink);

    if let Some(p) = &a.svg {
        std::fs::write(p, svg::error_plot(&records))?;
    }
    if let Some(dir) = &a.field_dir {
        std::fs::create_dir_all(dir)?;
        let case = ManufacturedCase::new(phys);
        for &m in &m_list {
            let mesh = scenario.mesh(&phys, m, opts.rounding)?;
            let sol = harness::solve(&phys, &mesh, &case)?;
            sol.write_field(io::BufWriter::new(File::create(dir.join(format!("field_m{m}.txt")))?))?;
        }
    }
    Ok(())
}

fn spectrum(a: &SpectrumArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let l = a.half_width.unwrap_or(UNIT);
    let phys = a.physics.config(l)?;
    let mesh = match (a.n_minus, a.n_plus, a.big_m, a.h_minus, a.r, a.ry) {
        (Some(nm), Some(np), Some(big_m), ..) => MeshConfig::from_counts(l, nm, np, big_m)?,
        (_, _, _, Some(h), Some(r), Some(ry)) => MeshConfig::from_ratios(l, h, r, ry, rounding(a.count_rounding))?,
        _ => return Err(Error::Config("spectrum needs --h-minus/--r/--ry or --n-minus/--n-plus/--M".into()).into()),
    };
    let cmp = harness::compare_spectrum(&phys, &mesh)?;
    match a.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &cmp)?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(out, "predicted,computed")?;
            for (p, c) in cmp.predicted.iter().zip(&cmp.computed) {
                writeln!(out, "{p:.16e},{c:.16e}")?;
            }
            writeln!(out, "# max_deviation {:.3e}", cmp.max_deviation)?;
        }
    }
    if cmp.max_deviation > 1e-9 {
        return Err(Failure::Checks(format!(
            "spectrum deviates from the prediction by {:.3e}",
            cmp.max_deviation
        )));
    }
    Ok(())
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let checks = identity_suite(a.cases, a.seed)?;
    match a.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &checks)?;
            writeln!(out)?;
        }
        Format::Csv => {
            for c in &checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                writeln!(
                    out,
                    "{tag} {} (cases {}, max deviation {:.3e}, tolerance {:.0e})",
                    c.name, c.cases, c.max_deviation, c.tolerance
                )?;
            }
        }
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Checks(format!("identities failed: {}", failed.join(", "))))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let res = match &cli.command {
        Command::Classify(a) => classify(a, &mut out),
        Command::Critical(a) => critical(a, &mut out),
        Command::Sweep(a) => sweep(a, &mut out),
        Command::Spectrum(a) => spectrum(a, &mut out),
        Command::Verify(a) => verify(a, &mut out),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
