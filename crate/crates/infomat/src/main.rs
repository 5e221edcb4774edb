//! Command-line driver: generation, transformation, estimation, exact
//! evaluation, region measures, rendering, and the oracle-backed identity
//! suites. Exit code 0 on success, 2 on any validation failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use infomat::datasets::{read_dataset, window, write_dataset};
use infomat::error::{Error, Result};
use infomat::generators::{
    ar_joint_covariance, ar_sample, ising_joint_pmf, ising_sample, nonlinear_shift, ArModelFile,
    IsingPolicy, JointPMF,
};
use infomat::infomat::{
    estimate_gaussian, estimate_plugin_discrete, infomat_from_gaussian_model, InfoMat, Truncation,
};
use infomat::measures::{
    delayed_di, delayed_di_via_columns, directed_information, instantaneous, te_sum,
    verify_identities, IdentityReport,
};
use infomat::oracle::{pmf_infomat, pmf_total_mi};
use infomat::render::{render_csv, render_pgm, render_svg, Colormap, RenderSpec};

#[derive(Parser)]
#[command(
    name = "infomat",
    about = "Conditional mutual information matrices for paired sequences",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample windows from a Gaussian autoregressive model
    GenAr(GenArArgs),
    /// Sample windows from the binary Ising channel under an input policy
    GenIsing(GenIsingArgs),
    /// Cyclically shift the y sequence and apply monotone maps per window
    Transform(TransformArgs),
    /// Estimate an InfoMat from sampled data
    Estimate(EstimateArgs),
    /// Evaluate an exact InfoMat from a model or policy
    Exact(ExactArgs),
    /// Region measures and identity residuals of a stored InfoMat
    Measures(MeasuresArgs),
    /// Render a stored InfoMat as a heatmap
    Render(RenderArgs),
    /// Run the oracle-backed identity suites
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenArArgs {
    /// AR model JSON (arrays alpha_x, alpha_y, beta_x, beta_y, noise variances)
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    n_windows: usize,
    /// Window length (overrides the model file's horizon)
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenIsingArgs {
    /// Policy JSON path, or the literal `iid`
    #[arg(long)]
    policy: String,
    #[arg(long)]
    n_windows: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Cyclic shift applied to y within each window
    #[arg(long, default_value_t = 0)]
    shift: usize,
    #[arg(long, default_value = "identity")]
    map_x: String,
    #[arg(long, default_value = "identity")]
    map_y: String,
    /// Window length used to segment the stored sequence
    #[arg(long)]
    m: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Gaussian,
    Plugin,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    /// Plug-in history truncation `Lx,Ly` (default: full histories)
    #[arg(long)]
    truncation: Option<String>,
    /// Window length
    #[arg(long)]
    m: usize,
    /// Window stride (default: m, disjoint blocks)
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExactArgs {
    /// AR model JSON (exact Gaussian route)
    #[arg(long, conflicts_with = "ising_policy")]
    ar_model: Option<PathBuf>,
    /// Ising policy JSON or `iid` (exact enumeration route, m <= 8)
    #[arg(long)]
    ising_policy: Option<String>,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Units {
    Nats,
    Bits,
}

impl Units {
    fn scale(&self) -> f64 {
        match self {
            Units::Nats => 1.0,
            Units::Bits => std::f64::consts::LN_2,
        }
    }
    fn label(&self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }
}

#[derive(Args)]
struct MeasuresArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// InfoMat of the swapped pair (Y, X); enables the identity residuals
    #[arg(long)]
    reverse: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "nats")]
    units: Units,
    /// Identity-residual tolerance, in nats
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Pgm,
    Svg,
    Csv,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    fmt: Format,
    #[arg(long)]
    out: PathBuf,
    /// Value mapped to full intensity (default: matrix maximum)
    #[arg(long)]
    clip: Option<f64>,
    /// Use the grayscale colormap for SVG output
    #[arg(long, default_value_t = false)]
    grayscale: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// all | identities | gaussian | plugin
    #[arg(long, default_value = "all")]
    suite: String,
}

fn main() -> ExitCode {
    // die quietly when stdout is a closed pipe (e.g. `infomat ... | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::GenAr(args) => {
            let model = ArModelFile::load(&args.model)?.into_model(Some(args.m))?;
            let ds = ar_sample(&model, args.n_windows, args.seed)?;
            write_dataset(&ds.to_sequence_pair()?, &args.out)?;
            println!(
                "wrote {} windows of length {} to {}",
                args.n_windows,
                args.m,
                args.out.display()
            );
            Ok(true)
        }
        Command::GenIsing(args) => {
            let policy = IsingPolicy::from_spec(&args.policy)?;
            let ds = ising_sample(&policy, args.n_windows, args.m, args.seed)?;
            write_dataset(&ds.to_sequence_pair()?, &args.out)?;
            println!(
                "wrote {} windows of length {} to {}",
                args.n_windows,
                args.m,
                args.out.display()
            );
            Ok(true)
        }
        Command::Transform(args) => {
            let pair = read_dataset(&args.input)?;
            let ds = window(&pair, args.m, args.m)?;
            let out = nonlinear_shift(&ds, args.shift, args.map_x.parse()?, args.map_y.parse()?)?;
            write_dataset(&out.to_sequence_pair()?, &args.out)?;
            println!("wrote transformed data to {}", args.out.display());
            Ok(true)
        }
        Command::Estimate(args) => {
            let pair = read_dataset(&args.input)?;
            let stride = args.stride.unwrap_or(args.m);
            let ds = window(&pair, args.m, stride)?;
            let mat = match args.method {
                Method::Gaussian => {
                    if args.truncation.is_some() {
                        return Err(Error::InvalidArgument(
                            "--truncation applies to the plug-in method only".into(),
                        ));
                    }
                    estimate_gaussian(&ds)?
                }
                Method::Plugin => {
                    let truncation = match &args.truncation {
                        None => Truncation::Full,
                        Some(spec) => parse_truncation(spec)?,
                    };
                    estimate_plugin_discrete(&ds, truncation)?
                }
            };
            for warning in mat.diagnostics() {
                eprintln!("warning: {warning}");
            }
            mat.write_csv(&args.out)?;
            println!(
                "estimated {}x{} InfoMat ({}) from {} windows -> {}",
                args.m,
                args.m,
                mat.provenance().tag(),
                ds.n_windows(),
                args.out.display()
            );
            Ok(true)
        }
        Command::Exact(args) => {
            let mat = match (&args.ar_model, &args.ising_policy) {
                (Some(path), None) => {
                    let model = ArModelFile::load(path)?.into_model(Some(args.m))?;
                    infomat_from_gaussian_model(&ar_joint_covariance(&model)?)?
                }
                (None, Some(spec)) => {
                    let policy = IsingPolicy::from_spec(spec)?;
                    pmf_infomat(&ising_joint_pmf(&policy, args.m)?)?
                }
                _ => {
                    return Err(Error::InvalidArgument(
                        "give exactly one of --ar-model or --ising-policy".into(),
                    ))
                }
            };
            mat.write_csv(&args.out)?;
            println!(
                "exact {}x{} InfoMat ({}) -> {}",
                args.m,
                args.m,
                mat.provenance().tag(),
                args.out.display()
            );
            Ok(true)
        }
        Command::Measures(args) => run_measures(args),
        Command::Render(args) => {
            let mat = InfoMat::read_csv(&args.input)?;
            let spec = RenderSpec {
                colormap: if args.grayscale {
                    Colormap::Grayscale
                } else {
                    Colormap::FiveStop
                },
                value_clip: args.clip,
                clamp_negative: true,
            };
            match args.fmt {
                Format::Pgm => render_pgm(&mat, &spec, &args.out)?,
                Format::Svg => render_svg(&mat, &spec, &args.out)?,
                Format::Csv => render_csv(&mat, &args.out)?,
            }
            println!("rendered {} -> {}", args.input.display(), args.out.display());
            Ok(true)
        }
        Command::Verify(args) => run_verify(&args.suite),
    }
}

fn parse_truncation(spec: &str) -> Result<Truncation> {
    if spec == "full" {
        return Ok(Truncation::Full);
    }
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::InvalidArgument(format!(
            "truncation must be `Lx,Ly` or `full`, got {spec:?}"
        )));
    }
    let l_x = parts[0].trim().parse().map_err(|_| {
        Error::InvalidArgument(format!("bad truncation length {:?}", parts[0]))
    })?;
    let l_y = parts[1].trim().parse().map_err(|_| {
        Error::InvalidArgument(format!("bad truncation length {:?}", parts[1]))
    })?;
    Ok(Truncation::Last(l_x, l_y))
}

#[derive(serde::Serialize)]
struct MeasureValues {
    total_mi: f64,
    directed_information: f64,
    delayed_di_1: f64,
    instantaneous: f64,
    te_sums: Vec<f64>,
}

#[derive(serde::Serialize)]
struct MeasuresReport {
    units: &'static str,
    m: usize,
    forward: MeasureValues,
    #[serde(skip_serializing_if = "Option::is_none")]
    reverse: Option<MeasureValues>,
    #[serde(skip_serializing_if = "Option::is_none")]
    identities: Option<IdentityReport>,
}

fn measure_values(mat: &InfoMat, scale: f64) -> Result<MeasureValues> {
    Ok(MeasureValues {
        total_mi: mat.total_mi() / scale,
        directed_information: directed_information(mat) / scale,
        delayed_di_1: delayed_di(mat, 1)? / scale,
        instantaneous: instantaneous(mat) / scale,
        te_sums: (1..mat.m())
            .map(|i| te_sum(mat, i).map(|v| v / scale))
            .collect::<Result<_>>()?,
    })
}

fn run_measures(args: MeasuresArgs) -> Result<bool> {
    let mat = InfoMat::read_csv(&args.input)?;
    let scale = args.units.scale();
    let unit = args.units.label();
    let m = mat.m();
    let forward = measure_values(&mat, scale)?;

    println!("m = {m}, provenance = {}, units = {unit}", mat.provenance().tag());
    println!("total MI                 {:+.6}", forward.total_mi);
    println!("directed information     {:+.6}", forward.directed_information);
    println!("  normalized (per step)  {:+.6}", forward.directed_information / m as f64);
    println!("delayed DI (k=1)         {:+.6}", forward.delayed_di_1);
    println!("instantaneous            {:+.6}", forward.instantaneous);
    for (i, te) in forward.te_sums.iter().enumerate() {
        println!("transfer entropy T_{:<2}    {te:+.6}", i + 2);
    }

    let mut reverse = None;
    let mut identities = None;
    if let Some(path) = &args.reverse {
        let mat_yx = InfoMat::read_csv(path)?;
        reverse = Some(measure_values(&mat_yx, scale)?);
        let mut report = verify_identities(&mat, &mat_yx, args.tol)?;
        for check in &mut report.checks {
            check.residual /= scale;
            check.tolerance /= scale;
        }
        println!("\nidentity residuals ({unit}, tolerance {:.1e}):", args.tol / scale);
        for check in &report.checks {
            println!(
                "  {:<28} {:+.3e}  {}",
                check.name,
                check.residual,
                if check.pass { "pass" } else { "FAIL" }
            );
        }
        identities = Some(report);
    }

    let all_pass = identities.as_ref().map(|r| r.all_pass()).unwrap_or(true);
    if let Some(path) = &args.report {
        let report = MeasuresReport {
            units: unit,
            m,
            forward,
            reverse,
            identities,
        };
        std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
        println!("\nreport -> {}", path.display());
    }
    Ok(all_pass)
}

// --- verification suites -----------------------------------------------------

struct SuiteOutcome {
    name: &'static str,
    checks: usize,
    worst: f64,
    pass: bool,
}

fn run_verify(suite: &str) -> Result<bool> {
    let mut outcomes = Vec::new();
    match suite {
        "all" => {
            outcomes.extend(suite_identities()?);
            outcomes.push(suite_gaussian()?);
            outcomes.push(suite_plugin()?);
        }
        "identities" => outcomes.extend(suite_identities()?),
        "gaussian" => outcomes.push(suite_gaussian()?),
        "plugin" => outcomes.push(suite_plugin()?),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown suite {other:?}; available: all, identities, gaussian, plugin"
            )))
        }
    }
    println!("{:<34} {:>7} {:>13}  result", "suite", "checks", "worst");
    let mut all = true;
    for o in &outcomes {
        println!(
            "{:<34} {:>7} {:>13.3e}  {}",
            o.name,
            o.checks,
            o.worst,
            if o.pass { "PASS" } else { "FAIL" }
        );
        all &= o.pass;
    }
    Ok(all)
}

fn suite_identities() -> Result<Vec<SuiteOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(20240901);
    let mut chain_worst = 0.0f64;
    let mut law_worst = 0.0f64;
    let mut regroup_worst = 0.0f64;
    let mut law_checks = 0usize;
    for _ in 0..100 {
        let pmf = JointPMF::random_dirichlet(3, 2, 2, &mut rng)?;
        let mat_xy = pmf_infomat(&pmf)?;
        let mat_yx = pmf_infomat(&pmf.swapped())?;
        chain_worst = chain_worst.max((mat_xy.total_mi() - pmf_total_mi(&pmf)).abs());
        let report = verify_identities(&mat_xy, &mat_yx, 1e-9)?;
        for check in &report.checks {
            law_worst = law_worst.max(check.residual.abs());
            law_checks += 1;
        }
        for k in 1..3 {
            let gap = (delayed_di(&mat_xy, k)? - delayed_di_via_columns(&mat_xy, k)?).abs();
            regroup_worst = regroup_worst.max(gap);
        }
    }
    Ok(vec![
        SuiteOutcome {
            name: "chain rule vs oracle (100 joints)",
            checks: 100,
            worst: chain_worst,
            pass: chain_worst <= 1e-9,
        },
        SuiteOutcome {
            name: "conservation laws (100 joints)",
            checks: law_checks,
            worst: law_worst,
            pass: law_worst <= 1e-9,
        },
        SuiteOutcome {
            name: "delayed-DI regrouping",
            checks: 200,
            worst: regroup_worst,
            pass: regroup_worst <= 1e-12,
        },
    ])
}

fn suite_gaussian() -> Result<SuiteOutcome> {
    use infomat::generators::GaussianARModel;
    let expected = -0.5 * (1.0 - 0.81f64).ln();
    let model = GaussianARModel::iid_correlated(8, 0.9);
    let mat = infomat_from_gaussian_model(&ar_joint_covariance(&model)?)?;
    let mut worst = 0.0f64;
    for i in 1..=8 {
        for j in 1..=8 {
            let gap = if i == j {
                (mat.entry(i, j) - expected).abs()
            } else {
                mat.entry(i, j).abs()
            };
            worst = worst.max(gap);
        }
    }
    Ok(SuiteOutcome {
        name: "exact gaussian iid rho=0.9",
        checks: 64,
        worst,
        pass: worst <= 1e-9,
    })
}

fn suite_plugin() -> Result<SuiteOutcome> {
    // relabeling invariance: flip both alphabets, entries must match exactly
    let ds = ising_sample(&IsingPolicy::IidUniform, 30_000, 5, 77)?;
    let mat = estimate_plugin_discrete(&ds, Truncation::Last(2, 2))?;
    let flipped = {
        let windows: Vec<infomat::datasets::Window> = ds
            .windows()
            .iter()
            .map(|w| infomat::datasets::Window {
                x: w.x.iter().map(|&v| 1.0 - v).collect(),
                y: w.y.iter().map(|&v| 1.0 - v).collect(),
            })
            .collect();
        infomat::datasets::WindowedDataset::from_windows(
            windows,
            5,
            5,
            1,
            1,
            infomat::datasets::Kind::Discrete { alphabet_size: 2 },
        )?
    };
    let mat_flipped = estimate_plugin_discrete(&flipped, Truncation::Last(2, 2))?;
    let mut worst = 0.0f64;
    for (a, b) in mat.entries().iter().zip(mat_flipped.entries()) {
        worst = worst.max((a - b).abs());
    }
    Ok(SuiteOutcome {
        name: "plug-in relabeling invariance",
        checks: 25,
        worst,
        pass: worst == 0.0,
    })
}
