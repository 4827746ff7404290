use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spc_timescale::benchmark::{benchmark_check, render_check};
use spc_timescale::dataset::{generate_synthetic, read_dataset, write_dataset, ScaleRange, SynthSpec};
use spc_timescale::pipeline::{run_pipeline, write_outputs};
use spc_timescale::report::parse_json;
use spc_timescale::{Bandwidth, ContinuityMode, PipelineConfig, PipelineError, ReportBundle, Stage};

const EXIT_DATA: u8 = 2;

/// Relative-time alignment, logistic fitting and bootstrap growth timescales
/// for century-sampled social-complexity panels.
#[derive(Parser)]
#[command(name = "spc-timescale", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Threshold, alignment, full fit and out-of-sample validation.
    Fit(RunArgs),
    /// Everything in `fit` plus the bootstrap, timescales and empirical durations.
    Bootstrap(RunArgs),
    /// Everything in `fit` plus the continuity comparisons.
    Continuity(RunArgs),
    /// The complete analysis.
    Report(RunArgs),
    /// Compare new regional series against a previous report.
    Check(CheckArgs),
    /// Write a synthetic panel.
    Synth(SynthArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Panel CSV.
    #[arg(long, env = "SPCTS_INPUT")]
    input: PathBuf,
    /// Output directory.
    #[arg(long, env = "SPCTS_OUT", default_value = "out")]
    out: PathBuf,
    #[arg(long, env = "SPCTS_SEED", default_value_t = 0)]
    seed: u64,
    /// Bootstrap iterations.
    #[arg(long, env = "SPCTS_BOOTSTRAP", default_value_t = 1000)]
    bootstrap: usize,
    /// Validation repeats.
    #[arg(long, env = "SPCTS_VALIDATION", default_value_t = 100)]
    validation: usize,
    /// Kernel bandwidth, or `auto` for Scott's rule.
    #[arg(long, env = "SPCTS_BANDWIDTH", default_value = "auto")]
    bandwidth: Bandwidth,
    /// Plateau threshold multipliers.
    #[arg(long, env = "SPCTS_K_SIGMA", value_delimiter = ',', default_value = "1,3")]
    k_sigma: Vec<f64>,
    /// Continuity label columns to compare.
    #[arg(long, env = "SPCTS_MODES", value_delimiter = ',', default_value = "cultural,institutional")]
    modes: Vec<ContinuityMode>,
    /// Density grid size.
    #[arg(long, env = "SPCTS_GRID", default_value_t = 1024)]
    grid: usize,
    /// Raw score mapped to 0 instead of the panel minimum.
    #[arg(long, env = "SPCTS_SCALE_MIN", requires = "scale_max")]
    scale_min: Option<f64>,
    /// Raw score mapped to 1 instead of the panel maximum.
    #[arg(long, env = "SPCTS_SCALE_MAX", requires = "scale_min")]
    scale_max: Option<f64>,
}

#[derive(Args)]
struct CheckArgs {
    /// `report.json` written by an earlier run.
    #[arg(long, env = "SPCTS_REPORT")]
    report: PathBuf,
    /// New series in the panel CSV format.
    #[arg(long, env = "SPCTS_SERIES")]
    series: PathBuf,
    /// Also write the result to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// 35 regions, 12 of which stay on the low plateau.
    Demo,
    /// 23 regions spanning both plateaus.
    Uniform,
}

#[derive(Args)]
struct SynthArgs {
    /// Destination CSV, `-` for stdout.
    #[arg(long, default_value = "-")]
    out: PathBuf,
    #[arg(long, env = "SPCTS_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Preset::Demo)]
    preset: Preset,
    #[arg(long)]
    regions: Option<usize>,
    /// Standard deviation of the additive noise.
    #[arg(long)]
    noise: Option<f64>,
}

fn config(args: RunArgs, stage: Stage) -> Result<PipelineConfig, PipelineError> {
    let scale_range = match (args.scale_min, args.scale_max) {
        (Some(lo), Some(hi)) => Some(ScaleRange::new(lo, hi)?),
        _ => None,
    };
    Ok(PipelineConfig {
        input_path: args.input,
        output_dir: args.out,
        seed: args.seed,
        n_bootstrap: args.bootstrap,
        n_validation: args.validation,
        k_sigma_list: args.k_sigma,
        bandwidth: args.bandwidth,
        grid_size: args.grid,
        continuity_modes: args.modes,
        scale_range,
        stage,
        ..PipelineConfig::default()
    })
}

fn summary(b: &ReportBundle) {
    println!("threshold   spc1_0 = {:.4}", b.threshold.spc1_0);
    println!("alignment   {} retained, {} discarded", b.aligned.regions.len(), b.aligned.discarded.len());
    println!("full fit    rmse = {:.4}", b.full_fit.rmse);
    println!("validation  rho2 = {:.4} +- {:.1e}", b.validation.mean_rho2, b.validation.stderr_rho2);
    for t in &b.timescales {
        println!("timescale   k = {}: {:.0} years", t.k_sigma, t.duration_mean);
    }
    for f in &b.timescale_failures {
        println!("timescale   k = {}: unavailable ({})", f.k_sigma, f.reason);
    }
    for c in &b.continuity {
        println!("continuity  {}: mean segment {:.2} points", c.mode.name(), c.mean_length);
    }
}

fn run(args: RunArgs, stage: Stage) -> Result<(), PipelineError> {
    let cfg = config(args, stage)?;
    let bundle = run_pipeline(&cfg)?;
    write_outputs(&bundle, &cfg.output_dir)?;
    summary(&bundle);
    println!("wrote       {}", cfg.output_dir.join("report.txt").display());
    Ok(())
}

fn check(args: CheckArgs) -> Result<(), (u8, String)> {
    let data = |m: String| (EXIT_DATA, m);
    let text = std::fs::read_to_string(&args.report).map_err(|e| data(format!("{}: {e}", args.report.display())))?;
    let bundle = parse_json(&text).map_err(|e| data(format!("{}: {e}", args.report.display())))?;
    let series = read_dataset(&args.series).map_err(|e| data(e.to_string()))?;
    let reports = benchmark_check(&bundle, series).map_err(|e| (e.exit_code() as u8, e.to_string()))?;
    let rendered = render_check(&reports);
    if let Some(path) = &args.out {
        std::fs::write(path, &rendered).map_err(|e| (1, format!("{}: {e}", path.display())))?;
    }
    print!("{rendered}");
    Ok(())
}

fn synth(args: SynthArgs) -> Result<(), (u8, String)> {
    let mut spec = match args.preset {
        Preset::Demo => SynthSpec::demo(),
        Preset::Uniform => SynthSpec::default(),
    };
    if let Some(n) = args.regions {
        spec.n_regions = n;
    }
    if let Some(s) = args.noise {
        spec.noise_sigma = s;
    }
    let data = generate_synthetic(&spec, args.seed).map_err(|e| (EXIT_DATA, e.to_string()))?;
    let result = if args.out.as_os_str() == "-" {
        write_dataset(&data, std::io::stdout().lock())
    } else {
        let file = std::fs::File::create(&args.out).map_err(|e| (1, format!("{}: {e}", args.out.display())))?;
        write_dataset(&data, file)
    };
    result.map_err(|e| (1, e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(a) => run(a, Stage::Fit).map_err(|e| (e.exit_code() as u8, e.to_string())),
        Command::Bootstrap(a) => run(a, Stage::Bootstrap).map_err(|e| (e.exit_code() as u8, e.to_string())),
        Command::Continuity(a) => run(a, Stage::Continuity).map_err(|e| (e.exit_code() as u8, e.to_string())),
        Command::Report(a) => run(a, Stage::Report).map_err(|e| (e.exit_code() as u8, e.to_string())),
        Command::Check(a) => check(a),
        Command::Synth(a) => synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
