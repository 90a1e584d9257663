use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use rgtv::eval::analysis::{curves_csv, histogram_csv, rgtv_iter_csv, spectrum_csv};
use rgtv::eval::io::{read_image, read_kernel, write_image, write_kernel};
use rgtv::eval::synth::{default_step, StepVariant};
use rgtv::eval::{error_ratio, kernel_ncc, psnr, weight_histogram, EvalReport, DEFAULT_BINS};
use rgtv::fourier::edge_taper;
use rgtv::pipeline::{blind_deblur, blind_deblur_gaussian, learn_a, nonblind_finish};
use rgtv::spectral::iterative_rgtv_filter;
use rgtv::{BlurKernel, DeblurConfig, Error, Image, WeightParams};

/// Usage errors get their own code, apart from the library error codes.
const EXIT_USAGE: u8 = 64;
const EXIT_THREADS: u8 = 70;

#[derive(Parser)]
#[command(name = "rgtv", version, about = "Blind image deblurring with graph priors")]
struct Cli {
    /// Accepted for reproducible invocations; every computation is deterministic already.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Blind deblurring with the skeleton-based kernel estimator.
    Deblur(DeblurArgs),
    /// Blind deblurring with the fast spectral filter for Gaussian-like blur.
    DeblurGaussian(DeblurArgs),
    /// Deblur a synthetic pair and score it against the true kernel.
    Eval(EvalArgs),
    /// Emit analysis tables as CSV.
    #[command(subcommand)]
    Analyze(Analyze),
    /// Fit the Gaussian-blur coefficient from sharp/blurred pairs.
    LearnA(LearnArgs),
}

#[derive(Args)]
struct Tuning {
    #[arg(long, default_value_t = 9)]
    kernel_side: usize,
    /// JSON file with a full configuration; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    beta0: Option<f64>,
    #[arg(long)]
    alternations: Option<usize>,
    #[arg(long)]
    a0: Option<f64>,
    /// Estimate the condition number of each skeleton system and refine ill-posed ones.
    #[arg(long)]
    check_conditioning: bool,
}

impl Tuning {
    fn config(&self) -> rgtv::Result<DeblurConfig> {
        let mut cfg = match &self.config {
            Some(p) => serde_json::from_str(&fs::read_to_string(p)?)?,
            None => DeblurConfig::with_kernel_side(self.kernel_side),
        };
        if self.config.is_some() && self.kernel_side != 9 {
            cfg.kernel_side = self.kernel_side;
        }
        if let Some(v) = self.sigma {
            cfg.sigma = v;
        }
        if let Some(v) = self.mu {
            cfg.mu = v;
        }
        if let Some(v) = self.beta0 {
            cfg.beta0 = v;
        }
        if let Some(v) = self.alternations {
            cfg.alternations = v;
        }
        if let Some(v) = self.a0 {
            cfg.gaussian_a0 = v;
        }
        if self.check_conditioning {
            cfg.check_conditioning = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct DeblurArgs {
    /// Blurred input (PNG or PGM).
    input: PathBuf,
    /// Restored image.
    #[arg(short, long)]
    output: PathBuf,
    /// Where to write the estimated kernel as text.
    #[arg(long)]
    kernel_out: Option<PathBuf>,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    sharp: PathBuf,
    #[arg(long)]
    blurred: PathBuf,
    /// Ground-truth kernel (text or image).
    #[arg(long)]
    kernel: PathBuf,
    /// Score this kernel instead of estimating one.
    #[arg(long)]
    kernel_estimate: Option<PathBuf>,
    #[arg(long, default_value = "rgtv", value_parser = ["rgtv", "gaussian"])]
    method: String,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Also write the restoration.
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Subcommand)]
enum Analyze {
    /// Pairwise regularizer curves and slopes.
    Curves {
        #[arg(long, default_value_t = 0.1)]
        sigma: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Edge-weight histogram of an image patch.
    Histogram {
        input: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        sigma: f64,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Relative graph spectra of the step-signal variants.
    Spectrum {
        #[arg(long, default_value_t = 0.3)]
        sigma: f64,
        #[arg(long, default_value_t = 0.02)]
        noise: f64,
        #[arg(long, default_value_t = 1.0)]
        blur: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Iterates of the spectral filter on a blurred noisy step.
    RgtvIter {
        #[arg(long, default_value_t = 0.3)]
        sigma: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 20)]
        iters: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct LearnArgs {
    /// Sharp images, paired in order with --blurred.
    #[arg(long, required = true, num_args = 1..)]
    sharp: Vec<PathBuf>,
    #[arg(long, required = true, num_args = 1..)]
    blurred: Vec<PathBuf>,
}

fn emit(text: &str, output: Option<&Path>) -> rgtv::Result<()> {
    match output {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn estimate(method: &str, b: &Image, cfg: &DeblurConfig) -> rgtv::Result<BlurKernel> {
    let (k, _) = if method == "gaussian" {
        blind_deblur_gaussian(b, cfg)?
    } else {
        blind_deblur(b, cfg)?
    };
    Ok(k)
}

fn deblur(args: &DeblurArgs, method: &str) -> rgtv::Result<()> {
    let cfg = args.tuning.config()?;
    let b = read_image(&args.input)?;
    let k = estimate(method, &b, &cfg)?;
    // taper only for the final solve; estimation already handles borders
    let x = nonblind_finish(&edge_taper(&b, &k)?, &k, cfg.nonblind_beta)?;
    write_image(&args.output, &x)?;
    if let Some(p) = &args.kernel_out {
        write_kernel(p, &k)?;
    }
    Ok(())
}

fn eval(args: &EvalArgs) -> rgtv::Result<()> {
    let cfg = args.tuning.config()?;
    let x = read_image(&args.sharp)?;
    let b = read_image(&args.blurred)?;
    x.same_dims(&b)?;
    let k_true = read_kernel(&args.kernel)?;
    let mut times = BTreeMap::new();

    let t = Instant::now();
    let k_hat = match &args.kernel_estimate {
        Some(p) => read_kernel(p)?,
        None => {
            let k = estimate(&args.method, &b, &cfg)?;
            times.insert("kernel_estimation".to_string(), t.elapsed().as_secs_f64());
            k
        }
    };
    let t = Instant::now();
    let x_est = nonblind_finish(&b, &k_hat, cfg.nonblind_beta)?;
    times.insert("nonblind_finish".to_string(), t.elapsed().as_secs_f64());
    let x_gt = nonblind_finish(&b, &k_true, cfg.nonblind_beta)?;

    let mut report = EvalReport::new(error_ratio(&x, &x_est, &x_gt)?, psnr(&x, &x_est)?, kernel_ncc(&k_hat, &k_true)?);
    report.wall_time_seconds = times;
    report.config = Some(cfg);
    if let Some(p) = &args.output {
        write_image(p, &x_est)?;
    }
    let mut json = report.to_json()?;
    json.push('\n');
    emit(&json, args.report.as_deref())
}

fn analyze(cmd: &Analyze) -> rgtv::Result<()> {
    match cmd {
        Analyze::Curves { sigma, points, output } => {
            let p = WeightParams::new(*sigma, 0.01)?;
            if *points < 2 {
                return Err(Error::InvalidParameter("need at least 2 points".into()));
            }
            emit(&curves_csv(p.sigma, *points), output.as_deref())
        }
        Analyze::Histogram { input, sigma, bins, output } => {
            let patch = read_image(input)?;
            let h = weight_histogram(&patch, WeightParams::new(*sigma, 0.01)?, *bins)?;
            emit(&histogram_csv(&h), output.as_deref())
        }
        Analyze::Spectrum { sigma, noise, blur, output } => {
            let base = default_step();
            let mut signals = Vec::new();
            for v in StepVariant::ALL {
                signals.push((v.name(), v.apply(&base, *noise, *blur, 0)?));
            }
            let signals: Vec<(&str, Image)> = signals;
            emit(&spectrum_csv(&signals, WeightParams::new(*sigma, 0.01)?)?, output.as_deref())
        }
        Analyze::RgtvIter { sigma, mu, iters, output } => {
            let y = StepVariant::BlurredNoisy.apply(&default_step(), 1e-4, 1.0, 0)?;
            let run = iterative_rgtv_filter(&y, WeightParams::new(*sigma, 0.01)?, *mu, *iters, 1e-4)?;
            emit(&rgtv_iter_csv(&run), output.as_deref())
        }
    }
}

fn learn(args: &LearnArgs) -> rgtv::Result<()> {
    if args.sharp.len() != args.blurred.len() {
        return Err(Error::InvalidInput(format!(
            "{} sharp images but {} blurred images",
            args.sharp.len(),
            args.blurred.len()
        )));
    }
    let pairs = args
        .sharp
        .iter()
        .zip(&args.blurred)
        .map(|(s, b)| Ok((read_image(s)?, read_image(b)?)))
        .collect::<rgtv::Result<Vec<_>>>()?;
    println!("{}", learn_a(&pairs)?);
    Ok(())
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("RGTV_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("RGTV_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error [threads]: {msg}");
        return ExitCode::from(EXIT_THREADS);
    }
    let _ = cli.seed;
    let res = match &cli.command {
        Command::Deblur(a) => deblur(a, "rgtv"),
        Command::DeblurGaussian(a) => deblur(a, "gaussian"),
        Command::Eval(a) => eval(a),
        Command::Analyze(a) => analyze(a),
        Command::LearnA(a) => learn(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
