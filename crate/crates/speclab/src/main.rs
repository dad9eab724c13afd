//! Command-line front end: model handling, simulation, estimation,
//! distances, and the verification catalog.
//!
//! Exit codes: 0 success / all checks pass, 1 check failure, 2 usage error,
//! 3 I/O failure.

use clap::{Args, Parser, Subcommand};
use speclab::covariance::{self, CovMatrix};
use speclab::distances::{
    hellinger_gamma_same_scale, hellinger_gamma_same_shape, hellinger_gaussian,
};
use speclab::estimate::{self, WhittleVariant};
use speclab::simulate;
use speclab::spectra::{class_membership, SmoothnessClassSpec, SpectralModel};
use speclab::verify::{self, Verdict};
use speclab::{fmt_g17, LabError};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "speclab", version, about = "Spectral density approximation laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Model source plus the flags shared by most commands.
#[derive(Args)]
struct Common {
    /// Inline model preset, e.g. "ma1:theta=0.5" or "ma1-in-sigma"
    #[arg(long, global = true)]
    preset: Option<String>,
    /// JSON model file
    #[arg(long, global = true)]
    model: Option<String>,
    /// Seed; falls back to the SPECLAB_SEED environment variable, then 0
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when omitted
    #[arg(long, global = true)]
    out: Option<String>,
    /// Output format for reports
    #[arg(long, global = true, value_parser = ["json", "csv"])]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral model queries
    Spec {
        #[command(subcommand)]
        cmd: SpecCmd,
        #[command(flatten)]
        common: Common,
    },
    /// Covariance matrix construction
    Cov {
        #[command(subcommand)]
        cmd: CovCmd,
        #[command(flatten)]
        common: Common,
    },
    /// Hellinger distances
    Dist {
        #[command(subcommand)]
        cmd: DistCmd,
        #[command(flatten)]
        common: Common,
    },
    /// Seeded sampling
    Sim {
        #[command(subcommand)]
        cmd: SimCmd,
        #[command(flatten)]
        common: Common,
    },
    /// Estimation and likelihoods
    Est {
        #[command(subcommand)]
        cmd: EstCmd,
        #[command(flatten)]
        common: Common,
    },
    /// Verification catalog
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
        #[command(flatten)]
        common: Common,
    },
    /// Composite reports
    Report {
        #[command(subcommand)]
        cmd: ReportCmd,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum SpecCmd {
    /// Evaluate the density on a regular grid of n points over [-pi, pi]
    Eval {
        #[arg(long, default_value_t = 1024)]
        n: usize,
    },
    /// Print the Sobolev seminorm and norm squared at index alpha
    Norms {
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Check membership in the smoothness class
    Member {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long = "M")]
        big_m: Option<f64>,
        #[arg(long, default_value_t = 1024)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum CovCmd {
    /// Dense Toeplitz covariance of size n
    Toeplitz {
        #[arg(long)]
        n: usize,
    },
    /// Circulant approximation of size n (n odd)
    Circulant {
        #[arg(long)]
        n: usize,
    },
    /// Partial circulant: n x n block of the size-m circulant (n, m odd)
    Partial {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Joined vs independent split covariances with separation m
    Split {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
}

#[derive(Subcommand)]
enum DistCmd {
    /// Hellinger distance between two centered Gaussians from CSV matrices
    Gaussian {
        #[arg(long = "a-file")]
        a_file: String,
        #[arg(long = "b-file")]
        b_file: String,
    },
    /// Gamma laws sharing the shape: SHAPE SCALE_A SCALE_B
    GammaShape { shape: f64, scale_a: f64, scale_b: f64 },
    /// Gamma laws sharing the scale: SHAPE_A SHAPE_B SCALE
    GammaScale { shape_a: f64, shape_b: f64, scale: f64 },
}

#[derive(Subcommand)]
enum SimCmd {
    /// Stationary path of length n
    Stationary {
        #[arg(long)]
        n: usize,
    },
    /// Periodic (circulant-law) path of length n (n odd)
    Periodic {
        #[arg(long)]
        n: usize,
    },
    /// Independent Gaussian scale observations (n odd)
    Scale {
        #[arg(long)]
        n: usize,
    },
    /// White-noise drift path: n cells, m >= n observations
    Whitenoise {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Periodogram of a stationary path of length n
    Periodogram {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum EstCmd {
    /// Empirical autocovariances of a simulated path up to lag m
    Autocov {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        m: usize,
    },
    /// Truncated-series estimate from a simulated path, as model JSON
    Series {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 0.75)]
        beta: f64,
    },
    /// Whittle likelihoods (continuous and discrete) of the model on a path
    Whittle {
        #[arg(long)]
        n: usize,
    },
    /// Exact Gaussian log-likelihood of the model on a path
    Loglik {
        #[arg(long)]
        n: usize,
    },
    /// Tuning schedule for sample size n
    Schedule {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.75)]
        beta: f64,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Run a single catalog check
    Run {
        #[arg(long)]
        check: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Run the whole catalog concurrently
    All,
    /// List catalog checks
    List,
}

#[derive(Subcommand)]
enum ReportCmd {
    /// Bracketing-chain report over a list of odd sample sizes
    BracketChain {
        #[arg(long = "n-list", value_delimiter = ',')]
        n_list: Vec<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(LabError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

impl Common {
    fn seed(&self) -> speclab::Result<u64> {
        if let Some(s) = self.seed {
            return Ok(s);
        }
        match std::env::var("SPECLAB_SEED") {
            Ok(v) => v
                .parse()
                .map_err(|_| LabError::Parse("SPECLAB_SEED is not an integer".into())),
            Err(_) => Ok(0),
        }
    }

    fn load_model(&self) -> speclab::Result<SpectralModel> {
        match (&self.preset, &self.model) {
            (Some(p), None) => SpectralModel::from_preset(p),
            (None, Some(path)) => SpectralModel::from_json(&std::fs::read_to_string(path)?),
            (Some(_), Some(_)) => Err(LabError::Argument(
                "--preset and --model are mutually exclusive".into(),
            )),
            (None, None) => Err(LabError::Argument(
                "a model is required: pass --preset or --model".into(),
            )),
        }
    }

    /// Write to --out (I/O errors surface as exit 3) or print to stdout.
    fn emit(&self, content: &str) -> speclab::Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, content).map_err(LabError::from),
            None => {
                print!("{content}");
                if !content.ends_with('\n') {
                    println!();
                }
                Ok(())
            }
        }
    }

    fn format_or(&self, default: &str) -> String {
        self.format.clone().unwrap_or_else(|| default.to_string())
    }
}

fn run(cli: Cli) -> speclab::Result<ExitCode> {
    match cli.command {
        Command::Spec { cmd, common } => run_spec(cmd, &common),
        Command::Cov { cmd, common } => run_cov(cmd, &common),
        Command::Dist { cmd, common } => run_dist(cmd, &common),
        Command::Sim { cmd, common } => run_sim(cmd, &common),
        Command::Est { cmd, common } => run_est(cmd, &common),
        Command::Verify { cmd, common } => run_verify(cmd, &common),
        Command::Report { cmd, common } => run_report(cmd, &common),
    }
}

fn run_spec(cmd: SpecCmd, common: &Common) -> speclab::Result<ExitCode> {
    let model = common.load_model()?;
    match cmd {
        SpecCmd::Eval { n } => {
            if n < 2 {
                return Err(LabError::Argument("--n must be at least 2".into()));
            }
            let grid = model.density_grid(n);
            let mut out = String::from("omega,f\n");
            for (i, f) in grid.iter().enumerate() {
                let w = -std::f64::consts::PI
                    + speclab::spectra::TWO_PI * i as f64 / (n - 1) as f64;
                let _ = writeln!(out, "{},{}", fmt_g17(w), fmt_g17(*f));
            }
            common.emit(&out)?;
        }
        SpecCmd::Norms { alpha } => {
            let s = alpha.unwrap_or(model.alpha);
            let (semi_sq, norm_sq) = model.sobolev_norm(s)?;
            common.emit(&format!(
                "{{\"alpha\":{},\"seminorm_sq\":{},\"norm_sq\":{}}}\n",
                fmt_g17(s),
                fmt_g17(semi_sq),
                fmt_g17(norm_sq)
            ))?;
        }
        SpecCmd::Member { alpha, big_m, n } => {
            let spec = SmoothnessClassSpec::new(
                alpha.unwrap_or(model.alpha),
                big_m.unwrap_or(model.big_m),
                n,
            )?;
            let verdict = class_membership(&model, &spec);
            let mut out = format!("member: {}\n", verdict.member);
            for v in &verdict.violations {
                let _ = writeln!(out, "violation: {v}");
            }
            common.emit(&out)?;
            if !verdict.member {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_cov(cmd: CovCmd, common: &Common) -> speclab::Result<ExitCode> {
    let model = common.load_model()?;
    let csv = match cmd {
        CovCmd::Toeplitz { n } => covariance::matrix_to_csv(&covariance::toeplitz(&model, n).mat),
        CovCmd::Circulant { n } => covariance::matrix_to_csv(&covariance::circulant(&model, n)?.mat),
        CovCmd::Partial { n, m } => {
            covariance::matrix_to_csv(&covariance::circulant_partial(&model, n, m)?.mat)
        }
        CovCmd::Split { n, m } => {
            let (joined, independent, _) = covariance::split_covariances(&model, n, m)?;
            let gap = covariance::frobenius_gap(&joined.mat, &independent.mat);
            println!("frobenius_gap_sq: {}", fmt_g17(gap * gap));
            covariance::matrix_to_csv(&joined.mat)
        }
    };
    common.emit(&csv)?;
    Ok(ExitCode::SUCCESS)
}

fn run_dist(cmd: DistCmd, common: &Common) -> speclab::Result<ExitCode> {
    let result = match cmd {
        DistCmd::Gaussian { a_file, b_file } => {
            let a = covariance::matrix_from_csv(&std::fs::read_to_string(a_file)?)?;
            let b = covariance::matrix_from_csv(&std::fs::read_to_string(b_file)?)?;
            hellinger_gaussian(&CovMatrix { mat: a }, &CovMatrix { mat: b })?
        }
        DistCmd::GammaShape { shape, scale_a, scale_b } => {
            hellinger_gamma_same_shape(shape, scale_a, scale_b)?
        }
        DistCmd::GammaScale { shape_a, shape_b, scale } => {
            hellinger_gamma_same_scale(shape_a, shape_b, scale)?
        }
    };
    common.emit(&format!(
        "{{\"h_squared\":{},\"affinity\":{}}}\n",
        fmt_g17(result.h_squared),
        fmt_g17(result.affinity)
    ))?;
    Ok(ExitCode::SUCCESS)
}

fn run_sim(cmd: SimCmd, common: &Common) -> speclab::Result<ExitCode> {
    let model = common.load_model()?;
    let seed = common.seed()?;
    let csv = match cmd {
        SimCmd::Stationary { n } => simulate::sample_stationary(&model, n, seed)?.to_csv(),
        SimCmd::Periodic { n } => simulate::sample_periodic(&model, n, seed)?.to_csv(),
        SimCmd::Scale { n } => simulate::sample_scale(&model, n, seed)?.to_csv(),
        SimCmd::Whitenoise { n, m } => {
            simulate::sample_whitenoise_model(&model, n, m, seed)?.to_csv()
        }
        SimCmd::Periodogram { n } => {
            let path = simulate::sample_stationary(&model, n, seed)?;
            simulate::dft_periodogram(&path)?.to_csv()
        }
    };
    common.emit(&csv)?;
    Ok(ExitCode::SUCCESS)
}

fn run_est(cmd: EstCmd, common: &Common) -> speclab::Result<ExitCode> {
    match cmd {
        EstCmd::Autocov { n, m } => {
            let model = common.load_model()?;
            let path = simulate::sample_stationary(&model, n, common.seed()?)?;
            let est = estimate::empirical_autocov(&path, m)?;
            let mut out = String::from("lag,gamma_hat\n");
            for (k, g) in est.iter().enumerate() {
                let _ = writeln!(out, "{k},{}", fmt_g17(*g));
            }
            common.emit(&out)?;
        }
        EstCmd::Series { n, alpha, beta } => {
            let model = common.load_model()?;
            let schedule =
                estimate::compute_schedule(n, alpha.unwrap_or(model.alpha), beta)?;
            let path = simulate::sample_stationary(&model, n, common.seed()?)?;
            let est = estimate::series_estimator(&path, &schedule)?;
            common.emit(&est.to_json())?;
        }
        EstCmd::Whittle { n } => {
            let model = common.load_model()?;
            let path = simulate::sample_stationary(&model, n, common.seed()?)?;
            let pgram = simulate::dft_periodogram(&path)?;
            let cont = estimate::whittle_likelihood(&model, &pgram, WhittleVariant::Continuous)?;
            let disc = estimate::whittle_likelihood(&model, &pgram, WhittleVariant::Discrete)?;
            common.emit(&format!(
                "{{\"continuous\":{},\"discrete\":{}}}\n",
                fmt_g17(cont),
                fmt_g17(disc)
            ))?;
        }
        EstCmd::Loglik { n } => {
            let model = common.load_model()?;
            let path = simulate::sample_stationary(&model, n, common.seed()?)?;
            let ll = estimate::exact_loglik(&model, &path)?;
            let residual = estimate::whittle_residual(&model, &path)?;
            common.emit(&format!(
                "{{\"loglik\":{},\"whittle_residual\":{}}}\n",
                fmt_g17(ll),
                fmt_g17(residual)
            ))?;
        }
        EstCmd::Schedule { n, alpha, beta } => {
            let s = estimate::compute_schedule(n, alpha, beta)?;
            common.emit(&format!(
                "{{\"n\":{},\"alpha\":{},\"beta\":{},\"gamma_rate\":{},\"kappa\":{},\"r_split\":{},\"r_upper\":{},\"m_split\":{},\"n_trunc\":{}}}\n",
                s.n,
                fmt_g17(s.alpha),
                fmt_g17(s.beta),
                fmt_g17(s.gamma_rate),
                fmt_g17(s.kappa),
                s.r_split,
                s.r_upper,
                s.m_split,
                s.n_trunc
            ))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_verify(cmd: VerifyCmd, common: &Common) -> speclab::Result<ExitCode> {
    match cmd {
        VerifyCmd::List => {
            let mut out = String::new();
            for info in verify::list_checks() {
                let _ = writeln!(out, "{} [{}] {}", info.id, info.module, info.description);
            }
            common.emit(&out)?;
            Ok(ExitCode::SUCCESS)
        }
        VerifyCmd::Run { check, n, trials, alpha, beta } => {
            let mut overrides = BTreeMap::new();
            overrides.insert("seed".to_string(), common.seed()?.to_string());
            if let Some(n) = n {
                // single-size override: restrict grid-style checks too
                overrides.insert("n".to_string(), n.to_string());
                overrides.insert("n_list".to_string(), n.to_string());
            }
            if let Some(t) = trials {
                overrides.insert("trials".to_string(), t.to_string());
                overrides.insert("reps".to_string(), t.to_string());
            }
            if let Some(a) = alpha {
                overrides.insert("alpha".to_string(), fmt_g17(a));
            }
            if let Some(b) = beta {
                overrides.insert("beta".to_string(), fmt_g17(b));
            }
            let report = verify::run_check(&check, &overrides)?;
            let out = match common.format_or("json").as_str() {
                "csv" => verify::reports_to_csv(std::slice::from_ref(&report)),
                _ => report.to_json(),
            };
            common.emit(&out)?;
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        VerifyCmd::All => {
            let reports = verify::run_all(common.seed()?)?;
            let out = match common.format_or("json").as_str() {
                "csv" => verify::reports_to_csv(&reports),
                _ => verify::reports_to_json(&reports),
            };
            common.emit(&out)?;
            let all_pass = reports.iter().all(|r| r.verdict != Verdict::Fail);
            Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn run_report(cmd: ReportCmd, common: &Common) -> speclab::Result<ExitCode> {
    match cmd {
        ReportCmd::BracketChain { n_list } => {
            if n_list.is_empty() {
                return Err(LabError::Argument("--n-list must not be empty".into()));
            }
            let model = common.load_model()?;
            let report = verify::bracket_chain_report(&model, &n_list, common.seed()?)?;
            let out = match common.format_or("csv").as_str() {
                "json" => report.to_json(),
                _ => verify::reports_to_csv(std::slice::from_ref(&report)),
            };
            common.emit(&out)?;
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}
