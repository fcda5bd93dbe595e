mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sproc::Config;

/// Robust generalized S-procedure laboratory.
#[derive(Parser, Debug)]
#[command(name = "sproc", version, about)]
struct Cli {
    #[command(flatten)]
    run: RunFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunFlags {
    /// Eigenvalue tolerance for PSD tests.
    #[arg(long, global = true)]
    tol_psd: Option<f64>,
    /// Substitution tolerance for certificates.
    #[arg(long, global = true)]
    tol_sub: Option<f64>,
    /// Band around zero where the quadratic path declines to decide.
    #[arg(long, global = true)]
    tol_boundary: Option<f64>,
    /// Base seed; mixed with a hash of each instance.
    #[arg(long, global = true, env = "SPROC_SEED")]
    seed: Option<u64>,
    #[arg(long, global = true)]
    ascent_iters: Option<usize>,
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Random probes of dom h* on right-hand-side procedures.
    #[arg(long, global = true)]
    probes: Option<usize>,
    /// Refuse heuristic (quadratic) paths.
    #[arg(long, global = true)]
    exact_only: bool,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl RunFlags {
    fn config(&self) -> Config {
        let d = Config::default();
        Config {
            tol_psd: self.tol_psd.unwrap_or(d.tol_psd),
            tol_sub: self.tol_sub.unwrap_or(d.tol_sub),
            tol_boundary: self.tol_boundary.unwrap_or(d.tol_boundary),
            seed: self.seed.unwrap_or(d.seed),
            ascent_iters: self.ascent_iters.unwrap_or(d.ascent_iters),
            restarts: self.restarts.unwrap_or(d.restarts),
            probes: self.probes.unwrap_or(d.probes),
            exact_only: self.exact_only,
            ..d
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide (A): sup_u F_u(x,0) >= 0 for every x.
    CheckA { instance: PathBuf },
    /// Search for a scenario and multiplier certifying (B).
    CertifyB { instance: PathBuf },
    /// Decide (A_h): sup_u F_u(x,0) >= h(x) for every x.
    CheckAh {
        instance: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
    },
    /// Certify (B_h) on probes of dom h*.
    CertifyBh {
        instance: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
    },
    /// Report the closure hypotheses H1–H6.
    Hypotheses {
        instance: PathBuf,
        #[arg(long)]
        rhs: Option<PathBuf>,
    },
    /// Evaluate both sides of a duality theorem.
    Validate {
        instance: PathBuf,
        /// t2_1, c2_1, c2_2, t3_1, c3_1, t4_1 or c4_1.
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        rhs: Option<PathBuf>,
    },
    /// Worst-case reduction of an interval-mass star field.
    InfluenceReduce {
        field: PathBuf,
        /// Center star id.
        #[arg(long)]
        star: String,
        /// Claim that this rival's constraint is implied by the others.
        #[arg(long, conflicts_with = "claim")]
        redundant: Option<String>,
        /// Claim `f >= 0` on the region, with `f` a quadratic function in JSON.
        #[arg(long)]
        claim: Option<PathBuf>,
        /// One scenario per endpoint assignment instead of the worst case.
        #[arg(long)]
        all_endpoints: bool,
        /// Also write the exported instance here.
        #[arg(long)]
        emit_instance: Option<PathBuf>,
    },
    /// Rasterize the robust influence region on a 2-D box (or a z-slice in 3-D).
    InfluenceRaster {
        field: PathBuf,
        #[arg(long)]
        star: String,
        #[arg(long, default_value = "-5", allow_negative_numbers = true)]
        lo: String,
        #[arg(long, default_value = "5", allow_negative_numbers = true)]
        hi: String,
        /// Cells per axis.
        #[arg(long, default_value_t = 100)]
        size: usize,
        /// Third coordinate of the slice for 3-D fields.
        #[arg(long, default_value = "0", allow_negative_numbers = true)]
        z: String,
        #[arg(long, value_enum, default_value_t = RasterFormat::Csv)]
        format: RasterFormat,
        /// Raster file; embedded in the report when omitted.
        #[arg(long)]
        raster: Option<PathBuf>,
    },
    /// Run the bundled instances and compare with their known outcomes.
    Selftest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RasterFormat {
    Csv,
    Pgm,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = cli.run.config();
    let outcome = cfg
        .validate()
        .map_err(commands::Failure::from)
        .and_then(|_| commands::run(&cli.command, &cfg));
    match outcome.and_then(|r| report::emit(&r, cli.run.out.as_deref()).map(|_| r)) {
        Ok(r) => ExitCode::from(r.exit_code()),
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(1)
        }
    }
}
