use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use mvbeaver_bench::config::{Format, MethodArg, Toggle};
use mvbeaver_bench::{report, scenarios, Settings};

#[derive(Parser, Debug)]
#[command(
    name = "mvbeaver",
    version,
    about = "Round, payload and simulated-latency benchmarks for multivariate Beaver MPC"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
#[allow(clippy::enum_variant_names)]
enum Command {
    /// Sequential n-ary products, naive chains vs one-round multivariate.
    BenchMul {
        #[command(flatten)]
        common: Common,
        /// Inputs per product.
        #[arg(long)]
        arity: Option<usize>,
        /// Number of products.
        #[arg(long)]
        count: Option<usize>,
        /// Elements per input vector.
        #[arg(long)]
        len: Option<usize>,
    },
    /// A nonlinear function over a grid, against its recurrence and the true function.
    BenchNonlinear {
        #[command(flatten)]
        common: Common,
        /// exp, log, reciprocal, sin, cos, sigmoid, tanh or softmax.
        #[arg(long)]
        function: Option<String>,
        #[arg(long)]
        points: Option<usize>,
        /// Grid start (default: the function's documented domain).
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<f64>,
    },
    /// Secure inference of the bundled 8-16-3 MLP.
    BenchMlp {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        requests: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Flat TOML file with any of the flags below as keys; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    parties: Option<usize>,
    /// n_low, n_med, n_high or custom.
    #[arg(long)]
    net: Option<String>,
    #[arg(long)]
    latency_ms: Option<f64>,
    #[arg(long)]
    bandwidth_gbps: Option<f64>,
    #[arg(long)]
    max_arity: Option<usize>,
    /// Fixed-point fractional bits L.
    #[arg(long)]
    fxp_bits: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long, value_enum)]
    coalesce: Option<Toggle>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Report wall-clock compute time (makes reports non-reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    exp_base: Option<u32>,
    #[arg(long)]
    exp_iters: Option<u32>,
    #[arg(long)]
    log_order: Option<u32>,
    #[arg(long)]
    log_iters: Option<u32>,
    #[arg(long)]
    recip_iters: Option<u32>,
    #[arg(long)]
    trig_iters: Option<u32>,
}

impl Common {
    fn settings(&self) -> Settings {
        Settings {
            parties: self.parties,
            net: self.net.clone(),
            latency_ms: self.latency_ms,
            bandwidth_gbps: self.bandwidth_gbps,
            max_arity: self.max_arity,
            fxp_bits: self.fxp_bits,
            seed: self.seed,
            method: self.method,
            coalesce: self.coalesce,
            out: self.out.clone(),
            format: self.format,
            timing: self.timing.then_some(true),
            exp_base: self.exp_base,
            exp_iters: self.exp_iters,
            log_order: self.log_order,
            log_iters: self.log_iters,
            recip_iters: self.recip_iters,
            trig_iters: self.trig_iters,
            ..Default::default()
        }
    }
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let (common, flags) = match &cli.command {
        Command::BenchMul {
            common,
            arity,
            count,
            len,
        } => (
            common,
            Settings {
                arity: *arity,
                count: *count,
                len: *len,
                ..common.settings()
            },
        ),
        Command::BenchNonlinear {
            common,
            function,
            points,
            lo,
            hi,
        } => (
            common,
            Settings {
                function: function.clone(),
                points: *points,
                lo: *lo,
                hi: *hi,
                ..common.settings()
            },
        ),
        Command::BenchMlp { common, requests } => (
            common,
            Settings {
                requests: *requests,
                ..common.settings()
            },
        ),
    };
    let file = match &common.config {
        Some(path) => {
            Settings::load(path).with_context(|| format!("reading {}", path.display()))?
        }
        None => Settings::default(),
    };
    let cfg = file.overlay(flags).resolve()?;
    let rows = match cli.command {
        Command::BenchMul { .. } => scenarios::bench_mul(&cfg)?,
        Command::BenchNonlinear { .. } => scenarios::bench_nonlinear(&cfg)?,
        Command::BenchMlp { .. } => scenarios::bench_mlp(&cfg)?,
    };
    report::emit(&rows, cfg.format, cfg.out.as_deref()).with_context(|| {
        format!(
            "writing report to {}",
            cfg.out
                .as_ref()
                .map_or("stdout".into(), |p| p.display().to_string())
        )
    })?;
    Ok(())
}
