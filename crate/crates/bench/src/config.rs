//! Settings from a flat TOML file and command-line flags. Every flag has a
//! file key of the same name (without the leading dashes); flags win.

use std::path::{Path, PathBuf};

use mvbeaver::nonlinear::ApproxConfig;
use mvbeaver::{ExecMode, Method, NetProfile, SessionConfig};
use serde::Deserialize;

use crate::BenchError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Naive,
    Multi,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Naive => Method::Naive,
            MethodArg::Multi => Method::Multivariate,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Toggle {
    On,
    Off,
}

/// Every setting, unset until a source provides it.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Settings {
    pub parties: Option<usize>,
    pub net: Option<String>,
    pub latency_ms: Option<f64>,
    pub bandwidth_gbps: Option<f64>,
    pub max_arity: Option<usize>,
    pub fxp_bits: Option<u32>,
    pub seed: Option<u64>,
    pub method: Option<MethodArg>,
    pub coalesce: Option<Toggle>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub timing: Option<bool>,
    pub exp_base: Option<u32>,
    pub exp_iters: Option<u32>,
    pub log_order: Option<u32>,
    pub log_iters: Option<u32>,
    pub recip_iters: Option<u32>,
    pub trig_iters: Option<u32>,
    pub arity: Option<usize>,
    pub count: Option<usize>,
    pub len: Option<usize>,
    pub function: Option<String>,
    pub points: Option<usize>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub requests: Option<usize>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($f:ident),*) => {
        Settings { $($f: $top.$f.or($base.$f)),* }
    };
}

impl Settings {
    pub fn from_toml(text: &str) -> Result<Self, BenchError> {
        toml::from_str(text).map_err(|e| BenchError::Config(format!("config file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// `self` with every value set in `top` replaced by `top`'s.
    pub fn overlay(self, top: Settings) -> Settings {
        let base = self;
        overlay!(
            base,
            top,
            parties,
            net,
            latency_ms,
            bandwidth_gbps,
            max_arity,
            fxp_bits,
            seed,
            method,
            coalesce,
            out,
            format,
            timing,
            exp_base,
            exp_iters,
            log_order,
            log_iters,
            recip_iters,
            trig_iters,
            arity,
            count,
            len,
            function,
            points,
            lo,
            hi,
            requests
        )
    }

    pub fn resolve(self) -> Result<Resolved, BenchError> {
        let net = resolve_net(self.net.as_deref(), self.latency_ms, self.bandwidth_gbps)?;
        let defaults = ApproxConfig::default();
        let approx = ApproxConfig {
            exp_base: self.exp_base.unwrap_or(defaults.exp_base),
            exp_iters: self.exp_iters.unwrap_or(defaults.exp_iters),
            log_order: self.log_order.unwrap_or(defaults.log_order),
            log_iters: self.log_iters.unwrap_or(defaults.log_iters),
            recip_iters: self.recip_iters.unwrap_or(defaults.recip_iters),
            trig_iters: self.trig_iters.unwrap_or(defaults.trig_iters),
            ..defaults
        };
        approx.validate()?;
        let r = Resolved {
            parties: self.parties.unwrap_or(3),
            net,
            max_arity: self.max_arity.unwrap_or(4),
            fxp_bits: self.fxp_bits.unwrap_or(16),
            seed: self.seed.unwrap_or(0),
            method: self.method.map(Method::from),
            coalesce: self.coalesce.unwrap_or(Toggle::On) == Toggle::On,
            out: self.out,
            format: self.format.unwrap_or(Format::Json),
            timing: self.timing.unwrap_or(false),
            approx,
            arity: self.arity.unwrap_or(4),
            count: self.count.unwrap_or(100),
            len: self.len.unwrap_or(1),
            function: self.function,
            points: self.points.unwrap_or(101),
            lo: self.lo,
            hi: self.hi,
            requests: self.requests.unwrap_or(100),
        };
        r.session_config(Method::Multivariate).validate()?;
        Ok(r)
    }
}

fn resolve_net(
    name: Option<&str>,
    latency_ms: Option<f64>,
    gbps: Option<f64>,
) -> Result<NetProfile, BenchError> {
    let custom = latency_ms.is_some() || gbps.is_some();
    match name {
        Some("custom") | None if custom => match (latency_ms, gbps) {
            (Some(l), Some(g)) => Ok(NetProfile::custom(l, g * 1e9)?),
            _ => Err(BenchError::Config(
                "a custom network needs both --latency-ms and --bandwidth-gbps".into(),
            )),
        },
        Some("custom") => Err(BenchError::Config(
            "--net custom needs --latency-ms and --bandwidth-gbps".into(),
        )),
        Some(preset) if custom => Err(BenchError::Config(format!(
            "--latency-ms/--bandwidth-gbps only apply to --net custom, not {preset}"
        ))),
        Some(preset) => Ok(NetProfile::preset(preset)?),
        None => Ok(NetProfile::n_med()),
    }
}

/// Settings with defaults applied.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub parties: usize,
    pub net: NetProfile,
    pub max_arity: usize,
    pub fxp_bits: u32,
    pub seed: u64,
    /// `None`: the scenario's default (both methods for bench-mul).
    pub method: Option<Method>,
    pub coalesce: bool,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub timing: bool,
    pub approx: ApproxConfig,
    pub arity: usize,
    pub count: usize,
    pub len: usize,
    pub function: Option<String>,
    pub points: usize,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub requests: usize,
}

impl Default for Resolved {
    fn default() -> Self {
        Settings::default().resolve().expect("defaults are valid")
    }
}

impl Resolved {
    pub fn session_config(&self, method: Method) -> SessionConfig {
        SessionConfig {
            n_parties: self.parties,
            max_arity: self.max_arity,
            precision_bits: self.fxp_bits,
            seed: self.seed,
            net: self.net.clone(),
            method,
            coalesce: self.coalesce,
            exec: if ExecMode::Parallel.available() {
                ExecMode::Parallel
            } else {
                ExecMode::Sequential
            },
        }
    }
}
