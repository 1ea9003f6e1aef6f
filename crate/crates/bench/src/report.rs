//! Benchmark report rows and their JSON / CSV forms.
//!
//! One row per (scenario, method, profile). Field order is fixed by the
//! struct and is the CSV column order; optional fields are empty in CSV and
//! `null` in JSON.

use std::io::Write;
use std::path::Path;

use mvbeaver::RoundStats;
use serde::{Deserialize, Serialize};

use crate::config::{Format, Resolved};
use crate::BenchError;

/// Exact CSV header.
pub const CSV_HEADER: &str = "scenario,method,coalesce,net,latency_ms,bandwidth_bps,parties,max_arity,fxp_bits,seed,\
arity,count,len,function,points,requests,online_rounds,online_bytes,offline_bytes,simulated_time_ms,\
latency_time_ms,transfer_time_ms,t_comp_ms,max_abs_err_oracle,mean_abs_err_oracle,max_abs_err_true,\
mean_abs_err_true,argmax_agreement,attribution";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub scenario: String,
    /// `naive` or `multi`.
    pub method: String,
    /// `on` or `off`.
    pub coalesce: String,
    pub net: String,
    pub latency_ms: f64,
    pub bandwidth_bps: f64,
    pub parties: usize,
    pub max_arity: usize,
    pub fxp_bits: u32,
    pub seed: u64,
    pub arity: Option<usize>,
    pub count: Option<usize>,
    pub len: Option<usize>,
    pub function: Option<String>,
    pub points: Option<usize>,
    pub requests: Option<usize>,
    pub online_rounds: u64,
    pub online_bytes: u64,
    pub offline_bytes: u64,
    /// Simulated communication time `t_comm`.
    pub simulated_time_ms: f64,
    pub latency_time_ms: f64,
    pub transfer_time_ms: f64,
    /// Wall-clock compute time; only with `--timing` (it is not reproducible).
    pub t_comp_ms: Option<f64>,
    pub max_abs_err_oracle: Option<f64>,
    pub mean_abs_err_oracle: Option<f64>,
    pub max_abs_err_true: Option<f64>,
    pub mean_abs_err_true: Option<f64>,
    pub argmax_agreement: Option<usize>,
    /// `label:rounds:bytes` per operation, `;`-separated, sorted by label.
    pub attribution: String,
}

impl BenchReport {
    /// A row with the configuration and counters filled in.
    pub fn new(
        scenario: &str,
        method: mvbeaver::Method,
        cfg: &Resolved,
        stats: &RoundStats,
    ) -> Self {
        BenchReport {
            scenario: scenario.to_string(),
            method: method.as_str().to_string(),
            coalesce: if cfg.coalesce { "on" } else { "off" }.to_string(),
            net: cfg.net.name.clone(),
            latency_ms: cfg.net.latency_ms,
            bandwidth_bps: cfg.net.bandwidth_bps,
            parties: cfg.parties,
            max_arity: cfg.max_arity,
            fxp_bits: cfg.fxp_bits,
            seed: cfg.seed,
            arity: None,
            count: None,
            len: None,
            function: None,
            points: None,
            requests: None,
            online_rounds: stats.online_rounds,
            online_bytes: stats.online_bytes,
            offline_bytes: stats.offline_bytes,
            simulated_time_ms: stats.simulated_time_ms,
            latency_time_ms: stats.latency_time_ms,
            transfer_time_ms: stats.transfer_time_ms,
            t_comp_ms: None,
            max_abs_err_oracle: None,
            mean_abs_err_oracle: None,
            max_abs_err_true: None,
            mean_abs_err_true: None,
            argmax_agreement: None,
            attribution: attribution(stats),
        }
    }

    pub fn with_errors(mut self, vs_oracle: ErrorSummary, vs_true: ErrorSummary) -> Self {
        self.max_abs_err_oracle = Some(vs_oracle.max);
        self.mean_abs_err_oracle = Some(vs_oracle.mean);
        self.max_abs_err_true = Some(vs_true.max);
        self.mean_abs_err_true = Some(vs_true.mean);
        self
    }
}

/// Max and mean absolute error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorSummary {
    pub max: f64,
    pub mean: f64,
}

impl ErrorSummary {
    pub fn between(got: &[f64], want: &[f64]) -> Self {
        let errs: Vec<f64> = got.iter().zip(want).map(|(g, w)| (g - w).abs()).collect();
        let max = errs.iter().copied().fold(0.0, f64::max);
        let mean = if errs.is_empty() {
            0.0
        } else {
            errs.iter().sum::<f64>() / errs.len() as f64
        };
        ErrorSummary { max, mean }
    }
}

pub fn attribution(stats: &RoundStats) -> String {
    stats
        .attribution
        .iter()
        .map(|(label, c)| format!("{label}:{}:{}", c.rounds, c.bytes))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn render(rows: &[BenchReport], format: Format) -> Result<Vec<u8>, BenchError> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(rows)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(Vec::new());
            w.write_record(CSV_HEADER.split(','))?;
            for r in rows {
                w.serialize(r)?;
            }
            w.into_inner().map_err(|e| BenchError::Io(e.into_error()))
        }
    }
}

/// Writes the rendered report to `out`, or stdout.
pub fn emit(rows: &[BenchReport], format: Format, out: Option<&Path>) -> Result<(), BenchError> {
    let bytes = render(rows, format)?;
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

pub fn parse_json(bytes: &[u8]) -> Result<Vec<BenchReport>, BenchError> {
    Ok(serde_json::from_slice(bytes)?)
}

pub fn parse_csv(bytes: &[u8]) -> Result<Vec<BenchReport>, BenchError> {
    let mut r = csv::Reader::from_reader(bytes);
    Ok(r.deserialize().collect::<Result<Vec<_>, _>>()?)
}
