//! The three benchmark scenarios.

use std::time::Instant;

use mvbeaver::nonlinear::{self, reference, ApproxConfig};
use mvbeaver::protocols::mul_multi;
use mvbeaver::{run_session, Method, PartyId, RoundStats, Session, Shared, Z128};
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::config::Resolved;
use crate::mlp::{self, Activations, Mlp};
use crate::report::{BenchReport, ErrorSummary};
use crate::BenchError;

/// Runs `program` through a full session, timing it when asked.
fn timed<T>(
    cfg: &Resolved,
    method: Method,
    program: impl Fn(&mut Session<Z128>) -> mvbeaver::Result<T>,
) -> Result<(T, RoundStats, Option<f64>), BenchError> {
    let start = Instant::now();
    let out = run_session(&cfg.session_config(method), program)?;
    let t = cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    Ok((out.output, out.stats, t))
}

fn methods(cfg: &Resolved, default: &[Method]) -> Vec<Method> {
    match cfg.method {
        Some(m) => vec![m],
        None => default.to_vec(),
    }
}

// ---- bench-mul ----------------------------------------------------------

/// `count` products of `arity` vectors of `len` elements, issued one after
/// another (each its own protocol call), under each method.
pub fn bench_mul(cfg: &Resolved) -> Result<Vec<BenchReport>, BenchError> {
    let (arity, count, len) = (cfg.arity, cfg.count, cfg.len);
    if arity < 2 || arity > cfg.max_arity {
        return Err(BenchError::Config(format!(
            "arity {arity} outside 2..={}",
            cfg.max_arity
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let operands: Vec<Vec<Vec<f64>>> = (0..count)
        .map(|_| {
            (0..arity)
                .map(|_| (0..len).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect()
        })
        .collect();
    let want: Vec<f64> = operands
        .iter()
        .flat_map(|op| (0..len).map(move |e| op.iter().map(|v| v[e]).product::<f64>()))
        .collect();

    methods(cfg, &[Method::Naive, Method::Multivariate])
        .into_iter()
        .map(|method| {
            let (got, stats, t) = timed(cfg, method, |s| {
                let mut outs = Vec::with_capacity(count);
                for op in &operands {
                    let xs = op
                        .iter()
                        .enumerate()
                        .map(|(i, v)| s.input(PartyId(i % s.n_parties()), v))
                        .collect::<mvbeaver::Result<Vec<_>>>()?;
                    let refs: Vec<&Shared<Z128>> = xs.iter().collect();
                    outs.push(s.labeled("mul", |s| mul_multi(s, &refs))?);
                }
                let refs: Vec<&Shared<Z128>> = outs.iter().collect();
                let opened = s.labeled("output", |s| s.open_batch(&refs))?;
                Ok(opened.concat())
            })?;
            let err = ErrorSummary::between(&got, &want);
            let mut row = BenchReport::new("bench-mul", method, cfg, &stats).with_errors(err, err);
            row.arity = Some(arity);
            row.count = Some(count);
            row.len = Some(len);
            row.t_comp_ms = t;
            Ok(row)
        })
        .collect()
}

// ---- bench-nonlinear ----------------------------------------------------

pub const FUNCTIONS: [&str; 8] = [
    "exp",
    "log",
    "reciprocal",
    "sin",
    "cos",
    "sigmoid",
    "tanh",
    "softmax",
];

/// Documented input domain of each function.
pub fn domain(function: &str) -> Option<(f64, f64)> {
    Some(match function {
        "exp" => (-8.0, 8.0),
        "log" => (0.05, 60.0),
        "reciprocal" => (0.01, 100.0),
        "sin" | "cos" => (-std::f64::consts::TAU, std::f64::consts::TAU),
        "sigmoid" => (-4.5, 8.0),
        "tanh" => (-2.25, 4.0),
        "softmax" => (-4.0, 4.0),
        _ => return None,
    })
}

type SecureFn = nonlinear::BatchFn<Z128>;

/// A pointwise function: secure batch, plaintext recurrence, exact value.
struct Pointwise {
    secure: SecureFn,
    oracle: fn(f64, &ApproxConfig) -> f64,
    exact: fn(f64) -> f64,
}

fn pointwise(function: &str) -> Option<Pointwise> {
    #[allow(clippy::type_complexity)]
    let (secure, oracle, exact): (SecureFn, fn(f64, &ApproxConfig) -> f64, fn(f64) -> f64) =
        match function {
            "exp" => (nonlinear::exp_batch, reference::exp, f64::exp),
            "log" => (nonlinear::log_batch, reference::log, f64::ln),
            "reciprocal" => (
                nonlinear::reciprocal_batch,
                reference::reciprocal,
                f64::recip,
            ),
            "sin" => (nonlinear::sin_batch, reference::sin, f64::sin),
            "cos" => (nonlinear::cos_batch, reference::cos, f64::cos),
            "sigmoid" => (nonlinear::sigmoid_batch, reference::sigmoid, |x| {
                1.0 / (1.0 + (-x).exp())
            }),
            "tanh" => (nonlinear::tanh_batch, reference::tanh, f64::tanh),
            _ => return None,
        };
    Some(Pointwise {
        secure,
        oracle,
        exact,
    })
}

fn softmax_exact(xs: &[f64]) -> Vec<f64> {
    let e: Vec<f64> = xs.iter().map(|x| x.exp()).collect();
    let sum: f64 = e.iter().sum();
    e.iter().map(|v| v / sum).collect()
}

/// Evenly spaced points over `[lo, hi]`.
pub fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        n => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Evaluates the function on the whole grid as one vector: a single
/// secure call, so the grid costs the rounds of one evaluation. Softmax
/// treats the grid as one input vector. Errors are measured against the
/// inputs as encoded at the session precision.
pub fn bench_nonlinear(cfg: &Resolved) -> Result<Vec<BenchReport>, BenchError> {
    let function = cfg
        .function
        .as_deref()
        .ok_or_else(|| BenchError::Config("bench-nonlinear needs --function".into()))?;
    let (dlo, dhi) = domain(function).ok_or_else(|| {
        BenchError::Config(format!(
            "unknown function `{function}` (expected one of {})",
            FUNCTIONS.join(", ")
        ))
    })?;
    if cfg.points == 0 {
        return Err(BenchError::Config("--points must be at least 1".into()));
    }
    let xs = grid(cfg.lo.unwrap_or(dlo), cfg.hi.unwrap_or(dhi), cfg.points);
    let ulp = 2f64.powi(-(cfg.fxp_bits as i32));
    let held: Vec<f64> = xs.iter().map(|x| (x / ulp).round() * ulp).collect();
    let approx = cfg.approx.clone();

    let (oracle, exact): (Vec<f64>, Vec<f64>) = match pointwise(function) {
        Some(p) => (
            held.iter().map(|x| (p.oracle)(*x, &approx)).collect(),
            held.iter().map(|x| (p.exact)(*x)).collect(),
        ),
        None => (reference::softmax(&held, &approx), softmax_exact(&held)),
    };
    let secure: SecureFn = pointwise(function).map_or(nonlinear::softmax_batch, |p| p.secure);

    methods(cfg, &[Method::Multivariate])
        .into_iter()
        .map(|method| {
            let (got, stats, t) = timed(cfg, method, |s| {
                let x = s.input(PartyId(0), &xs)?;
                let y = secure(s, &[&x], &approx)?.remove(0);
                s.labeled("output", |s| s.open(&y))
            })?;
            let mut row = BenchReport::new("bench-nonlinear", method, cfg, &stats).with_errors(
                ErrorSummary::between(&got, &oracle),
                ErrorSummary::between(&got, &exact),
            );
            row.function = Some(function.to_string());
            row.points = Some(cfg.points);
            row.t_comp_ms = t;
            Ok(row)
        })
        .collect()
}

// ---- bench-mlp ----------------------------------------------------------

/// Secure inference of the bundled MLP on `requests` seeded inputs.
/// Errors compare output probabilities with the plaintext pass using the
/// same recurrences (oracle) and the exact functions (true); the argmax
/// agreement is against the exact plaintext model.
pub fn bench_mlp(cfg: &Resolved) -> Result<Vec<BenchReport>, BenchError> {
    if cfg.parties < 2 {
        return Err(BenchError::Config(
            "bench-mlp needs at least 2 parties".into(),
        ));
    }
    let model = Mlp::bundled();
    let inputs = mlp::requests(cfg.seed, cfg.requests);
    let approx = cfg.approx.clone();
    let oracle: Vec<Vec<f64>> = inputs
        .iter()
        .map(|x| model.forward_plain(x, Activations::Recurrence, &approx))
        .collect();
    let exact: Vec<Vec<f64>> = inputs
        .iter()
        .map(|x| model.forward_plain(x, Activations::Exact, &approx))
        .collect();

    methods(cfg, &[Method::Multivariate])
        .into_iter()
        .map(|method| {
            let (got, stats, t) =
                timed(cfg, method, |s| model.forward_secure(s, &inputs, &approx))?;
            let agree = got
                .iter()
                .zip(&exact)
                .filter(|(g, e)| mlp::argmax(g) == mlp::argmax(e))
                .count();
            let flat = got.concat();
            let mut row = BenchReport::new("bench-mlp", method, cfg, &stats).with_errors(
                ErrorSummary::between(&flat, &oracle.concat()),
                ErrorSummary::between(&flat, &exact.concat()),
            );
            row.requests = Some(cfg.requests);
            row.argmax_agreement = Some(agree);
            row.t_comp_ms = t;
            Ok(row)
        })
        .collect()
}
