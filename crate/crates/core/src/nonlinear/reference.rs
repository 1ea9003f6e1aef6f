//! The approximation recurrences in plain `f64`, step for step as the
//! secure versions run them. Used as the method oracle: the gap between a
//! secure result and this one is the error MPC itself adds.

use super::ApproxConfig;

pub fn exp(x: f64, cfg: &ApproxConfig) -> f64 {
    let mut y = 1.0 + x / (cfg.exp_base as f64).powi(cfg.exp_iters as i32);
    for _ in 0..cfg.exp_iters {
        y = y.powi(cfg.exp_base as i32);
    }
    y
}

pub fn reciprocal(x: f64, cfg: &ApproxConfig) -> f64 {
    let mut y = 3.0 * exp(0.5 - x, cfg) + 0.003;
    for _ in 0..cfg.recip_iters {
        y = 2.0 * y - x * y * y;
    }
    y
}

pub fn log(x: f64, cfg: &ApproxConfig) -> f64 {
    let mut y = x / 120.0 - 20.0 * exp(-(2.0 * x + 1.0), cfg) + 3.0;
    for _ in 0..cfg.log_iters {
        let h = 1.0 - x * exp(-y, cfg);
        let correction: f64 = (1..=cfg.log_order)
            .map(|k| h.powi(k as i32) / k as f64)
            .sum();
        y -= correction;
    }
    y
}

/// `e^{ix}` by repeated complex squaring: `(cos x, sin x)`.
pub fn expi(x: f64, cfg: &ApproxConfig) -> (f64, f64) {
    let (mut a, mut b) = (1.0, x / 2f64.powi(cfg.trig_iters as i32));
    for _ in 0..cfg.trig_iters {
        (a, b) = (a * a - b * b, 2.0 * a * b);
    }
    (a, b)
}

pub fn sin(x: f64, cfg: &ApproxConfig) -> f64 {
    expi(x, cfg).1
}

pub fn cos(x: f64, cfg: &ApproxConfig) -> f64 {
    expi(x, cfg).0
}

pub fn sigmoid(x: f64, cfg: &ApproxConfig) -> f64 {
    reciprocal(1.0 + exp(-x, cfg), cfg)
}

pub fn tanh(x: f64, cfg: &ApproxConfig) -> f64 {
    2.0 * sigmoid(2.0 * x, cfg) - 1.0
}

/// `e^{x_i} · 2^{-k} · reciprocal(2^{-k} Σ_j e^{x_j})` with `2^k ≥ len`.
pub fn softmax(xs: &[f64], cfg: &ApproxConfig) -> Vec<f64> {
    let e: Vec<f64> = xs.iter().map(|x| exp(*x, cfg)).collect();
    let scale = 1.0 / xs.len().next_power_of_two() as f64;
    let r = reciprocal(e.iter().sum::<f64>() * scale, cfg);
    e.iter().map(|v| v * r * scale).collect()
}
