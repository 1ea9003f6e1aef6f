//! Nonlinear functions as iterated ring arithmetic.
//!
//! - `exp(x) = lim (1 + x/d^n)^{d^n}`: each step is one d-ary product.
//! - `ln x`: Householder steps `y ← y − Σ_{j≤k} h^j/j`, `h = 1 − x·e^{−y}`.
//! - `1/x`: Newton steps `y ← 2y − x·y·y`, the cubic term one 3-ary product.
//! - `sin`, `cos`: `e^{ix}` by repeated complex squaring.
//! - sigmoid, tanh and softmax compose the above.
//!
//! Internally every function runs at a *working precision* chosen from the
//! ring capacity: enough fractional bits that `arity × bits` plus the value
//! range still leaves a wide margin below the ring size, so masked reveals
//! wrap with negligible probability. Results are handed back at the input's
//! precision. All functions are batch-first: independent inputs advance in
//! lockstep and, with coalescing on, share every round.

pub mod reference;

use crate::engine::Session;
use crate::error::{Error, Result};
use crate::protocols::{mul_batch, mul_multi_batch, poly_eval_batch, rescale_batch, PolyPlan};
use crate::ring::Ring;
use crate::sharing::{dyadic_bits, Shared};

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxConfig {
    /// Exponent base `d`: each exp step raises to the d-th power.
    pub exp_base: u32,
    pub exp_iters: u32,
    /// Order `k` of the log series.
    pub log_order: u32,
    pub log_iters: u32,
    pub recip_iters: u32,
    pub trig_iters: u32,
    /// Upper bound on internal fractional bits.
    pub max_working_bits: u32,
    /// Bits of headroom kept between the largest physical value and the ring
    /// size; a masked reveal wraps with probability about `2^-margin`.
    pub wrap_margin_bits: u32,
    /// Fractional bits for public real constants.
    pub const_bits: u32,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        ApproxConfig {
            exp_base: 3,
            exp_iters: 8,
            log_order: 8,
            log_iters: 2,
            recip_iters: 10,
            trig_iters: 10,
            max_working_bits: 28,
            wrap_margin_bits: 32,
            const_bits: 32,
        }
    }
}

impl ApproxConfig {
    pub fn validate(&self) -> Result<()> {
        if self.exp_base < 2 {
            return Err(Error::Config(format!("exp base {} < 2", self.exp_base)));
        }
        for (name, v) in [
            ("exp_iters", self.exp_iters),
            ("log_order", self.log_order),
            ("log_iters", self.log_iters),
            ("recip_iters", self.recip_iters),
            ("trig_iters", self.trig_iters),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        if self.const_bits == 0 || self.const_bits > 48 {
            return Err(Error::Config(format!(
                "const_bits {} outside 1..=48",
                self.const_bits
            )));
        }
        Ok(())
    }

    /// Largest physical width an exp input may carry: its first step
    /// multiplies by a constant and then opens a value near 1.
    fn exp_input_limit<R: Ring>(&self, step_bits: u32) -> u32 {
        (R::BITS - 2).saturating_sub(self.wrap_margin_bits + step_bits)
    }

    /// Relative error exp's fixed-point steps may add on top of the
    /// recurrence itself: each of the `d^n` factors is rounded at the
    /// working precision, so `y₀`'s quantization is amplified `d^n` times.
    pub fn exp_relative_budget<R: Ring>(&self) -> Result<f64> {
        let w = self.working_bits::<R>(self.exp_base, EXP_VALUE_BITS)?;
        Ok((self.exp_base as f64).powi(self.exp_iters as i32) * 2f64.powi(-(w as i32)))
    }

    /// Fractional bits for `arity`-ary products of values below
    /// `2^value_bits`.
    pub fn working_bits<R: Ring>(&self, arity: u32, value_bits: u32) -> Result<u32> {
        let room = (R::BITS - 1).saturating_sub(self.wrap_margin_bits + value_bits);
        let bits = (room / arity).min(self.max_working_bits);
        if bits < 8 {
            return Err(Error::Capacity(format!(
                "{}-bit ring leaves {bits} working bits for {arity}-ary products",
                R::BITS
            )));
        }
        Ok(bits)
    }
}

/// Largest result magnitude on the documented domains, in bits: e^8 for exp,
/// 100 for the reciprocal's Newton products.
const EXP_VALUE_BITS: u32 = 12;
const RECIP_VALUE_BITS: u32 = 7;
const UNIT_VALUE_BITS: u32 = 1;

/// Physical width of exp results. The last step runs its inputs at
/// `EXP_OUT_PHYSICAL / d` bits so the result can feed a further exp (or any
/// product) without a rescale round.
const EXP_OUT_PHYSICAL: u32 = 57;

/// Shares of `e^{ix}`: `re = cos x`, `im = sin x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexShare<R> {
    pub re: Shared<R>,
    pub im: Shared<R>,
}

/// Signature shared by the batched secure functions.
pub type BatchFn<R> = fn(&mut Session<R>, &[&Shared<R>], &ApproxConfig) -> Result<Vec<Shared<R>>>;

fn single<R: Ring>(
    s: &mut Session<R>,
    x: &Shared<R>,
    cfg: &ApproxConfig,
    f: BatchFn<R>,
) -> Result<Shared<R>> {
    Ok(f(s, &[x], cfg)?.remove(0))
}

fn at_input_precision<R: Ring>(outs: Vec<Shared<R>>, xs: &[&Shared<R>]) -> Vec<Shared<R>> {
    outs.into_iter()
        .zip(xs)
        .map(|(y, x)| y.with_frac_bits(x.frac_bits()))
        .collect()
}

// ---- exp --------------------------------------------------------------

fn exp_working<R: Ring>(
    s: &mut Session<R>,
    xs: &[Shared<R>],
    cfg: &ApproxConfig,
) -> Result<Vec<Shared<R>>> {
    cfg.validate()?;
    let d = cfg.exp_base;
    let w = cfg.working_bits::<R>(d, EXP_VALUE_BITS)?;
    let w_last = w.min(EXP_OUT_PHYSICAL / d);
    let step = (d as f64).powi(-(cfg.exp_iters as i32));
    let limit = cfg.exp_input_limit::<R>(dyadic_bits(step, cfg.const_bits));
    let xs = fit_physical(s, xs, limit)?;
    let mut ys = xs
        .iter()
        .map(|x| {
            x.with_frac_bits(w)
                .mul_const(step, cfg.const_bits)?
                .add_const(1.0)
        })
        .collect::<Result<Vec<_>>>()?;
    for i in 0..cfg.exp_iters {
        let bits = if i + 1 == cfg.exp_iters { w_last } else { w };
        let inputs: Vec<Shared<R>> = ys.iter().map(|y| y.with_frac_bits(bits)).collect();
        let groups: Vec<Vec<&Shared<R>>> = inputs.iter().map(|y| vec![y; d as usize]).collect();
        ys = mul_multi_batch(s, &groups)?;
    }
    Ok(ys.iter().map(|y| y.with_frac_bits(w)).collect())
}

/// Rescales (one round for the batch) the inputs wider than `limit`
/// physical bits; a no-op when all fit.
fn fit_physical<R: Ring>(
    s: &mut Session<R>,
    xs: &[Shared<R>],
    limit: u32,
) -> Result<Vec<Shared<R>>> {
    if xs.iter().all(|x| x.scale().physical() <= limit) {
        return Ok(xs.to_vec());
    }
    let wide: Vec<&Shared<R>> = xs.iter().filter(|x| x.scale().physical() > limit).collect();
    let mut fixed = rescale_batch(s, &wide)?.into_iter();
    let out: Vec<Shared<R>> = xs
        .iter()
        .map(|x| {
            if x.scale().physical() > limit {
                fixed.next().expect("one rescaled value per wide input")
            } else {
                x.clone()
            }
        })
        .collect();
    if let Some(x) = out.iter().find(|x| x.scale().physical() > limit) {
        return Err(Error::Capacity(format!(
            "exp input needs {} fractional bits, limit is {limit}",
            x.scale().physical()
        )));
    }
    Ok(out)
}

pub fn exp_batch<R: Ring>(
    s: &mut Session<R>,
    xs: &[&Shared<R>],
    cfg: &ApproxConfig,
) -> Result<Vec<Shared<R>>> {
    s.labeled("exp", |s| {
        let owned: Vec<Shared<R>> = xs.iter().map(|x| (*x).clone()).collect();
        Ok(at_input_precision(exp_working(s, &owned, cfg)?, xs))
    })
}

/// `e^x` for `|x| ≤ 8`: `exp_iters` rounds.
pub fn exp<R: Ring>(s: &mut Session<R>, x: &Shared<R>, cfg: &ApproxConfig) -> Result<Shared<R>> {
    single(s, x, cfg, exp_batch)
}

// ---- reciprocal ---------------------------------------------------------

fn reciprocal_working<R: Ring>(
    s: &mut Session<R>,
    xs: &[Shared<R>],
    cfg: &ApproxConfig,
) -> Result<Vec<Shared<R>>> {
    let w = cfg.working_bits::<R>(3, RECIP_VALUE_BITS)?;
    let shifted = xs
        .iter()
        .map(|x| x.neg().add_const(0.5))
        .collect::<Result<Vec<_>>>()?;
    let e = exp_working(s, &shifted, cfg)?;
    let mut ys = e
        .iter()
        .map(|v| {
            Ok(v.mul_const(3.0, cfg.const_bits)?
                .add_const(0.003)?
                .with_frac_bits(w))
        })
        .collect::<Result<Vec<_>>>()?;
    let xw: Vec<Shared<R>> = xs.iter().map(|x| x.with_frac_bits(w)).collect();
    for _ in 0..cfg.recip_iters {
        let groups: Vec<Vec<&Shared<R>>> = xw.iter().zip(&ys).map(|(x, y)| vec![x, y, y]).collect();
        let cubic = mul_multi_batch(s, &groups)?;
        ys = ys
            .iter()
            .zip(&cubic)
            .map(|(y, t)| y.mul_int(2).sub(t))
            .collect::<Result<Vec<_>>>()?;
    }
    Ok(ys)
}

pub fn reciprocal_batch<R: Ring>(
    s: &mut Session<R>,
    xs: &[&Shared<R>],
    cfg: &ApproxConfig,
) -> Result<Vec<Shared<R>>> {
    s.labeled("reciprocal", |s| {
        let owned: Vec<Shared<R>> = xs.iter().map(|x| (*x).clone()).collect();
        Ok(at_input_precision(reciprocal_working(s, &owned, cfg)?, xs))
    })
}

/// `1/x` for `x ∈ [0.01, 100]`: `exp_iters + recip_iters` rounds.
pub fn reciprocal<R: Ring>(
    s: &mut Session<R>,
    x: &Shared<R>,
    cfg: &ApproxConfig,
) -> Result<Shared<R>> {
    single(s, x, cfg, reciprocal_batch)
}

// ---- log ----------------------------------------------------------------

fn log_series(cfg: &ApproxConfig, base: usize, bits: u32) -> Result<PolyPlan> {
    let mut coeffs = vec![0.0];
    coeffs.extend((1..=cfg.log_order).map(|k| 1.0 / k as f64));
    Ok(PolyPlan::new(coeffs, base)?.with_coeff_bits(bits))
}

pub fn log_batch<R: Ring>(
    s: &mut Session<R>,
    xs: &[&Shared<R>],
    cfg: &ApproxConfig,
) -> Result<Vec<Shared<R>>> {
    s.labeled("log", |s| {
        let w = cfg.working_bits::<R>(cfg.exp_base, EXP_VALUE_BITS)?;
        let base = s.config().max_arity;
        // The series multiplies base-size products by coefficients of the
        // same precision, so it gets one more share of the ring budget.
        let wp = cfg.working_bits::<R>(base as u32 + 1, UNIT_VALUE_BITS)?;
        let plan = log_series(cfg, base, wp)?;

        let xw: Vec<Shared<R>> = xs.iter().map(|x| x.with_frac_bits(w)).collect();
        let args = xw
            .iter()
            .map(|x| x.mul_int(-2).add_const(-1.0))
            .collect::<Result<Vec<_>>>()?;
        let e = exp_working(s, &args, cfg)?;
        let mut ys = xw
            .iter()
            .zip(&e)
            .map(|(x, e)| {
                x.mul_const(1.0 / 120.0, cfg.const_bits)?
                    .add(&e.mul_const(-20.0, cfg.const_bits)?)?
                    .add_const(3.0)
            })
            .collect::<Result<Vec<_>>>()?;

        for _ in 0..cfg.log_iters {
            let neg: Vec<Shared<R>> = ys.iter().map(Shared::neg).collect();
            let ey = exp_working(s, &neg, cfg)?;
            let pairs: Vec<(&Shared<R>, &Shared<R>)> = xw.iter().zip(&ey).collect();
            let xe = mul_batch(s, &pairs)?;
            let hs: Vec<Shared<R>> = xe
                .iter()
                .map(|t| Ok(t.neg().add_const(1.0)?.with_frac_bits(wp)))
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<&Shared<R>> = hs.iter().collect();
            let corr = poly_eval_batch(s, &refs, &plan)?;
            ys = ys
                .iter()
                .zip(&corr)
                .map(|(y, c)| y.sub(&c.with_frac_bits(w)))
                .collect::<Result<Vec<_>>>()?;
        }
        Ok(at_input_precision(ys, xs))
    })
}

/// `ln x` for `x ∈ [0.05, 60]`.
pub fn log<R: Ring>(s: &mut Session<R>, x: &Shared<R>, cfg: &ApproxConfig) -> Result<Shared<R>> {
    single(s, x, cfg, log_batch)
}

// ---- sin / cos ----------------------------------------------------------

pub fn expi_batch<R: Ring>(
    s: &mut Session<R>,
    xs: &[&Shared<R>],
    cfg: &ApproxConfig,
) -> Result<Vec<ComplexShare<R>>> {
    cfg.validate()?;
    s.labeled("trig", |s| {
        let w = cfg.working_bits::<R>(2, UNIT_VALUE_BITS)?;
        let step = 2f64.powi(-(cfg.trig_iters as i32));
        let mut zs = xs
            .iter()
            .map(|x| {
                Ok(ComplexShare {
                    re: Shared::public_f64(x.n_parties(), &vec![1.0; x.len()], w)?,
                    im: x.with_frac_bits(w).mul_const(step, cfg.const_bits)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        for _ in 0..cfg.trig_iters {
            // a², b² and ab for every input in one exchange.
            let pairs: Vec<(&Shared<R>, &Shared<R>)> = zs
                .iter()
                .flat_map(|z| [(&z.re, &z.re), (&z.im, &z.im), (&z.re, &z.im)])
                .collect();
            let prods = mul_batch_grouped(s, &pairs, 3)?;
            zs = prods
                .chunks(3)
                .map(|p| {
                    Ok(ComplexShare {
                        re: p[0].sub(&p[1])?,
                        im: p[2].mul_int(2),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
        }
        Ok(zs
            .into_iter()
            .zip(xs)
            .map(|(z, x)| ComplexShare {
                re: z.re.with_frac_bits(x.frac_bits()),
                im: z.im.with_frac_bits(x.frac_bits()),
            })
            .collect())
    })
}

/// Binary products where each run of `group` consecutive pairs belongs to
/// one batch item (and so always shares that item's round).
fn mul_batch_grouped<R: Ring>(
    s: &mut Session<R>,
    pairs: &[(&Shared<R>, &Shared<R>)],
    group: usize,
) -> Result<Vec<Shared<R>>> {
    let chunks: Vec<&[(&Shared<R>, &Shared<R>)]> = pairs.chunks(group).collect();
    let outs = crate::protocols::lockstep(
        s,
        &chunks,
        |s, chunk| {
            chunk
                .iter()
                .map(|(x, y)| {
                    crate::protocols::begin_product(s, &[*x, *y], x.frac_bits().max(y.frac_bits()))
                })
                .collect::<Result<Vec<_>>>()
        },
        |s, pend| {
            pend.into_iter()
                .map(|p| p.finish(s))
                .collect::<Result<Vec<_>>>()
        },
    )?;
    Ok(outs.into_iter().flatten().collect())
}

/// `e^{ix}` for `|x| ≤ 2π`: `trig_iters` rounds.
pub fn expi<R: Ring>(
    s: &mut Session<R>,
    x: &Shared<R>,
    cfg: &ApproxConfig,
) -> Result<ComplexShare<R>> {
    Ok(expi_batch(s, &[x], cfg)?.remove(0))
}

pub fn sin<R: Ring>(s: &mut Session<R>, x: &Shared<R>, cfg: &ApproxConfig) -> Result<Shared<R>> {
    Ok(expi(s, x, cfg)?.im)
}

pub fn cos<R: Ring>(s: &mut Session<R>, x: &Shared<R>, cfg: &ApproxConfig) -> Result<Shared<R>> {
    Ok(expi(s, x, cfg)?.re)
}

pub fn sin_batch<R: Ring>(
    s: &mut Session<R>,
    xs: &[&Shared<R>],
    cfg: &ApproxConfig,
) -> Result<Vec<Shared<R>>> {
    Ok(expi_batch(s, xs, cfg)?.into_iter().map(|z| z.im).collect())
}

pub fn cos_batch<R: Ring>(
    s: &mut Session<R>,
    xs: &[&Shared<R>],
    cfg: &ApproxConfig,
) -> Result<Vec<Shared<R>>> {
    Ok(expi_batch(s, xs, cfg)?.into_iter().map(|z| z.re).collect())
}

// ---- compositions -------------------------------------------------------

fn sigmoid_working<R: Ring>(
    s: &mut Session<R>,
    xs: &[Shared<R>],
    cfg: &ApproxConfig,
) -> Result<Vec<Shared<R>>> {
    let neg: Vec<Shared<R>> = xs.iter().map(Shared::neg).collect();
    let e = exp_working(s, &neg, cfg)?;
    let u = e
        .iter()
        .map(|v| v.add_const(1.0))
        .collect::<Result<Vec<_>>>()?;
    reciprocal_working(s, &u, cfg)
}

pub fn sigmoid_batch<R: Ring>(
    s: &mut Session<R>,
    xs: &[&Shared<R>],
    cfg: &ApproxConfig,
) -> Result<Vec<Shared<R>>> {
    s.labeled("sigmoid", |s| {
        let owned: Vec<Shared<R>> = xs.iter().map(|x| (*x).clone()).collect();
        Ok(at_input_precision(sigmoid_working(s, &owned, cfg)?, xs))
    })
}

/// `1 / (1 + e^{−x})` for `x ∈ [−4.5, 8]`.
pub fn sigmoid<R: Ring>(
    s: &mut Session<R>,
    x: &Shared<R>,
    cfg: &ApproxConfig,
) -> Result<Shared<R>> {
    single(s, x, cfg, sigmoid_batch)
}

pub fn tanh_batch<R: Ring>(
    s: &mut Session<R>,
    xs: &[&Shared<R>],
    cfg: &ApproxConfig,
) -> Result<Vec<Shared<R>>> {
    s.labeled("tanh", |s| {
        let doubled: Vec<Shared<R>> = xs.iter().map(|x| x.mul_int(2)).collect();
        let sig = sigmoid_working(s, &doubled, cfg)?;
        let outs = sig
            .iter()
            .map(|v| v.mul_int(2).add_const(-1.0))
            .collect::<Result<Vec<_>>>()?;
        Ok(at_input_precision(outs, xs))
    })
}

/// `2·sigmoid(2x) − 1` for `x ∈ [−2.25, 4]`.
pub fn tanh<R: Ring>(s: &mut Session<R>, x: &Shared<R>, cfg: &ApproxConfig) -> Result<Shared<R>> {
    single(s, x, cfg, tanh_batch)
}

/// Softmax over each input vector, entries in `[−4, 4]`. The normalizer is
/// `2^{-k}·reciprocal(2^{-k}·Σ e^{x_j})` with `2^k ≥ len`: the scaled sum
/// lies between half the mean and the mean, inside the reciprocal's domain,
/// and a power-of-two divisor costs no constant precision.
pub fn softmax_batch<R: Ring>(
    s: &mut Session<R>,
    xs: &[&Shared<R>],
    cfg: &ApproxConfig,
) -> Result<Vec<Shared<R>>> {
    s.labeled("softmax", |s| {
        for x in xs {
            if x.is_empty() {
                return Err(Error::Shape("softmax of an empty vector".into()));
            }
        }
        let owned: Vec<Shared<R>> = xs.iter().map(|x| (*x).clone()).collect();
        let e = exp_working(s, &owned, cfg)?;
        let scale = |len: usize| 2f64.powi(-(len.next_power_of_two().trailing_zeros() as i32));
        let means = e
            .iter()
            .map(|v| v.sum_elements().mul_const(scale(v.len()), cfg.const_bits))
            .collect::<Result<Vec<_>>>()?;
        let r = reciprocal_working(s, &means, cfg)?;
        let rb = r
            .iter()
            .zip(&e)
            .map(|(r, e)| r.broadcast(e.len()))
            .collect::<Result<Vec<_>>>()?;
        let pairs: Vec<(&Shared<R>, &Shared<R>)> = e.iter().zip(&rb).collect();
        let prods = mul_batch(s, &pairs)?;
        let outs = prods
            .iter()
            .map(|p| p.mul_const(scale(p.len()), cfg.const_bits))
            .collect::<Result<Vec<_>>>()?;
        Ok(at_input_precision(outs, xs))
    })
}

pub fn softmax<R: Ring>(
    s: &mut Session<R>,
    x: &Shared<R>,
    cfg: &ApproxConfig,
) -> Result<Shared<R>> {
    single(s, x, cfg, softmax_batch)
}
