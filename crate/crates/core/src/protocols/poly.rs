//! Univariate polynomials by base-tuple exponentiation.
//!
//! With base size `g`, the first round computes `x^2 … x^{g−1}` (and `x^g`
//! when more than one block is needed) as parallel n-ary products. Every
//! further block of `g` coefficients costs one vectorized binary round that
//! multiplies the previous block of powers by `x^g`. Coefficients are then
//! applied locally.

use crate::engine::Session;
use crate::error::{Error, Result};
use crate::ring::Ring;
use crate::sharing::{Scale, Shared};

use super::{begin_product, lockstep, PendingProduct};

/// Fractional bits used to encode public polynomial coefficients.
pub const DEFAULT_COEFF_BITS: u32 = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct PolyPlan {
    /// `b_0 … b_deg`.
    pub coeffs: Vec<f64>,
    /// Base tuple size `g`.
    pub base: usize,
    pub coeff_bits: u32,
}

impl PolyPlan {
    pub fn new(coeffs: Vec<f64>, base: usize) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Config(
                "polynomial needs at least one coefficient".into(),
            ));
        }
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::Config(format!("non-finite coefficient {c}")));
        }
        if base < 2 {
            return Err(Error::Config(format!("base tuple size {base} < 2")));
        }
        Ok(PolyPlan {
            coeffs,
            base,
            coeff_bits: DEFAULT_COEFF_BITS,
        })
    }

    pub fn with_coeff_bits(mut self, bits: u32) -> Self {
        self.coeff_bits = bits;
        self
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn blocks(&self) -> usize {
        (self.degree() + 1).div_ceil(self.base)
    }
}

/// Online rounds of [`poly_eval`]: `1 + (⌈(deg+1)/g⌉ − 1)` for degree ≥ 2.
/// Affine polynomials are local, and at `deg = g` the second block is just
/// `x^g`, which the base round already produced.
pub fn poly_rounds(degree: usize, base: usize) -> u64 {
    if degree < 2 {
        0
    } else if degree == base {
        1
    } else {
        (degree + 1).div_ceil(base) as u64
    }
}

pub fn poly_eval<R: Ring>(s: &mut Session<R>, x: &Shared<R>, plan: &PolyPlan) -> Result<Shared<R>> {
    Ok(poly_eval_batch(s, &[x], plan)?.remove(0))
}

/// Evaluates `plan` on independent inputs in lockstep. Outputs keep each
/// input's fractional precision.
pub fn poly_eval_batch<R: Ring>(
    s: &mut Session<R>,
    xs: &[&Shared<R>],
    plan: &PolyPlan,
) -> Result<Vec<Shared<R>>> {
    if plan.base > s.config().max_arity {
        return Err(Error::Config(format!(
            "base tuple size {} exceeds max arity {}",
            plan.base,
            s.config().max_arity
        )));
    }
    let deg = plan.degree();
    let g = plan.base;
    let blocks = plan.blocks();

    // powers[item][k] = x^k for k >= 1.
    let mut powers: Vec<Vec<Option<Shared<R>>>> = xs
        .iter()
        .map(|x| {
            let mut v = vec![None; deg.max(g) + 1];
            v[1] = Some((*x).clone());
            v
        })
        .collect();

    if deg >= 2 {
        let mut wanted: Vec<usize> = (2..=deg.min(g - 1)).collect();
        if blocks > 1 {
            wanted.push(g);
        }
        let base_round = lockstep(
            s,
            xs,
            |s, x| {
                wanted
                    .iter()
                    .map(|k| begin_product(s, &vec![*x; *k], x.frac_bits()))
                    .collect::<Result<Vec<PendingProduct<R>>>>()
            },
            |s, pend| {
                pend.into_iter()
                    .map(|p| p.finish(s))
                    .collect::<Result<Vec<_>>>()
            },
        )?;
        for (item, outs) in base_round.into_iter().enumerate() {
            for (k, v) in wanted.iter().zip(outs) {
                powers[item][*k] = Some(v);
            }
        }

        for j in 1..blocks {
            // Block j holds powers j·g … min((j+1)·g, deg+1) − 1; entry j·g + r
            // is x^g · x^{(j−1)·g + r}. x^g itself is already known.
            let targets: Vec<usize> = (j * g..((j + 1) * g).min(deg + 1))
                .filter(|t| *t != g)
                .collect();
            if targets.is_empty() {
                continue;
            }
            let items: Vec<usize> = (0..xs.len()).collect();
            let outs = lockstep(
                s,
                &items,
                |s, item| {
                    let p = &powers[*item];
                    let xg = p[g].as_ref().expect("x^g computed in the base round");
                    let sources: Vec<&Shared<R>> = targets
                        .iter()
                        .map(|t| p[t - g].as_ref().expect("previous block computed"))
                        .collect();
                    let lhs = Shared::concat(&sources)?;
                    let rhs = Shared::concat(&vec![xg; targets.len()])?;
                    begin_product(s, &[&lhs, &rhs], xs[*item].frac_bits())
                },
                |s, p| p.finish(s),
            )?;
            for (item, out) in outs.into_iter().enumerate() {
                let len = xs[item].len();
                for (i, t) in targets.iter().enumerate() {
                    powers[item][*t] = Some(out.slice(i * len, (i + 1) * len));
                }
            }
        }
    }

    xs.iter()
        .zip(&powers)
        .map(|(x, p)| combine(x, p, plan))
        .collect()
}

/// `b_0 + Σ b_k · x^k`, locally.
fn combine<R: Ring>(
    x: &Shared<R>,
    powers: &[Option<Shared<R>>],
    plan: &PolyPlan,
) -> Result<Shared<R>> {
    let frac = x.frac_bits();
    let mut acc = Shared::public(x.n_parties(), &vec![R::ZERO; x.len()], Scale::fixed(frac));
    for (k, b) in plan.coeffs.iter().enumerate().skip(1) {
        if *b == 0.0 {
            continue;
        }
        let p = powers[k]
            .as_ref()
            .expect("every power up to the degree is computed");
        let physical = p.scale().physical() + plan.coeff_bits;
        if physical + 2 > R::BITS {
            return Err(Error::Capacity(format!(
                "x^{k} at {} bits times a {}-bit coefficient exceeds the {}-bit ring",
                p.scale().physical(),
                plan.coeff_bits,
                R::BITS
            )));
        }
        acc = acc.add(&p.mul_const(*b, plan.coeff_bits)?)?;
    }
    acc.add_const(plan.coeffs[0])
}
