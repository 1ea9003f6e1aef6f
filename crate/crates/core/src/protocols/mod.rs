//! Linear protocols over [`Shared`] values.
//!
//! Every multiplication is two-phase: `begin_*` consumes correlated
//! randomness and queues the masked reveal on the session; after a flush,
//! `finish` completes the product locally. The `*_batch` helpers run many
//! independent products in lockstep so their reveals can share a round.
//!
//! Products never divide shares locally. The result keeps its extra
//! fractional bits as *deferred* bits (see [`Scale`]), and the next reveal
//! that consumes it removes them through a wide dealer mask.

mod matmul;
mod poly;

pub use matmul::{begin_matmul, matmul, matmul_batch, matmul_with, PendingMatmul, SharedMatrix};
pub use poly::{poly_eval, poly_eval_batch, poly_rounds, PolyPlan, DEFAULT_COEFF_BITS};

use crate::dealer::{AuxSet, BeaverTriple};
use crate::engine::{Method, RevealTicket, Session};
use crate::error::{Error, Result};
use crate::par;
use crate::ring::Ring;
use crate::sharing::{Scale, ShareVector, Shared};

/// Runs `begin` for every item, marking item boundaries, flushes once and
/// then runs `finish` in the same order.
pub(crate) fn lockstep<R, T, P, O>(
    s: &mut Session<R>,
    items: &[T],
    mut begin: impl FnMut(&mut Session<R>, &T) -> Result<P>,
    mut finish: impl FnMut(&mut Session<R>, P) -> Result<O>,
) -> Result<Vec<O>>
where
    R: Ring,
{
    let mut pending = Vec::with_capacity(items.len());
    for item in items {
        pending.push(begin(s, item)?);
        s.item_boundary()?;
    }
    s.flush()?;
    pending.into_iter().map(|p| finish(s, p)).collect()
}

/// Share-wise `x − m` on raw ring words (scale tags ignored).
pub(crate) fn raw_sub<R: Ring>(x: &Shared<R>, m: &Shared<R>) -> Shared<R> {
    let parts = x
        .parts()
        .iter()
        .zip(m.parts())
        .map(|(a, b)| {
            ShareVector::new(
                a.owner,
                a.data.iter().zip(&b.data).map(|(u, v)| *u - *v).collect(),
                Scale::INTEGER,
            )
        })
        .collect();
    Shared::from_parts_unchecked(parts)
}

/// Opened masked value `δ` rescaled by the input's deferred bits.
pub(crate) fn rescale_opened<R: Ring>(opened: &[R], shift: u32) -> Vec<R> {
    if shift == 0 {
        opened.to_vec()
    } else {
        opened.iter().map(|v| v.shr_round(shift)).collect()
    }
}

/// Checks that a mask fits an input: wide exactly when bits are deferred.
pub(crate) fn check_mask(id: u64, input: usize, deferred: u32, has_wide: bool) -> Result<()> {
    if (deferred > 0) != has_wide {
        return Err(Error::Preprocessing(format!(
            "correlation {id}: input {input} carries {deferred} deferred bits but the mask is {}",
            if has_wide { "wide" } else { "narrow" }
        )));
    }
    Ok(())
}

/// Scale of a product of inputs at `fracs`, reported at `out_frac`.
pub(crate) fn product_scale<R: Ring>(fracs: &[u32], out_frac: u32) -> Result<Scale> {
    let total: u32 = fracs.iter().sum();
    if out_frac > total {
        return Err(Error::Config(format!(
            "product of {total} fractional bits cannot be reported at {out_frac}"
        )));
    }
    if total + 2 > R::BITS {
        return Err(Error::Capacity(format!(
            "product carries {total} fractional bits in a {}-bit ring",
            R::BITS
        )));
    }
    Ok(Scale {
        frac_bits: out_frac,
        deferred_bits: total - out_frac,
    })
}

/// An elementwise product waiting for its masked inputs to be opened.
pub struct PendingProduct<R: Ring> {
    ticket: RevealTicket,
    arity: usize,
    len: usize,
    shifts: Vec<u32>,
    /// Auxiliary entries indexed by subset bitmask (index 0 unused).
    entries: Vec<Shared<R>>,
    scale: Scale,
}

fn validate_inputs<R: Ring>(s: &Session<R>, xs: &[&Shared<R>]) -> Result<usize> {
    let first = xs
        .first()
        .ok_or_else(|| Error::Config("product of no inputs".into()))?;
    for x in xs {
        if x.n_parties() != s.n_parties() {
            return Err(Error::Shape(format!(
                "{} shares for {} parties",
                x.n_parties(),
                s.n_parties()
            )));
        }
        if x.len() != first.len() {
            return Err(Error::Shape(format!(
                "product inputs of lengths {} and {}",
                first.len(),
                x.len()
            )));
        }
    }
    Ok(first.len())
}

/// Default reporting precision of a product: the widest input precision.
pub fn default_out_frac<R: Ring>(xs: &[&Shared<R>]) -> u32 {
    xs.iter().map(|x| x.frac_bits()).max().unwrap_or(0)
}

/// Queues the masked reveal of an n-ary elementwise product. Arity 2 uses
/// a binary Beaver triple; larger arities use an auxiliary set.
pub fn begin_product<R: Ring>(
    s: &mut Session<R>,
    xs: &[&Shared<R>],
    out_frac: u32,
) -> Result<PendingProduct<R>> {
    let len = validate_inputs(s, xs)?;
    let arity = xs.len();
    if arity < 2 || arity > s.config().max_arity {
        return Err(Error::Config(format!(
            "arity {arity} outside 2..={}",
            s.config().max_arity
        )));
    }
    let shifts: Vec<u32> = xs.iter().map(|x| x.scale().deferred_bits).collect();
    let aux = if arity == 2 {
        s.triple(len, [shifts[0], shifts[1]])?.as_aux()
    } else {
        s.aux_set(arity, len, shifts)?
    };
    begin_product_with(s, xs, &aux, out_frac)
}

/// [`begin_product`] with caller-supplied material.
pub fn begin_product_with<R: Ring>(
    s: &mut Session<R>,
    xs: &[&Shared<R>],
    aux: &AuxSet<R>,
    out_frac: u32,
) -> Result<PendingProduct<R>> {
    let len = validate_inputs(s, xs)?;
    let arity = xs.len();
    if aux.arity != arity || aux.len() != len {
        return Err(Error::Shape(format!(
            "auxiliary set for {} x {} used on {arity} x {len}",
            aux.arity,
            aux.len()
        )));
    }
    let fracs: Vec<u32> = xs.iter().map(|x| x.frac_bits()).collect();
    let scale = product_scale::<R>(&fracs, out_frac)?;
    let shifts: Vec<u32> = xs.iter().map(|x| x.scale().deferred_bits).collect();
    for (i, d) in shifts.iter().enumerate() {
        check_mask(aux.id, i, *d, aux.wide[i].is_some())?;
    }
    s.consume(aux.id)?;

    let masked: Vec<Shared<R>> = xs
        .iter()
        .enumerate()
        .map(|(i, x)| raw_sub(x, aux.reveal_mask(i)))
        .collect();
    let refs: Vec<&Shared<R>> = masked.iter().collect();
    let ticket = s.defer_reveal(&Shared::concat(&refs)?)?;

    let mut entries = Vec::with_capacity(1 << arity);
    entries.push(Shared::public(s.n_parties(), &[], Scale::INTEGER));
    for subset in 1u32..(1 << arity) {
        entries.push(aux.entry(subset).clone());
    }
    Ok(PendingProduct {
        ticket,
        arity,
        len,
        shifts,
        entries,
        scale,
    })
}

impl<R: Ring> PendingProduct<R> {
    /// Evaluates `Σ_T (∏_{i∉T} δ_i) · aux_T + ∏ δ_i` share-wise, where `T`
    /// ranges over nonempty subsets and the last term goes to party 0.
    pub fn finish(self, s: &mut Session<R>) -> Result<Shared<R>> {
        let opened = s.redeem(self.ticket)?;
        let (n, len) = (self.arity, self.len);
        let deltas: Vec<Vec<R>> = (0..n)
            .map(|i| rescale_opened(&opened[i * len..(i + 1) * len], self.shifts[i]))
            .collect();
        let full = (1usize << n) - 1;
        let exec = s.exec();

        // prods[e * 2^n + m] = ∏_{i ∈ m} δ_i[e]
        let prods: Vec<Vec<R>> = par::map_elems(exec, len, |e| {
            let mut table = vec![R::ONE; full + 1];
            for m in 1..=full {
                let low = m.trailing_zeros() as usize;
                table[m] = table[m & (m - 1)] * deltas[low][e];
            }
            table
        });

        let entries = &self.entries;
        let parts: Vec<ShareVector<R>> = par::map_range(exec, s.n_parties(), |p| {
            let data = (0..len)
                .map(|e| {
                    let table = &prods[e];
                    let mut acc = if p == 0 { table[full] } else { R::ZERO };
                    for (t, entry) in entries.iter().enumerate().skip(1) {
                        acc += table[full ^ t] * entry.part(p).data[e];
                    }
                    acc
                })
                .collect();
            ShareVector::new(crate::sharing::PartyId(p), data, self.scale)
        });
        Ok(Shared::from_parts_unchecked(parts))
    }
}

fn run_products<R: Ring>(s: &mut Session<R>, groups: &[Vec<&Shared<R>>]) -> Result<Vec<Shared<R>>> {
    lockstep(
        s,
        groups,
        |s, g| begin_product(s, g, default_out_frac(g)),
        |s, p| p.finish(s),
    )
}

/// Binary Beaver product: one round.
pub fn mul<R: Ring>(s: &mut Session<R>, x: &Shared<R>, y: &Shared<R>) -> Result<Shared<R>> {
    Ok(run_products(s, &[vec![x, y]])?.remove(0))
}

/// Binary product with a caller-supplied triple (single use).
pub fn mul_with<R: Ring>(
    s: &mut Session<R>,
    x: &Shared<R>,
    y: &Shared<R>,
    triple: &BeaverTriple<R>,
) -> Result<Shared<R>> {
    let xs = [x, y];
    let p = begin_product_with(s, &xs, &triple.as_aux(), default_out_frac(&xs))?;
    s.flush()?;
    p.finish(s)
}

/// Elementwise products of many independent pairs.
pub fn mul_batch<R: Ring>(
    s: &mut Session<R>,
    pairs: &[(&Shared<R>, &Shared<R>)],
) -> Result<Vec<Shared<R>>> {
    let groups: Vec<Vec<&Shared<R>>> = pairs.iter().map(|(x, y)| vec![*x, *y]).collect();
    run_products(s, &groups)
}

/// n-ary elementwise product with the session's [`Method`].
pub fn mul_multi<R: Ring>(s: &mut Session<R>, xs: &[&Shared<R>]) -> Result<Shared<R>> {
    Ok(mul_multi_batch(s, &[xs.to_vec()])?.remove(0))
}

/// One-round n-ary product with a caller-supplied auxiliary set.
pub fn mul_multi_with<R: Ring>(
    s: &mut Session<R>,
    xs: &[&Shared<R>],
    aux: &AuxSet<R>,
) -> Result<Shared<R>> {
    let p = begin_product_with(s, xs, aux, default_out_frac(xs))?;
    s.flush()?;
    p.finish(s)
}

/// Many independent n-ary products. Multivariate: one round in total
/// (with coalescing). Naive: binary chains advanced in lockstep, n − 1
/// rounds for the longest group.
pub fn mul_multi_batch<R: Ring>(
    s: &mut Session<R>,
    groups: &[Vec<&Shared<R>>],
) -> Result<Vec<Shared<R>>> {
    let max_arity = s.config().max_arity;
    for g in groups {
        if g.len() < 2 || g.len() > max_arity {
            return Err(Error::Config(format!(
                "arity {} outside 2..={max_arity}",
                g.len()
            )));
        }
    }
    match s.config().method {
        Method::Multivariate => run_products(s, groups),
        Method::Naive => mul_chain_batch(s, groups),
    }
}

/// Chained binary products: `((x1·x2)·x3)·…`, one round per link.
pub fn mul_chain_batch<R: Ring>(
    s: &mut Session<R>,
    groups: &[Vec<&Shared<R>>],
) -> Result<Vec<Shared<R>>> {
    let mut acc: Vec<Shared<R>> = groups
        .iter()
        .map(|g| {
            g.first()
                .map(|x| (*x).clone())
                .ok_or_else(|| Error::Config("product of no inputs".into()))
        })
        .collect::<Result<_>>()?;
    let longest = groups.iter().map(Vec::len).max().unwrap_or(0);
    for step in 1..longest {
        let active: Vec<usize> = (0..groups.len())
            .filter(|g| groups[*g].len() > step)
            .collect();
        let pairs: Vec<Vec<&Shared<R>>> = active
            .iter()
            .map(|g| vec![&acc[*g], groups[*g][step]])
            .collect();
        let out = run_products(s, &pairs)?;
        for (g, v) in active.into_iter().zip(out) {
            acc[g] = v;
        }
    }
    Ok(acc)
}

/// A rescale waiting for its masked input to be opened.
pub struct PendingRescale<R: Ring> {
    ticket: RevealTicket,
    shift: u32,
    narrow: Shared<R>,
    frac: u32,
}

impl<R: Ring> PendingRescale<R> {
    /// `[p = 0]·round(δ / 2^s) + a_p` at the input's fractional precision.
    pub fn finish(self, s: &mut Session<R>) -> Result<Shared<R>> {
        let opened = s.redeem(self.ticket)?;
        let delta = rescale_opened(&opened, self.shift);
        let scale = Scale::fixed(self.frac);
        let parts = self
            .narrow
            .parts()
            .iter()
            .map(|a| {
                let data = if a.owner.0 == 0 {
                    a.data.iter().zip(&delta).map(|(u, v)| *u + *v).collect()
                } else {
                    a.data.clone()
                };
                ShareVector::new(a.owner, data, scale)
            })
            .collect();
        Ok(Shared::from_parts_unchecked(parts))
    }
}

/// Queues the reveal of `X − A` for a value carrying deferred bits.
pub fn begin_rescale<R: Ring>(s: &mut Session<R>, x: &Shared<R>) -> Result<PendingRescale<R>> {
    let shift = x.scale().deferred_bits;
    if shift == 0 {
        return Err(Error::Config(
            "rescale of a value without deferred bits".into(),
        ));
    }
    let pair = s.trunc_pair(x.len(), shift)?;
    s.consume(pair.id)?;
    let ticket = s.defer_reveal(&raw_sub(x, &pair.wide))?;
    Ok(PendingRescale {
        ticket,
        shift,
        narrow: pair.narrow,
        frac: x.frac_bits(),
    })
}

/// Drops deferred bits from the shares with a truncation pair, one round
/// for the whole batch. Values without deferred bits pass through.
pub fn rescale_batch<R: Ring>(s: &mut Session<R>, xs: &[&Shared<R>]) -> Result<Vec<Shared<R>>> {
    let todo: Vec<usize> = (0..xs.len())
        .filter(|i| xs[*i].scale().deferred_bits > 0)
        .collect();
    let mut out: Vec<Shared<R>> = xs.iter().map(|x| (*x).clone()).collect();
    let done = lockstep(
        s,
        &todo,
        |s, i| begin_rescale(s, xs[*i]),
        |s, p| p.finish(s),
    )?;
    for (i, v) in todo.into_iter().zip(done) {
        out[i] = v;
    }
    Ok(out)
}

pub fn rescale<R: Ring>(s: &mut Session<R>, x: &Shared<R>) -> Result<Shared<R>> {
    Ok(rescale_batch(s, &[x])?.remove(0))
}

/// Removes `factors` scale factors of `2^precision_bits` from `x`. Purely a
/// relabelling: the division happens exactly in the next reveal that
/// consumes the value, so it costs no round and no local share division.
pub fn truncate_shared<R: Ring>(
    x: &Shared<R>,
    factors: u32,
    precision_bits: u32,
) -> Result<Shared<R>> {
    let exponent = x.scale().exponent(precision_bits);
    if factors == 0 || exponent < factors + 1 {
        return Err(Error::Config(format!(
            "cannot remove {factors} scale factors from a value carrying {exponent}"
        )));
    }
    Ok(x.with_frac_bits(x.frac_bits() - factors * precision_bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::SessionConfig;
    use crate::ring::{Z128, Z64};
    use crate::sharing::PartyId;
    use rand::{Rng as _, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn session<R: Ring>(method: Method) -> Session<R> {
        Session::new(SessionConfig {
            method,
            ..Default::default()
        })
        .unwrap()
    }

    fn input(s: &mut Session<Z128>, v: &[f64]) -> Shared<Z128> {
        s.input(PartyId(0), v).unwrap()
    }

    #[test]
    fn binary_fixed_point_product() {
        let mut s = session::<Z128>(Method::Multivariate);
        let x = input(&mut s, &[2.0]);
        let y = input(&mut s, &[3.0]);
        let z = mul(&mut s, &x, &y).unwrap();
        assert_eq!(s.stats().online_rounds, 1);
        let got = s.open(&z).unwrap()[0];
        assert!((got - 6.0).abs() <= 2f64.powi(-14), "{got}");
    }

    #[test]
    fn product_with_zero() {
        let mut s = session::<Z128>(Method::Multivariate);
        let x = input(&mut s, &[1.75, -3.5]);
        let zero = input(&mut s, &[0.0, 0.0]);
        let z = mul(&mut s, &x, &zero).unwrap();
        for v in s.open(&z).unwrap() {
            assert!(v.abs() <= 2f64.powi(-16));
        }
    }

    #[test]
    fn four_ary_fixed_point() {
        let mut s = session::<Z128>(Method::Multivariate);
        let xs: Vec<Shared<Z128>> = [1.5, 2.0, -1.0, 0.5]
            .iter()
            .map(|v| input(&mut s, &[*v]))
            .collect();
        let refs: Vec<&Shared<Z128>> = xs.iter().collect();
        let z = mul_multi(&mut s, &refs).unwrap();
        assert_eq!(s.stats().online_rounds, 1);
        assert!((s.open(&z).unwrap()[0] + 1.5).abs() <= 1e-3);
    }

    #[test]
    fn naive_chain_takes_n_minus_one_rounds() {
        for n in 2..=4usize {
            let mut s = session::<Z128>(Method::Naive);
            let xs: Vec<Shared<Z128>> = (0..n).map(|_| input(&mut s, &[1.25])).collect();
            let refs: Vec<&Shared<Z128>> = xs.iter().collect();
            let z = mul_multi(&mut s, &refs).unwrap();
            assert_eq!(s.stats().online_rounds, n as u64 - 1);
            assert_eq!(s.dealer().record().triples, n as u64 - 1);
            let got = s.open(&z).unwrap()[0];
            assert!((got - 1.25f64.powi(n as i32)).abs() < 1e-3);
        }
    }

    #[test]
    fn product_identity_is_exact_on_integers() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for n in 2..=4usize {
            let mut s = session::<Z64>(Method::Multivariate);
            let vals: Vec<Vec<Z64>> = (0..n)
                .map(|_| (0..64).map(|_| Z64(rng.gen())).collect())
                .collect();
            let xs: Vec<Shared<Z64>> = vals
                .iter()
                .map(|v| s.share_input_raw(PartyId(1), v, Scale::INTEGER).unwrap())
                .collect();
            let refs: Vec<&Shared<Z64>> = xs.iter().collect();
            let z = mul_multi(&mut s, &refs).unwrap().reconstruct_raw();
            for e in 0..64 {
                let want = vals.iter().fold(Z64(1), |acc, v| acc * v[e]);
                assert_eq!(z[e], want);
            }
        }
    }

    #[test]
    fn arity_two_matches_beaver_formula() {
        // ε·δ + ε·b + a·δ + ab with ε = x − a, δ = y − b, written out directly.
        let mut s = session::<Z64>(Method::Multivariate);
        let triple = s.triple(1, [0, 0]).unwrap();
        let x = s
            .share_input_raw(PartyId(0), &[Z64(1234)], Scale::INTEGER)
            .unwrap();
        let y = s
            .share_input_raw(PartyId(2), &[Z64(u64::MAX - 7)], Scale::INTEGER)
            .unwrap();
        let (a, b, c) = (
            triple.a.reconstruct_raw()[0],
            triple.b.reconstruct_raw()[0],
            triple.c.reconstruct_raw()[0],
        );
        let eps = Z64(1234) - a;
        let del = Z64(u64::MAX - 7) - b;
        let formula = eps * del + eps * b + a * del + c;
        let z = mul_with(&mut s, &x, &y, &triple).unwrap();
        assert_eq!(z.reconstruct_raw()[0], formula);
        assert_eq!(formula, Z64(1234) * Z64(u64::MAX - 7));
    }

    #[test]
    fn reused_material_is_rejected() {
        let mut s = session::<Z64>(Method::Multivariate);
        let triple = s.triple(1, [0, 0]).unwrap();
        let x = s
            .share_input_raw(PartyId(0), &[Z64(2)], Scale::INTEGER)
            .unwrap();
        mul_with(&mut s, &x, &x, &triple).unwrap();
        assert_eq!(
            mul_with(&mut s, &x, &x, &triple).unwrap_err(),
            Error::MaskReuse { id: triple.id }
        );
        let aux = s.aux_set(3, 1, vec![0; 3]).unwrap();
        mul_multi_with(&mut s, &[&x, &x, &x], &aux).unwrap();
        assert!(matches!(
            mul_multi_with(&mut s, &[&x, &x, &x], &aux),
            Err(Error::MaskReuse { .. })
        ));
    }

    #[test]
    fn arity_bounds() {
        let mut s = session::<Z64>(Method::Multivariate);
        let x = s
            .share_input_raw(PartyId(0), &[Z64(2)], Scale::INTEGER)
            .unwrap();
        assert!(matches!(mul_multi(&mut s, &[&x; 5]), Err(Error::Config(_))));
        assert!(matches!(mul_multi(&mut s, &[&x]), Err(Error::Config(_))));
    }

    #[test]
    fn batch_coalesces_only_when_enabled() {
        for (coalesce, rounds) in [(true, 1), (false, 4)] {
            let mut s: Session<Z128> = Session::new(SessionConfig {
                coalesce,
                ..Default::default()
            })
            .unwrap();
            let xs: Vec<Shared<Z128>> = (0..4).map(|i| input(&mut s, &[i as f64])).collect();
            let pairs: Vec<(&Shared<Z128>, &Shared<Z128>)> = xs.iter().map(|x| (x, x)).collect();
            let out = mul_batch(&mut s, &pairs).unwrap();
            assert_eq!(s.stats().online_rounds, rounds);
            for (i, z) in out.iter().enumerate() {
                assert!((z.reconstruct_f64()[0] - (i * i) as f64).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn deferred_bits_feed_the_next_product() {
        let mut s = session::<Z128>(Method::Multivariate);
        let x = input(&mut s, &[1.5]);
        let x2 = mul(&mut s, &x, &x).unwrap();
        assert_eq!(x2.scale().deferred_bits, 16);
        let x3 = mul(&mut s, &x2, &x).unwrap();
        assert_eq!(x3.scale().deferred_bits, 16);
        assert!((s.open(&x3).unwrap()[0] - 3.375).abs() < 1e-3);
        assert_eq!(s.dealer().record().trunc_elements, 1);
    }

    #[test]
    fn truncate_shared_relabels() {
        let mut s = session::<Z128>(Method::Multivariate);
        let x = s.share_input(PartyId(0), &[6.0], 32).unwrap();
        let t = truncate_shared(&x, 1, 16).unwrap();
        assert_eq!(t.frac_bits(), 16);
        assert_eq!(t.reconstruct_raw(), x.reconstruct_raw());
        assert!((s.open(&t).unwrap()[0] - 6.0).abs() <= 3.0 * 2f64.powi(-16));
        assert!(truncate_shared(&x, 0, 16).is_err());
        assert!(truncate_shared(&x, 2, 16).is_err());
    }

    #[test]
    fn rescale_drops_deferred_bits_in_one_round() {
        let mut s: Session<Z128> = Session::new(SessionConfig::default()).unwrap();
        let x = s.input(PartyId(0), &[1.5, -2.25, 0.0]).unwrap();
        let y = s.input(PartyId(1), &[3.0]).unwrap();
        let wide = mul(&mut s, &x, &x)
            .unwrap()
            .mul_const(1.0 / 3.0, 32)
            .unwrap();
        assert_eq!(wide.scale().deferred_bits, 48);
        let before = s.stats();
        let out = rescale_batch(&mut s, &[&wide, &y]).unwrap();
        let after = s.stats();
        assert_eq!(after.online_rounds - before.online_rounds, 1);
        assert_eq!(after.offline_bytes - before.offline_bytes, 2 * 3 * 16);
        assert_eq!(out[0].scale(), Scale::fixed(16));
        assert_eq!(out[1], y);
        assert!(rescale(&mut s, &y).is_ok());
        assert_eq!(s.stats().online_rounds, after.online_rounds);
        for (g, w) in s.open(&out[0]).unwrap().iter().zip([0.75, 1.6875, 0.0]) {
            assert!((g - w).abs() <= 2f64.powi(-15), "{g} vs {w}");
        }
    }
}
