//! Additive `(n, 0)` secret sharing over a [`Ring`].
//!
//! A secret vector `x` is held as `n` share vectors with `Σ_p x_p = x (mod Q)`.
//! Everything in this module is local: no party ever sees another's share.
//!
//! Fixed-point bookkeeping lives in [`Scale`]: `frac_bits` is the precision
//! the value is logically encoded at, `deferred_bits` are extra low-order bits
//! still physically present after a product. Deferred bits are dropped at the
//! next reveal that touches the value (see `protocols`), so rescaling never
//! costs a round.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::ring::{encode_bits, Ring};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartyId(pub usize);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Scale {
    pub frac_bits: u32,
    pub deferred_bits: u32,
}

impl Scale {
    pub const INTEGER: Scale = Scale {
        frac_bits: 0,
        deferred_bits: 0,
    };

    pub fn fixed(frac_bits: u32) -> Self {
        Scale {
            frac_bits,
            deferred_bits: 0,
        }
    }

    /// Fractional bits physically present in the shares.
    pub fn physical(&self) -> u32 {
        self.frac_bits + self.deferred_bits
    }

    /// Number of `2^L` factors embedded (the logical scale exponent).
    pub fn exponent(&self, precision_bits: u32) -> u32 {
        self.frac_bits / precision_bits
    }
}

/// One party's additive share of a secret vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShareVector<R> {
    pub owner: PartyId,
    pub data: Vec<R>,
    pub scale: Scale,
}

impl<R: Ring> ShareVector<R> {
    pub fn new(owner: PartyId, data: Vec<R>, scale: Scale) -> Self {
        ShareVector { owner, data, scale }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Shifts the physical representation up so it carries `physical` bits.
    fn aligned_to(&self, physical: u32) -> ShareVector<R> {
        let up = physical - self.scale.physical();
        if up == 0 {
            return self.clone();
        }
        ShareVector {
            owner: self.owner,
            data: self.data.iter().map(|v| v.shl(up)).collect(),
            scale: Scale {
                frac_bits: self.scale.frac_bits,
                deferred_bits: self.scale.deferred_bits + up,
            },
        }
    }
}

fn check_pair<R: Ring>(a: &ShareVector<R>, b: &ShareVector<R>) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "share lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.scale.frac_bits != b.scale.frac_bits {
        return Err(Error::ScaleMismatch {
            left: a.scale.frac_bits,
            right: b.scale.frac_bits,
        });
    }
    if a.owner != b.owner {
        return Err(Error::Shape(format!(
            "shares held by {:?} and {:?}",
            a.owner, b.owner
        )));
    }
    Ok(())
}

/// Local addition of two shares of the same party.
pub fn add_shared<R: Ring>(a: &ShareVector<R>, b: &ShareVector<R>) -> Result<ShareVector<R>> {
    check_pair(a, b)?;
    let phys = a.scale.physical().max(b.scale.physical());
    let (a, b) = (a.aligned_to(phys), b.aligned_to(phys));
    Ok(ShareVector {
        owner: a.owner,
        data: a.data.iter().zip(&b.data).map(|(x, y)| *x + *y).collect(),
        scale: a.scale,
    })
}

pub fn sub_shared<R: Ring>(a: &ShareVector<R>, b: &ShareVector<R>) -> Result<ShareVector<R>> {
    check_pair(a, b)?;
    let phys = a.scale.physical().max(b.scale.physical());
    let (a, b) = (a.aligned_to(phys), b.aligned_to(phys));
    Ok(ShareVector {
        owner: a.owner,
        data: a.data.iter().zip(&b.data).map(|(x, y)| *x - *y).collect(),
        scale: a.scale,
    })
}

/// Adds public values (encoded at the share's logical scale). Only party 0
/// changes its share.
pub fn add_public<R: Ring>(a: &ShareVector<R>, c: &[R]) -> Result<ShareVector<R>> {
    if c.len() != a.len() && c.len() != 1 {
        return Err(Error::Shape(format!(
            "public operand of length {} for share of length {}",
            c.len(),
            a.len()
        )));
    }
    let mut out = a.clone();
    if a.owner.0 == 0 {
        let up = a.scale.deferred_bits;
        for (i, v) in out.data.iter_mut().enumerate() {
            let ci = if c.len() == 1 { c[0] } else { c[i] };
            *v += ci.shl(up);
        }
    }
    Ok(out)
}

/// Multiplies every share by a public integer factor; scale is unchanged.
pub fn mul_public<R: Ring>(a: &ShareVector<R>, c: R) -> ShareVector<R> {
    ShareVector {
        owner: a.owner,
        data: a.data.iter().map(|v| *v * c).collect(),
        scale: a.scale,
    }
}

/// Splits `secret` into `n` uniformly random additive shares.
pub fn share<R: Ring, G: RngCore + ?Sized>(
    secret: &[R],
    n: usize,
    scale: Scale,
    rng: &mut G,
) -> Result<Vec<ShareVector<R>>> {
    if n < 2 {
        return Err(Error::Config(format!(
            "sharing needs at least 2 parties, got {n}"
        )));
    }
    let mut shares: Vec<ShareVector<R>> = (0..n - 1)
        .map(|p| {
            let data = (0..secret.len()).map(|_| R::random(rng)).collect();
            ShareVector::new(PartyId(p), data, scale)
        })
        .collect();
    let last = secret
        .iter()
        .enumerate()
        .map(|(i, s)| *s - shares.iter().map(|sh| sh.data[i]).sum::<R>())
        .collect();
    shares.push(ShareVector::new(PartyId(n - 1), last, scale));
    Ok(shares)
}

/// Element-wise modular sum of all parties' shares (physical scale).
pub fn reconstruct<R: Ring>(shares: &[ShareVector<R>]) -> Result<Vec<R>> {
    let first = shares
        .first()
        .ok_or_else(|| Error::Shape("nothing to reconstruct".into()))?;
    for s in shares {
        if s.len() != first.len() {
            return Err(Error::Shape(format!(
                "party {} holds {} elements, party {} holds {}",
                first.owner.0,
                first.len(),
                s.owner.0,
                s.len()
            )));
        }
        if s.scale != first.scale {
            return Err(Error::ScaleMismatch {
                left: first.scale.physical(),
                right: s.scale.physical(),
            });
        }
    }
    Ok((0..first.len())
        .map(|i| shares.iter().map(|s| s.data[i]).sum())
        .collect())
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic ChaCha stream for `(master, tag...)`.
pub fn derive_rng(master: u64, tag: &[u64]) -> ChaCha20Rng {
    let mut state = splitmix(master);
    for t in tag {
        state = splitmix(state ^ splitmix(*t));
    }
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_mut(8) {
        state = splitmix(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha20Rng::from_seed(seed)
}

const PRZS_TAG: u64 = 0x7072_7a73;

/// Pairwise-seeded pseudorandom zero-sharing for one party.
///
/// Party `p` holds the streams for every ordered pair `(p, q)` and `(q, p)`;
/// its output is `Σ_{q≠p} PRG(p,q) − PRG(q,p)`, so the outputs of all parties
/// cancel exactly.
pub struct ZeroShareGenerator {
    party: PartyId,
    outgoing: Vec<(usize, ChaCha20Rng)>,
    incoming: Vec<(usize, ChaCha20Rng)>,
}

impl ZeroShareGenerator {
    pub fn new(master_seed: u64, party: PartyId, n_parties: usize) -> Self {
        let p = party.0;
        let others = (0..n_parties).filter(|q| *q != p);
        ZeroShareGenerator {
            party,
            outgoing: others
                .clone()
                .map(|q| (q, derive_rng(master_seed, &[PRZS_TAG, p as u64, q as u64])))
                .collect(),
            incoming: others
                .map(|q| (q, derive_rng(master_seed, &[PRZS_TAG, q as u64, p as u64])))
                .collect(),
        }
    }

    pub fn party(&self) -> PartyId {
        self.party
    }

    pub fn next<R: Ring>(&mut self, len: usize, scale: Scale) -> ShareVector<R> {
        let mut data = vec![R::ZERO; len];
        for (_, rng) in &mut self.outgoing {
            for v in data.iter_mut() {
                *v += R::random(rng);
            }
        }
        for (_, rng) in &mut self.incoming {
            for v in data.iter_mut() {
                *v -= R::random(rng);
            }
        }
        ShareVector::new(self.party, data, scale)
    }
}

pub fn przs_next<R: Ring>(gen: &mut ZeroShareGenerator, len: usize) -> ShareVector<R> {
    gen.next(len, Scale::INTEGER)
}

/// Fewest fractional bits (up to `max_bits`) that represent `c` exactly.
pub fn dyadic_bits(c: f64, max_bits: u32) -> u32 {
    (0..max_bits)
        .find(|b| (c * 2f64.powi(*b as i32)).fract() == 0.0)
        .unwrap_or(max_bits)
}

/// All parties' shares of one secret vector, as held across the session.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shared<R> {
    parts: Vec<ShareVector<R>>,
}

impl<R: Ring> Shared<R> {
    pub fn from_parts(parts: Vec<ShareVector<R>>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Shape("no parties".into()))?;
        for (p, s) in parts.iter().enumerate() {
            if s.owner != PartyId(p) {
                return Err(Error::Shape(format!("share {p} owned by {:?}", s.owner)));
            }
            if s.len() != first.len() || s.scale != first.scale {
                return Err(Error::Shape(format!(
                    "party {p} share disagrees with party 0 on length or scale"
                )));
            }
        }
        Ok(Shared { parts })
    }

    pub(crate) fn from_parts_unchecked(parts: Vec<ShareVector<R>>) -> Self {
        Shared { parts }
    }

    /// Sharing of a public vector: party 0 holds the values, others zero.
    pub fn public(n_parties: usize, values: &[R], scale: Scale) -> Self {
        let parts = (0..n_parties)
            .map(|p| {
                let data = if p == 0 {
                    values.to_vec()
                } else {
                    vec![R::ZERO; values.len()]
                };
                ShareVector::new(PartyId(p), data, scale)
            })
            .collect();
        Shared { parts }
    }

    pub fn public_f64(n_parties: usize, values: &[f64], frac_bits: u32) -> Result<Self> {
        let enc = values
            .iter()
            .map(|v| encode_bits::<R>(*v, frac_bits))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::public(n_parties, &enc, Scale::fixed(frac_bits)))
    }

    pub fn parts(&self) -> &[ShareVector<R>] {
        &self.parts
    }

    pub fn part(&self, p: usize) -> &ShareVector<R> {
        &self.parts[p]
    }

    pub fn into_parts(self) -> Vec<ShareVector<R>> {
        self.parts
    }

    pub fn n_parties(&self) -> usize {
        self.parts.len()
    }

    pub fn len(&self) -> usize {
        self.parts[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn scale(&self) -> Scale {
        self.parts[0].scale
    }

    pub fn frac_bits(&self) -> u32 {
        self.scale().frac_bits
    }

    fn map_parts(&self, f: impl Fn(&ShareVector<R>) -> ShareVector<R>) -> Self {
        Shared {
            parts: self.parts.iter().map(f).collect(),
        }
    }

    fn zip_parts(
        &self,
        other: &Self,
        f: impl Fn(&ShareVector<R>, &ShareVector<R>) -> Result<ShareVector<R>>,
    ) -> Result<Self> {
        if self.n_parties() != other.n_parties() {
            return Err(Error::Shape(format!(
                "{} vs {} parties",
                self.n_parties(),
                other.n_parties()
            )));
        }
        let parts = self
            .parts
            .iter()
            .zip(&other.parts)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Shared { parts })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_parts(other, add_shared)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_parts(other, sub_shared)
    }

    pub fn neg(&self) -> Self {
        self.map_parts(|s| mul_public(s, -R::ONE))
    }

    pub fn mul_int(&self, k: i64) -> Self {
        self.map_parts(|s| mul_public(s, R::from_i128(k as i128)))
    }

    /// Adds public ring values encoded at this sharing's logical scale.
    pub fn add_public(&self, c: &[R]) -> Result<Self> {
        let parts = self
            .parts
            .iter()
            .map(|s| add_public(s, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Shared { parts })
    }

    /// Adds a public real constant to every element.
    pub fn add_const(&self, c: f64) -> Result<Self> {
        let enc = encode_bits::<R>(c, self.frac_bits())?;
        self.add_public(&[enc])
    }

    /// Multiplies by a public real constant encoded with at most
    /// `const_bits` fractional bits (fewer when the constant is dyadic, so
    /// integers cost none). The extra bits become deferred; no communication.
    pub fn mul_const(&self, c: f64, const_bits: u32) -> Result<Self> {
        let bits = dyadic_bits(c, const_bits);
        let enc = encode_bits::<R>(c, bits)?;
        Ok(self.mul_const_ring(enc, bits))
    }

    /// Element-wise multiplication by public reals, all at `const_bits`.
    pub fn mul_const_vec(&self, c: &[f64], const_bits: u32) -> Result<Self> {
        if c.len() != self.len() {
            return Err(Error::Shape(format!(
                "{} constants for {} elements",
                c.len(),
                self.len()
            )));
        }
        let bits = c
            .iter()
            .map(|v| dyadic_bits(*v, const_bits))
            .max()
            .unwrap_or(0);
        let enc = c
            .iter()
            .map(|v| encode_bits::<R>(*v, bits))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.map_parts(|s| ShareVector {
            owner: s.owner,
            data: s.data.iter().zip(&enc).map(|(v, e)| *v * *e).collect(),
            scale: Scale {
                frac_bits: s.scale.frac_bits,
                deferred_bits: s.scale.deferred_bits + bits,
            },
        }))
    }

    pub(crate) fn mul_const_ring(&self, enc: R, const_bits: u32) -> Self {
        self.map_parts(|s| ShareVector {
            owner: s.owner,
            data: s.data.iter().map(|v| *v * enc).collect(),
            scale: Scale {
                frac_bits: s.scale.frac_bits,
                deferred_bits: s.scale.deferred_bits + const_bits,
            },
        })
    }

    /// Changes the logical precision. Raising it is an exact local shift;
    /// lowering it defers the extra bits to the next reveal.
    pub fn with_frac_bits(&self, frac_bits: u32) -> Self {
        let cur = self.scale();
        if frac_bits == cur.frac_bits {
            return self.clone();
        }
        if frac_bits > cur.frac_bits {
            let up = frac_bits - cur.frac_bits;
            // Deferred bits can absorb the raise without touching the shares.
            let absorbed = up.min(cur.deferred_bits);
            let shift = up - absorbed;
            self.map_parts(|s| ShareVector {
                owner: s.owner,
                data: s.data.iter().map(|v| v.shl(shift)).collect(),
                scale: Scale {
                    frac_bits,
                    deferred_bits: cur.deferred_bits - absorbed,
                },
            })
        } else {
            let down = cur.frac_bits - frac_bits;
            self.map_parts(|s| ShareVector {
                owner: s.owner,
                data: s.data.clone(),
                scale: Scale {
                    frac_bits,
                    deferred_bits: cur.deferred_bits + down,
                },
            })
        }
    }

    pub fn concat(items: &[&Shared<R>]) -> Result<Self> {
        let first = items
            .first()
            .ok_or_else(|| Error::Shape("concat of nothing".into()))?;
        let phys = items
            .iter()
            .map(|s| s.scale().physical())
            .max()
            .unwrap_or(0);
        let n = first.n_parties();
        let mut parts: Vec<ShareVector<R>> = (0..n)
            .map(|p| ShareVector::new(PartyId(p), Vec::new(), Scale::default()))
            .collect();
        for s in items {
            if s.n_parties() != n {
                return Err(Error::Shape("concat across party counts".into()));
            }
            if s.frac_bits() != first.frac_bits() {
                return Err(Error::ScaleMismatch {
                    left: first.frac_bits(),
                    right: s.frac_bits(),
                });
            }
            for (p, part) in s.parts.iter().enumerate() {
                let aligned = part.aligned_to(phys);
                parts[p].data.extend_from_slice(&aligned.data);
                parts[p].scale = aligned.scale;
            }
        }
        Ok(Shared { parts })
    }

    pub fn slice(&self, start: usize, end: usize) -> Self {
        self.map_parts(|s| ShareVector {
            owner: s.owner,
            data: s.data[start..end].to_vec(),
            scale: s.scale,
        })
    }

    /// Local sum of all elements into a length-1 sharing.
    pub fn sum_elements(&self) -> Self {
        self.map_parts(|s| ShareVector {
            owner: s.owner,
            data: vec![s.data.iter().copied().sum()],
            scale: s.scale,
        })
    }

    /// Repeats a length-1 sharing `len` times.
    pub fn broadcast(&self, len: usize) -> Result<Self> {
        if self.len() != 1 {
            return Err(Error::Shape(format!(
                "broadcast needs a scalar sharing, got length {}",
                self.len()
            )));
        }
        Ok(self.map_parts(|s| ShareVector {
            owner: s.owner,
            data: vec![s.data[0]; len],
            scale: s.scale,
        }))
    }

    /// Omniscient reconstruction at the physical scale (test and oracle use;
    /// protocols open values through the engine).
    pub fn reconstruct_raw(&self) -> Vec<R> {
        reconstruct(&self.parts).expect("Shared invariant: parts agree")
    }

    /// Omniscient reconstruction decoded to reals.
    pub fn reconstruct_f64(&self) -> Vec<f64> {
        let phys = self.scale().physical();
        self.reconstruct_raw()
            .into_iter()
            .map(|v| v.to_i128() as f64 / 2f64.powi(phys as i32))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{FixedPointCodec, Z64};
    use rand::Rng;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    fn chi_square_critical(df: f64, alpha: f64) -> f64 {
        ChiSquared::new(df).unwrap().inverse_cdf(1.0 - alpha)
    }

    #[test]
    fn share_roundtrip_small() {
        let shares = share(&[Z64(5)], 3, Scale::INTEGER, &mut rng(1)).unwrap();
        assert_eq!(shares.len(), 3);
        assert_eq!(reconstruct(&shares).unwrap(), vec![Z64(5)]);
    }

    #[test]
    fn zero_secret_two_parties_are_negatives() {
        let shares = share(&[Z64(0)], 2, Scale::INTEGER, &mut rng(2)).unwrap();
        assert_eq!(shares[0].data[0], -shares[1].data[0]);
    }

    #[test]
    fn share_needs_two_parties() {
        assert!(matches!(
            share(&[Z64(1)], 1, Scale::INTEGER, &mut rng(3)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn reconstruct_exact_for_many_party_counts() {
        let mut r = rng(4);
        for n in [2usize, 3, 5, 8] {
            let secret: Vec<Z64> = (0..10_000).map(|_| Z64(r.gen())).collect();
            let shares = share(&secret, n, Scale::INTEGER, &mut r).unwrap();
            assert_eq!(reconstruct(&shares).unwrap(), secret);
        }
    }

    #[test]
    fn reconstruct_all_zero_and_codec() {
        let zeros: Vec<ShareVector<Z64>> = (0..3)
            .map(|p| ShareVector::new(PartyId(p), vec![Z64(0); 4], Scale::INTEGER))
            .collect();
        assert_eq!(reconstruct(&zeros).unwrap(), vec![Z64(0); 4]);

        let c = FixedPointCodec::default();
        let s = share(
            &[c.encode::<Z64>(2.5).unwrap()],
            3,
            Scale::fixed(16),
            &mut rng(5),
        )
        .unwrap();
        assert_eq!(c.decode(reconstruct(&s).unwrap()[0]), 2.5);
    }

    #[test]
    fn reconstruct_rejects_mismatched_lengths() {
        let a = ShareVector::new(PartyId(0), vec![Z64(1), Z64(2)], Scale::INTEGER);
        let b = ShareVector::new(PartyId(1), vec![Z64(1)], Scale::INTEGER);
        assert!(matches!(reconstruct(&[a, b]), Err(Error::Shape(_))));
    }

    #[test]
    fn przs_sums_to_zero() {
        for n in [2usize, 3, 5, 8] {
            let mut gens: Vec<_> = (0..n)
                .map(|p| ZeroShareGenerator::new(99, PartyId(p), n))
                .collect();
            for _ in 0..5 {
                let outs: Vec<ShareVector<Z64>> =
                    gens.iter_mut().map(|g| przs_next(g, 4)).collect();
                assert_eq!(reconstruct(&outs).unwrap(), vec![Z64(0); 4]);
            }
        }
    }

    #[test]
    fn przs_is_deterministic_and_negated_for_two_parties() {
        let mut a = ZeroShareGenerator::new(7, PartyId(0), 2);
        let mut b = ZeroShareGenerator::new(7, PartyId(0), 2);
        let mut other = ZeroShareGenerator::new(7, PartyId(1), 2);
        let x: ShareVector<Z64> = przs_next(&mut a, 8);
        let y: ShareVector<Z64> = przs_next(&mut b, 8);
        assert_eq!(x.data, y.data);
        let z: ShareVector<Z64> = przs_next(&mut other, 8);
        for (u, v) in x.data.iter().zip(&z.data) {
            assert_eq!(*u, -*v);
        }
        // Advancing again stays in lockstep.
        let x2: ShareVector<Z64> = przs_next(&mut a, 3);
        let y2: ShareVector<Z64> = przs_next(&mut b, 3);
        assert_eq!(x2.data, y2.data);
        assert_ne!(x2.data[..], x.data[..3]);
    }

    fn shared_of(values: &[Z64], scale: Scale, seed: u64) -> Shared<Z64> {
        Shared::from_parts(share(values, 3, scale, &mut rng(seed)).unwrap()).unwrap()
    }

    #[test]
    fn homomorphic_local_ops() {
        let a = shared_of(&[Z64(3)], Scale::INTEGER, 10);
        let b = shared_of(&[Z64(4)], Scale::INTEGER, 11);
        assert_eq!(a.add(&b).unwrap().reconstruct_raw(), vec![Z64(7)]);

        let c = FixedPointCodec::default();
        let one = shared_of(&[c.encode(1.0).unwrap()], Scale::fixed(16), 12);
        let three = one.add_public(&[c.encode(2.0).unwrap()]).unwrap();
        assert_eq!(three.reconstruct_raw(), vec![c.encode::<Z64>(3.0).unwrap()]);
        // Only party 0's share moved.
        assert_eq!(three.part(1), one.part(1));
        assert_eq!(three.part(2), one.part(2));

        let x = shared_of(&[c.encode(1.5).unwrap()], Scale::fixed(16), 13);
        assert_eq!(
            x.mul_int(2).reconstruct_raw(),
            vec![c.encode::<Z64>(3.0).unwrap()]
        );
    }

    #[test]
    fn add_rejects_scale_mismatch() {
        let a = shared_of(&[Z64(3)], Scale::fixed(16), 14);
        let b = shared_of(&[Z64(4)], Scale::fixed(8), 15);
        assert!(matches!(a.add(&b), Err(Error::ScaleMismatch { .. })));
    }

    #[test]
    fn deferred_bits_align_on_add() {
        let c = FixedPointCodec::default();
        let a = shared_of(&[c.encode(1.25).unwrap()], Scale::fixed(16), 16);
        // Needs all 16 constant bits; 0.5 alone would take one.
        let k = 0.5 + 2f64.powi(-16);
        assert_eq!(a.mul_const(0.5, 16).unwrap().scale().deferred_bits, 1);
        let b = a.mul_const(k, 16).unwrap();
        assert_eq!(b.scale().deferred_bits, 16);
        let want = 1.25 + 1.25 * k;
        let s = a.add(&b).unwrap();
        assert_eq!(
            s.scale(),
            Scale {
                frac_bits: 16,
                deferred_bits: 16
            }
        );
        assert_eq!(s.reconstruct_f64(), vec![want]);
        let lowered = s.with_frac_bits(8);
        assert_eq!(lowered.reconstruct_f64(), vec![want]);
        assert_eq!(lowered.scale().physical(), 32);
        let raised = lowered.with_frac_bits(20);
        assert_eq!(
            raised.scale(),
            Scale {
                frac_bits: 20,
                deferred_bits: 12
            }
        );
        assert_eq!(raised.reconstruct_f64(), vec![want]);
    }

    #[test]
    fn dyadic_constants_use_few_bits() {
        assert_eq!(dyadic_bits(3.0, 32), 0);
        assert_eq!(dyadic_bits(-0.75, 32), 2);
        assert_eq!(dyadic_bits(2f64.powi(-10), 32), 10);
        assert_eq!(dyadic_bits(1.0 / 3.0, 32), 32);
    }

    #[test]
    fn first_share_is_uniform_on_small_ring_projection() {
        // Chi-square over the low byte of share 0, 10^4 runs, 256 bins.
        let mut r = rng(17);
        let mut counts = [0u64; 256];
        for _ in 0..10_000 {
            let s = share(&[Z64(42)], 3, Scale::INTEGER, &mut r).unwrap();
            counts[(s[0].data[0].0 & 0xff) as usize] += 1;
        }
        let expected = 10_000.0 / 256.0;
        let stat: f64 = counts
            .iter()
            .map(|c| (*c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(stat < chi_square_critical(255.0, 0.01), "chi2 = {stat}");
    }
}
