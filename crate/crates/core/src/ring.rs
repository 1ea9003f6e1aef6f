//! Power-of-two residue rings and the fixed-point codec.
//!
//! Every share in the engine is a vector of ring elements. Arithmetic wraps
//! modulo `Q = 2^BITS`; the signed view of a residue is its two's-complement
//! interpretation, so `[0, Q/2)` is non-negative and `[Q/2, Q)` is negative.

use std::fmt;
use std::hash::Hash;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rand::RngCore;

use crate::error::{Error, Result};

/// A ring `Z/2^k Z` with native wraparound arithmetic.
pub trait Ring:
    Copy
    + Default
    + Eq
    + Ord
    + Hash
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Sum
{
    const BITS: u32;
    const BYTES: usize;
    const ZERO: Self;
    const ONE: Self;

    /// Reduces an unsigned integer modulo `Q`.
    fn from_u128(v: u128) -> Self;
    /// Embeds a signed integer as its residue modulo `Q`.
    fn from_i128(v: i128) -> Self;
    fn to_u128(self) -> u128;
    /// Signed (two's-complement) interpretation of the residue.
    fn to_i128(self) -> i128;
    fn random<G: RngCore + ?Sized>(rng: &mut G) -> Self;
    fn write_le(self, out: &mut Vec<u8>);
    /// Reads one element from exactly `BYTES` little-endian bytes.
    fn read_le(bytes: &[u8]) -> Self;

    /// Arithmetic right shift of the signed interpretation.
    fn shr_signed(self, bits: u32) -> Self {
        if bits == 0 {
            return self;
        }
        Self::from_i128(self.to_i128() >> bits.min(127))
    }

    /// Signed division by `2^bits`, rounding half up.
    fn shr_round(self, bits: u32) -> Self {
        if bits == 0 {
            return self;
        }
        let v = self.to_i128();
        // v + 2^(bits-1) may overflow i128 only for Z128 values near the top
        // of the range; those are outside every documented input domain.
        Self::from_i128(v.wrapping_add(1i128 << (bits - 1)) >> bits)
    }

    fn shl(self, bits: u32) -> Self {
        if bits >= Self::BITS {
            return Self::ZERO;
        }
        Self::from_u128(self.to_u128() << bits)
    }

    /// `2^bits` as a ring element (zero once it wraps).
    fn pow2(bits: u32) -> Self {
        Self::ONE.shl(bits)
    }

    fn from_u64(v: u64) -> Self {
        Self::from_u128(v as u128)
    }
}

macro_rules! ring_type {
    ($(#[$doc:meta])* $name:ident, $inner:ty, $signed:ty, $bits:expr) => {
        $(#[$doc])*
        #[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub $inner);

        impl Ring for $name {
            const BITS: u32 = $bits;
            const BYTES: usize = $bits / 8;
            const ZERO: Self = $name(0);
            const ONE: Self = $name(1);

            #[inline]
            fn from_u128(v: u128) -> Self {
                $name(v as $inner)
            }
            #[inline]
            fn from_i128(v: i128) -> Self {
                $name(v as $inner)
            }
            #[inline]
            fn to_u128(self) -> u128 {
                self.0 as u128
            }
            #[inline]
            fn to_i128(self) -> i128 {
                (self.0 as $signed) as i128
            }
            fn random<G: RngCore + ?Sized>(rng: &mut G) -> Self {
                let mut buf = [0u8; $bits / 8];
                rng.fill_bytes(&mut buf);
                $name(<$inner>::from_le_bytes(buf))
            }
            fn write_le(self, out: &mut Vec<u8>) {
                out.extend_from_slice(&self.0.to_le_bytes());
            }
            fn read_le(bytes: &[u8]) -> Self {
                let mut buf = [0u8; $bits / 8];
                buf.copy_from_slice(&bytes[..$bits / 8]);
                $name(<$inner>::from_le_bytes(buf))
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({})", stringify!($name), self.0)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }

        impl From<$inner> for $name {
            fn from(v: $inner) -> Self {
                $name(v)
            }
        }

        impl Add for $name {
            type Output = Self;
            #[inline]
            fn add(self, rhs: Self) -> Self {
                $name(self.0.wrapping_add(rhs.0))
            }
        }

        impl Sub for $name {
            type Output = Self;
            #[inline]
            fn sub(self, rhs: Self) -> Self {
                $name(self.0.wrapping_sub(rhs.0))
            }
        }

        impl Mul for $name {
            type Output = Self;
            #[inline]
            fn mul(self, rhs: Self) -> Self {
                $name(self.0.wrapping_mul(rhs.0))
            }
        }

        impl Neg for $name {
            type Output = Self;
            #[inline]
            fn neg(self) -> Self {
                $name(self.0.wrapping_neg())
            }
        }

        impl AddAssign for $name {
            #[inline]
            fn add_assign(&mut self, rhs: Self) {
                self.0 = self.0.wrapping_add(rhs.0);
            }
        }

        impl SubAssign for $name {
            #[inline]
            fn sub_assign(&mut self, rhs: Self) {
                self.0 = self.0.wrapping_sub(rhs.0);
            }
        }

        impl MulAssign for $name {
            #[inline]
            fn mul_assign(&mut self, rhs: Self) {
                self.0 = self.0.wrapping_mul(rhs.0);
            }
        }

        impl Sum for $name {
            fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
                iter.fold($name(0), |acc, x| acc + x)
            }
        }
    };
}

ring_type!(
    /// Residue modulo `2^64`.
    Z64,
    u64,
    i64,
    64
);
ring_type!(
    /// Residue modulo `2^128`. Default ring of the protocol stack: it has room
    /// for the un-rescaled 4-ary products the multivariate protocol produces.
    Z128,
    u128,
    i128,
    128
);

/// The 64-bit ring element.
pub type RingElement = Z64;

pub fn ring_add<R: Ring>(a: R, b: R) -> R {
    a + b
}

pub fn ring_sub<R: Ring>(a: R, b: R) -> R {
    a - b
}

pub fn ring_mul<R: Ring>(a: R, b: R) -> R {
    a * b
}

/// Plaintext truncation: arithmetic right shift of the signed interpretation.
pub fn truncate<R: Ring>(x: R, bits: u32) -> R {
    x.shr_signed(bits)
}

pub const DEFAULT_PRECISION_BITS: u32 = 16;
pub const MIN_PRECISION_BITS: u32 = 8;
pub const MAX_PRECISION_BITS: u32 = 32;

/// Fixed-point encoding with `L` fractional bits, scale `B = 2^L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FixedPointCodec {
    precision_bits: u32,
}

impl Default for FixedPointCodec {
    fn default() -> Self {
        FixedPointCodec {
            precision_bits: DEFAULT_PRECISION_BITS,
        }
    }
}

impl FixedPointCodec {
    /// `L` must lie in `MIN_PRECISION_BITS..=MAX_PRECISION_BITS`.
    pub fn new(precision_bits: u32) -> Result<Self> {
        if !(MIN_PRECISION_BITS..=MAX_PRECISION_BITS).contains(&precision_bits) {
            return Err(Error::Config(format!(
                "fixed-point precision must be in {MIN_PRECISION_BITS}..={MAX_PRECISION_BITS} bits, got {precision_bits}"
            )));
        }
        Ok(FixedPointCodec { precision_bits })
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// `B = 2^L`.
    pub fn scale(&self) -> u64 {
        1u64 << self.precision_bits
    }

    pub fn encode<R: Ring>(&self, x: f64) -> Result<R> {
        encode_bits(x, self.precision_bits)
    }

    pub fn decode<R: Ring>(&self, x: R) -> f64 {
        decode_bits(x, self.precision_bits)
    }
}

/// Largest magnitude (exclusive) encodable at `bits` fractional bits in `R`.
pub fn encode_limit<R: Ring>(bits: u32) -> f64 {
    2f64.powi(R::BITS as i32 - 2 - bits as i32)
}

/// Encodes `round(x * 2^bits)`; negative values map to their two's-complement
/// residue.
pub fn encode_bits<R: Ring>(x: f64, bits: u32) -> Result<R> {
    let limit = encode_limit::<R>(bits);
    if !x.is_finite() || x.abs() >= limit {
        return Err(Error::Range { value: x, limit });
    }
    let scaled = (x * 2f64.powi(bits as i32)).round();
    Ok(R::from_i128(scaled as i128))
}

pub fn decode_bits<R: Ring>(x: R, bits: u32) -> f64 {
    x.to_i128() as f64 / 2f64.powi(bits as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    const Q_MINUS_1: u64 = u64::MAX;

    #[test]
    fn encode_examples() {
        let c = FixedPointCodec::default();
        assert_eq!(c.encode::<Z64>(1.0).unwrap(), Z64(65536));
        assert_eq!(c.encode::<Z64>(0.0).unwrap(), Z64(0));
        assert_eq!(
            c.encode::<Z64>(-0.5).unwrap(),
            Z64(0u64.wrapping_sub(32768))
        );
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn decode_examples() {
        let c = FixedPointCodec::default();
        assert_eq!(c.decode(Z64(65536)), 1.0);
        assert_eq!(c.decode(Z64(0u64.wrapping_sub(32768))), -0.5);
        let x = c.decode(c.encode::<Z64>(3.14159).unwrap());
        assert!((x - 3.14159).abs() <= 2f64.powi(-17));
    }

    #[test]
    fn encode_rejects_out_of_range() {
        let c = FixedPointCodec::default();
        let limit = 2f64.powi(62 - 16);
        assert!(matches!(c.encode::<Z64>(limit), Err(Error::Range { .. })));
        assert!(matches!(
            c.encode::<Z64>(-limit * 2.0),
            Err(Error::Range { .. })
        ));
        assert!(matches!(
            c.encode::<Z64>(f64::NAN),
            Err(Error::Range { .. })
        ));
        assert!(c.encode::<Z64>(limit / 2.0).is_ok());
    }

    #[test]
    fn codec_precision_bounds() {
        assert!(FixedPointCodec::new(7).is_err());
        assert!(FixedPointCodec::new(33).is_err());
        assert_eq!(FixedPointCodec::new(20).unwrap().scale(), 1 << 20);
    }

    #[test]
    fn ring_op_examples() {
        assert_eq!(ring_add(Z64(Q_MINUS_1), Z64(1)), Z64(0));
        assert_eq!(ring_mul(Z64(2), Z64(3)), Z64(6));
        assert_eq!(ring_mul(Z64(1 << 63), Z64(2)), Z64(0));
        assert_eq!(ring_sub(Z64(0), Z64(1)), Z64(Q_MINUS_1));
    }

    #[test]
    fn truncate_examples() {
        let c = FixedPointCodec::default();
        let six: Z64 = c.encode(6.0).unwrap();
        assert_eq!(truncate(six * Z64(c.scale()), 16), six);
        assert_eq!(truncate(Z64(0), 16), Z64(0));
        let minus_two: Z64 = c.encode(-2.0).unwrap();
        assert_eq!(truncate(minus_two * Z64(c.scale()), 16), minus_two);
    }

    fn bigint_signed_shift(x: u64, bits: u32) -> u64 {
        // Oracle: signed value as an exact integer, floor division by 2^bits,
        // reduced back modulo 2^64.
        let signed = BigInt::from(x as i64);
        let q: BigInt = BigInt::from(1u8) << 64u32;
        let d: BigInt = BigInt::from(1u8) << bits;
        let floored = if signed >= BigInt::from(0) {
            &signed / &d
        } else {
            -((-&signed + &d - 1u8) / &d)
        };
        let r = ((floored % &q) + &q) % &q;
        r.try_into().unwrap()
    }

    #[test]
    fn truncate_matches_bigint_oracle() {
        let c = FixedPointCodec::default();
        let x: Z64 = c.encode::<Z64>(-2.0).unwrap() * Z64(c.scale());
        assert_eq!(truncate(x, 16).0, bigint_signed_shift(x.0, 16));
    }

    proptest! {
        #[test]
        fn ring_axioms_z64(a: u64, b: u64, c: u64) {
            let (a, b, c) = (Z64(a), Z64(b), Z64(c));
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!(a * b, b * a);
            prop_assert_eq!(a * (b + c), a * b + a * c);
            prop_assert_eq!((a + b) + c, a + (b + c));
            prop_assert_eq!((a * b) * c, a * (b * c));
            prop_assert_eq!(a - a, Z64::ZERO);
            prop_assert_eq!(a + (-a), Z64::ZERO);
        }

        #[test]
        fn ring_axioms_z128(a: u128, b: u128, c: u128) {
            let (a, b, c) = (Z128(a), Z128(b), Z128(c));
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!(a * (b + c), a * b + a * c);
            prop_assert_eq!((a * b) * c, a * (b * c));
        }

        #[test]
        fn truncate_agrees_with_bigint(x: u64, bits in 0u32..63) {
            prop_assert_eq!(truncate(Z64(x), bits).0, bigint_signed_shift(x, bits));
        }

        #[test]
        fn codec_roundtrip_within_half_ulp(x in -1.0e9f64..1.0e9) {
            let c = FixedPointCodec::default();
            let y = c.decode(c.encode::<Z64>(x).unwrap());
            prop_assert!((x - y).abs() <= 2f64.powi(-17) * (1.0 + 1e-9));
        }

        #[test]
        fn encoded_addition_is_exact(a in -1.0e6f64..1.0e6, b in -1.0e6f64..1.0e6) {
            let c = FixedPointCodec::default();
            let s = c.decode(c.encode::<Z64>(a).unwrap() + c.encode::<Z64>(b).unwrap());
            prop_assert!((s - (a + b)).abs() <= 2f64.powi(-16) * (1.0 + 1e-9));
        }

        #[test]
        fn encode_is_injective_at_resolution(a in -1.0e6f64..1.0e6, k in 1i64..1000) {
            let c = FixedPointCodec::default();
            let b = a + k as f64 * 2f64.powi(-16);
            prop_assert_ne!(c.encode::<Z64>(a).unwrap(), c.encode::<Z64>(b).unwrap());
        }

        #[test]
        fn wire_roundtrip(x: u128) {
            let mut buf = Vec::new();
            Z128(x).write_le(&mut buf);
            prop_assert_eq!(buf.len(), 16);
            prop_assert_eq!(Z128::read_le(&buf), Z128(x));
        }
    }

    #[test]
    fn shr_round_is_nearest() {
        assert_eq!(Z128::from_i128(5).shr_round(1), Z128::from_i128(3));
        assert_eq!(Z128::from_i128(-5).shr_round(1), Z128::from_i128(-2));
        assert_eq!(Z128::from_i128(-7).shr_round(2), Z128::from_i128(-2));
        assert_eq!(Z128::from_i128(6).shr_round(0), Z128::from_i128(6));
    }
}
