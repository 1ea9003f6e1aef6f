//! Share-level rescaling: the masked-reveal scheme against plain local
//! division of shares.

use mvbeaver::protocols::{mul, rescale};
use mvbeaver::{PartyId, Scale, Session, SessionConfig, Z64};
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha20Rng;

const TRIALS: usize = 100_000;
const L: u32 = 16;

fn secrets(seed: u64) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..TRIALS).map(|_| rng.gen_range(-256.0..256.0)).collect()
}

fn session() -> Session<Z64> {
    Session::new(SessionConfig {
        n_parties: 3,
        precision_bits: L,
        seed: 5,
        ..Default::default()
    })
    .unwrap()
}

fn ulps(got: f64, want: f64) -> f64 {
    (got - want).abs() * 2f64.powi(L as i32)
}

#[test]
fn masked_truncation_never_wraps() {
    let xs = secrets(1);
    let mut s = session();
    let x = s.input(PartyId(0), &xs).unwrap();
    let one = s.input(PartyId(1), &vec![1.0; TRIALS]).unwrap();
    let y = mul(&mut s, &x, &one).unwrap();
    assert_eq!(
        y.scale(),
        Scale {
            frac_bits: L,
            deferred_bits: L
        }
    );
    let y = rescale(&mut s, &y).unwrap();
    let got = s.open(&y).unwrap();
    let failures = got
        .iter()
        .zip(&xs)
        .filter(|(g, x)| ulps(**g, **x) > 1.5)
        .count();
    assert_eq!(failures, 0);
}

#[test]
fn local_share_division_fails_about_a_quarter_of_the_time() {
    let xs = secrets(2);
    let mut s = session();
    // x at 2L fractional bits, i.e. one extra scale factor to remove.
    let x = s.share_input(PartyId(0), &xs, 2 * L).unwrap();
    let divided: Vec<i64> = (0..TRIALS)
        .map(|e| {
            x.parts()
                .iter()
                .map(|p| (p.data[e].0 as i64) >> L)
                .fold(0i64, i64::wrapping_add)
        })
        .collect();
    let failures = divided
        .iter()
        .zip(&xs)
        .filter(|(d, x)| ulps(**d as f64 / 2f64.powi(L as i32), **x) > 3.0)
        .count();
    // The shares' signed sum leaves the signed range whenever two free
    // uniform shares sum past ±Q/2: probability 1/4 for three parties.
    let rate = failures as f64 / TRIALS as f64;
    assert!(
        (rate - 0.25).abs() < 0.01,
        "local division failure rate {rate}"
    );
}
