//! The bundled 8→16→3 classifier: sigmoid hidden layer, softmax output.
//!
//! Weights are fixed (seeded independently of the run seed) and sized so
//! every activation stays inside the documented nonlinear domains: hidden
//! pre-activations within ±4.1, logits within ±4.

use mvbeaver::nonlinear::{self, reference, ApproxConfig};
use mvbeaver::protocols::{matmul_batch, SharedMatrix};
use mvbeaver::{PartyId, Result, Session, Shared, Z128};
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub const INPUTS: usize = 8;
pub const HIDDEN: usize = 16;
pub const CLASSES: usize = 3;

const WEIGHT_SEED: u64 = 0x6d6c_7038;
/// The model owner and the client.
const OWNER: PartyId = PartyId(0);
const CLIENT: PartyId = PartyId(1);

#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    /// `HIDDEN × INPUTS`, row-major.
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    /// `CLASSES × HIDDEN`, row-major.
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

/// Which sigmoid/softmax the plaintext forward pass uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activations {
    Exact,
    /// The secure recurrences, run in `f64`.
    Recurrence,
}

impl Mlp {
    pub fn bundled() -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(WEIGHT_SEED);
        let mut draw =
            |n: usize, r: f64| -> Vec<f64> { (0..n).map(|_| rng.gen_range(-r..r)).collect() };
        Mlp {
            w1: draw(HIDDEN * INPUTS, 0.5),
            b1: draw(HIDDEN, 0.1),
            w2: draw(CLASSES * HIDDEN, 0.24),
            b2: draw(CLASSES, 0.1),
        }
    }

    pub fn forward_plain(&self, x: &[f64], act: Activations, cfg: &ApproxConfig) -> Vec<f64> {
        let affine = |w: &[f64], b: &[f64], v: &[f64]| -> Vec<f64> {
            b.iter()
                .enumerate()
                .map(|(i, bi)| {
                    bi + w[i * v.len()..(i + 1) * v.len()]
                        .iter()
                        .zip(v)
                        .map(|(a, c)| a * c)
                        .sum::<f64>()
                })
                .collect()
        };
        let z = affine(&self.w1, &self.b1, x);
        let h: Vec<f64> = match act {
            Activations::Exact => z.iter().map(|v| 1.0 / (1.0 + (-v).exp())).collect(),
            Activations::Recurrence => z.iter().map(|v| reference::sigmoid(*v, cfg)).collect(),
        };
        let logits = affine(&self.w2, &self.b2, &h);
        match act {
            Activations::Exact => {
                let e: Vec<f64> = logits.iter().map(|v| v.exp()).collect();
                let sum: f64 = e.iter().sum();
                e.iter().map(|v| v / sum).collect()
            }
            Activations::Recurrence => reference::softmax(&logits, cfg),
        }
    }

    /// Class probabilities for every request, each an independent item so
    /// that coalescing can merge their rounds.
    pub fn forward_secure(
        &self,
        s: &mut Session<Z128>,
        requests: &[Vec<f64>],
        cfg: &ApproxConfig,
    ) -> Result<Vec<Vec<f64>>> {
        let w1 = SharedMatrix::new(HIDDEN, INPUTS, s.input(OWNER, &self.w1)?)?;
        let b1 = s.input(OWNER, &self.b1)?;
        let w2 = SharedMatrix::new(CLASSES, HIDDEN, s.input(OWNER, &self.w2)?)?;
        let b2 = s.input(OWNER, &self.b2)?;
        let xs = requests
            .iter()
            .map(|x| Ok(SharedMatrix::column(s.input(CLIENT, x)?)))
            .collect::<Result<Vec<_>>>()?;

        let z = affine_batch(s, &w1, &b1, &xs)?;
        let z_refs: Vec<&Shared<Z128>> = z.iter().collect();
        let h = nonlinear::sigmoid_batch(s, &z_refs, cfg)?;
        let hs: Vec<SharedMatrix<Z128>> = h.into_iter().map(SharedMatrix::column).collect();
        let logits = affine_batch(s, &w2, &b2, &hs)?;
        let l_refs: Vec<&Shared<Z128>> = logits.iter().collect();
        let probs = nonlinear::softmax_batch(s, &l_refs, cfg)?;
        let p_refs: Vec<&Shared<Z128>> = probs.iter().collect();
        s.labeled("output", |s| s.open_batch(&p_refs))
    }
}

fn affine_batch(
    s: &mut Session<Z128>,
    w: &SharedMatrix<Z128>,
    b: &Shared<Z128>,
    xs: &[SharedMatrix<Z128>],
) -> Result<Vec<Shared<Z128>>> {
    s.labeled("matmul", |s| {
        let pairs: Vec<(&SharedMatrix<Z128>, &SharedMatrix<Z128>)> =
            xs.iter().map(|x| (w, x)).collect();
        matmul_batch(s, &pairs)?
            .into_iter()
            .map(|z| z.data.add(b))
            .collect()
    })
}

/// Seeded client inputs in `[−1, 1]^8`.
pub fn requests(seed: u64, n: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..INPUTS).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

pub fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, x)| {
            if *x > best.1 {
                (i, *x)
            } else {
                best
            }
        })
        .0
}
