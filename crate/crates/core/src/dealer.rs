//! Trusted dealer: correlated randomness for the online phase.
//!
//! The dealer never sees inputs and never takes part in an online round. It
//! hands out
//! - binary Beaver triples `(a, b, ab)`,
//! - n-ary auxiliary sets: shares of `∏_{i∈S} a_i` for every nonempty
//!   `S ⊆ {1..n}`, keyed by subset bitmask (bit `i` is input `i`),
//! - matrix triples `(A, B, AB)`,
//! - truncation pairs `(A, round(A / 2^s))` for standalone rescaling.
//!
//! Inputs that still carry deferred fixed-point bits need a *wide* reveal
//! mask: the parties open `X − A` with `A` uniform, and the product terms use
//! `a = round(A / 2^s)`. Those wide masks are counted separately
//! (`trunc_elements`) so triple/aux counts stay comparable.

use std::collections::{BTreeMap, VecDeque};
use std::sync::atomic::{AtomicU64, Ordering};

use rand::RngCore;

use crate::error::{Error, Result};
use crate::par::{self, ExecMode};
use crate::ring::Ring;
use crate::sharing::{derive_rng, share, Scale, Shared};

const DEALER_TAG: u64 = 0x6465_616c;

static STANDALONE_IDS: AtomicU64 = AtomicU64::new(1 << 62);

fn standalone_id() -> u64 {
    STANDALONE_IDS.fetch_add(1, Ordering::Relaxed)
}

/// What an online protocol asks the dealer for. `shifts[i]` is the number of
/// deferred bits input `i` carries into the reveal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Request {
    Triple {
        len: usize,
        shifts: [u32; 2],
    },
    Aux {
        arity: usize,
        len: usize,
        shifts: Vec<u32>,
    },
    Matrix {
        dims: (usize, usize, usize),
        shifts: [u32; 2],
    },
    Trunc {
        len: usize,
        shift: u32,
    },
}

#[derive(Clone, Debug)]
pub struct BeaverTriple<R> {
    pub id: u64,
    pub a: Shared<R>,
    pub b: Shared<R>,
    pub c: Shared<R>,
    /// Wide reveal masks for inputs that are rescaled in the reveal.
    pub wide: [Option<Shared<R>>; 2],
}

impl<R: Ring> BeaverTriple<R> {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The same correlation viewed as an arity-2 auxiliary set.
    pub fn as_aux(&self) -> AuxSet<R> {
        let mut entries = BTreeMap::new();
        entries.insert(0b01, self.a.clone());
        entries.insert(0b10, self.b.clone());
        entries.insert(0b11, self.c.clone());
        AuxSet {
            id: self.id,
            arity: 2,
            entries,
            wide: self.wide.to_vec(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AuxSet<R> {
    pub id: u64,
    pub arity: usize,
    /// Subset bitmask → shares of the product of the masks in the subset.
    pub entries: BTreeMap<u32, Shared<R>>,
    pub wide: Vec<Option<Shared<R>>>,
}

impl<R: Ring> AuxSet<R> {
    pub fn len(&self) -> usize {
        self.entries[&1].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn entry(&self, subset: u32) -> &Shared<R> {
        &self.entries[&subset]
    }

    /// Mask subtracted from input `i` before it is opened.
    pub fn reveal_mask(&self, i: usize) -> &Shared<R> {
        self.wide[i].as_ref().unwrap_or(&self.entries[&(1 << i)])
    }
}

#[derive(Clone, Debug)]
pub struct MatrixTriple<R> {
    pub id: u64,
    /// `(m, k, n)`: `A` is `m×k`, `B` is `k×n`, `C = AB` is `m×n`.
    pub dims: (usize, usize, usize),
    pub a: Shared<R>,
    pub b: Shared<R>,
    pub c: Shared<R>,
    pub wide: [Option<Shared<R>>; 2],
}

impl<R: Ring> MatrixTriple<R> {
    pub fn reveal_mask(&self, i: usize) -> &Shared<R> {
        match (&self.wide[i], i) {
            (Some(w), _) => w,
            (None, 0) => &self.a,
            (None, _) => &self.b,
        }
    }
}

/// Shares of a uniform `A` and of `round(A / 2^shift)`.
#[derive(Clone, Debug)]
pub struct TruncPair<R> {
    pub id: u64,
    pub shift: u32,
    pub wide: Shared<R>,
    pub narrow: Shared<R>,
}

#[derive(Clone, Debug)]
pub enum Material<R> {
    Triple(BeaverTriple<R>),
    Aux(AuxSet<R>),
    Matrix(MatrixTriple<R>),
    Trunc(TruncPair<R>),
}

impl<R> Material<R> {
    pub fn id(&self) -> u64 {
        match self {
            Material::Triple(t) => t.id,
            Material::Aux(a) => a.id,
            Material::Matrix(m) => m.id,
            Material::Trunc(t) => t.id,
        }
    }
}

/// Offline traffic meter (per party; every party receives the same amount).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OfflineRecord {
    pub triples: u64,
    /// Arity → number of auxiliary sets.
    pub aux_sets: BTreeMap<usize, u64>,
    pub matrix_triples: u64,
    pub trunc_pairs: u64,
    /// Triple, aux-set and matrix-triple elements.
    pub corr_elements: u64,
    /// Wide reveal masks for rescaled inputs and truncation pairs.
    pub trunc_elements: u64,
}

impl OfflineRecord {
    pub fn elements(&self) -> u64 {
        self.corr_elements + self.trunc_elements
    }

    fn note(&mut self, req: &Request) {
        let (corr, trunc) = request_elements(req);
        self.corr_elements += corr;
        self.trunc_elements += trunc;
        match req {
            Request::Triple { .. } => self.triples += 1,
            Request::Aux { arity, .. } => *self.aux_sets.entry(*arity).or_default() += 1,
            Request::Matrix { .. } => self.matrix_triples += 1,
            Request::Trunc { .. } => self.trunc_pairs += 1,
        }
    }
}

/// Bytes each party receives from the dealer.
pub fn offline_bytes(record: &OfflineRecord, element_bytes: usize) -> u64 {
    record.elements() * element_bytes as u64
}

/// `(correlation elements, wide-mask elements)` per party for one request.
pub fn request_elements(req: &Request) -> (u64, u64) {
    let wide = |shifts: &[u32], lens: &[usize]| -> u64 {
        shifts
            .iter()
            .zip(lens)
            .filter(|(s, _)| **s > 0)
            .map(|(_, l)| *l as u64)
            .sum()
    };
    match req {
        Request::Triple { len, shifts } => (3 * *len as u64, wide(shifts, &[*len, *len])),
        Request::Aux { arity, len, shifts } => (
            ((1u64 << arity) - 1) * *len as u64,
            wide(shifts, &vec![*len; *arity]),
        ),
        Request::Matrix {
            dims: (m, k, n),
            shifts,
        } => (
            (m * k + k * n + m * n) as u64,
            wide(shifts, &[m * k, k * n]),
        ),
        Request::Trunc { len, .. } => (0, 2 * *len as u64),
    }
}

/// A uniform mask and, when the input is rescaled in the reveal, the wide
/// mask it was derived from.
fn draw_mask<R: Ring, G: RngCore + ?Sized>(
    len: usize,
    shift: u32,
    rng: &mut G,
) -> (Vec<R>, Option<Vec<R>>) {
    let wide: Vec<R> = (0..len).map(|_| R::random(rng)).collect();
    if shift == 0 {
        (wide, None)
    } else {
        (
            wide.iter().map(|v| v.shr_round(shift)).collect(),
            Some(wide),
        )
    }
}

fn share_all<R: Ring, G: RngCore + ?Sized>(values: &[R], n: usize, rng: &mut G) -> Shared<R> {
    Shared::from_parts_unchecked(
        share(values, n, Scale::INTEGER, rng).expect("n >= 2 checked by caller"),
    )
}

fn check_parties(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Config(format!(
            "dealer needs at least 2 parties, got {n}"
        )));
    }
    Ok(())
}

fn triple_with<R: Ring, G: RngCore + ?Sized>(
    id: u64,
    len: usize,
    shifts: [u32; 2],
    n: usize,
    rng: &mut G,
) -> BeaverTriple<R> {
    let (a, wa) = draw_mask::<R, _>(len, shifts[0], rng);
    let (b, wb) = draw_mask::<R, _>(len, shifts[1], rng);
    let c: Vec<R> = a.iter().zip(&b).map(|(x, y)| *x * *y).collect();
    BeaverTriple {
        id,
        a: share_all(&a, n, rng),
        b: share_all(&b, n, rng),
        c: share_all(&c, n, rng),
        wide: [
            wa.map(|w| share_all(&w, n, rng)),
            wb.map(|w| share_all(&w, n, rng)),
        ],
    }
}

fn aux_with<R: Ring, G: RngCore + ?Sized>(
    id: u64,
    arity: usize,
    len: usize,
    shifts: &[u32],
    n: usize,
    rng: &mut G,
) -> AuxSet<R> {
    let drawn: Vec<(Vec<R>, Option<Vec<R>>)> =
        (0..arity).map(|i| draw_mask(len, shifts[i], rng)).collect();
    let mut entries = BTreeMap::new();
    for subset in 1u32..(1 << arity) {
        let product: Vec<R> = (0..len)
            .map(|e| {
                (0..arity)
                    .filter(|i| subset & (1 << i) != 0)
                    .fold(R::ONE, |acc, i| acc * drawn[i].0[e])
            })
            .collect();
        entries.insert(subset, share_all(&product, n, rng));
    }
    let wide = drawn
        .iter()
        .map(|(_, w)| w.as_ref().map(|w| share_all(w, n, rng)))
        .collect();
    AuxSet {
        id,
        arity,
        entries,
        wide,
    }
}

fn matmul_plain<R: Ring>(a: &[R], b: &[R], (m, k, n): (usize, usize, usize)) -> Vec<R> {
    let mut c = vec![R::ZERO; m * n];
    for i in 0..m {
        for t in 0..k {
            let x = a[i * k + t];
            for j in 0..n {
                c[i * n + j] += x * b[t * n + j];
            }
        }
    }
    c
}

fn matrix_with<R: Ring, G: RngCore + ?Sized>(
    id: u64,
    dims: (usize, usize, usize),
    shifts: [u32; 2],
    n: usize,
    rng: &mut G,
) -> MatrixTriple<R> {
    let (m, k, nn) = dims;
    let (a, wa) = draw_mask::<R, _>(m * k, shifts[0], rng);
    let (b, wb) = draw_mask::<R, _>(k * nn, shifts[1], rng);
    let c = matmul_plain(&a, &b, dims);
    MatrixTriple {
        id,
        dims,
        a: share_all(&a, n, rng),
        b: share_all(&b, n, rng),
        c: share_all(&c, n, rng),
        wide: [
            wa.map(|w| share_all(&w, n, rng)),
            wb.map(|w| share_all(&w, n, rng)),
        ],
    }
}

/// Binary Beaver triple over vectors of `len` elements.
fn trunc_with<R: Ring, G: RngCore + ?Sized>(
    id: u64,
    len: usize,
    shift: u32,
    n: usize,
    rng: &mut G,
) -> TruncPair<R> {
    let wide: Vec<R> = (0..len).map(|_| R::random(rng)).collect();
    let narrow: Vec<R> = wide.iter().map(|v| v.shr_round(shift)).collect();
    TruncPair {
        id,
        shift,
        wide: share_all(&wide, n, rng),
        narrow: share_all(&narrow, n, rng),
    }
}

pub fn gen_trunc_pair<R: Ring, G: RngCore + ?Sized>(
    len: usize,
    shift: u32,
    n: usize,
    rng: &mut G,
) -> Result<TruncPair<R>> {
    check_parties(n)?;
    Ok(trunc_with(standalone_id(), len, shift, n, rng))
}

pub fn gen_triple<R: Ring, G: RngCore + ?Sized>(
    len: usize,
    n_parties: usize,
    rng: &mut G,
) -> Result<BeaverTriple<R>> {
    check_parties(n_parties)?;
    Ok(triple_with(standalone_id(), len, [0, 0], n_parties, rng))
}

/// Auxiliary set for an `arity`-ary product: `2^arity − 1` subset products.
pub fn gen_aux_set<R: Ring, G: RngCore + ?Sized>(
    arity: usize,
    len: usize,
    n_parties: usize,
    max_arity: usize,
    rng: &mut G,
) -> Result<AuxSet<R>> {
    check_parties(n_parties)?;
    check_arity(arity, max_arity)?;
    Ok(aux_with(
        standalone_id(),
        arity,
        len,
        &vec![0; arity],
        n_parties,
        rng,
    ))
}

pub fn gen_matrix_triple<R: Ring, G: RngCore + ?Sized>(
    dims: (usize, usize, usize),
    n_parties: usize,
    rng: &mut G,
) -> Result<MatrixTriple<R>> {
    check_parties(n_parties)?;
    Ok(matrix_with(standalone_id(), dims, [0, 0], n_parties, rng))
}

pub(crate) fn check_arity(arity: usize, max_arity: usize) -> Result<()> {
    if arity < 2 || arity > max_arity {
        return Err(Error::Config(format!(
            "arity {arity} outside 2..={max_arity}"
        )));
    }
    // Subset bitmasks are u32 and the set has 2^arity - 1 entries.
    if arity > 16 {
        return Err(Error::Config(format!(
            "arity {arity} too large for an auxiliary set"
        )));
    }
    Ok(())
}

/// How the dealer's material reaches the online phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provisioning {
    /// Generate at request time (tests and interactive use).
    OnDemand,
    /// Record requests and hand out zero material; nothing is metered.
    Planning,
    /// Serve material generated by [`Dealer::prepare`], in request order.
    Replay,
}

pub struct Dealer<R> {
    seed: u64,
    n_parties: usize,
    max_arity: usize,
    mode: Provisioning,
    exec: ExecMode,
    next_index: u64,
    plan: Vec<Request>,
    prepared: VecDeque<(Request, Material<R>)>,
    record: OfflineRecord,
}

impl<R: Ring> Dealer<R> {
    pub fn new(
        seed: u64,
        n_parties: usize,
        max_arity: usize,
        mode: Provisioning,
        exec: ExecMode,
    ) -> Result<Self> {
        check_parties(n_parties)?;
        Ok(Dealer {
            seed,
            n_parties,
            max_arity,
            mode,
            exec,
            next_index: 0,
            plan: Vec::new(),
            prepared: VecDeque::new(),
            record: OfflineRecord::default(),
        })
    }

    pub fn mode(&self) -> Provisioning {
        self.mode
    }

    pub fn record(&self) -> &OfflineRecord {
        &self.record
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    /// Requests seen so far in planning mode.
    pub fn take_plan(&mut self) -> Vec<Request> {
        std::mem::take(&mut self.plan)
    }

    /// Runs the whole offline phase for `plan` and switches to replay.
    pub fn prepare(&mut self, plan: Vec<Request>) {
        let base = self.next_index;
        let indexed: Vec<(u64, Request)> = plan
            .into_iter()
            .enumerate()
            .map(|(i, r)| (base + i as u64, r))
            .collect();
        let (seed, n) = (self.seed, self.n_parties);
        let generated = par::map(self.exec, &indexed, |(idx, req)| {
            (req.clone(), generate::<R>(seed, n, *idx, req))
        });
        for (req, _) in &generated {
            self.record.note(req);
        }
        self.prepared = generated.into();
        self.mode = Provisioning::Replay;
    }

    fn fetch(&mut self, req: Request) -> Result<Material<R>> {
        match self.mode {
            Provisioning::OnDemand => {
                let m = generate(self.seed, self.n_parties, self.next_index, &req);
                self.next_index += 1;
                self.record.note(&req);
                Ok(m)
            }
            Provisioning::Planning => {
                let m = zero_material(self.n_parties, self.next_index, &req);
                self.next_index += 1;
                self.plan.push(req);
                Ok(m)
            }
            Provisioning::Replay => {
                let (planned, m) = self
                    .prepared
                    .pop_front()
                    .ok_or_else(|| Error::Preprocessing(format!("no material left for {req:?}")))?;
                if planned != req {
                    return Err(Error::Preprocessing(format!(
                        "online phase asked for {req:?}, offline phase prepared {planned:?}"
                    )));
                }
                Ok(m)
            }
        }
    }

    pub fn triple(&mut self, len: usize, shifts: [u32; 2]) -> Result<BeaverTriple<R>> {
        match self.fetch(Request::Triple { len, shifts })? {
            Material::Triple(t) => Ok(t),
            _ => unreachable!("fetch returns the requested kind"),
        }
    }

    pub fn aux_set(&mut self, arity: usize, len: usize, shifts: Vec<u32>) -> Result<AuxSet<R>> {
        check_arity(arity, self.max_arity)?;
        if shifts.len() != arity {
            return Err(Error::Shape(format!(
                "{} shifts for arity {arity}",
                shifts.len()
            )));
        }
        match self.fetch(Request::Aux { arity, len, shifts })? {
            Material::Aux(a) => Ok(a),
            _ => unreachable!("fetch returns the requested kind"),
        }
    }

    pub fn matrix_triple(
        &mut self,
        dims: (usize, usize, usize),
        shifts: [u32; 2],
    ) -> Result<MatrixTriple<R>> {
        match self.fetch(Request::Matrix { dims, shifts })? {
            Material::Matrix(m) => Ok(m),
            _ => unreachable!("fetch returns the requested kind"),
        }
    }

    /// Material left unconsumed after the online phase.
    pub fn trunc_pair(&mut self, len: usize, shift: u32) -> Result<TruncPair<R>> {
        match self.fetch(Request::Trunc { len, shift })? {
            Material::Trunc(t) => Ok(t),
            _ => unreachable!("fetch returns the requested kind"),
        }
    }

    pub fn leftover(&self) -> usize {
        self.prepared.len()
    }
}

fn generate<R: Ring>(seed: u64, n: usize, index: u64, req: &Request) -> Material<R> {
    let mut rng = derive_rng(seed, &[DEALER_TAG, index]);
    match req {
        Request::Triple { len, shifts } => {
            Material::Triple(triple_with(index, *len, *shifts, n, &mut rng))
        }
        Request::Aux { arity, len, shifts } => {
            Material::Aux(aux_with(index, *arity, *len, shifts, n, &mut rng))
        }
        Request::Matrix { dims, shifts } => {
            Material::Matrix(matrix_with(index, *dims, *shifts, n, &mut rng))
        }
        Request::Trunc { len, shift } => {
            Material::Trunc(trunc_with(index, *len, *shift, n, &mut rng))
        }
    }
}

fn zeros<R: Ring>(n: usize, len: usize) -> Shared<R> {
    Shared::public(n, &vec![R::ZERO; len], Scale::INTEGER)
}

fn zero_material<R: Ring>(n: usize, id: u64, req: &Request) -> Material<R> {
    let wide = |s: u32, len: usize| (s > 0).then(|| zeros(n, len));
    match req {
        Request::Triple { len, shifts } => Material::Triple(BeaverTriple {
            id,
            a: zeros(n, *len),
            b: zeros(n, *len),
            c: zeros(n, *len),
            wide: [wide(shifts[0], *len), wide(shifts[1], *len)],
        }),
        Request::Aux { arity, len, shifts } => Material::Aux(AuxSet {
            id,
            arity: *arity,
            entries: (1u32..(1 << arity)).map(|s| (s, zeros(n, *len))).collect(),
            wide: shifts.iter().map(|s| wide(*s, *len)).collect(),
        }),
        Request::Matrix {
            dims: (m, k, nn),
            shifts,
        } => Material::Matrix(MatrixTriple {
            id,
            dims: (*m, *k, *nn),
            a: zeros(n, m * k),
            b: zeros(n, k * nn),
            c: zeros(n, m * nn),
            wide: [wide(shifts[0], m * k), wide(shifts[1], k * nn)],
        }),
        Request::Trunc { len, shift } => Material::Trunc(TruncPair {
            id,
            shift: *shift,
            wide: zeros(n, *len),
            narrow: zeros(n, *len),
        }),
    }
}
