//! Session orchestration: a lockstep scheduler that drives all parties
//! through synchronized all-to-all reveal rounds on a virtual clock.
//!
//! Every party's share of every value lives in the session (as a
//! [`Shared`]), and every communication step is an explicit round built from
//! real [`Frame`]s. Reveals can be issued immediately ([`Session::exchange_reveal`])
//! or deferred behind a [`RevealTicket`] and merged into one round by
//! [`Session::flush`].

pub mod net;
pub mod wire;

use std::collections::{HashMap, HashSet};

use crate::dealer::{AuxSet, BeaverTriple, Dealer, MatrixTriple, Provisioning, TruncPair};
use crate::error::{Error, Result};
use crate::par::ExecMode;
use crate::ring::{encode_bits, Ring, MAX_PRECISION_BITS, MIN_PRECISION_BITS};
use crate::sharing::{PartyId, Scale, ShareVector, Shared, ZeroShareGenerator};

pub use net::{NetProfile, OpCost, RoundStats};
pub use wire::{Frame, OfflineFrame, Role};

/// How n-ary products are computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Method {
    /// Chained binary Beaver products: n − 1 rounds.
    Naive,
    /// One-round multivariate products from auxiliary sets.
    #[default]
    Multivariate,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Naive => "naive",
            Method::Multivariate => "multi",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SessionConfig {
    pub n_parties: usize,
    pub max_arity: usize,
    /// Fixed-point precision `L` of inputs and outputs.
    pub precision_bits: u32,
    pub seed: u64,
    pub net: NetProfile,
    pub method: Method,
    /// Merge reveals of independent batch items into one round.
    pub coalesce: bool,
    pub exec: ExecMode,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            n_parties: 3,
            max_arity: 4,
            precision_bits: 16,
            seed: 0,
            net: NetProfile::default(),
            method: Method::Multivariate,
            coalesce: true,
            exec: ExecMode::default(),
        }
    }
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_parties < 2 {
            return Err(Error::Config(format!(
                "need at least 2 parties, got {}",
                self.n_parties
            )));
        }
        if !(2..=16).contains(&self.max_arity) {
            return Err(Error::Config(format!(
                "max arity {} outside 2..=16",
                self.max_arity
            )));
        }
        if !(MIN_PRECISION_BITS..=MAX_PRECISION_BITS).contains(&self.precision_bits) {
            return Err(Error::Config(format!(
                "precision {} outside {MIN_PRECISION_BITS}..={MAX_PRECISION_BITS} bits",
                self.precision_bits
            )));
        }
        if !self.exec.available() {
            return Err(Error::Config("parallel execution not compiled in".into()));
        }
        self.net.validate()
    }
}

/// Handle to a deferred reveal. Redeeming consumes it, so a ticket resolves
/// exactly once.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct RevealTicket {
    correlation: u64,
    len: usize,
}

impl RevealTicket {
    pub fn correlation(&self) -> u64 {
        self.correlation
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

struct Pending<R> {
    correlation: u64,
    shares: Vec<ShareVector<R>>,
}

/// One party's list of contributions to a round: `(correlation, share)`.
pub type Contribution<R> = Vec<(u64, ShareVector<R>)>;

pub struct Session<R: Ring> {
    config: SessionConfig,
    dealer: Dealer<R>,
    przs: Vec<ZeroShareGenerator>,
    stats: RoundStats,
    pending: Vec<Pending<R>>,
    resolved: HashMap<u64, Vec<R>>,
    next_correlation: u64,
    spent: HashSet<u64>,
    transcript: Option<Vec<Frame>>,
    labels: Vec<String>,
}

impl<R: Ring> Session<R> {
    /// A session whose dealer generates material at request time. Intended
    /// for tests and interactive use; benchmarks go through [`run_session`].
    pub fn new(config: SessionConfig) -> Result<Self> {
        Self::with_dealer(config, Provisioning::OnDemand)
    }

    fn with_dealer(config: SessionConfig, mode: Provisioning) -> Result<Self> {
        config.validate()?;
        let dealer = Dealer::new(
            config.seed,
            config.n_parties,
            config.max_arity,
            mode,
            config.exec,
        )?;
        let przs = (0..config.n_parties)
            .map(|p| ZeroShareGenerator::new(config.seed, PartyId(p), config.n_parties))
            .collect();
        Ok(Session {
            stats: RoundStats::new(config.n_parties),
            config,
            dealer,
            przs,
            pending: Vec::new(),
            resolved: HashMap::new(),
            next_correlation: 0,
            spent: HashSet::new(),
            transcript: None,
            labels: Vec::new(),
        })
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn n_parties(&self) -> usize {
        self.config.n_parties
    }

    pub fn exec(&self) -> ExecMode {
        self.config.exec
    }

    /// Counters so far, with offline traffic filled in from the dealer.
    pub fn stats(&self) -> RoundStats {
        let mut s = self.stats.clone();
        s.offline_bytes = self.dealer.record().elements() * R::BYTES as u64;
        s
    }

    pub fn dealer(&self) -> &Dealer<R> {
        &self.dealer
    }

    /// Whether the dealer is only recording requests (first pass of
    /// [`run_session`]); opened values are meaningless in that pass.
    pub fn is_planning(&self) -> bool {
        self.dealer.mode() == Provisioning::Planning
    }

    /// Starts recording every online frame (used by view-uniformity tests).
    pub fn record_transcript(&mut self) {
        self.transcript.get_or_insert_with(Vec::new);
    }

    pub fn transcript(&self) -> &[Frame] {
        self.transcript.as_deref().unwrap_or(&[])
    }

    /// Runs `f` with rounds charged to `label` unless an outer label is set.
    pub fn labeled<T>(&mut self, label: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        self.labels.push(label.to_string());
        let out = f(self);
        self.labels.pop();
        out
    }

    // ---- inputs -------------------------------------------------------

    /// Secret-shares `values` held by `owner`: the owner adds its input to
    /// a pseudorandom zero-sharing. No communication.
    pub fn share_input_raw(
        &mut self,
        owner: PartyId,
        values: &[R],
        scale: Scale,
    ) -> Result<Shared<R>> {
        if owner.0 >= self.n_parties() {
            return Err(Error::Config(format!("no party {}", owner.0)));
        }
        let mut parts: Vec<ShareVector<R>> = self
            .przs
            .iter_mut()
            .map(|g| g.next(values.len(), scale))
            .collect();
        for (s, v) in parts[owner.0].data.iter_mut().zip(values) {
            *s += *v;
        }
        Shared::from_parts(parts)
    }

    /// Encodes reals at `frac_bits` and shares them from `owner`.
    pub fn share_input(
        &mut self,
        owner: PartyId,
        values: &[f64],
        frac_bits: u32,
    ) -> Result<Shared<R>> {
        let enc = values
            .iter()
            .map(|v| encode_bits::<R>(*v, frac_bits))
            .collect::<Result<Vec<_>>>()?;
        self.share_input_raw(owner, &enc, Scale::fixed(frac_bits))
    }

    /// Shares reals at the session precision `L`.
    pub fn input(&mut self, owner: PartyId, values: &[f64]) -> Result<Shared<R>> {
        self.share_input(owner, values, self.config.precision_bits)
    }

    // ---- correlated randomness -----------------------------------------

    /// Marks correlated randomness as used; a second use is an error.
    pub fn consume(&mut self, id: u64) -> Result<()> {
        if !self.spent.insert(id) {
            return Err(Error::MaskReuse { id });
        }
        Ok(())
    }

    pub fn triple(&mut self, len: usize, shifts: [u32; 2]) -> Result<BeaverTriple<R>> {
        self.dealer.triple(len, shifts)
    }

    pub fn aux_set(&mut self, arity: usize, len: usize, shifts: Vec<u32>) -> Result<AuxSet<R>> {
        self.dealer.aux_set(arity, len, shifts)
    }

    pub fn matrix_triple(
        &mut self,
        dims: (usize, usize, usize),
        shifts: [u32; 2],
    ) -> Result<MatrixTriple<R>> {
        self.dealer.matrix_triple(dims, shifts)
    }

    pub fn trunc_pair(&mut self, len: usize, shift: u32) -> Result<TruncPair<R>> {
        self.dealer.trunc_pair(len, shift)
    }

    // ---- rounds ---------------------------------------------------------

    fn fresh_correlation(&mut self) -> u64 {
        let c = self.next_correlation;
        self.next_correlation += 1;
        c
    }

    /// One synchronized all-to-all round. `contributions[p]` is party `p`'s
    /// ordered list, or `None` if it never entered the round. Returns the
    /// opened sums by correlation id, in party 0's order.
    pub fn exchange_contributions(
        &mut self,
        contributions: Vec<Option<Contribution<R>>>,
    ) -> Result<Vec<(u64, Vec<R>)>> {
        let n = self.n_parties();
        if contributions.len() != n {
            return Err(Error::Config(format!(
                "{} contribution lists for {n} parties",
                contributions.len()
            )));
        }
        let round = self.stats.online_rounds;
        let present: Vec<&Contribution<R>> = contributions.iter().flatten().collect();
        let missing: Vec<usize> = (0..n).filter(|p| contributions[*p].is_none()).collect();
        let reference = match present.first() {
            Some(r) => *r,
            None => return Ok(Vec::new()),
        };
        if !missing.is_empty() {
            let correlation = reference.first().map(|(c, _)| *c).unwrap_or(u64::MAX);
            return Err(Error::Deadlock {
                correlation,
                missing,
            });
        }
        if reference.is_empty() && present.iter().all(|c| c.is_empty()) {
            return Ok(Vec::new());
        }
        for (p, list) in present.iter().enumerate() {
            if list.len() != reference.len() {
                return Err(Error::Desync {
                    round,
                    detail: format!(
                        "party {p} sends {} reveals, party 0 sends {}",
                        list.len(),
                        reference.len()
                    ),
                });
            }
            for ((c, s), (c0, s0)) in list.iter().zip(reference.iter()) {
                if c != c0 || s.len() != s0.len() {
                    return Err(Error::Desync {
                        round,
                        detail: format!(
                            "party {p} sends correlation {c} ({} elements), party 0 sends {c0} ({} elements)",
                            s.len(),
                            s0.len()
                        ),
                    });
                }
            }
        }

        // Every party broadcasts one frame per reveal; each receiver decodes
        // the frames and sums them with its own share.
        let frames: Vec<Vec<Frame>> = present
            .iter()
            .enumerate()
            .map(|(p, list)| {
                list.iter()
                    .map(|(c, s)| Frame::new(round, p as u32, *c, &s.data))
                    .collect()
            })
            .collect();
        let mut opened: Vec<(u64, Vec<R>)> = reference
            .iter()
            .map(|(c, s)| (*c, vec![R::ZERO; s.len()]))
            .collect();
        for party_frames in &frames {
            for (slot, frame) in opened.iter_mut().zip(party_frames) {
                let decoded = Frame::decode(&frame.encode())?.elements::<R>()?;
                for (acc, v) in slot.1.iter_mut().zip(decoded) {
                    *acc += v;
                }
            }
        }

        let elements: usize = reference.iter().map(|(_, s)| s.len()).sum();
        let round_bytes = (elements * R::BYTES * (n - 1)) as u64;
        self.stats.online_rounds += 1;
        self.stats.online_bytes += round_bytes;
        for p in 0..n {
            // Each frame goes to every other party.
            self.stats.online_messages[p] += (reference.len() * (n - 1)) as u64;
        }
        let label = self
            .labels
            .first()
            .cloned()
            .unwrap_or_else(|| "unlabeled".into());
        let cost = self.stats.attribution.entry(label).or_default();
        cost.rounds += 1;
        cost.bytes += round_bytes;
        let profile = self.config.net.clone();
        self.stats.advance_clock(round_bytes, &profile);
        if let Some(t) = self.transcript.as_mut() {
            t.extend(frames.into_iter().flatten());
        }
        Ok(opened)
    }

    /// Opens every sharing in `items` in one round (none if `items` is empty).
    /// Returns the raw ring sums at each item's physical scale.
    pub fn exchange_reveal(&mut self, items: &[&Shared<R>]) -> Result<Vec<Vec<R>>> {
        if items.is_empty() {
            return Ok(Vec::new());
        }
        let n = self.n_parties();
        let mut contributions: Vec<Contribution<R>> = vec![Vec::new(); n];
        for item in items {
            if item.n_parties() != n {
                return Err(Error::Shape(format!(
                    "{} shares for {n} parties",
                    item.n_parties()
                )));
            }
            let c = self.fresh_correlation();
            for (p, share) in item.parts().iter().enumerate() {
                contributions[p].push((c, share.clone()));
            }
        }
        let opened = self.exchange_contributions(contributions.into_iter().map(Some).collect())?;
        Ok(opened.into_iter().map(|(_, v)| v).collect())
    }

    /// Queues a reveal for the next [`flush`](Self::flush).
    pub fn defer_reveal(&mut self, item: &Shared<R>) -> Result<RevealTicket> {
        if item.n_parties() != self.n_parties() {
            return Err(Error::Shape(format!(
                "{} shares for {} parties",
                item.n_parties(),
                self.n_parties()
            )));
        }
        let correlation = self.fresh_correlation();
        self.pending.push(Pending {
            correlation,
            shares: item.parts().to_vec(),
        });
        Ok(RevealTicket {
            correlation,
            len: item.len(),
        })
    }

    pub fn pending_reveals(&self) -> usize {
        self.pending.len()
    }

    /// Opens every queued reveal in a single round; no round if none queued.
    pub fn flush(&mut self) -> Result<()> {
        if self.pending.is_empty() {
            return Ok(());
        }
        let pending = std::mem::take(&mut self.pending);
        let n = self.n_parties();
        let mut contributions: Vec<Contribution<R>> = vec![Vec::new(); n];
        for item in pending {
            for (p, share) in item.shares.into_iter().enumerate() {
                contributions[p].push((item.correlation, share));
            }
        }
        let opened = self.exchange_contributions(contributions.into_iter().map(Some).collect())?;
        self.resolved.extend(opened);
        Ok(())
    }

    /// Boundary between independent batch items: flushes unless coalescing.
    pub fn item_boundary(&mut self) -> Result<()> {
        if self.config.coalesce {
            Ok(())
        } else {
            self.flush()
        }
    }

    /// Takes the opened value of a flushed ticket.
    pub fn redeem(&mut self, ticket: RevealTicket) -> Result<Vec<R>> {
        self.resolved
            .remove(&ticket.correlation)
            .ok_or(Error::Unresolved {
                correlation: ticket.correlation,
            })
    }

    // ---- outputs --------------------------------------------------------

    /// Opens sharings to ring values at their logical scale in one round;
    /// deferred bits are divided out exactly after opening.
    pub fn open_ring_batch(&mut self, items: &[&Shared<R>]) -> Result<Vec<Vec<R>>> {
        let raw = self.exchange_reveal(items)?;
        Ok(raw
            .into_iter()
            .zip(items)
            .map(|(v, s)| {
                let d = s.scale().deferred_bits;
                v.into_iter().map(|x| x.shr_round(d)).collect()
            })
            .collect())
    }

    pub fn open_ring(&mut self, item: &Shared<R>) -> Result<Vec<R>> {
        Ok(self.open_ring_batch(&[item])?.remove(0))
    }

    /// Opens and decodes sharings to reals in one round.
    pub fn open_batch(&mut self, items: &[&Shared<R>]) -> Result<Vec<Vec<f64>>> {
        let raw = self.exchange_reveal(items)?;
        Ok(raw
            .into_iter()
            .zip(items)
            .map(|(v, s)| {
                let denom = 2f64.powi(s.scale().physical() as i32);
                v.into_iter().map(|x| x.to_i128() as f64 / denom).collect()
            })
            .collect())
    }

    pub fn open(&mut self, item: &Shared<R>) -> Result<Vec<f64>> {
        Ok(self.open_batch(&[item])?.remove(0))
    }
}

/// Result of [`run_session`].
#[derive(Clone, Debug)]
pub struct SessionOutput<T> {
    pub output: T,
    pub stats: RoundStats,
}

/// Runs `program` as a complete session: a planning pass records what the
/// program will ask the dealer for, the dealer then generates all of it
/// offline, and the online pass replays the program against that material.
/// Identical seeds and configs give identical outputs and stats.
pub fn run_session<R, T, F>(config: &SessionConfig, program: F) -> Result<SessionOutput<T>>
where
    R: Ring,
    F: Fn(&mut Session<R>) -> Result<T>,
{
    let mut planner = Session::<R>::with_dealer(config.clone(), Provisioning::Planning)?;
    program(&mut planner)?;
    let plan = planner.dealer.take_plan();

    let mut online = Session::<R>::with_dealer(config.clone(), Provisioning::Planning)?;
    online.dealer.prepare(plan);
    let output = program(&mut online)?;
    if !online.pending.is_empty() {
        let correlation = online.pending[0].correlation;
        return Err(Error::Unresolved { correlation });
    }
    if online.dealer.leftover() != 0 {
        return Err(Error::Preprocessing(format!(
            "{} prepared correlations left unused",
            online.dealer.leftover()
        )));
    }
    Ok(SessionOutput {
        output,
        stats: online.stats(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Z128, Z64};

    fn session() -> Session<Z64> {
        Session::new(SessionConfig::default()).unwrap()
    }

    #[test]
    fn reveal_of_shared_value() {
        let mut s = session();
        let x = s
            .share_input_raw(PartyId(1), &[Z64(42)], Scale::INTEGER)
            .unwrap();
        assert_eq!(s.exchange_reveal(&[&x]).unwrap(), vec![vec![Z64(42)]]);
        assert_eq!(s.stats().online_rounds, 1);
    }

    #[test]
    fn many_reveals_cost_one_round() {
        let mut s = session();
        let xs: Vec<Shared<Z64>> = (0..7)
            .map(|i| {
                s.share_input_raw(PartyId(0), &[Z64(i)], Scale::INTEGER)
                    .unwrap()
            })
            .collect();
        let refs: Vec<&Shared<Z64>> = xs.iter().collect();
        let out = s.exchange_reveal(&refs).unwrap();
        assert_eq!(out.len(), 7);
        assert_eq!(out[6], vec![Z64(6)]);
        assert_eq!(s.stats().online_rounds, 1);
        assert_eq!(s.stats().online_bytes, 7 * 8 * 2);
    }

    #[test]
    fn empty_reveal_and_empty_flush_are_free() {
        let mut s = session();
        assert!(s.exchange_reveal(&[]).unwrap().is_empty());
        s.flush().unwrap();
        assert_eq!(s.stats(), RoundStats::new(3));
    }

    #[test]
    fn deferred_reveals_merge() {
        let mut s = session();
        let vals: Vec<Shared<Z64>> = (0..5)
            .map(|i| {
                s.share_input_raw(PartyId(2), &[Z64(10 + i)], Scale::INTEGER)
                    .unwrap()
            })
            .collect();
        let tickets: Vec<RevealTicket> = vals.iter().map(|v| s.defer_reveal(v).unwrap()).collect();
        s.flush().unwrap();
        let got: Vec<Z64> = tickets
            .into_iter()
            .map(|t| s.redeem(t).unwrap()[0])
            .collect();
        assert_eq!(got, (10..15).map(Z64).collect::<Vec<_>>());
        assert_eq!(s.stats().online_rounds, 1);
    }

    #[test]
    fn unresolved_ticket_is_an_error() {
        let mut s = session();
        let v = s
            .share_input_raw(PartyId(0), &[Z64(1)], Scale::INTEGER)
            .unwrap();
        let t = s.defer_reveal(&v).unwrap();
        let c = t.correlation();
        assert_eq!(s.redeem(t), Err(Error::Unresolved { correlation: c }));
    }

    #[test]
    fn missing_party_is_a_deadlock() {
        let mut s = session();
        let v = s
            .share_input_raw(PartyId(0), &[Z64(1)], Scale::INTEGER)
            .unwrap();
        let contribs = vec![
            Some(vec![(9, v.part(0).clone())]),
            None,
            Some(vec![(9, v.part(2).clone())]),
        ];
        assert_eq!(
            s.exchange_contributions(contribs),
            Err(Error::Deadlock {
                correlation: 9,
                missing: vec![1]
            })
        );
        assert_eq!(s.stats().online_rounds, 0);
    }

    #[test]
    fn shape_disagreement_is_a_desync() {
        let mut s = session();
        let v = s
            .share_input_raw(PartyId(0), &[Z64(1), Z64(2)], Scale::INTEGER)
            .unwrap();
        let short = ShareVector::new(PartyId(1), vec![Z64(0)], Scale::INTEGER);
        let contribs = vec![
            Some(vec![(0, v.part(0).clone())]),
            Some(vec![(0, short)]),
            Some(vec![(0, v.part(2).clone())]),
        ];
        assert!(matches!(
            s.exchange_contributions(contribs),
            Err(Error::Desync { .. })
        ));
        let contribs = vec![
            Some(vec![(0, v.part(0).clone())]),
            Some(vec![]),
            Some(vec![(0, v.part(2).clone())]),
        ];
        assert!(matches!(
            s.exchange_contributions(contribs),
            Err(Error::Desync { .. })
        ));
    }

    #[test]
    fn mask_reuse_detected() {
        let mut s = session();
        s.consume(4).unwrap();
        assert_eq!(s.consume(4), Err(Error::MaskReuse { id: 4 }));
    }

    #[test]
    fn inputs_reconstruct_and_open() {
        let mut s: Session<Z128> = Session::new(SessionConfig::default()).unwrap();
        let x = s.input(PartyId(1), &[2.5, -0.75]).unwrap();
        assert_eq!(x.reconstruct_f64(), vec![2.5, -0.75]);
        assert_eq!(s.open(&x).unwrap(), vec![2.5, -0.75]);
        let half = x.mul_const(0.5, 32).unwrap();
        let got = s.open_ring(&half).unwrap();
        assert_eq!(got[0].to_i128(), (1.25 * 65536.0) as i128);
    }

    #[test]
    fn dealer_sends_nothing_online() {
        let mut s = session();
        let x = s
            .share_input_raw(PartyId(0), &[Z64(3)], Scale::INTEGER)
            .unwrap();
        s.exchange_reveal(&[&x]).unwrap();
        let st = s.stats();
        assert_eq!(st.dealer_online_messages(), 0);
        assert_eq!(st.online_messages[..3], [2, 2, 2]);
    }

    #[test]
    fn transcript_records_frames() {
        let mut s = session();
        s.record_transcript();
        let x = s
            .share_input_raw(PartyId(0), &[Z64(3)], Scale::INTEGER)
            .unwrap();
        s.exchange_reveal(&[&x]).unwrap();
        assert_eq!(s.transcript().len(), 3);
        let sum: Z64 = s
            .transcript()
            .iter()
            .map(|f| f.elements::<Z64>().unwrap()[0])
            .sum();
        assert_eq!(sum, Z64(3));
    }

    #[test]
    fn empty_program_has_zero_stats() {
        let out = run_session::<Z64, _, _>(&SessionConfig::default(), |_| Ok(())).unwrap();
        assert_eq!(out.stats, RoundStats::new(3));
    }

    #[test]
    fn config_validation() {
        let bad = SessionConfig {
            n_parties: 1,
            ..Default::default()
        };
        assert!(Session::<Z64>::new(bad).is_err());
        let bad = SessionConfig {
            max_arity: 1,
            ..Default::default()
        };
        assert!(Session::<Z64>::new(bad).is_err());
        let bad = SessionConfig {
            precision_bits: 40,
            ..Default::default()
        };
        assert!(Session::<Z64>::new(bad).is_err());
    }

    #[test]
    fn labels_attribute_rounds() {
        let mut s = session();
        let x = s
            .share_input_raw(PartyId(0), &[Z64(3)], Scale::INTEGER)
            .unwrap();
        s.labeled("outer", |s| {
            s.labeled("inner", |s| s.exchange_reveal(&[&x]))
        })
        .unwrap();
        s.exchange_reveal(&[&x]).unwrap();
        let st = s.stats();
        assert_eq!(st.attribution["outer"].rounds, 1);
        assert_eq!(st.attribution["unlabeled"].rounds, 1);
        assert!(!st.attribution.contains_key("inner"));
    }
}
