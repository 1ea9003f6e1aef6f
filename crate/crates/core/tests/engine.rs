use std::collections::BTreeMap;

use mvbeaver::engine::Frame;
use mvbeaver::protocols::mul;
use mvbeaver::{NetProfile, PartyId, RoundStats, Scale, Session, SessionConfig, Shared, Z64};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn session(coalesce: bool) -> Session<Z64> {
    Session::new(SessionConfig {
        coalesce,
        ..Default::default()
    })
    .unwrap()
}

/// `m` independent reveals, each marked as its own item.
fn reveal_workload(coalesce: bool, m: usize) -> (Vec<Vec<Z64>>, RoundStats) {
    let mut s = session(coalesce);
    let items: Vec<Shared<Z64>> = (0..m)
        .map(|i| {
            let v: Vec<Z64> = (0..=i as u64).map(|k| Z64(k * 7 + i as u64)).collect();
            s.share_input_raw(PartyId(i % 3), &v, Scale::INTEGER)
                .unwrap()
        })
        .collect();
    let mut tickets = Vec::new();
    for item in &items {
        tickets.push(s.defer_reveal(item).unwrap());
        s.item_boundary().unwrap();
    }
    s.flush().unwrap();
    let opened = tickets.into_iter().map(|t| s.redeem(t).unwrap()).collect();
    (opened, s.stats())
}

#[test]
fn coalescing_preserves_payloads() {
    for m in [2, 5, 10] {
        let (on, on_stats) = reveal_workload(true, m);
        let (off, off_stats) = reveal_workload(false, m);
        assert_eq!(on, off);
        assert_eq!(on_stats.online_bytes, off_stats.online_bytes);
        assert_eq!(on_stats.online_rounds, 1);
        assert_eq!(off_stats.online_rounds, m as u64);
    }
}

#[test]
fn flushing_nothing_costs_nothing() {
    let mut s = session(true);
    s.flush().unwrap();
    assert!(s.exchange_reveal(&[]).unwrap().is_empty());
    assert_eq!(s.stats().online_rounds, 0);
}

#[test]
fn clock_examples() {
    let mut stats = RoundStats::new(3);
    assert_eq!(stats.advance_clock(0, &NetProfile::n_high()), 40.0);
    let dt = stats.advance_clock(1 << 20, &NetProfile::n_low());
    let transfer = (1u64 << 20) as f64 * 8.0 / 1e9 * 1e3;
    assert!((dt - (0.1 + transfer)).abs() < 1e-9);
    assert!((transfer - 8.389).abs() < 1e-3);
    let mut med = RoundStats::new(3);
    med.advance_clock(100, &NetProfile::n_med());
    med.advance_clock(100, &NetProfile::n_med());
    assert!(
        (med.simulated_time_ms - (10.0 + 2.0 * NetProfile::n_med().transfer_ms(100))).abs() < 1e-12
    );
}

#[test]
fn time_decomposes_into_latency_and_transfer() {
    let mut s: Session<Z64> = Session::new(SessionConfig {
        net: NetProfile::n_med(),
        ..Default::default()
    })
    .unwrap();
    let x = s.input(PartyId(0), &[1.5; 64]).unwrap();
    let y = mul(&mut s, &x, &x).unwrap();
    s.open(&y).unwrap();
    let st = s.stats();
    assert_eq!(st.online_rounds, 2);
    assert!((st.simulated_time_ms - (st.latency_time_ms + st.transfer_time_ms)).abs() < 1e-12);
    assert!((st.latency_time_ms - 10.0).abs() < 1e-12);
    assert_eq!(st.dealer_online_messages(), 0);
}

/// Opened `x − a` values of the first half of every reveal frame group.
fn opened_first_inputs(frames: &[Frame], len: usize) -> Vec<Z64> {
    let mut by_corr: BTreeMap<u64, Vec<Z64>> = BTreeMap::new();
    for f in frames {
        let e = f.elements::<Z64>().unwrap();
        let acc = by_corr
            .entry(f.correlation)
            .or_insert_with(|| vec![Z64(0); e.len()]);
        for (a, v) in acc.iter_mut().zip(e) {
            *a += v;
        }
    }
    by_corr.into_values().next().unwrap()[..len].to_vec()
}

fn low_byte_counts(values: &[Z64]) -> [u64; 256] {
    let mut c = [0u64; 256];
    for v in values {
        c[(v.0 & 0xff) as usize] += 1;
    }
    c
}

#[test]
fn revealed_differences_look_uniform() {
    const N: usize = 10_000;
    let mut hists = Vec::new();
    for secret in [3u64, 200] {
        let mut s = session(true);
        s.record_transcript();
        let x = s
            .share_input_raw(PartyId(0), &vec![Z64(secret); N], Scale::INTEGER)
            .unwrap();
        let y = s
            .share_input_raw(PartyId(1), &vec![Z64(1); N], Scale::INTEGER)
            .unwrap();
        mul(&mut s, &x, &y).unwrap();
        let deltas = opened_first_inputs(s.transcript(), N);
        let counts = low_byte_counts(&deltas);
        let e = N as f64 / 256.0;
        let stat: f64 = counts.iter().map(|c| (*c as f64 - e).powi(2) / e).sum();
        assert!(
            stat < ChiSquared::new(255.0).unwrap().inverse_cdf(0.99),
            "chi2 {stat}"
        );
        hists.push(counts);
    }
    // Two-sample homogeneity over the 2 × 256 table.
    let stat: f64 = (0..256)
        .map(|b| {
            let (a, c) = (hists[0][b] as f64, hists[1][b] as f64);
            if a + c == 0.0 {
                0.0
            } else {
                (a - c).powi(2) / (a + c)
            }
        })
        .sum();
    assert!(
        stat < ChiSquared::new(255.0).unwrap().inverse_cdf(0.99),
        "two-sample {stat}"
    );
}
