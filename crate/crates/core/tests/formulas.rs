use dtsch_core::link::{
    channel_gain, max_downlink_delay, max_uplink_delay, rate, received_power, required_tx_power, snr, tx_energy, upsilon,
    BacklogRate,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn upsilon_at_reference_ber() {
    // 1.5 / ln(20000) = 1.5 / 9.903487552536127
    let expected = 1.5 / 9.903_487_552_536_127;
    let u = upsilon(1e-5).unwrap();
    assert!((u - expected).abs() < 1e-12);
    assert!((u - 0.15147).abs() < 1e-4);
}

#[test]
fn power_rate_round_trip_over_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let p_tx = 10f64.powf(rng.gen_range(-6.0..0.0));
        let d = rng.gen_range(1.0..1000.0);
        let alpha = rng.gen_range(2.0..6.0);
        let omega = rng.gen_range(0.1..10.0);
        let h2 = rng.gen_range(0.01..5.0);
        let w = rng.gen_range(1e5..5e7);
        let n0 = 10f64.powf(rng.gen_range(-21.0..-17.0));
        let ber = 10f64.powf(rng.gen_range(-9.0..-1.5));
        let ups = upsilon(ber).unwrap();
        let gamma = snr(received_power(p_tx, omega, d, alpha).unwrap(), h2, n0, w).unwrap();
        let r = rate(w, ups, gamma).unwrap();
        if r < 1e-3 {
            continue;
        }
        let g = channel_gain(ups, omega, d, alpha, h2).unwrap();
        let back = required_tx_power(r, w, n0, g).unwrap();
        worst = worst.max(((back - p_tx) / p_tx).abs());
    }
    assert!(worst < 1e-9, "worst relative error {worst}");
}

#[test]
fn energy_is_power_times_airtime() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let p = rng.gen_range(0.0..1.0);
        let bits = rng.gen_range(1.0..1e7);
        let r = rng.gen_range(1e3..1e8);
        let e = tx_energy(p, bits, r).unwrap();
        let airtime = bits / r;
        assert!((e - p * airtime).abs() <= 1e-12 * (1.0 + p * airtime));
    }
    assert_eq!(tx_energy(0.5, 0.0, 0.0).unwrap(), 0.0);
}

#[test]
fn max_delay_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..500 {
        let k = rng.gen_range(0..20);
        let zeta = rng.gen_range(0.0..0.1);
        let nodes: Vec<BacklogRate> = (0..k)
            .map(|_| BacklogRate { backlog_bits: rng.gen_range(0.0..1e6), rate_bps: rng.gen_range(1e3..1e7) })
            .collect();
        let mut best = 0.0;
        for a in &nodes {
            let d = a.backlog_bits / a.rate_bps + zeta;
            if d > best {
                best = d;
            }
        }
        assert_eq!(max_uplink_delay(&nodes, zeta).unwrap(), best);
        assert_eq!(max_downlink_delay(&nodes, zeta).unwrap(), best);
    }
}
