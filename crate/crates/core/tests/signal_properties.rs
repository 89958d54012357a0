use num_complex::Complex64;
use proptest::prelude::*;
use wavecast_core::signal::{
    mimo_triggered, received_phasor, snr_received_energy, snr_triggered, Sender,
};
use wavecast_core::{Point2, SenderSet, SignalParams};

fn sender() -> impl Strategy<Value = Sender> {
    (-6.0..6.0f64, -6.0..6.0f64, 0.1..2.0f64, 0.0..std::f64::consts::TAU)
        .prop_map(|(x, y, a, phi)| Sender::new(Point2::new(x, y), a, phi))
}

fn senders(max: usize) -> impl Strategy<Value = Vec<Sender>> {
    prop::collection::vec(sender(), 1..max)
}

fn set(v: Vec<Sender>) -> SenderSet {
    SenderSet::new(v).unwrap()
}

fn point() -> impl Strategy<Value = Point2> {
    (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y)| Point2::new(x, y))
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-12 * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn snr_never_loses_receivers_when_senders_are_added(
        base in senders(30),
        extra in senders(30),
        receivers in prop::collection::vec(point(), 1..40),
    ) {
        let params = SignalParams::default();
        let small = set(base);
        let large = small.union(&set(extra));
        for q in receivers {
            prop_assert!(snr_received_energy(&large, q, &params) >= snr_received_energy(&small, q, &params));
            if snr_triggered(&small, q, &params) {
                prop_assert!(snr_triggered(&large, q, &params));
            }
        }
    }

    #[test]
    fn phasor_is_additive_over_disjoint_sets(a in senders(40), b in senders(40), q in point()) {
        let params = SignalParams::default();
        let (a, b) = (set(a), set(b));
        let union = received_phasor(&a.union(&b), q, &params);
        let sum = received_phasor(&a, q, &params) + received_phasor(&b, q, &params);
        prop_assert!(close(union, sum), "{union} vs {sum}");
    }

    #[test]
    fn canonical_order_removes_permutation_effects(
        v in senders(60),
        shuffle_seed in any::<u64>(),
        q in point(),
    ) {
        let params = SignalParams::default();
        let mut shuffled = v.clone();
        let mut state = shuffle_seed;
        for i in (1..shuffled.len()).rev() {
            state = wavecast_core::rng::mix(state.wrapping_add(wavecast_core::rng::GAMMA));
            shuffled.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let (mut a, mut b) = (set(v), set(shuffled));
        a.canonicalize();
        b.canonicalize();
        prop_assert_eq!(received_phasor(&a, q, &params), received_phasor(&b, q, &params));
        prop_assert_eq!(snr_received_energy(&a, q, &params), snr_received_energy(&b, q, &params));
    }

    #[test]
    fn phasor_scales_linearly_with_amplitude(v in senders(30), k in 0.0..5.0f64, q in point()) {
        let params = SignalParams::default();
        let scaled: Vec<Sender> =
            v.iter().map(|s| Sender::new(s.position, s.amplitude * k, s.phase)).collect();
        let z = received_phasor(&set(v), q, &params) * k;
        prop_assert!(close(received_phasor(&set(scaled), q, &params), z));
    }
}

#[test]
fn adding_a_sender_can_silence_a_mimo_receiver() {
    let params = SignalParams::default();
    let q = Point2::new(0.0, 0.8);
    let a = Sender::new(Point2::new(-0.6, 0.0), 1.0, 0.0);
    let b = Sender::new(Point2::new(0.6, 0.0), 1.0, std::f64::consts::PI);
    let alone = set(vec![a]);
    let pair = set(vec![a, b]);
    assert!(mimo_triggered(&alone, q, &params));
    assert!(!mimo_triggered(&pair, q, &params));
    assert!(received_phasor(&pair, q, &params).norm() < 1e-12);
    assert!(snr_triggered(&pair, q, &params));
}
