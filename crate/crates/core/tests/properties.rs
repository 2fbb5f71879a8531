use mdl_core::bounds::{binary_kl, c0, c1, clamp_probability, pinsker_lower, prop7_overshoot_bound, reverse_pinsker_upper};
use mdl_core::dynamics::{run_protocol, smp_round, ExperimentConfig, InitialState, Opinion, OpinionState, Redraw};
use mdl_core::graph::{sample_gnp, sample_gnp_bernoulli, GraphSample};
use mdl_core::monte_carlo::{run_trials, wilson_interval, EventSpec};
use mdl_core::rng::{derive_stream, SeedPath};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = (OpinionState, GraphSample, Vec<usize>)> {
    (1usize..=16, 0.1f64..0.9, any::<u64>()).prop_flat_map(|(half, p, seed)| {
        let v = 2 * half;
        (
            proptest::collection::vec(any::<bool>(), v),
            Just(p),
            Just(seed),
            Just((0..v).collect::<Vec<usize>>()).prop_shuffle(),
        )
            .prop_map(|(bits, p, seed, perm)| {
                let opinions = bits.into_iter().map(|b| if b { Opinion::One } else { Opinion::Zero }).collect();
                let state = OpinionState::from_opinions(opinions).unwrap();
                let graph = sample_gnp(state.len(), p, &mut derive_stream(SeedPath::new(seed, 0, 0))).unwrap();
                (state, graph, perm)
            })
    })
}

/// Materialises every `(zero neighbours, one neighbours)` pair first, then updates.
fn two_phase_round(state: &OpinionState, graph: &GraphSample) -> OpinionState {
    let counts: Vec<(usize, usize)> = (0..state.len())
        .map(|i| {
            let zeros = graph.neighbors(i).iter().filter(|&&j| state.get(j as usize) == Opinion::Zero).count();
            (zeros, graph.degree(i) - zeros)
        })
        .collect();
    let next = counts
        .iter()
        .enumerate()
        .map(|(i, &(z, o))| {
            if z > o {
                Opinion::Zero
            } else if o > z {
                Opinion::One
            } else {
                state.get(i)
            }
        })
        .collect();
    OpinionState::from_opinions(next).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn round_matches_two_phase_update((state, graph, _) in instance()) {
        prop_assert_eq!(smp_round(&state, &graph).unwrap(), two_phase_round(&state, &graph));
    }

    #[test]
    fn relabelling_commutes_with_a_round((state, graph, _) in instance()) {
        let direct = smp_round(&state, &graph).unwrap().flipped();
        prop_assert_eq!(smp_round(&state.flipped(), &graph).unwrap(), direct);
    }

    #[test]
    fn unanimity_is_absorbing((state, graph, _) in instance()) {
        let zeros = OpinionState::from_opinions(vec![Opinion::Zero; state.len()]).unwrap();
        prop_assert_eq!(smp_round(&zeros, &graph).unwrap(), zeros.clone());
        prop_assert_eq!(smp_round(&zeros.flipped(), &graph).unwrap(), zeros.flipped());
    }

    #[test]
    fn permutation_equivariance((state, graph, perm) in instance()) {
        let lhs = smp_round(&state.permuted(&perm), &graph.permuted(&perm).unwrap()).unwrap();
        prop_assert_eq!(lhs, smp_round(&state, &graph).unwrap().permuted(&perm));
    }

    #[test]
    fn sampled_graphs_are_simple(v in 1usize..200, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let g = sample_gnp(v, p, &mut derive_stream(SeedPath::new(seed, 1, 2))).unwrap();
        prop_assert!(g.check_invariants().is_ok());
        let naive = sample_gnp_bernoulli(v, p, &mut derive_stream(SeedPath::new(seed, 1, 2))).unwrap();
        prop_assert!(naive.check_invariants().is_ok());
    }

    #[test]
    fn trajectory_counts_stay_in_range(n in 1u64..60, lambda in 0.1f64..3.0, seed in any::<u64>(), fixed in any::<bool>()) {
        let lambda = lambda.min((n as f64).sqrt());
        let redraw = if fixed { Redraw::FixedGraph } else { Redraw::EveryRound };
        let cfg = ExperimentConfig::new(n, lambda, 4, seed).with_redraw(redraw);
        let traj = run_protocol(&cfg, 0).unwrap();
        prop_assert_eq!(traj.zero_counts.len(), 5);
        prop_assert!(traj.zero_counts.iter().all(|&z| z <= 2 * n));
    }

    #[test]
    fn forced_unanimity_persists(n in 1u64..40, seed in any::<u64>()) {
        let cfg = ExperimentConfig::new(n, 1.0, 3, seed).with_initial(InitialState::Forced { zeros: 2 * n });
        prop_assert_eq!(run_protocol(&cfg, 0).unwrap().zero_counts, vec![2 * n; 4]);
    }

    #[test]
    fn pinsker_sandwich(a in 0.0f64..=1.0, b in 0.05f64..=0.95) {
        let d = binary_kl(a, b);
        prop_assert!(d >= pinsker_lower(a, b));
        prop_assert!(d <= reverse_pinsker_upper(a, b));
    }

    #[test]
    fn kl_vanishes_only_on_the_diagonal(a in 0.0f64..=1.0, b in 0.01f64..=0.99) {
        let d = binary_kl(a, b);
        prop_assert!(d >= 0.0);
        prop_assert_eq!(d == 0.0, a == b);
    }

    #[test]
    fn clamp_is_idempotent(raw in -10.0f64..10.0) {
        let c = clamp_probability(raw);
        prop_assert!((0.0..=1.0).contains(&c));
        prop_assert_eq!(clamp_probability(c), c);
    }

    #[test]
    fn prop7_dominates_pinsker_relaxation(n in 10.0f64..1e6, frac in 0.0f64..1.0, p in 0.01f64..0.99) {
        let b_n = frac * n;
        let report = prop7_overshoot_bound(n, b_n, p).unwrap();
        let t = 0.5 + b_n / (2.0 * n);
        prop_assert!(report.raw_value <= (-4.0 * n * (t - p) * (t - p)).exp() * (1.0 + 1e-12));
    }

    #[test]
    fn constants_are_positive(x in 1e-3f64..10.0, lambda in 0.05f64..20.0) {
        prop_assert!(c0(x, lambda).unwrap() > 0.0);
        prop_assert!(c1(x, lambda).unwrap() >= 0.0);
    }

    #[test]
    fn wilson_contains_point_estimate(trials in 1u64..10_000, frac in 0.0f64..=1.0) {
        let s = (frac * trials as f64).floor() as u64;
        let (lo, hi) = wilson_interval(s, trials, 1.96).unwrap();
        let p = s as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= p + 1e-15 && p <= hi + 1e-15 && hi <= 1.0);
    }
}

#[test]
fn zero_count_events_are_monotone_in_threshold() {
    let cfg = ExperimentConfig::new(100, 1.0, 2, 77);
    let trajs = run_trials(&cfg, 200).unwrap();
    let count = |t: u64| {
        let ev = EventSpec::ZeroCountAtLeast { round: 1, threshold: t };
        trajs.iter().filter(|tr| ev.occurred(tr)).count()
    };
    let counts: Vec<usize> = (0..=200).step_by(5).map(count).collect();
    assert!(counts.windows(2).all(|w| w[1] <= w[0]), "{counts:?}");
}
