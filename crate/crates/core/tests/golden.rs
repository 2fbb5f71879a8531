//! Frozen outputs of the generator, the sampler and the runner. Any change
//! here breaks reproducibility of previously published runs.

use mdl_core::dynamics::{init_random_opinions, run_protocol, run_protocol_materialized, ExperimentConfig};
use mdl_core::graph::sample_gnp;
use mdl_core::rng::{derive_stream, SeedPath};

fn prefix(master: u64, trial: u64, round: u64) -> [u64; 4] {
    let mut s = derive_stream(SeedPath::new(master, trial, round));
    [s.next_u64(), s.next_u64(), s.next_u64(), s.next_u64()]
}

#[test]
fn stream_prefixes() {
    assert_eq!(
        prefix(0, 0, 0),
        [0xe314_3044_1fc6_50a1, 0x5da3_40f3_9bbf_460b, 0xd804_b4c9_f7f6_27f4, 0x19e1_dd27_6877_a925]
    );
    assert_eq!(
        prefix(0, 1, 0),
        [0xd369_d49d_d446_7733, 0x718e_d622_4bd2_5f08, 0x6710_3ac2_edf5_603c, 0x018f_6d09_1f5f_7849]
    );
    assert_eq!(
        prefix(7, 3, 2),
        [0xe8bf_169e_6f55_2213, 0x7e9d_4153_efdb_dedb, 0xe825_8909_fdf1_c61b, 0xf8b9_630c_871b_c55f]
    );
}

#[test]
fn seed_digests() {
    assert_eq!(SeedPath::new(0, 0, 0).digest(), 0xeeab_4be9_2c39_7f75);
    assert_eq!(SeedPath::new(0, 1, 0).digest(), 0x791d_1a91_d7ae_3abe);
    assert_eq!(SeedPath::new(7, 3, 2).digest(), 0x5065_c6c2_2a43_258d);
}

#[test]
fn initial_opinion_patterns() {
    let mut s = derive_stream(SeedPath::initial_state(0, 0));
    assert_eq!(init_random_opinions(4, &mut s).unwrap().to_bits(), "0101");
    let mut s = derive_stream(SeedPath::initial_state(0, 0));
    assert_eq!(
        init_random_opinions(64, &mut s).unwrap().to_bits(),
        "0101100010001110010011110010100111111001010001011000111001100111"
    );
}

#[test]
fn graph_edge_list() {
    let g = sample_gnp(8, 0.5, &mut derive_stream(SeedPath::new(1, 0, 0))).unwrap();
    assert_eq!(g.to_edge_list(), "8 11\n0 5\n0 6\n1 2\n1 4\n1 5\n1 6\n2 4\n3 4\n4 5\n4 6\n5 6\n");
}

/// n = 2, lambda = 0.5 (p ~ 0.354), seed 0, trial 0. Initial state 0101.
/// Round 1 graph {01, 03, 13}: agent 0 sees two ones and flips, agents 1 and
/// 3 tie and keep 1, agent 2 is isolated -> 1101. Round 2 graph {02, 13}:
/// agents 0 and 2 swap opinions -> 0111. Round 3 graph {13, 23}: agent 0 is
/// isolated, the rest see only ones -> 0111.
#[test]
fn tiny_trajectory() {
    let cfg = ExperimentConfig::new(2, 0.5, 3, 0);
    let (traj, graphs) = run_protocol_materialized(&cfg, 0).unwrap();
    assert_eq!(cfg.initial_state(0).unwrap().to_bits(), "0101");
    let edges: Vec<Vec<(usize, usize)>> = graphs.iter().map(|g| g.edges().collect()).collect();
    assert_eq!(edges, vec![vec![(0, 1), (0, 3), (1, 3)], vec![(0, 2), (1, 3)], vec![(1, 3), (2, 3)]]);
    assert_eq!(traj.zero_counts, vec![2, 1, 1, 1]);
    assert_eq!(run_protocol(&cfg, 0).unwrap(), traj);
}

#[test]
fn small_trajectories() {
    let runs: Vec<Vec<u64>> = (0..6)
        .map(|seed| run_protocol(&ExperimentConfig::new(2, 0.5, 3, seed), 0).unwrap().zero_counts)
        .collect();
    assert_eq!(
        runs,
        vec![
            vec![2, 1, 1, 1],
            vec![2, 2, 2, 2],
            vec![2, 2, 3, 3],
            vec![3, 3, 3, 3],
            vec![1, 1, 1, 0],
            vec![1, 0, 0, 0],
        ]
    );
    let traj = run_protocol(&ExperimentConfig::new(50, 1.0, 4, 11), 5).unwrap();
    assert_eq!(traj.zero_counts, vec![43, 30, 4, 0, 0]);
}
