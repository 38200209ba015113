use mixbandit::oracle::{chi_square_fit, chi_square_homogeneity};
use mixbandit::processes::{
    empirical_phi_profile, marginal_counts, phi_from_table, stationary_distribution, trajectory_seed, ArmProcess,
    ArmSpec,
};
use mixbandit::rewards::{exact_mu, monte_carlo_mu, BlockReward};
use proptest::prelude::*;

const CHAIN: [[f64; 2]; 2] = [[0.9, 0.1], [0.2, 0.8]];

fn shipped_arms() -> Vec<(&'static str, ArmProcess)> {
    let specs = [
        ("iid", ArmSpec::Iid { alphabet: vec![0.0, 0.5, 1.0], probs: vec![0.2, 0.3, 0.5], seed: 0 }),
        ("markov", ArmSpec::Markov { alphabet: vec![0.0, 1.0], matrix: CHAIN.iter().map(|r| r.to_vec()).collect(), seed: 0 }),
        (
            "markov3",
            ArmSpec::Markov {
                alphabet: vec![0.0, 0.5, 1.0],
                matrix: vec![vec![0.5, 0.3, 0.2], vec![0.1, 0.6, 0.3], vec![0.3, 0.3, 0.4]],
                seed: 0,
            },
        ),
        (
            "finite_range",
            ArmSpec::FiniteRange { alphabet: vec![0.0, 1.0], probs: vec![0.5, 0.5], order: 3, persistence: 0.7, seed: 0 },
        ),
    ];
    specs.iter().map(|(name, s)| (*name, s.build(17).unwrap())).collect()
}

fn rewards_for(m: usize) -> Vec<BlockReward> {
    let mut target = vec![1.0; m];
    target[0] = 0.0;
    let mut weights: Vec<f64> = (1..=m).map(|i| i as f64).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    // exact normalisation so validation accepts it
    let rest: f64 = weights[1..].iter().sum();
    weights[0] = 1.0 - rest;
    vec![
        BlockReward::BlockMean,
        BlockReward::BlockMax,
        BlockReward::PatternIndicator { target },
        BlockReward::WeightedMean { weights },
    ]
}

#[test]
fn stationarity_chi_square_every_arm_kind() {
    for (name, arm) in shipped_arms() {
        // X_1 against X_{1+s} for s in {1, 5, 20}
        let r = chi_square_homogeneity(&arm, &[1, 2, 6, 21], 100_000, 5).unwrap();
        assert!(r.p_value > 1e-3, "{name}: homogeneity p = {}", r.p_value);
        let counts = marginal_counts(&arm, 20, 100_000, 9);
        let fit = chi_square_fit(&counts, arm.marginal()).unwrap();
        assert!(fit.p_value > 1e-3, "{name}: marginal fit p = {}", fit.p_value);
    }
}

#[test]
fn empirical_phi_within_certified_profile() {
    for (name, arm) in shipped_arms() {
        for est in empirical_phi_profile(&arm, 12, 100_000, 3) {
            let cert = arm.profile().phi(est.lag);
            assert!(
                est.value <= cert + est.slack,
                "{name}: lag {} estimate {} exceeds {} + {}",
                est.lag,
                est.value,
                cert,
                est.slack
            );
        }
    }
}

#[test]
fn markov_stationary_law_solves_balance() {
    let p: Vec<Vec<f64>> = CHAIN.iter().map(|r| r.to_vec()).collect();
    let pi = stationary_distribution(&p).unwrap();
    assert!((pi[1] - 1.0 / 3.0).abs() < 1e-12);
    for j in 0..2 {
        let flow: f64 = (0..2).map(|i| pi[i] * p[i][j]).sum();
        assert!((flow - pi[j]).abs() < 1e-10);
    }
}

#[test]
fn finite_range_blocks_decouple_past_the_order() {
    let order = 3u64;
    let arm = ArmSpec::FiniteRange { alphabet: vec![0.0, 1.0], probs: vec![0.5, 0.5], order, persistence: 0.9, seed: 0 }
        .build(11)
        .unwrap();
    let (m, n) = (2usize, 100_000u64);
    for b in [order, order + 2] {
        // reward values of BlockMean on two symbols: 0, 0.5, 1
        let mut table = vec![vec![0u64; 3]; 3];
        for i in 0..n {
            let mut traj = arm.with_seed(trajectory_seed(99, i));
            let first = traj.emit(m);
            traj.skip(b);
            let second = traj.emit(m);
            let code = |blk: &[f64]| (blk.iter().sum::<f64>()).round() as usize;
            table[code(&first)][code(&second)] += 1;
        }
        let est = phi_from_table(1, &table, n);
        assert!(est.value <= 5.0 / (n as f64).sqrt(), "b = {b}: {}", est.value);
    }
    // without the gap the dependence is visible
    let mut table = vec![vec![0u64; 3]; 3];
    for i in 0..n {
        let mut traj = arm.with_seed(trajectory_seed(98, i));
        let first = traj.emit(m);
        let second = traj.emit(m);
        table[first.iter().sum::<f64>() as usize][second.iter().sum::<f64>() as usize] += 1;
    }
    assert!(phi_from_table(1, &table, n).value > 5.0 / (n as f64).sqrt());
}

#[test]
fn skip_then_emit_matches_emit() {
    for (name, arm) in shipped_arms() {
        for n in [0u64, 1, 4, 17] {
            let mut a = arm.with_seed(123);
            let mut b = arm.with_seed(123);
            a.skip(n);
            let x = a.emit(1)[0];
            let y = *b.emit(n as usize + 1).last().unwrap();
            assert_eq!(x, y, "{name}, n = {n}");
            assert_eq!(a.clock(), b.clock());
        }
        // emit(2), skip(1), emit(2) keeps raw indices 1, 2, 4, 5
        let mut a = arm.with_seed(7);
        let mut kept = a.emit(2);
        a.skip(1);
        kept.extend(a.emit(2));
        let full = arm.with_seed(7).emit(5);
        assert_eq!(kept, vec![full[0], full[1], full[3], full[4]], "{name}");
    }
}

#[test]
fn lipschitz_exhaustive_binary_alphabet() {
    for m in 1..=16usize {
        for reward in rewards_for(m) {
            for mask in 0u32..(1 << m) {
                let x: Vec<f64> = (0..m).map(|i| ((mask >> i) & 1) as f64).collect();
                let fx = reward.evaluate(m, &x).unwrap();
                assert!((0.0..=1.0).contains(&fx));
                for flip in 0..m {
                    let mut y = x.clone();
                    y[flip] = 1.0 - y[flip];
                    let fy = reward.evaluate(m, &y).unwrap();
                    assert!((fx - fy).abs() <= 1.0 + 1e-12, "{reward:?} m={m}");
                }
            }
        }
    }
}

#[test]
fn lipschitz_all_pairs_small_blocks() {
    for m in 1..=5usize {
        for reward in rewards_for(m) {
            let blocks: Vec<Vec<f64>> = (0u32..(1 << m))
                .map(|mask| (0..m).map(|i| ((mask >> i) & 1) as f64).collect())
                .collect();
            for x in &blocks {
                for y in &blocks {
                    let d = x.iter().zip(y).filter(|(a, b)| a != b).count() as f64;
                    let diff = (reward.evaluate(m, x).unwrap() - reward.evaluate(m, y).unwrap()).abs();
                    assert!(diff <= d + 1e-12);
                    if reward == BlockReward::BlockMean {
                        assert!(diff <= d / m as f64 + 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn exact_mu_agrees_with_monte_carlo() {
    let chain = ArmSpec::Markov { alphabet: vec![0.0, 1.0], matrix: CHAIN.iter().map(|r| r.to_vec()).collect(), seed: 0 }
        .build(1)
        .unwrap();
    for m in [1usize, 3] {
        for reward in rewards_for(m) {
            let exact = exact_mu(&reward, &chain, m).unwrap();
            let (mc, se) = monte_carlo_mu(&reward, &chain, m, 1_000_000, 42).unwrap();
            assert!((exact - mc).abs() <= 4.0 * se.max(1e-9), "{reward:?} m={m}: {exact} vs {mc} ± {se}");
        }
    }
    let mu = exact_mu(&BlockReward::BlockMean, &chain, 1).unwrap();
    assert!((mu - 1.0 / 3.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn block_mean_is_symbol_mean_on_iid(p in 0.01f64..0.99, m in 1usize..8) {
        let arm = ArmSpec::bernoulli(p).build(0).unwrap();
        let mu = exact_mu(&BlockReward::BlockMean, &arm, m).unwrap();
        prop_assert!((mu - p).abs() < 1e-9);
        let max = exact_mu(&BlockReward::BlockMax, &arm, m).unwrap();
        prop_assert!((max - (1.0 - (1.0 - p).powi(m as i32))).abs() < 1e-9);
    }

    #[test]
    fn seeded_streams_replay(seed in any::<u64>(), n in 1usize..200) {
        for (_, arm) in shipped_arms() {
            prop_assert_eq!(arm.with_seed(seed).emit(n), arm.with_seed(seed).emit(n));
        }
    }
}
