mod common;

use proptest::prelude::*;
use rand::Rng;

use ridex::game::{
    compute_pbe, expected_utilities, receiver_best_response, simulate_threshold, unravel,
    verify_pbe, DiscreteDistribution, MessageResponse, ReceiverStrategy, SenderStrategy, Violation,
};

fn random_prior(r: &mut impl Rng) -> DiscreteDistribution {
    let k = r.gen_range(1..=10);
    let points: Vec<(f64, f64)> = (0..k)
        .map(|_| (r.gen_range(0..200) as f64 * 0.25, r.gen_range(0.05..1.0)))
        .collect();
    DiscreteDistribution::from_weights(points).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn equilibrium_verifies_and_unravels(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let prior = random_prior(&mut r);
        let pbe = compute_pbe(&prior);
        let v = verify_pbe(&prior, &pbe.sender, &pbe.receiver, &pbe.quiet_belief).unwrap();
        prop_assert!(v.is_equilibrium(), "{:?}", v);
        let u = unravel(&prior, 1000);
        prop_assert!(u.converged);
        prop_assert_eq!(u.last(), prior.min());
        prop_assert!(u.iterations() <= prior.len());
        for w in u.sequence.windows(2) {
            prop_assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn generous_silence_breaks_equilibrium(seed in any::<u64>(), bump in 0.01f64..5.0) {
        let mut r = common::rng(seed);
        let prior = random_prior(&mut r);
        let pbe = compute_pbe(&prior);
        let receiver = ReceiverStrategy::echo(prior.min() + bump);
        let v = verify_pbe(&prior, &pbe.sender, &receiver, &pbe.quiet_belief).unwrap();
        prop_assert!(!v.is_equilibrium());
    }

    #[test]
    fn best_response_is_the_grid_argmax(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let belief = random_prior(&mut r);
        let (lo, hi) = (belief.min(), belief.max());
        let step = 1e-4 * (hi - lo).max(1.0);
        let grid = common::grid_best_response(belief.support(), belief.probs(), lo, hi, step);
        prop_assert!((receiver_best_response(&belief) - grid).abs() <= step);
    }

    #[test]
    fn passenger_payoff_peaks_at_full_disclosure(seed in any::<u64>(), t_frac in 0.0f64..1.0) {
        let mut r = common::rng(seed);
        let prior = random_prior(&mut r);
        let t = prior.min() + t_frac * (prior.max() - prior.min());
        let play = simulate_threshold(&prior, t).unwrap();
        let full = simulate_threshold(&prior, prior.min()).unwrap();
        prop_assert!(full.passenger_utility.abs() < 1e-9);
        prop_assert!(play.passenger_utility <= full.passenger_utility + 1e-9);
        // Bayes-consistent answers to silence keep the agent's mean payoff.
        prop_assert!((play.agent_utility - prior.mean()).abs() < 1e-9);
    }
}

#[test]
fn hiding_high_values_is_not_a_best_response() {
    let prior = DiscreteDistribution::uniform(&[1.0, 2.0, 3.0]).unwrap();
    let pbe = compute_pbe(&prior);
    let hide_all = SenderStrategy::from_fn(&prior, |_| 0.0);
    let v = verify_pbe(&prior, &hide_all, &pbe.receiver, &pbe.quiet_belief).unwrap();
    assert!(v
        .violations
        .iter()
        .any(|x| matches!(x, Violation::SenderNotBestResponse { .. })));
}

#[test]
fn ignoring_messages_is_flagged() {
    let prior = DiscreteDistribution::uniform(&[1.0, 2.0, 3.0]).unwrap();
    let pbe = compute_pbe(&prior);
    let deaf = ReceiverStrategy {
        on_message: MessageResponse::Constant(2.0),
        on_quiet: 1.0,
    };
    let v = verify_pbe(&prior, &pbe.sender, &deaf, &pbe.quiet_belief).unwrap();
    assert!(v.violations.contains(&Violation::ReceiverIgnoresMessages));
}

#[test]
fn uniform_prior_unravels_step_by_step() {
    let prior = DiscreteDistribution::uniform(&[1.0, 2.0, 3.0]).unwrap();
    assert_eq!(unravel(&prior, 10).sequence, vec![2.0, 1.0]);
    let (agent, passenger) = expected_utilities(
        &prior,
        &compute_pbe(&prior).sender,
        &ReceiverStrategy::echo(1.0),
    )
    .unwrap();
    assert!((agent - 2.0).abs() < 1e-12);
    assert!(passenger.abs() < 1e-12);
}
