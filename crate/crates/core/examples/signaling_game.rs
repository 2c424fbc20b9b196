//! The disclosure game on a small prior: the equilibrium, its check, the
//! unraveling sequence and what partial-disclosure senders would earn.
//!
//!     cargo run --example signaling_game

use ridex::game::{
    compute_pbe, simulate_threshold, unravel, verify_pbe, DiscreteDistribution, ReceiverStrategy,
};

fn main() -> ridex::Result<()> {
    // Possible savings of a taxi over the shared ride, in dollars.
    let prior = DiscreteDistribution::new([(2.0, 0.1), (4.0, 0.2), (6.0, 0.4), (9.0, 0.3)])?;
    println!(
        "prior over {:?} with mean {:.2}",
        prior.support(),
        prior.mean()
    );

    let pbe = compute_pbe(&prior);
    let verdict = verify_pbe(&prior, &pbe.sender, &pbe.receiver, &pbe.quiet_belief)?;
    println!(
        "equilibrium: reveal {:?}, answer silence with {}; verified = {}",
        pbe.sender.reveal_prob,
        pbe.receiver.on_quiet,
        verdict.is_equilibrium()
    );

    let optimistic = ReceiverStrategy::echo(prior.mean());
    let v = verify_pbe(&prior, &pbe.sender, &optimistic, &pbe.quiet_belief)?;
    println!("a receiver that answers silence with the prior mean breaks it:");
    for violation in &v.violations {
        println!("  {violation:?}");
    }

    let u = unravel(&prior, 100);
    println!("unraveling: {:?} (converged = {})", u.sequence, u.converged);

    println!("threshold senders against a Bayes-consistent receiver:");
    for t in [2.0, 4.0, 6.0, 9.0] {
        let play = simulate_threshold(&prior, t)?;
        println!(
            "  reveal above {t}: silence read as {:.2}, agent {:.3}, passenger {:.3}",
            play.receiver.on_quiet, play.agent_utility, play.passenger_utility
        );
    }
    Ok(())
}
