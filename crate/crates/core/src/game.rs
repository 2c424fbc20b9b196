//! The disclosure signaling game.
//!
//! Nature draws a price `x` of an alternative from a known prior on
//! `[min, max]`. The agent (sender) observes `x` and either says it or stays
//! quiet; it cannot lie. The passenger (receiver) then names an estimate
//! `a₂`. The agent's utility is `a₂`, the passenger's is `−(a₂ − x)²`.
//!
//! In every perfect Bayesian equilibrium the agent reveals every `x > min`,
//! the passenger echoes revealed values and answers silence with `min`, and
//! silence is believed to mean `min`. [`unravel`] replays the argument that
//! gets there: each round of "hide what is below the current guess" lowers
//! the guess until it reaches `min`.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for every equilibrium comparison.
pub const TOLERANCE: f64 = 1e-9;
/// Allowed deviation of a distribution's total mass from 1.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Finite distribution on strictly ascending support points with positive
/// probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    support: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    /// Sorts the points, merges duplicates and drops zero-probability points.
    /// The remaining mass must be 1 within [`MASS_TOLERANCE`].
    pub fn new(points: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let dist = Self::collect(points)?;
        let mass: f64 = dist.probs.iter().sum();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Validation(format!(
                "probabilities sum to {mass}, not 1"
            )));
        }
        Ok(dist)
    }

    /// Like [`new`](Self::new), but rescales non-negative weights to unit mass.
    pub fn from_weights(points: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut dist = Self::collect(points)?;
        let mass: f64 = dist.probs.iter().sum();
        dist.probs.iter_mut().for_each(|p| *p /= mass);
        Ok(dist)
    }

    fn collect(points: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut pts: Vec<(f64, f64)> = points.into_iter().collect();
        for &(x, p) in &pts {
            if !x.is_finite() {
                return Err(Error::Validation(format!(
                    "support value {x} is not finite"
                )));
            }
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::Validation(format!("probability {p} is invalid")));
            }
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut support: Vec<f64> = Vec::with_capacity(pts.len());
        let mut probs: Vec<f64> = Vec::with_capacity(pts.len());
        for (x, p) in pts {
            if p == 0.0 {
                continue;
            }
            if support.last() == Some(&x) {
                *probs.last_mut().expect("parallel vectors") += p;
            } else {
                support.push(x);
                probs.push(p);
            }
        }
        if support.is_empty() {
            return Err(Error::Validation("distribution has no mass".into()));
        }
        Ok(Self { support, probs })
    }

    pub fn point_mass(x: f64) -> Result<Self> {
        Self::new([(x, 1.0)])
    }

    pub fn uniform(values: &[f64]) -> Result<Self> {
        Self::from_weights(values.iter().map(|&v| (v, 1.0)))
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.support[0]
    }

    pub fn max(&self) -> f64 {
        self.support[self.support.len() - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.support.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(x, p)| x * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.iter().map(|(x, p)| p * (x - m) * (x - m)).sum()
    }

    /// Probability of exactly `x`.
    pub fn prob_of(&self, x: f64) -> f64 {
        self.support
            .iter()
            .position(|&s| s == x)
            .map_or(0.0, |i| self.probs[i])
    }

    /// Total-variation distance.
    pub fn total_variation(&self, other: &Self) -> f64 {
        let mut points: Vec<f64> = self.support.iter().chain(&other.support).copied().collect();
        points.sort_by(f64::total_cmp);
        points.dedup();
        0.5 * points
            .iter()
            .map(|&x| (self.prob_of(x) - other.prob_of(x)).abs())
            .sum::<f64>()
    }

    /// Applies `x ↦ scale·x + shift` with `scale > 0`.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        if scale.is_nan() || scale <= 0.0 {
            return Err(Error::Input("affine scale must be positive".into()));
        }
        Ok(Self {
            support: self.support.iter().map(|x| scale * x + shift).collect(),
            probs: self.probs.clone(),
        })
    }
}

/// Reads a prior from CSV rows `value,prob`.
pub fn load_prior(source: impl Read) -> Result<DiscreteDistribution> {
    #[derive(Deserialize)]
    struct Row {
        value: f64,
        prob: f64,
    }
    let mut points = Vec::new();
    for row in csv::Reader::from_reader(source).deserialize::<Row>() {
        let row = row?;
        points.push((row.value, row.prob));
    }
    DiscreteDistribution::new(points)
}

/// The passenger's belief about `x` after hearing silence.
pub type Belief = DiscreteDistribution;

/// Probability of saying `x`, for each point of the prior's support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SenderStrategy {
    pub reveal_prob: Vec<f64>,
}

impl SenderStrategy {
    pub fn from_fn(prior: &DiscreteDistribution, f: impl Fn(f64) -> f64) -> Self {
        Self {
            reveal_prob: prior.support().iter().map(|&x| f(x)).collect(),
        }
    }

    /// Reveals exactly the values strictly above `threshold`.
    pub fn threshold(prior: &DiscreteDistribution, threshold: f64) -> Self {
        Self::from_fn(prior, |x| if x > threshold { 1.0 } else { 0.0 })
    }

    fn check(&self, prior: &DiscreteDistribution) -> Result<()> {
        if self.reveal_prob.len() != prior.len() {
            return Err(Error::Input(format!(
                "sender strategy covers {} states, prior has {}",
                self.reveal_prob.len(),
                prior.len()
            )));
        }
        if self.reveal_prob.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Input(
                "reveal probabilities must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// How the receiver answers a revealed value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageResponse {
    /// Take the revealed value at face value.
    Identity,
    /// Ignore the message and answer a fixed estimate.
    Constant(f64),
}

impl MessageResponse {
    fn answer(self, revealed: f64) -> f64 {
        match self {
            MessageResponse::Identity => revealed,
            MessageResponse::Constant(c) => c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceiverStrategy {
    pub on_message: MessageResponse,
    pub on_quiet: f64,
}

impl ReceiverStrategy {
    pub fn echo(on_quiet: f64) -> Self {
        Self {
            on_message: MessageResponse::Identity,
            on_quiet,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PbeResult {
    pub sender: SenderStrategy,
    pub receiver: ReceiverStrategy,
    pub quiet_belief: Belief,
    /// At `x = min` saying and staying quiet pay the same.
    pub sender_indifferent_at_min: bool,
}

/// The estimate that maximizes expected `−(a − Y)²` under `belief`: its mean.
pub fn receiver_best_response(belief: &Belief) -> f64 {
    belief.mean()
}

/// The equilibrium: reveal above `min`, echo messages, answer silence with
/// `min`, believe silence means `min`. At `min` the sender is indifferent;
/// this returns the quiet action there.
pub fn compute_pbe(prior: &DiscreteDistribution) -> PbeResult {
    let min = prior.min();
    PbeResult {
        sender: SenderStrategy::from_fn(prior, |x| if x > min { 1.0 } else { 0.0 }),
        receiver: ReceiverStrategy::echo(min),
        quiet_belief: DiscreteDistribution::point_mass(min).expect("point mass is valid"),
        sender_indifferent_at_min: true,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "condition")]
pub enum Violation {
    /// Condition 1: at state `x` the sender's mix earns less than the best
    /// pure action.
    SenderNotBestResponse { x: f64, earned: f64, best: f64 },
    /// Condition 2: revealed values are not taken at face value.
    ReceiverIgnoresMessages,
    /// Condition 2: the answer to silence is not the belief's mean.
    ReceiverNotBestResponse { on_quiet: f64, belief_mean: f64 },
    /// Condition 2: the answer to silence lies outside `[min, max]`.
    ReceiverOutOfRange { on_quiet: f64 },
    /// Condition 3: the belief is not the Bayes posterior of silence.
    InconsistentBelief { total_variation: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn is_equilibrium(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Bayes posterior on silence, or `None` when silence has zero probability.
pub fn quiet_posterior(
    prior: &DiscreteDistribution,
    sender: &SenderStrategy,
) -> Option<DiscreteDistribution> {
    let weights: Vec<(f64, f64)> = prior
        .iter()
        .zip(&sender.reveal_prob)
        .map(|((x, p), r)| (x, p * (1.0 - r)))
        .collect();
    if weights.iter().map(|w| w.1).sum::<f64>() <= 0.0 {
        return None;
    }
    DiscreteDistribution::from_weights(weights).ok()
}

/// Checks the three equilibrium conditions and reports every failure.
pub fn verify_pbe(
    prior: &DiscreteDistribution,
    sender: &SenderStrategy,
    receiver: &ReceiverStrategy,
    quiet_belief: &Belief,
) -> Result<Verdict> {
    sender.check(prior)?;
    let mut violations = Vec::new();

    for (&x, &r) in prior.support().iter().zip(&sender.reveal_prob) {
        let say = receiver.on_message.answer(x);
        let quiet = receiver.on_quiet;
        let earned = r * say + (1.0 - r) * quiet;
        let best = say.max(quiet);
        if earned < best - TOLERANCE {
            violations.push(Violation::SenderNotBestResponse { x, earned, best });
        }
    }

    if receiver.on_message != MessageResponse::Identity {
        violations.push(Violation::ReceiverIgnoresMessages);
    }
    let on_quiet = receiver.on_quiet;
    if on_quiet < prior.min() - TOLERANCE || on_quiet > prior.max() + TOLERANCE {
        violations.push(Violation::ReceiverOutOfRange { on_quiet });
    }
    let belief_mean = receiver_best_response(quiet_belief);
    if (on_quiet - belief_mean).abs() > TOLERANCE {
        violations.push(Violation::ReceiverNotBestResponse {
            on_quiet,
            belief_mean,
        });
    }

    if let Some(posterior) = quiet_posterior(prior, sender) {
        let total_variation = posterior.total_variation(quiet_belief);
        if total_variation > TOLERANCE {
            violations.push(Violation::InconsistentBelief { total_variation });
        }
    }
    Ok(Verdict { violations })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unraveling {
    /// Answers to silence: `c₀ = E[X]`, then `cₖ₊₁ = E[X | X < cₖ]`.
    pub sequence: Vec<f64>,
    pub converged: bool,
}

impl Unraveling {
    pub fn last(&self) -> f64 {
        *self.sequence.last().expect("sequence starts with E[X]")
    }

    /// Number of updates performed.
    pub fn iterations(&self) -> usize {
        self.sequence.len() - 1
    }
}

/// Iterates the sender's best reply to the current answer to silence.
///
/// Given `cₖ` the sender hides exactly `{x < cₖ}` (indifference reveals) and
/// the receiver updates to the mean of the hidden set, or to `min` when that
/// set is `{min}` or empty. Stops at a fixed point or after `max_iters`
/// updates.
pub fn unravel(prior: &DiscreteDistribution, max_iters: usize) -> Unraveling {
    let min = prior.min();
    let mut c = prior.mean();
    let mut sequence = vec![c];
    for _ in 0..max_iters {
        if c == min {
            break;
        }
        let (mass, weighted) = prior
            .iter()
            .filter(|&(x, _)| x < c)
            .fold((0.0, 0.0), |(m, w), (x, p)| (m + p, w + x * p));
        let hidden_beyond_min = prior.iter().any(|(x, _)| x < c && x > min);
        let next = if mass == 0.0 || !hidden_beyond_min {
            min
        } else {
            weighted / mass
        };
        if next == c {
            break;
        }
        c = next;
        sequence.push(c);
    }
    Unraveling {
        sequence,
        converged: c == min,
    }
}

/// Expected utilities `(agent, passenger)` of a strategy profile.
pub fn expected_utilities(
    prior: &DiscreteDistribution,
    sender: &SenderStrategy,
    receiver: &ReceiverStrategy,
) -> Result<(f64, f64)> {
    sender.check(prior)?;
    let mut u1 = 0.0;
    let mut u2 = 0.0;
    for ((x, p), &r) in prior.iter().zip(&sender.reveal_prob) {
        let say = receiver.on_message.answer(x);
        let quiet = receiver.on_quiet;
        u1 += p * (r * say + (1.0 - r) * quiet);
        u2 -= p * (r * (say - x).powi(2) + (1.0 - r) * (quiet - x).powi(2));
    }
    Ok((u1, u2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPlay {
    pub threshold: f64,
    pub sender: SenderStrategy,
    pub receiver: ReceiverStrategy,
    pub agent_utility: f64,
    pub passenger_utility: f64,
}

/// A sender revealing exactly the values above `threshold`, against the
/// receiver whose answer to silence is the Bayes posterior mean (or `min`
/// when silence never happens).
pub fn simulate_threshold(prior: &DiscreteDistribution, threshold: f64) -> Result<ThresholdPlay> {
    let sender = SenderStrategy::threshold(prior, threshold);
    let on_quiet = quiet_posterior(prior, &sender).map_or(prior.min(), |b| b.mean());
    let receiver = ReceiverStrategy::echo(on_quiet);
    let (agent_utility, passenger_utility) = expected_utilities(prior, &sender, &receiver)?;
    Ok(ThresholdPlay {
        threshold,
        sender,
        receiver,
        agent_utility,
        passenger_utility,
    })
}
