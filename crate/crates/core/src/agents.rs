//! Explanation-selection agents.
//!
//! - [`pbe_agent`] discloses every alternative price, which is what a rational
//!   sender does in the disclosure game's equilibrium (see [`crate::game`]).
//! - [`random_agent`] shows one to four random explanations, never two that
//!   differ only in anchoring.
//! - [`axis_agent`] shows the explanations a trained [`MlpModel`] scores at
//!   0.5 or above.

use serde::{Deserialize, Serialize};

use rand::Rng;

use crate::error::{Error, Result};
use crate::explanations::{
    enumerate_descriptors, extract_features, format_minutes, format_money, render, Descriptor,
    RenderedExplanation, Scenario, DESCRIPTOR_COUNT,
};
use crate::mlp::MlpModel;
use crate::seed;

pub const SUBSET_SIZE: usize = 6;
/// Largest explanation count the random agent draws.
pub const RANDOM_MAX_SELECTION: usize = 4;
/// Probability at or above which the learned agent shows an explanation.
pub const SELECTION_THRESHOLD: f64 = 0.5;

/// The six explanations available to the learned selector, in output order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SelectionSubset(Vec<usize>);

impl SelectionSubset {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.len() != SUBSET_SIZE {
            return Err(Error::Config(format!(
                "selection subset needs {SUBSET_SIZE} explanations, got {}",
                indices.len()
            )));
        }
        for (i, &a) in indices.iter().enumerate() {
            if a >= DESCRIPTOR_COUNT {
                return Err(Error::Config(format!("unknown explanation index {a}")));
            }
            if indices[..i].contains(&a) {
                return Err(Error::Config(format!("explanation {a} listed twice")));
            }
        }
        Ok(Self(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn descriptors(&self) -> impl Iterator<Item = Descriptor> + '_ {
        self.0
            .iter()
            .map(|&i| Descriptor::from_index(i).expect("validated index"))
    }

    /// True when no two members differ only in anchoring.
    pub fn anchor_free(&self) -> bool {
        let ds: Vec<Descriptor> = self.descriptors().collect();
        ds.iter()
            .enumerate()
            .all(|(i, a)| ds[i + 1..].iter().all(|b| !a.anchor_twin_of(*b)))
    }
}

impl Default for SelectionSubset {
    /// Taxi cost (Δ, shared view), taxi cost (%, taxi view), taxi time
    /// (Δ, shared view), transit time (Δ, shared view), transit cost
    /// (%, transit view), CO2.
    fn default() -> Self {
        Self(vec![0, 3, 4, 12, 11, 16])
    }
}

impl TryFrom<Vec<usize>> for SelectionSubset {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl std::str::FromStr for SelectionSubset {
    type Err = Error;

    /// Comma-separated explanation indices, e.g. `0,3,4,12,11,16`.
    fn from_str(text: &str) -> Result<Self> {
        let indices = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("bad explanation index {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(indices)
    }
}

impl From<SelectionSubset> for Vec<usize> {
    fn from(s: SelectionSubset) -> Self {
        s.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Pbe,
    Random,
    Axis,
}

impl AgentKind {
    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Pbe => "pbe",
            AgentKind::Random => "random",
            AgentKind::Axis => "axis",
        }
    }
}

/// One factual statement about an alternative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fact {
    pub mode: crate::explanations::Mode,
    pub criterion: crate::explanations::Criterion,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentOutput {
    pub agent: AgentKind,
    pub scenario_id: u64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub facts: Vec<Fact>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub disclosures: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub selected: Vec<RenderedExplanation>,
}

impl AgentOutput {
    /// Explanations shown, or facts disclosed for the PBE agent.
    pub fn size(&self) -> usize {
        match self.agent {
            AgentKind::Pbe => self.facts.len(),
            _ => self.selected.len(),
        }
    }

    pub fn texts(&self) -> Vec<&str> {
        match self.agent {
            AgentKind::Pbe => self.disclosures.iter().map(String::as_str).collect(),
            _ => self.selected.iter().map(|e| e.text.as_str()).collect(),
        }
    }
}

/// Full disclosure: the taxi's and transit's cost and duration.
pub fn pbe_agent(s: &Scenario) -> AgentOutput {
    use crate::explanations::{Criterion, Mode};
    let q = &s.quote;
    AgentOutput {
        agent: AgentKind::Pbe,
        scenario_id: s.scenario_id,
        facts: vec![
            Fact {
                mode: Mode::Private,
                criterion: Criterion::Cost,
                value: q.private_cost_usd,
            },
            Fact {
                mode: Mode::Private,
                criterion: Criterion::Time,
                value: q.private_time_min,
            },
            Fact {
                mode: Mode::Public,
                criterion: Criterion::Cost,
                value: q.public_cost_usd,
            },
            Fact {
                mode: Mode::Public,
                criterion: Criterion::Time,
                value: q.public_time_min,
            },
        ],
        disclosures: vec![
            format!(
                "A private ride would have cost ${} and would have taken {} minutes.",
                format_money(q.private_cost_usd),
                format_minutes(q.private_time_min)
            ),
            format!(
                "Public transportation costs ${} and would have taken {} minutes.",
                format_money(q.public_cost_usd),
                format_minutes(q.public_time_min)
            ),
        ],
        selected: Vec::new(),
    }
}

/// Random baseline.
///
/// Draws a size uniformly from 1..=4, then draws explanations uniformly
/// without replacement from `pool`, discarding any that is the anchoring twin
/// of one already chosen or that has no defined value in this scenario. A
/// pool too small for the drawn size yields as many as it can. The generator
/// is derived from `(seed, scenario_id)`.
pub fn random_agent(s: &Scenario, seed: u64, pool: &[Descriptor]) -> Result<AgentOutput> {
    if pool.is_empty() {
        return Err(Error::Config("random agent needs a non-empty pool".into()));
    }
    let mut rng = seed::derived_rng(seed, s.scenario_id);
    let k = rng.gen_range(1..=RANDOM_MAX_SELECTION);
    let mut candidates = pool.to_vec();
    candidates.dedup();
    let mut chosen: Vec<Descriptor> = Vec::with_capacity(k);
    let mut selected = Vec::with_capacity(k);
    while selected.len() < k && !candidates.is_empty() {
        let d = candidates.swap_remove(rng.gen_range(0..candidates.len()));
        if chosen.iter().any(|c| *c == d || c.anchor_twin_of(d)) {
            continue;
        }
        if let Ok(e) = render(d, s) {
            chosen.push(d);
            selected.push(e);
        }
    }
    Ok(AgentOutput {
        agent: AgentKind::Random,
        scenario_id: s.scenario_id,
        facts: Vec::new(),
        disclosures: Vec::new(),
        selected,
    })
}

/// [`random_agent`] over all 17 explanations.
pub fn random_agent_default(s: &Scenario, seed: u64) -> Result<AgentOutput> {
    random_agent(s, seed, &enumerate_descriptors())
}

/// Learned selector.
///
/// Shows every subset explanation whose probability is at least 0.5, in
/// subset order. When none qualifies, the single most probable one is shown.
/// Explanations without a defined value in the scenario are skipped.
pub fn axis_agent(model: &MlpModel, subset: &SelectionSubset, s: &Scenario) -> Result<AgentOutput> {
    if model.input_width() != crate::explanations::FEATURE_COUNT
        || model.output_width() != subset.indices().len()
    {
        return Err(Error::Config(format!(
            "model maps {}→{} but the selector needs {}→{}",
            model.input_width(),
            model.output_width(),
            crate::explanations::FEATURE_COUNT,
            subset.indices().len()
        )));
    }
    let probs = model.forward(&extract_features(s).to_array())?;
    let rendered: Vec<Option<RenderedExplanation>> =
        subset.descriptors().map(|d| render(d, s).ok()).collect();

    let mut selected: Vec<RenderedExplanation> = probs
        .iter()
        .zip(&rendered)
        .filter(|(&p, _)| p >= SELECTION_THRESHOLD)
        .filter_map(|(_, e)| e.clone())
        .collect();
    if selected.is_empty() {
        let best = probs
            .iter()
            .zip(&rendered)
            .filter(|(_, e)| e.is_some())
            .fold(None::<(f64, &RenderedExplanation)>, |acc, (&p, e)| {
                let e = e.as_ref().expect("filtered");
                match acc {
                    Some((bp, _)) if bp >= p => acc,
                    _ => Some((p, e)),
                }
            });
        selected.extend(best.map(|(_, e)| e.clone()));
    }
    Ok(AgentOutput {
        agent: AgentKind::Axis,
        scenario_id: s.scenario_id,
        facts: Vec::new(),
        disclosures: Vec::new(),
        selected,
    })
}
