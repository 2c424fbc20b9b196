//! The explanation taxonomy and its fixed-template rendering.
//!
//! A comparative explanation picks one factor from each of four classes: the
//! alternative mode, the comparison criterion, absolute or relative
//! visualization, and the anchoring perspective. That gives 16 comparative
//! explanations; a CO2 explanation makes 17. Each has a dense index, see
//! [`Descriptor::index`].

use std::collections::HashMap;
use std::io::{Read, Write};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pricing::TripQuote;

pub const DESCRIPTOR_COUNT: usize = 17;
pub const CO2_INDEX: usize = 16;
pub const FEATURE_COUNT: usize = 7;

const TEMPLATE_TABLE: &str = include_str!("../data/templates.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Private,
    Public,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Cost,
    Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Visualization {
    Absolute,
    Relative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    /// "The shared ride saved you …"
    SharedPerspective,
    /// "A private taxi would have cost … more."
    AlternativePerspective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Descriptor {
    Comparative {
        mode: Mode,
        criterion: Criterion,
        visualization: Visualization,
        anchor: Anchor,
    },
    Co2,
}

impl Descriptor {
    /// `8·mode + 4·criterion + 2·visualization + anchor`, or 16 for CO2.
    pub fn index(self) -> usize {
        match self {
            Descriptor::Comparative {
                mode,
                criterion,
                visualization,
                anchor,
            } => {
                8 * (mode == Mode::Public) as usize
                    + 4 * (criterion == Criterion::Time) as usize
                    + 2 * (visualization == Visualization::Relative) as usize
                    + (anchor == Anchor::AlternativePerspective) as usize
            }
            Descriptor::Co2 => CO2_INDEX,
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        match index {
            CO2_INDEX => Some(Descriptor::Co2),
            0..=15 => Some(Descriptor::Comparative {
                mode: if index & 8 == 0 {
                    Mode::Private
                } else {
                    Mode::Public
                },
                criterion: if index & 4 == 0 {
                    Criterion::Cost
                } else {
                    Criterion::Time
                },
                visualization: if index & 2 == 0 {
                    Visualization::Absolute
                } else {
                    Visualization::Relative
                },
                anchor: if index & 1 == 0 {
                    Anchor::SharedPerspective
                } else {
                    Anchor::AlternativePerspective
                },
            }),
            _ => None,
        }
    }

    /// True when the two differ only in their anchoring perspective.
    pub fn anchor_twin_of(self, other: Descriptor) -> bool {
        matches!(
            (self, other),
            (
                Descriptor::Comparative { .. },
                Descriptor::Comparative { .. }
            )
        ) && self.index() ^ other.index() == 1
    }

    /// Short label such as `private-cost-pct-p-s` or `co2`.
    pub fn label(self) -> String {
        match self {
            Descriptor::Comparative {
                mode,
                criterion,
                visualization,
                anchor,
            } => format!(
                "{}-{}-{}-{}",
                match mode {
                    Mode::Private => "private",
                    Mode::Public => "public",
                },
                match criterion {
                    Criterion::Cost => "cost",
                    Criterion::Time => "time",
                },
                match visualization {
                    Visualization::Absolute => "delta",
                    Visualization::Relative => "pct",
                },
                match anchor {
                    Anchor::SharedPerspective => "s-p",
                    Anchor::AlternativePerspective => "p-s",
                }
            ),
            Descriptor::Co2 => "co2".to_owned(),
        }
    }
}

/// All 17 descriptors, sorted by index.
pub fn enumerate_descriptors() -> Vec<Descriptor> {
    (0..DESCRIPTOR_COUNT)
        .map(|i| Descriptor::from_index(i).expect("index in range"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub scenario_id: u64,
    pub quote: TripQuote,
}

/// The seven selector inputs. Differences are alternative minus shared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub shared_cost_usd: f64,
    pub shared_time_min: f64,
    pub private_cost_minus_shared: f64,
    pub private_time_minus_shared: f64,
    pub public_cost_minus_shared: f64,
    pub public_time_minus_shared: f64,
    pub co2_saved_kg: f64,
}

impl FeatureVector {
    pub const NAMES: [&'static str; FEATURE_COUNT] = [
        "shared_cost_usd",
        "shared_time_min",
        "private_cost_minus_shared",
        "private_time_minus_shared",
        "public_cost_minus_shared",
        "public_time_minus_shared",
        "co2_saved_kg",
    ];

    pub fn to_array(self) -> [f64; FEATURE_COUNT] {
        [
            self.shared_cost_usd,
            self.shared_time_min,
            self.private_cost_minus_shared,
            self.private_time_minus_shared,
            self.public_cost_minus_shared,
            self.public_time_minus_shared,
            self.co2_saved_kg,
        ]
    }

    pub fn from_array(v: [f64; FEATURE_COUNT]) -> Self {
        Self {
            shared_cost_usd: v[0],
            shared_time_min: v[1],
            private_cost_minus_shared: v[2],
            private_time_minus_shared: v[3],
            public_cost_minus_shared: v[4],
            public_time_minus_shared: v[5],
            co2_saved_kg: v[6],
        }
    }
}

pub fn extract_features(s: &Scenario) -> FeatureVector {
    let q = &s.quote;
    FeatureVector {
        shared_cost_usd: q.shared_cost_usd,
        shared_time_min: q.shared_time_min,
        private_cost_minus_shared: q.private_cost_usd - q.shared_cost_usd,
        private_time_minus_shared: q.private_time_min - q.shared_time_min,
        public_cost_minus_shared: q.public_cost_usd - q.shared_cost_usd,
        public_time_minus_shared: q.public_time_min - q.shared_time_min,
        co2_saved_kg: q.co2_saved_kg,
    }
}

fn criterion_pair(q: &TripQuote, mode: Mode, criterion: Criterion) -> (f64, f64) {
    match (mode, criterion) {
        (Mode::Private, Criterion::Cost) => (q.private_cost_usd, q.shared_cost_usd),
        (Mode::Private, Criterion::Time) => (q.private_time_min, q.shared_time_min),
        (Mode::Public, Criterion::Cost) => (q.public_cost_usd, q.shared_cost_usd),
        (Mode::Public, Criterion::Time) => (q.public_time_min, q.shared_time_min),
    }
}

/// Signed content of an explanation; positive favours the shared ride.
///
/// Absolute: alternative − shared, in dollars or minutes. Relative: the same
/// difference as a percentage of the shared value (alternative perspective)
/// or of the alternative's value (shared perspective). CO2: kilograms saved.
pub fn compute_value(d: Descriptor, s: &Scenario) -> Result<f64> {
    let q = &s.quote;
    let Descriptor::Comparative {
        mode,
        criterion,
        visualization,
        anchor,
    } = d
    else {
        return Ok(q.co2_saved_kg);
    };
    let (alternative, shared) = criterion_pair(q, mode, criterion);
    let diff = alternative - shared;
    match visualization {
        Visualization::Absolute => Ok(diff),
        Visualization::Relative => {
            let denominator = match anchor {
                Anchor::AlternativePerspective => shared,
                Anchor::SharedPerspective => alternative,
            };
            if denominator == 0.0 || !denominator.is_finite() {
                return Err(Error::Undefined(format!(
                    "relative value of {} in scenario {} has denominator {denominator}",
                    d.label(),
                    s.scenario_id
                )));
            }
            Ok(diff / denominator * 100.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderedExplanation {
    pub descriptor: Descriptor,
    pub index: usize,
    pub value: f64,
    pub text: String,
}

impl RenderedExplanation {
    pub fn favorable(&self) -> bool {
        self.value >= 0.0
    }
}

pub fn render(d: Descriptor, s: &Scenario) -> Result<RenderedExplanation> {
    let value = compute_value(d, s)?;
    let magnitude = value.abs();
    let formatted = match d {
        Descriptor::Co2 => format!("{magnitude:.2}"),
        Descriptor::Comparative {
            visualization: Visualization::Relative,
            ..
        } => format_percent(magnitude),
        Descriptor::Comparative {
            criterion: Criterion::Cost,
            ..
        } => format_money(magnitude),
        Descriptor::Comparative {
            criterion: Criterion::Time,
            ..
        } => format_minutes(magnitude),
    };
    let mut text = template(d.index(), value >= 0.0).to_owned();
    if formatted == "1" {
        text = text.replace("{value} minutes", "{value} minute");
    }
    let text = text.replace("{value}", &formatted);
    Ok(RenderedExplanation {
        descriptor: d,
        index: d.index(),
        value,
        text,
    })
}

/// Two decimals with trailing zeros trimmed: 6.30 → "6.3", 7.00 → "7".
pub fn format_money(usd: f64) -> String {
    let s = format!("{usd:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

/// Whole percent, truncated toward zero.
pub fn format_percent(pct: f64) -> String {
    format!("{}", pct.trunc() as i64)
}

/// Whole minutes, rounded to nearest.
pub fn format_minutes(min: f64) -> String {
    format!("{}", min.round() as i64)
}

fn templates() -> &'static HashMap<(usize, bool), String> {
    static TABLE: OnceLock<HashMap<(usize, bool), String>> = OnceLock::new();
    TABLE.get_or_init(|| {
        parse_templates(TEMPLATE_TABLE).expect("bundled template table is well-formed")
    })
}

fn template(index: usize, favorable: bool) -> &'static str {
    &templates()[&(index, favorable)]
}

fn parse_templates(text: &str) -> Result<HashMap<(usize, bool), String>> {
    let mut table = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: lineno as u64 + 1,
            message,
        };
        let mut cols = line.splitn(3, '\t');
        let (Some(index), Some(polarity), Some(body)) = (cols.next(), cols.next(), cols.next())
        else {
            return Err(parse_err("expected three tab-separated columns".into()));
        };
        let index: usize = index
            .parse()
            .map_err(|_| parse_err(format!("bad index {index:?}")))?;
        let favorable = match polarity {
            "favorable" => true,
            "unfavorable" => false,
            other => return Err(parse_err(format!("bad polarity {other:?}"))),
        };
        table.insert((index, favorable), body.to_owned());
    }
    for i in 0..DESCRIPTOR_COUNT {
        for fav in [true, false] {
            if !table.contains_key(&(i, fav)) {
                return Err(Error::Validation(format!(
                    "template table lacks index {i} ({})",
                    if fav { "favorable" } else { "unfavorable" }
                )));
            }
        }
    }
    Ok(table)
}

/// Row layout of the scenarios CSV.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct ScenarioRow {
    scenario_id: u64,
    shared_cost_usd: f64,
    shared_time_min: f64,
    private_cost_usd: f64,
    private_time_min: f64,
    public_cost_usd: f64,
    public_time_min: f64,
    co2_saved_kg: f64,
}

impl From<&Scenario> for ScenarioRow {
    fn from(s: &Scenario) -> Self {
        let q = s.quote;
        Self {
            scenario_id: s.scenario_id,
            shared_cost_usd: q.shared_cost_usd,
            shared_time_min: q.shared_time_min,
            private_cost_usd: q.private_cost_usd,
            private_time_min: q.private_time_min,
            public_cost_usd: q.public_cost_usd,
            public_time_min: q.public_time_min,
            co2_saved_kg: q.co2_saved_kg,
        }
    }
}

impl From<ScenarioRow> for Scenario {
    fn from(r: ScenarioRow) -> Self {
        Scenario {
            scenario_id: r.scenario_id,
            quote: TripQuote {
                shared_cost_usd: r.shared_cost_usd,
                shared_time_min: r.shared_time_min,
                private_cost_usd: r.private_cost_usd,
                private_time_min: r.private_time_min,
                public_cost_usd: r.public_cost_usd,
                public_time_min: r.public_time_min,
                co2_saved_kg: r.co2_saved_kg,
            },
        }
    }
}

pub fn read_scenarios(source: impl Read) -> Result<Vec<Scenario>> {
    let mut out = Vec::new();
    for row in csv::Reader::from_reader(source).deserialize::<ScenarioRow>() {
        out.push(row?.into());
    }
    Ok(out)
}

pub fn write_scenarios(scenarios: &[Scenario], sink: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    for s in scenarios {
        w.serialize(ScenarioRow::from(s))?;
    }
    w.flush().map_err(|e| Error::io("<scenarios>", e))
}
