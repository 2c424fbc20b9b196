//! A small fully connected network with logistic units everywhere.
//!
//! The selector uses a 7 → 8 → 7 → 6 chain. Inputs are standardized with
//! statistics stored in the model, outputs are independent per-explanation
//! probabilities, and training minimizes mean binary cross-entropy with plain
//! mini-batch gradient descent and early stopping on a validation split.
//!
//! No human-labelled selection data ships with this crate, so
//! [`synth_labels`] labels scenarios with a fixed threshold rule (the
//! "teacher"), optionally with label noise.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::agents::SelectionSubset;
use crate::error::{Error, Result};
use crate::explanations::{
    compute_value, extract_features, Descriptor, FeatureVector, Scenario, FEATURE_COUNT,
};
use crate::seed;

pub const DEFAULT_LAYER_SIZES: [usize; 4] = [7, 8, 7, 6];
pub const MIN_TRAINING_ROWS: usize = 20;

const MODEL_FORMAT: &str = "ridex-mlp";
const MODEL_VERSION: u32 = 1;
const ACTIVATION: &str = "logistic";
const PROB_CLIP: f64 = 1e-12;

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Network parameters plus the input standardization statistics.
///
/// `weights[l]` is row-major with shape `layer_sizes[l + 1] × layer_sizes[l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub layer_sizes: Vec<usize>,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    pub feature_means: Vec<f64>,
    pub feature_stds: Vec<f64>,
}

impl MlpModel {
    /// Glorot-uniform weights, zero biases, identity standardization.
    pub fn init(layer_sizes: &[usize], seed: u64) -> Result<Self> {
        if layer_sizes.len() < 2 || layer_sizes.contains(&0) {
            return Err(Error::Config(format!(
                "invalid layer sizes {layer_sizes:?}"
            )));
        }
        let mut rng = seed::rng(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for pair in layer_sizes.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            weights.push(
                (0..fan_in * fan_out)
                    .map(|_| rng.gen_range(-bound..=bound))
                    .collect(),
            );
            biases.push(vec![0.0; fan_out]);
        }
        Ok(Self {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
            feature_means: vec![0.0; layer_sizes[0]],
            feature_stds: vec![1.0; layer_sizes[0]],
        })
    }

    pub fn input_width(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_width(&self) -> usize {
        *self.layer_sizes.last().expect("at least two layers")
    }

    pub fn validate(&self) -> Result<()> {
        let sizes = &self.layer_sizes;
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(Error::Config(format!("invalid layer sizes {sizes:?}")));
        }
        if self.weights.len() != sizes.len() - 1 || self.biases.len() != sizes.len() - 1 {
            return Err(Error::Config(
                "layer count does not match layer sizes".into(),
            ));
        }
        for (l, pair) in sizes.windows(2).enumerate() {
            if self.weights[l].len() != pair[0] * pair[1] || self.biases[l].len() != pair[1] {
                return Err(Error::Config(format!(
                    "layer {l} parameters do not match {}→{}",
                    pair[0], pair[1]
                )));
            }
        }
        if self.feature_means.len() != sizes[0] || self.feature_stds.len() != sizes[0] {
            return Err(Error::Config(
                "normalization vectors do not match input width".into(),
            ));
        }
        if self
            .feature_stds
            .iter()
            .any(|&s| !(s > 0.0 && s.is_finite()))
        {
            return Err(Error::Config(
                "feature standard deviations must be positive".into(),
            ));
        }
        Ok(())
    }

    fn standardize(&self, features: &[f64]) -> Vec<f64> {
        features
            .iter()
            .zip(self.feature_means.iter().zip(&self.feature_stds))
            .map(|(x, (m, s))| (x - m) / s)
            .collect()
    }

    /// Activations of every layer, input (standardized) first.
    fn activations(&self, features: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = vec![self.standardize(features)];
        for (l, pair) in self.layer_sizes.windows(2).enumerate() {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let prev = &acts[l];
            let w = &self.weights[l];
            let out = (0..fan_out)
                .map(|o| {
                    let row = &w[o * fan_in..(o + 1) * fan_in];
                    let z =
                        self.biases[l][o] + row.iter().zip(prev).map(|(a, b)| a * b).sum::<f64>();
                    sigmoid(z)
                })
                .collect();
            acts.push(out);
        }
        acts
    }

    /// Output probabilities for one raw (unstandardized) feature vector.
    pub fn forward(&self, features: &[f64]) -> Result<Vec<f64>> {
        if features.len() != self.input_width() {
            return Err(Error::Config(format!(
                "model expects {} features, got {}",
                self.input_width(),
                features.len()
            )));
        }
        Ok(self.activations(features).pop().expect("output layer"))
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            format: MODEL_FORMAT.to_owned(),
            version: MODEL_VERSION,
            layer_sizes: self.layer_sizes.clone(),
            activation: ACTIVATION.to_owned(),
            weights: self.weights.clone(),
            biases: self.biases.clone(),
            feature_means: self.feature_means.clone(),
            feature_stds: self.feature_stds.clone(),
        };
        serde_json::to_string_pretty(&file).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let json_err = |e: serde_json::Error| Error::Parse {
            line: e.line() as u64,
            message: e.to_string(),
        };
        let value: serde_json::Value = serde_json::from_str(text).map_err(json_err)?;
        if value.get("format").and_then(|v| v.as_str()) != Some(MODEL_FORMAT) {
            return Err(Error::Validation("not a model file".into()));
        }
        let version = value.get("version").and_then(|v| v.as_u64());
        if version != Some(u64::from(MODEL_VERSION)) {
            return Err(Error::Version {
                what: "model",
                found: version.unwrap_or(0) as u32,
                expected: MODEL_VERSION,
            });
        }
        let file: ModelFile = serde_json::from_value(value).map_err(json_err)?;
        if file.activation != ACTIVATION {
            return Err(Error::Config(format!(
                "unsupported activation {:?}",
                file.activation
            )));
        }
        let model = Self {
            layer_sizes: file.layer_sizes,
            weights: file.weights,
            biases: file.biases,
            feature_means: file.feature_means,
            feature_stds: file.feature_stds,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn save(&self, mut sink: impl Write) -> Result<()> {
        sink.write_all(self.to_json().as_bytes())
            .map_err(|e| Error::io("<model>", e))
    }

    pub fn load(mut source: impl Read) -> Result<Self> {
        let mut text = String::new();
        source
            .read_to_string(&mut text)
            .map_err(|e| Error::io("<model>", e))?;
        Self::from_json(&text)
    }

    pub fn save_path(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Default-architecture model initialized from `seed`.
pub fn init(seed: u64) -> MlpModel {
    MlpModel::init(&DEFAULT_LAYER_SIZES, seed).expect("default layer sizes are valid")
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    layer_sizes: Vec<usize>,
    activation: String,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
    feature_means: Vec<f64>,
    feature_stds: Vec<f64>,
}

/// One raw input vector with its 0/1 targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub inputs: Vec<f64>,
    pub targets: Vec<f64>,
}

/// Same shapes as the model's weights and biases.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

fn bce(p: f64, y: f64) -> f64 {
    let p = p.clamp(PROB_CLIP, 1.0 - PROB_CLIP);
    -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
}

/// Mean binary cross-entropy over all examples and outputs.
pub fn loss(model: &MlpModel, batch: &[Example]) -> f64 {
    let k = model.output_width();
    let total: f64 = batch
        .iter()
        .map(|ex| {
            let out = model.activations(&ex.inputs).pop().expect("output layer");
            out.iter()
                .zip(&ex.targets)
                .map(|(&p, &y)| bce(p, y))
                .sum::<f64>()
        })
        .sum();
    total / (batch.len() * k) as f64
}

/// Loss and its exact gradient with respect to every weight and bias.
pub fn loss_and_gradient(model: &MlpModel, batch: &[Example]) -> Result<(f64, Gradients)> {
    if batch.is_empty() {
        return Err(Error::Input("empty batch".into()));
    }
    let layers = model.layer_sizes.len() - 1;
    let k = model.output_width();
    for ex in batch {
        if ex.inputs.len() != model.input_width() || ex.targets.len() != k {
            return Err(Error::Config(format!(
                "example shape {}→{} does not fit model {}→{}",
                ex.inputs.len(),
                ex.targets.len(),
                model.input_width(),
                k
            )));
        }
    }
    let scale = 1.0 / (batch.len() * k) as f64;
    let mut grads = Gradients {
        weights: model.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
        biases: model.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
    };
    let mut total = 0.0;

    for ex in batch {
        let acts = model.activations(&ex.inputs);
        let out = &acts[layers];
        // Logistic output with cross-entropy: dL/dz = p − y.
        let mut delta: Vec<f64> = out
            .iter()
            .zip(&ex.targets)
            .map(|(&p, &y)| {
                total += bce(p, y);
                (p - y) * scale
            })
            .collect();

        for l in (0..layers).rev() {
            let fan_in = model.layer_sizes[l];
            let prev = &acts[l];
            for (o, &d) in delta.iter().enumerate() {
                grads.biases[l][o] += d;
                let row = &mut grads.weights[l][o * fan_in..(o + 1) * fan_in];
                for (g, &a) in row.iter_mut().zip(prev) {
                    *g += d * a;
                }
            }
            if l > 0 {
                let w = &model.weights[l];
                delta = (0..fan_in)
                    .map(|i| {
                        let back: f64 = delta
                            .iter()
                            .enumerate()
                            .map(|(o, &d)| w[o * fan_in + i] * d)
                            .sum();
                        back * prev[i] * (1.0 - prev[i])
                    })
                    .collect();
            }
        }
    }
    Ok((total * scale, grads))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub validation_fraction: f64,
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            batch_size: 32,
            max_epochs: 2000,
            patience: 20,
            validation_fraction: 0.10,
            test_fraction: 0.40,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let frac_ok = |f: f64| f > 0.0 && f < 1.0;
        if !frac_ok(self.validation_fraction)
            || !frac_ok(self.test_fraction)
            || self.validation_fraction + self.test_fraction >= 1.0
        {
            return Err(Error::Config(format!(
                "split fractions {} + {} must lie in (0, 1) and sum below 1",
                self.validation_fraction, self.test_fraction
            )));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        if self.batch_size == 0 || self.max_epochs == 0 {
            return Err(Error::Config(
                "batch size and epoch budget must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// A scenario's features and the 0/1 selection of each subset explanation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledScenario {
    pub scenario_id: u64,
    pub features: FeatureVector,
    pub labels: Vec<u8>,
}

impl LabeledScenario {
    fn example(&self) -> Example {
        Example {
            inputs: self.features.to_array().to_vec(),
            targets: self.labels.iter().map(|&l| f64::from(l)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub validation_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub rows: usize,
    /// Fraction of individual (scenario, explanation) decisions that match.
    pub per_label_accuracy: f64,
    /// Fraction of scenarios whose whole selection matches.
    pub exact_match_accuracy: f64,
    pub label_accuracy: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub epochs: Vec<EpochStats>,
    pub best_epoch: usize,
    pub best_validation_loss: f64,
    pub stopped_early: bool,
    pub split: Split,
    pub test: Evaluation,
}

/// Accuracy of thresholded (≥ 0.5) predictions.
pub fn evaluate(model: &MlpModel, rows: &[LabeledScenario]) -> Result<Evaluation> {
    let k = model.output_width();
    let mut per_label = vec![0usize; k];
    let mut exact = 0;
    for row in rows {
        let probs = model.forward(&row.features.to_array())?;
        let mut all = true;
        for (j, (&p, &y)) in probs.iter().zip(&row.labels).enumerate() {
            if u8::from(p >= 0.5) == y {
                per_label[j] += 1;
            } else {
                all = false;
            }
        }
        exact += usize::from(all);
    }
    let n = rows.len().max(1) as f64;
    Ok(Evaluation {
        rows: rows.len(),
        per_label_accuracy: per_label.iter().sum::<usize>() as f64 / (n * k as f64),
        exact_match_accuracy: exact as f64 / n,
        label_accuracy: per_label.iter().map(|&c| c as f64 / n).collect(),
    })
}

fn split_indices(n: usize, cfg: &TrainConfig) -> Split {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::derived_rng(cfg.seed, 0));
    let n_test = (n as f64 * cfg.test_fraction).round() as usize;
    let n_val = (n as f64 * cfg.validation_fraction).round() as usize;
    let test = order[..n_test].to_vec();
    let validation = order[n_test..n_test + n_val].to_vec();
    let train = order[n_test + n_val..].to_vec();
    Split {
        train,
        validation,
        test,
    }
}

/// Per-feature mean and population standard deviation; a constant feature
/// gets deviation 1.
pub fn feature_statistics(rows: &[&LabeledScenario]) -> (Vec<f64>, Vec<f64>) {
    let n = rows.len() as f64;
    let mut means = vec![0.0; FEATURE_COUNT];
    for r in rows {
        for (m, x) in means.iter_mut().zip(r.features.to_array()) {
            *m += x;
        }
    }
    means.iter_mut().for_each(|m| *m /= n);
    let mut vars = [0.0; FEATURE_COUNT];
    for r in rows {
        for ((v, x), m) in vars.iter_mut().zip(r.features.to_array()).zip(&means) {
            *v += (x - m) * (x - m);
        }
    }
    let stds = vars
        .iter()
        .map(|v| {
            let s = (v / n).sqrt();
            if s > 1e-12 {
                s
            } else {
                1.0
            }
        })
        .collect();
    (means, stds)
}

/// Trains the default architecture on a 50/10/40 train/validation/test split
/// (fractions from `cfg`), restoring the best-validation weights.
pub fn train(data: &[LabeledScenario], cfg: &TrainConfig) -> Result<(MlpModel, TrainHistory)> {
    cfg.validate()?;
    if data.len() < MIN_TRAINING_ROWS {
        return Err(Error::Input(format!(
            "training needs at least {MIN_TRAINING_ROWS} rows, got {}",
            data.len()
        )));
    }
    let outputs = data[0].labels.len();
    if outputs == 0 || data.iter().any(|r| r.labels.len() != outputs) {
        return Err(Error::Input("rows carry inconsistent label widths".into()));
    }
    if data.iter().flat_map(|r| &r.labels).any(|&l| l > 1) {
        return Err(Error::Input("labels must be 0 or 1".into()));
    }

    let split = split_indices(data.len(), cfg);
    if split.train.is_empty() || split.validation.is_empty() {
        return Err(Error::Input(
            "split leaves no training or validation rows".into(),
        ));
    }
    let rows = |idx: &[usize]| idx.iter().map(|&i| &data[i]).collect::<Vec<_>>();
    let (train_rows, val_rows, test_rows) = (
        rows(&split.train),
        rows(&split.validation),
        rows(&split.test),
    );

    let mut sizes = DEFAULT_LAYER_SIZES.to_vec();
    *sizes.last_mut().expect("non-empty") = outputs;
    let mut model = MlpModel::init(&sizes, seed::mix(cfg.seed, 1))?;
    let (means, stds) = feature_statistics(&train_rows);
    model.feature_means = means;
    model.feature_stds = stds;

    let train_examples: Vec<Example> = train_rows.iter().map(|r| r.example()).collect();
    let val_examples: Vec<Example> = val_rows.iter().map(|r| r.example()).collect();

    let mut order: Vec<usize> = (0..train_examples.len()).collect();
    let mut rng = seed::derived_rng(cfg.seed, 2);
    let mut epochs = Vec::new();
    let mut best = (loss(&model, &val_examples), 0usize, model.clone());
    let mut waited = 0;
    let mut stopped_early = false;

    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<Example> = chunk.iter().map(|&i| train_examples[i].clone()).collect();
            let (_, grads) = loss_and_gradient(&model, &batch)?;
            for (w, g) in model.weights.iter_mut().zip(&grads.weights) {
                w.iter_mut()
                    .zip(g)
                    .for_each(|(w, g)| *w -= cfg.learning_rate * g);
            }
            for (b, g) in model.biases.iter_mut().zip(&grads.biases) {
                b.iter_mut()
                    .zip(g)
                    .for_each(|(b, g)| *b -= cfg.learning_rate * g);
            }
        }
        let validation_loss = loss(&model, &val_examples);
        epochs.push(EpochStats {
            epoch,
            train_loss: loss(&model, &train_examples),
            validation_loss,
        });
        if validation_loss < best.0 {
            best = (validation_loss, epoch, model.clone());
            waited = 0;
        } else {
            waited += 1;
            if waited >= cfg.patience {
                stopped_early = true;
                break;
            }
        }
    }

    let (best_validation_loss, best_epoch, model) = best;
    let test_rows: Vec<LabeledScenario> = test_rows.into_iter().cloned().collect();
    let test = evaluate(&model, &test_rows)?;
    Ok((
        model,
        TrainHistory {
            epochs,
            best_epoch,
            best_validation_loss,
            stopped_early,
            split,
            test,
        },
    ))
}

/// Per-explanation thresholds of the teacher rule: an explanation is
/// selected when its signed value reaches its threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeacherRule {
    pub thresholds: BTreeMap<usize, f64>,
    /// Used for explanations without an explicit threshold.
    pub fallback: f64,
}

impl Default for TeacherRule {
    fn default() -> Self {
        Self {
            thresholds: BTreeMap::from([
                // Taxi at least $3 dearer.
                (0, 3.0),
                // Taxi at least 50% dearer.
                (3, 50.0),
                // Shared ride at most 5 minutes slower than a taxi.
                (4, -5.0),
                // Transit at least 5 minutes slower.
                (12, 5.0),
                // Transit dearer at all.
                (11, 0.0),
                // At least 1 kg of CO2.
                (16, 1.0),
            ]),
            fallback: 0.0,
        }
    }
}

impl TeacherRule {
    pub fn threshold(&self, index: usize) -> f64 {
        self.thresholds
            .get(&index)
            .copied()
            .unwrap_or(self.fallback)
    }

    /// Undefined values (zero relative denominators) are never selected.
    pub fn select(&self, d: Descriptor, s: &Scenario) -> bool {
        compute_value(d, s).is_ok_and(|v| v >= self.threshold(d.index()))
    }

    pub fn validate(&self) -> Result<()> {
        if self
            .thresholds
            .values()
            .chain([&self.fallback])
            .any(|t| !t.is_finite())
        {
            return Err(Error::Input("teacher thresholds must be finite".into()));
        }
        Ok(())
    }
}

/// Labels every scenario with the teacher rule, then flips each label
/// independently with probability `noise_rate`.
pub fn synth_labels(
    scenarios: &[Scenario],
    subset: &SelectionSubset,
    rule: &TeacherRule,
    noise_rate: f64,
    seed: u64,
) -> Result<Vec<LabeledScenario>> {
    rule.validate()?;
    if !(0.0..0.5).contains(&noise_rate) {
        return Err(Error::Input(format!(
            "noise rate must lie in [0, 0.5), got {noise_rate}"
        )));
    }
    let mut rng = seed::rng(seed);
    Ok(scenarios
        .iter()
        .map(|s| {
            let labels = subset
                .descriptors()
                .map(|d| {
                    let clean = rule.select(d, s);
                    let flip = rng.gen::<f64>() < noise_rate;
                    u8::from(clean != flip)
                })
                .collect();
            LabeledScenario {
                scenario_id: s.scenario_id,
                features: extract_features(s),
                labels,
            }
        })
        .collect())
}

/// Writes labelled rows; label columns are named `label_d<index>` after the
/// subset's descriptor indices.
pub fn write_labeled(
    rows: &[LabeledScenario],
    subset: &SelectionSubset,
    sink: impl Write,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    let mut header = vec!["scenario_id".to_owned()];
    header.extend(FeatureVector::NAMES.iter().map(|s| s.to_string()));
    header.extend(subset.indices().iter().map(|i| format!("label_d{i}")));
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.scenario_id.to_string()];
        rec.extend(r.features.to_array().iter().map(|x| x.to_string()));
        rec.extend(r.labels.iter().map(|l| l.to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<labels>", e))
}

/// Reads rows written by [`write_labeled`], returning them with their subset.
pub fn read_labeled(source: impl Read) -> Result<(Vec<LabeledScenario>, SelectionSubset)> {
    let mut r = csv::Reader::from_reader(source);
    let header = r.headers()?.clone();
    let fixed = 1 + FEATURE_COUNT;
    let names_ok = header.get(0) == Some("scenario_id")
        && FeatureVector::NAMES
            .iter()
            .enumerate()
            .all(|(i, n)| header.get(i + 1) == Some(*n));
    if !names_ok || header.len() <= fixed {
        return Err(Error::Parse {
            line: 1,
            message: "unexpected labelled-data header".into(),
        });
    }
    let indices = header
        .iter()
        .skip(fixed)
        .map(|h| {
            h.strip_prefix("label_d")
                .and_then(|i| i.parse().ok())
                .ok_or_else(|| Error::Parse {
                    line: 1,
                    message: format!("bad label column {h:?}"),
                })
        })
        .collect::<Result<Vec<usize>>>()?;
    let subset = SelectionSubset::new(indices)?;

    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |what: &str| Error::Parse {
            line,
            message: format!("bad {what}"),
        };
        let scenario_id = rec[0].parse().map_err(|_| bad("scenario_id"))?;
        let mut feats = [0.0; FEATURE_COUNT];
        for (i, f) in feats.iter_mut().enumerate() {
            *f = rec[i + 1]
                .parse()
                .map_err(|_| bad(FeatureVector::NAMES[i]))?;
        }
        let labels = rec
            .iter()
            .skip(fixed)
            .map(|l| match l {
                "0" => Ok(0),
                "1" => Ok(1),
                _ => Err(bad("label")),
            })
            .collect::<Result<Vec<u8>>>()?;
        rows.push(LabeledScenario {
            scenario_id,
            features: FeatureVector::from_array(feats),
            labels,
        });
    }
    Ok((rows, subset))
}
