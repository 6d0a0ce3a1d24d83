//! Run configurations. Each command reads a JSON object whose keys mirror
//! its config struct; missing keys take the defaults below and unknown
//! keys are rejected. `--set key=value` overrides (dotted keys reach
//! nested tables) are applied after the file.

use std::{
    num::NonZeroUsize,
    path::{Path, PathBuf},
};

use relspec_core::{
    dendrite::{BatchSize, TrainConfig},
    signal::FilterSpec,
    Architecture,
};
use serde::{de::DeserializeOwned, Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::AppError;

/// Muscles in the order of the six-variable item table.
pub const TABLE_ORDER: [&str; 6] = ["FPL", "FDP", "EDC", "EPL", "EIP", "APL"];
pub const DEFAULT_MUSCLES: [&str; 6] = ["FDP", "EDC", "APL", "FPL", "EPL", "EIP"];
pub const DEFAULT_FINGERS: [&str; 6] =
    ["thumb_fe", "thumb_aa", "little", "ring", "middle", "index"];

pub trait CommandConfig: Serialize + DeserializeOwned + Default {
    fn validate(&self) -> Result<(), AppError> {
        Ok(())
    }
}

/// Default config, then `file`, then `--set` overrides, then `--seed`.
pub fn resolve<T: CommandConfig>(
    file: Option<&Path>,
    sets: &[String],
    seed: Option<u64>,
) -> Result<T, AppError> {
    let mut value = serde_json::to_value(T::default()).expect("configs serialize");
    if let Some(path) = file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Config(format!("{}: {e}", path.display())))?;
        let patch: Value = serde_json::from_str(&text)
            .map_err(|e| AppError::Config(format!("{}: {e}", path.display())))?;
        if !patch.is_object() {
            return Err(AppError::Config(format!(
                "{}: expected a JSON object",
                path.display()
            )));
        }
        merge(&mut value, patch);
    }
    for s in sets {
        let (key, raw) = s
            .split_once('=')
            .ok_or_else(|| AppError::Config(format!("--set {s:?}: expected key=value")))?;
        set_dotted(&mut value, key.trim(), parse_override(raw))?;
    }
    if let Some(seed) = seed {
        if let Some(obj) = value.as_object_mut().filter(|o| o.contains_key("seed")) {
            obj.insert("seed".into(), Value::from(seed));
        }
    }
    let cfg: T = serde_json::from_value(value).map_err(|e| AppError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// JSON when the text parses as JSON, otherwise a bare string.
fn parse_override(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn set_dotted(root: &mut Value, key: &str, v: Value) -> Result<(), AppError> {
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(AppError::Config(format!("--set: malformed key {key:?}")));
    }
    for part in &parts[..parts.len() - 1] {
        if node.is_null() {
            *node = Value::Object(Map::new());
        }
        node = node
            .as_object_mut()
            .ok_or_else(|| AppError::Config(format!("--set {key}: {part:?} is not a table")))?
            .entry(*part)
            .or_insert(Value::Null);
    }
    if node.is_null() {
        *node = Value::Object(Map::new());
    }
    let obj = node
        .as_object_mut()
        .ok_or_else(|| AppError::Config(format!("--set {key}: parent is not a table")))?;
    obj.insert(parts[parts.len() - 1].to_string(), v);
    Ok(())
}

/// `key = default` for every leaf of the default config, dotted.
pub fn describe_defaults<T: CommandConfig>() -> String {
    let mut lines = Vec::new();
    flatten(
        "",
        &serde_json::to_value(T::default()).expect("configs serialize"),
        &mut lines,
    );
    let mut out = String::from("Config keys (JSON file via --config, or --set key=value):\n");
    for l in lines {
        out.push_str("  ");
        out.push_str(&l);
        out.push('\n');
    }
    out
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, child, out);
            }
        }
        leaf => out.push(format!("{prefix} = {leaf}")),
    }
}

fn positive(name: &str, v: f64) -> Result<(), AppError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(AppError::Config(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

/// Either a row count or `"full"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchSpec(pub BatchSize);

impl Serialize for BatchSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            BatchSize::Full => s.serialize_str("full"),
            BatchSize::Rows(n) => s.serialize_u64(n.get() as u64),
        }
    }
}

impl<'de> Deserialize<'de> for BatchSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Rows(NonZeroUsize),
            Word(String),
        }
        match Raw::deserialize(d) {
            Ok(Raw::Rows(n)) => Ok(Self(BatchSize::Rows(n))),
            Ok(Raw::Word(w)) if w == "full" => Ok(Self(BatchSize::Full)),
            _ => Err(serde::de::Error::custom(
                "batch_size must be a positive integer or \"full\"",
            )),
        }
    }
}

/// Network shape and optimizer settings shared by `train` and `evaluate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// Number of Dendrite modules before the linear output layer.
    pub modules: usize,
    /// Width of every module.
    pub hidden_width: usize,
    pub residual: bool,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: BatchSpec,
    pub init_scale: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            modules: 2,
            hidden_width: 8,
            residual: false,
            learning_rate: t.learning_rate,
            epochs: t.epochs,
            batch_size: BatchSpec(t.batch_size),
            init_scale: t.init_scale,
        }
    }
}

impl ModelConfig {
    pub fn architecture(&self, input_dim: usize, outputs: usize) -> Result<Architecture, AppError> {
        let mut widths = vec![self.hidden_width; self.modules];
        widths.push(outputs);
        Architecture::new(input_dim, widths, vec![self.residual; self.modules])
            .map_err(|e| AppError::Config(e.to_string()))
    }

    pub fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            batch_size: self.batch_size.0,
            init_scale: self.init_scale,
            rng_seed: seed,
        }
    }

    fn validate(&self) -> Result<(), AppError> {
        if self.modules == 0 || self.hidden_width == 0 {
            return Err(AppError::Config(
                "model.modules and model.hidden_width must be at least 1".into(),
            ));
        }
        self.train_config(0)
            .validate()
            .map_err(|e| AppError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    /// Random two-module Dendrite Net cut to degree two.
    Dendrite,
    /// Every quadratic item drawn independently.
    Dense,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub seed: u64,
    pub duration_s: f64,
    pub sample_rate_hz: f64,
    pub emg_channels: Vec<String>,
    pub force_channels: Vec<String>,
    /// One per channel, or a single value for all.
    pub frequencies_hz: Vec<f64>,
    pub amplitudes: Vec<f64>,
    /// Random when absent.
    pub phases_rad: Option<Vec<f64>>,
    pub noise_sd: f64,
    pub emg_carrier: bool,
    pub system: SystemKind,
    pub system_width: usize,
    pub coefficient_scale: f64,
    /// Prefix of the variable names in `truth.json`, matching
    /// `preprocess.variable_prefix`.
    pub variable_prefix: String,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            duration_s: 30.0,
            sample_rate_hz: 1000.0,
            emg_channels: DEFAULT_MUSCLES.map(String::from).to_vec(),
            force_channels: DEFAULT_FINGERS.map(String::from).to_vec(),
            frequencies_hz: vec![0.1],
            amplitudes: vec![1.0],
            phases_rad: None,
            noise_sd: 0.0,
            emg_carrier: true,
            system: SystemKind::Dendrite,
            system_width: 8,
            coefficient_scale: 1.0,
            variable_prefix: "E_".into(),
        }
    }
}

impl SynthConfig {
    /// Expands a single-value list to one entry per channel.
    pub fn per_channel(&self, name: &str, v: &[f64]) -> Result<Vec<f64>, AppError> {
        let n = self.emg_channels.len();
        match v.len() {
            1 => Ok(vec![v[0]; n]),
            len if len == n => Ok(v.to_vec()),
            len => Err(AppError::Config(format!(
                "{name} has {len} entries for {n} channels"
            ))),
        }
    }
}

impl CommandConfig for SynthConfig {
    fn validate(&self) -> Result<(), AppError> {
        positive("duration_s", self.duration_s)?;
        positive("sample_rate_hz", self.sample_rate_hz)?;
        positive("coefficient_scale", self.coefficient_scale)?;
        if self.emg_channels.is_empty() || self.force_channels.is_empty() {
            return Err(AppError::Config(
                "emg_channels and force_channels must be nonempty".into(),
            ));
        }
        for f in self.per_channel("frequencies_hz", &self.frequencies_hz)? {
            positive("frequencies_hz", f)?;
        }
        self.per_channel("amplitudes", &self.amplitudes)?;
        if let Some(p) = &self.phases_rad {
            self.per_channel("phases_rad", p)?;
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(AppError::Config("noise_sd must be nonnegative".into()));
        }
        if self.system_width == 0 {
            return Err(AppError::Config("system_width must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub highpass_hz: f64,
    pub lowpass_hz: f64,
    pub notch_hz: f64,
    pub notch_q: f64,
    pub butterworth_order: usize,
    pub zero_phase: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        let f = FilterSpec::default();
        Self {
            highpass_hz: f.highpass_hz,
            lowpass_hz: f.lowpass_hz,
            notch_hz: f.notch_hz,
            notch_q: f.notch_q,
            butterworth_order: f.butterworth_order,
            zero_phase: f.zero_phase,
        }
    }
}

impl From<&FilterConfig> for FilterSpec {
    fn from(c: &FilterConfig) -> Self {
        FilterSpec {
            highpass_hz: c.highpass_hz,
            lowpass_hz: c.lowpass_hz,
            notch_hz: c.notch_hz,
            notch_q: c.notch_q,
            butterworth_order: c.butterworth_order,
            zero_phase: c.zero_phase,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    None,
    /// Divide every variable and target column by its largest magnitude.
    MaxAbs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessConfig {
    pub recording: PathBuf,
    /// Defaults to the recording's `.json` sidecar.
    pub manifest: Option<PathBuf>,
    pub apply_filters: bool,
    pub filter: FilterConfig,
    pub apply_envelope: bool,
    pub window_ms: f64,
    pub decimation: usize,
    pub normalize: Normalization,
    /// Prepended to each EMG channel name to form the variable name.
    pub variable_prefix: String,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            recording: "recording.csv".into(),
            manifest: None,
            apply_filters: true,
            filter: FilterConfig::default(),
            apply_envelope: true,
            window_ms: 250.0,
            decimation: 128,
            normalize: Normalization::None,
            variable_prefix: "E_".into(),
        }
    }
}

impl CommandConfig for PreprocessConfig {
    fn validate(&self) -> Result<(), AppError> {
        positive("window_ms", self.window_ms)?;
        if self.decimation == 0 {
            return Err(AppError::Config("decimation must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainCmdConfig {
    pub dataset: PathBuf,
    pub seed: u64,
    pub model: ModelConfig,
}

impl Default for TrainCmdConfig {
    fn default() -> Self {
        Self {
            dataset: "dataset.csv".into(),
            seed: 42,
            model: ModelConfig::default(),
        }
    }
}

impl CommandConfig for TrainCmdConfig {
    fn validate(&self) -> Result<(), AppError> {
        self.model.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExpandConfig {
    pub model: PathBuf,
    /// Variable display order by name. When absent, the six-muscle table
    /// order is used if the variables match it, else the model's order.
    pub variable_order: Option<Vec<String>>,
    /// Also write a view truncated at this degree.
    pub truncate_degree: Option<u32>,
    /// Dataset whose rows are checked: spectrum evaluation against the
    /// network's forward pass.
    pub verify_dataset: Option<PathBuf>,
}

impl Default for ExpandConfig {
    fn default() -> Self {
        Self {
            model: "model.json".into(),
            variable_order: None,
            truncate_degree: Some(2),
            verify_dataset: None,
        }
    }
}

impl CommandConfig for ExpandConfig {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeConfig {
    Contiguous,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateConfig {
    pub dataset: PathBuf,
    pub seed: u64,
    pub k: usize,
    pub scheme: SchemeConfig,
    pub model: ModelConfig,
}

impl Default for EvaluateConfig {
    fn default() -> Self {
        Self {
            dataset: "dataset.csv".into(),
            seed: 42,
            k: 10,
            scheme: SchemeConfig::Contiguous,
            model: ModelConfig::default(),
        }
    }
}

impl CommandConfig for EvaluateConfig {
    fn validate(&self) -> Result<(), AppError> {
        if self.k < 2 {
            return Err(AppError::Config(format!(
                "k must be at least 2, got {}",
                self.k
            )));
        }
        self.model.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeConfig {
    /// One spectrum file per subject.
    pub spectra: Vec<PathBuf>,
    /// Subject identifiers; the file stems when empty.
    pub subjects: Vec<String>,
    /// Items with `C_i` at or above this percentage are reported.
    pub threshold: f64,
    pub drop_constant: bool,
    pub l2_normalize: bool,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        Self {
            spectra: vec!["spectrum_deg2.json".into()],
            subjects: Vec::new(),
            threshold: 75.0,
            drop_constant: true,
            l2_normalize: false,
        }
    }
}

impl CommandConfig for AnalyzeConfig {
    fn validate(&self) -> Result<(), AppError> {
        if self.spectra.is_empty() {
            return Err(AppError::Config(
                "spectra must list at least one file".into(),
            ));
        }
        if !self.subjects.is_empty() && self.subjects.len() != self.spectra.len() {
            return Err(AppError::Config(format!(
                "{} subjects for {} spectra",
                self.subjects.len(),
                self.spectra.len()
            )));
        }
        if !(0.0..=100.0).contains(&self.threshold) {
            return Err(AppError::Config("threshold must lie in [0, 100]".into()));
        }
        Ok(())
    }
}
