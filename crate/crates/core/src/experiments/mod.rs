//! Monte Carlo campaigns over the transfer length, plus the closed-form
//! detection model and key-capacity tables.

mod output;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversary::{BasisPolicy, RepeaterBehavior};
use crate::key::{capacity, rounds_per_pass, KeyMaterial, ScheduleConfig, MAX_TRANSFER_LENGTH};
use crate::netsim::{derive_seed, run_trial_detailed, KeySource, NetsimError, SessionTemplate, Topology, TrialOptions, TrialRecord};
use crate::protocol::PayloadDistribution;

pub use output::{emit, emit_to_path, format_sig6, parse_metrics_csv, OutputFormat, CSV_HEADER};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Reference success rates for T = 1..=5 under the random-basis interceptor.
pub const REFERENCE_DETECTION: [f64; 5] = [1.0, 1.0, 1.0, 0.995, 0.965];

/// Reference overhead ratios for T = 1..=5 with 100 data qubits. Under uniform
/// random keys these are not reachable; they are printed next to the measured
/// values only for comparison.
pub const REFERENCE_OVERHEAD: [f64; 5] = [0.64, 0.37, 0.20, 0.10, 0.04];

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("trial {index} (T={transfer_length}) failed: {source}")]
    Trial {
        index: usize,
        transfer_length: u32,
        source: NetsimError,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl ExperimentError {
    pub fn is_config(&self) -> bool {
        matches!(self, ExperimentError::Config(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Fig2Success,
    Fig3Rounds,
    Fig4Leakage,
    Fig5Overhead,
    Analytic,
    Capacity,
    Custom,
}

impl ExperimentKind {
    pub fn default_data_target(self) -> u64 {
        match self {
            ExperimentKind::Fig5Overhead => 100,
            _ => 150,
        }
    }

    pub fn default_adversary(self) -> RepeaterBehavior {
        match self {
            ExperimentKind::Fig5Overhead | ExperimentKind::Custom => RepeaterBehavior::Honest,
            _ => RepeaterBehavior::InterceptResend {
                policy: BasisPolicy::RandomZx,
            },
        }
    }

    fn reference(self, transfer_length: u32) -> Option<f64> {
        let table = match self {
            ExperimentKind::Fig2Success => &REFERENCE_DETECTION,
            ExperimentKind::Fig5Overhead => &REFERENCE_OVERHEAD,
            _ => return None,
        };
        table.get(transfer_length.checked_sub(1)? as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Fig2Success => "fig2_success",
            ExperimentKind::Fig3Rounds => "fig3_rounds",
            ExperimentKind::Fig4Leakage => "fig4_leakage",
            ExperimentKind::Fig5Overhead => "fig5_overhead",
            ExperimentKind::Analytic => "analytic",
            ExperimentKind::Capacity => "capacity",
            ExperimentKind::Custom => "custom",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Adversary names accepted on the command line.
pub fn parse_adversary(s: &str) -> Result<RepeaterBehavior, String> {
    match s.to_ascii_lowercase().replace('_', "-").as_str() {
        "honest" | "none" => Ok(RepeaterBehavior::Honest),
        "random-zx" | "random" | "intercept" => Ok(RepeaterBehavior::InterceptResend {
            policy: BasisPolicy::RandomZx,
        }),
        "always-z" | "z" => Ok(RepeaterBehavior::InterceptResend {
            policy: BasisPolicy::AlwaysZ,
        }),
        "always-x" | "x" => Ok(RepeaterBehavior::InterceptResend {
            policy: BasisPolicy::AlwaysX,
        }),
        other => Err(format!("unknown adversary {other:?} (expected honest, random-zx, always-z or always-x)")),
    }
}

fn default_transfer_lengths() -> Vec<u32> {
    vec![1, 2, 3, 4, 5]
}

fn default_trials() -> usize {
    200
}

fn default_key_length() -> usize {
    1024
}

fn default_seed() -> u64 {
    2024
}

fn default_analytic_rounds() -> u32 {
    7
}

fn default_topology() -> Topology {
    Topology::chain(1)
}

/// Everything one campaign needs. Fields left out of a JSON config take the
/// experiment's defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "default_transfer_lengths")]
    pub transfer_lengths: Vec<u32>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// `None` means the experiment's default (150, or 100 for overhead).
    #[serde(default)]
    pub data_target: Option<u64>,
    #[serde(default)]
    pub adversary: Option<RepeaterBehavior>,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default = "default_key_length")]
    pub key_length: usize,
    /// Fixed key for every trial instead of fresh random bits.
    #[serde(default)]
    pub key: Option<KeyMaterial>,
    #[serde(default = "default_topology")]
    pub topology: Topology,
    #[serde(default)]
    pub malicious_node: Option<String>,
    #[serde(default)]
    pub reverse_auth: bool,
    #[serde(default)]
    pub encoding_index: u8,
    #[serde(default)]
    pub payload: PayloadDistribution,
    #[serde(default = "default_analytic_rounds")]
    pub analytic_rounds: u32,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            transfer_lengths: default_transfer_lengths(),
            trials: default_trials(),
            data_target: None,
            adversary: None,
            master_seed: default_seed(),
            format: OutputFormat::default(),
            key_length: default_key_length(),
            key: None,
            topology: default_topology(),
            malicious_node: None,
            reverse_auth: false,
            encoding_index: 0,
            payload: PayloadDistribution::default(),
            analytic_rounds: default_analytic_rounds(),
        }
    }

    pub fn data_target(&self) -> u64 {
        self.data_target.unwrap_or_else(|| self.experiment.default_data_target())
    }

    pub fn adversary(&self) -> RepeaterBehavior {
        self.adversary.unwrap_or_else(|| self.experiment.default_adversary())
    }

    fn key_len(&self) -> usize {
        self.key.as_ref().map_or(self.key_length, KeyMaterial::len)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |msg: String| Err(ExperimentError::Config(msg));
        if self.transfer_lengths.is_empty() {
            return bad("transfer length list is empty".into());
        }
        if let Some(t) = self.transfer_lengths.iter().find(|t| !(1..=MAX_TRANSFER_LENGTH).contains(t)) {
            return bad(format!("transfer length {t} outside 1..={MAX_TRANSFER_LENGTH}"));
        }
        let max_t = *self.transfer_lengths.iter().max().expect("nonempty") as usize;
        match self.experiment {
            ExperimentKind::Analytic => {
                if self.analytic_rounds == 0 {
                    return bad("analytic table needs at least one round".into());
                }
            }
            ExperimentKind::Capacity => {
                if self.key_len() < max_t {
                    return bad(format!("key length {} is shorter than transfer length {max_t}", self.key_len()));
                }
            }
            _ => {
                if self.trials == 0 {
                    return bad("trials must be at least 1".into());
                }
                if self.key_len() < max_t.max(2) {
                    return bad(format!("key length {} is shorter than max(T, 2) = {}", self.key_len(), max_t.max(2)));
                }
                if self.encoding_index > 1 {
                    return bad(format!("encoding index must be 0 or 1, got {}", self.encoding_index));
                }
                self.topology.validate().map_err(|e| ExperimentError::Config(e.to_string()))?;
                self.malicious_index()?;
                if self.adversary().is_malicious() && self.topology.intermediate_count() == 0 {
                    return bad("an intercepting adversary needs at least one intermediate node".into());
                }
            }
        }
        Ok(())
    }

    fn malicious_index(&self) -> Result<Option<usize>, ExperimentError> {
        match &self.malicious_node {
            None => Ok(None),
            Some(name) => match self.topology.position(name) {
                Some(i) if i > 0 && i + 1 < self.topology.path.len() => Ok(Some(i)),
                _ => Err(ExperimentError::Config(format!("{name:?} is not an intermediate node of the path"))),
            },
        }
    }

    fn template(&self, transfer_length: u32) -> Result<SessionTemplate, ExperimentError> {
        let schedule = ScheduleConfig::new(transfer_length, self.encoding_index).map_err(|e| ExperimentError::Config(e.to_string()))?;
        Ok(SessionTemplate {
            key: match &self.key {
                Some(k) => KeySource::Fixed(k.clone()),
                None => KeySource::Random { length: self.key_length },
            },
            schedule,
            data_qubit_target: self.data_target(),
            reverse_auth: self.reverse_auth,
            payload: self.payload,
        })
    }
}

impl FromStr for ExperimentKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        serde_json::from_value(serde_json::Value::String(s.replace('-', "_"))).map_err(|_| format!("unknown experiment {s:?}"))
    }
}

/// Aggregates for one transfer length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub transfer_length: u32,
    pub trials: usize,
    pub detection_rate: f64,
    pub detection_ci: f64,
    pub mean_rounds: Option<f64>,
    pub rounds_ci: Option<f64>,
    pub mean_leakage: Option<f64>,
    pub leakage_ci: Option<f64>,
    pub overhead: Option<f64>,
    pub overhead_ci: Option<f64>,
    pub master_seed: u64,
    pub detected: usize,
    pub completed: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reference: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticDetection {
    pub rounds: u32,
    /// Per-round detection 1/2: every intercepted auth qubit fails half the time.
    pub half_per_round: f64,
    /// Per-round detection 1/4: a basis-guessing interceptor is wrong half the
    /// time, and a wrong basis flips the outcome half the time.
    pub quarter_per_round: f64,
}

/// Cumulative detection probability after `rounds` authentication rounds,
/// under both per-round models.
pub fn analytic_detection(rounds: u32) -> AnalyticDetection {
    let n = i32::try_from(rounds).unwrap_or(i32::MAX);
    AnalyticDetection {
        rounds,
        half_per_round: 1.0 - 0.5f64.powi(n),
        quarter_per_round: 1.0 - 0.75f64.powi(n),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapacityRow {
    pub transfer_length: u32,
    pub key_length: u64,
    pub rounds: u64,
    pub capacity: u64,
}

pub fn capacity_report(key_length: u64, transfer_lengths: &[u32]) -> Result<Vec<CapacityRow>, ExperimentError> {
    if transfer_lengths.is_empty() {
        return Err(ExperimentError::Config("transfer length list is empty".into()));
    }
    transfer_lengths
        .iter()
        .map(|&t| {
            if t == 0 || u64::from(t) > key_length {
                return Err(ExperimentError::Config(format!("need 1 <= T <= L, got T={t}, L={key_length}")));
            }
            Ok(CapacityRow {
                transfer_length: t,
                key_length,
                rounds: rounds_per_pass(key_length, t),
                capacity: capacity(key_length, t),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportBody {
    Trials {
        rows: Vec<MetricsRow>,
        records: Vec<TrialRecord>,
    },
    Analytic {
        rows: Vec<AnalyticDetection>,
    },
    Capacity {
        rows: Vec<CapacityRow>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: ExperimentKind,
    pub config: ExperimentConfig,
    pub body: ReportBody,
}

impl ExperimentReport {
    pub fn metrics(&self) -> &[MetricsRow] {
        match &self.body {
            ReportBody::Trials { rows, .. } => rows,
            _ => &[],
        }
    }

    pub fn records(&self) -> &[TrialRecord] {
        match &self.body {
            ReportBody::Trials { records, .. } => records,
            _ => &[],
        }
    }
}

/// Seed of trial `index` within a campaign.
pub fn trial_seed(master_seed: u64, index: usize) -> u64 {
    derive_seed(master_seed, index as u64)
}

/// Runs `cfg.trials` sessions for one transfer length, in parallel, returned in
/// trial-index order.
pub fn run_trials(cfg: &ExperimentConfig, transfer_length: u32) -> Result<Vec<TrialRecord>, ExperimentError> {
    let template = cfg.template(transfer_length)?;
    let behavior = cfg.adversary();
    let options = TrialOptions {
        malicious_node: cfg.malicious_index()?,
        ..TrialOptions::default()
    };
    (0..cfg.trials)
        .into_par_iter()
        .map(|index| {
            let seed = trial_seed(cfg.master_seed, index);
            let fail = |source| ExperimentError::Trial {
                index,
                transfer_length,
                source,
            };
            let session = template.session_for(seed).map_err(|e| fail(e.into()))?;
            run_trial_detailed(&cfg.topology, behavior, &session, seed, options)
                .map(|o| o.record)
                .map_err(fail)
        })
        .collect()
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate()?;
    let body = match cfg.experiment {
        ExperimentKind::Analytic => ReportBody::Analytic {
            rows: (1..=cfg.analytic_rounds).map(analytic_detection).collect(),
        },
        ExperimentKind::Capacity => ReportBody::Capacity {
            rows: capacity_report(cfg.key_len() as u64, &cfg.transfer_lengths)?,
        },
        _ => {
            let mut rows = Vec::with_capacity(cfg.transfer_lengths.len());
            let mut records = Vec::new();
            for &t in &cfg.transfer_lengths {
                let batch = run_trials(cfg, t)?;
                let mut row = aggregate(t, &batch, cfg.master_seed);
                row.reference = cfg.experiment.reference(t);
                rows.push(row);
                records.extend(batch);
            }
            ReportBody::Trials { rows, records }
        }
    };
    Ok(ExperimentReport {
        experiment: cfg.experiment,
        config: cfg.clone(),
        body,
    })
}

/// Mean and 95% normal-approximation half-width. Values are sorted first so
/// the result does not depend on trial order.
pub fn mean_ci(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    if sorted.len() < 2 {
        return (Some(mean), None);
    }
    let mut sq: Vec<f64> = sorted.iter().map(|v| (v - mean).powi(2)).collect();
    sq.sort_by(f64::total_cmp);
    let var = sq.iter().sum::<f64>() / (n - 1.0);
    (Some(mean), Some(Z_95 * (var / n).sqrt()))
}

/// Folds one transfer length's trials into a [`MetricsRow`].
pub fn aggregate(transfer_length: u32, records: &[TrialRecord], master_seed: u64) -> MetricsRow {
    let trials = records.len();
    let detected: Vec<&TrialRecord> = records.iter().filter(|r| r.detected).collect();
    let rate = detected.len() as f64 / trials.max(1) as f64;
    let rounds: Vec<f64> = detected.iter().filter_map(|r| r.rounds_to_detect).map(|r| r as f64).collect();
    let leakage: Vec<f64> = detected.iter().map(|r| r.data_qubits_delivered as f64).collect();
    let overheads: Vec<f64> = records.iter().filter_map(TrialRecord::overhead).collect();
    let (mean_rounds, rounds_ci) = mean_ci(&rounds);
    let (mean_leakage, leakage_ci) = mean_ci(&leakage);
    let (overhead, overhead_ci) = mean_ci(&overheads);
    MetricsRow {
        transfer_length,
        trials,
        detection_rate: rate,
        detection_ci: Z_95 * (rate * (1.0 - rate) / trials.max(1) as f64).sqrt(),
        mean_rounds,
        rounds_ci,
        mean_leakage,
        leakage_ci,
        overhead,
        overhead_ci,
        master_seed,
        detected: detected.len(),
        completed: records.iter().filter(|r| r.completed).count(),
        reference: None,
    }
}
