//! TOML experiment configuration: sections mirror the library modules
//! (network / channel / dataset / sessions / output), so a config reads
//! like the experimental protocol it encodes.

use anyhow::{Context, Result, anyhow, bail};
use serde::Deserialize;

use dqnn_core::channels::{
    self, CaseLabel, ChannelKind, KrausChannel,
};
use dqnn_core::codes::{CardinalState, CodeKind, Dataset};
use dqnn_core::network::NetworkSpec;
use dqnn_core::training::{
    CostMode, EarlyStopping, EmbeddedTrainMode, InitScheme, OptimizerConfig, OptimizerKind,
    SessionConfig,
};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub network: NetworkSection,
    pub channel: Option<ChannelSection>,
    pub dataset: DatasetSection,
    #[serde(default)]
    pub init: InitSection,
    pub sessions: Vec<SessionSection>,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub widths: Vec<usize>,
    #[serde(default)]
    pub bindings: Vec<BindingSection>,
    pub channel_slot: Option<ChannelSlotSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BindingSection {
    pub source: usize,
    pub bound: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSlotSection {
    pub after_layer: usize,
    pub kind: String,
    pub p: Option<f64>,
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub kind: String,
    pub p: Option<f64>,
    pub gamma: Option<f64>,
    pub qubits: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSection {
    /// bitflip_train | ad_train | selfpairs
    pub kind: String,
    pub n_pairs: usize,
    pub validation_mesh_n: usize,
    pub state_set: Option<Vec<String>>,
    pub p_bias: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct InitSection {
    #[serde(default)]
    pub scheme: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionSection {
    pub label: Option<String>,
    pub optimizer: String,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: Option<usize>,
    pub early_stopping: Option<EarlyStoppingSection>,
    pub stop_when_val_at_least: Option<f64>,
    pub fd_epsilon: Option<f64>,
    /// exact (default) when absent; swap-test estimation when set.
    pub swap_test_shots: Option<u64>,
    /// deterministic | sampled_fixed | sampled_per_epoch
    pub embedded_mode: Option<String>,
    /// Per-session training-set override (new pairs are drawn when set).
    pub dataset: Option<SessionDatasetOverride>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EarlyStoppingSection {
    pub patience: usize,
    pub min_delta: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionDatasetOverride {
    pub n_pairs: Option<usize>,
    pub p_bias: Option<f64>,
    /// Replaces the training state set for this session onward.
    pub state_set: Option<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).context("parsing config")?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.sessions.is_empty() {
            bail!("at least one [[sessions]] entry is required");
        }
        self.build_network()?;
        self.build_sessions()?;
        if self.dataset.validation_mesh_n < 2 {
            bail!("dataset.validation_mesh_n must be at least 2");
        }
        Ok(())
    }

    pub fn build_network(&self) -> Result<NetworkSpec> {
        let mut spec = NetworkSpec::new(self.network.widths.clone())?;
        for b in &self.network.bindings {
            spec = spec.with_binding(b.source, b.bound)?;
        }
        if let Some(slot) = &self.network.channel_slot {
            let qubits = *self
                .network
                .widths
                .get(slot.after_layer)
                .ok_or_else(|| anyhow!("channel_slot.after_layer out of range"))?;
            let channel = build_channel(&slot.kind, slot.p, slot.gamma, qubits)?;
            spec = spec.with_channel(slot.after_layer, channel)?;
        }
        Ok(spec)
    }

    pub fn build_channel(&self) -> Result<Option<KrausChannel>> {
        match &self.channel {
            None => Ok(None),
            Some(ch) => Ok(Some(build_channel(&ch.kind, ch.p, ch.gamma, ch.qubits)?)),
        }
    }

    pub fn init_scheme(&self) -> Result<InitScheme> {
        match self.init.scheme.as_deref() {
            None | Some("uniform01") => Ok(InitScheme::Uniform01),
            Some("zeros") => Ok(InitScheme::Zeros),
            Some(other) => bail!("unknown init scheme '{other}'"),
        }
    }

    pub fn code_kind(&self) -> Result<CodeKind> {
        Ok(match self.dataset.kind.as_str() {
            "bitflip_train" => CodeKind::Bitflip3,
            "ad_train" => CodeKind::Ad4,
            "selfpairs" => CodeKind::Qubit,
            other => bail!("unknown dataset kind '{other}'"),
        })
    }

    pub fn state_set(&self) -> Result<Vec<CardinalState>> {
        match &self.dataset.state_set {
            None => Ok(CardinalState::ALL.to_vec()),
            Some(names) => names
                .iter()
                .map(|n| CardinalState::parse(n).map_err(|e| anyhow!("{e}")))
                .collect(),
        }
    }

    /// The training set for a session, honoring per-session overrides.
    pub fn build_train_set(&self, session: &SessionSection, seed: u64) -> Result<Dataset> {
        let over = session.dataset.as_ref();
        let n_pairs = over.and_then(|d| d.n_pairs).unwrap_or(self.dataset.n_pairs);
        let states = match over.and_then(|d| d.state_set.as_ref()) {
            Some(names) => names
                .iter()
                .map(|n| CardinalState::parse(n).map_err(|e| anyhow!("{e}")))
                .collect::<Result<Vec<_>>>()?,
            None => self.state_set()?,
        };
        match self.dataset.kind.as_str() {
            "bitflip_train" => {
                let p = self
                    .channel
                    .as_ref()
                    .and_then(|c| c.p)
                    .ok_or_else(|| anyhow!("bitflip_train needs channel.p"))?;
                Ok(dqnn_core::codes::build_train_bitflip(n_pairs, p, seed)?)
            }
            "ad_train" => {
                let gamma = self
                    .channel
                    .as_ref()
                    .and_then(|c| c.gamma)
                    .ok_or_else(|| anyhow!("ad_train needs channel.gamma"))?;
                let p_bias = over
                    .and_then(|d| d.p_bias)
                    .or(self.dataset.p_bias)
                    .ok_or_else(|| anyhow!("ad_train needs dataset.p_bias"))?;
                Ok(dqnn_core::codes::build_train_ad(n_pairs, gamma, p_bias, &states, seed)?)
            }
            "selfpairs" => Ok(dqnn_core::codes::build_train_selfpairs(n_pairs, &states, seed)?),
            other => bail!("unknown dataset kind '{other}'"),
        }
    }

    /// The fixed validation mesh used across all sessions.
    pub fn build_validation_set(&self, seed: u64) -> Result<Dataset> {
        let code = self.code_kind()?;
        let channel = self.build_channel()?;
        Ok(dqnn_core::codes::build_validation_mesh(
            self.dataset.validation_mesh_n,
            code,
            channel.as_ref(),
            seed,
        )?)
    }

    pub fn build_sessions(&self) -> Result<Vec<SessionConfig>> {
        self.sessions.iter().map(|s| s.build()).collect()
    }
}

impl SessionSection {
    pub fn build(&self) -> Result<SessionConfig> {
        let kind = OptimizerKind::parse(&self.optimizer)
            .ok_or_else(|| anyhow!("unknown optimizer '{}'", self.optimizer))?;
        let mut cfg = SessionConfig::new(self.learning_rate, self.epochs);
        cfg.optimizer = OptimizerConfig::new(kind);
        cfg.batch_size = self.batch_size;
        cfg.early_stopping = self
            .early_stopping
            .as_ref()
            .map(|e| EarlyStopping { patience: e.patience, min_delta: e.min_delta });
        cfg.stop_when_val_at_least = self.stop_when_val_at_least;
        if let Some(eps) = self.fd_epsilon {
            cfg.fd_epsilon = eps;
        }
        if let Some(shots) = self.swap_test_shots {
            cfg.cost_mode = CostMode::SwapTest { shots };
        }
        cfg.embedded_mode = match self.embedded_mode.as_deref() {
            None | Some("deterministic") => EmbeddedTrainMode::Deterministic,
            Some("sampled_fixed") => EmbeddedTrainMode::SampledFixed,
            Some("sampled_per_epoch") => EmbeddedTrainMode::SampledPerEpoch,
            Some(other) => bail!("unknown embedded_mode '{other}'"),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn build_channel(
    kind: &str,
    p: Option<f64>,
    gamma: Option<f64>,
    qubits: usize,
) -> Result<KrausChannel> {
    Ok(match kind {
        "bitflip_iid" => {
            channels::bitflip_iid(p.ok_or_else(|| anyhow!("bitflip_iid needs p"))?, qubits)?
        }
        "single_error_bitflip" => channels::single_error_bitflip(
            p.ok_or_else(|| anyhow!("single_error_bitflip needs p"))?,
            qubits,
        )?,
        "amplitude_damping" => channels::amplitude_damping_iid(
            gamma.ok_or_else(|| anyhow!("amplitude_damping needs gamma"))?,
            qubits,
        )?,
        other => bail!("unknown channel kind '{other}'"),
    })
}

/// Re-derives the constructor arguments of a channel for checkpointing.
pub fn channel_descriptor(channel: &KrausChannel) -> Result<(String, f64)> {
    Ok(match channel.kind() {
        ChannelKind::BitflipIid { p } => ("bitflip_iid".into(), p),
        ChannelKind::SingleErrorBitflip { p } => ("single_error_bitflip".into(), p),
        ChannelKind::AmplitudeDamping { gamma } => ("amplitude_damping".into(), gamma),
        ChannelKind::Custom => bail!("custom channels cannot be checkpointed"),
    })
}

/// Evaluation request for `dqnn eval`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSpec {
    pub mesh_n: usize,
    /// deterministic | sampled | clean | fixed:<case>
    #[serde(default = "default_mode")]
    pub mode: String,
    /// Cases for the conditional report (empty = skip).
    #[serde(default)]
    pub cases: Vec<String>,
    #[serde(default)]
    pub seed: u64,
    /// bitflip3 | ad4 | qubit
    pub code: String,
    pub channel: Option<ChannelSection>,
}

fn default_mode() -> String {
    "deterministic".into()
}

impl EvalSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: EvalSpec = toml::from_str(text).context("parsing eval spec")?;
        if spec.mesh_n < 2 {
            bail!("mesh_n must be at least 2");
        }
        spec.code_kind()?;
        spec.corruption_mode()?;
        for c in &spec.cases {
            CaseLabel::parse(c).map_err(|e| anyhow!("{e}"))?;
        }
        Ok(spec)
    }

    pub fn code_kind(&self) -> Result<CodeKind> {
        Ok(match self.code.as_str() {
            "bitflip3" => CodeKind::Bitflip3,
            "ad4" => CodeKind::Ad4,
            "qubit" => CodeKind::Qubit,
            other => bail!("unknown code '{other}'"),
        })
    }

    pub fn corruption_mode(&self) -> Result<dqnn_core::eval::CorruptionMode> {
        use dqnn_core::eval::CorruptionMode;
        Ok(match self.mode.as_str() {
            "deterministic" => CorruptionMode::DeterministicKraus,
            "sampled" => CorruptionMode::Sampled { seed: self.seed },
            "clean" => CorruptionMode::Clean,
            other => match other.strip_prefix("fixed:") {
                Some(case) => {
                    CorruptionMode::FixedCase(CaseLabel::parse(case).map_err(|e| anyhow!("{e}"))?)
                }
                None => bail!("unknown mode '{other}'"),
            },
        })
    }

    pub fn build_channel(&self) -> Result<Option<KrausChannel>> {
        match &self.channel {
            None => Ok(None),
            Some(ch) => Ok(Some(build_channel(&ch.kind, ch.p, ch.gamma, ch.qubits)?)),
        }
    }
}
