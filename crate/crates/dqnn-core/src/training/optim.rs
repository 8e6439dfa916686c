//! Gradient-ascent optimizers.
//!
//! Ascent on the fidelity cost is run as descent on its negative, so the
//! standard published recurrences apply verbatim to g = -∇C.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizerKind {
    Sgd,
    Adam,
    Adamax,
    Nadam,
    RmsProp,
}

impl OptimizerKind {
    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::Adam => "adam",
            OptimizerKind::Adamax => "adamax",
            OptimizerKind::Nadam => "nadam",
            OptimizerKind::RmsProp => "rmsprop",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            OptimizerKind::Sgd,
            OptimizerKind::Adam,
            OptimizerKind::Adamax,
            OptimizerKind::Nadam,
            OptimizerKind::RmsProp,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

/// Method plus hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub kind: OptimizerKind,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Squared-gradient decay for RMSprop.
    pub rms_decay: f64,
}

impl OptimizerConfig {
    pub fn new(kind: OptimizerKind) -> Self {
        Self { kind, beta1: 0.9, beta2: 0.999, epsilon: 1e-8, rms_decay: 0.9 }
    }

    pub fn sgd() -> Self {
        Self::new(OptimizerKind::Sgd)
    }

    pub fn adam() -> Self {
        Self::new(OptimizerKind::Adam)
    }

    pub fn nadam() -> Self {
        Self::new(OptimizerKind::Nadam)
    }
}

/// First/second moment accumulators and the step counter.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    config: OptimizerConfig,
    t: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl OptimizerState {
    pub fn new(config: OptimizerConfig, n_params: usize) -> Self {
        Self { config, t: 0, m: vec![0.0; n_params], v: vec![0.0; n_params] }
    }

    pub fn config(&self) -> OptimizerConfig {
        self.config
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// One ascent update: `params` moves to increase the objective whose
    /// ascent gradient is `grad`.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        debug_assert_eq!(params.len(), grad.len());
        debug_assert_eq!(params.len(), self.m.len());
        self.t += 1;
        let cfg = self.config;
        let t = self.t as i32;
        match cfg.kind {
            OptimizerKind::Sgd => {
                for (p, g) in params.iter_mut().zip(grad) {
                    *p += lr * g;
                }
            }
            OptimizerKind::Adam => {
                let bc1 = 1.0 - cfg.beta1.powi(t);
                let bc2 = 1.0 - cfg.beta2.powi(t);
                for i in 0..params.len() {
                    let g = -grad[i];
                    self.m[i] = cfg.beta1 * self.m[i] + (1.0 - cfg.beta1) * g;
                    self.v[i] = cfg.beta2 * self.v[i] + (1.0 - cfg.beta2) * g * g;
                    let m_hat = self.m[i] / bc1;
                    let v_hat = self.v[i] / bc2;
                    params[i] -= lr * m_hat / (v_hat.sqrt() + cfg.epsilon);
                }
            }
            OptimizerKind::Adamax => {
                let bc1 = 1.0 - cfg.beta1.powi(t);
                for i in 0..params.len() {
                    let g = -grad[i];
                    self.m[i] = cfg.beta1 * self.m[i] + (1.0 - cfg.beta1) * g;
                    self.v[i] = (cfg.beta2 * self.v[i]).max(g.abs());
                    params[i] -= lr / bc1 * self.m[i] / (self.v[i] + cfg.epsilon);
                }
            }
            OptimizerKind::Nadam => {
                let bc1 = 1.0 - cfg.beta1.powi(t);
                let bc2 = 1.0 - cfg.beta2.powi(t);
                for i in 0..params.len() {
                    let g = -grad[i];
                    self.m[i] = cfg.beta1 * self.m[i] + (1.0 - cfg.beta1) * g;
                    self.v[i] = cfg.beta2 * self.v[i] + (1.0 - cfg.beta2) * g * g;
                    let m_hat = self.m[i] / bc1;
                    let v_hat = self.v[i] / bc2;
                    let lookahead = cfg.beta1 * m_hat + (1.0 - cfg.beta1) * g / bc1;
                    params[i] -= lr * lookahead / (v_hat.sqrt() + cfg.epsilon);
                }
            }
            OptimizerKind::RmsProp => {
                for i in 0..params.len() {
                    let g = -grad[i];
                    self.v[i] = cfg.rms_decay * self.v[i] + (1.0 - cfg.rms_decay) * g * g;
                    params[i] -= lr * g / (self.v[i].sqrt() + cfg.epsilon);
                }
            }
        }
    }
}
