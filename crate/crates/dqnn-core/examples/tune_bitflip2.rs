//! Second probe: clean task, init scales, long continuations.

use dqnn_core::channels::single_error_bitflip;
use dqnn_core::codes::{CodeKind, build_train_bitflip, build_validation_mesh};
use dqnn_core::network::{NetworkParams, NetworkSpec};
use dqnn_core::training::{
    InitScheme, OptimizerConfig, OptimizerKind, SessionConfig, init_params, run_session,
};

fn scaled_init(spec: &NetworkSpec, seed: u64, scale: f64) -> NetworkParams {
    let p = init_params(spec, InitScheme::Uniform01, seed);
    let flat: Vec<f64> = p.to_flat().iter().map(|v| v * scale).collect();
    NetworkParams::from_flat(spec, &flat).unwrap()
}

fn main() {
    let spec = NetworkSpec::new(vec![3, 1, 3]).unwrap();
    let channel = single_error_bitflip(0.2, 3).unwrap();
    let val = build_validation_mesh(10, CodeKind::Bitflip3, Some(&channel), 4).unwrap();
    let train = build_train_bitflip(120, 0.2, 2).unwrap();
    let clean = build_train_bitflip(120, 0.0, 2).unwrap();
    let val_clean = build_validation_mesh(10, CodeKind::Bitflip3, None, 4).unwrap();

    let epochs: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(80);

    // Clean identity task: can the QAE learn to pass code states through?
    for (name, scale, lr) in [
        ("clean adam0.1 s1.0", 1.0, 0.1),
        ("clean adam0.1 s0.3", 0.3, 0.1),
        ("clean adam0.1 s0.1", 0.1, 0.1),
    ] {
        let mut cfg = SessionConfig::new(lr, epochs);
        cfg.optimizer = OptimizerConfig::new(OptimizerKind::Adam);
        cfg.batch_size = Some(20);
        let p0 = scaled_init(&spec, 1, scale);
        let (_, rec) =
            run_session(&spec, p0, &clean, &val_clean, &cfg, 7, 0, 0, &mut || 0).unwrap();
        let curve: Vec<String> = rec
            .epochs
            .iter()
            .step_by((epochs / 8).max(1))
            .map(|e| format!("{:.3}", e.val_cost))
            .collect();
        println!("{name:>22}: {}", curve.join(" "));
    }

    // Noisy task with smaller init scales.
    for (name, scale, kind, lr) in [
        ("noisy adam0.1 s0.3", 0.3, OptimizerKind::Adam, 0.1),
        ("noisy adam0.1 s0.1", 0.1, OptimizerKind::Adam, 0.1),
        ("noisy adam0.05 s0.03", 0.03, OptimizerKind::Adam, 0.05),
        ("noisy nadam0.25 s1.0", 1.0, OptimizerKind::Nadam, 0.25),
    ] {
        let mut cfg = SessionConfig::new(lr, epochs);
        cfg.optimizer = OptimizerConfig::new(kind);
        cfg.batch_size = Some(20);
        let p0 = scaled_init(&spec, 1, scale);
        let (_, rec) = run_session(&spec, p0, &train, &val, &cfg, 7, 0, 0, &mut || 0).unwrap();
        let curve: Vec<String> = rec
            .epochs
            .iter()
            .step_by((epochs / 8).max(1))
            .map(|e| format!("{:.3}", e.val_cost))
            .collect();
        println!("{name:>22}: {}", curve.join(" "));
    }
}
