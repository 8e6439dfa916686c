//! Hyperparameter probe for the [3,1,3] bit-flip experiment.

use dqnn_core::channels::single_error_bitflip;
use dqnn_core::codes::{CodeKind, build_train_bitflip, build_validation_mesh};
use dqnn_core::network::NetworkSpec;
use dqnn_core::training::{
    InitScheme, OptimizerConfig, OptimizerKind, SessionConfig, cost, gradient, init_params,
    run_session,
};

fn main() {
    let spec = NetworkSpec::new(vec![3, 1, 3]).unwrap();
    let train = build_train_bitflip(120, 0.2, 2).unwrap();
    let channel = single_error_bitflip(0.2, 3).unwrap();
    let val = build_validation_mesh(10, CodeKind::Bitflip3, Some(&channel), 4).unwrap();

    let params = init_params(&spec, InitScheme::Uniform01, 1);
    let c0 = cost(&spec, &params, &train).unwrap();
    let g = gradient(&spec, &params, &train, 1e-3).unwrap();
    let gnorm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let gmax = g.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    println!("init: cost {c0:.4}, |g| {gnorm:.3e}, max|g_i| {gmax:.3e}");

    let epochs: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(40);

    for (name, kind, lr, batch) in [
        ("adam lr0.25 b20", OptimizerKind::Adam, 0.25, Some(20)),
        ("adam lr0.1 b20", OptimizerKind::Adam, 0.1, Some(20)),
        ("adam lr0.05 b20", OptimizerKind::Adam, 0.05, Some(20)),
        ("adam lr0.02 full", OptimizerKind::Adam, 0.02, None),
        ("nadam lr0.1 b20", OptimizerKind::Nadam, 0.1, Some(20)),
        ("sgd lr2 full", OptimizerKind::Sgd, 2.0, None),
        ("sgd lr10 full", OptimizerKind::Sgd, 10.0, None),
        ("rmsprop lr0.02 b20", OptimizerKind::RmsProp, 0.02, Some(20)),
    ] {
        let mut cfg = SessionConfig::new(lr, epochs);
        cfg.optimizer = OptimizerConfig::new(kind);
        cfg.batch_size = batch;
        let p0 = init_params(&spec, InitScheme::Uniform01, 1);
        let (_, record) =
            run_session(&spec, p0, &train, &val, &cfg, 7, 0, 0, &mut || 0).unwrap();
        let curve: Vec<String> = record
            .epochs
            .iter()
            .step_by((epochs / 8).max(1))
            .map(|e| format!("{:.3}", e.val_cost))
            .collect();
        println!(
            "{name:>20}: final train {:.4} val {:.4} | {}",
            record.epochs.last().unwrap().train_cost,
            record.epochs.last().unwrap().val_cost,
            curve.join(" ")
        );
    }
}
