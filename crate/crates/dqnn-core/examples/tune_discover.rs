//! Hyperparameter probe for the channel-in-network [1,3,1] discovery task.

use dqnn_core::channels::{CaseLabel, single_error_bitflip};
use dqnn_core::codes::{CardinalState, CodeKind, build_train_selfpairs, build_validation_mesh};
use dqnn_core::eval::{CorruptionMode, EvalScenario, conditional_fidelity};
use dqnn_core::network::NetworkSpec;
use dqnn_core::training::{
    InitScheme, OptimizerConfig, OptimizerKind, SessionConfig, init_params, run_session,
};

fn main() {
    let epochs: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(60);
    let channel = single_error_bitflip(0.75, 3).unwrap();
    let spec = NetworkSpec::new(vec![1, 3, 1])
        .unwrap()
        .with_binding(2, 1)
        .unwrap()
        .with_channel(1, channel)
        .unwrap();
    let set = [
        CardinalState::Zero,
        CardinalState::One,
        CardinalState::Plus,
        CardinalState::Minus,
    ];

    for seed in 1..=3u64 {
        let train = build_train_selfpairs(100, &set, seed.wrapping_add(1000)).unwrap();
        let val =
            build_validation_mesh(20, CodeKind::Qubit, None, seed.wrapping_add(2000)).unwrap();
        for (name, kind, lr, batch) in [
            ("nadam 0.25 b20", OptimizerKind::Nadam, 0.25, Some(20)),
            ("nadam 0.1 b20", OptimizerKind::Nadam, 0.1, Some(20)),
            ("nadam 0.1 full", OptimizerKind::Nadam, 0.1, None),
            ("adam 0.1 b20", OptimizerKind::Adam, 0.1, Some(20)),
            ("sgd 1.0 full", OptimizerKind::Sgd, 1.0, None),
        ] {
            let mut cfg = SessionConfig::new(lr, epochs);
            cfg.optimizer = OptimizerConfig::new(kind);
            cfg.batch_size = batch;
            let p0 = init_params(&spec, InitScheme::Uniform01, seed);
            let t = std::time::Instant::now();
            let (params, rec) =
                run_session(&spec, p0, &train, &val, &cfg, seed + 7, 0, 0, &mut || 0).unwrap();
            let scenario = EvalScenario {
                code: CodeKind::Qubit,
                channel: None,
                mode: CorruptionMode::DeterministicKraus,
            };
            let cases = [
                CaseLabel::NoError,
                CaseLabel::Flip(1),
                CaseLabel::Flip(2),
                CaseLabel::Flip(3),
            ];
            let cond = conditional_fidelity(&spec, &params, 10, &cases, &scenario).unwrap();
            let conds: Vec<String> = cond
                .per_case
                .iter()
                .map(|(_, r)| format!("{:.3}", r.mean_fidelity))
                .collect();
            println!(
                "seed {seed} {name:>15}: val {:.4} cases [{}] [{:?}]",
                rec.last_val_cost().unwrap(),
                conds.join(" "),
                t.elapsed()
            );
        }
    }
}
