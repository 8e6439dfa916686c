//! Five-seed check of the discovery schedule plus codeword extraction.

use dqnn_core::channels::{CaseLabel, single_error_bitflip};
use dqnn_core::codes::{
    CardinalState, CodeKind, build_train_selfpairs, build_validation_mesh, dominant_ket,
    extract_codeword,
};
use dqnn_core::eval::{CorruptionMode, EvalScenario, conditional_fidelity};
use dqnn_core::network::NetworkSpec;
use dqnn_core::training::{
    EarlyStopping, InitScheme, OptimizerConfig, OptimizerKind, SessionConfig, init_params,
    run_schedule,
};

fn main() {
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

    for seed in 1..=5u64 {
        let train = build_train_selfpairs(100, &set, seed.wrapping_add(1000)).unwrap();
        let val =
            build_validation_mesh(20, CodeKind::Qubit, None, seed.wrapping_add(2000)).unwrap();
        let mut s1 = SessionConfig::new(0.1, 100);
        s1.optimizer = OptimizerConfig::new(OptimizerKind::Adam);
        s1.batch_size = Some(20);
        s1.stop_when_val_at_least = Some(0.99);
        let mut s2 = SessionConfig::new(0.5, 60);
        s2.optimizer = OptimizerConfig::new(OptimizerKind::Sgd);
        s2.stop_when_val_at_least = Some(0.995);
        s2.early_stopping = Some(EarlyStopping { patience: 30, min_delta: 1e-4 });

        let p0 = init_params(&spec, InitScheme::Uniform01, seed);
        let t = std::time::Instant::now();
        let (params, rec) =
            run_schedule(&spec, p0, &train, &val, &[s1, s2], seed, &mut || 0).unwrap();
        let scenario = EvalScenario {
            code: CodeKind::Qubit,
            channel: None,
            mode: CorruptionMode::DeterministicKraus,
        };
        let cases =
            [CaseLabel::NoError, CaseLabel::Flip(1), CaseLabel::Flip(2), CaseLabel::Flip(3)];
        let cond = conditional_fidelity(&spec, &params, 20, &cases, &scenario).unwrap();
        let conds: Vec<String> = cond
            .per_case
            .iter()
            .map(|(_, r)| format!("{:.3}", r.mean_fidelity))
            .collect();
        let (c0, c1) = extract_codeword(&spec, &params, 1).unwrap();
        let overlap = c0.inner(&c1).norm();
        let (k0, a0) = dominant_ket(&c0);
        let (k1, a1) = dominant_ket(&c1);
        println!(
            "seed {seed}: epochs {} val {:.4} cases [{}] overlap {:.1e} kets |{k0:04b}⟩({:.2}) |{k1:04b}⟩({:.2}) [{:?}]",
            rec.epochs.len(),
            rec.last_val_cost().unwrap(),
            conds.join(" "),
            overlap,
            a0.norm_sqr(),
            a1.norm_sqr(),
            t.elapsed()
        );
    }
}
