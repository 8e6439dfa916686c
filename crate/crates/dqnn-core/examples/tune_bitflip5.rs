//! Does a fresh training-set draw in session 2 fix per-case neglect?

use dqnn_core::channels::single_error_bitflip;
use dqnn_core::codes::{CodeKind, build_train_bitflip, build_validation_mesh};
use dqnn_core::eval::{CorruptionMode, EvalScenario, conditional_fidelity, mesh_fidelity};
use dqnn_core::network::NetworkSpec;
use dqnn_core::training::{
    EarlyStopping, InitScheme, OptimizerConfig, OptimizerKind, SessionConfig, init_params,
    run_session,
};

fn main() {
    let spec = NetworkSpec::new(vec![3, 1, 3]).unwrap();
    let channel = single_error_bitflip(0.2, 3).unwrap();

    for seed in 1..=5u64 {
        let val =
            build_validation_mesh(20, CodeKind::Bitflip3, Some(&channel), seed.wrapping_add(2000))
                .unwrap();
        let t = std::time::Instant::now();

        let mut s1 = SessionConfig::new(0.25, 300);
        s1.optimizer = OptimizerConfig::new(OptimizerKind::Nadam);
        s1.batch_size = Some(20);
        s1.stop_when_val_at_least = Some(0.985);
        let train1 = build_train_bitflip(120, 0.2, seed.wrapping_add(1000)).unwrap();
        let p0 = init_params(&spec, InitScheme::Uniform01, seed);
        let (p1, r1) = run_session(&spec, p0, &train1, &val, &s1, seed + 1, 0, 0, &mut || 0)
            .unwrap();

        // Session 2: fresh 120-pair draw, gentler Nadam.
        let mut s2 = SessionConfig::new(0.1, 150);
        s2.optimizer = OptimizerConfig::new(OptimizerKind::Nadam);
        s2.batch_size = Some(20);
        s2.early_stopping = Some(EarlyStopping { patience: 40, min_delta: 1e-4 });
        let train2 = build_train_bitflip(120, 0.2, seed.wrapping_add(1101)).unwrap();
        let (p2, r2) = run_session(&spec, p1, &train2, &val, &s2, seed + 2, 1, 0, &mut || 0)
            .unwrap();

        // Session 3: SGD polish.
        let mut s3 = SessionConfig::new(0.1, 50);
        s3.optimizer = OptimizerConfig::new(OptimizerKind::Sgd);
        s3.early_stopping = Some(EarlyStopping { patience: 30, min_delta: 1e-4 });
        let (params, r3) = run_session(&spec, p2, &train2, &val, &s3, seed + 3, 2, 0, &mut || 0)
            .unwrap();

        let scenario = EvalScenario {
            code: CodeKind::Bitflip3,
            channel: Some(channel.clone()),
            mode: CorruptionMode::DeterministicKraus,
        };
        let mesh = mesh_fidelity(&spec, &params, 20, &scenario).unwrap();
        let cases = [
            dqnn_core::channels::CaseLabel::NoError,
            dqnn_core::channels::CaseLabel::Flip(1),
            dqnn_core::channels::CaseLabel::Flip(2),
            dqnn_core::channels::CaseLabel::Flip(3),
        ];
        let cond = conditional_fidelity(&spec, &params, 20, &cases, &scenario).unwrap();
        let conds: Vec<String> = cond
            .per_case
            .iter()
            .map(|(c, r)| format!("{c}={:.3}", r.mean_fidelity))
            .collect();
        println!(
            "seed {seed}: epochs {}+{}+{} mesh {:.4} {} [{:?}]",
            r1.epochs.len(),
            r2.epochs.len(),
            r3.epochs.len(),
            mesh.mean_fidelity,
            conds.join(" "),
            t.elapsed()
        );
    }
}
