//! Multi-seed probe of the Nadam schedule for the [3,1,3] task.

use dqnn_core::channels::single_error_bitflip;
use dqnn_core::codes::{CodeKind, build_train_bitflip, build_validation_mesh};
use dqnn_core::eval::{CorruptionMode, EvalScenario, mesh_fidelity};
use dqnn_core::network::NetworkSpec;
use dqnn_core::training::{
    EarlyStopping, InitScheme, OptimizerConfig, OptimizerKind, SessionConfig, init_params,
    run_schedule,
};

fn main() {
    let epochs1: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(250);
    let lr1: f64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(0.25);
    let spec = NetworkSpec::new(vec![3, 1, 3]).unwrap();
    let channel = single_error_bitflip(0.2, 3).unwrap();

    for seed in 1..=5u64 {
        let train = build_train_bitflip(120, 0.2, seed.wrapping_add(1000)).unwrap();
        let val =
            build_validation_mesh(20, CodeKind::Bitflip3, Some(&channel), seed.wrapping_add(2000))
                .unwrap();
        let mut s1 = SessionConfig::new(lr1, epochs1);
        s1.optimizer = OptimizerConfig::new(OptimizerKind::Nadam);
        s1.batch_size = Some(20);
        s1.stop_when_val_at_least = Some(0.98);
        let mut s2 = SessionConfig::new(0.1, 100);
        s2.optimizer = OptimizerConfig::new(OptimizerKind::Sgd);
        s2.stop_when_val_at_least = Some(0.985);
        s2.early_stopping = Some(EarlyStopping { patience: 40, min_delta: 1e-4 });

        let p0 = init_params(&spec, InitScheme::Uniform01, seed);
        let t = std::time::Instant::now();
        let (params, rec) =
            run_schedule(&spec, p0, &train, &val, &[s1, s2], seed, &mut || 0).unwrap();
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
        let cond =
            dqnn_core::eval::conditional_fidelity(&spec, &params, 20, &cases, &scenario).unwrap();
        let conds: Vec<String> = cond
            .per_case
            .iter()
            .map(|(c, r)| format!("{c}={:.3}", r.mean_fidelity))
            .collect();
        println!(
            "seed {seed}: epochs {} val {:.4} mesh {:.4} (norm {:.4}) {} [{:?}]",
            rec.epochs.len(),
            rec.last_val_cost().unwrap(),
            mesh.mean_fidelity,
            mesh.normalized_mean,
            conds.join(" "),
            t.elapsed()
        );
    }
}
