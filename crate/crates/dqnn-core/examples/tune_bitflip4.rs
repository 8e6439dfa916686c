//! Can a higher-rate Nadam kick rescue the seeds stuck at the 0.5 attractor?

use dqnn_core::channels::single_error_bitflip;
use dqnn_core::codes::{CodeKind, build_train_bitflip, build_validation_mesh};
use dqnn_core::network::NetworkSpec;
use dqnn_core::training::{
    EarlyStopping, InitScheme, OptimizerConfig, OptimizerKind, SessionConfig, init_params,
    run_schedule,
};

fn main() {
    let spec = NetworkSpec::new(vec![3, 1, 3]).unwrap();
    let channel = single_error_bitflip(0.2, 3).unwrap();
    for seed in [3u64, 5] {
        let train = build_train_bitflip(120, 0.2, seed.wrapping_add(1000)).unwrap();
        let val =
            build_validation_mesh(20, CodeKind::Bitflip3, Some(&channel), seed.wrapping_add(2000))
                .unwrap();
        let mut s1 = SessionConfig::new(0.25, 250);
        s1.optimizer = OptimizerConfig::new(OptimizerKind::Nadam);
        s1.batch_size = Some(20);
        s1.stop_when_val_at_least = Some(0.97);
        // kick: smaller batches, higher rate
        let mut s2 = SessionConfig::new(0.5, 120);
        s2.optimizer = OptimizerConfig::new(OptimizerKind::Nadam);
        s2.batch_size = Some(10);
        s2.stop_when_val_at_least = Some(0.97);
        let mut s3 = SessionConfig::new(0.1, 130);
        s3.optimizer = OptimizerConfig::new(OptimizerKind::Sgd);
        s3.stop_when_val_at_least = Some(0.975);
        s3.early_stopping = Some(EarlyStopping { patience: 50, min_delta: 1e-4 });

        let p0 = init_params(&spec, InitScheme::Uniform01, seed);
        let (_, rec) =
            run_schedule(&spec, p0, &train, &val, &[s1, s2, s3], seed, &mut || 0).unwrap();
        let per_session: Vec<String> = (0..3)
            .map(|s| {
                let last = rec.epochs.iter().filter(|e| e.session == s).next_back();
                match last {
                    Some(e) => format!("s{s}: {:.4}@{}", e.val_cost, e.epoch),
                    None => format!("s{s}: skipped"),
                }
            })
            .collect();
        println!("seed {seed}: {}", per_session.join("  "));
    }
}
