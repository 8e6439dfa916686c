use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::channels::single_error_bitflip;
use crate::codes::{CodeKind, Dataset, DatasetKind, PairMeta, build_validation_mesh};
use crate::network::forward;
use crate::pauli::{Pauli, PauliString, string_index};
use crate::testutil::{perfect_qae_313, random_state, rng, small_random_net};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn pair(input: PureState, target: PureState) -> TrainingPair {
    TrainingPair {
        input,
        target,
        meta: PairMeta {
            label: alloc::string::String::from("test"),
            theta: 0.0,
            phi: 0.0,
            case: crate::channels::CaseLabel::NoError,
            seed: 0,
        },
    }
}

fn dataset(pairs: Vec<TrainingPair>) -> Dataset {
    Dataset { pairs, kind: DatasetKind::Train, config: alloc::string::String::from("test") }
}

fn random_dataset(seed: u64, spec: &NetworkSpec, n: usize) -> Dataset {
    let mut r = rng(seed);
    let pairs = (0..n)
        .map(|_| {
            pair(
                random_state(&mut r, spec.input_qubits()),
                random_state(&mut r, spec.output_qubits()),
            )
        })
        .collect();
    dataset(pairs)
}

/// Dense-path cost, independent of the cached ensemble machinery that the
/// gradient uses.
fn cost_dense(spec: &NetworkSpec, params: &NetworkParams, ds: &Dataset) -> f64 {
    let mut total = 0.0;
    for p in &ds.pairs {
        let out = forward(spec, params, &p.input.to_density()).unwrap();
        total += fidelity_pure(&p.target, &out).unwrap();
    }
    total / ds.len() as f64
}

#[test]
fn cost_extremes() {
    // The hand-built perfect autoencoder reproduces clean code states.
    let (spec, params) = perfect_qae_313();
    let mesh = build_validation_mesh(5, CodeKind::Bitflip3, None, 1).unwrap();
    let c_perfect = cost(&spec, &params, &mesh).unwrap();
    assert!((c_perfect - 1.0).abs() < 1e-10);

    // Zero parameters collapse everything to |000⟩; orthogonal targets
    // give zero cost.
    let zero_spec = NetworkSpec::new(vec![3, 1, 3]).unwrap();
    let zeros = NetworkParams::zeros(&zero_spec);
    let ones = dataset(vec![pair(PureState::basis(3, 0), PureState::basis(3, 7))]);
    assert_eq!(cost(&zero_spec, &zeros, &ones).unwrap(), 0.0);
}

#[test]
fn cost_matches_dense_path() {
    for (seed, widths, bindings) in [
        (90u64, &[2usize, 1, 2][..], &[][..]),
        (91, &[1, 3, 1], &[(2usize, 1usize)][..]),
    ] {
        let (spec, params) = small_random_net(seed, widths, bindings);
        let ds = random_dataset(seed + 1, &spec, 4);
        let fast = cost(&spec, &params, &ds).unwrap();
        let dense = cost_dense(&spec, &params, &ds);
        assert!((fast - dense).abs() < 1e-10);
    }
}

#[test]
fn gradient_vanishes_at_the_zero_parameter_maximum() {
    // At zero parameters the output is |0..0⟩ and the cost is even in each
    // single-coefficient perturbation, so all central differences vanish.
    let spec = NetworkSpec::new(vec![1, 1]).unwrap();
    let params = NetworkParams::zeros(&spec);
    let ds = dataset(vec![pair(PureState::basis(1, 0), PureState::basis(1, 0))]);
    assert!((cost(&spec, &params, &ds).unwrap() - 1.0).abs() < 1e-12);
    let g = gradient(&spec, &params, &ds, 1e-3).unwrap();
    for (i, gi) in g.iter().enumerate() {
        assert!(gi.abs() <= 1e-8, "coefficient {i}: {gi}");
    }
}

#[test]
fn gradient_matches_naive_finite_differences() {
    // The cached single-perceptron rebuild must agree with the naive
    // full-recompute difference quotient on the dense path.
    for (seed, widths, bindings) in [
        (92u64, &[1usize, 2][..], &[][..]),
        (93, &[1, 1, 1], &[(1usize, 2usize)][..]),
        (94, &[2, 1], &[][..]),
    ] {
        let (spec, params) = small_random_net(seed, widths, bindings);
        let ds = random_dataset(seed + 10, &spec, 3);
        let eps = 1e-3;
        let g = gradient(&spec, &params, &ds, eps).unwrap();
        let flat = params.to_flat();
        for i in (0..flat.len()).step_by(7) {
            let mut plus = flat.clone();
            plus[i] += eps;
            let mut minus = flat.clone();
            minus[i] -= eps;
            let naive = (cost_dense(&spec, &NetworkParams::from_flat(&spec, &plus).unwrap(), &ds)
                - cost_dense(&spec, &NetworkParams::from_flat(&spec, &minus).unwrap(), &ds))
                / (2.0 * eps);
            assert!((g[i] - naive).abs() < 1e-11, "widths {widths:?} param {i}");
        }
    }
}

#[test]
fn gradient_matches_richardson_directional_oracle() {
    // Independent oracle: dC/ds along a random direction by Richardson
    // extrapolation of dense-path central differences.
    let mut r = rng(95);
    use rand::Rng;
    let mut checked = 0;
    for (seed, widths, bindings) in [
        (96u64, &[1usize, 1][..], &[][..]),
        (97, &[2, 1], &[][..]),
        (98, &[1, 2], &[][..]),
        (99, &[1, 1, 1], &[(1usize, 2usize)][..]),
    ] {
        let (spec, params) = small_random_net(seed, widths, bindings);
        let ds = random_dataset(seed + 20, &spec, 3);
        let g = gradient(&spec, &params, &ds, 1e-3).unwrap();
        let flat = params.to_flat();
        for _ in 0..3 {
            let dir: Vec<f64> = (0..flat.len()).map(|_| r.random::<f64>() - 0.5).collect();
            let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
            let dir: Vec<f64> = dir.iter().map(|d| d / norm).collect();
            let directional = |s: f64| {
                let plus: Vec<f64> = flat.iter().zip(&dir).map(|(p, d)| p + s * d).collect();
                let minus: Vec<f64> = flat.iter().zip(&dir).map(|(p, d)| p - s * d).collect();
                (cost_dense(&spec, &NetworkParams::from_flat(&spec, &plus).unwrap(), &ds)
                    - cost_dense(&spec, &NetworkParams::from_flat(&spec, &minus).unwrap(), &ds))
                    / (2.0 * s)
            };
            let s = 1e-3;
            let oracle = (4.0 * directional(s / 2.0) - directional(s)) / 3.0;
            let fd: f64 = g.iter().zip(&dir).map(|(gi, di)| gi * di).sum();
            let rel = (fd - oracle).abs() / oracle.abs().max(1e-2);
            assert!(rel <= 1e-4, "widths {widths:?}: fd {fd} oracle {oracle}");
            checked += 1;
        }
    }
    assert!(checked >= 12);
}

#[test]
fn conjugate_sharing_moves_both_layers() {
    // Unbound twin of a bound [1,1,1] net: layer 2 carries the mirrored
    // adjoint explicitly (swap the two letters, negate the coefficient).
    let (bound_spec, bound_params) = small_random_net(100, &[1, 1, 1], &[(1, 2)]);
    let unbound_spec = NetworkSpec::new(vec![1, 1, 1]).unwrap();
    let mut twin = NetworkParams::zeros(&unbound_spec);
    let src = bound_params.layer(1).unwrap()[0].clone();
    twin.layer_mut(1).unwrap()[0] = src.clone();
    {
        let mirrored = twin.layer_mut(2).unwrap();
        for idx in 0..16usize {
            let s = PauliString::from_index(idx, 2).unwrap();
            let letters: Vec<Pauli> = s.letters().iter().rev().copied().collect();
            let swapped = string_index(&PauliString::new(letters).unwrap());
            mirrored[0].values_mut()[swapped] = -src.values()[idx];
        }
    }
    let ds = random_dataset(101, &bound_spec, 3);
    let c_bound = cost(&bound_spec, &bound_params, &ds).unwrap();
    let c_twin = cost(&unbound_spec, &twin, &ds).unwrap();
    assert!((c_bound - c_twin).abs() < 1e-10, "twin construction");

    // Gradient of the bound net (both layers move together) differs from
    // perturbing only the source layer of the twin.
    let g_bound = gradient(&bound_spec, &bound_params, &ds, 1e-3).unwrap();
    let g_twin = gradient(&unbound_spec, &twin, &ds, 1e-3).unwrap();
    let one_side = &g_twin[0..16];
    let max_gap = g_bound
        .iter()
        .zip(one_side)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(max_gap > 1e-3, "shared gradient must differ from one-sided: {max_gap}");
}

#[test]
fn sgd_step_increases_cost_at_non_stationary_points() {
    let mut improved = 0;
    for seed in 0..20u64 {
        let (spec, params) = small_random_net(110 + seed, &[1, 1], &[]);
        let ds = random_dataset(130 + seed, &spec, 2);
        let before = cost(&spec, &params, &ds).unwrap();
        let g = gradient(&spec, &params, &ds, 1e-3).unwrap();
        let gnorm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if gnorm < 1e-6 {
            continue;
        }
        let mut flat = params.to_flat();
        let mut opt = OptimizerState::new(OptimizerConfig::sgd(), flat.len());
        opt.step(&mut flat, &g, 1e-3);
        let after = cost(&spec, &NetworkParams::from_flat(&spec, &flat).unwrap(), &ds).unwrap();
        assert!(after > before, "seed {seed}: {before} -> {after}");
        improved += 1;
    }
    assert!(improved >= 15);
}

#[test]
fn optimizers_match_scalar_reference_iterations() {
    // Three steps on a scalar parameter against an independent
    // reimplementation of each recurrence (minimizing -C).
    let grads = [0.8, -0.3, 0.5];
    let lr = 0.1;
    let (b1, b2, eps, decay) = (0.9, 0.999, 1e-8, 0.9);

    for kind in [
        OptimizerKind::Sgd,
        OptimizerKind::Adam,
        OptimizerKind::Adamax,
        OptimizerKind::Nadam,
        OptimizerKind::RmsProp,
    ] {
        let mut state = OptimizerState::new(OptimizerConfig::new(kind), 1);
        let mut p = [0.2f64];
        let mut expected = 0.2f64;
        let (mut m, mut v) = (0.0f64, 0.0f64);
        for (t, &ga) in grads.iter().enumerate() {
            state.step(&mut p, &[ga], lr);
            let g = -ga;
            let tt = (t + 1) as i32;
            match kind {
                OptimizerKind::Sgd => expected -= lr * g,
                OptimizerKind::Adam => {
                    m = b1 * m + (1.0 - b1) * g;
                    v = b2 * v + (1.0 - b2) * g * g;
                    let mh = m / (1.0 - b1.powi(tt));
                    let vh = v / (1.0 - b2.powi(tt));
                    expected -= lr * mh / (vh.sqrt() + eps);
                }
                OptimizerKind::Adamax => {
                    m = b1 * m + (1.0 - b1) * g;
                    v = (b2 * v).max(g.abs());
                    expected -= lr / (1.0 - b1.powi(tt)) * m / (v + eps);
                }
                OptimizerKind::Nadam => {
                    m = b1 * m + (1.0 - b1) * g;
                    v = b2 * v + (1.0 - b2) * g * g;
                    let mh = m / (1.0 - b1.powi(tt));
                    let vh = v / (1.0 - b2.powi(tt));
                    let look = b1 * mh + (1.0 - b1) * g / (1.0 - b1.powi(tt));
                    expected -= lr * look / (vh.sqrt() + eps);
                }
                OptimizerKind::RmsProp => {
                    v = decay * v + (1.0 - decay) * g * g;
                    expected -= lr * g / (v.sqrt() + eps);
                }
            }
            assert!((p[0] - expected).abs() < 1e-14, "{kind:?} step {tt}");
        }
    }
}

#[test]
fn optimizer_edge_cases() {
    // SGD with lr = 1 moves by exactly the gradient.
    let mut p = [0.0f64, 0.0];
    let mut opt = OptimizerState::new(OptimizerConfig::sgd(), 2);
    opt.step(&mut p, &[1.0, 0.0], 1.0);
    assert_eq!(p, [1.0, 0.0]);

    // Adam's first step has magnitude lr regardless of gradient scale.
    for scale in [1e-4, 1.0, 1e4] {
        let mut p = [0.0f64];
        let mut opt = OptimizerState::new(OptimizerConfig::adam(), 1);
        opt.step(&mut p, &[scale], 0.25);
        assert!((p[0] - 0.25).abs() < 1e-3, "scale {scale}: {}", p[0]);
    }

    // Zero gradient leaves parameters unchanged for every method.
    for kind in [
        OptimizerKind::Sgd,
        OptimizerKind::Adam,
        OptimizerKind::Adamax,
        OptimizerKind::Nadam,
        OptimizerKind::RmsProp,
    ] {
        let mut p = [0.7f64];
        let mut opt = OptimizerState::new(OptimizerConfig::new(kind), 1);
        opt.step(&mut p, &[0.0], 0.5);
        assert!((p[0] - 0.7).abs() < 1e-12, "{kind:?}");
    }
}

#[test]
fn init_params_schemes() {
    let spec = NetworkSpec::new(vec![3, 1, 3]).unwrap();
    let zeros = init_params(&spec, InitScheme::Zeros, 0);
    assert!(zeros.to_flat().iter().all(|&v| v == 0.0));

    let a = init_params(&spec, InitScheme::Uniform01, 42);
    let b = init_params(&spec, InitScheme::Uniform01, 42);
    assert_eq!(a, b);
    assert!(a.to_flat().iter().all(|&v| (0.0..1.0).contains(&v)));

    let c = init_params(&spec, InitScheme::Uniform01, 43);
    let differing = a
        .to_flat()
        .iter()
        .zip(c.to_flat())
        .filter(|(x, y)| (*x - y).abs() > 1e-12)
        .count();
    assert!(differing as f64 >= 0.99 * a.flat_len() as f64);
}

#[test]
fn session_validation_and_noop_run() {
    let (spec, params) = small_random_net(140, &[1, 1], &[]);
    let ds = random_dataset(141, &spec, 2);

    let bad = SessionConfig::new(0.1, 0);
    assert!(bad.validate().is_err());
    assert!(SessionConfig::new(-1.0, 5).validate().is_err());

    // One epoch at lr = 0 changes nothing and records one entry.
    let cfg = SessionConfig::new(0.0, 1);
    let before = params.to_flat();
    let (after, record) =
        run_session(&spec, params, &ds, &ds, &cfg, 7, 0, 0, &mut || 0).unwrap();
    assert_eq!(record.epochs.len(), 1);
    assert_eq!(after.to_flat(), before);
    assert_eq!(record.epochs[0].epoch, 1);
}

#[test]
fn session_training_improves_cost_and_is_deterministic() {
    let (spec, params) = small_random_net(142, &[1, 1], &[]);
    let mut r = rng(143);
    let psi = random_state(&mut r, 1);
    let ds = dataset(vec![
        pair(psi.clone(), psi.clone()),
        pair(PureState::basis(1, 0), PureState::basis(1, 0)),
    ]);
    let mut cfg = SessionConfig::new(0.15, 25);
    cfg.optimizer = OptimizerConfig::adam();
    cfg.batch_size = Some(1);
    let before = cost(&spec, &params, &ds).unwrap();
    let (after, record) =
        run_session(&spec, params.clone(), &ds, &ds, &cfg, 7, 0, 0, &mut || 0).unwrap();
    let final_cost = cost(&spec, &after, &ds).unwrap();
    assert!(final_cost > before + 0.05, "{before} -> {final_cost}");
    assert_eq!(record.epochs.len(), 25);

    let (after2, record2) =
        run_session(&spec, params, &ds, &ds, &cfg, 7, 0, 0, &mut || 0).unwrap();
    assert_eq!(after, after2);
    assert_eq!(record, record2);
}

#[test]
fn early_stopping_halts_on_plateau() {
    let (spec, params) = small_random_net(144, &[1, 1], &[]);
    let ds = random_dataset(145, &spec, 2);
    let mut cfg = SessionConfig::new(0.0, 50);
    cfg.early_stopping = Some(EarlyStopping { patience: 3, min_delta: 1e-4 });
    let (_, record) = run_session(&spec, params, &ds, &ds, &cfg, 7, 0, 0, &mut || 0).unwrap();
    assert_eq!(record.epochs.len(), 4);
}

#[test]
fn stop_threshold_halts_immediately_on_perfect_model() {
    let (spec, params) = perfect_qae_313();
    let mesh = build_validation_mesh(4, CodeKind::Bitflip3, None, 1).unwrap();
    let mut cfg = SessionConfig::new(1e-6, 50);
    cfg.stop_when_val_at_least = Some(0.999);
    let (_, record) =
        run_session(&spec, params, &mesh, &mesh, &cfg, 3, 0, 0, &mut || 0).unwrap();
    assert_eq!(record.epochs.len(), 1);
}

#[test]
fn schedule_chains_sessions_with_cumulative_epochs() {
    let (spec, params) = small_random_net(146, &[1, 1], &[]);
    let ds = random_dataset(147, &spec, 2);
    let sessions = vec![SessionConfig::new(0.05, 3), SessionConfig::new(0.01, 2)];
    let (_, record) =
        run_schedule(&spec, params, &ds, &ds, &sessions, 9, &mut || 0).unwrap();
    let epochs: Vec<usize> = record.epochs.iter().map(|e| e.epoch).collect();
    assert_eq!(epochs, vec![1, 2, 3, 4, 5]);
    let sessions_seen: Vec<usize> = record.epochs.iter().map(|e| e.session).collect();
    assert_eq!(sessions_seen, vec![0, 0, 0, 1, 1]);
}

#[test]
fn trailing_improvement_window() {
    let mut record = TrainRecord::default();
    for (i, v) in [0.1, 0.5, 0.52, 0.53, 0.531].iter().enumerate() {
        record.epochs.push(EpochStat {
            epoch: i + 1,
            session: 0,
            train_cost: *v,
            val_cost: *v,
            wall_ms: 0,
        });
    }
    assert!(record.trailing_improvement(10).is_none());
    let imp = record.trailing_improvement(3).unwrap();
    assert!((imp - 0.031).abs() < 1e-12);
}

#[test]
fn swap_test_exact_cases() {
    let mut r = rng(150);
    let psi = random_state(&mut r, 2);
    let est = swap_test_fidelity(&psi.to_density(), &psi, 500, &mut r).unwrap();
    assert_eq!(est.fidelity, 1.0);
    assert_eq!(est.p0_hat, 1.0);

    let zero = PureState::basis(1, 0);
    let one = PureState::basis(1, 1);
    let est = swap_test_fidelity(&one.to_density(), &zero, 20_000, &mut r).unwrap();
    assert!(est.fidelity.abs() < 0.05);
    assert!((est.raw - (2.0 * est.p0_hat - 1.0)).abs() < 1e-15);
    assert_eq!(est.fidelity, est.raw.clamp(0.0, 1.0));
}

#[test]
fn swap_test_deviation_bound_at_half_fidelity() {
    // F = 0.5 against I/2: |F̂ - 0.5| stays within 3σ of the binomial
    // spread in at least 99% of repetitions.
    let plus = crate::codes::CardinalState::Plus.state();
    let rho = DensityMatrix::maximally_mixed(1);
    let shots = 1000u64;
    let p0: f64 = 0.75;
    let bound = 3.0 * 2.0 * (p0 * (1.0 - p0) / shots as f64).sqrt();
    let mut r = rng(151);
    let mut inside = 0;
    let reps = 1000;
    for _ in 0..reps {
        let est = swap_test_fidelity(&rho, &plus, shots, &mut r).unwrap();
        if (est.fidelity - 0.5).abs() <= bound {
            inside += 1;
        }
    }
    assert!(inside as f64 >= 0.99 * reps as f64, "{inside}/{reps}");
}

#[test]
fn swap_test_circuit_reproduces_the_formula() {
    let mut r = rng(152);
    for n in [1usize, 2] {
        for _ in 0..5 {
            let target = random_state(&mut r, n);
            let state = random_state(&mut r, n);
            let mix = 0.3;
            let mut mat = state.to_density().matrix().scale(c(mix, 0.0));
            mat.add_scaled(
                DensityMatrix::maximally_mixed(n).matrix(),
                c(1.0 - mix, 0.0),
            );
            let rho = DensityMatrix::from_matrix(mat).unwrap();
            let f = fidelity_pure(&target, &rho).unwrap();
            let p0 = swap_test_p0_circuit(&rho, &target).unwrap();
            assert!((p0 - (0.5 + 0.5 * f)).abs() < 1e-10, "n={n}");
        }
    }
}

#[test]
fn embedded_channel_training_modes_are_exposed() {
    let ch = single_error_bitflip(0.75, 3).unwrap();
    let spec = NetworkSpec::new(vec![1, 3, 1])
        .unwrap()
        .with_binding(2, 1)
        .unwrap()
        .with_channel(1, ch)
        .unwrap();
    let (_, params) = small_random_net(153, &[1, 3, 1], &[(2, 1)]);
    let ds = crate::codes::build_train_selfpairs(
        6,
        &[crate::codes::CardinalState::Zero, crate::codes::CardinalState::Plus],
        5,
    )
    .unwrap();
    for mode in [
        EmbeddedTrainMode::Deterministic,
        EmbeddedTrainMode::SampledFixed,
        EmbeddedTrainMode::SampledPerEpoch,
    ] {
        let mut cfg = SessionConfig::new(0.05, 2);
        cfg.embedded_mode = mode;
        let (_, record) =
            run_session(&spec, params.clone(), &ds, &ds, &cfg, 11, 0, 0, &mut || 0).unwrap();
        assert_eq!(record.epochs.len(), 2, "{mode:?}");
        assert!(record.epochs.iter().all(|e| (0.0..=1.0).contains(&e.val_cost)));
    }
}
