use alloc::vec;

use core::f64::consts::{FRAC_PI_2, PI};

use super::*;
use crate::channels::single_error_bitflip;
use crate::network::NetworkSpec;
use crate::qcore::fidelity_pure;
use crate::testutil::{perfect_qae_313, random_state, rng, small_random_net};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn bloch_poles_and_equator() {
    let zero = bloch_state(BlochAngles { theta: 0.0, phi: 1.3 });
    assert!((zero.amplitudes()[0] - c(1.0, 0.0)).norm() < 1e-15);

    let one = bloch_state(BlochAngles { theta: PI, phi: 0.0 });
    assert!(one.amplitudes()[0].norm() < 1e-15);
    assert!((one.amplitudes()[1] - c(1.0, 0.0)).norm() < 1e-12);

    let plus = bloch_state(BlochAngles { theta: FRAC_PI_2, phi: 0.0 });
    let inv_s = 1.0 / 2.0f64.sqrt();
    assert!((plus.amplitudes()[0] - c(inv_s, 0.0)).norm() < 1e-12);
    assert!((plus.amplitudes()[1] - c(inv_s, 0.0)).norm() < 1e-12);

    assert!(BlochAngles::new(-0.1, 0.0).is_err());
    assert!(BlochAngles::new(0.0, 7.0).is_err());
}

#[test]
fn cardinal_states_are_pauli_eigenstates() {
    // ±i states: (|0⟩ ± i|1⟩)/√2
    let plus_i = CardinalState::PlusI.state();
    let inv_s = 1.0 / 2.0f64.sqrt();
    assert!((plus_i.amplitudes()[1] - c(0.0, inv_s)).norm() < 1e-12);
    let minus_i = CardinalState::MinusI.state();
    assert!((minus_i.amplitudes()[1] - c(0.0, -inv_s)).norm() < 1e-12);
    for s in CardinalState::ALL {
        assert_eq!(CardinalState::parse(s.label()).unwrap(), s);
    }
}

#[test]
fn encoders_are_isometries_with_orthogonal_logical_images() {
    let mut r = rng(81);
    for _ in 0..20 {
        let psi = random_state(&mut r, 1);
        for code in [CodeKind::Bitflip3, CodeKind::Ad4] {
            let enc = code.encode(&psi).unwrap();
            assert!((enc.norm() - 1.0).abs() <= 1e-12);
        }
    }
    let zero3 = encode_bitflip3(&PureState::basis(1, 0)).unwrap();
    let one3 = encode_bitflip3(&PureState::basis(1, 1)).unwrap();
    assert!(zero3.inner(&one3).norm() < 1e-15);
    assert!((zero3.amplitudes()[0b000] - c(1.0, 0.0)).norm() < 1e-15);
    assert!((one3.amplitudes()[0b111] - c(1.0, 0.0)).norm() < 1e-15);

    let zero4 = encode_ad4(&PureState::basis(1, 0)).unwrap();
    let one4 = encode_ad4(&PureState::basis(1, 1)).unwrap();
    assert!(zero4.inner(&one4).norm() < 1e-15);
    let inv_s = 1.0 / 2.0f64.sqrt();
    assert!((zero4.amplitudes()[0b0000] - c(inv_s, 0.0)).norm() < 1e-15);
    assert!((zero4.amplitudes()[0b1111] - c(inv_s, 0.0)).norm() < 1e-15);
    assert!((one4.amplitudes()[0b0011] - c(inv_s, 0.0)).norm() < 1e-15);
    assert!((one4.amplitudes()[0b1100] - c(inv_s, 0.0)).norm() < 1e-15);
}

#[test]
fn encoded_overlaps_recover_amplitudes() {
    let mut r = rng(82);
    let psi = random_state(&mut r, 1);
    let enc = encode_bitflip3(&psi).unwrap();
    let zero3 = encode_bitflip3(&PureState::basis(1, 0)).unwrap();
    let one3 = encode_bitflip3(&PureState::basis(1, 1)).unwrap();
    assert!((zero3.inner(&enc) - psi.amplitudes()[0]).norm() < 1e-12);
    assert!((one3.inner(&enc) - psi.amplitudes()[1]).norm() < 1e-12);
}

#[test]
fn train_bitflip_dataset_shape_and_determinism() {
    let ds = build_train_bitflip(120, 0.2, 7).unwrap();
    assert_eq!(ds.len(), 120);
    assert_eq!(ds.input_qubits(), 3);
    assert_eq!(ds.target_qubits(), 3);
    let again = build_train_bitflip(120, 0.2, 7).unwrap();
    assert_eq!(ds, again);
    let other = build_train_bitflip(120, 0.2, 8).unwrap();
    assert_ne!(ds, other);

    // p = 0: every input equals its target.
    let clean = build_train_bitflip(30, 0.0, 9).unwrap();
    for pair in &clean.pairs {
        assert_eq!(pair.meta.case, CaseLabel::NoError);
        for (a, b) in pair.input.amplitudes().iter().zip(pair.target.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}

#[test]
fn train_bitflip_label_frequencies_are_roughly_uniform() {
    // 3σ multinomial bound on 10^4 draws over six labels.
    let ds = build_train_bitflip(10_000, 0.2, 11).unwrap();
    let expected = ds.len() as f64 / 6.0;
    let sigma = (ds.len() as f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt();
    for cardinal in CardinalState::ALL {
        let count = ds.pairs.iter().filter(|p| p.meta.label == cardinal.label()).count();
        assert!(
            (count as f64 - expected).abs() <= 3.0 * sigma,
            "{}: {count}",
            cardinal.label()
        );
    }
}

#[test]
fn mesh_angles_match_grid_definition() {
    let n = 20;
    let angles = mesh_angles(n);
    assert_eq!(angles.len(), 400);
    let dt = PI / n as f64;
    let dp = 2.0 * PI / n as f64;
    for (idx, a) in angles.iter().enumerate() {
        let (i, j) = (idx / n, idx % n);
        assert!((a.theta - i as f64 * dt).abs() < 1e-15);
        assert!((a.phi - j as f64 * dp).abs() < 1e-15);
    }
}

#[test]
fn validation_mesh_construction() {
    let ds = build_validation_mesh(20, CodeKind::Bitflip3, None, 3).unwrap();
    assert_eq!(ds.len(), 400);
    for pair in &ds.pairs {
        for (a, b) in pair.input.amplitudes().iter().zip(pair.target.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }
    let ch = single_error_bitflip(0.2, 3).unwrap();
    let ds1 = build_validation_mesh(20, CodeKind::Bitflip3, Some(&ch), 3).unwrap();
    let ds2 = build_validation_mesh(20, CodeKind::Bitflip3, Some(&ch), 3).unwrap();
    assert_eq!(ds1, ds2);
    assert!(build_validation_mesh(1, CodeKind::Qubit, None, 0).is_err());
}

#[test]
fn ad_training_set_bias_limits() {
    let ds = build_train_ad(40, 0.1, 0.0, &[CardinalState::Zero, CardinalState::One], 5).unwrap();
    for pair in &ds.pairs {
        assert_eq!(pair.meta.case, CaseLabel::E0All);
    }
    let ds = build_train_ad(
        50,
        0.1,
        0.2,
        &[CardinalState::Zero, CardinalState::One, CardinalState::Plus],
        6,
    )
    .unwrap();
    assert_eq!(ds.len(), 50);
    assert_eq!(ds.input_qubits(), 4);
    assert!(ds.pairs.iter().any(|p| p.meta.case == CaseLabel::E0All));
}

#[test]
fn selfpairs_are_identity_pairs() {
    let set = [
        CardinalState::Zero,
        CardinalState::One,
        CardinalState::Plus,
        CardinalState::Minus,
    ];
    let ds = build_train_selfpairs(100, &set, 13).unwrap();
    assert_eq!(ds.len(), 100);
    for pair in &ds.pairs {
        assert_eq!(pair.input, pair.target);
        assert_eq!(pair.input.n_qubits(), 1);
    }
}

#[test]
fn syndrome_decoder_handles_all_single_errors() {
    let mut r = rng(83);
    for _ in 0..100 {
        let psi = random_state(&mut r, 1);
        let clean = encode_bitflip3(&psi).unwrap();
        let decoded = syndrome_decode3(&clean).unwrap();
        assert!((decoded.inner(&psi).norm() - 1.0).abs() < 1e-12);

        for flip in [0b100usize, 0b010, 0b001] {
            let mut amps = vec![c(0.0, 0.0); 8];
            for (i, a) in clean.amplitudes().iter().enumerate() {
                amps[i ^ flip] = *a;
            }
            let corrupted = PureState::new(amps).unwrap();
            let decoded = syndrome_decode3(&corrupted).unwrap();
            assert!((decoded.inner(&psi).norm() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn syndrome_decoder_two_flips_give_logical_error() {
    // a|110⟩ + b|001⟩ decodes to b|0⟩ + a|1⟩ by majority vote.
    let mut r = rng(84);
    let psi = random_state(&mut r, 1);
    let (a, b) = (psi.amplitudes()[0], psi.amplitudes()[1]);
    let mut amps = vec![c(0.0, 0.0); 8];
    amps[0b110] = a;
    amps[0b001] = b;
    let decoded = syndrome_decode3(&PureState::new(amps).unwrap()).unwrap();
    assert!((decoded.amplitudes()[0] - b).norm() < 1e-12);
    assert!((decoded.amplitudes()[1] - a).norm() < 1e-12);
}

#[test]
fn syndrome_decoder_rejects_states_outside_subspaces() {
    // |+⟩⊗|+⟩⊗|+⟩ overlaps every subspace but lies in none.
    let plus = CardinalState::Plus.state();
    let state = plus.tensor(&plus).tensor(&plus);
    assert!(matches!(syndrome_decode3(&state), Err(Error::DecodeFailure)));
}

#[test]
fn enumerated_failure_matches_closed_form() {
    for p in [0.0, 0.1, 0.2, 0.5, 0.75, 1.0] {
        let enumerated = bitflip3_failure_enumerated(p).unwrap();
        let formula = 3.0 * (1.0 - p) * p * p + p * p * p;
        assert!((enumerated - formula).abs() < 1e-14, "p={p}");
    }
}

#[test]
fn extract_codeword_identity_and_constructed_encoder() {
    // Zero parameters: the images are |0⟩|000⟩ and |1⟩|000⟩.
    let spec = NetworkSpec::new(vec![1, 3]).unwrap();
    let params = crate::network::NetworkParams::zeros(&spec);
    let (c0, c1) = extract_codeword(&spec, &params, 1).unwrap();
    assert!((c0.amplitudes()[0b0000] - c(1.0, 0.0)).norm() < 1e-12);
    assert!((c1.amplitudes()[0b1000] - c(1.0, 0.0)).norm() < 1e-12);

    // The hand-built re-encoding layer sends |d⟩|000⟩ to |0⟩|ddd⟩.
    let (spec313, params313) = perfect_qae_313();
    let (c0, c1) = extract_codeword(&spec313, &params313, 2).unwrap();
    assert!((c0.amplitudes()[0b0000] - c(1.0, 0.0)).norm() < 1e-10);
    assert!((c1.amplitudes()[0b0111] - c(1.0, 0.0)).norm() < 1e-10);
    assert_eq!(dominant_ket(&c0).0, 0b0000);
    assert_eq!(dominant_ket(&c1).0, 0b0111);

    // Orthonormality holds for arbitrary parameters by unitarity.
    let (spec131, params131) = small_random_net(85, &[1, 3, 1], &[(2, 1)]);
    let (c0, c1) = extract_codeword(&spec131, &params131, 1).unwrap();
    assert!(c0.inner(&c1).norm() <= 1e-6);
    assert!((c0.norm() - 1.0).abs() < 1e-10);
    assert!((c1.norm() - 1.0).abs() < 1e-10);

    // A layer with more than one input qubit is not an encoding layer.
    assert!(extract_codeword(&spec313, &params313, 1).is_err());
}

#[test]
fn perfect_qae_scores_one_on_clean_mesh() {
    let (spec, params) = perfect_qae_313();
    let ds = build_validation_mesh(5, CodeKind::Bitflip3, None, 1).unwrap();
    for pair in &ds.pairs {
        let out = crate::network::forward(&spec, &params, &pair.input.to_density()).unwrap();
        let f = fidelity_pure(&pair.target, &out).unwrap();
        assert!((f - 1.0).abs() < 1e-10);
    }
}
