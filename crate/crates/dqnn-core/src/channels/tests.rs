use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::qcore::PureState;
use crate::testutil::{random_state, rng};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The four-qubit code state (a/√2)(|0000⟩+|1111⟩) + (b/√2)(|0011⟩+|1100⟩),
/// built inline so these tests do not depend on the codes module.
fn code_state(a: C64, b: C64) -> PureState {
    let s = 2.0f64.sqrt();
    let mut amps = vec![c(0.0, 0.0); 16];
    amps[0b0000] = a / s;
    amps[0b1111] = a / s;
    amps[0b0011] = b / s;
    amps[0b1100] = b / s;
    PureState::new(amps).unwrap()
}

fn random_logical_pair(r: &mut rand_chacha::ChaCha12Rng) -> (C64, C64) {
    let psi = random_state(r, 1);
    (psi.amplitudes()[0], psi.amplitudes()[1])
}

#[test]
fn bitflip_iid_degenerate_probabilities() {
    let id = bitflip_iid(0.0, 2).unwrap();
    assert_eq!(id.len(), 1);
    assert!(id.op(0).max_abs_diff(&CMatrix::identity(4)) < 1e-15);
    assert_eq!(id.case(0), CaseLabel::NoError);

    let flip = bitflip_iid(1.0, 1).unwrap();
    assert_eq!(flip.len(), 1);
    assert_eq!(flip.case(0), CaseLabel::Flip(1));
    let x = crate::pauli::Pauli::X.matrix();
    assert!(flip.op(0).max_abs_diff(&x) < 1e-15);
}

#[test]
fn bitflip_iid_single_flip_weight() {
    // Binomial oracle: P(exactly one flip) = 3 p (1-p)^2.
    let ch = bitflip_iid(0.2, 3).unwrap();
    let single: f64 = (0..ch.len())
        .filter(|&k| matches!(ch.case(k), CaseLabel::Flip(_)))
        .map(|k| {
            ch.op(k)
                .matvec(PureState::basis(3, 0).amplitudes())
                .iter()
                .map(|a| a.norm_sqr())
                .sum::<f64>()
        })
        .sum();
    assert!((single - 3.0 * 0.2 * 0.64).abs() < 1e-14);
}

#[test]
fn constructors_are_complete() {
    for p in [0.0, 0.2, 0.5, 0.75, 1.0] {
        for n in 1..=3 {
            assert!(bitflip_iid(p, n).unwrap().completeness_deviation() <= COMPLETENESS_TOL);
            assert!(
                single_error_bitflip(p, n).unwrap().completeness_deviation()
                    <= COMPLETENESS_TOL
            );
        }
        assert!(amplitude_damping_iid(p, 4).unwrap().completeness_deviation() <= COMPLETENESS_TOL);
    }
    assert!(matches!(bitflip_iid(1.2, 1), Err(Error::InvalidProbability(_))));
    assert!(matches!(
        single_error_bitflip(-0.1, 3),
        Err(Error::InvalidProbability(_))
    ));
    assert!(matches!(amplitude_damping(2.0), Err(Error::InvalidProbability(_))));
}

#[test]
fn single_error_outcomes_on_code_state() {
    // At p = 0.75 on three qubits the four outcomes are equiprobable and are
    // exactly the no-flip/one-flip corruptions of a|000⟩ + b|111⟩.
    let mut r = rng(31);
    let (a, b) = random_logical_pair(&mut r);
    let mut amps = vec![c(0.0, 0.0); 8];
    amps[0b000] = a;
    amps[0b111] = b;
    let psi = PureState::new(amps).unwrap();
    let ch = single_error_bitflip(0.75, 3).unwrap();
    assert_eq!(ch.len(), 4);
    let expected_supports = [
        (0b000usize, 0b111usize), // no error
        (0b100, 0b011),           // flip qubit 1
        (0b010, 0b101),           // flip qubit 2
        (0b001, 0b110),           // flip qubit 3
    ];
    for (k, &(ket_a, ket_b)) in expected_supports.iter().enumerate() {
        let branch = ch.op(k).matvec(psi.amplitudes());
        let prob: f64 = branch.iter().map(|x| x.norm_sqr()).sum();
        assert!((prob - 0.25).abs() < 1e-12);
        let normalized: Vec<C64> = branch.iter().map(|x| x / prob.sqrt()).collect();
        for (i, amp) in normalized.iter().enumerate() {
            let want = if i == ket_a {
                a
            } else if i == ket_b {
                b
            } else {
                c(0.0, 0.0)
            };
            assert!((amp - want).norm() < 1e-12, "op {k} ket {i}");
        }
    }
}

#[test]
fn amplitude_damping_matrices_and_limits() {
    let ch = amplitude_damping(0.0).unwrap();
    assert_eq!(ch.len(), 1);
    assert!(ch.op(0).max_abs_diff(&CMatrix::identity(2)) < 1e-15);

    let ch = amplitude_damping(0.1).unwrap();
    assert_eq!(ch.len(), 2);
    let e0 = ch.op(ch.find_case(CaseLabel::E0All).unwrap());
    let e1 = ch.op(ch.find_case(CaseLabel::Damp(1)).unwrap());
    assert!((e0[(1, 1)].re - 0.9f64.sqrt()).abs() < 1e-15);
    assert!((e1[(0, 1)].re - 0.1f64.sqrt()).abs() < 1e-15);

    // ‖E_k|1⟩‖² oracle: decay with probability γ.
    let one = PureState::basis(1, 1);
    let p_decay: f64 = e1.matvec(one.amplitudes()).iter().map(|a| a.norm_sqr()).sum();
    let p_stay: f64 = e0.matvec(one.amplitudes()).iter().map(|a| a.norm_sqr()).sum();
    assert!((p_decay - 0.1).abs() < 1e-14);
    assert!((p_stay - 0.9).abs() < 1e-14);

    // γ = 1: |1⟩ decays to |0⟩ with certainty.
    let ch = amplitude_damping(1.0).unwrap();
    let mut r = rng(32);
    let out = sample_corruption(&ch, &one, &mut r).unwrap();
    assert!((out.probability - 1.0).abs() < 1e-12);
    assert!((out.state.amplitudes()[0] - c(1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn apply_kraus_hand_sums() {
    let rho0 = PureState::basis(1, 0).to_density();
    let half = apply_kraus(&bitflip_iid(0.5, 1).unwrap(), &rho0).unwrap();
    assert!(half.matrix().max_abs_diff(DensityMatrix::maximally_mixed(1).matrix()) < 1e-14);

    let gamma = 0.3;
    let mixed = DensityMatrix::maximally_mixed(1);
    let out = apply_kraus(&amplitude_damping(gamma).unwrap(), &mixed).unwrap();
    let expected = CMatrix::from_real_rows(&[
        &[0.5 + gamma / 2.0, 0.0],
        &[0.0, (1.0 - gamma) / 2.0],
    ]);
    assert!(out.matrix().max_abs_diff(&expected) < 1e-14);
    assert!((out.trace().re - 1.0).abs() <= 1e-12);

    let id = bitflip_iid(0.0, 1).unwrap();
    let same = apply_kraus(&id, &mixed).unwrap();
    assert!(same.matrix().max_abs_diff(mixed.matrix()) < 1e-15);
}

#[test]
fn apply_kraus_matches_enumerated_outcome_mixture() {
    // Σ_k p_k |out_k⟩⟨out_k| over every branch equals the deterministic map.
    let mut r = rng(33);
    for _ in 0..5 {
        let psi = random_state(&mut r, 3);
        for ch in [
            bitflip_iid(0.2, 3).unwrap(),
            single_error_bitflip(0.75, 3).unwrap(),
            amplitude_damping_iid(0.1, 3).unwrap(),
        ] {
            let mut mixture = CMatrix::zeros(8);
            for k in 0..ch.len() {
                let branch = ch.op(k).matvec(psi.amplitudes());
                let p: f64 = branch.iter().map(|a| a.norm_sqr()).sum();
                if p == 0.0 {
                    continue;
                }
                let normalized = PureState::new(branch).unwrap().normalized();
                mixture.add_scaled(normalized.to_density().matrix(), c(p, 0.0));
            }
            let direct = apply_kraus(&ch, &psi.to_density()).unwrap();
            assert!(direct.matrix().max_abs_diff(&mixture) < 1e-10);
        }
    }
}

#[test]
fn sampling_identity_channel_returns_input() {
    let mut r = rng(34);
    let psi = random_state(&mut r, 2);
    let ch = bitflip_iid(0.0, 2).unwrap();
    let out = sample_corruption(&ch, &psi, &mut r).unwrap();
    assert!((out.probability - 1.0).abs() < 1e-12);
    assert_eq!(out.case, CaseLabel::NoError);
    for (x, y) in out.state.amplitudes().iter().zip(psi.amplitudes()) {
        assert!((x - y).norm() < 1e-12);
    }
}

#[test]
fn sampling_is_reproducible_per_seed() {
    let psi = PureState::basis(3, 0);
    let ch = single_error_bitflip(0.75, 3).unwrap();
    let draw = |seed| {
        let mut r = rng(seed);
        (0..10)
            .map(|_| sample_corruption(&ch, &psi, &mut r).unwrap().case)
            .collect::<Vec<_>>()
    };
    assert_eq!(draw(7), draw(7));
    assert_ne!(draw(7), draw(8));
}

#[test]
fn single_error_sampling_frequencies() {
    // Monte-Carlo check against the exact quarter probabilities.
    let psi = PureState::basis(3, 0);
    let ch = single_error_bitflip(0.75, 3).unwrap();
    let mut r = rng(35);
    let n = 100_000;
    let mut counts = [0usize; 4];
    for _ in 0..n {
        let out = sample_corruption(&ch, &psi, &mut r).unwrap();
        let idx = match out.case {
            CaseLabel::NoError => 0,
            CaseLabel::Flip(q) => q,
            _ => unreachable!(),
        };
        counts[idx] += 1;
    }
    for count in counts {
        let freq = count as f64 / n as f64;
        assert!((freq - 0.25).abs() < 0.01, "freq {freq}");
    }
}

#[test]
fn ad_constructor_matches_kraus_string_oracle() {
    // Acceptance-grade check at unit-test scale: the closed-form kets equal
    // the matching Kraus string applied to the code state.
    let mut r = rng(36);
    for gamma in [0.05, 0.1, 0.3] {
        let ch = amplitude_damping_iid(gamma, 4).unwrap();
        for _ in 0..10 {
            let (a, b) = random_logical_pair(&mut r);
            let psi = code_state(a, b);
            for which in [
                CaseLabel::E0All,
                CaseLabel::Damp(1),
                CaseLabel::Damp(2),
                CaseLabel::Damp(3),
                CaseLabel::Damp(4),
            ] {
                let built = ad_corruption_state(a, b, which, gamma).unwrap();
                let k = ch.find_case(which).unwrap();
                let branch = ch.op(k).matvec(psi.amplitudes());
                let p: f64 = branch.iter().map(|x| x.norm_sqr()).sum();
                assert!((built.probability - p).abs() < 1e-12, "{which} γ={gamma}");
                for (i, want) in branch.iter().enumerate() {
                    let got = built.state.amplitudes()[i] * c(p.sqrt(), 0.0);
                    assert!((got - want).norm() < 1e-12, "{which} γ={gamma} ket {i}");
                }
            }
        }
    }
}

#[test]
fn ad_constructor_named_examples() {
    // b = 1, damping on qubit 1: the a-branch vanishes, leaving |0100⟩.
    let out = ad_corruption_state(c(0.0, 0.0), c(1.0, 0.0), CaseLabel::Damp(1), 0.1).unwrap();
    assert!((out.state.amplitudes()[0b0100] - c(1.0, 0.0)).norm() < 1e-12);
    assert!((out.probability - 0.1 * 0.9 / 2.0).abs() < 1e-12);

    // γ → 0: the no-damping outcome approaches the clean code state.
    let out = ad_corruption_state(c(1.0, 0.0), c(0.0, 0.0), CaseLabel::E0All, 1e-9).unwrap();
    assert!((out.probability - 1.0).abs() < 1e-8);
    let clean = code_state(c(1.0, 0.0), c(0.0, 0.0));
    for (x, y) in out.state.amplitudes().iter().zip(clean.amplitudes()) {
        assert!((x - y).norm() < 1e-8);
    }

    // a = 1, damping on qubit 1 leaves |0111⟩ with the Kraus-string weight.
    let out = ad_corruption_state(c(1.0, 0.0), c(0.0, 0.0), CaseLabel::Damp(1), 0.1).unwrap();
    assert!((out.state.amplitudes()[0b0111] - c(1.0, 0.0)).norm() < 1e-12);
    let expected_p = 0.1 * 0.9 / 2.0 * 0.9 * 0.9;
    assert!((out.probability - expected_p).abs() < 1e-12);

    assert!(matches!(
        ad_corruption_state(c(1.0, 0.0), c(0.0, 0.0), CaseLabel::Flip(1), 0.1),
        Err(Error::InvalidCaseLabel)
    ));
    assert!(ad_corruption_state(c(1.0, 0.0), c(1.0, 0.0), CaseLabel::E0All, 0.1).is_err());
}

#[test]
fn biased_sampler_limits_and_frequencies() {
    let mut r = rng(37);
    let (a, b) = random_logical_pair(&mut r);

    for _ in 0..50 {
        let out = biased_ad_sampler(0.0, 0.1, a, b, &mut r).unwrap();
        assert_eq!(out.case, CaseLabel::E0All);
    }

    let n = 100_000;
    let mut damp_counts = [0usize; 4];
    for _ in 0..n {
        let out = biased_ad_sampler(1.0, 0.1, a, b, &mut r).unwrap();
        match out.case {
            CaseLabel::Damp(q) => damp_counts[q - 1] += 1,
            other => panic!("unexpected case {other}"),
        }
    }
    for count in damp_counts {
        assert!((count as f64 / n as f64 - 0.25).abs() < 0.01);
    }

    let mut e0 = 0usize;
    for _ in 0..n {
        if biased_ad_sampler(0.8, 0.1, a, b, &mut r).unwrap().case == CaseLabel::E0All {
            e0 += 1;
        }
    }
    assert!((e0 as f64 / n as f64 - 0.2).abs() < 0.01);
}

#[test]
fn iid_and_single_error_models_differ() {
    // Same p, different channels: distinguish on the |000⟩⟨000| diagonals.
    let rho = PureState::basis(3, 0).to_density();
    let iid = apply_kraus(&bitflip_iid(0.2, 3).unwrap(), &rho).unwrap();
    let single = apply_kraus(&single_error_bitflip(0.2, 3).unwrap(), &rho).unwrap();
    let mut max_diag_gap = 0.0f64;
    for i in 0..8 {
        max_diag_gap = max_diag_gap.max((iid.matrix()[(i, i)].re - single.matrix()[(i, i)].re).abs());
    }
    assert!(max_diag_gap > 0.01);
}
