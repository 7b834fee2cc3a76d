//! Property tests for the algebraic invariants the simulator relies on.

use num_complex::Complex64;
use proptest::prelude::*;

use qsubdiv::differentiator::{
    build_measurement_pair, chain_success_probability, make_plan, run_chain, svd_2x2, ChainMode,
    TwoDimState,
};
use qsubdiv::mat2::Mat2;
use qsubdiv::statevec::{OracleSpec, QuantumState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn normalized_one_qubit() -> impl Strategy<Value = TwoDimState> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0).prop_filter_map(
        "norm too small",
        |(re0, im0, re1, im1)| {
            let a0 = Complex64::new(re0, im0);
            let a1 = Complex64::new(re1, im1);
            let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
            if norm < 1e-3 {
                return None;
            }
            TwoDimState::new(a0 / norm, a1 / norm).ok()
        },
    )
}

fn random_state(qubits: usize) -> impl Strategy<Value = QuantumState> {
    let dim = 1usize << qubits;
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim).prop_filter_map(
        "norm too small",
        |pairs| {
            let norm_sqr: f64 = pairs.iter().map(|(re, im)| re * re + im * im).sum();
            if norm_sqr < 1e-6 {
                return None;
            }
            let norm = norm_sqr.sqrt();
            let amps = pairs
                .into_iter()
                .map(|(re, im)| Complex64::new(re / norm, im / norm))
                .collect();
            QuantumState::from_amplitudes(amps).ok()
        },
    )
}

proptest! {
    // Unitary steps preserve the norm.
    #[test]
    fn hadamard_and_oracle_preserve_norm(
        n in 1usize..8,
        prefix_bits in proptest::collection::vec(0u8..2, 0..7),
        target_seed in any::<u64>(),
    ) {
        let j = prefix_bits.len().min(n);
        let prefix = &prefix_bits[..j];
        let spread = QuantumState::prepare_prefix_state(prefix, n)
            .unwrap()
            .apply_partial_hadamard(j)
            .unwrap();
        prop_assert!((spread.norm_sqr() - 1.0).abs() < 1e-10);

        let mut oracle = OracleSpec::new(n, target_seed % (1 << n)).unwrap();
        let queried = spread.append_zero_qubit().unwrap().apply_oracle(&mut oracle).unwrap();
        prop_assert!((queried.norm_sqr() - 1.0).abs() < 1e-10);
    }

    // Applying the oracle twice is the identity.
    #[test]
    fn oracle_involution(state in random_state(4), target in 0u64..8) {
        let mut oracle = OracleSpec::new(3, target).unwrap();
        let twice = state
            .apply_oracle(&mut oracle)
            .unwrap()
            .apply_oracle(&mut oracle)
            .unwrap();
        for i in 0..state.amplitudes().len() {
            prop_assert!((twice.amplitudes()[i] - state.amplitudes()[i]).norm() < 1e-12);
        }
    }

    // Every populated basis state after the partial Hadamard shares the
    // input's fixed prefix.
    #[test]
    fn partial_hadamard_preserves_prefix(
        n in 1usize..9,
        bits in proptest::collection::vec(0u8..2, 0..8),
    ) {
        let j = bits.len().min(n);
        let prefix = &bits[..j];
        let state = QuantumState::prepare_prefix_state(prefix, n).unwrap();
        let spread = state.apply_partial_hadamard(j).unwrap();
        let prefix_value: u64 = prefix
            .iter()
            .fold(0, |acc, &b| (acc << 1) | u64::from(b));
        for (i, amp) in spread.amplitudes().iter().enumerate() {
            if amp.norm_sqr() > 0.0 {
                prop_assert_eq!((i as u64) >> (n - j), prefix_value);
            }
        }
    }

    // Selective renormalization leaves a unit-norm state whenever the
    // branch weight is meaningful.
    #[test]
    fn renormalized_operator_output_is_unit(
        state in normalized_one_qubit(),
        entries in proptest::collection::vec(-2.0f64..2.0, 8),
    ) {
        let op = [
            [Complex64::new(entries[0], entries[1]), Complex64::new(entries[2], entries[3])],
            [Complex64::new(entries[4], entries[5]), Complex64::new(entries[6], entries[7])],
        ];
        let qs = QuantumState::from_amplitudes(state.amplitudes().to_vec()).unwrap();
        if let Ok((out, p)) = qs.apply_qubit_operator(0, &op, true) {
            if p > 1e-12 {
                prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
            }
        }
    }

    // The branch weights of a complete measurement pair sum to one on any
    // normalized state.
    #[test]
    fn law_of_total_probability(state in normalized_one_qubit(), j in 1u32..=30) {
        let plan = make_plan(1u64 << j, None).unwrap();
        let qs = QuantumState::from_amplitudes(state.amplitudes().to_vec()).unwrap();
        let (_, p0) = qs
            .apply_qubit_operator(0, &plan.pair().m0().to_complex(), false)
            .unwrap();
        let (_, p1) = qs
            .apply_qubit_operator(0, &plan.pair().m1().to_complex(), false)
            .unwrap();
        prop_assert!((p0 + p1 - 1.0).abs() < 1e-10);
    }

    // Completeness and the swap identity hold for any power-of-two root.
    #[test]
    fn measurement_pair_completeness(j in 1u32..=30, v_exp in 0u32..=6) {
        let svd = svd_2x2(&qsubdiv::differentiator::build_d(1u64 << j).unwrap()).unwrap();
        let pair = build_measurement_pair(svd.v(), 1 << v_exp).unwrap();
        let m0 = pair.m0();
        let m1 = pair.m1();
        for idx in 0..2 {
            let a = m0.0[idx][idx];
            let b = m1.0[idx][idx];
            prop_assert!((a * a + b * b - 1.0).abs() < 1e-12);
            prop_assert!(0.0 < a && a < 1.0);
        }
        prop_assert!((m1.0[0][0] - m0.0[1][1]).abs() < 1e-12);
        prop_assert!((m1.0[1][1] - m0.0[0][0]).abs() < 1e-12);
    }

    // Forced-mode step probabilities telescope to the closed form for any
    // input state, not just the models.
    #[test]
    fn telescoping_product(state in normalized_one_qubit(), j in 1u32..=20) {
        let plan = make_plan(1u64 << j, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let forced = run_chain(&state, &plan, ChainMode::Forced, &mut rng).unwrap();
        let closed = chain_success_probability(&plan, &state);
        if closed > 1e-300 {
            prop_assert!(
                (forced.chain_probability - closed).abs() <= closed * 1e-12,
                "{} vs {}", forced.chain_probability, closed
            );
        }
    }

    // Closed-form SVD of arbitrary nonsingular matrices: orthogonal factors,
    // ordered positive singular values, faithful reconstruction.
    #[test]
    fn svd_reconstructs_random_matrices(
        a in -10.0f64..10.0,
        b in -10.0f64..10.0,
        c in -10.0f64..10.0,
        d in -10.0f64..10.0,
    ) {
        let m = Mat2::new(a, b, c, d);
        prop_assume!(m.det().abs() > 1e-6);
        let svd = svd_2x2(&m).unwrap();
        prop_assert!(svd.q().orthogonality_defect() < 1e-12);
        prop_assert!(svd.r().orthogonality_defect() < 1e-12);
        prop_assert!(svd.sigma1() >= svd.sigma2());
        prop_assert!(svd.sigma2() > 0.0);
        let scale = m.max_abs().max(1.0);
        prop_assert!(svd.reconstruct().max_abs_diff(&m) / scale < 1e-12);
    }
}
