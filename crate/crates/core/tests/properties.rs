//! Property suites: structural invariants under randomized inputs.

use proptest::prelude::*;

use spintomo::linalg::{
    hermitian_eigensystem, partial_transpose, unitary_from_generator, ComplexMatrix, Subsystem, C64,
};
use spintomo::program::{parse_program, render_program, Program};
use spintomo::sequence::{apply_pulse, dephase, Dephase, Pulse, SequenceStep};
use spintomo::spinsys::EndorPair;
use spintomo::states::{pseudo_boltzmann, DensityMatrix};
use spintomo::tomography::fidelity;
use spintomo::Transition;

fn any_transition() -> impl Strategy<Value = Transition> {
    prop_oneof![
        Just(Transition::EsrPlus),
        Just(Transition::EsrMinus),
        Just(Transition::Endor(EndorPair::P12)),
        Just(Transition::Endor(EndorPair::P34)),
        Just(Transition::Endor(EndorPair::P56)),
        Just(Transition::Endor(EndorPair::P78)),
    ]
}

fn hermitian8(seed: u64) -> ComplexMatrix {
    let mut state = seed | 1;
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 11) as f64) / ((1u64 << 53) as f64) * 2.0 - 1.0
    };
    let mut m = ComplexMatrix::zeros(8);
    for i in 0..8 {
        m.set(i, i, C64::new(next(), 0.0));
        for j in (i + 1)..8 {
            let z = C64::new(next(), next());
            m.set(i, j, z);
            m.set(j, i, z.conj());
        }
    }
    m
}

proptest! {
    #[test]
    fn pulses_preserve_trace_and_hermiticity(
        t in any_transition(),
        angle in -10.0f64..10.0,
        phase in -10.0f64..10.0,
    ) {
        let rho = pseudo_boltzmann();
        let out = apply_pulse(&rho, &Pulse::new(t, angle, phase));
        prop_assert!((out.trace() - rho.trace()).abs() < 1e-12);
        prop_assert!(out.matrix().hermitian_error() < 1e-12);
    }

    #[test]
    fn generated_unitaries_are_unitary(seed in any::<u64>(), angle in -10.0f64..10.0) {
        let g = hermitian8(seed);
        let u = unitary_from_generator(&g, angle).unwrap();
        prop_assert!(u.unitarity_error() < 1e-12);
    }

    #[test]
    fn eigensystem_reconstructs(seed in any::<u64>()) {
        let m = hermitian8(seed);
        let eig = hermitian_eigensystem(&m).unwrap();
        let lam = ComplexMatrix::from_real_diag(&eig.values);
        let rebuilt = eig.vectors.matmul(&lam).matmul(&eig.vectors.adjoint());
        prop_assert!(rebuilt.max_abs_diff(&m) < 1e-10);
        let sum: f64 = eig.values.iter().sum();
        prop_assert!((sum - m.trace().re).abs() < 1e-10);
    }

    #[test]
    fn partial_transpose_involution_and_trace(seed in any::<u64>()) {
        let m = hermitian8(seed);
        let pt = partial_transpose(&m, (4, 2), Subsystem::Second).unwrap();
        prop_assert!((pt.trace() - m.trace()).norm() < 1e-14);
        prop_assert_eq!(partial_transpose(&pt, (4, 2), Subsystem::Second).unwrap(), m);
    }

    #[test]
    fn dephasing_is_idempotent(seed in any::<u64>(), all in any::<bool>()) {
        let rho = DensityMatrix::pseudo(hermitian8(seed)).unwrap();
        let mode = if all { Dephase::All } else { Dephase::EsrOnly };
        let once = dephase(&rho, mode);
        let twice = dephase(&once, mode);
        prop_assert_eq!(once.matrix(), twice.matrix());
        for i in 0..8 {
            prop_assert!((once.matrix().get(i, i) - rho.matrix().get(i, i)).norm() < 1e-15);
        }
    }

    #[test]
    fn serialization_round_trips_bit_exactly(seed in any::<u64>(), pseudo in any::<bool>()) {
        let m = hermitian8(seed);
        let rho = if pseudo {
            DensityMatrix::pseudo(m).unwrap()
        } else {
            // Shift/normalize into a physical state.
            let eig = hermitian_eigensystem(&m).unwrap();
            let shift = -eig.values[0] + 0.1;
            let shifted = &m + &ComplexMatrix::identity(8).scale_re(shift);
            let tr = shifted.trace().re;
            DensityMatrix::physical(shifted.scale_re(1.0 / tr)).unwrap()
        };
        let back = DensityMatrix::from_json(&rho.to_json()).unwrap();
        prop_assert_eq!(back.matrix().data(), rho.matrix().data());
        prop_assert_eq!(back.is_pseudo(), rho.is_pseudo());
    }

    #[test]
    fn fidelity_bounded_and_exact_on_equal_inputs(seed in any::<u64>()) {
        let m = hermitian8(seed);
        let eig = hermitian_eigensystem(&m).unwrap();
        let shift = -eig.values[0] + 0.05;
        let shifted = &m + &ComplexMatrix::identity(8).scale_re(shift);
        let rho = DensityMatrix::physical(shifted.scale_re(1.0 / shifted.trace().re)).unwrap();
        prop_assert_eq!(fidelity(&rho, &rho).unwrap(), 1.0);
        prop_assert!(fidelity(&rho, &rho).unwrap() <= 1.0);
    }

    #[test]
    fn parser_never_panics(text in "\\PC*") {
        let _ = parse_program(&text);
    }

    #[test]
    fn parser_never_panics_on_statement_shaped_input(
        stmt in "(pulse|wait|x) (esr[+-]|endor[0-9]-[0-9]|[a-z]+) ?(angle=-?[0-9]{1,6}(deg|rad|ns|)|[0-9]*) ?(phase=(x|y|-x|-y|[0-9]+deg)|dephase=(all|esr|none|x)|)"
    ) {
        let _ = parse_program(&stmt);
    }

    #[test]
    fn canonical_programs_round_trip_exactly(
        steps in prop::collection::vec(
            (any_transition(), -3600i32..3600, 0u8..4, 1u32..1_000_000, 0u8..3),
            1..12,
        )
    ) {
        // Build a program on the canonical grid: angles in multiples of
        // 0.01 degrees, named phases, integer-nanosecond waits.
        let mut program_steps = Vec::new();
        for (t, angle_cdeg, phase_idx, wait_ns, dephase_idx) in steps {
            let phase: f64 = [0.0, 90.0, 180.0, 270.0][phase_idx as usize];
            program_steps.push(SequenceStep::Pulse(Pulse::new(
                t,
                (angle_cdeg as f64 / 100.0).to_radians(),
                phase.to_radians(),
            )));
            let dephase = [Dephase::None, Dephase::All, Dephase::EsrOnly][dephase_idx as usize];
            program_steps.push(SequenceStep::Wait {
                duration: wait_ns as f64 * 1e-9,
                dephase,
            });
        }
        let p = Program {
            name: "prop".into(),
            metadata: vec![("name".into(), "prop".into())],
            steps: program_steps,
        };
        // One canonicalization pass, then exact round trips.
        let canonical = parse_program(&render_program(&p)).unwrap();
        let text = render_program(&canonical);
        let reparsed = parse_program(&text).unwrap();
        prop_assert_eq!(&reparsed, &canonical);
        prop_assert_eq!(render_program(&reparsed), text);
    }
}
