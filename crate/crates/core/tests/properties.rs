//! Cross-module invariants: kernel-vs-dense agreement over every
//! constructor, and consistency of the numerically induced gates with the
//! symbolic frame predictions.

use acsqc_core::evolve::{induced_logical_unitary, process_fidelity, IntegratorOptions};
use acsqc_core::frame::{chain_frame, two_qubit_frame, StabilizerFrame};
use acsqc_core::gates;
use acsqc_core::hamiltonian::{
    build_chain_h0, build_prep_chain, build_twisted_chain, build_two_qubit_h2, local_field_term,
    HamiltonianSpec,
};
use acsqc_core::schedule::{chain_frames, chain_plan, h2_frames, h2_plan, ChainStyle, Schedule, ScheduleShape};
use acsqc_core::{PauliString, RotationProfile};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

type C64 = Complex64;

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> DVector<C64> {
    let dim = 1usize << n;
    let mut v = DVector::from_fn(dim, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let norm = v.norm();
    v /= C64::new(norm, 0.0);
    v
}

/// Matrix-free application agrees with the dense matrix on 100 random
/// vectors for every constructor, n <= 8.
#[test]
fn apply_matches_dense_for_every_constructor() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD15C);
    let mut specs: Vec<HamiltonianSpec> = Vec::new();
    for n in 3..=8 {
        specs.push(build_chain_h0(n, 1.0).unwrap());
        specs.push(build_prep_chain(n, 1.0).unwrap());
        let interior: Vec<f64> = (0..n - 2).map(|_| rng.random_range(-3.0..3.0)).collect();
        let profile = RotationProfile::from_interior(n, &interior).unwrap();
        specs.push(build_twisted_chain(n, 1.0, &profile).unwrap());
    }
    specs.push(build_two_qubit_h2(1.0).unwrap());
    specs.push(local_field_term(4, 3, 0.77, 1.0).unwrap());

    let mut checks = 0usize;
    for h in &specs {
        let dense = h.dense_matrix().unwrap();
        let per_spec = (100 / specs.len()).max(5);
        for _ in 0..per_spec {
            let v = random_state(&mut rng, h.n_qubits());
            let fast = h.apply(&v).unwrap();
            let slow = &dense * &v;
            assert!(
                (fast - slow).norm() <= 1e-12,
                "kernel/dense disagreement for a {}-qubit spec",
                h.n_qubits()
            );
            checks += 1;
        }
    }
    assert!(checks >= 100);
}

/// Translates the canonicalized image of an input logical operator into a
/// signed word on the output frame's logical qubits.
fn logical_image(
    image: &PauliString,
    out_frame: &StabilizerFrame,
    final_frame: &StabilizerFrame,
) -> PauliString {
    let k = out_frame.n_logical_qubits();
    let mut word = PauliString::identity(k);
    let mut physical = PauliString::identity(image.n_qubits());
    for (l, pair) in out_frame.logicals().iter().enumerate() {
        let has_x = !image.commutes_with(&pair.z_op).unwrap();
        let has_z = !image.commutes_with(&pair.x_op).unwrap();
        if has_x {
            word = word
                .mul(&PauliString::single(k, l + 1, acsqc_core::Axis::X))
                .unwrap();
            physical = physical.mul(&pair.x_op).unwrap();
        }
        if has_z {
            word = word
                .mul(&PauliString::single(k, l + 1, acsqc_core::Axis::Z))
                .unwrap();
            physical = physical.mul(&pair.z_op).unwrap();
        }
    }
    // The leftover must reduce to ±identity over the final stabilizer group;
    // its sign transfers to the logical word.
    let residual = image.mul(&physical.adjoint()).unwrap();
    let reduced = final_frame.canonicalize_logical(&residual).unwrap();
    assert!(
        reduced.is_identity_word(),
        "image {image} is not a product of output logicals (residual {reduced})"
    );
    if reduced.phase() == acsqc_core::Phase::MINUS_ONE {
        word.negated()
    } else {
        word
    }
}

/// The numerically induced unitary conjugates logical Paulis exactly as the
/// dragging-update replay predicts, for chains and the two-qubit block.
#[test]
fn induced_gates_match_symbolic_frame_predictions() {
    let opts = IntegratorOptions {
        min_substeps: 500,
        ..Default::default()
    };
    let sched = Schedule::new(ScheduleShape::Linear, 50.0).unwrap();

    // Chains n = 3, 4, 5.
    for n in 3..=5 {
        let plan = chain_plan(n, 1.0, &ChainStyle::Plain, sched).unwrap();
        let (in_frame, out_frame) = chain_frames(n).unwrap();
        let start = chain_frame(n).unwrap();
        let frames = plan.replay_symbolic(&start).unwrap();
        let final_frame = frames.last().unwrap().with_canonical_logicals().unwrap();

        let images: Vec<(PauliString, PauliString)> = final_frame
            .logicals()
            .iter()
            .map(|pair| {
                (
                    logical_image(&pair.x_op, &out_frame, &final_frame),
                    logical_image(&pair.z_op, &out_frame, &final_frame),
                )
            })
            .collect();
        let predicted = gates::clifford_from_images(1, &images).unwrap();
        let gate = induced_logical_unitary(&plan, &in_frame, &out_frame, &opts).unwrap();
        let fidelity = process_fidelity(&gate.matrix, &predicted).unwrap();
        assert!(
            fidelity >= 0.999,
            "chain n={n}: symbolic/numeric fidelity {fidelity}"
        );
    }

    // The six-qubit block.
    let plan = h2_plan(1.0, sched).unwrap();
    let (in_frame, out_frame) = h2_frames().unwrap();
    let start = two_qubit_frame().unwrap();
    let frames = plan.replay_symbolic(&start).unwrap();
    let final_frame = frames.last().unwrap().with_canonical_logicals().unwrap();
    let images: Vec<(PauliString, PauliString)> = final_frame
        .logicals()
        .iter()
        .map(|pair| {
            (
                logical_image(&pair.x_op, &out_frame, &final_frame),
                logical_image(&pair.z_op, &out_frame, &final_frame),
            )
        })
        .collect();
    let predicted = gates::clifford_from_images(2, &images).unwrap();
    let gate = induced_logical_unitary(&plan, &in_frame, &out_frame, &opts).unwrap();
    let fidelity = process_fidelity(&gate.matrix, &predicted).unwrap();
    assert!(fidelity >= 0.999, "H2 symbolic/numeric fidelity {fidelity}");
    // And the prediction itself is the wrapped CZ.
    let wrapped = process_fidelity(&predicted, &gates::h2_block_gate()).unwrap();
    assert!(wrapped >= 1.0 - 1e-12);
}

/// Compiler soundness: every single gate and gate pair on one wire, plus the
/// bare block, verifies against its oracle.
#[test]
fn compiler_soundness_corpus() {
    let opts = IntegratorOptions {
        min_substeps: 500,
        ..Default::default()
    };
    let sched = Schedule::new(ScheduleShape::Linear, 50.0).unwrap();
    let corpus = [
        "h q0\n",
        "hrot 0.7853981633974483 q0\n",
        "h q0\nh q0\n",
        "h q0\nhrot 0.7853981633974483 q0\n",
        "hrot 0.7853981633974483 q0\nh q0\n",
        "hrot 0.5235987755982988 q0\nhrot 0.7853981633974483 q0\n",
        "czh q0 q1\n",
        "prepx q0\nh q0\n",
        "prepx q0\nhrot 0.7853981633974483 q0\n",
        "prepx q0\nprepx q1\nczh q0 q1\n",
    ];
    for text in corpus {
        let (_, layout, verification) =
            acsqc_core::compiler::verify_circuit(text, 1.0, sched, &opts).unwrap();
        assert!(
            verification.fidelity >= 0.99,
            "circuit {text:?} on {} qubits: fidelity {}",
            layout.n_qubits,
            verification.fidelity
        );
    }
}

/// Determinism: replaying the same plan twice gives bit-identical frames and
/// byte-identical induced matrices.
#[test]
fn induced_unitary_is_deterministic() {
    let opts = IntegratorOptions {
        min_substeps: 400,
        ..Default::default()
    };
    let sched = Schedule::new(ScheduleShape::Linear, 25.0).unwrap();
    let plan = chain_plan(3, 1.0, &ChainStyle::Plain, sched).unwrap();
    let (in_frame, out_frame) = chain_frames(3).unwrap();
    let a = induced_logical_unitary(&plan, &in_frame, &out_frame, &opts).unwrap();
    let b = induced_logical_unitary(&plan, &in_frame, &out_frame, &opts).unwrap();
    assert_eq!(a.matrix, b.matrix);
    assert_eq!(a.leakage.to_bits(), b.leakage.to_bits());
}
