use std::collections::BTreeSet;

use num_complex::Complex64;
use vubqc_core::corpus::line_pattern;
use vubqc_core::mbqc::{Circuit, Gate, LazyEntangler, OutputMode, PatternInput, PatternOutput};
use vubqc_core::protocol::{
    prepare_qubits, run_session, Attack, Client, ClientOptions, ClientSecrets, OutcomeSource,
    QuantumServer, Variant,
};
use vubqc_core::sim::{seeded_rng, EnvironmentState, Pauli};
use vubqc_core::verification::{
    choose_pattern, make_trap_pattern, run_protocol8, EncodingParams, VerificationPlan,
};
use vubqc_core::AngleIndex;

fn input_state() -> Vec<Complex64> {
    vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]
}

fn j_line(gates: usize) -> Circuit {
    Circuit::new(
        1,
        (0..gates)
            .map(|k| Gate::J {
                wire: 0,
                angle: AngleIndex::new(2 * k as i64 + 1),
            })
            .collect(),
    )
    .unwrap()
}

#[test]
fn trap_patterns_accept_on_every_branch() {
    for mode in [OutputMode::Quantum, OutputMode::Classical] {
        for m in 2..=4 {
            let angles: Vec<i64> = (1..m as i64).collect();
            let base = line_pattern(&angles, mode).unwrap();
            for t in 0..m {
                let tp = make_trap_pattern(&base, t).unwrap();
                let input = tp
                    .restrict_input(&PatternInput::Classical(vec![true]))
                    .unwrap();
                for secrets_seed in 0..4 {
                    let mut rng = seeded_rng(secrets_seed, 1);
                    let secrets = ClientSecrets::draw(&tp.pattern, Variant::Dummy, false, &mut rng);
                    let measured = tp.pattern.order().len();
                    let mut total = 0.0;
                    for branch in 0..1u32 << measured {
                        let outcomes = (0..measured).map(|k| branch >> k & 1 == 1).collect();
                        let client = Client::new(
                            tp.pattern.clone(),
                            Variant::Dummy,
                            input.clone(),
                            secrets.clone(),
                            ClientOptions::default(),
                        )
                        .unwrap();
                        let mut server = QuantumServer::honest(OutcomeSource::Forced(outcomes));
                        let s = run_session(client, &mut server).unwrap();
                        if s.probability > 1e-12 {
                            assert!(s.client.accept, "m={m} t={t} mode={mode:?}");
                        }
                        total += s.probability;
                    }
                    assert!((total - 1.0).abs() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn traps_stay_isolated() {
    let base = line_pattern(&[1, 2, 3, 4], OutputMode::Quantum).unwrap();
    for t in 0..5 {
        let tp = make_trap_pattern(&base, t).unwrap();
        let mut rng = seeded_rng(t as u64, 2);
        let secrets = ClientSecrets::draw(&tp.pattern, Variant::Dummy, false, &mut rng);
        let input = tp
            .restrict_input(&PatternInput::Classical(vec![false]))
            .unwrap();
        let mut env = EnvironmentState::new();
        let qubit = prepare_qubits(&mut env, &tp.pattern, &secrets, &input).unwrap();
        LazyEntangler::new(tp.pattern.graph())
            .entangle_all(&mut env, &qubit)
            .unwrap();
        assert_eq!(env.register_size(qubit[t]).unwrap(), 1);
    }
}

fn plan(circuit: &Circuit, n: usize, mode: OutputMode, seed: u64) -> VerificationPlan {
    choose_pattern(
        circuit,
        n,
        EncodingParams::Identity,
        mode,
        &mut seeded_rng(seed, 3),
    )
    .unwrap()
}

#[test]
fn honest_verified_runs_are_correct() {
    for (n, gates) in [(2, 1), (3, 2)] {
        let circuit = j_line(gates);
        let ideal = circuit.apply(&input_state()).unwrap();
        for seed in 0..10 {
            let plan = plan(&circuit, n, OutputMode::Quantum, seed);
            assert_eq!(plan.pattern().vertex_count(), 3 * n * (3 * n + 1) / 2);
            let mut server =
                QuantumServer::honest(OutcomeSource::Random(Box::new(seeded_rng(seed, 4))));
            let out = run_protocol8(
                &plan,
                &PatternInput::Quantum(input_state()),
                &mut server,
                &mut seeded_rng(seed, 5),
            )
            .unwrap();
            assert!(out.accept);
            assert!(out.output.fidelity_with(&ideal).unwrap() > 1.0 - 1e-9);
        }
    }
}

#[test]
fn honest_classical_runs_match_the_circuit() {
    let circuit = j_line(2);
    for seed in 0..10 {
        let plan = plan(&circuit, 3, OutputMode::Classical, seed);
        let mut server =
            QuantumServer::honest(OutcomeSource::Random(Box::new(seeded_rng(seed, 4))));
        let out = run_protocol8(
            &plan,
            &PatternInput::Classical(vec![true]),
            &mut server,
            &mut seeded_rng(seed, 5),
        )
        .unwrap();
        assert!(out.accept);
        let dist = circuit.x_basis_distribution(&[true]).unwrap();
        let bit = out.decoded.unwrap().bits[0];
        assert!(dist[bit as usize] > 1e-12);
    }
}

#[test]
fn order_puts_a_vertices_first_and_respects_flow() {
    let circuit = j_line(2);
    for seed in 0..20 {
        let plan = plan(&circuit, 3, OutputMode::Quantum, seed);
        let p = plan.pattern();
        let a: BTreeSet<usize> = plan.embedding.dotted.a_vertices.iter().copied().collect();
        let split = a.len();
        assert!(p.order()[..split].iter().all(|v| a.contains(v)));
        assert!(p.order()[split..].iter().all(|v| !a.contains(v)));
        let pos = |v: usize| p.order().iter().position(|&x| x == v).unwrap_or(usize::MAX);
        for (&i, &fi) in &p.flow().successor {
            assert!(pos(i) < pos(fi));
        }
    }
}

#[test]
fn attack_on_white_trap_is_caught() {
    let circuit = j_line(1);
    for seed in 0..5 {
        let plan = plan(&circuit, 2, OutputMode::Quantum, seed);
        let white = *plan.traps().white.iter().next().unwrap();
        let mut paulis = vec![Pauli::I; plan.pattern().vertex_count()];
        paulis[white] = Pauli::Z;
        let mut server = QuantumServer::adversarial(
            Attack::pauli_string(&paulis),
            OutcomeSource::Random(Box::new(seeded_rng(seed, 4))),
        );
        let out = run_protocol8(
            &plan,
            &PatternInput::Quantum(input_state()),
            &mut server,
            &mut seeded_rng(seed, 5),
        )
        .unwrap();
        assert!(!out.accept);
        assert!(!out.trap_results[&white]);
    }
}

#[test]
fn x_on_a_trap_is_caught_half_the_time() {
    let base = line_pattern(&[1, 2], OutputMode::Classical).unwrap();
    let tp = make_trap_pattern(&base, 1).unwrap();
    let mut paulis = vec![Pauli::I; 3];
    paulis[1] = Pauli::X;
    let mut caught = 0.0;
    for theta in AngleIndex::ALL {
        let mut secrets = ClientSecrets::zero(3);
        secrets.theta[1] = theta;
        for branch in 0..8u32 {
            let outcomes = (0..3).map(|k| branch >> k & 1 == 1).collect();
            let client = Client::new(
                tp.pattern.clone(),
                Variant::Dummy,
                PatternInput::Classical(vec![]),
                secrets.clone(),
                ClientOptions::default(),
            )
            .unwrap();
            let mut server = QuantumServer::adversarial(
                Attack::pauli_string(&paulis),
                OutcomeSource::Forced(outcomes),
            );
            let s = run_session(client, &mut server).unwrap();
            if !s.client.accept {
                caught += s.probability / 8.0;
            }
        }
    }
    assert!((caught - 0.5).abs() < 1e-12);
}

#[test]
fn z_on_a_measured_dummy_is_harmless() {
    let circuit = j_line(1);
    let ideal = circuit.apply(&input_state()).unwrap();
    for seed in 0..5 {
        let plan = plan(&circuit, 2, OutputMode::Quantum, seed);
        let dummy = *plan.traps().dummies.iter().next().unwrap();
        let p = plan.pattern();
        let stage = p.order().iter().position(|&v| v == dummy).unwrap() + 1;
        let attack = Attack {
            deviations: vec![vubqc_core::protocol::ScheduledDeviation {
                stage,
                deviation: vubqc_core::protocol::Deviation::Pauli {
                    qubit: dummy,
                    pauli: Pauli::Z,
                },
            }],
        };
        let mut server = QuantumServer::adversarial(
            attack,
            OutcomeSource::Random(Box::new(seeded_rng(seed, 4))),
        );
        let out = run_protocol8(
            &plan,
            &PatternInput::Quantum(input_state()),
            &mut server,
            &mut seeded_rng(seed, 5),
        )
        .unwrap();
        assert!(out.accept);
        assert!(out.output.fidelity_with(&ideal).unwrap() > 1.0 - 1e-9);
    }
}

#[test]
fn repetition_encoding_runs() {
    let circuit = Circuit::new(1, vec![]).unwrap();
    let plan = choose_pattern(
        &circuit,
        3,
        EncodingParams::RepetitionClassical { d: 3 },
        OutputMode::Classical,
        &mut seeded_rng(1, 3),
    )
    .unwrap();
    let mut server = QuantumServer::honest(OutcomeSource::Random(Box::new(seeded_rng(1, 4))));
    let out = run_protocol8(
        &plan,
        &PatternInput::Classical(vec![true]),
        &mut server,
        &mut seeded_rng(1, 5),
    )
    .unwrap();
    assert!(out.accept);
    let decoded = out.decoded.unwrap();
    assert_eq!(decoded.bits, vec![true]);
    assert!(!decoded.flagged);
    assert!(matches!(out.output, PatternOutput::Classical(_)));
}
