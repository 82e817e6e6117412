use criterion::{black_box, criterion_group, criterion_main, Criterion};
use vubqc_core::analysis::{
    blindness_audit, AuditMode, IncorrectnessOracle, TrapPlacement, DEFAULT_CELL_CAP,
};
use vubqc_core::corpus::{find, line_pattern};
use vubqc_core::mbqc::{Circuit, Gate, OutputMode, PatternInput};
use vubqc_core::protocol::{
    run_session, Attack, Client, ClientOptions, ClientSecrets, OutcomeSource, QuantumServer,
    Variant,
};
use vubqc_core::sim::{seeded_rng, Pauli};
use vubqc_core::verification::{choose_pattern, run_protocol8, EncodingParams};
use vubqc_core::AngleIndex;

fn blind_session(c: &mut Criterion) {
    let p = find("brickwork-2x5-a").unwrap();
    c.bench_function("blind session brickwork 2x5", |b| {
        let mut seed = 0;
        b.iter(|| {
            seed += 1;
            let secrets =
                ClientSecrets::draw(&p, Variant::ClassicalInput, false, &mut seeded_rng(seed, 0));
            let input = PatternInput::Classical(vec![false, true]);
            let client = Client::new(
                p.clone(),
                Variant::ClassicalInput,
                input,
                secrets,
                ClientOptions::default(),
            )
            .unwrap();
            let mut server =
                QuantumServer::honest(OutcomeSource::Random(Box::new(seeded_rng(seed, 1))));
            black_box(run_session(client, &mut server).unwrap().probability)
        })
    });
}

fn verified_run(c: &mut Criterion) {
    let circuit = Circuit::new(
        1,
        vec![
            Gate::J {
                wire: 0,
                angle: AngleIndex::new(3),
            },
            Gate::J {
                wire: 0,
                angle: AngleIndex::new(6),
            },
        ],
    )
    .unwrap();
    c.bench_function("verified run N=3", |b| {
        let mut seed = 0;
        b.iter(|| {
            seed += 1;
            let mut rng = seeded_rng(seed, 0);
            let plan = choose_pattern(
                &circuit,
                3,
                EncodingParams::Identity,
                OutputMode::Quantum,
                &mut rng,
            )
            .unwrap();
            let mut server =
                QuantumServer::honest(OutcomeSource::Random(Box::new(seeded_rng(seed, 1))));
            black_box(
                run_protocol8(
                    &plan,
                    &PatternInput::Classical(vec![false]),
                    &mut server,
                    &mut rng,
                )
                .unwrap()
                .accept,
            )
        })
    });
}

fn exact_oracles(c: &mut Criterion) {
    let line = line_pattern(&[1, 2], OutputMode::Quantum).unwrap();
    let input = PatternInput::Classical(vec![true]);
    c.bench_function("exact blindness m=3", |b| {
        b.iter(|| {
            black_box(
                blindness_audit(&line, Variant::ClassicalInput, &input, AuditMode::Exact, 3)
                    .unwrap()
                    .bob_state_distance,
            )
        })
    });
    let two = line_pattern(&[1], OutputMode::Quantum).unwrap();
    let oracle =
        IncorrectnessOracle::new(&two, &[false], &TrapPlacement::Single, DEFAULT_CELL_CAP).unwrap();
    let attack = Attack::pauli_string(&[Pauli::X, Pauli::Z]);
    c.bench_function("exact p_incorrect m=2", |b| {
        b.iter(|| black_box(oracle.evaluate(&attack).unwrap().p_incorrect))
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = blind_session, verified_run, exact_oracles
}
criterion_main!(benches);
