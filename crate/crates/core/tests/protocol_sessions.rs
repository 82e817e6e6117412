use std::net::{TcpListener, TcpStream};

use num_complex::Complex64;
use rand::Rng;
use vubqc_core::corpus::{classical_patterns, correctness_corpus};
use vubqc_core::mbqc::{run_reference, Branch, PatternInput, PatternOutput};
use vubqc_core::protocol::{
    run_session, run_session_over, Attack, Client, ClientOptions, ClientSecrets, Deviation,
    OutcomeSource, QuantumServer, ScheduledDeviation, StreamTransport, Variant,
};
use vubqc_core::sim::{seeded_rng, EnvironmentState, Pauli};
use vubqc_core::{AngleIndex, Error};

fn random_state(qubits: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..1 << qubits)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    v
}

#[test]
fn honest_sessions_match_reference() {
    for entry in correctness_corpus() {
        let p = &entry.pattern;
        let variant = if p.dummies().is_empty() {
            Variant::Basic
        } else {
            Variant::Dummy
        };
        for seed in 0..5 {
            let mut rng = seeded_rng(seed, 0);
            let input = PatternInput::Quantum(random_state(p.graph().inputs().len(), &mut rng));
            let reference = run_reference(p, &input, Branch::Random(&mut rng)).unwrap();
            let PatternOutput::Quantum(want) = reference.output else {
                panic!("pure output expected")
            };
            let secrets = ClientSecrets::draw(p, variant, true, &mut rng);
            let client =
                Client::new(p.clone(), variant, input, secrets, ClientOptions::default()).unwrap();
            let mut server =
                QuantumServer::honest(OutcomeSource::Random(Box::new(seeded_rng(seed, 1))));
            let out = run_session(client, &mut server).unwrap();
            assert!(out.client.accept);
            let f = out.client.output.fidelity_with(&want).unwrap();
            assert!(f > 1.0 - 1e-9, "{} seed {seed}: fidelity {f}", entry.name);
        }
    }
}

#[test]
fn classical_sessions_match_reference() {
    for entry in classical_patterns() {
        let p = &entry.pattern;
        for seed in 0..10 {
            let mut rng = seeded_rng(seed, 0);
            let bits: Vec<bool> = p.graph().inputs().iter().map(|_| rng.gen()).collect();
            let input = PatternInput::Classical(bits);
            for variant in [Variant::Basic, Variant::ClassicalInput] {
                let secrets = ClientSecrets::draw(p, variant, false, &mut rng);
                let client = Client::new(
                    p.clone(),
                    variant,
                    input.clone(),
                    secrets,
                    ClientOptions::default(),
                )
                .unwrap();
                let mut server =
                    QuantumServer::honest(OutcomeSource::Random(Box::new(seeded_rng(seed, 2))));
                let out = run_session(client, &mut server).unwrap();
                let logical: Vec<bool> = p.order().iter().map(|&v| out.client.logical[v]).collect();
                let reference = run_reference(p, &input, Branch::Forced(&logical)).unwrap();
                assert!(
                    reference.probability > 1e-12,
                    "{}: impossible branch",
                    entry.name
                );
                assert_eq!(out.client.output, reference.output, "{}", entry.name);
            }
        }
    }
}

#[test]
fn same_seed_gives_same_transcript() {
    let p = correctness_corpus().remove(5).pattern;
    let run = || {
        let mut rng = seeded_rng(11, 0);
        let input = PatternInput::Quantum(random_state(p.graph().inputs().len(), &mut rng));
        let secrets = ClientSecrets::draw(&p, Variant::Basic, true, &mut rng);
        let client = Client::new(
            p.clone(),
            Variant::Basic,
            input,
            secrets,
            ClientOptions::default(),
        )
        .unwrap();
        let mut server = QuantumServer::honest(OutcomeSource::Random(Box::new(seeded_rng(11, 1))));
        run_session(client, &mut server).unwrap().transcript_digest
    };
    assert_eq!(run(), run());
}

#[test]
fn variant_checks() {
    let corpus = correctness_corpus();
    let plain = &corpus[0].pattern;
    let dummy = &corpus[8].pattern;
    let input = PatternInput::Quantum(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    let opts = ClientOptions::default();
    let zero = |p: &vubqc_core::mbqc::Pattern| ClientSecrets::zero(p.vertex_count());
    assert!(matches!(
        Client::new(
            plain.clone(),
            Variant::ClassicalInput,
            input.clone(),
            zero(plain),
            opts
        ),
        Err(Error::InconsistentVariant(_))
    ));
    assert!(matches!(
        Client::new(
            plain.clone(),
            Variant::Dummy,
            input.clone(),
            zero(plain),
            opts
        ),
        Err(Error::InconsistentVariant(_))
    ));
    assert!(matches!(
        Client::new(
            dummy.clone(),
            Variant::Basic,
            input.clone(),
            zero(dummy),
            opts
        ),
        Err(Error::InconsistentVariant(_))
    ));
    let mut rng = seeded_rng(0, 0);
    let secrets = ClientSecrets::draw(plain, Variant::ClassicalInput, false, &mut rng);
    assert!(secrets.pad.iter().all(|&x| !x));
}

#[test]
fn tcp_loopback_session() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let client_stream = TcpStream::connect(addr).unwrap();
    let (server_stream, _) = listener.accept().unwrap();
    let mut client_end = StreamTransport::new(client_stream.try_clone().unwrap(), client_stream);
    let mut server_end = StreamTransport::new(server_stream.try_clone().unwrap(), server_stream);

    let p = correctness_corpus().remove(2).pattern;
    let mut rng = seeded_rng(3, 0);
    let input = PatternInput::Quantum(random_state(1, &mut rng));
    let want = run_reference(&p, &input, Branch::Random(&mut rng))
        .unwrap()
        .output;
    let PatternOutput::Quantum(want) = want else {
        panic!()
    };
    let secrets = ClientSecrets::draw(&p, Variant::Basic, true, &mut rng);
    let client = Client::new(p, Variant::Basic, input, secrets, ClientOptions::default()).unwrap();
    let mut server = QuantumServer::honest(OutcomeSource::Random(Box::new(seeded_rng(3, 1))));
    let mut env = EnvironmentState::new();
    let out = run_session_over(
        client,
        &mut server,
        &mut client_end,
        &mut server_end,
        &mut env,
    )
    .unwrap();
    assert!(out.client.output.fidelity_with(&want).unwrap() > 1.0 - 1e-9);
}

#[test]
fn pauli_on_measured_qubit_is_malformed() {
    let p = correctness_corpus().remove(1).pattern;
    let input = PatternInput::Classical(vec![false]);
    let client = Client::new(
        p.clone(),
        Variant::Basic,
        input,
        ClientSecrets::zero(3),
        ClientOptions::default(),
    )
    .unwrap();
    let attack = Attack {
        deviations: vec![ScheduledDeviation {
            stage: 2,
            deviation: Deviation::Pauli {
                qubit: 0,
                pauli: Pauli::X,
            },
        }],
    };
    let mut server = QuantumServer::adversarial(attack, OutcomeSource::Forced(vec![false, false]));
    assert!(matches!(
        run_session(client, &mut server),
        Err(Error::MalformedAttack(_))
    ));
}

#[test]
fn flipped_results_and_shifted_angles_corrupt_output() {
    let p = correctness_corpus().remove(0).pattern;
    let input = PatternInput::Quantum(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]);
    let want = match run_reference(&p, &input, Branch::Forced(&[false]))
        .unwrap()
        .output
    {
        PatternOutput::Quantum(v) => v,
        _ => unreachable!(),
    };
    for dev in [
        Deviation::FlipResult { qubit: 0 },
        Deviation::AngleShift {
            qubit: 0,
            shift: AngleIndex::PI,
        },
    ] {
        let client = Client::new(
            p.clone(),
            Variant::Basic,
            input.clone(),
            ClientSecrets::zero(2),
            ClientOptions::default(),
        )
        .unwrap();
        let attack = Attack {
            deviations: vec![ScheduledDeviation {
                stage: 1,
                deviation: dev,
            }],
        };
        let mut server = QuantumServer::adversarial(attack, OutcomeSource::Forced(vec![false]));
        let out = run_session(client, &mut server).unwrap();
        assert!(out.client.output.fidelity_with(&want).unwrap() < 0.9);
    }
}
