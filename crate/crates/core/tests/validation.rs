use proptest::prelude::*;
use tlm_forge::components::{Address, Frequency, HexBytes, ModuleSpec};
use tlm_forge::sysdesc::{DiagnosticCode, ParseCode, TimingConstraint};
use tlm_forge::{elaborate, parse_description, validate_description, Command, SimTime, SystemDescription};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures");

fn load(name: &str) -> SystemDescription {
    let text = std::fs::read_to_string(format!("{FIXTURES}/{name}")).unwrap();
    parse_description(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn codes(d: &SystemDescription) -> Vec<DiagnosticCode> {
    validate_description(d).into_iter().map(|x| x.code).collect()
}

const ALL_CODES: [DiagnosticCode; 12] = [
    DiagnosticCode::E001,
    DiagnosticCode::E002,
    DiagnosticCode::E003,
    DiagnosticCode::E004,
    DiagnosticCode::E005,
    DiagnosticCode::E006,
    DiagnosticCode::E007,
    DiagnosticCode::E008,
    DiagnosticCode::E009,
    DiagnosticCode::E010,
    DiagnosticCode::E011,
    DiagnosticCode::E012,
];

#[test]
fn each_code_has_a_minimal_fixture() {
    for code in ALL_CODES {
        let name = format!("invalid/{}.json", code.to_string().to_lowercase());
        assert_eq!(codes(&load(&name)), [code], "{name}");
    }
}

#[test]
fn shipped_valid_fixtures_raise_nothing() {
    assert_eq!(codes(&load("abs.json")), []);
    assert_eq!(codes(&load("minimal.json")), []);
}

#[test]
fn invalid_fixtures_do_not_elaborate() {
    for code in ALL_CODES {
        let d = load(&format!("invalid/{}.json", code.to_string().to_lowercase()));
        assert!(elaborate(&d).is_err(), "{code}");
    }
}

#[test]
fn validation_is_pure_and_sorted() {
    let mut d = load("abs.json");
    d.cpus.push(d.cpus[0].clone());
    d.instances[1].cpu = "Elsewhere".into();
    d.constraints.push(TimingConstraint { instance: "Ghost".into(), max_end: SimTime::from_ns(1) });
    let first = validate_description(&d);
    assert!(first.len() >= 3);
    for _ in 0..5 {
        assert_eq!(validate_description(&d), first);
    }
    let keys: Vec<_> = first.iter().map(|x| (x.code, x.location.clone(), x.message.clone())).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn parse_diagnostics() {
    assert_eq!(parse_description("").unwrap_err().code, ParseCode::Missing);
    assert_eq!(parse_description("{}").unwrap_err().code, ParseCode::Missing);
    let bad = r#"{"cpus": [{"name": "C", "frequency": "-1"}]}"#;
    assert_eq!(parse_description(bad).unwrap_err().code, ParseCode::Type);
    let err = parse_description("{\n  \"cpus\": [,]\n}").unwrap_err();
    assert_eq!((err.code, err.line), (ParseCode::Syntax, 2));
}

#[test]
fn zero_initiators_run_to_an_empty_trace() {
    let mut d = load("minimal.json");
    d.instances.retain(|i| i.name != "i");
    d.bindings.clear();
    assert_eq!(codes(&d), []);
    let result = elaborate(&d).unwrap().simulate().unwrap();
    assert!(result.trace.is_empty());
    assert_eq!(result.end_time, SimTime::ZERO);
}

fn mutated_abs() -> impl Strategy<Value = SystemDescription> {
    (
        prop::collection::vec(1u64..10_000, 6),
        (1u64..1_000_000, 1u64..1_000_000, 1u64..1_000_000),
        prop::collection::vec(any::<u8>(), 1..9),
        (any::<u64>(), 1u32..4),
        "[A-Za-z][A-Za-z0-9 _-]{0,10}",
        prop::option::of(0u64..5_000_000),
    )
        .prop_map(|(mhz, (d0, d1, d2), data, (addr, repeat), name, quantum)| {
            let mut d: SystemDescription = parse_description(include_str!("../../../fixtures/abs.json")).unwrap();
            for (cpu, m) in d.cpus.iter_mut().zip(mhz) {
                cpu.frequency = Frequency::from_hz(m * 1_000_000).unwrap();
            }
            for m in &mut d.modules {
                match m {
                    ModuleSpec::Initiator(s) => {
                        s.delay = SimTime::from_ps(d0);
                        s.workload[0].data = Some(HexBytes(data.clone()));
                        s.workload[0].address = Address(addr);
                        s.workload[0].repeat = repeat;
                        s.workload[0].command = Command::Write;
                    }
                    ModuleSpec::Router(s) => s.delay = SimTime::from_ps(d1),
                    ModuleSpec::Target(s) => s.socket_delays = vec![SimTime::from_ps(d2)],
                }
            }
            d.instances[0].name = name.clone();
            d.bindings[0].from.instance = name.clone();
            d.constraints[0].instance = name;
            if let Some(q) = quantum {
                d.options.global_quantum = SimTime::from_ps(q);
            }
            d
        })
}

proptest! {
    #[test]
    fn parse_inverts_serialize(d in mutated_abs()) {
        let text = d.to_json();
        prop_assert_eq!(parse_description(&text).unwrap(), d.clone());
        prop_assert_eq!(parse_description(&text).unwrap().to_json(), text);
    }
}
