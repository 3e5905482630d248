use tlm_forge::codegen::export_tlm;
use tlm_forge::sysdesc::DiagnosticCode;
use tlm_forge::trace::{check_constraints, end_to_end_latency, final_end, write_trace, Verdict};
use tlm_forge::{elaborate, parse_description, validate_description, Command, SimTime, SystemDescription};

const ABS: &str = include_str!("../../../fixtures/abs.json");
const GOLDEN_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/golden");

fn abs() -> SystemDescription {
    parse_description(ABS).expect("abs fixture parses")
}

#[test]
fn fixture_matches_the_abs_platform() {
    let d = abs();
    let cpus: Vec<(&str, u64)> = d.cpus.iter().map(|c| (c.name.as_str(), c.frequency.hz())).collect();
    assert_eq!(
        cpus,
        [
            ("Cpu0", 1_000_000_000),
            ("Cpu1", 5_000_000_000),
            ("Cpu2", 4_000_000_000),
            ("Cpu3", 4_000_000_000),
            ("Cpu4", 4_000_000_000),
            ("Cpu5", 4_000_000_000),
        ]
    );
    assert_eq!(d.modules.len(), 3);
    let placement: Vec<(&str, &str, &str)> =
        d.instances.iter().map(|i| (i.name.as_str(), i.module.as_str(), i.cpu.as_str())).collect();
    assert_eq!(
        placement,
        [
            ("Brake", "Module0", "Cpu0"),
            ("Router", "Module1", "Cpu1"),
            ("ABSbrake1", "Module2", "Cpu2"),
            ("ABSbrake2", "Module2", "Cpu3"),
            ("ABSbrake3", "Module2", "Cpu4"),
            ("ABSbrake4", "Module2", "Cpu5"),
        ]
    );
    assert_eq!(validate_description(&d), []);
}

#[test]
fn whole_system_completes_at_16_ns() {
    let result = elaborate(&abs()).unwrap().simulate().unwrap();
    assert_eq!(result.end_time, SimTime::from_ns(16));
    assert_eq!(end_to_end_latency(&result.trace, "Brake"), Ok(SimTime::from_ps(16_000)));
    for brake in ["ABSbrake1", "ABSbrake2", "ABSbrake3", "ABSbrake4"] {
        assert_eq!(final_end(&result.trace, brake), Some(SimTime::from_ps(16_000)), "{brake}");
        assert_eq!(result.memory(brake).unwrap().bytes()[..4], [1, 0, 0, 0]);
    }
    let report = check_constraints(&result.trace, &abs().constraints);
    assert_eq!(report.verdict(), Verdict::Pass);
}

#[test]
fn trace_matches_golden_log() {
    let result = elaborate(&abs()).unwrap().simulate().unwrap();
    let golden = std::fs::read_to_string(format!("{GOLDEN_DIR}/abs_trace.csv")).unwrap();
    assert_eq!(write_trace(&result.trace), golden);
}

#[test]
fn runs_are_deterministic() {
    let a = elaborate(&abs()).unwrap().simulate().unwrap();
    let b = elaborate(&abs()).unwrap().simulate().unwrap();
    assert_eq!(a, b);
    assert_eq!(write_trace(&a.trace), write_trace(&b.trace));
}

#[test]
fn doubling_frequencies_halves_the_trace() {
    let base = elaborate(&abs()).unwrap().simulate().unwrap();
    let mut fast = abs();
    for cpu in &mut fast.cpus {
        cpu.frequency = cpu.frequency.scaled(2).unwrap();
    }
    let fast = elaborate(&fast).unwrap().simulate().unwrap();
    assert_eq!(fast.end_time, SimTime::from_ps(8_000));
    assert_eq!(base.trace.len(), fast.trace.len());
    for (slow, quick) in base.trace.iter().zip(&fast.trace) {
        assert_eq!(slow.instance, quick.instance);
        assert_eq!(slow.start.as_ps(), 2 * quick.start.as_ps());
        assert_eq!(slow.end.as_ps(), 2 * quick.end.as_ps());
    }
}

#[test]
fn removing_the_first_bus_breaks_the_brake_binding() {
    let mut d = abs();
    d.buses.retain(|b| !(b.cpus.contains(&"Cpu0".to_string()) && b.cpus.contains(&"Cpu1".to_string())));
    let codes: Vec<_> = validate_description(&d).into_iter().map(|x| x.code).collect();
    assert_eq!(codes, [DiagnosticCode::E003]);
}

#[test]
fn broadcast_read_is_rejected() {
    let mut d = abs();
    let tlm_forge::components::ModuleSpec::Initiator(brake) = &mut d.modules[0] else {
        panic!("Module0 is the initiator");
    };
    brake.workload[0].command = Command::Read;
    brake.workload[0].length = Some(brake.workload[0].byte_length());
    brake.workload[0].data = None;
    let codes: Vec<_> = validate_description(&d).into_iter().map(|x| x.code).collect();
    assert_eq!(codes, [DiagnosticCode::E004]);
}

#[test]
fn export_matches_golden_sources() {
    let bundle = export_tlm(&abs()).unwrap();
    let names: Vec<&str> = bundle.names().collect();
    assert_eq!(names, ["top.cpp", "Module0.h", "Module1.h", "Module2.h"]);
    for (name, text) in &bundle.files {
        let golden = std::fs::read_to_string(format!("{GOLDEN_DIR}/abs/{name}")).unwrap();
        assert_eq!(text, &golden, "{name} differs from its golden copy");
    }
    assert_eq!(bundle, export_tlm(&abs()).unwrap());
}

#[test]
fn every_instance_is_instantiated_once() {
    let bundle = export_tlm(&abs()).unwrap();
    let top = bundle.file("top.cpp").unwrap();
    for inst in &abs().instances {
        let needle = format!(" {}(\"{}\",", inst.name, inst.name);
        assert_eq!(top.matches(&needle).count(), 1, "{}", inst.name);
    }
}
