use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use super::SystemDescription;
use crate::components::{route, ModuleSpec};
use crate::payload::Command;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiagnosticCode {
    /// Reference to a CPU that is not declared.
    E001,
    /// Socket index out of range for the module.
    E002,
    /// Binding between instances on CPUs that share no bus.
    E003,
    /// READ that would fan out to more than one destination.
    E004,
    /// Duplicate identifier.
    E005,
    /// Router connection or decode entry names a socket that does not exist.
    E006,
    /// Constraint on an unknown instance.
    E007,
    /// In-socket bound more than once.
    E008,
    /// Reference to an unknown module or instance.
    E009,
    /// Socket that must be bound is not.
    E010,
    /// Bindings form a cycle.
    E011,
    /// Malformed bus or module definition.
    E012,
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Where in the document a diagnostic points: `section[index].field`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Location {
    pub section: &'static str,
    pub index: usize,
    pub field: String,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.section, self.index)?;
        if !self.field.is_empty() {
            write!(f, ".{}", self.field)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub location: Location,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.code, self.location, self.message)
    }
}

struct Checker<'a> {
    desc: &'a SystemDescription,
    out: Vec<Diagnostic>,
}

impl Checker<'_> {
    fn report(&mut self, code: DiagnosticCode, section: &'static str, index: usize, field: &str, message: String) {
        self.out.push(Diagnostic { code, location: Location { section, index, field: field.to_string() }, message });
    }
}

/// Checks every description rule. The result is sorted by code, then
/// location; an empty list means the description can be elaborated.
pub fn validate_description(desc: &SystemDescription) -> Vec<Diagnostic> {
    let mut c = Checker { desc, out: Vec::new() };
    check_duplicates(&mut c);
    check_cpus_and_buses(&mut c);
    check_modules(&mut c);
    check_instances(&mut c);
    let bindings_ok = check_bindings(&mut c);
    check_constraints(&mut c);
    if bindings_ok {
        let acyclic = check_cycles(&mut c);
        check_unbound(&mut c);
        if acyclic {
            check_read_fanout(&mut c);
        }
    }
    let mut out = c.out;
    out.sort_by(|a, b| (a.code, &a.location, &a.message).cmp(&(b.code, &b.location, &b.message)));
    out
}

fn check_duplicates(c: &mut Checker) {
    let d = c.desc;
    let sections: [(&'static str, Vec<&str>); 4] = [
        ("cpus", d.cpus.iter().map(|x| x.name.as_str()).collect()),
        ("buses", d.buses.iter().map(|x| x.name.as_str()).collect()),
        ("modules", d.modules.iter().map(|x| x.name()).collect()),
        ("instances", d.instances.iter().map(|x| x.name.as_str()).collect()),
    ];
    for (section, names) in sections {
        let mut seen = HashSet::new();
        for (i, name) in names.iter().enumerate() {
            if !seen.insert(*name) {
                c.report(DiagnosticCode::E005, section, i, "name", format!("duplicate name `{name}`"));
            }
        }
    }
}

fn check_cpus_and_buses(c: &mut Checker) {
    let d = c.desc;
    for (i, bus) in d.buses.iter().enumerate() {
        let distinct: BTreeSet<&str> = bus.cpus.iter().map(String::as_str).collect();
        if distinct.len() < 2 {
            c.report(
                DiagnosticCode::E012,
                "buses",
                i,
                "cpus",
                format!("bus `{}` must join at least two CPUs", bus.name),
            );
        }
        for cpu in &bus.cpus {
            if d.cpu(cpu).is_none() {
                c.report(DiagnosticCode::E001, "buses", i, "cpus", format!("unknown CPU `{cpu}`"));
            }
        }
    }
}

fn check_modules(c: &mut Checker) {
    let d = c.desc;
    for (i, module) in d.modules.iter().enumerate() {
        let name = module.name();
        match module {
            ModuleSpec::Initiator(m) => {
                if m.sockets == 0 {
                    c.report(
                        DiagnosticCode::E012,
                        "modules",
                        i,
                        "sockets",
                        format!("initiator `{name}` needs at least one socket"),
                    );
                }
                for (k, t) in m.workload.iter().enumerate() {
                    let field = format!("workload[{k}]");
                    if t.socket >= m.sockets {
                        c.report(
                            DiagnosticCode::E002,
                            "modules",
                            i,
                            &format!("{field}.socket"),
                            format!("socket {} out of range; `{name}` has {} socket(s)", t.socket, m.sockets),
                        );
                    }
                    if let (Some(data), Some(len)) = (&t.data, t.length) {
                        if data.0.len() != len {
                            c.report(
                                DiagnosticCode::E012,
                                "modules",
                                i,
                                &field,
                                format!("data has {} bytes but length is {len}", data.0.len()),
                            );
                        }
                    }
                    if t.command != Command::Ignore && t.data.is_none() && t.length.is_none() {
                        c.report(
                            DiagnosticCode::E012,
                            "modules",
                            i,
                            &field,
                            "transaction needs `data` or `length`".into(),
                        );
                    }
                    if t.command == Command::Read && t.data.is_some() {
                        c.report(DiagnosticCode::E012, "modules", i, &field, "READ takes `length`, not `data`".into());
                    }
                }
            }
            ModuleSpec::Target(m) => {
                if m.socket_delays.is_empty() {
                    c.report(
                        DiagnosticCode::E012,
                        "modules",
                        i,
                        "socket_delays",
                        format!("target `{name}` needs at least one socket delay"),
                    );
                }
                if m.storage.size == 0 {
                    c.report(
                        DiagnosticCode::E012,
                        "modules",
                        i,
                        "storage.size",
                        format!("target `{name}` has empty storage"),
                    );
                } else if m.storage.base.0.checked_add(m.storage.size as u64 - 1).is_none() {
                    c.report(
                        DiagnosticCode::E012,
                        "modules",
                        i,
                        "storage",
                        format!("storage of `{name}` runs past the address space"),
                    );
                }
            }
            ModuleSpec::Router(m) => {
                if m.in_sockets == 0 || m.out_sockets == 0 {
                    c.report(
                        DiagnosticCode::E012,
                        "modules",
                        i,
                        "",
                        format!("router `{name}` needs in- and out-sockets"),
                    );
                }
                for (&input, outs) in &m.connections {
                    if input >= m.in_sockets {
                        c.report(
                            DiagnosticCode::E006,
                            "modules",
                            i,
                            &format!("connections.{input}"),
                            format!("in-socket {input} out of range; `{name}` has {}", m.in_sockets),
                        );
                    }
                    if outs.is_empty() {
                        c.report(
                            DiagnosticCode::E006,
                            "modules",
                            i,
                            &format!("connections.{input}"),
                            "connection lists no out-sockets".into(),
                        );
                    }
                    for &out in outs {
                        if out >= m.out_sockets {
                            c.report(
                                DiagnosticCode::E006,
                                "modules",
                                i,
                                &format!("connections.{input}"),
                                format!("out-socket {out} out of range; `{name}` has {}", m.out_sockets),
                            );
                        }
                    }
                }
                if let Some(map) = &m.address_map {
                    for (&out, range) in map {
                        if out >= m.out_sockets {
                            c.report(
                                DiagnosticCode::E006,
                                "modules",
                                i,
                                &format!("address_map.{out}"),
                                format!("out-socket {out} out of range; `{name}` has {}", m.out_sockets),
                            );
                        }
                        if range.base.0 >= range.limit.0 {
                            c.report(
                                DiagnosticCode::E012,
                                "modules",
                                i,
                                &format!("address_map.{out}"),
                                "empty decode range".into(),
                            );
                        }
                    }
                    for (&input, outs) in &m.connections {
                        let ranges: Vec<_> = outs.iter().filter_map(|o| map.get(o).map(|r| (o, r))).collect();
                        for (a, (oa, ra)) in ranges.iter().enumerate() {
                            for (ob, rb) in &ranges[a + 1..] {
                                if oa != ob && ra.overlaps(rb) {
                                    c.report(
                                        DiagnosticCode::E012,
                                        "modules",
                                        i,
                                        &format!("connections.{input}"),
                                        format!("decode ranges of out-sockets {oa} and {ob} overlap"),
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

fn check_instances(c: &mut Checker) {
    let d = c.desc;
    for (i, inst) in d.instances.iter().enumerate() {
        if d.module(&inst.module).is_none() {
            c.report(DiagnosticCode::E009, "instances", i, "module", format!("unknown module `{}`", inst.module));
        }
        if d.cpu(&inst.cpu).is_none() {
            c.report(DiagnosticCode::E001, "instances", i, "cpu", format!("unknown CPU `{}`", inst.cpu));
        }
    }
}

/// Returns whether every binding resolves to real sockets.
fn check_bindings(c: &mut Checker) -> bool {
    let d = c.desc;
    let mut ok = true;
    let mut bound_inputs: HashMap<(&str, usize), usize> = HashMap::new();
    for (i, b) in d.bindings.iter().enumerate() {
        let from = d.instance(&b.from.instance);
        let to = d.instance(&b.to.instance);
        for (end, name, inst) in [("from", &b.from.instance, from), ("to", &b.to.instance, to)] {
            if inst.is_none() {
                c.report(DiagnosticCode::E009, "bindings", i, end, format!("unknown instance `{name}`"));
                ok = false;
            }
        }
        let (Some(from), Some(to)) = (from, to) else { continue };
        let (Some(from_mod), Some(to_mod)) = (d.module(&from.module), d.module(&to.module)) else {
            ok = false;
            continue;
        };
        if b.from.socket >= from_mod.out_socket_count() {
            c.report(
                DiagnosticCode::E002,
                "bindings",
                i,
                "from",
                format!(
                    "`{}` ({}) has {} out-socket(s); {} is out of range",
                    from.name,
                    from_mod.kind(),
                    from_mod.out_socket_count(),
                    b.from.socket
                ),
            );
            ok = false;
        }
        if b.to.socket >= to_mod.in_socket_count() {
            c.report(
                DiagnosticCode::E002,
                "bindings",
                i,
                "to",
                format!(
                    "`{}` ({}) has {} in-socket(s); {} is out of range",
                    to.name,
                    to_mod.kind(),
                    to_mod.in_socket_count(),
                    b.to.socket
                ),
            );
            ok = false;
        }
        if let Some(first) = bound_inputs.insert((to.name.as_str(), b.to.socket), i) {
            c.report(
                DiagnosticCode::E008,
                "bindings",
                i,
                "to",
                format!("in-socket {} is already bound by bindings[{first}]", b.to),
            );
        }
        if from.cpu != to.cpu {
            let shared = d.buses.iter().any(|bus| bus.cpus.contains(&from.cpu) && bus.cpus.contains(&to.cpu));
            if !shared && d.cpu(&from.cpu).is_some() && d.cpu(&to.cpu).is_some() {
                c.report(
                    DiagnosticCode::E003,
                    "bindings",
                    i,
                    "",
                    format!("`{}` on {} and `{}` on {} share no bus", from.name, from.cpu, to.name, to.cpu),
                );
            }
        }
    }
    ok
}

fn check_constraints(c: &mut Checker) {
    let d = c.desc;
    for (i, k) in d.constraints.iter().enumerate() {
        if d.instance(&k.instance).is_none() {
            c.report(DiagnosticCode::E007, "constraints", i, "instance", format!("unknown instance `{}`", k.instance));
        }
    }
}

/// Instance index → out-socket → bound `(instance, in-socket)` pairs.
fn fanout(d: &SystemDescription) -> HashMap<(usize, usize), Vec<(usize, usize)>> {
    let index = |name: &str| d.instances.iter().position(|i| i.name == name);
    let mut map: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
    for b in &d.bindings {
        if let (Some(f), Some(t)) = (index(&b.from.instance), index(&b.to.instance)) {
            map.entry((f, b.from.socket)).or_default().push((t, b.to.socket));
        }
    }
    map
}

/// Returns whether the binding graph is acyclic.
fn check_cycles(c: &mut Checker) -> bool {
    let d = c.desc;
    let n = d.instances.len();
    let index = |name: &str| d.instances.iter().position(|i| i.name == name);
    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (i, b) in d.bindings.iter().enumerate() {
        if let (Some(f), Some(t)) = (index(&b.from.instance), index(&b.to.instance)) {
            edges[f].push((t, i));
        }
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    let mut closing = BTreeSet::new();
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        state[root] = 1;
        while let Some((node, next)) = stack.pop() {
            if let Some(&(to, binding)) = edges[node].get(next) {
                stack.push((node, next + 1));
                match state[to] {
                    0 => {
                        state[to] = 1;
                        stack.push((to, 0));
                    }
                    1 => {
                        closing.insert(binding);
                    }
                    _ => {}
                }
            } else {
                state[node] = 2;
            }
        }
    }
    for &binding in &closing {
        let b = &d.bindings[binding];
        c.report(
            DiagnosticCode::E011,
            "bindings",
            binding,
            "",
            format!("binding {} -> {} closes a cycle", b.from, b.to),
        );
    }
    closing.is_empty()
}

fn check_unbound(c: &mut Checker) {
    let d = c.desc;
    let fan = fanout(d);
    let bound_in: HashSet<(usize, usize)> = fan.values().flatten().copied().collect();
    for (i, inst) in d.instances.iter().enumerate() {
        match d.module(&inst.module) {
            Some(ModuleSpec::Initiator(m)) => {
                let used: BTreeSet<usize> = m.workload.iter().map(|t| t.socket).filter(|&s| s < m.sockets).collect();
                for socket in used {
                    if !fan.contains_key(&(i, socket)) {
                        c.report(
                            DiagnosticCode::E010,
                            "instances",
                            i,
                            "",
                            format!("`{}` issues on out-socket {socket} which is unbound", inst.name),
                        );
                    }
                }
            }
            Some(ModuleSpec::Router(m)) => {
                for (&input, outs) in &m.connections {
                    for &out in outs.iter().filter(|&&o| o < m.out_sockets) {
                        if !fan.contains_key(&(i, out)) {
                            c.report(
                                DiagnosticCode::E010,
                                "instances",
                                i,
                                "",
                                format!(
                                    "`{}` forwards in-socket {input} to out-socket {out} which is unbound",
                                    inst.name
                                ),
                            );
                        }
                    }
                }
                for input in 0..m.in_sockets {
                    if bound_in.contains(&(i, input)) && !m.connections.contains_key(&input) {
                        c.report(
                            DiagnosticCode::E010,
                            "instances",
                            i,
                            "",
                            format!("`{}` in-socket {input} is bound but has no internal connection", inst.name),
                        );
                    }
                }
            }
            _ => {}
        }
    }
}

fn check_read_fanout(c: &mut Checker) {
    let d = c.desc;
    let fan = fanout(d);
    let mut found = Vec::new();
    for (i, inst) in d.instances.iter().enumerate() {
        let Some(ModuleSpec::Initiator(m)) = d.module(&inst.module) else { continue };
        for (k, t) in m.workload.iter().enumerate() {
            if t.command != Command::Read {
                continue;
            }
            let mut hops = fan.get(&(i, t.socket)).cloned().unwrap_or_default();
            // Bounded by the instance count on an acyclic graph.
            for _ in 0..=d.instances.len() {
                match hops.as_slice() {
                    [] => break,
                    [(next, socket)] => {
                        let Some(ModuleSpec::Router(r)) = d.module(&d.instances[*next].module) else { break };
                        let Ok(outs) = route(r, *socket, t.address.0) else { break };
                        hops = outs.iter().flat_map(|&o| fan.get(&(*next, o)).cloned().unwrap_or_default()).collect();
                    }
                    _ => {
                        found.push((i, k, inst.name.clone(), hops.len()));
                        break;
                    }
                }
            }
        }
    }
    for (i, k, name, ways) in found {
        c.report(
            DiagnosticCode::E004,
            "instances",
            i,
            &format!("workload[{k}]"),
            format!("READ from `{name}` at workload[{k}] reaches {ways} destinations; reads need a unique route"),
        );
    }
}
