//! SystemC TLM-2.0 source export.
//!
//! The bundle holds `top.cpp` (instantiation and binding) followed by one
//! header per module spec in description order. All modules use blocking
//! transport; delays are nominal picoseconds divided by the `freq_ghz`
//! constructor argument taken from the instance's CPU.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write;

use thiserror::Error;

use crate::components::{Bandwidth, Frequency};
use crate::components::{InitiatorSpec, ModuleSpec, RouterSpec, TargetSpec, TransactionTemplate};
use crate::payload::Command;
use crate::sysdesc::{validate_description, Diagnostic, SystemDescription};

/// Generated files in emission order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceBundle {
    pub files: Vec<(String, String)>,
}

impl SourceBundle {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, text)| text.as_str())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodegenError {
    #[error("E-NAME-UNSANITIZABLE: `{0}` has no identifier characters")]
    Unsanitizable(String),
    #[error("description is invalid ({} diagnostics)", .0.len())]
    Invalid(Vec<Diagnostic>),
}

impl CodegenError {
    pub fn code(&self) -> &'static str {
        match self {
            CodegenError::Unsanitizable(_) => "E-NAME-UNSANITIZABLE",
            CodegenError::Invalid(_) => "E-INVALID",
        }
    }
}

const RESERVED: &[&str] = &[
    "alignas",
    "alignof",
    "and",
    "and_eq",
    "asm",
    "auto",
    "bitand",
    "bitor",
    "bool",
    "break",
    "case",
    "catch",
    "char",
    "char16_t",
    "char32_t",
    "char8_t",
    "class",
    "co_await",
    "co_return",
    "co_yield",
    "compl",
    "concept",
    "const",
    "const_cast",
    "consteval",
    "constexpr",
    "constinit",
    "continue",
    "decltype",
    "default",
    "delete",
    "do",
    "double",
    "dynamic_cast",
    "else",
    "enum",
    "explicit",
    "export",
    "extern",
    "false",
    "float",
    "for",
    "friend",
    "goto",
    "if",
    "inline",
    "int",
    "long",
    "mutable",
    "namespace",
    "new",
    "noexcept",
    "not",
    "not_eq",
    "nullptr",
    "operator",
    "or",
    "or_eq",
    "private",
    "protected",
    "public",
    "register",
    "reinterpret_cast",
    "requires",
    "return",
    "short",
    "signed",
    "sizeof",
    "static",
    "static_assert",
    "static_cast",
    "struct",
    "switch",
    "template",
    "this",
    "thread_local",
    "throw",
    "true",
    "try",
    "typedef",
    "typeid",
    "typename",
    "union",
    "unsigned",
    "using",
    "virtual",
    "void",
    "volatile",
    "wchar_t",
    "while",
    "xor",
    "xor_eq",
    // names the generated top file uses itself
    "argc",
    "argv",
    "main",
    "sc_main",
    "sc_core",
    "tlm",
    "tlm_utils",
    "std",
    "top",
];

/// Maps a name onto `[A-Za-z_][A-Za-z0-9_]*`: other ASCII characters become
/// `_`, non-ASCII characters are dropped, a leading digit gets a `_` prefix
/// and reserved words get a `_` suffix.
pub fn sanitize_identifier(name: &str) -> Result<String, CodegenError> {
    let mut id: String = name
        .chars()
        .filter(char::is_ascii)
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if id.is_empty() {
        return Err(CodegenError::Unsanitizable(name.to_string()));
    }
    if id.starts_with(|c: char| c.is_ascii_digit()) {
        id.insert(0, '_');
    }
    if RESERVED.contains(&id.as_str()) {
        id.push('_');
    }
    Ok(id)
}

/// Hands out sanitized identifiers, suffixing `_1`, `_2`, ... on collision.
#[derive(Default)]
struct Namer {
    taken: HashSet<String>,
}

impl Namer {
    fn claim(&mut self, name: &str) -> Result<String, CodegenError> {
        let base = sanitize_identifier(name)?;
        let mut id = base.clone();
        let mut n = 0;
        // Case-folded so generated file names stay distinct on
        // case-insensitive file systems.
        while self.taken.contains(&id.to_ascii_lowercase()) {
            n += 1;
            id = format!("{base}_{n}");
        }
        self.taken.insert(id.to_ascii_lowercase());
        Ok(id)
    }
}

/// Exports a valid description as a [`SourceBundle`].
pub fn export_tlm(desc: &SystemDescription) -> Result<SourceBundle, CodegenError> {
    let diagnostics = validate_description(desc);
    if !diagnostics.is_empty() {
        return Err(CodegenError::Invalid(diagnostics));
    }
    let mut namer = Namer::default();
    let mut classes = BTreeMap::new();
    for m in &desc.modules {
        classes.insert(m.name().to_string(), namer.claim(m.name())?);
    }
    let mut objects = BTreeMap::new();
    for i in &desc.instances {
        objects.insert(i.name.clone(), namer.claim(&i.name)?);
    }

    let mut files = vec![("top.cpp".to_string(), top_file(desc, &classes, &objects))];
    for m in &desc.modules {
        let class = &classes[m.name()];
        let text = match m {
            ModuleSpec::Initiator(spec) => initiator_file(class, spec),
            ModuleSpec::Router(spec) => router_file(class, spec),
            ModuleSpec::Target(spec) => target_file(class, spec),
        };
        files.push((format!("{class}.h"), text));
    }
    Ok(SourceBundle { files })
}

/// Exact decimal GHz literal, e.g. `1.0`, `2.5`, `0.000001`.
fn ghz_literal(f: Frequency) -> String {
    let hz = f.hz();
    let whole = hz / 1_000_000_000;
    let frac = format!("{:09}", hz % 1_000_000_000);
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        format!("{whole}.0")
    } else {
        format!("{whole}.{frac}")
    }
}

fn fill(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = template.to_string();
    for (key, value) in vars {
        out = out.replace(&format!("{{{{{key}}}}}"), value);
    }
    debug_assert!(!out.contains("{{"), "unfilled placeholder in template");
    out
}

/// Text safe inside a `//` comment.
fn comment(text: &str) -> String {
    text.chars().map(|c| if c.is_control() { ' ' } else { c }).collect()
}

fn guard(class: &str) -> String {
    format!("{}_H", class.to_ascii_uppercase())
}

fn bytes_literal(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("0x{b:02X}")).collect::<Vec<_>>().join(", ")
}

fn transfer_body(bandwidth: Option<Bandwidth>) -> String {
    match bandwidth {
        Some(bw) => format!(
            "return sc_core::sc_time(std::ceil(static_cast<double>(length) * 1e12 / {}.0), sc_core::SC_PS);",
            bw.bytes_per_sec()
        ),
        None => "(void)length;\n    return sc_core::SC_ZERO_TIME;".to_string(),
    }
}

const TOP: &str = r#"// Top level: instantiates and binds every instance.

#include <systemc>
#include <tlm>

{{INCLUDES}}
int sc_main(int argc, char* argv[])
{
  (void)argc;
  (void)argv;

{{INSTANCES}}{{BINDINGS}}  sc_core::sc_start();
  return 0;
}
"#;

fn top_file(
    desc: &SystemDescription,
    classes: &BTreeMap<String, String>,
    objects: &BTreeMap<String, String>,
) -> String {
    let mut includes = String::new();
    for m in &desc.modules {
        let _ = writeln!(includes, "#include \"{}.h\"", classes[m.name()]);
    }
    let mut instances = String::new();
    for i in &desc.instances {
        let cpu = desc.cpu(&i.cpu).expect("validated cpu reference");
        let object = &objects[&i.name];
        let _ = writeln!(
            instances,
            "  {} {object}(\"{object}\", {}); // {} @ {}",
            classes[&i.module],
            ghz_literal(cpu.frequency),
            comment(&cpu.name),
            cpu.frequency
        );
    }
    if !instances.is_empty() {
        instances.push('\n');
    }
    let mut bindings = String::new();
    for b in &desc.bindings {
        let from_kind = desc.module(&desc.instance(&b.from.instance).expect("validated").module).expect("validated");
        let port = if matches!(from_kind, ModuleSpec::Router(_)) { "out" } else { "socket" };
        let _ = writeln!(
            bindings,
            "  {}.{port}[{}].bind({}.in[{}]);",
            objects[&b.from.instance], b.from.socket, objects[&b.to.instance], b.to.socket
        );
    }
    if !bindings.is_empty() {
        bindings.push('\n');
    }
    fill(TOP, &[("INCLUDES", &includes), ("INSTANCES", &instances), ("BINDINGS", &bindings)])
}

const INITIATOR: &str = r#"#ifndef {{GUARD}}
#define {{GUARD}}

#include <cmath>
#include <cstring>
#include <vector>

#include <systemc>
#include <tlm>
#include <tlm_utils/multi_passthrough_initiator_socket.h>

// Initiator `{{NAME}}`: nominal delay {{DELAY}}, {{SOCKETS}} socket(s).
struct {{CLASS}} : sc_core::sc_module
{
  sc_core::sc_vector<tlm_utils::multi_passthrough_initiator_socket<{{CLASS}}>> socket;

  SC_HAS_PROCESS({{CLASS}});

  {{CLASS}}(sc_core::sc_module_name name, double freq_ghz)
    : sc_core::sc_module(name)
    , socket("socket", {{SOCKETS}})
    , delay(sc_core::sc_time({{DELAY_PS}}.0 / freq_ghz, sc_core::SC_PS))
  {
    SC_THREAD(run);
  }

private:
  const sc_core::sc_time delay;

  static sc_core::sc_time transfer_time(unsigned int length)
  {
    {{TRANSFER}}
  }

  // Sends `trans` to every target bound to socket `s`: each gets its own
  // copy, the caller's delay becomes the latest callee's.
  void transport(unsigned int s, tlm::tlm_generic_payload& trans, sc_core::sc_time& t)
  {
    sc_core::sc_time latest = t;
    tlm::tlm_response_status status = tlm::TLM_OK_RESPONSE;
    bool first = true;
    for (unsigned int k = 0; k < socket[s].size(); ++k) {
      std::vector<unsigned char> data(trans.get_data_ptr(), trans.get_data_ptr() + trans.get_data_length());
      tlm::tlm_generic_payload copy;
      copy.set_command(trans.get_command());
      copy.set_address(trans.get_address());
      copy.set_data_ptr(data.data());
      copy.set_data_length(trans.get_data_length());
      copy.set_byte_enable_ptr(trans.get_byte_enable_ptr());
      copy.set_byte_enable_length(trans.get_byte_enable_length());
      copy.set_streaming_width(trans.get_streaming_width());
      copy.set_response_status(tlm::TLM_INCOMPLETE_RESPONSE);
      sc_core::sc_time local = t;
      socket[s][k]->b_transport(copy, local);
      if (local > latest) {
        latest = local;
      }
      if (status == tlm::TLM_OK_RESPONSE) {
        status = copy.get_response_status();
      }
      if (first && trans.is_read()) {
        std::memcpy(trans.get_data_ptr(), data.data(), data.size());
      }
      first = false;
    }
    trans.set_response_status(status);
    t = latest;
  }

  void issue(unsigned int s, tlm::tlm_generic_payload& trans)
  {
    sc_core::sc_time t = delay + transfer_time(trans.get_data_length());
    transport(s, trans, t);
    sc_core::wait(t);
  }

  void run()
  {
{{WORKLOAD}}  }
};

#endif // {{GUARD}}
"#;

fn command_literal(c: Command) -> &'static str {
    match c {
        Command::Read => "tlm::TLM_READ_COMMAND",
        Command::Write => "tlm::TLM_WRITE_COMMAND",
        Command::Ignore => "tlm::TLM_IGNORE_COMMAND",
    }
}

fn workload_step(index: usize, t: &TransactionTemplate) -> String {
    let p = t.payload();
    let mut out = String::new();
    let _ = writeln!(out, "    {{ // transaction {index}");
    if p.data.is_empty() {
        let _ = writeln!(out, "      std::vector<unsigned char> data;");
    } else if p.command == Command::Write {
        let _ = writeln!(out, "      std::vector<unsigned char> data = {{{}}};", bytes_literal(&p.data));
    } else {
        let _ = writeln!(out, "      std::vector<unsigned char> data({}, 0);", p.data.len());
    }
    if let Some(enables) = &p.byte_enables {
        let _ = writeln!(out, "      std::vector<unsigned char> enables = {{{}}};", bytes_literal(enables));
    }
    let _ = writeln!(out, "      tlm::tlm_generic_payload trans;");
    let _ = writeln!(out, "      for (unsigned int k = 0; k < {}; ++k) {{", t.repeat);
    if t.period.is_some() {
        let _ = writeln!(out, "        const sc_core::sc_time release = sc_core::sc_time_stamp();");
    }
    let _ = writeln!(out, "        trans.set_command({});", command_literal(p.command));
    let _ = writeln!(out, "        trans.set_address(0x{:X}ULL);", p.address);
    let _ = writeln!(out, "        trans.set_data_ptr(data.data());");
    let _ = writeln!(out, "        trans.set_data_length({});", p.data_length);
    let _ = writeln!(out, "        trans.set_streaming_width({});", p.streaming_width);
    match &p.byte_enables {
        Some(_) => {
            let _ = writeln!(out, "        trans.set_byte_enable_ptr(enables.data());");
            let _ = writeln!(out, "        trans.set_byte_enable_length({});", p.byte_enable_length);
        }
        None => {
            let _ = writeln!(out, "        trans.set_byte_enable_ptr(nullptr);");
            let _ = writeln!(out, "        trans.set_byte_enable_length(0);");
        }
    }
    let _ = writeln!(out, "        trans.set_dmi_allowed(false);");
    let _ = writeln!(out, "        trans.set_response_status(tlm::TLM_INCOMPLETE_RESPONSE);");
    let _ = writeln!(out, "        issue({}, trans);", t.socket);
    if let Some(period) = t.period {
        let _ = writeln!(
            out,
            "        const sc_core::sc_time next = release + sc_core::sc_time({}.0, sc_core::SC_PS);",
            period.as_ps()
        );
        let _ = writeln!(out, "        if (k + 1 < {} && next > sc_core::sc_time_stamp()) {{", t.repeat);
        let _ = writeln!(out, "          sc_core::wait(next - sc_core::sc_time_stamp());");
        let _ = writeln!(out, "        }}");
    }
    let _ = writeln!(out, "      }}");
    let _ = writeln!(out, "    }}");
    out
}

fn initiator_file(class: &str, spec: &InitiatorSpec) -> String {
    let workload: String = spec.workload.iter().enumerate().map(|(i, t)| workload_step(i, t)).collect();
    fill(
        INITIATOR,
        &[
            ("GUARD", &guard(class)),
            ("CLASS", class),
            ("NAME", &comment(&spec.name)),
            ("DELAY", &spec.delay.to_string()),
            ("DELAY_PS", &spec.delay.as_ps().to_string()),
            ("SOCKETS", &spec.sockets.to_string()),
            ("TRANSFER", &transfer_body(spec.bandwidth)),
            ("WORKLOAD", &workload),
        ],
    )
}

const ROUTER: &str = r#"#ifndef {{GUARD}}
#define {{GUARD}}

#include <cmath>
#include <cstring>
#include <vector>

#include <systemc>
#include <tlm>
#include <tlm_utils/multi_passthrough_initiator_socket.h>
#include <tlm_utils/simple_target_socket.h>

// Router `{{NAME}}`: nominal delay {{DELAY}}, {{IN}} in / {{OUT}} out.
struct {{CLASS}} : sc_core::sc_module
{
  sc_core::sc_vector<tlm_utils::simple_target_socket_tagged<{{CLASS}}>> in;
  sc_core::sc_vector<tlm_utils::multi_passthrough_initiator_socket<{{CLASS}}>> out;

  {{CLASS}}(sc_core::sc_module_name name, double freq_ghz)
    : sc_core::sc_module(name)
    , in("in", {{IN}})
    , out("out", {{OUT}})
    , delay(sc_core::sc_time({{DELAY_PS}}.0 / freq_ghz, sc_core::SC_PS))
  {
    for (int i = 0; i < {{IN}}; ++i) {
      in[i].register_b_transport(this, &{{CLASS}}::b_transport, i);
    }
  }

private:
  const sc_core::sc_time delay;

  static sc_core::sc_time transfer_time(unsigned int length)
  {
    {{TRANSFER}}
  }

  // Out-sockets reachable from in-socket `id` for `address`, ascending.
  static std::vector<unsigned int> route(int id, sc_dt::uint64 address)
  {
    std::vector<unsigned int> outs;
    (void)address;
    switch (id) {
{{ROUTES}}    default:
      break;
    }
    return outs;
  }

  void b_transport(int id, tlm::tlm_generic_payload& trans, sc_core::sc_time& t)
  {
    t += delay + transfer_time(trans.get_data_length());
    const std::vector<unsigned int> outs = route(id, trans.get_address());
    if (outs.empty()) {
      trans.set_response_status(tlm::TLM_ADDRESS_ERROR_RESPONSE);
      return;
    }
    sc_core::sc_time latest = t;
    tlm::tlm_response_status status = tlm::TLM_OK_RESPONSE;
    bool first = true;
    for (unsigned int o : outs) {
      for (unsigned int k = 0; k < out[o].size(); ++k) {
        std::vector<unsigned char> data(trans.get_data_ptr(), trans.get_data_ptr() + trans.get_data_length());
        tlm::tlm_generic_payload copy;
        copy.set_command(trans.get_command());
        copy.set_address(trans.get_address());
        copy.set_data_ptr(data.data());
        copy.set_data_length(trans.get_data_length());
        copy.set_byte_enable_ptr(trans.get_byte_enable_ptr());
        copy.set_byte_enable_length(trans.get_byte_enable_length());
        copy.set_streaming_width(trans.get_streaming_width());
        copy.set_response_status(tlm::TLM_INCOMPLETE_RESPONSE);
        sc_core::sc_time local = t;
        out[o][k]->b_transport(copy, local);
        if (local > latest) {
          latest = local;
        }
        if (status == tlm::TLM_OK_RESPONSE) {
          status = copy.get_response_status();
        }
        if (first && trans.is_read()) {
          std::memcpy(trans.get_data_ptr(), data.data(), data.size());
        }
        first = false;
      }
    }
    trans.set_response_status(status);
    t = latest;
  }
};

#endif // {{GUARD}}
"#;

fn router_file(class: &str, spec: &RouterSpec) -> String {
    let mut routes = String::new();
    for (input, outs) in &spec.connections {
        let mut outs = outs.clone();
        outs.sort_unstable();
        outs.dedup();
        let _ = writeln!(routes, "    case {input}:");
        for o in outs {
            match spec.address_map.as_ref().and_then(|m| m.get(&o)) {
                Some(range) => {
                    let _ = writeln!(
                        routes,
                        "      if (address >= 0x{:X}ULL && address < 0x{:X}ULL) outs.push_back({o});",
                        range.base.0, range.limit.0
                    );
                }
                None if spec.address_map.is_some() => {}
                None => {
                    let _ = writeln!(routes, "      outs.push_back({o});");
                }
            }
        }
        let _ = writeln!(routes, "      break;");
    }
    fill(
        ROUTER,
        &[
            ("GUARD", &guard(class)),
            ("CLASS", class),
            ("NAME", &comment(&spec.name)),
            ("DELAY", &spec.delay.to_string()),
            ("DELAY_PS", &spec.delay.as_ps().to_string()),
            ("IN", &spec.in_sockets.to_string()),
            ("OUT", &spec.out_sockets.to_string()),
            ("TRANSFER", &transfer_body(spec.bandwidth)),
            ("ROUTES", &routes),
        ],
    )
}

const TARGET: &str = r#"#ifndef {{GUARD}}
#define {{GUARD}}

#include <cmath>
#include <vector>

#include <systemc>
#include <tlm>
#include <tlm_utils/simple_target_socket.h>

// Target `{{NAME}}`: {{SIZE}} bytes at 0x{{BASE}}, {{IN}} socket(s).
struct {{CLASS}} : sc_core::sc_module
{
  sc_core::sc_vector<tlm_utils::simple_target_socket_tagged<{{CLASS}}>> in;

  {{CLASS}}(sc_core::sc_module_name name, double freq_ghz)
    : sc_core::sc_module(name)
    , in("in", {{IN}})
    , memory({{SIZE}}, 0x{{FILL}})
  {
    static const double nominal_ps[{{IN}}] = {{{NOMINAL}}};
    for (int i = 0; i < {{IN}}; ++i) {
      delay.push_back(sc_core::sc_time(nominal_ps[i] / freq_ghz, sc_core::SC_PS));
      in[i].register_b_transport(this, &{{CLASS}}::b_transport, i);
    }
  }

private:
  static const sc_dt::uint64 base = 0x{{BASE}}ULL;
  std::vector<unsigned char> memory;
  std::vector<sc_core::sc_time> delay;

  static sc_core::sc_time transfer_time(unsigned int length)
  {
    {{TRANSFER}}
  }

  void b_transport(int id, tlm::tlm_generic_payload& trans, sc_core::sc_time& t)
  {
    const unsigned int length = trans.get_data_length();
    const unsigned int width = trans.get_streaming_width();
    const unsigned char* enables = trans.get_byte_enable_ptr();
    const unsigned int enable_length = trans.get_byte_enable_length();
    unsigned char* data = trans.get_data_ptr();
    t += delay[id] + transfer_time(length);
    trans.set_dmi_allowed({{DMI}});
    if (width == 0) {
      trans.set_response_status(tlm::TLM_BURST_ERROR_RESPONSE);
      return;
    }
    if (trans.is_read() || trans.is_write()) {
      for (unsigned int i = 0; i < length; ++i) {
        const sc_dt::uint64 address = trans.get_address() + i % width;
        if (address < base || address - base >= memory.size()) {
          trans.set_response_status(tlm::TLM_ADDRESS_ERROR_RESPONSE);
          return;
        }
        if (enables && enables[i % enable_length] != tlm::TLM_BYTE_ENABLED) {
          continue;
        }
        if (trans.is_read()) {
          data[i] = memory[address - base];
        } else {
          memory[address - base] = data[i];
        }
      }
    }
    trans.set_response_status(tlm::TLM_OK_RESPONSE);
  }
};

#endif // {{GUARD}}
"#;

fn target_file(class: &str, spec: &TargetSpec) -> String {
    let nominal = spec.socket_delays.iter().map(|d| format!("{}.0", d.as_ps())).collect::<Vec<_>>().join(", ");
    fill(
        TARGET,
        &[
            ("GUARD", &guard(class)),
            ("CLASS", class),
            ("NAME", &comment(&spec.name)),
            ("SIZE", &spec.storage.size.to_string()),
            ("BASE", &format!("{:X}", spec.storage.base.0)),
            ("FILL", &format!("{:02X}", spec.storage.fill)),
            ("IN", &spec.socket_delays.len().to_string()),
            ("NOMINAL", &nominal),
            ("TRANSFER", &transfer_body(spec.bandwidth)),
            ("DMI", if spec.dmi { "true" } else { "false" }),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysdesc::parse_description;

    #[test]
    fn sanitizing() {
        assert_eq!(sanitize_identifier("my-brake!").unwrap(), "my_brake_");
        assert_eq!(sanitize_identifier("9lives").unwrap(), "_9lives");
        assert_eq!(sanitize_identifier("class").unwrap(), "class_");
        assert_eq!(sanitize_identifier("Bremsé").unwrap(), "Brems");
        assert_eq!(sanitize_identifier("a b").unwrap(), "a_b");
        assert_eq!(sanitize_identifier("ÄÖÜ"), Err(CodegenError::Unsanitizable("ÄÖÜ".into())));
        assert_eq!(sanitize_identifier("").unwrap_err().code(), "E-NAME-UNSANITIZABLE");
    }

    #[test]
    fn collisions_get_suffixes() {
        let mut namer = Namer::default();
        assert_eq!(namer.claim("a-b").unwrap(), "a_b");
        assert_eq!(namer.claim("a_b").unwrap(), "a_b_1");
        assert_eq!(namer.claim("a.b").unwrap(), "a_b_2");
        assert_eq!(namer.claim("A_B").unwrap(), "A_B_3");
        assert_eq!(namer.claim("a_b_1").unwrap(), "a_b_1_1");
    }

    #[test]
    fn ghz_literals() {
        assert_eq!(ghz_literal(Frequency::from_hz(1_000_000_000).unwrap()), "1.0");
        assert_eq!(ghz_literal(Frequency::from_hz(2_500_000_000).unwrap()), "2.5");
        assert_eq!(ghz_literal(Frequency::from_hz(1_000).unwrap()), "0.000001");
    }

    #[test]
    fn empty_system_is_top_only() {
        let desc = parse_description(r#"{"cpus": [{"name": "C", "frequency": "1GHz"}]}"#).unwrap();
        let bundle = export_tlm(&desc).unwrap();
        assert_eq!(bundle.names().collect::<Vec<_>>(), ["top.cpp"]);
        assert!(bundle.file("top.cpp").unwrap().contains("sc_main"));
    }

    #[test]
    fn instance_names_are_sanitized() {
        let desc = parse_description(
            r#"{
              "cpus": [{"name": "C", "frequency": "2GHz"}],
              "modules": [{"kind": "target", "name": "mem", "socket_delays": ["1ns"],
                           "storage": {"base": "0x0", "size": 4}}],
              "instances": [{"name": "my-brake!", "module": "mem", "cpu": "C"}]
            }"#,
        )
        .unwrap();
        let bundle = export_tlm(&desc).unwrap();
        let top = bundle.file("top.cpp").unwrap();
        assert!(top.contains("  mem my_brake_(\"my_brake_\", 2.0);"));
        assert_eq!(bundle.names().collect::<Vec<_>>(), ["top.cpp", "mem.h"]);
    }

    #[test]
    fn unsanitizable_instance_is_rejected() {
        let desc = parse_description(
            r#"{
              "cpus": [{"name": "C", "frequency": "2GHz"}],
              "modules": [{"kind": "target", "name": "mem", "socket_delays": ["1ns"],
                           "storage": {"base": "0x0", "size": 4}}],
              "instances": [{"name": "ÄÖ", "module": "mem", "cpu": "C"}]
            }"#,
        )
        .unwrap();
        assert_eq!(export_tlm(&desc), Err(CodegenError::Unsanitizable("ÄÖ".into())));
    }
}
