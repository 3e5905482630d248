#ifndef MODULE2_H
#define MODULE2_H

#include <cmath>
#include <vector>

#include <systemc>
#include <tlm>
#include <tlm_utils/simple_target_socket.h>

// Target `Module2`: 16 bytes at 0x0, 1 socket(s).
struct Module2 : sc_core::sc_module
{
  sc_core::sc_vector<tlm_utils::simple_target_socket_tagged<Module2>> in;

  Module2(sc_core::sc_module_name name, double freq_ghz)
    : sc_core::sc_module(name)
    , in("in", 1)
    , memory(16, 0x00)
  {
    static const double nominal_ps[1] = {20000.0};
    for (int i = 0; i < 1; ++i) {
      delay.push_back(sc_core::sc_time(nominal_ps[i] / freq_ghz, sc_core::SC_PS));
      in[i].register_b_transport(this, &Module2::b_transport, i);
    }
  }

private:
  static const sc_dt::uint64 base = 0x0ULL;
  std::vector<unsigned char> memory;
  std::vector<sc_core::sc_time> delay;

  static sc_core::sc_time transfer_time(unsigned int length)
  {
    (void)length;
    return sc_core::SC_ZERO_TIME;
  }

  void b_transport(int id, tlm::tlm_generic_payload& trans, sc_core::sc_time& t)
  {
    const unsigned int length = trans.get_data_length();
    const unsigned int width = trans.get_streaming_width();
    const unsigned char* enables = trans.get_byte_enable_ptr();
    const unsigned int enable_length = trans.get_byte_enable_length();
    unsigned char* data = trans.get_data_ptr();
    t += delay[id] + transfer_time(length);
    trans.set_dmi_allowed(false);
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

#endif // MODULE2_H
