#ifndef MODULE1_H
#define MODULE1_H

#include <cmath>
#include <cstring>
#include <vector>

#include <systemc>
#include <tlm>
#include <tlm_utils/multi_passthrough_initiator_socket.h>
#include <tlm_utils/simple_target_socket.h>

// Router `Module1`: nominal delay 5ns, 1 in / 4 out.
struct Module1 : sc_core::sc_module
{
  sc_core::sc_vector<tlm_utils::simple_target_socket_tagged<Module1>> in;
  sc_core::sc_vector<tlm_utils::multi_passthrough_initiator_socket<Module1>> out;

  Module1(sc_core::sc_module_name name, double freq_ghz)
    : sc_core::sc_module(name)
    , in("in", 1)
    , out("out", 4)
    , delay(sc_core::sc_time(5000.0 / freq_ghz, sc_core::SC_PS))
  {
    for (int i = 0; i < 1; ++i) {
      in[i].register_b_transport(this, &Module1::b_transport, i);
    }
  }

private:
  const sc_core::sc_time delay;

  static sc_core::sc_time transfer_time(unsigned int length)
  {
    (void)length;
    return sc_core::SC_ZERO_TIME;
  }

  // Out-sockets reachable from in-socket `id` for `address`, ascending.
  static std::vector<unsigned int> route(int id, sc_dt::uint64 address)
  {
    std::vector<unsigned int> outs;
    (void)address;
    switch (id) {
    case 0:
      outs.push_back(0);
      outs.push_back(1);
      outs.push_back(2);
      outs.push_back(3);
      break;
    default:
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

#endif // MODULE1_H
