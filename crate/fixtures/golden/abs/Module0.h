#ifndef MODULE0_H
#define MODULE0_H

#include <cmath>
#include <cstring>
#include <vector>

#include <systemc>
#include <tlm>
#include <tlm_utils/multi_passthrough_initiator_socket.h>

// Initiator `Module0`: nominal delay 10ns, 1 socket(s).
struct Module0 : sc_core::sc_module
{
  sc_core::sc_vector<tlm_utils::multi_passthrough_initiator_socket<Module0>> socket;

  SC_HAS_PROCESS(Module0);

  Module0(sc_core::sc_module_name name, double freq_ghz)
    : sc_core::sc_module(name)
    , socket("socket", 1)
    , delay(sc_core::sc_time(10000.0 / freq_ghz, sc_core::SC_PS))
  {
    SC_THREAD(run);
  }

private:
  const sc_core::sc_time delay;

  static sc_core::sc_time transfer_time(unsigned int length)
  {
    (void)length;
    return sc_core::SC_ZERO_TIME;
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
    { // transaction 0
      std::vector<unsigned char> data = {0x01, 0x00, 0x00, 0x00};
      tlm::tlm_generic_payload trans;
      for (unsigned int k = 0; k < 1; ++k) {
        trans.set_command(tlm::TLM_WRITE_COMMAND);
        trans.set_address(0x0ULL);
        trans.set_data_ptr(data.data());
        trans.set_data_length(4);
        trans.set_streaming_width(4);
        trans.set_byte_enable_ptr(nullptr);
        trans.set_byte_enable_length(0);
        trans.set_dmi_allowed(false);
        trans.set_response_status(tlm::TLM_INCOMPLETE_RESPONSE);
        issue(0, trans);
      }
    }
  }
};

#endif // MODULE0_H
