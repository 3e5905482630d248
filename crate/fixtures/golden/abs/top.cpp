// Top level: instantiates and binds every instance.

#include <systemc>
#include <tlm>

#include "Module0.h"
#include "Module1.h"
#include "Module2.h"

int sc_main(int argc, char* argv[])
{
  (void)argc;
  (void)argv;

  Module0 Brake("Brake", 1.0); // Cpu0 @ 1GHz
  Module1 Router("Router", 5.0); // Cpu1 @ 5GHz
  Module2 ABSbrake1("ABSbrake1", 4.0); // Cpu2 @ 4GHz
  Module2 ABSbrake2("ABSbrake2", 4.0); // Cpu3 @ 4GHz
  Module2 ABSbrake3("ABSbrake3", 4.0); // Cpu4 @ 4GHz
  Module2 ABSbrake4("ABSbrake4", 4.0); // Cpu5 @ 4GHz

  Brake.socket[0].bind(Router.in[0]);
  Router.out[0].bind(ABSbrake1.in[0]);
  Router.out[1].bind(ABSbrake2.in[0]);
  Router.out[2].bind(ABSbrake3.in[0]);
  Router.out[3].bind(ABSbrake4.in[0]);

  sc_core::sc_start();
  return 0;
}
