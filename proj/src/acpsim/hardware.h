#pragma once

#include "bds.h"
#include "kernel.h"

namespace acpsim {

// Physical-layer knobs shared by every link and memory in a run.
struct HardwareParams {
  double initial_fidelity = 0.95;
  PauliErrorDistribution pauli{};
  double coherence_time_s = 2.0;
  double memory_efficiency = 0.6;
  double detector_efficiency = 0.95;
  double bsm_success_rate = 0.5;
  double fiber_attenuation_db_per_km = 0.2;
  double light_speed_m_per_s = 2e8;
  double forward_delay_s = 20e-6;
  double end_process_delay_s = 100e-6;
  double emission_period_s = 50e-6;
  NoiseParams noise{};
  double swap_success_rate = 1.0;
};

double transmittance(double length_km, double attenuation_db_per_km);

// Probability that one meet-in-the-middle attempt on a link heralds success.
double attempt_success_prob(const HardwareParams& hw, double link_length_km);

// One-way latency of a classical message: propagation, per-intermediate-node
// forwarding, and processing at the receiving end.
double classical_latency_s(const HardwareParams& hw, double distance_km, int intermediate_hops);
SimTime classical_latency_ps(const HardwareParams& hw, double distance_km, int intermediate_hops);

// Timing of one generation attempt cycle on a link.  The two ends agree on an
// emission slot (one round trip), photons fly to the midpoint station, and the
// heralded outcome travels back to the ends.
SimTime link_rtt_ps(const HardwareParams& hw, double link_length_km);
SimTime midpoint_flight_ps(const HardwareParams& hw, double link_length_km);
SimTime herald_notify_ps(const HardwareParams& hw, double link_length_km);
SimTime attempt_cycle_ps(const HardwareParams& hw, double link_length_km);
SimTime attempt_emission_offset_ps(const HardwareParams& hw, double link_length_km);
SimTime attempt_herald_offset_ps(const HardwareParams& hw, double link_length_km);

}  // namespace acpsim
