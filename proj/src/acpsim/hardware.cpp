#include "hardware.h"

#include <algorithm>
#include <cmath>

namespace acpsim {

double transmittance(double length_km, double attenuation_db_per_km) {
  return std::pow(10.0, -attenuation_db_per_km * length_km / 10.0);
}

double attempt_success_prob(const HardwareParams& hw, double link_length_km) {
  const double arm =
      hw.memory_efficiency *
      transmittance(link_length_km / 2.0, hw.fiber_attenuation_db_per_km) *
      hw.detector_efficiency;
  return hw.bsm_success_rate * arm * arm;
}

double classical_latency_s(const HardwareParams& hw, double distance_km, int intermediate_hops) {
  return distance_km * 1000.0 / hw.light_speed_m_per_s +
         intermediate_hops * hw.forward_delay_s + hw.end_process_delay_s;
}

SimTime classical_latency_ps(const HardwareParams& hw, double distance_km, int intermediate_hops) {
  return seconds_to_ps(classical_latency_s(hw, distance_km, intermediate_hops));
}

SimTime link_rtt_ps(const HardwareParams& hw, double link_length_km) {
  return 2 * classical_latency_ps(hw, link_length_km, 0);
}

SimTime midpoint_flight_ps(const HardwareParams& hw, double link_length_km) {
  return seconds_to_ps(link_length_km / 2.0 * 1000.0 / hw.light_speed_m_per_s);
}

SimTime herald_notify_ps(const HardwareParams& hw, double link_length_km) {
  return classical_latency_ps(hw, link_length_km / 2.0, 0);
}

SimTime attempt_cycle_ps(const HardwareParams& hw, double link_length_km) {
  return std::max(seconds_to_ps(hw.emission_period_s),
                  attempt_herald_offset_ps(hw, link_length_km));
}

SimTime attempt_emission_offset_ps(const HardwareParams& hw, double link_length_km) {
  return link_rtt_ps(hw, link_length_km);
}

SimTime attempt_herald_offset_ps(const HardwareParams& hw, double link_length_km) {
  return link_rtt_ps(hw, link_length_km) + midpoint_flight_ps(hw, link_length_km) +
         herald_notify_ps(hw, link_length_km);
}

}  // namespace acpsim
