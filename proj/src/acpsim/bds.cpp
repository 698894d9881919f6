#include "acpsim/bds.h"

#include <cmath>
#include <stdexcept>

namespace acpsim {

namespace {

// Character of the label group: chi_j(k) = (-1)^(x_j*x_k + z_j*z_k).
inline double chi(int j, int k) {
  return ((kXBit[j] & kXBit[k]) ^ (kZBit[j] & kZBit[k])) ? -1.0 : 1.0;
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " outside [0,1]");
}

}  // namespace

bool BellDiagonalState::is_normalized(double tol) const {
  if (std::abs(sum() - 1.0) > tol) return false;
  for (double x : w)
    if (x < -tol) return false;
  return true;
}

void BellDiagonalState::renormalize() {
  for (double& x : w)
    if (x < 0.0) x = 0.0;
  double s = sum();
  if (s <= 0.0) throw std::logic_error("BellDiagonalState::renormalize: zero mass");
  for (double& x : w) x /= s;
}

BellDiagonalState initial_link_state(double f0, const PauliErrorDistribution& dist) {
  check_probability(f0, "initial fidelity");
  BellDiagonalState s;
  s.w = {f0, (1.0 - f0) * dist.px, (1.0 - f0) * dist.py, (1.0 - f0) * dist.pz};
  return s;
}

BellDiagonalState decohere(const BellDiagonalState& s, double dt, double t_coh,
                           const PauliErrorDistribution& dist) {
  if (dt < 0.0) throw std::invalid_argument("decohere: negative dt");
  if (t_coh <= 0.0) throw std::invalid_argument("decohere: coherence time must be positive");
  if (dt == 0.0) return s;
  const double c[4] = {0.0, dist.px, dist.py, dist.pz};
  double decayed[4];
  for (int j = 0; j < 4; ++j) {
    double s_hat = 0.0, c_hat = 0.0;
    for (int k = 0; k < 4; ++k) {
      s_hat += chi(j, k) * s.w[k];
      c_hat += chi(j, k) * c[k];
    }
    decayed[j] = s_hat * std::exp(-dt * (1.0 - c_hat) / t_coh);
  }
  BellDiagonalState out;
  for (int k = 0; k < 4; ++k) {
    double v = 0.0;
    for (int j = 0; j < 4; ++j) v += chi(j, k) * decayed[j];
    out.w[k] = 0.25 * v;
  }
  out.renormalize();
  return out;
}

BellDiagonalState entanglement_swap(const BellDiagonalState& a, const BellDiagonalState& b,
                                    const NoiseParams& noise) {
  double c[4] = {0.0, 0.0, 0.0, 0.0};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) c[i ^ j] += a.w[i] * b.w[j];
  const double w = noise.gate_fidelity * noise.measure_fidelity * noise.measure_fidelity;
  BellDiagonalState out;
  for (int k = 0; k < 4; ++k) out.w[k] = w * c[k] + (1.0 - w) * 0.25;
  out.renormalize();
  return out;
}

PurifyOutcome purify_analysis(const BellDiagonalState& kept, const BellDiagonalState& meas,
                              const NoiseParams& noise) {
  const double g = noise.gate_fidelity;
  double k[4], m[4];
  for (int i = 0; i < 4; ++i) {
    k[i] = g * kept.w[i] + (1.0 - g) * 0.25;
    m[i] = g * meas.w[i] + (1.0 - g) * 0.25;
  }
  const double eps = 1.0 - noise.measure_fidelity;
  const double p_same = eps * eps + (1.0 - eps) * (1.0 - eps);
  const double p_diff = 2.0 * eps * (1.0 - eps);

  // The bilateral CNOT maps input errors (a on kept, b on measured) to
  // (a_x, a_z^b_z) on the kept pair; coincidence holds when a_x == b_x.
  PurifyOutcome res;
  double p = 0.0;
  std::array<double, 4> out{0.0, 0.0, 0.0, 0.0};
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const double joint = k[a] * m[b];
      const double accept = (kXBit[a] == kXBit[b]) ? p_same : p_diff;
      const int o = kFromBits[kXBit[a]][kZBit[a] ^ kZBit[b]];
      p += joint * accept;
      out[o] += joint * accept;
    }
  }
  res.p_success = p;
  if (p > 0.0) {
    for (int i = 0; i < 4; ++i) res.out.w[i] = out[i] / p;
    res.out.renormalize();
  }
  return res;
}

PurifyOutcome purify(const BellDiagonalState& kept, const BellDiagonalState& meas,
                     const NoiseParams& noise, RngStream& rng) {
  PurifyOutcome res = purify_analysis(kept, meas, noise);
  res.success = rng.bernoulli(res.p_success);
  return res;
}

BellDiagonalState werner_twirl(const BellDiagonalState& s) {
  double f = s.w[0];
  double rest = (1.0 - f) / 3.0;
  return BellDiagonalState{{f, rest, rest, rest}};
}

}  // namespace acpsim
