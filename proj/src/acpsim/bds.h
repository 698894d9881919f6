#pragma once

#include <array>
#include <cstdint>

#include "acpsim/kernel.h"

namespace acpsim {

// Pauli labels index Bell-diagonal weights. Label P names the Bell state
// (P (x) I)|Phi+>: I <-> Phi+, X <-> Psi+, Y <-> Psi-, Z <-> Phi-.
enum Pauli : int { kPauliI = 0, kPauliX = 1, kPauliY = 2, kPauliZ = 3 };

// Two-bit encoding of the labels: I=(0,0), X=(1,0), Y=(1,1), Z=(0,1).
// Label composition is bitwise XOR of the encodings, which coincides with
// XOR of the indices above.
constexpr int kXBit[4] = {0, 1, 1, 0};
constexpr int kZBit[4] = {0, 0, 1, 1};
constexpr int kFromBits[2][2] = {{kPauliI, kPauliZ}, {kPauliX, kPauliY}};  // [x][z]

constexpr int compose(int a, int b) { return kFromBits[kXBit[a] ^ kXBit[b]][kZBit[a] ^ kZBit[b]]; }

static_assert(compose(kPauliX, kPauliY) == kPauliZ);
static_assert(compose(kPauliX, kPauliZ) == kPauliY);
static_assert(compose(kPauliY, kPauliZ) == kPauliX);
static_assert(compose(kPauliI, kPauliY) == kPauliY);

// Index XOR realizes the same group table.
static_assert((kPauliX ^ kPauliY) == kPauliZ && (kPauliX ^ kPauliZ) == kPauliY);

// Residual Pauli error distribution of a fresh link EP (and of the memory
// decoherence channel). Entries are conditional on an error occurring.
struct PauliErrorDistribution {
  double px = 1.0 / 3.0;
  double py = 1.0 / 3.0;
  double pz = 1.0 / 3.0;
};

struct NoiseParams {
  double gate_fidelity = 0.99;
  double measure_fidelity = 0.99;
};

// Two-qubit state diagonal in the Bell basis, stored as weights
// (lambda_I, lambda_X, lambda_Y, lambda_Z). Fidelity to Phi+ is lambda_I.
struct BellDiagonalState {
  std::array<double, 4> w{1.0, 0.0, 0.0, 0.0};

  double fidelity() const { return w[kPauliI]; }
  double sum() const { return w[0] + w[1] + w[2] + w[3]; }
  bool is_normalized(double tol = 1e-9) const;
  void renormalize();
};

// Fresh link-level EP: weight F0 on I, remainder split by dist.
BellDiagonalState initial_link_state(double f0, const PauliErrorDistribution& dist);

// Memory decoherence over dt seconds with coherence time t_coh, as the exact
// exponential semigroup generated by the Pauli channel with rates dist/t_coh
// applied to one qubit of the pair. Composing two applications over dt1 and
// dt2 equals one application over dt1+dt2.
BellDiagonalState decohere(const BellDiagonalState& s, double dt, double t_coh,
                           const PauliErrorDistribution& dist);

// Entanglement swapping of pairs (A,m) and (m,B) via a Bell-state measurement
// at m: XOR convolution of the weight vectors, then depolarization toward the
// maximally mixed state with weight w = gate_fidelity * measure_fidelity^2.
BellDiagonalState entanglement_swap(const BellDiagonalState& a, const BellDiagonalState& b,
                                    const NoiseParams& noise);

struct PurifyOutcome {
  bool success = false;
  double p_success = 0.0;
  BellDiagonalState out;  // post-success kept state; meaningless on failure
};

// Deterministic part of BBPSSW-style purification: bilateral CNOT, measure
// the second pair, keep on coincidence. Gate noise pre-depolarizes each input
// with weight gate_fidelity; each party's coincidence bit flips with
// probability 1 - measure_fidelity.
PurifyOutcome purify_analysis(const BellDiagonalState& kept, const BellDiagonalState& meas,
                              const NoiseParams& noise);

// Same, with the success draw taken from rng. Failure consumes both inputs.
PurifyOutcome purify(const BellDiagonalState& kept, const BellDiagonalState& meas,
                     const NoiseParams& noise, RngStream& rng);

// Bilateral twirl to Werner form: fidelity is kept, the error weight is
// spread evenly. Applied between pumping rounds; iterating bare purification
// in a fixed basis lets phase errors pile up instead of being removed.
BellDiagonalState werner_twirl(const BellDiagonalState& s);

}  // namespace acpsim
