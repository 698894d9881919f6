#include <cmath>

#include "acpsim/bds.h"
#include "bds_oracle.h"
#include "doctest.h"

using namespace acpsim;

namespace {

const PauliErrorDistribution kUniform{};
const NoiseParams kTableNoise{0.99, 0.99};
const NoiseParams kIdeal{1.0, 1.0};

void check_state(const BellDiagonalState& s, double wi, double wx, double wy, double wz,
                 double tol = 1e-9) {
  CHECK(std::abs(s.w[kPauliI] - wi) < tol);
  CHECK(std::abs(s.w[kPauliX] - wx) < tol);
  CHECK(std::abs(s.w[kPauliY] - wy) < tol);
  CHECK(std::abs(s.w[kPauliZ] - wz) < tol);
}

}  // namespace

TEST_SUITE_BEGIN("bds");

TEST_CASE("initial_link_state splits the residual by the error distribution") {
  check_state(initial_link_state(0.95, kUniform), 0.95, 1.0 / 60, 1.0 / 60, 1.0 / 60);
  check_state(initial_link_state(1.0, kUniform), 1.0, 0.0, 0.0, 0.0);
  check_state(initial_link_state(0.7, PauliErrorDistribution{0.5, 0.25, 0.25}), 0.7, 0.15, 0.075,
              0.075);
  CHECK_THROWS(initial_link_state(1.5, kUniform));
}

TEST_CASE("decohere matches the frozen semigroup value at dt=0.1, T=2") {
  const auto out = decohere(initial_link_state(0.95, kUniform), 0.1, 2.0, kUniform);
  check_state(out, 0.904854889522, 0.031715036826, 0.031715036826, 0.031715036826);
  CHECK(out.is_normalized(1e-12));
}

TEST_CASE("decohere edge cases") {
  const auto fresh = initial_link_state(0.95, kUniform);
  SUBCASE("dt=0 is the identity") {
    const auto out = decohere(fresh, 0.0, 2.0, kUniform);
    for (int i = 0; i < 4; ++i) CHECK(out.w[i] == fresh.w[i]);
  }
  SUBCASE("maximally mixed state is a fixed point") {
    BellDiagonalState mixed{{0.25, 0.25, 0.25, 0.25}};
    const auto out = decohere(mixed, 5.0, 2.0, kUniform);
    check_state(out, 0.25, 0.25, 0.25, 0.25, 1e-12);
  }
  SUBCASE("large dt approaches maximally mixed") {
    const auto out = decohere(fresh, 1e3, 2.0, kUniform);
    check_state(out, 0.25, 0.25, 0.25, 0.25, 1e-9);
  }
  SUBCASE("negative dt rejected") { CHECK_THROWS(decohere(fresh, -0.1, 2.0, kUniform)); }
}

TEST_CASE("decohere is an exact semigroup in dt") {
  RngStream rng(301);
  for (int i = 0; i < 50; ++i) {
    const auto s = oracle::random_bds(rng);
    const double t1 = rng.uniform(0.0, 0.4);
    const double t2 = rng.uniform(0.0, 0.4);
    const auto two_step = decohere(decohere(s, t1, 2.0, kUniform), t2, 2.0, kUniform);
    const auto one_step = decohere(s, t1 + t2, 2.0, kUniform);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(two_step.w[k] - one_step.w[k]) < 1e-12);
  }
  // Also under a skewed error distribution.
  const PauliErrorDistribution skew{0.6, 0.3, 0.1};
  const auto s = initial_link_state(0.9, skew);
  const auto two_step = decohere(decohere(s, 0.05, 2.0, skew), 0.05, 2.0, skew);
  const auto one_step = decohere(s, 0.1, 2.0, skew);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(two_step.w[k] - one_step.w[k]) < 1e-12);
}

TEST_CASE("entanglement_swap worked examples") {
  const BellDiagonalState a{{0.9, 0.1, 0.0, 0.0}};
  SUBCASE("ideal BSM is the XOR convolution") {
    check_state(entanglement_swap(a, a, kIdeal), 0.82, 0.18, 0.0, 0.0, 1e-12);
  }
  SUBCASE("gate and measurement noise depolarize with w = g*f^2") {
    check_state(entanglement_swap(a, a, kTableNoise), 0.803070430000, 0.182079070000,
                0.007425250000, 0.007425250000);
  }
  SUBCASE("perfect inputs, ideal noise give a perfect output") {
    const BellDiagonalState perfect{{1.0, 0.0, 0.0, 0.0}};
    check_state(entanglement_swap(perfect, perfect, kIdeal), 1.0, 0.0, 0.0, 0.0, 1e-12);
  }
}

TEST_CASE("entanglement_swap is commutative and neutral on the identity state") {
  RngStream rng(87);
  const BellDiagonalState perfect{{1.0, 0.0, 0.0, 0.0}};
  for (int i = 0; i < 100; ++i) {
    const auto a = oracle::random_bds(rng);
    const auto b = oracle::random_bds(rng);
    const auto ab = entanglement_swap(a, b, kTableNoise);
    const auto ba = entanglement_swap(b, a, kTableNoise);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(ab.w[k] - ba.w[k]) < 1e-12);
    const auto neutral = entanglement_swap(a, perfect, kIdeal);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(neutral.w[k] - a.w[k]) < 1e-12);
  }
}

TEST_CASE("purify reproduces the BBPSSW recurrence on Werner states") {
  const BellDiagonalState werner{{0.8, 0.2 / 3, 0.2 / 3, 0.2 / 3}};
  const auto res = purify_analysis(werner, werner, kIdeal);
  CHECK(res.p_success == doctest::Approx(0.768888888889).epsilon(1e-9));
  check_state(res.out, 0.838150289017, 0.011560693642, 0.011560693642, 0.138728323699);

  RngStream rng(55);
  for (int i = 0; i < 50; ++i) {
    const double f = rng.uniform(0.3, 1.0);
    const BellDiagonalState w{{f, (1 - f) / 3, (1 - f) / 3, (1 - f) / 3}};
    const auto r = purify_analysis(w, w, kIdeal);
    const double p_ref =
        f * f + 2 * f * (1 - f) / 3 + 5 * ((1 - f) / 3) * ((1 - f) / 3);
    const double f_ref = (f * f + ((1 - f) / 3) * ((1 - f) / 3)) / p_ref;
    CHECK(r.p_success == doctest::Approx(p_ref).epsilon(1e-12));
    CHECK(r.out.fidelity() == doctest::Approx(f_ref).epsilon(1e-12));
  }
}

TEST_CASE("purify with hardware noise matches the frozen oracle value") {
  const auto fresh = initial_link_state(0.95, kUniform);
  const auto res = purify_analysis(fresh, fresh, kTableNoise);
  CHECK(res.p_success == doctest::Approx(0.909983235200).epsilon(1e-9));
  check_state(res.out, 0.958652415402, 0.001175415940, 0.001175415940, 0.038996752717);
}

TEST_CASE("purify success draw follows p_success deterministically per seed") {
  const auto fresh = initial_link_state(0.95, kUniform);
  RngStream rng(99);
  int successes = 0;
  for (int i = 0; i < 5000; ++i) {
    if (purify(fresh, fresh, kTableNoise, rng).success) ++successes;
  }
  CHECK(successes / 5000.0 == doctest::Approx(0.91).epsilon(0.02));
  RngStream replay(99);
  bool identical = true;
  RngStream rng2(99);
  for (int i = 0; i < 100; ++i) {
    identical = identical && (purify(fresh, fresh, kTableNoise, rng2).success ==
                              purify(fresh, fresh, kTableNoise, replay).success);
  }
  CHECK(identical);
}

TEST_CASE("werner_twirl keeps fidelity and evens out the error weight") {
  BellDiagonalState skewed{{0.7, 0.02, 0.08, 0.2}};
  BellDiagonalState t = werner_twirl(skewed);
  CHECK(t.fidelity() == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(t.w[1] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(t.w[2] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(t.w[3] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(t.is_normalized());

  // Repeated pumping stays useful only because of the twirl: iterating the
  // bare circuit in a fixed basis accumulates phase errors toward F = 1/2.
  const auto fresh = initial_link_state(0.95, kUniform);
  BellDiagonalState bare = fresh;
  BellDiagonalState twirled = fresh;
  for (int i = 0; i < 200; ++i) {
    bare = purify_analysis(fresh, bare, kTableNoise).out;
    twirled = werner_twirl(purify_analysis(fresh, twirled, kTableNoise).out);
  }
  CHECK(bare.fidelity() < 0.55);
  CHECK(twirled.fidelity() > 0.95);
}

TEST_CASE("operations preserve normalization and non-negativity") {
  RngStream rng(123);
  for (int i = 0; i < 300; ++i) {
    const auto a = oracle::random_bds(rng);
    const auto b = oracle::random_bds(rng);
    CHECK(decohere(a, rng.uniform(0.0, 2.0), 2.0, kUniform).is_normalized(1e-12));
    CHECK(entanglement_swap(a, b, kTableNoise).is_normalized(1e-12));
    const auto p = purify_analysis(a, b, kTableNoise);
    if (p.p_success > 1e-9) CHECK(p.out.is_normalized(1e-12));
    CHECK(p.p_success >= 0.0);
    CHECK(p.p_success <= 1.0 + 1e-12);
  }
}

TEST_CASE("oracle sweep: analytic ops track the density-matrix oracle") {
  RngStream rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 150; ++i) {
    const auto a = oracle::random_bds(rng);
    const auto b = oracle::random_bds(rng);
    const double dt = rng.uniform(0.0, 1.0);
    worst = std::max(worst, oracle::deviation_decohere(a, dt, 2.0, kUniform));
    worst = std::max(worst, oracle::deviation_swap(a, b, kTableNoise));
    worst = std::max(worst, oracle::deviation_purify(a, b, kTableNoise));
  }
  CHECK(worst < 1e-9);
}

TEST_SUITE_END();
