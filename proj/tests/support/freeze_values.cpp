// Dev utility: prints oracle-computed expected values that the unit and
// acceptance tests freeze as literals. Not wired into ctest.
#include <cstdio>

#include "bds_oracle.h"

using namespace acpsim;
using namespace acpsim::oracle;

static void print_state(const char* tag, const BellDiagonalState& s) {
  std::printf("%-28s %.12f %.12f %.12f %.12f (sum %.3e)\n", tag, s.w[0], s.w[1], s.w[2], s.w[3],
              s.sum() - 1.0);
}

int main() {
  const PauliErrorDistribution uniform;
  const NoiseParams table{0.99, 0.99};
  const NoiseParams ideal{1.0, 1.0};

  const BellDiagonalState fresh = initial_link_state(0.95, uniform);
  print_state("initial F0=0.95", fresh);

  print_state("oracle decohere 0.1s T=2", oracle_decohere(fresh, 0.1, 2.0, uniform));
  print_state("analytic decohere 0.1s", decohere(fresh, 0.1, 2.0, uniform));
  std::printf("dev decohere: %.3e\n", deviation_decohere(fresh, 0.1, 2.0, uniform));

  const BellDiagonalState a{{0.9, 0.1, 0.0, 0.0}};
  print_state("oracle swap ideal", oracle_swap(a, a, ideal));
  print_state("oracle swap table1", oracle_swap(a, a, table));
  std::printf("dev swap: %.3e\n", deviation_swap(a, a, table));

  const BellDiagonalState werner{{0.8, 0.2 / 3, 0.2 / 3, 0.2 / 3}};
  const OraclePurify po = oracle_purify(werner, werner, ideal);
  std::printf("oracle purify werner ideal: p=%.12f\n", po.p_success);
  print_state("  out", po.out);

  const OraclePurify pn = oracle_purify(fresh, fresh, table);
  std::printf("oracle purify fresh table1: p=%.12f\n", pn.p_success);
  print_state("  out", pn.out);
  std::printf("dev purify: %.3e\n", deviation_purify(fresh, fresh, table));

  // Decohere at ACP staleness scales, used by scenario-level reasoning.
  print_state("decohere 0.09s", oracle_decohere(fresh, 0.09, 2.0, uniform));
  return 0;
}
