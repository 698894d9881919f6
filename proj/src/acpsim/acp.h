#pragma once

#include <vector>

#include "kernel.h"

namespace acpsim {

// Per-node table of selection probabilities over neighbor candidates plus the
// "stay idle" option.  Options keep a fixed order: neighbors ascending by node
// id, the idle sentinel last.
class ProbabilityTable {
 public:
  static constexpr int kIdle = -1;

  ProbabilityTable() = default;
  // Uniform over the neighbors and the idle option.
  explicit ProbabilityTable(std::vector<int> sorted_neighbors);

  // Draws an option; returns a node id or kIdle.
  int roulette(RngStream& rng) const;

  // Adds delta to each favored option, then renormalizes.  Favored entries
  // not present in the table are ignored.  kIdle may be favored: rewarding it
  // backs the node off from pre-generating.
  void update(const std::vector<int>& favored, double delta);

  double probability_of(int option) const;
  const std::vector<int>& options() const { return options_; }
  const std::vector<double>& probabilities() const { return prob_; }

 private:
  std::vector<int> options_;
  std::vector<double> prob_;
};

}  // namespace acpsim
