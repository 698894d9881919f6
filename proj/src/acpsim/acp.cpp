#include "acp.h"

#include <algorithm>

namespace acpsim {

ProbabilityTable::ProbabilityTable(std::vector<int> sorted_neighbors)
    : options_(std::move(sorted_neighbors)) {
  options_.push_back(kIdle);
  prob_.assign(options_.size(), 1.0 / static_cast<double>(options_.size()));
}

int ProbabilityTable::roulette(RngStream& rng) const {
  double r = rng.uniform01();
  for (size_t i = 0; i < options_.size(); ++i) {
    r -= prob_[i];
    if (r < 0.0) return options_[i];
  }
  return options_.back();
}

void ProbabilityTable::update(const std::vector<int>& favored, double delta) {
  double total = 0.0;
  for (size_t i = 0; i < options_.size(); ++i) {
    if (std::find(favored.begin(), favored.end(), options_[i]) != favored.end()) {
      prob_[i] += delta;
    }
    total += prob_[i];
  }
  for (double& p : prob_) p /= total;
}

double ProbabilityTable::probability_of(int option) const {
  for (size_t i = 0; i < options_.size(); ++i) {
    if (options_[i] == option) return prob_[i];
  }
  return 0.0;
}

}  // namespace acpsim
