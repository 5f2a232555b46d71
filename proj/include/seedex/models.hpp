#pragma once

#include "seedex/logreg.hpp"
#include "seedex/neural.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace seedex::models {

struct EnsembleMember {
  std::uint64_t seed = 0;
  NeuralModel model;
  double validation_accuracy = 0;
  double test_accuracy = 0;
};

struct Ensemble {
  std::vector<EnsembleMember> members;  // same order as the requested seeds
};

// One network per seed on identical data and config. Runs may execute on up
// to `workers` threads; each run is single-threaded, so the result does not
// depend on the schedule.
Ensemble train_ensemble(const corpus::CorpusSplits& splits, std::span<const std::uint64_t> seeds,
                        const TrainConfig& config, std::size_t workers = 1);

// Parses "a..b" (inclusive) or a comma list "1,5,7".
std::vector<std::uint64_t> parse_seed_list(const std::string& spec);

}  // namespace seedex::models
