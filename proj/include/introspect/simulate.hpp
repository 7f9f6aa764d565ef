#ifndef INTROSPECT_SIMULATE_HPP
#define INTROSPECT_SIMULATE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "introspect/model.hpp"

namespace introspect {

enum class InitialState { AllDefect, AllCooperate, UniformRandom };

InitialState parse_initial_state(const std::string& name);
const char* to_string(InitialState s);

// Recorded in output metadata so runs can be reproduced.
inline constexpr const char* kRngAlgorithm = "mt19937_64, child seeds by splitmix64(seed, replicate)";

struct SimulationConfig {
  std::uint64_t steps = 5000;   // player selections per replicate
  std::uint64_t warmup = 500;   // discarded leading steps
  std::uint32_t replicates = 19;
  std::uint64_t seed = 1;
  InitialState initial_state = InitialState::UniformRandom;
  std::uint32_t batches = 100;  // batch-means standard error

  void validate() const;
};

struct SimulationResult {
  std::vector<double> per_replicate_pc;
  std::vector<std::uint64_t> per_replicate_seed;
  // Batch-means standard error of each replicate's estimate (NaN when the
  // post-warmup window is shorter than the batch count).
  std::vector<double> per_replicate_se;
  // Time-averaged cooperation frequency of each player, averaged over replicates.
  std::vector<double> per_player_frequency;

  double mean = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Seed of replicate r derived from the base seed.
std::uint64_t replicate_seed(std::uint64_t base_seed, std::uint64_t replicate);

// Per-replicate statistics are independent of `threads`.
SimulationResult run_chain(const PopulationSpec& pop, const SimulationConfig& cfg,
                           unsigned threads = 1);

// Mean, min/max and linear-interpolation quartiles of the replicate values.
SimulationResult summarize(std::span<const double> per_replicate);

}  // namespace introspect

#endif  // INTROSPECT_SIMULATE_HPP
