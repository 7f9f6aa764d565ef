#include "introspect/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "introspect/parallel.hpp"

namespace introspect {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Draws are built from raw engine output so the stream is identical on every
// standard library.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int uniform_player(std::mt19937_64& rng, int n) {
  const auto un = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % un;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<int>(x % un);
}

struct ReplicateOutcome {
  double pc;
  double se;
  std::vector<double> frequency;
};

ReplicateOutcome run_replicate(const PopulationSpec& pop, const SimulationConfig& cfg,
                               std::uint64_t seed) {
  const int n = pop.n_players();
  std::mt19937_64 rng(seed);

  std::uint64_t bits = 0;
  switch (cfg.initial_state) {
    case InitialState::AllDefect:
      break;
    case InitialState::AllCooperate:
      bits = ActionState::AllCooperate(n).bits();
      break;
    case InitialState::UniformRandom:
      for (int i = 0; i < n; ++i) {
        if (rng() >> 63) bits |= std::uint64_t{1} << i;
      }
      break;
  }
  ActionState state(bits, n);

  const std::uint64_t window = cfg.steps - cfg.warmup;
  const bool batched = window >= cfg.batches;
  std::vector<std::uint64_t> batch_coop(batched ? cfg.batches : 0, 0);
  std::vector<std::uint64_t> player_coop(static_cast<std::size_t>(n), 0);
  std::uint64_t coop_total = 0;

  for (std::uint64_t step = 0; step < cfg.steps; ++step) {
    const int i = uniform_player(rng, n);
    if (uniform01(rng) < switch_probability(pop, i, state)) state = state.flipped(i);
    if (step < cfg.warmup) continue;

    const auto c = static_cast<std::uint64_t>(state.cooperators());
    coop_total += c;
    if (batched) batch_coop[(step - cfg.warmup) * cfg.batches / window] += c;
    for (int j = 0; j < n; ++j) {
      if ((state.bits() >> j) & 1U) ++player_coop[static_cast<std::size_t>(j)];
    }
  }

  ReplicateOutcome out;
  const double denom = static_cast<double>(window) * n;
  out.pc = static_cast<double>(coop_total) / denom;
  out.se = std::numeric_limits<double>::quiet_NaN();
  if (batched && cfg.batches > 1) {
    std::vector<double> means(cfg.batches);
    double avg = 0.0;
    for (std::uint32_t b = 0; b < cfg.batches; ++b) {
      const std::uint64_t lo = (b * window + cfg.batches - 1) / cfg.batches;
      const std::uint64_t hi = ((b + 1) * window + cfg.batches - 1) / cfg.batches;
      means[b] = static_cast<double>(batch_coop[b]) / (static_cast<double>(hi - lo) * n);
      avg += means[b];
    }
    avg /= cfg.batches;
    double ss = 0.0;
    for (double m : means) ss += (m - avg) * (m - avg);
    out.se = std::sqrt(ss / (cfg.batches - 1) / cfg.batches);
  }
  out.frequency.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    out.frequency[static_cast<std::size_t>(j)] =
        static_cast<double>(player_coop[static_cast<std::size_t>(j)]) / static_cast<double>(window);
  }
  return out;
}

double interpolated_quantile(const std::vector<double>& sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

InitialState parse_initial_state(const std::string& name) {
  if (name == "all_defect") return InitialState::AllDefect;
  if (name == "all_cooperate") return InitialState::AllCooperate;
  if (name == "uniform_random") return InitialState::UniformRandom;
  throw std::invalid_argument("unknown initial state '" + name + "'");
}

const char* to_string(InitialState s) {
  switch (s) {
    case InitialState::AllDefect:
      return "all_defect";
    case InitialState::AllCooperate:
      return "all_cooperate";
    case InitialState::UniformRandom:
      break;
  }
  return "uniform_random";
}

void SimulationConfig::validate() const {
  if (!(warmup < steps)) throw std::invalid_argument("simulation warmup must be < steps");
  if (replicates < 1) throw std::invalid_argument("simulation needs at least one replicate");
  if (batches < 1) throw std::invalid_argument("simulation needs at least one batch");
}

std::uint64_t replicate_seed(std::uint64_t base_seed, std::uint64_t replicate) {
  return splitmix64(splitmix64(base_seed) ^ replicate);
}

SimulationResult run_chain(const PopulationSpec& pop, const SimulationConfig& cfg,
                           unsigned threads) {
  cfg.validate();
  for (const auto& p : pop.players) {
    if (!p.finite_beta()) throw std::invalid_argument("simulation requires finite beta");
  }

  std::vector<ReplicateOutcome> outcomes(cfg.replicates);
  std::vector<std::uint64_t> seeds(cfg.replicates);
  for (std::uint32_t r = 0; r < cfg.replicates; ++r) seeds[r] = replicate_seed(cfg.seed, r);
  parallel_for(cfg.replicates, threads,
               [&](std::size_t r) { outcomes[r] = run_replicate(pop, cfg, seeds[r]); });

  std::vector<double> pcs;
  pcs.reserve(outcomes.size());
  for (const auto& o : outcomes) pcs.push_back(o.pc);
  SimulationResult result = summarize(pcs);
  result.per_replicate_seed = std::move(seeds);

  const auto n = static_cast<std::size_t>(pop.n_players());
  result.per_player_frequency.assign(n, 0.0);
  for (const auto& o : outcomes) {
    result.per_replicate_se.push_back(o.se);
    for (std::size_t j = 0; j < n; ++j) result.per_player_frequency[j] += o.frequency[j];
  }
  for (double& f : result.per_player_frequency) f /= cfg.replicates;
  return result;
}

SimulationResult summarize(std::span<const double> per_replicate) {
  if (per_replicate.empty()) throw std::invalid_argument("cannot summarize an empty sample");
  SimulationResult r;
  r.per_replicate_pc.assign(per_replicate.begin(), per_replicate.end());

  std::vector<double> sorted = r.per_replicate_pc;
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  for (double v : r.per_replicate_pc) total += v;
  r.mean = total / static_cast<double>(sorted.size());
  r.min = sorted.front();
  r.max = sorted.back();
  r.q1 = interpolated_quantile(sorted, 0.25);
  r.median = interpolated_quantile(sorted, 0.5);
  r.q3 = interpolated_quantile(sorted, 0.75);
  return r;
}

}  // namespace introspect
