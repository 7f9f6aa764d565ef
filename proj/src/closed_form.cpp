#include "introspect/closed_form.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "introspect/additivity.hpp"

namespace introspect {

PlayerClosedForm player_cooperation_probability(double delta, const PlayerParams& params) {
  // Re-run the constructor checks; aggregates may have been mutated after construction.
  const PlayerParams p(params.beta, params.mu_c, params.mu_d);
  if (!std::isfinite(delta)) throw std::invalid_argument("delta must be finite");

  if (!p.finite_beta()) {
    const double limit = strong_selection_limit(delta, p);
    return {limit, delta, delta > 0.0 ? 0.0 : 1.0};
  }
  const double phi = fermi(p.beta, delta);
  return {phi * p.no_mutation() + p.mu_c, delta, phi};
}

StationaryDistribution product_measure(std::span<const double> ps) {
  const int n = static_cast<int>(ps.size());
  if (n < 1 || n > kMaxExactPlayers) {
    throw std::invalid_argument("product measure supports 1 to 20 players");
  }
  for (double p : ps) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probabilities must lie in [0, 1]");
  }
  // Grow the table one player at a time: states below 2^i are extended by player i.
  std::vector<double> pi(state_count(n), 0.0);
  pi[0] = 1.0;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t half = std::uint64_t{1} << i;
    for (std::uint64_t s = 0; s < half; ++s) {
      pi[s | half] = pi[s] * ps[static_cast<std::size_t>(i)];
      pi[s] *= 1.0 - ps[static_cast<std::size_t>(i)];
    }
  }
  return {n, std::move(pi)};
}

double group_cooperation(std::span<const double> ps) {
  if (ps.empty()) throw std::invalid_argument("group cooperation of an empty group");
  double acc = 0.0;
  for (double p : ps) acc += p;
  return acc / static_cast<double>(ps.size());
}

double pgg_cooperation_probability(const GameSpec& pgg, std::span<const PlayerParams> players) {
  const Pgg* g = pgg.as_pgg();
  if (g == nullptr) throw std::invalid_argument("pgg_cooperation_probability needs a PGG game");
  const int n = pgg.n_players();
  if (static_cast<int>(players.size()) != n) {
    throw std::invalid_argument("need one PlayerParams per player");
  }
  std::vector<double> ps;
  ps.reserve(players.size());
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double delta = pgg_delta(g->alphas[k], g->multipliers[k], n);
    ps.push_back(player_cooperation_probability(delta, players[k]).p);
  }
  return group_cooperation(ps);
}

std::vector<PlayerClosedForm> additive_cooperation(const PopulationSpec& pop) {
  std::vector<double> deltas;
  if (const Pgg* g = pop.game.as_pgg()) {
    for (int i = 0; i < pop.n_players(); ++i) {
      const auto k = static_cast<std::size_t>(i);
      deltas.push_back(pgg_delta(g->alphas[k], g->multipliers[k], pop.n_players()));
    }
  } else {
    deltas = check_additivity(pop.game).deltas();
  }
  std::vector<PlayerClosedForm> out;
  out.reserve(deltas.size());
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    out.push_back(player_cooperation_probability(deltas[k], pop.players[k]));
  }
  return out;
}

double neutral_drift(const PlayerParams& params) {
  return (1.0 + params.mu_c - params.mu_d) / 2.0;
}

double strong_selection_limit(double delta, const PlayerParams& params) {
  if (delta == 0.0) {
    throw std::invalid_argument(
        "strong-selection limit undefined for delta == 0; use a finite beta instead");
  }
  return delta > 0.0 ? params.mu_c : 1.0 - params.mu_d;
}

ThresholdVerdict threshold_check(double delta, const PlayerParams& params) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double bound;
  if (params.mu_c >= 0.5) {
    bound = kInf;  // p > mu_c >= 1/2 always
  } else if (params.mu_d >= 0.5) {
    bound = -kInf;  // p < 1 - mu_d <= 1/2 always
  } else {
    bound = std::log((0.5 - params.mu_d) / (0.5 - params.mu_c));
  }

  bool exceeds;
  if (std::isinf(bound)) {
    exceeds = bound > 0;
  } else if (!params.finite_beta()) {
    if (delta == 0.0) throw std::invalid_argument("threshold at infinite beta needs delta != 0");
    exceeds = delta < 0.0;
  } else {
    exceeds = params.beta * delta < bound;
  }
  return {exceeds, bound};
}

BalanceResult mutation_selection_balance(std::span<const double> deltas,
                                         std::span<const double> betas, double mu) {
  if (deltas.size() != betas.size()) throw std::invalid_argument("deltas and betas differ in length");
  if (deltas.empty()) throw std::invalid_argument("balance needs at least one player");
  if (!(mu >= 0.0 && mu <= 0.5)) throw std::invalid_argument("mu must lie in [0, 1/2]");

  double phi_sum = 0.0;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (!(betas[k] >= 0.0) || !std::isfinite(betas[k])) {
      throw std::invalid_argument("beta must be finite and >= 0");
    }
    phi_sum += fermi(betas[k], deltas[k]);
  }
  const double phi_bar = phi_sum / static_cast<double>(deltas.size());
  const BalanceLine line{phi_bar, 1.0 - 2.0 * phi_bar};
  return {line.at(mu), line};
}

}  // namespace introspect
