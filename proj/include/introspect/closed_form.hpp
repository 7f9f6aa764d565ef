#ifndef INTROSPECT_CLOSED_FORM_HPP
#define INTROSPECT_CLOSED_FORM_HPP

#include <span>
#include <vector>

#include "introspect/exact.hpp"
#include "introspect/model.hpp"

namespace introspect {

// Long-run behaviour of one player in an additive game.
struct PlayerClosedForm {
  double p;      // cooperation probability
  double delta;  // payoff difference when defecting
  double phi;    // fermi(beta, delta)
};

// p = phi (1 - mu_c - mu_d) + mu_c. Infinite beta routes to the strong
// selection limit and rejects delta == 0.
PlayerClosedForm player_cooperation_probability(double delta, const PlayerParams& params);

// Independent Bernoulli(p_i) players.
StationaryDistribution product_measure(std::span<const double> ps);

// Mean of the individual cooperation probabilities.
double group_cooperation(std::span<const double> ps);

double pgg_cooperation_probability(const GameSpec& pgg, std::span<const PlayerParams> players);

// Per-player probabilities for any additive game; throws NotAdditiveError otherwise.
std::vector<PlayerClosedForm> additive_cooperation(const PopulationSpec& pop);

// beta = 0: (1 + mu_c - mu_d) / 2.
double neutral_drift(const PlayerParams& params);

// beta -> infinity: mu_c for delta > 0, 1 - mu_d for delta < 0.
double strong_selection_limit(double delta, const PlayerParams& params);

struct ThresholdVerdict {
  bool exceeds_half;
  // ln((1/2 - mu_d) / (1/2 - mu_c)); +inf when mu_c >= 1/2, -inf when mu_d >= 1/2.
  double log_odds_bound;
};

// p > 1/2 iff beta * delta < log_odds_bound (strict; equality reports false).
ThresholdVerdict threshold_check(double delta, const PlayerParams& params);

struct BalanceLine {
  double phi_bar;  // mean mutation-free fermi value
  double slope;    // 1 - 2 phi_bar

  double at(double mu) const { return (1.0 - 2.0 * mu) * phi_bar + mu; }
};

struct BalanceResult {
  double p_c;
  BalanceLine line;
};

// Common symmetric mutation mu in [0, 1/2]: p_C = (1 - 2 mu) Phi + mu.
BalanceResult mutation_selection_balance(std::span<const double> deltas,
                                         std::span<const double> betas, double mu);

}  // namespace introspect

#endif  // INTROSPECT_CLOSED_FORM_HPP
