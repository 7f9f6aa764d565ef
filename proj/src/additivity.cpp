#include "introspect/additivity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace introspect {

namespace {

// Spreads the N-1 bits of `context` around a zero at position i.
std::uint64_t insert_zero_bit(std::uint64_t context, int i) {
  const std::uint64_t low = context & ((std::uint64_t{1} << i) - 1);
  const std::uint64_t high = context >> i;
  return (high << (i + 1)) | low;
}

PlayerAdditivity scan_player(const GameSpec& game, int i, double tol) {
  const int n = game.n_players();
  const std::uint64_t contexts = std::uint64_t{1} << (n - 1);

  ActionState lo_state = ActionState::AllDefect(n);
  ActionState hi_state = lo_state;
  const double delta = payoff_difference(game, i, lo_state);
  double lo = delta;
  double hi = delta;
  double max_abs = std::abs(delta);

  for (std::uint64_t c = 1; c < contexts; ++c) {
    const ActionState a(insert_zero_bit(c, i), n);
    const double d = payoff_difference(game, i, a);
    max_abs = std::max(max_abs, std::abs(d));
    if (d < lo) {
      lo = d;
      lo_state = a;
    }
    if (d > hi) {
      hi = d;
      hi_state = a;
    }
  }
  if (hi - lo <= tol * std::max(1.0, max_abs)) return Additive{delta};
  return NotAdditive{hi_state, lo_state, hi, lo};
}

std::string describe(int player, const NotAdditive& w) {
  return "game not additive for player " + std::to_string(player + 1) + ": payoff difference " +
         std::to_string(w.diff_a) + " at " + w.context_a.label() + " vs " +
         std::to_string(w.diff_b) + " at " + w.context_b.label();
}

}  // namespace

NotAdditiveError::NotAdditiveError(int player, NotAdditive witness)
    : std::runtime_error(describe(player, witness)), player_(player), witness_(witness) {}

std::vector<double> AdditivityReport::deltas() const {
  std::vector<double> out;
  out.reserve(per_player.size());
  for (std::size_t i = 0; i < per_player.size(); ++i) {
    if (const auto* w = std::get_if<NotAdditive>(&per_player[i])) {
      throw NotAdditiveError(static_cast<int>(i), *w);
    }
    out.push_back(std::get<Additive>(per_player[i]).delta);
  }
  return out;
}

AdditivityReport check_additivity(const GameSpec& game, double tol) {
  const int n = game.n_players();
  if (n > kMaxAdditivityPlayers) {
    throw std::invalid_argument("exhaustive additivity check supports at most 20 players");
  }
  if (!(tol >= 0.0)) throw std::invalid_argument("tolerance must be >= 0");

  AdditivityReport report;
  report.per_player.reserve(static_cast<std::size_t>(n));
  report.game_additive = true;
  for (int i = 0; i < n; ++i) {
    report.per_player.push_back(scan_player(game, i, tol));
    if (std::holds_alternative<NotAdditive>(report.per_player.back())) {
      report.game_additive = false;
    }
  }
  return report;
}

double pgg_delta(double alpha_i, double r_i, int n) {
  if (!(alpha_i > 0.0)) throw std::invalid_argument("alpha must be > 0");
  if (n < 1) throw std::invalid_argument("group size must be >= 1");
  return alpha_i * (1.0 - r_i / n);
}

}  // namespace introspect
