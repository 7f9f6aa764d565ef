#ifndef INTROSPECT_ADDITIVITY_HPP
#define INTROSPECT_ADDITIVITY_HPP

#include <stdexcept>
#include <variant>
#include <vector>

#include "introspect/model.hpp"

namespace introspect {

inline constexpr int kMaxAdditivityPlayers = 20;
inline constexpr double kDefaultAdditivityTolerance = 1e-9;

struct Additive {
  double delta;  // payoff difference when the player defects
};

// Two contexts (player's own bit = 0 in both) whose payoff differences disagree.
struct NotAdditive {
  ActionState context_a;
  ActionState context_b;
  double diff_a;
  double diff_b;
};

using PlayerAdditivity = std::variant<Additive, NotAdditive>;

struct AdditivityReport {
  std::vector<PlayerAdditivity> per_player;
  bool game_additive = false;

  // Deltas of all players; throws NotAdditiveError if any player is not additive.
  std::vector<double> deltas() const;
};

class NotAdditiveError : public std::runtime_error {
 public:
  NotAdditiveError(int player, NotAdditive witness);
  int player() const { return player_; }
  const NotAdditive& witness() const { return witness_; }

 private:
  int player_;
  NotAdditive witness_;
};

// Exhaustive scan of the 2^(N-1) co-player contexts of every player. A player is
// additive iff the spread of df_i over contexts (own bit = 0) is at most
// tol * max(1, max |df_i|). delta is read at the all-defect context.
AdditivityReport check_additivity(const GameSpec& game, double tol = kDefaultAdditivityTolerance);

// alpha_i (1 - r_i / n)
double pgg_delta(double alpha_i, double r_i, int n);

}  // namespace introspect

#endif  // INTROSPECT_ADDITIVITY_HPP
