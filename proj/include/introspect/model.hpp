#ifndef INTROSPECT_MODEL_HPP
#define INTROSPECT_MODEL_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace introspect {

// Players are 0-indexed in code: player 1 of the model is index 0.
inline constexpr int kMaxPlayers = 64;

// Profile of N binary actions, packed into a bitmask. Bit i is set iff
// player i cooperates, so the integer value doubles as the state index
// (0 = everyone defects).
class ActionState {
 public:
  ActionState(std::uint64_t bits, int n_players);

  static ActionState AllDefect(int n_players) { return {0, n_players}; }
  static ActionState AllCooperate(int n_players);
  // Parses a rendering such as "DDC" (player 1 leftmost).
  static ActionState FromLabel(std::string_view label);

  std::uint64_t bits() const { return bits_; }
  std::uint64_t index() const { return bits_; }
  int n_players() const { return n_players_; }

  bool cooperates(int i) const;
  int cooperators() const;
  ActionState flipped(int i) const;
  ActionState with_action(int i, bool cooperate) const;

  // Player 1 leftmost, 'C'/'D' per player.
  std::string label() const;

  friend bool operator==(const ActionState&, const ActionState&) = default;

 private:
  std::uint64_t bits_;
  int n_players_;
};

inline std::uint64_t state_count(int n_players) { return std::uint64_t{1} << n_players; }

// Selection intensity plus the two mutation probabilities of one player.
// beta may be +infinity only for the closed-form limit operations.
struct PlayerParams {
  PlayerParams() = default;
  PlayerParams(double beta, double mu_c, double mu_d);

  double beta = 0.0;
  double mu_c = 0.0;  // probability of mutating to C
  double mu_d = 0.0;  // probability of mutating to D

  static constexpr double kInfiniteBeta = std::numeric_limits<double>::infinity();

  bool finite_beta() const;
  double no_mutation() const { return 1.0 - mu_c - mu_d; }
};

// Heterogeneous public goods game: f_i(a) = (1/N) sum_j r_j alpha_j a_j - alpha_i a_i.
struct Pgg {
  std::vector<double> alphas;
  std::vector<double> multipliers;
};

// Two-player game. Entries are indexed [player 1 action][player 2 action]
// with index 0 = C and 1 = D, i.e. the usual written layout of a bimatrix.
struct Bimatrix {
  using Matrix = std::array<std::array<double, 2>, 2>;
  Matrix row_payoffs;  // payoffs to player 1
  Matrix col_payoffs;  // payoffs to player 2
};

// f_i(a) = b/(N-1) * sum_{j != i} a_j - c_i a_i. For N = 2 this is the
// pairwise donation game f_1 = -c_1 a_1 + b a_2.
struct Donation {
  double benefit = 0.0;
  std::vector<double> costs;
};

// Explicit payoff table: row = state index, column = player.
struct PayoffTable {
  int n_players = 0;
  std::vector<double> payoffs;  // 2^N * N entries, row-major
};

class GameSpec {
 public:
  using Variant = std::variant<Pgg, Bimatrix, Donation, PayoffTable>;

  static GameSpec MakePgg(std::vector<double> alphas, std::vector<double> multipliers);
  static GameSpec MakeBimatrix(const Bimatrix::Matrix& row_payoffs,
                               const Bimatrix::Matrix& col_payoffs);
  static GameSpec MakeDonation(double benefit, std::vector<double> costs);
  static GameSpec MakeTable(int n_players, std::vector<double> payoffs);

  // Symmetric 2x2 game from reward, sucker, temptation and punishment payoffs.
  static GameSpec MakeRpst(double reward, double sucker, double temptation, double punishment);

  int n_players() const { return n_players_; }
  const Variant& variant() const { return variant_; }
  std::string_view kind() const;

  const Pgg* as_pgg() const { return std::get_if<Pgg>(&variant_); }

 private:
  GameSpec(Variant v, int n) : variant_(std::move(v)), n_players_(n) {}
  Variant variant_;
  int n_players_;
};

// Named two-player fixtures.
namespace games {
// Donation-form prisoner's dilemma (additive).
GameSpec prisoners_dilemma_m1(double b, double c1, double c2);
// Stag hunt (not additive).
GameSpec stag_hunt_m2(double b, double c1, double c2);
}  // namespace games

struct PopulationSpec {
  PopulationSpec(GameSpec game, std::vector<PlayerParams> players);

  // Same parameters for every player.
  static PopulationSpec Broadcast(GameSpec game, const PlayerParams& params);

  int n_players() const { return game.n_players(); }

  GameSpec game;
  std::vector<PlayerParams> players;
};

double payoff(const GameSpec& game, int i, const ActionState& a);

// f_i(a) - f_i(a with player i flipped).
double payoff_difference(const GameSpec& game, int i, const ActionState& a);

// (1 + e^{beta x})^{-1}, evaluated without overflow.
double fermi(double beta, double x);

// Probability that player i, once selected in state a, switches action:
// (1 - mu_c - mu_d) * fermi(beta, df_i(a)) + mu_target.
double switch_probability(const PopulationSpec& pop, int i, const ActionState& a);

}  // namespace introspect

#endif  // INTROSPECT_MODEL_HPP
