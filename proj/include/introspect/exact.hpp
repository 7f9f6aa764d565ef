#ifndef INTROSPECT_EXACT_HPP
#define INTROSPECT_EXACT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <stdexcept>
#include <vector>

#include "introspect/model.hpp"

namespace introspect {

// Largest population for which the full transition matrix is built.
inline constexpr int kMaxExactPlayers = 20;
// Largest population for the dense LU route.
inline constexpr int kMaxDirectPlayers = 12;
// `Auto` switches from dense LU to power iteration above this size.
inline constexpr int kAutoDirectPlayers = 10;

inline constexpr double kPowerTolerance = 1e-13;
inline constexpr std::uint64_t kPowerMaxIterations = 1'000'000;

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Introspection-with-mutation chain on {0,1}^N. Row s holds N off-diagonal
// entries (s -> s with bit i flipped) and a self-loop equal to one minus
// their sum.
class TransitionMatrix {
 public:
  TransitionMatrix(int n_players, std::vector<double> off_diagonal);

  int n_players() const { return n_players_; }
  std::uint64_t n_states() const { return state_count(n_players_); }

  double off_diagonal(std::uint64_t from, int i) const {
    return off_diagonal_[from * static_cast<std::uint64_t>(n_players_) +
                         static_cast<std::uint64_t>(i)];
  }
  double self_loop(std::uint64_t state) const { return self_loop_[state]; }

  // Any entry; zero off the Hamming-1 support.
  double probability(std::uint64_t from, std::uint64_t to) const;

 private:
  int n_players_;
  std::vector<double> off_diagonal_;
  std::vector<double> self_loop_;
};

TransitionMatrix build_transition_matrix(const PopulationSpec& pop, unsigned threads = 1);

// Probability vector over the 2^N states, indexed by state bitmask.
class StationaryDistribution {
 public:
  StationaryDistribution(int n_players, std::vector<double> probs);

  int n_players() const { return n_players_; }
  const std::vector<double>& probs() const { return probs_; }
  double operator[](std::uint64_t state) const { return probs_[state]; }
  std::uint64_t size() const { return probs_.size(); }

 private:
  int n_players_;
  std::vector<double> probs_;
};

enum class SolveMethod { Direct, Power, Auto };

SolveMethod parse_solve_method(const std::string& name);
const char* to_string(SolveMethod m);

StationaryDistribution stationary_distribution(const TransitionMatrix& t,
                                               SolveMethod method = SolveMethod::Auto,
                                               unsigned threads = 1,
                                               std::uint64_t max_iterations = kPowerMaxIterations);

// Expected fraction of cooperators.
double cooperation_probability(const StationaryDistribution& pi);

// Probability that player i cooperates.
double marginal(const StationaryDistribution& pi, int i);

std::vector<double> marginals(const StationaryDistribution& pi);

// L1 norm of pi T - pi.
double stationarity_residual(const StationaryDistribution& pi, const TransitionMatrix& t);

// State indices in reading order: labels sorted with D before C, player 1
// leftmost ("DDD", "DDC", "DCD", ...).
std::vector<std::uint64_t> reading_order(int n_players);

// CSV rows: state_label,state_index,probability (reading order).
void write_distribution_csv(std::ostream& os, const StationaryDistribution& pi);

}  // namespace introspect

#endif  // INTROSPECT_EXACT_HPP
