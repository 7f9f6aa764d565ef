#ifndef INTROSPECT_TESTS_FIXTURES_HPP
#define INTROSPECT_TESTS_FIXTURES_HPP

#include <random>
#include <vector>

#include "introspect/model.hpp"

namespace fixtures {

using introspect::GameSpec;
using introspect::PlayerParams;
using introspect::PopulationSpec;

// N = 3, alpha = (1, 2, 3), r = (1, 3, 9).
inline GameSpec table1_game() { return GameSpec::MakePgg({1, 2, 3}, {1, 3, 9}); }

inline PopulationSpec table1_population() {
  return PopulationSpec::Broadcast(table1_game(), PlayerParams(2.0, 0.1, 0.1));
}

// Donation game b = 1, c = (0.6, 0.1), beta = 5, mu_c = 0.05, mu_d = 0.15.
inline PopulationSpec donation_population() {
  return PopulationSpec::Broadcast(introspect::games::prisoners_dilemma_m1(1.0, 0.6, 0.1),
                                   PlayerParams(5.0, 0.05, 0.15));
}

// alpha_i = i, r = factor * N, beta = 0.5, mu_c = 0.05, mu_d = 0.15.
inline PopulationSpec figure1_population(int n, double r_factor) {
  std::vector<double> alphas, rs;
  for (int i = 1; i <= n; ++i) {
    alphas.push_back(i);
    rs.push_back(r_factor * n);
  }
  return PopulationSpec::Broadcast(GameSpec::MakePgg(alphas, rs), PlayerParams(0.5, 0.05, 0.15));
}

// alpha in (0, 5], r in (0, 3N].
inline GameSpec random_pgg(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> alphas, rs;
  for (int i = 0; i < n; ++i) {
    alphas.push_back(5.0 * (1.0 - u(rng)));
    rs.push_back(3.0 * n * (1.0 - u(rng)));
  }
  return GameSpec::MakePgg(alphas, rs);
}

inline GameSpec random_table(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> payoffs(introspect::state_count(n) * static_cast<std::uint64_t>(n));
  for (double& x : payoffs) x = u(rng);
  return GameSpec::MakeTable(n, payoffs);
}

// beta in [0, 10], mu_c + mu_d < 1.
inline PlayerParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double beta = 10.0 * u(rng);
  const double mu_c = 0.5 * u(rng);
  const double mu_d = 0.5 * u(rng);
  return {beta, mu_c, mu_d};
}

inline PopulationSpec random_additive_population(std::mt19937_64& rng, int n) {
  std::vector<PlayerParams> players;
  for (int i = 0; i < n; ++i) players.push_back(random_params(rng));
  return {random_pgg(rng, n), players};
}

}  // namespace fixtures

#endif  // INTROSPECT_TESTS_FIXTURES_HPP
