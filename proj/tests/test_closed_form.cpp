#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>

#include "fixtures.hpp"
#include "introspect/additivity.hpp"
#include "introspect/closed_form.hpp"

using namespace introspect;

TEST_CASE("per-player probability, donation game") {
  const PlayerParams params(5.0, 0.05, 0.15);
  const auto p1 = player_cooperation_probability(0.6, params);
  const auto p2 = player_cooperation_probability(0.1, params);
  CHECK(std::abs(p1.p - 0.088) < 5e-4);
  CHECK(std::abs(p2.p - 0.352) < 5e-4);
  CHECK(p1.phi == fermi(5.0, 0.6));
  CHECK(p1.p == p1.phi * (1 - 0.05 - 0.15) + 0.05);
  CHECK(p1.delta == 0.6);
}

TEST_CASE("neutral symmetric mutation gives one half") {
  for (double delta : {-3.0, 0.0, 0.7, 12.0}) {
    CHECK(player_cooperation_probability(delta, PlayerParams(0.0, 0.2, 0.2)).p == doctest::Approx(0.5));
  }
  CHECK_THROWS(player_cooperation_probability(NAN, PlayerParams(1, 0, 0)));
}

TEST_CASE("infinite beta routes to the strong-selection limit") {
  const PlayerParams inf(PlayerParams::kInfiniteBeta, 0.1, 0.2);
  CHECK(player_cooperation_probability(1.0, inf).p == 0.1);
  CHECK(player_cooperation_probability(-1.0, inf).p == doctest::Approx(0.8));
  CHECK_THROWS_AS(player_cooperation_probability(0.0, inf), std::invalid_argument);
}

TEST_CASE("product measure") {
  // exact Table 1 marginals; oracle: tests/oracles/derive_values.py
  const auto pi = product_measure(std::vector<double>{0.266886821861, 0.5, 0.899995084660});
  CHECK(std::abs(pi[ActionState::FromLabel("DDC").index()] - 0.3299) < 5e-5);
  CHECK(std::abs(pi[ActionState::FromLabel("CDD").index()] - 0.0133) < 5e-5);

  const auto point = product_measure(std::vector<double>(5, 1.0));
  CHECK(point[31] == 1.0);
  const auto uniform = product_measure(std::vector<double>(4, 0.5));
  for (double p : uniform.probs()) CHECK(p == 1.0 / 16);

  CHECK_THROWS(product_measure(std::vector<double>{0.5, 1.2}));
  CHECK_THROWS(product_measure(std::vector<double>{}));
}

TEST_CASE("product measure marginals recover the inputs") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 1; n <= 12; ++n) {
    std::vector<double> ps;
    for (int i = 0; i < n; ++i) ps.push_back(u(rng));
    const auto pi = product_measure(ps);
    for (int i = 0; i < n; ++i) CHECK(marginal(pi, i) == doctest::Approx(ps[static_cast<std::size_t>(i)]).epsilon(1e-12));
    CHECK(cooperation_probability(pi) == doctest::Approx(group_cooperation(ps)).epsilon(1e-12));
  }
}

TEST_CASE("group cooperation") {
  CHECK(group_cooperation(std::vector<double>{0.2669, 0.5, 0.8999}) == doctest::Approx(0.5556).epsilon(1e-4));
  CHECK(group_cooperation(std::vector<double>{0.3, 0.3, 0.3}) == doctest::Approx(0.3));
  CHECK(group_cooperation(std::vector<double>{0.0, 1.0}) == 0.5);
  CHECK_THROWS(group_cooperation(std::vector<double>{}));
}

TEST_CASE("pgg cooperation probability") {
  const auto table1 = fixtures::table1_population();
  CHECK(pgg_cooperation_probability(table1.game, table1.players) ==
        doctest::Approx(0.555627302174).epsilon(1e-11));

  // r_i = N for everyone: every delta vanishes
  const auto flat = GameSpec::MakePgg({1, 2, 3, 4}, {4, 4, 4, 4});
  const std::vector<PlayerParams> players = {{1, 0.1, 0.2}, {2, 0.0, 0.3}, {0.5, 0.4, 0.1}, {3, 0.2, 0.2}};
  double expected = 0.0;
  for (const auto& p : players) expected += p.no_mutation() / 2 + p.mu_c;
  CHECK(pgg_cooperation_probability(flat, players) == doctest::Approx(expected / 4));

  // Figure 1 left panel at N = 5 against the full solve (oracle: numpy)
  const auto fig1 = fixtures::figure1_population(5, 2.0);
  const double closed = pgg_cooperation_probability(fig1.game, fig1.players);
  CHECK(closed == doctest::Approx(0.686165005437).epsilon(1e-11));
  const auto pi = stationary_distribution(build_transition_matrix(fig1));
  CHECK(std::abs(closed - cooperation_probability(pi)) < 1e-10);

  CHECK_THROWS(pgg_cooperation_probability(games::prisoners_dilemma_m1(1, 0.1, 0.2), players));
  CHECK_THROWS(pgg_cooperation_probability(flat, std::vector<PlayerParams>(3)));
}

TEST_CASE("additive cooperation handles non-pgg additive games") {
  const auto pop = fixtures::donation_population();
  const auto cfs = additive_cooperation(pop);
  CHECK(cfs[0].delta == doctest::Approx(0.6));
  CHECK(cfs[1].delta == doctest::Approx(0.1));
  const auto stag = PopulationSpec::Broadcast(games::stag_hunt_m2(1, 0.6, 0.1), PlayerParams(1, 0, 0));
  CHECK_THROWS_AS(additive_cooperation(stag), NotAdditiveError);
}

TEST_CASE("neutral drift") {
  CHECK(neutral_drift(PlayerParams(0, 0.2, 0.2)) == 0.5);
  CHECK(neutral_drift(PlayerParams(0, 0.05, 0.15)) == doctest::Approx(0.45));
  CHECK(neutral_drift(PlayerParams(0, 0, 0)) == 0.5);
  const PlayerParams p(0.0, 0.05, 0.15);
  CHECK(player_cooperation_probability(4.2, p).p == doctest::Approx(neutral_drift(p)));
}

TEST_CASE("strong-selection limit") {
  CHECK(strong_selection_limit(0.5, PlayerParams(1, 0.1, 0.3)) == 0.1);
  CHECK(strong_selection_limit(-0.5, PlayerParams(1, 0.3, 0.1)) == doctest::Approx(0.9));
  CHECK(strong_selection_limit(0.5, PlayerParams(1, 0.0, 0.0)) == 0.0);
  CHECK_THROWS(strong_selection_limit(0.0, PlayerParams(1, 0.1, 0.1)));
}

TEST_CASE("threshold check") {
  CHECK(threshold_check(-0.3, PlayerParams(2, 0.1, 0.1)).exceeds_half);
  CHECK_FALSE(threshold_check(0.3, PlayerParams(2, 0.1, 0.1)).exceeds_half);
  CHECK(threshold_check(0.3, PlayerParams(2, 0.1, 0.1)).log_odds_bound == 0.0);
  // boundary: strict inequality
  CHECK_FALSE(threshold_check(0.0, PlayerParams(2, 0.1, 0.1)).exceeds_half);

  const PlayerParams biased(2.0, 0.3, 0.1);
  const auto v = threshold_check(0.1, biased);
  CHECK(v.log_odds_bound == doctest::Approx(0.693147180560).epsilon(1e-12));
  CHECK(v.exceeds_half);
  CHECK(player_cooperation_probability(0.1, biased).p == doctest::Approx(0.570099601613).epsilon(1e-12));

  // mutation at or above 1/2 saturates the bound
  CHECK(threshold_check(100.0, PlayerParams(1, 0.5, 0.1)).log_odds_bound == INFINITY);
  CHECK(threshold_check(100.0, PlayerParams(1, 0.5, 0.1)).exceeds_half);
  CHECK(threshold_check(-100.0, PlayerParams(1, 0.1, 0.6)).log_odds_bound == -INFINITY);
  CHECK_FALSE(threshold_check(-100.0, PlayerParams(1, 0.1, 0.6)).exceeds_half);
}

TEST_CASE("mutation-selection balance") {
  const std::vector<double> deltas = {0.4, -1.0, 2.0};
  const std::vector<double> betas = {1.0, 0.5, 3.0};
  const auto half = mutation_selection_balance(deltas, betas, 0.5);
  CHECK(half.p_c == doctest::Approx(0.5));
  const auto zero = mutation_selection_balance(deltas, betas, 0.0);
  CHECK(zero.p_c == zero.line.phi_bar);
  CHECK(zero.line.slope == doctest::Approx(1 - 2 * zero.line.phi_bar));

  const BalanceLine line{0.3, 0.4};
  CHECK(line.at(0.1) == doctest::Approx(0.34));

  CHECK_THROWS(mutation_selection_balance(deltas, betas, 0.6));
  CHECK_THROWS(mutation_selection_balance(deltas, std::vector<double>{1.0}, 0.1));
}

TEST_CASE("interval confinement") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20000; ++k) {
    const double mu_c = 0.49 * u(rng), mu_d = 0.49 * u(rng);
    const PlayerParams p(5.0 * u(rng), mu_c, mu_d);
    const double delta = 6.0 * u(rng) - 3.0;  // |beta delta| <= 15 keeps strictness representable
    const double prob = player_cooperation_probability(delta, p).p;
    REQUIRE(prob > mu_c);
    REQUIRE(prob < 1.0 - mu_d);
  }
}

TEST_CASE("pgg monotonicity in alpha and beta") {
  const int n = 5;
  const double h = 1e-6;
  const PlayerParams base(1.0, 0.1, 0.1);
  for (double r : {2.0, 3.0, 4.5, 5.5, 7.0, 8.0}) {
    const double sign = r > n ? 1.0 : -1.0;
    for (double alpha = 0.5; alpha <= 3.0; alpha += 0.25) {
      for (double beta = 0.1; beta <= 2.0; beta += 0.1) {
        const PlayerParams p(beta, base.mu_c, base.mu_d);
        const PlayerParams p_hi(beta + h, base.mu_c, base.mu_d);
        const PlayerParams p_lo(beta - h, base.mu_c, base.mu_d);
        const double d_alpha = player_cooperation_probability(pgg_delta(alpha + h, r, n), p).p -
                               player_cooperation_probability(pgg_delta(alpha - h, r, n), p).p;
        const double d_beta = player_cooperation_probability(pgg_delta(alpha, r, n), p_hi).p -
                              player_cooperation_probability(pgg_delta(alpha, r, n), p_lo).p;
        REQUIRE(sign * d_alpha > 0.0);
        REQUIRE(sign * d_beta > 0.0);
      }
    }
  }
}

TEST_CASE("selection intensity and contribution enter only through their product") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const int n = 2 + static_cast<int>(u(rng) * 10);
    const double alpha = 0.1 + 4.9 * u(rng), r = 3.0 * n * u(rng) + 0.01, beta = 10.0 * u(rng);
    const double c = 0.1 + 9.9 * u(rng);
    const double a = player_cooperation_probability(pgg_delta(alpha, r, n), PlayerParams(beta, 0.1, 0.2)).p;
    const double b =
        player_cooperation_probability(pgg_delta(alpha / c, r, n), PlayerParams(c * beta, 0.1, 0.2)).p;
    REQUIRE(std::abs(a - b) <= 1e-12);
  }
}

TEST_CASE("raising mutation pulls towards the neutral value") {
  for (double delta : {-2.0, -0.3, 0.4, 1.5}) {
    double prev = std::abs(player_cooperation_probability(delta, PlayerParams(1.5, 0.0, 0.0)).p - 0.5);
    for (double mu = 0.05; mu < 0.5; mu += 0.05) {
      const double gap = std::abs(player_cooperation_probability(delta, PlayerParams(1.5, mu, mu)).p - 0.5);
      CHECK(gap < prev);
      prev = gap;
    }
    // asymmetric: the distance to (1 + mu_c - mu_d) / 2 shrinks as total mutation grows
    double prev_a = 1.0;
    for (double s = 1.0; s <= 10.0; s += 1.0) {
      const PlayerParams p(1.5, 0.03 * s, 0.01 * s);
      const double gap = std::abs(player_cooperation_probability(delta, p).p - neutral_drift(p));
      CHECK(gap < prev_a);
      prev_a = gap;
    }
  }
}
