#include "introspect/model.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace introspect {

namespace {

void check_player_count(int n) {
  if (n < 1 || n > kMaxPlayers) {
    throw std::invalid_argument("player count must be in [1, 64], got " + std::to_string(n));
  }
}

void check_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " must be finite");
}

std::uint64_t mask_for(int n) {
  return n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

void check_access(const GameSpec& game, int i, const ActionState& a) {
  if (i < 0 || i >= game.n_players()) {
    throw std::out_of_range("player index " + std::to_string(i) + " out of range for " +
                            std::to_string(game.n_players()) + " players");
  }
  if (a.n_players() != game.n_players()) {
    throw std::invalid_argument("state width " + std::to_string(a.n_players()) +
                                " does not match game with " + std::to_string(game.n_players()) +
                                " players");
  }
}

// bimatrix layout index: 0 = C, 1 = D
int slot(bool cooperate) { return cooperate ? 0 : 1; }

constexpr int kMaxTablePlayers = 20;

}  // namespace

ActionState::ActionState(std::uint64_t bits, int n_players) : bits_(bits), n_players_(n_players) {
  check_player_count(n_players);
  if ((bits & ~mask_for(n_players)) != 0) {
    throw std::invalid_argument("state has bits set above player count");
  }
}

ActionState ActionState::AllCooperate(int n_players) {
  check_player_count(n_players);
  return {mask_for(n_players), n_players};
}

ActionState ActionState::FromLabel(std::string_view label) {
  const int n = static_cast<int>(label.size());
  check_player_count(n);
  std::uint64_t bits = 0;
  for (int i = 0; i < n; ++i) {
    if (label[i] == 'C') {
      bits |= std::uint64_t{1} << i;
    } else if (label[i] != 'D') {
      throw std::invalid_argument("state label may only contain 'C' and 'D'");
    }
  }
  return {bits, n};
}

bool ActionState::cooperates(int i) const {
  if (i < 0 || i >= n_players_) throw std::out_of_range("player index out of range");
  return (bits_ >> i) & 1U;
}

int ActionState::cooperators() const { return std::popcount(bits_); }

ActionState ActionState::flipped(int i) const {
  if (i < 0 || i >= n_players_) throw std::out_of_range("player index out of range");
  return {bits_ ^ (std::uint64_t{1} << i), n_players_};
}

ActionState ActionState::with_action(int i, bool cooperate) const {
  return cooperates(i) == cooperate ? *this : flipped(i);
}

std::string ActionState::label() const {
  std::string s(static_cast<std::size_t>(n_players_), 'D');
  for (int i = 0; i < n_players_; ++i) {
    if ((bits_ >> i) & 1U) s[static_cast<std::size_t>(i)] = 'C';
  }
  return s;
}

PlayerParams::PlayerParams(double beta, double mu_c, double mu_d)
    : beta(beta), mu_c(mu_c), mu_d(mu_d) {
  if (std::isnan(beta) || beta < 0.0 || beta == -kInfiniteBeta) {
    throw std::invalid_argument("beta must be >= 0");
  }
  if (!(mu_c >= 0.0 && mu_c < 1.0) || !(mu_d >= 0.0 && mu_d < 1.0)) {
    throw std::invalid_argument("mutation probabilities must lie in [0, 1)");
  }
  if (!(mu_c + mu_d < 1.0)) throw std::invalid_argument("mu_c + mu_d must be < 1");
}

bool PlayerParams::finite_beta() const { return std::isfinite(beta); }

GameSpec GameSpec::MakePgg(std::vector<double> alphas, std::vector<double> multipliers) {
  const int n = static_cast<int>(alphas.size());
  check_player_count(n);
  if (multipliers.size() != alphas.size()) {
    throw std::invalid_argument("pgg: alphas and multipliers must have the same length");
  }
  for (int i = 0; i < n; ++i) {
    check_finite(alphas[i], "pgg alpha");
    check_finite(multipliers[i], "pgg multiplier");
    if (alphas[i] <= 0.0) throw std::invalid_argument("pgg: alpha must be > 0");
    if (multipliers[i] <= 0.0) throw std::invalid_argument("pgg: multiplier must be > 0");
  }
  return {Pgg{std::move(alphas), std::move(multipliers)}, n};
}

GameSpec GameSpec::MakeBimatrix(const Bimatrix::Matrix& row_payoffs,
                                const Bimatrix::Matrix& col_payoffs) {
  for (const auto* m : {&row_payoffs, &col_payoffs}) {
    for (const auto& row : *m) {
      for (double x : row) check_finite(x, "bimatrix payoff");
    }
  }
  return {Bimatrix{row_payoffs, col_payoffs}, 2};
}

GameSpec GameSpec::MakeDonation(double benefit, std::vector<double> costs) {
  const int n = static_cast<int>(costs.size());
  check_player_count(n);
  check_finite(benefit, "donation benefit");
  for (double c : costs) check_finite(c, "donation cost");
  return {Donation{benefit, std::move(costs)}, n};
}

GameSpec GameSpec::MakeTable(int n_players, std::vector<double> payoffs) {
  check_player_count(n_players);
  if (n_players > kMaxTablePlayers) {
    throw std::invalid_argument("payoff table supports at most 20 players");
  }
  const std::uint64_t rows = state_count(n_players);
  if (payoffs.size() != rows * static_cast<std::uint64_t>(n_players)) {
    throw std::invalid_argument("payoff table must have 2^N rows of N payoffs");
  }
  for (double x : payoffs) check_finite(x, "table payoff");
  return {PayoffTable{n_players, std::move(payoffs)}, n_players};
}

GameSpec GameSpec::MakeRpst(double reward, double sucker, double temptation, double punishment) {
  return MakeBimatrix({{{reward, sucker}, {temptation, punishment}}},
                      {{{reward, temptation}, {sucker, punishment}}});
}

std::string_view GameSpec::kind() const {
  struct {
    std::string_view operator()(const Pgg&) const { return "pgg"; }
    std::string_view operator()(const Bimatrix&) const { return "bimatrix"; }
    std::string_view operator()(const Donation&) const { return "donation"; }
    std::string_view operator()(const PayoffTable&) const { return "table"; }
  } name;
  return std::visit(name, variant_);
}

namespace games {

GameSpec prisoners_dilemma_m1(double b, double c1, double c2) {
  return GameSpec::MakeBimatrix({{{b - c1, -c1}, {b, 0.0}}}, {{{b - c2, b}, {-c2, 0.0}}});
}

GameSpec stag_hunt_m2(double b, double c1, double c2) {
  return GameSpec::MakeBimatrix({{{b - c1, -c1}, {0.0, 0.0}}}, {{{b - c2, 0.0}, {-c2, 0.0}}});
}

}  // namespace games

PopulationSpec::PopulationSpec(GameSpec game, std::vector<PlayerParams> players)
    : game(std::move(game)), players(std::move(players)) {
  if (static_cast<int>(this->players.size()) != this->game.n_players()) {
    throw std::invalid_argument("population needs one PlayerParams per player");
  }
}

PopulationSpec PopulationSpec::Broadcast(GameSpec game, const PlayerParams& params) {
  const auto n = static_cast<std::size_t>(game.n_players());
  return {std::move(game), std::vector<PlayerParams>(n, params)};
}

double payoff(const GameSpec& game, int i, const ActionState& a) {
  check_access(game, i, a);
  const int n = game.n_players();
  const auto& v = game.variant();

  if (const auto* pgg = std::get_if<Pgg>(&v)) {
    double pool = 0.0;
    for (int j = 0; j < n; ++j) {
      if (a.cooperates(j)) pool += pgg->multipliers[j] * pgg->alphas[j];
    }
    pool /= n;
    return a.cooperates(i) ? pool - pgg->alphas[i] : pool;
  }
  if (const auto* bm = std::get_if<Bimatrix>(&v)) {
    const auto& m = i == 0 ? bm->row_payoffs : bm->col_payoffs;
    return m[slot(a.cooperates(0))][slot(a.cooperates(1))];
  }
  if (const auto* don = std::get_if<Donation>(&v)) {
    double received = 0.0;
    if (n > 1) {
      const int others = a.cooperators() - (a.cooperates(i) ? 1 : 0);
      received = don->benefit * others / (n - 1);
    }
    return a.cooperates(i) ? received - don->costs[i] : received;
  }
  const auto& table = std::get<PayoffTable>(v);
  return table.payoffs[a.index() * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(i)];
}

double payoff_difference(const GameSpec& game, int i, const ActionState& a) {
  return payoff(game, i, a) - payoff(game, i, a.flipped(i));
}

double fermi(double beta, double x) {
  const double z = beta * x;
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

double switch_probability(const PopulationSpec& pop, int i, const ActionState& a) {
  const PlayerParams& p = pop.players.at(static_cast<std::size_t>(i));
  if (!p.finite_beta()) throw std::invalid_argument("switch probability needs finite beta");
  const double to_target = a.cooperates(i) ? p.mu_d : p.mu_c;
  return p.no_mutation() * fermi(p.beta, payoff_difference(pop.game, i, a)) + to_target;
}

}  // namespace introspect
