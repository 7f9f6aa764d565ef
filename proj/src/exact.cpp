#include "introspect/exact.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <string>

#include "introspect/csv.hpp"
#include "introspect/parallel.hpp"

namespace introspect {

namespace {

constexpr double kEntrySlack = 1e-12;
constexpr double kDistributionSlack = 1e-9;
constexpr double kMinReciprocalCondition = 1e-14;

void require_exact_size(int n, int cap, const char* route) {
  if (n > cap) {
    throw std::invalid_argument(std::string(route) + " supports at most " + std::to_string(cap) +
                                " players, got " + std::to_string(n));
  }
}

// (pi T)[s], gathering from the N neighbours of s.
double pull(const TransitionMatrix& t, const std::vector<double>& pi, std::uint64_t s) {
  double acc = pi[s] * t.self_loop(s);
  for (int i = 0; i < t.n_players(); ++i) {
    const std::uint64_t from = s ^ (std::uint64_t{1} << i);
    acc += pi[from] * t.off_diagonal(from, i);
  }
  return acc;
}

void apply(const TransitionMatrix& t, const std::vector<double>& pi, std::vector<double>& out,
           unsigned threads) {
  const std::uint64_t states = t.n_states();
  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t chunks = (states + kChunk - 1) / kChunk;
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::uint64_t end = std::min(states, (c + 1) * kChunk);
    for (std::uint64_t s = c * kChunk; s < end; ++s) out[s] = pull(t, pi, s);
  });
}

std::vector<double> solve_direct(const TransitionMatrix& t) {
  require_exact_size(t.n_players(), kMaxDirectPlayers, "direct solve");
  const auto states = static_cast<Eigen::Index>(t.n_states());
  const int n = t.n_players();

  // Row j of (T^T - I) is the balance equation of state j.
  Eigen::MatrixXd a = -Eigen::MatrixXd::Identity(states, states);
  for (Eigen::Index s = 0; s < states; ++s) {
    const auto us = static_cast<std::uint64_t>(s);
    a(s, s) += t.self_loop(us);
    for (int i = 0; i < n; ++i) {
      const auto to = static_cast<Eigen::Index>(us ^ (std::uint64_t{1} << i));
      a(to, s) += t.off_diagonal(us, i);
    }
  }
  a.row(states - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(states);
  rhs(states - 1) = 1.0;

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  // A reducible chain leaves the system singular; partial pivoting does not
  // flag that by itself, and rcond() is unreliable once a pivot is exactly zero.
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (!(pivots.minCoeff() > kMinReciprocalCondition * pivots.maxCoeff()) ||
      !(lu.rcond() > kMinReciprocalCondition)) {
    throw SolverError("stationary system is singular; chain is not ergodic");
  }
  const Eigen::VectorXd x = lu.solve(rhs);
  if (!x.allFinite() || (a * x - rhs).lpNorm<Eigen::Infinity>() > 1e-9) {
    throw SolverError("stationary system is singular; chain is not ergodic");
  }

  std::vector<double> pi(static_cast<std::size_t>(states));
  double total = 0.0;
  for (Eigen::Index s = 0; s < states; ++s) {
    double v = x(s);
    if (v < 0.0) {
      if (v < -1e-10) throw SolverError("stationary solve produced a negative probability");
      v = 0.0;
    }
    pi[static_cast<std::size_t>(s)] = v;
    total += v;
  }
  for (double& v : pi) v /= total;
  return pi;
}

std::vector<double> solve_power(const TransitionMatrix& t, unsigned threads,
                                std::uint64_t max_iterations) {
  const std::uint64_t states = t.n_states();
  std::vector<double> pi(states, 1.0 / static_cast<double>(states));
  std::vector<double> next(states);

  for (std::uint64_t iter = 0; iter < max_iterations; ++iter) {
    apply(t, pi, next, threads);
    double total = 0.0;
    for (double v : next) total += v;
    double change = 0.0;
    for (std::uint64_t s = 0; s < states; ++s) {
      next[s] /= total;
      change += std::abs(next[s] - pi[s]);
    }
    pi.swap(next);
    if (change < kPowerTolerance) return pi;
  }
  throw SolverError("power iteration did not converge within " +
                    std::to_string(max_iterations) + " iterations");
}

}  // namespace

TransitionMatrix::TransitionMatrix(int n_players, std::vector<double> entries)
    : n_players_(n_players), off_diagonal_(std::move(entries)) {
  require_exact_size(n_players, kMaxExactPlayers, "transition matrix");
  if (n_players < 1) throw std::invalid_argument("transition matrix needs at least one player");
  const std::uint64_t states = n_states();
  if (off_diagonal_.size() != states * static_cast<std::uint64_t>(n_players)) {
    throw std::invalid_argument("transition matrix needs N off-diagonal entries per state");
  }
  self_loop_.resize(states);
  for (std::uint64_t s = 0; s < states; ++s) {
    double row = 0.0;
    for (int i = 0; i < n_players; ++i) {
      const double p = off_diagonal(s, i);
      if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("transition probability outside [0, 1]");
      }
      row += p;
    }
    if (row > 1.0 + kEntrySlack) throw std::invalid_argument("transition row sum exceeds 1");
    self_loop_[s] = std::max(0.0, 1.0 - row);
  }
}

double TransitionMatrix::probability(std::uint64_t from, std::uint64_t to) const {
  if (from >= n_states() || to >= n_states()) throw std::out_of_range("state index out of range");
  if (from == to) return self_loop(from);
  const std::uint64_t diff = from ^ to;
  if ((diff & (diff - 1)) != 0) return 0.0;
  return off_diagonal(from, std::countr_zero(diff));
}

TransitionMatrix build_transition_matrix(const PopulationSpec& pop, unsigned threads) {
  const int n = pop.n_players();
  require_exact_size(n, kMaxExactPlayers, "transition matrix");
  for (const auto& p : pop.players) {
    if (!p.finite_beta()) throw std::invalid_argument("exact solver requires finite beta");
  }

  const std::uint64_t states = state_count(n);
  const auto un = static_cast<std::uint64_t>(n);
  std::vector<double> off(states * un);
  constexpr std::uint64_t kChunk = 1024;
  parallel_for((states + kChunk - 1) / kChunk, threads, [&](std::size_t c) {
    const std::uint64_t end = std::min(states, (c + 1) * kChunk);
    for (std::uint64_t s = c * kChunk; s < end; ++s) {
      const ActionState a(s, n);
      for (int i = 0; i < n; ++i) {
        off[s * un + static_cast<std::uint64_t>(i)] = switch_probability(pop, i, a) / n;
      }
    }
  });
  return {n, std::move(off)};
}

StationaryDistribution::StationaryDistribution(int n_players, std::vector<double> probs)
    : n_players_(n_players), probs_(std::move(probs)) {
  if (n_players < 1 || n_players > kMaxExactPlayers) {
    throw std::invalid_argument("distribution player count out of range");
  }
  if (probs_.size() != state_count(n_players)) {
    throw std::invalid_argument("distribution must have 2^N entries");
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0 + kEntrySlack)) {
      throw std::invalid_argument("distribution entries must lie in [0, 1]");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kDistributionSlack) {
    throw std::invalid_argument("distribution must sum to 1");
  }
}

SolveMethod parse_solve_method(const std::string& name) {
  if (name == "direct") return SolveMethod::Direct;
  if (name == "power") return SolveMethod::Power;
  if (name == "auto") return SolveMethod::Auto;
  throw std::invalid_argument("unknown solve method '" + name + "'");
}

const char* to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::Direct:
      return "direct";
    case SolveMethod::Power:
      return "power";
    case SolveMethod::Auto:
      break;
  }
  return "auto";
}

StationaryDistribution stationary_distribution(const TransitionMatrix& t, SolveMethod method,
                                               unsigned threads, std::uint64_t max_iterations) {
  if (method == SolveMethod::Auto) {
    method = t.n_players() <= kAutoDirectPlayers ? SolveMethod::Direct : SolveMethod::Power;
  }
  auto pi = method == SolveMethod::Direct ? solve_direct(t) : solve_power(t, threads, max_iterations);
  return {t.n_players(), std::move(pi)};
}

double cooperation_probability(const StationaryDistribution& pi) {
  const int n = pi.n_players();
  double acc = 0.0;
  for (std::uint64_t s = 0; s < pi.size(); ++s) {
    acc += pi[s] * std::popcount(s);
  }
  return acc / n;
}

double marginal(const StationaryDistribution& pi, int i) {
  if (i < 0 || i >= pi.n_players()) throw std::out_of_range("player index out of range");
  const std::uint64_t bit = std::uint64_t{1} << i;
  double acc = 0.0;
  for (std::uint64_t s = 0; s < pi.size(); ++s) {
    if (s & bit) acc += pi[s];
  }
  return acc;
}

std::vector<double> marginals(const StationaryDistribution& pi) {
  std::vector<double> out;
  for (int i = 0; i < pi.n_players(); ++i) out.push_back(marginal(pi, i));
  return out;
}

double stationarity_residual(const StationaryDistribution& pi, const TransitionMatrix& t) {
  if (pi.n_players() != t.n_players()) throw std::invalid_argument("size mismatch");
  std::vector<double> next(t.n_states());
  apply(t, pi.probs(), next, 1);
  double r = 0.0;
  for (std::uint64_t s = 0; s < next.size(); ++s) r += std::abs(next[s] - pi[s]);
  return r;
}

std::vector<std::uint64_t> reading_order(int n_players) {
  const std::uint64_t states = state_count(n_players);
  std::vector<std::uint64_t> order(states);
  for (std::uint64_t k = 0; k < states; ++k) {
    // leftmost character (player 1) is the most significant digit of k
    std::uint64_t s = 0;
    for (int i = 0; i < n_players; ++i) {
      if ((k >> (n_players - 1 - i)) & 1U) s |= std::uint64_t{1} << i;
    }
    order[k] = s;
  }
  return order;
}

void write_distribution_csv(std::ostream& os, const StationaryDistribution& pi) {
  os << "state_label,state_index,probability\n";
  for (std::uint64_t s : reading_order(pi.n_players())) {
    os << ActionState(s, pi.n_players()).label() << ',' << s << ',' << csv::format(pi[s]) << '\n';
  }
}

}  // namespace introspect
