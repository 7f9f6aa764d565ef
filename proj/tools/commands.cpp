#include "commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include <json.hpp>

#include "introspect/additivity.hpp"
#include "introspect/closed_form.hpp"
#include "introspect/config.hpp"
#include "introspect/csv.hpp"
#include "introspect/exact.hpp"
#include "introspect/parallel.hpp"
#include "introspect/simulate.hpp"

namespace introspect::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Largest N for which the figure sweep runs the exact solver.
constexpr int kFigureExactMaxPlayers = 14;
constexpr int kFigure1MinPlayers = 2;
constexpr int kFigure1MaxPlayers = 50;
constexpr std::uint64_t kDefaultFigureSeed = 1;

// ----------------------------------------------------------------------------
// Metadata

class Metadata {
 public:
  void add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, csv::format(value)); }
  void add(const std::string& key, std::uint64_t value) { add(key, std::to_string(value)); }

  void write_comments(std::ostream& os) const {
    for (const auto& [k, v] : entries_) os << "# " << k << ": " << v << '\n';
  }

  json to_json() const {
    json out = json::object();
    for (const auto& [k, v] : entries_) out[k] = v;
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

Metadata base_metadata(const std::string& command) {
  Metadata m;
  m.add("introspect_version", std::string(INTROSPECT_VERSION));
  m.add("command", command);
  return m;
}

void add_simulation_metadata(Metadata& m, const SimulationConfig& sim) {
  m.add("seed", sim.seed);
  m.add("rng", std::string(kRngAlgorithm));
  m.add("steps", sim.steps);
  m.add("warmup", sim.warmup);
  m.add("replicates", std::uint64_t{sim.replicates});
  m.add("initial_state", std::string(to_string(sim.initial_state)));
  m.add("step_definition", std::string("one player selection"));
}

std::string join_numbers(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k > 0) s += ';';
    s += csv::format(xs[k]);
  }
  return s;
}

// ----------------------------------------------------------------------------
// Output destinations

void write_file(const fs::path& path, const std::string& content, std::ostream& out) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
  if (!f) throw std::runtime_error("failed writing " + path.string());
  out << "wrote " << path.string() << '\n';
}

void emit(const Options& opts, const RunConfig& cfg, const std::string& default_name,
          const std::string& content, std::ostream& out) {
  const std::string dir = resolve_out_dir(opts, "");
  if (!cfg.output.path.empty()) {
    fs::path p(cfg.output.path);
    if (p.is_relative() && !dir.empty()) p = fs::path(dir) / p;
    write_file(p, content, out);
  } else if (!dir.empty()) {
    write_file(fs::path(dir) / default_name, content, out);
  } else {
    out << content;
  }
}

// ----------------------------------------------------------------------------
// Computation routes

struct Solution {
  std::optional<StationaryDistribution> pi;
  std::vector<double> p;
  double p_c = 0.0;
  std::vector<PlayerClosedForm> closed_form;
  std::optional<SimulationResult> sim;
};

SolveMethod resolved_solver(SolveMethod requested, int n) {
  if (requested != SolveMethod::Auto) return requested;
  return n <= kAutoDirectPlayers ? SolveMethod::Direct : SolveMethod::Power;
}

Solution solve_population(const PopulationSpec& pop, const RunConfig& cfg, unsigned threads,
                          bool want_distribution) {
  Solution s;
  switch (cfg.method) {
    case Method::Exact: {
      const auto t = build_transition_matrix(pop, threads);
      s.pi = stationary_distribution(t, cfg.solver, threads);
      s.p = marginals(*s.pi);
      s.p_c = cooperation_probability(*s.pi);
      break;
    }
    case Method::ClosedForm: {
      s.closed_form = additive_cooperation(pop);
      for (const auto& cf : s.closed_form) s.p.push_back(cf.p);
      s.p_c = group_cooperation(s.p);
      if (want_distribution && pop.n_players() <= kMaxExactPlayers) s.pi = product_measure(s.p);
      break;
    }
    case Method::Simulate: {
      s.sim = run_chain(pop, cfg.simulation, threads);
      s.p = s.sim->per_player_frequency;
      s.p_c = s.sim->mean;
      break;
    }
  }
  return s;
}

Metadata run_metadata(const std::string& command, const RunConfig& cfg) {
  Metadata m = base_metadata(command);
  m.add("method", std::string(to_string(cfg.method)));
  if (cfg.method == Method::Exact) {
    m.add("solver", std::string(to_string(resolved_solver(cfg.solver, cfg.population.n_players()))));
  }
  if (cfg.method == Method::Simulate) add_simulation_metadata(m, cfg.simulation);
  m.add("config_hash", cfg.hash());
  m.add("config", cfg.canonical());
  return m;
}

// ----------------------------------------------------------------------------
// Reports

std::string single_csv(const Metadata& meta, const Solution& s) {
  std::ostringstream os;
  meta.write_comments(os);
  os << "# p_C: " << csv::format(s.p_c) << '\n';
  os << "# p: " << join_numbers(s.p) << '\n';
  if (s.sim) {
    const auto& r = *s.sim;
    os << "# summary: mean=" << csv::format(r.mean) << " min=" << csv::format(r.min)
       << " q1=" << csv::format(r.q1) << " median=" << csv::format(r.median)
       << " q3=" << csv::format(r.q3) << " max=" << csv::format(r.max) << '\n';
    os << "replicate,seed,p_hat_C\n";
    for (std::size_t k = 0; k < r.per_replicate_pc.size(); ++k) {
      os << k << ',' << r.per_replicate_seed[k] << ',' << csv::format(r.per_replicate_pc[k]) << '\n';
    }
  } else if (s.pi) {
    write_distribution_csv(os, *s.pi);
  } else {
    os << "player,delta,phi,p\n";
    for (std::size_t k = 0; k < s.closed_form.size(); ++k) {
      const auto& cf = s.closed_form[k];
      os << k + 1 << ',' << csv::format(cf.delta) << ',' << csv::format(cf.phi) << ','
         << csv::format(cf.p) << '\n';
    }
  }
  return os.str();
}

json single_json(const Metadata& meta, const Solution& s) {
  json out;
  out["metadata"] = meta.to_json();
  out["p_C"] = s.p_c;
  out["p"] = s.p;
  if (s.pi) {
    json rows = json::array();
    for (std::uint64_t st : reading_order(s.pi->n_players())) {
      rows.push_back({{"state_label", ActionState(st, s.pi->n_players()).label()},
                      {"state_index", st},
                      {"probability", (*s.pi)[st]}});
    }
    out["distribution"] = rows;
  }
  if (s.sim) {
    const auto& r = *s.sim;
    json reps = json::array();
    for (std::size_t k = 0; k < r.per_replicate_pc.size(); ++k) {
      reps.push_back({{"replicate", k}, {"seed", r.per_replicate_seed[k]}, {"p_hat_C", r.per_replicate_pc[k]}});
    }
    out["replicates"] = reps;
    out["summary"] = {{"mean", r.mean}, {"min", r.min},       {"q1", r.q1},
                      {"median", r.median}, {"q3", r.q3}, {"max", r.max}};
  }
  return out;
}

std::string solve_report(const RunConfig& cfg, const std::string& command, unsigned threads) {
  Metadata meta = run_metadata(command, cfg);
  const int n = cfg.population.n_players();

  if (!cfg.sweep) {
    const Solution s = solve_population(cfg.population, cfg, threads, true);
    if (cfg.output.format == "json") return single_json(meta, s).dump(2) + "\n";
    return single_csv(meta, s);
  }

  const auto& sweep = *cfg.sweep;
  meta.add("sweep_parameter", sweep.parameter);
  std::vector<Solution> rows(sweep.values.size());
  // Points run in parallel; rows come back in sweep order.
  parallel_for(rows.size(), threads, [&](std::size_t k) {
    rows[k] = solve_population(cfg.with_parameter(sweep.parameter, sweep.values[k]), cfg, 1, false);
  });

  if (cfg.output.format == "json") {
    json out;
    out["metadata"] = meta.to_json();
    out["parameter"] = sweep.parameter;
    json arr = json::array();
    for (std::size_t k = 0; k < rows.size(); ++k) {
      json row = {{"value", sweep.values[k]}, {"p_C", rows[k].p_c}, {"p", rows[k].p}};
      if (rows[k].sim) {
        const auto& r = *rows[k].sim;
        row["summary"] = {{"min", r.min}, {"q1", r.q1}, {"median", r.median}, {"q3", r.q3}, {"max", r.max}};
      }
      arr.push_back(row);
    }
    out["rows"] = arr;
    return out.dump(2) + "\n";
  }

  std::ostringstream os;
  meta.write_comments(os);
  std::vector<std::string> header = {sweep.parameter, "p_C"};
  for (int i = 1; i <= n; ++i) header.push_back("p_" + std::to_string(i));
  if (cfg.method == Method::Simulate) header.insert(header.end(), {"min", "q1", "median", "q3", "max"});
  os << csv::join(header) << '\n';
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::vector<std::string> f = {csv::format(sweep.values[k]), csv::format(rows[k].p_c)};
    for (double p : rows[k].p) f.push_back(csv::format(p));
    if (rows[k].sim) {
      const auto& r = *rows[k].sim;
      for (double x : {r.min, r.q1, r.median, r.q3, r.max}) f.push_back(csv::format(x));
    }
    os << csv::join(f) << '\n';
  }
  return os.str();
}

std::string check_report(const RunConfig& cfg) {
  const auto report = check_additivity(cfg.population.game);
  Metadata meta = base_metadata("check");
  meta.add("game", std::string(cfg.population.game.kind()));
  meta.add("n_players", std::uint64_t(cfg.population.n_players()));
  meta.add("config_hash", cfg.hash());
  meta.add("config", cfg.canonical());
  meta.add("game_additive", std::string(report.game_additive ? "true" : "false"));

  std::ostringstream os;
  meta.write_comments(os);
  os << "player,additive,delta,context_a,diff_a,context_b,diff_b\n";
  for (std::size_t k = 0; k < report.per_player.size(); ++k) {
    std::vector<std::string> f = {std::to_string(k + 1)};
    if (const auto* a = std::get_if<Additive>(&report.per_player[k])) {
      f.insert(f.end(), {"true", csv::format(a->delta), "", "", "", ""});
    } else {
      const auto& w = std::get<NotAdditive>(report.per_player[k]);
      f.insert(f.end(), {"false", "", w.context_a.label(), csv::format(w.diff_a), w.context_b.label(),
                         csv::format(w.diff_b)});
    }
    os << csv::join(f) << '\n';
  }
  return os.str();
}

// ----------------------------------------------------------------------------
// Config loading with command-line overrides folded into the document, so the
// recorded canonical config reproduces the run.

RunConfig effective_config(const Options& opts, const std::optional<std::string>& forced_method) {
  if (opts.config.empty()) throw SchemaError("--config is required");
  json doc = load_run_config(opts.config).document;
  if (forced_method) {
    doc["method"] = *forced_method;
  } else if (opts.method) {
    doc["method"] = *opts.method;
  }
  if (opts.seed) doc["simulation"]["seed"] = *opts.seed;
  return parse_run_config(doc);
}

int guarded(std::ostream& err, const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << '\n';
    return kSchemaError;
  } catch (const NotAdditiveError& e) {
    const auto& w = e.witness();
    err << e.what() << '\n'
        << "counterexample: player " << e.player() + 1 << " context " << w.context_a.label()
        << " diff " << csv::format(w.diff_a) << ", context " << w.context_b.label() << " diff "
        << csv::format(w.diff_b) << '\n';
    return kNotAdditive;
  } catch (const SolverError& e) {
    err << "solver did not converge: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

// ----------------------------------------------------------------------------
// Figures

std::vector<double> grid(int first, int last, double scale) {
  std::vector<double> xs;
  for (int k = first; k <= last; ++k) xs.push_back(k / scale);
  return xs;
}

double single_player_p(double alpha, double r, int n, double beta, double mu) {
  return player_cooperation_probability(pgg_delta(alpha, r, n), PlayerParams(beta, mu, mu)).p;
}

struct FigureWriter {
  const Options& opts;
  fs::path dir;
  std::ostream& out;

  void write(const std::string& name, const Metadata& meta, const std::string& body) const {
    std::ostringstream os;
    meta.write_comments(os);
    os << body;
    write_file(dir / name, os.str(), out);
  }
};

Metadata figure_metadata(const std::string& figure, const json& params,
                         const std::string& method = "closed_form") {
  Metadata m = base_metadata("figure " + figure);
  m.add("method", method);
  m.add("config_hash", canonical_hash(params));
  m.add("config", params.dump());
  return m;
}

void figure_fig1(const FigureWriter& w, std::uint64_t base_seed, unsigned threads) {
  const SimulationConfig sim_defaults;
  for (const auto& [panel, factor] : {std::pair{"r2N", 2.0}, std::pair{"rNhalf", 0.5}}) {
    const json params = {{"figure", "fig1"},
                         {"panel", panel},
                         {"alpha", "i"},
                         {"r_factor", factor},
                         {"beta", 0.5},
                         {"mu_c", 0.05},
                         {"mu_d", 0.15},
                         {"n_min", kFigure1MinPlayers},
                         {"n_max", kFigure1MaxPlayers},
                         {"exact_max_n", kFigureExactMaxPlayers},
                         {"seed", base_seed}};
    const int count = kFigure1MaxPlayers - kFigure1MinPlayers + 1;
    std::vector<double> closed(count), exact(count);
    std::vector<SimulationResult> sims(count);
    std::vector<std::uint64_t> seeds(count);

    parallel_for(static_cast<std::size_t>(count), threads, [&](std::size_t k) {
      const int n = kFigure1MinPlayers + static_cast<int>(k);
      std::vector<double> alphas, rs;
      for (int i = 1; i <= n; ++i) {
        alphas.push_back(i);
        rs.push_back(factor * n);
      }
      const auto pop = PopulationSpec::Broadcast(GameSpec::MakePgg(alphas, rs), PlayerParams(0.5, 0.05, 0.15));
      closed[k] = pgg_cooperation_probability(pop.game, pop.players);
      if (n <= kFigureExactMaxPlayers) {
        exact[k] = cooperation_probability(stationary_distribution(build_transition_matrix(pop)));
      }
      SimulationConfig sim = sim_defaults;
      sim.seed = seeds[k] = replicate_seed(base_seed, static_cast<std::uint64_t>(n));
      sims[k] = run_chain(pop, sim);
    });

    Metadata meta = figure_metadata("fig1", params, "closed_form;exact;simulate");
    SimulationConfig recorded = sim_defaults;
    recorded.seed = base_seed;
    add_simulation_metadata(meta, recorded);
    meta.add("per_n_seed", std::string("replicate_seed(seed, N)"));
    meta.add("n_grid", std::to_string(kFigure1MinPlayers) + ".." + std::to_string(kFigure1MaxPlayers));
    meta.add("exact_column", "empty for N > " + std::to_string(kFigureExactMaxPlayers));

    std::ostringstream summary;
    summary << "N,closed_form,exact,sim_mean,sim_min,sim_q1,sim_median,sim_q3,sim_max\n";
    std::ostringstream reps;
    reps << "N,replicate,seed,p_hat_C\n";
    for (int k = 0; k < count; ++k) {
      const int n = kFigure1MinPlayers + k;
      const auto& r = sims[static_cast<std::size_t>(k)];
      summary << csv::join({std::to_string(n), csv::format(closed[k]),
                            n <= kFigureExactMaxPlayers ? csv::format(exact[k]) : std::string(),
                            csv::format(r.mean), csv::format(r.min), csv::format(r.q1),
                            csv::format(r.median), csv::format(r.q3), csv::format(r.max)})
              << '\n';
      for (std::size_t j = 0; j < r.per_replicate_pc.size(); ++j) {
        reps << n << ',' << j << ',' << r.per_replicate_seed[j] << ','
             << csv::format(r.per_replicate_pc[j]) << '\n';
      }
    }
    w.write(std::string("fig1_") + panel + ".csv", meta, summary.str());
    w.write(std::string("fig1_") + panel + "_replicates.csv", meta, reps.str());
  }
}

void figure_fig2(const FigureWriter& w) {
  constexpr int n = 5;
  constexpr double mu = 0.1;
  constexpr double alpha = 2.0;
  const auto betas = grid(0, 100, 10.0);

  {
    const json params = {{"figure", "fig2"}, {"panel", "left"}, {"n_players", n}, {"mu", mu},
                         {"alpha", alpha},  {"r", {3, 5, 7}},  {"beta", "0:0.1:10"}};
    std::ostringstream os;
    os << "r,beta,p\n";
    for (double r : {3.0, 5.0, 7.0}) {
      for (double b : betas) {
        os << csv::join({csv::format(r), csv::format(b), csv::format(single_player_p(alpha, r, n, b, mu))}) << '\n';
      }
    }
    w.write("fig2_left.csv", figure_metadata("fig2", params), os.str());
  }
  {
    const json params = {{"figure", "fig2"}, {"panel", "centre"}, {"n_players", n},   {"mu", mu},
                         {"r", {3, 7}},      {"beta", {0.5, 2}},  {"alpha", "0.1:0.1:5"}};
    std::ostringstream os;
    os << "r,beta,alpha,p\n";
    for (double r : {3.0, 7.0}) {
      for (double b : {0.5, 2.0}) {
        for (double a : grid(1, 50, 10.0)) {
          os << csv::join({csv::format(r), csv::format(b), csv::format(a),
                           csv::format(single_player_p(a, r, n, b, mu))})
             << '\n';
        }
      }
    }
    w.write("fig2_centre.csv", figure_metadata("fig2", params), os.str());
  }
  {
    const json params = {{"figure", "fig2"}, {"panel", "right"},        {"n_players", n},
                         {"mu", mu},         {"beta", 0},               {"alpha", "0.25:0.25:5"},
                         {"r", "0.5:0.5:10"}, {"dashed_r", n}};
    std::ostringstream os;
    os << "alpha,r,p\n";
    for (double a : grid(1, 20, 4.0)) {
      for (double r : grid(1, 20, 2.0)) {
        os << csv::join({csv::format(a), csv::format(r), csv::format(single_player_p(a, r, n, 0.0, mu))}) << '\n';
      }
    }
    Metadata meta = figure_metadata("fig2", params);
    meta.add("dashed_r", std::uint64_t{n});
    w.write("fig2_right.csv", meta, os.str());
  }
}

void figure_fig3(const FigureWriter& w) {
  constexpr double alpha = 2.0;
  constexpr double r = 7.0;
  const json params = {{"figure", "fig3"}, {"alpha", alpha},       {"r", r},
                       {"n_players", {5, 200}}, {"mu", {0, 0.1, 0.25}}, {"beta", "0:0.1:10"}};
  std::ostringstream os;
  os << "n_players,mu,beta,p\n";
  for (int n : {5, 200}) {
    for (double mu : {0.0, 0.1, 0.25}) {
      for (double b : grid(0, 100, 10.0)) {
        os << csv::join({std::to_string(n), csv::format(mu), csv::format(b),
                         csv::format(single_player_p(alpha, r, n, b, mu))})
           << '\n';
      }
    }
  }
  Metadata meta = figure_metadata("fig3", params);
  meta.add("asymptotes", std::string("mu and 1 - mu"));
  w.write("fig3.csv", meta, os.str());
}

json table1_document(const std::string& method) {
  return {{"schema_version", kConfigSchemaVersion},
          {"game", {{"type", "pgg"}, {"alpha", {1, 2, 3}}, {"r", {1, 3, 9}}}},
          {"players", {{"beta", 2}, {"mu_c", 0.1}, {"mu_d", 0.1}}},
          {"method", method}};
}

void figure_table1(const FigureWriter& w, unsigned threads) {
  std::vector<StationaryDistribution> pis;
  for (const char* method : {"closed_form", "exact"}) {
    const RunConfig cfg = parse_run_config(table1_document(method));
    write_file(w.dir / (std::string("table1_") + method + ".csv"), solve_report(cfg, "solve", threads), w.out);
    pis.push_back(*solve_population(cfg.population, cfg, threads, true).pi);
  }
  const json params = {{"figure", "table1"}, {"config", table1_document("exact")}};
  std::ostringstream os;
  os << "state_label,state_index,closed_form,exact,abs_diff\n";
  for (std::uint64_t s : reading_order(3)) {
    os << csv::join({ActionState(s, 3).label(), std::to_string(s), csv::format(pis[0][s]),
                     csv::format(pis[1][s]), csv::format(std::abs(pis[0][s] - pis[1][s]))})
       << '\n';
  }
  Metadata meta = figure_metadata("table1", params, "closed_form;exact");
  meta.add("p_C_closed_form", cooperation_probability(pis[0]));
  meta.add("p_C_exact", cooperation_probability(pis[1]));
  w.write("table1.csv", meta, os.str());
}

}  // namespace

std::string resolve_out_dir(const Options& opts, const std::string& fallback) {
  if (!opts.out_dir.empty()) return opts.out_dir;
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
  return fallback;
}

int cmd_solve(const Options& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = effective_config(opts, std::nullopt);
    const std::string ext = cfg.output.format == "json" ? ".json" : ".csv";
    emit(opts, cfg, "solve" + ext, solve_report(cfg, "solve", opts.threads), out);
    return kOk;
  });
}

int cmd_simulate(const Options& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.method && *opts.method != "simulate") {
      throw SchemaError("--method: the simulate command only runs 'simulate'");
    }
    const RunConfig cfg = effective_config(opts, "simulate");
    const std::string ext = cfg.output.format == "json" ? ".json" : ".csv";
    emit(opts, cfg, "simulate" + ext, solve_report(cfg, "simulate", opts.threads), out);
    return kOk;
  });
}

int cmd_check(const Options& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = effective_config(opts, std::nullopt);
    emit(opts, cfg, "check.csv", check_report(cfg), out);
    return kOk;
  });
}

int cmd_figure(const Options& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const FigureWriter w{opts, fs::path(resolve_out_dir(opts, "figures")), out};
    const std::uint64_t seed = opts.seed.value_or(kDefaultFigureSeed);
    if (opts.figure == "fig1") {
      figure_fig1(w, seed, opts.threads);
    } else if (opts.figure == "fig2") {
      figure_fig2(w);
    } else if (opts.figure == "fig3") {
      figure_fig3(w);
    } else if (opts.figure == "table1") {
      figure_table1(w, opts.threads);
    } else {
      throw SchemaError("unknown figure '" + opts.figure + "' (fig1, fig2, fig3, table1)");
    }
    return kOk;
  });
}

}  // namespace introspect::cli
