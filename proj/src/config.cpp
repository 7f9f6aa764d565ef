#include "introspect/config.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>

namespace introspect {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw SchemaError(path + ": " + what);
}

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(path, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) fail(path, "unknown key '" + key + "'");
  }
}

const json& required(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail(path, std::string("missing required key '") + key + "'");
  return obj.at(key);
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::uint64_t unsigned_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    fail(path, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(number(v[k], path + "/" + std::to_string(k)));
  return out;
}

// A scalar broadcasts to n entries; an array must have exactly n.
std::vector<double> per_player(const json& v, const std::string& path, int n) {
  if (v.is_number()) return std::vector<double>(static_cast<std::size_t>(n), v.get<double>());
  auto out = numbers(v, path);
  if (static_cast<int>(out.size()) != n) {
    fail(path, "expected " + std::to_string(n) + " entries, got " + std::to_string(out.size()));
  }
  return out;
}

Bimatrix::Matrix matrix2(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) fail(path, "expected a 2x2 array");
  Bimatrix::Matrix m{};
  for (std::size_t r = 0; r < 2; ++r) {
    const auto row = numbers(v[r], path + "/" + std::to_string(r));
    if (row.size() != 2) fail(path, "expected a 2x2 array");
    m[r] = {row[0], row[1]};
  }
  return m;
}

std::vector<double> two_costs(const json& g) {
  auto c = numbers(required(g, "/game", "c"), "/game/c");
  if (c.size() != 2) fail("/game/c", "expected two costs");
  return c;
}

template <typename Fn>
auto wrap(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const SchemaError&) {
    throw;
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const std::set<std::string> kSweepParameters = {"beta", "mu", "mu_c", "mu_d", "alpha", "r"};

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "closed_form") return Method::ClosedForm;
  if (name == "exact") return Method::Exact;
  if (name == "simulate") return Method::Simulate;
  throw SchemaError("/method: unknown method '" + name + "'");
}

const char* to_string(Method m) {
  switch (m) {
    case Method::ClosedForm:
      return "closed_form";
    case Method::Simulate:
      return "simulate";
    case Method::Exact:
      break;
  }
  return "exact";
}

GameSpec parse_game(const json& g) {
  if (!g.is_object()) fail("/game", "expected an object");
  const std::string type = string(required(g, "/game", "type"), "/game/type");

  return wrap("/game", [&]() -> GameSpec {
    if (type == "pgg") {
      only_keys(g, "/game", {"type", "alpha", "r", "n_players"});
      const json& alpha = required(g, "/game", "alpha");
      const json& r = required(g, "/game", "r");
      int n = 0;
      if (g.contains("n_players")) {
        n = static_cast<int>(unsigned_integer(g.at("n_players"), "/game/n_players"));
      } else if (alpha.is_array()) {
        n = static_cast<int>(alpha.size());
      } else if (r.is_array()) {
        n = static_cast<int>(r.size());
      } else {
        fail("/game", "scalar alpha and r need n_players");
      }
      return GameSpec::MakePgg(per_player(alpha, "/game/alpha", n), per_player(r, "/game/r", n));
    }
    if (type == "bimatrix") {
      only_keys(g, "/game", {"type", "row_payoffs", "col_payoffs"});
      return GameSpec::MakeBimatrix(matrix2(required(g, "/game", "row_payoffs"), "/game/row_payoffs"),
                                    matrix2(required(g, "/game", "col_payoffs"), "/game/col_payoffs"));
    }
    if (type == "rpst") {
      only_keys(g, "/game", {"type", "R", "S", "T", "P"});
      return GameSpec::MakeRpst(number(required(g, "/game", "R"), "/game/R"),
                                number(required(g, "/game", "S"), "/game/S"),
                                number(required(g, "/game", "T"), "/game/T"),
                                number(required(g, "/game", "P"), "/game/P"));
    }
    if (type == "m1" || type == "m2") {
      only_keys(g, "/game", {"type", "b", "c"});
      const double b = number(required(g, "/game", "b"), "/game/b");
      const auto c = two_costs(g);
      return type == "m1" ? games::prisoners_dilemma_m1(b, c[0], c[1])
                          : games::stag_hunt_m2(b, c[0], c[1]);
    }
    if (type == "donation") {
      only_keys(g, "/game", {"type", "b", "c"});
      return GameSpec::MakeDonation(number(required(g, "/game", "b"), "/game/b"),
                                    numbers(required(g, "/game", "c"), "/game/c"));
    }
    if (type == "table") {
      only_keys(g, "/game", {"type", "n_players", "payoffs"});
      const int n = static_cast<int>(unsigned_integer(required(g, "/game", "n_players"), "/game/n_players"));
      const json& rows = required(g, "/game", "payoffs");
      if (!rows.is_array()) fail("/game/payoffs", "expected an array of rows");
      std::vector<double> flat;
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto row = numbers(rows[k], "/game/payoffs/" + std::to_string(k));
        if (static_cast<int>(row.size()) != n) fail("/game/payoffs", "each row needs N payoffs");
        flat.insert(flat.end(), row.begin(), row.end());
      }
      return GameSpec::MakeTable(n, std::move(flat));
    }
    fail("/game/type", "unknown game type '" + type + "'");
  });
}

std::vector<PlayerParams> parse_players(const json& players, int n_players) {
  only_keys(players, "/players", {"beta", "mu_c", "mu_d"});
  const auto beta = per_player(required(players, "/players", "beta"), "/players/beta", n_players);
  const auto mu_c = players.contains("mu_c")
                        ? per_player(players.at("mu_c"), "/players/mu_c", n_players)
                        : std::vector<double>(static_cast<std::size_t>(n_players), 0.0);
  const auto mu_d = players.contains("mu_d")
                        ? per_player(players.at("mu_d"), "/players/mu_d", n_players)
                        : std::vector<double>(static_cast<std::size_t>(n_players), 0.0);
  std::vector<PlayerParams> out;
  for (std::size_t k = 0; k < beta.size(); ++k) {
    out.push_back(wrap("/players/" + std::to_string(k),
                       [&] { return PlayerParams(beta[k], mu_c[k], mu_d[k]); }));
  }
  return out;
}

RunConfig parse_run_config(const json& doc) {
  only_keys(doc, "", {"schema_version", "game", "players", "method", "solver", "simulation",
                      "sweep", "output"});
  const auto version = unsigned_integer(required(doc, "", "schema_version"), "/schema_version");
  if (version != kConfigSchemaVersion) {
    fail("/schema_version", "unsupported schema version " + std::to_string(version));
  }

  GameSpec game = parse_game(required(doc, "", "game"));
  auto players = parse_players(required(doc, "", "players"), game.n_players());
  RunConfig cfg{.document = doc, .population = PopulationSpec(std::move(game), std::move(players))};

  if (doc.contains("method")) cfg.method = parse_method(string(doc.at("method"), "/method"));
  if (doc.contains("solver")) {
    cfg.solver = wrap("/solver", [&] { return parse_solve_method(string(doc.at("solver"), "/solver")); });
  }

  if (doc.contains("simulation")) {
    const json& s = doc.at("simulation");
    only_keys(s, "/simulation",
              {"steps", "warmup", "replicates", "seed", "initial_state", "batches"});
    auto& sim = cfg.simulation;
    if (s.contains("steps")) sim.steps = unsigned_integer(s.at("steps"), "/simulation/steps");
    if (s.contains("warmup")) sim.warmup = unsigned_integer(s.at("warmup"), "/simulation/warmup");
    if (s.contains("replicates")) {
      sim.replicates = static_cast<std::uint32_t>(
          unsigned_integer(s.at("replicates"), "/simulation/replicates"));
    }
    if (s.contains("seed")) sim.seed = unsigned_integer(s.at("seed"), "/simulation/seed");
    if (s.contains("batches")) {
      sim.batches = static_cast<std::uint32_t>(unsigned_integer(s.at("batches"), "/simulation/batches"));
    }
    if (s.contains("initial_state")) {
      sim.initial_state = wrap("/simulation/initial_state", [&] {
        return parse_initial_state(string(s.at("initial_state"), "/simulation/initial_state"));
      });
    }
  }
  wrap("/simulation", [&] {
    cfg.simulation.validate();
    return 0;
  });

  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    only_keys(s, "/sweep", {"parameter", "values"});
    Sweep sweep{string(required(s, "/sweep", "parameter"), "/sweep/parameter"),
                numbers(required(s, "/sweep", "values"), "/sweep/values")};
    if (!kSweepParameters.count(sweep.parameter)) {
      fail("/sweep/parameter", "unknown sweep parameter '" + sweep.parameter + "'");
    }
    if (sweep.values.empty()) fail("/sweep/values", "expected at least one value");
    if ((sweep.parameter == "alpha" || sweep.parameter == "r") && !cfg.population.game.as_pgg()) {
      fail("/sweep/parameter", "alpha and r sweeps need a pgg game");
    }
    for (double v : sweep.values) {
      try {
        cfg.with_parameter(sweep.parameter, v);
      } catch (const std::exception& e) {
        fail("/sweep/values", "value " + std::to_string(v) + " is invalid (" + e.what() + ")");
      }
    }
    cfg.sweep = std::move(sweep);
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    only_keys(o, "/output", {"path", "format"});
    if (o.contains("path")) cfg.output.path = string(o.at("path"), "/output/path");
    if (o.contains("format")) cfg.output.format = string(o.at("format"), "/output/format");
    if (cfg.output.format != "csv" && cfg.output.format != "json") {
      fail("/output/format", "expected 'csv' or 'json'");
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path + ": cannot open config");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
  return parse_run_config(doc);
}

std::string RunConfig::canonical() const { return document.dump(); }

std::string canonical_hash(const json& doc) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(doc.dump())));
  return buf;
}

std::string RunConfig::hash() const { return canonical_hash(document); }

PopulationSpec RunConfig::with_parameter(const std::string& parameter, double value) const {
  json game = document.at("game");
  json players = document.at("players");
  const int n = population.n_players();
  if (parameter == "beta" || parameter == "mu_c" || parameter == "mu_d") {
    players[parameter] = value;
  } else if (parameter == "mu") {
    players["mu_c"] = value;
    players["mu_d"] = value;
  } else if (parameter == "alpha" || parameter == "r") {
    game[parameter] = std::vector<double>(static_cast<std::size_t>(n), value);
  } else {
    throw SchemaError("/sweep/parameter: unknown sweep parameter '" + parameter + "'");
  }
  return {parse_game(game), parse_players(players, n)};
}

}  // namespace introspect
