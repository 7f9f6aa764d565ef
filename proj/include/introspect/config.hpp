#ifndef INTROSPECT_CONFIG_HPP
#define INTROSPECT_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "introspect/exact.hpp"
#include "introspect/model.hpp"
#include "introspect/simulate.hpp"

namespace introspect {

inline constexpr int kConfigSchemaVersion = 1;

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Method { ClosedForm, Exact, Simulate };

Method parse_method(const std::string& name);
const char* to_string(Method m);

struct Sweep {
  std::string parameter;  // beta | mu | mu_c | mu_d | alpha | r
  std::vector<double> values;
};

struct OutputSpec {
  std::string path;  // empty: standard output
  std::string format = "csv";
};

struct RunConfig {
  nlohmann::json document;  // validated input, defaults not filled in
  PopulationSpec population;
  Method method = Method::Exact;
  SolveMethod solver = SolveMethod::Auto;
  SimulationConfig simulation;
  std::optional<Sweep> sweep;
  OutputSpec output;

  // Canonical (key-sorted, compact) rendering of the validated document.
  std::string canonical() const;
  // FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;

  // Population with one sweep parameter overridden for every player.
  PopulationSpec with_parameter(const std::string& parameter, double value) const;
};

// Validates the document against the v1 schema; throws SchemaError.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);

// FNV-1a 64 of the key-sorted compact rendering, as 16 hex digits.
std::string canonical_hash(const nlohmann::json& doc);

GameSpec parse_game(const nlohmann::json& game);
std::vector<PlayerParams> parse_players(const nlohmann::json& players, int n_players);

}  // namespace introspect

#endif  // INTROSPECT_CONFIG_HPP
