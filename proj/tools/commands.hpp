#ifndef INTROSPECT_TOOLS_COMMANDS_HPP
#define INTROSPECT_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace introspect::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kSchemaError = 2,
  kNotAdditive = 3,
  kNonConvergence = 4,
};

// Default output directory when --out is absent.
inline constexpr const char* kOutDirEnv = "INTROSPECT_OUT_DIR";

struct Options {
  std::string config;
  std::string out_dir;  // empty: --out absent
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method;
  unsigned threads = 1;
  std::string figure;  // fig1 | fig2 | fig3 | table1
};

// Output directory: --out, then the environment, then `fallback`.
std::string resolve_out_dir(const Options& opts, const std::string& fallback);

// Each command writes its report to `out` unless a file destination is
// configured, and diagnostics to `err`. Errors map to ExitCode values.
int cmd_solve(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_check(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_simulate(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_figure(const Options& opts, std::ostream& out, std::ostream& err);

}  // namespace introspect::cli

#endif  // INTROSPECT_TOOLS_COMMANDS_HPP
