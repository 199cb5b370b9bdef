#pragma once

// Command-line front end: steady, eigen and periodic continuations and the
// saddle-node proof, each writing CSV/JSON artifacts into an output directory.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace mems::cli {

enum class Command { steady, eigen, periodic, validate };

std::string command_name(Command c);

/// Flags left unset take the per-command defaults of `resolved`.
struct RunConfig {
  Command command = Command::validate;
  std::optional<std::size_t> m;
  std::optional<std::size_t> K;
  double nu = 1.05;
  int k = 1;
  int p = 1;
  int q = 11;
  std::optional<double> ds;
  std::optional<double> tol;
  std::optional<std::size_t> points;
  double amplitude = 1e-3;
  std::filesystem::path out_dir = ".";
};

/// Effective settings after defaults are applied.
struct Resolved {
  Command command;
  std::size_t m;
  std::size_t K;
  double nu;
  int k;
  int p;
  int q;
  double ds;
  double tol;
  std::size_t points;
  double amplitude;
  std::filesystem::path out_dir;
};

/// Apply defaults and check the invariants; throws std::invalid_argument.
Resolved resolved(const RunConfig& config);

/// Parse arguments (without the program name); throws std::invalid_argument
/// on bad flags. `help` is set when help was requested.
RunConfig parse_args(const std::vector<std::string>& args, std::string* help = nullptr);

/// Exit codes of `run` and `main_entry`.
enum ExitCode : int { ok = 0, failure = 1, bad_usage = 2, io_error = 3 };

/// Run one command, writing artifacts into out_dir. On error an
/// error.json report is written (when possible) and a nonzero code returned.
int run(const RunConfig& config, std::ostream& log, std::ostream& err);

/// Names of the artifacts a resolved config produces, relative to out_dir.
std::vector<std::string> artifact_names(const Resolved& r);

int main_entry(int argc, char** argv);

}  // namespace mems::cli
