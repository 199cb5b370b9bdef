#include "mems/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "mems/continuation.hpp"
#include "mems/eigen.hpp"
#include "mems/errors.hpp"
#include "mems/periodic.hpp"
#include "mems/steady.hpp"
#include "mems/validate.hpp"

namespace mems::cli {

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::ofstream open_for_writing(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

void prepare_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  const auto probe = dir / ".mems_write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError("output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

continuation::Settings settings_for(const Resolved& r) {
  continuation::Settings s;
  s.ds = r.ds;
  s.tol = r.tol;
  if (r.command == Command::periodic) s.ds_max = 0.02;
  return s;
}

void run_steady(const Resolved& r, std::ostream& log) {
  const auto settings = settings_for(r);
  const auto branch = steady::continue_branch(r.m, settings, r.points);
  const auto path = r.out_dir / "steady_branch.csv";
  auto out = open_for_writing(path);
  out << "lambda,delta,u_center,residual_norm\n";
  for (const auto& pt : branch.points) {
    const auto s = steady::unpack(pt.param, pt.unknowns, r.m);
    out << fmt(pt.param) << ',' << fmt(s.delta) << ',' << fmt(steady::value_at(s, 0.0)) << ','
        << fmt(pt.residual_norm) << '\n';
  }
  finish(out, path);

  const auto fold = continuation::detect_fold(steady::make_problem(r.m), branch, settings);
  nlohmann::json j;
  j["m"] = r.m;
  j["points"] = branch.points.size();
  j["stop_reason"] = branch.stop_reason;
  if (fold) {
    const auto s = steady::unpack(fold->param, fold->unknowns, r.m);
    j["fold"] = {{"lambda", fold->param}, {"u_center", steady::value_at(s, 0.0)}};
  } else {
    j["fold"] = nullptr;
  }
  const auto fold_path = r.out_dir / "steady_fold.json";
  auto jf = open_for_writing(fold_path);
  jf << j.dump(1) << '\n';
  finish(jf, fold_path);
  log << "steady: " << branch.points.size() << " points";
  if (fold) log << ", fold at lambda = " << fmt(fold->param);
  log << '\n';
}

void run_eigen(const Resolved& r, std::ostream& log) {
  const auto branch = eigen::compute_branch(r.k, r.m, 0.005, 0.345, settings_for(r));
  const auto path = r.out_dir / ("eigen_k" + std::to_string(r.k) + ".csv");
  auto out = open_for_writing(path);
  out << "lambda,mu\n";
  for (const auto& e : branch.grid) out << fmt(e.lambda) << ',' << fmt(e.mu) << '\n';
  finish(out, path);
  log << "eigen: k = " << r.k << ", " << branch.grid.size() << " grid points\n";
}

void run_periodic(const Resolved& r, std::ostream& log) {
  const auto eig_branch = eigen::compute_branch(r.k, r.m);
  const auto branch =
      periodic::compute_branch(r.k, r.p, r.q, r.m, r.K, eig_branch, r.amplitude, r.points, settings_for(r));
  const std::string stem = "periodic_k" + std::to_string(r.k) + "_p" + std::to_string(r.p) + "_q" + std::to_string(r.q);
  try {
    periodic::write_branch_csv(branch, r.out_dir / (stem + ".csv"));
    periodic::write_branch_json(branch, r.out_dir / (stem + ".json"));
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
  log << "periodic: lambda0 = " << fmt(branch.lambda0) << ", " << branch.arc.points.size() << " points ("
      << branch.arc.stop_reason << ")\n";
}

/// Returns false when the proof did not close.
bool run_validate(const Resolved& r, std::ostream& log, std::string& failure) {
  const auto proof = validate::prove_saddle_node(r.m, r.nu);
  const auto path = r.out_dir / "certificate.json";
  auto out = open_for_writing(path);
  out << validate::certificate_json(proof) << '\n';
  finish(out, path);
  log << "validate: m = " << r.m << ", nu = " << r.nu << ", Z1 = " << fmt(proof.bounds.Z1.hi());
  if (proof.proved()) {
    log << ", r0 = " << fmt(*proof.bounds.r0) << ", lambda* in [" << fmt(proof.lambda_star.lo()) << ", "
        << fmt(proof.lambda_star.hi()) << "]\n";
    return true;
  }
  log << ", not proved: " << proof.failure << '\n';
  failure = proof.failure;
  return false;
}

std::string error_report(const std::string& command, const std::string& kind, const std::string& message) {
  nlohmann::json j;
  j["command"] = command;
  j["error"] = kind;
  j["message"] = message;
  return j.dump(1);
}

int report(const std::string& command, const std::string& kind, const std::string& message,
           const std::filesystem::path* out_dir, std::ostream& err, int code) {
  const std::string doc = error_report(command, kind, message);
  err << doc << '\n';
  if (out_dir != nullptr) {
    std::ofstream out(*out_dir / "error.json");
    if (out) out << doc << '\n';
  }
  return code;
}

}  // namespace

std::string command_name(Command c) {
  switch (c) {
    case Command::steady: return "steady";
    case Command::eigen: return "eigen";
    case Command::periodic: return "periodic";
    case Command::validate: return "validate";
  }
  return "unknown";
}

Resolved resolved(const RunConfig& c) {
  const bool per = c.command == Command::periodic;
  Resolved r{c.command,
             c.m.value_or(per ? 40 : 65),
             c.K.value_or(20),
             c.nu,
             c.k,
             c.p,
             c.q,
             c.ds.value_or(1e-3),
             c.tol.value_or(per ? 1e-11 : 1e-12),
             c.points.value_or(per ? 100 : 400),
             c.amplitude,
             c.out_dir};
  if (r.m < 2) throw std::invalid_argument("--m must be at least 2");
  if (!(r.nu >= 1.0)) throw std::invalid_argument("--nu must be at least 1");
  if (r.k < 1) throw std::invalid_argument("--k must be positive");
  if (!(r.ds > 0.0)) throw std::invalid_argument("--ds must be positive");
  if (!(r.tol > 0.0)) throw std::invalid_argument("--tol must be positive");
  if (r.points < 1) throw std::invalid_argument("--points must be positive");
  if (per) {
    if (r.K < 2) throw std::invalid_argument("--K must be at least 2");
    if (r.p < 1 || r.q < 1) throw std::invalid_argument("--p and --q must be positive");
    if (std::gcd(r.p, r.q) != 1) throw std::invalid_argument("--p and --q must be relatively prime");
    if (!(r.amplitude > 0.0)) throw std::invalid_argument("--amplitude must be positive");
  }
  return r;
}

RunConfig parse_args(const std::vector<std::string>& args, std::string* help) {
  RunConfig c;
  CLI::App app{"Steady states, eigenvalue branches, periodic orbits and the saddle-node proof"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--m", c.m, "Chebyshev modes");
    sub->add_option("--tol", c.tol, "Newton tolerance");
    sub->add_option("--out", c.out_dir, "Output directory");
  };
  auto* steady_cmd = app.add_subcommand("steady", "Continue the steady branch through the fold");
  add_common(steady_cmd);
  steady_cmd->add_option("--ds", c.ds, "Initial arclength step");
  steady_cmd->add_option("--points", c.points, "Maximum number of branch points");

  auto* eigen_cmd = app.add_subcommand("eigen", "Continue the k-th eigenvalue of the linearization");
  add_common(eigen_cmd);
  eigen_cmd->add_option("--k", c.k, "Mode index");
  eigen_cmd->add_option("--ds", c.ds, "Initial arclength step");

  auto* periodic_cmd = app.add_subcommand("periodic", "Continue the periodic orbits born at mu_k = (pi p / 2q)^2");
  add_common(periodic_cmd);
  periodic_cmd->add_option("--K", c.K, "Fourier modes");
  periodic_cmd->add_option("--k", c.k, "Mode index");
  periodic_cmd->add_option("--p", c.p, "Frequency numerator");
  periodic_cmd->add_option("--q", c.q, "Frequency denominator");
  periodic_cmd->add_option("--ds", c.ds, "Initial arclength step");
  periodic_cmd->add_option("--points", c.points, "Number of branch points");
  periodic_cmd->add_option("--amplitude", c.amplitude, "Predictor amplitude");

  auto* validate_cmd = app.add_subcommand("validate", "Prove the saddle node with interval bounds");
  add_common(validate_cmd);
  validate_cmd->add_option("--nu", c.nu, "Sequence space weight");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    if (help != nullptr) *help = app.help();
    return c;
  } catch (const CLI::ParseError& e) {
    throw std::invalid_argument(e.what());
  }
  if (steady_cmd->parsed()) c.command = Command::steady;
  if (eigen_cmd->parsed()) c.command = Command::eigen;
  if (periodic_cmd->parsed()) c.command = Command::periodic;
  if (validate_cmd->parsed()) c.command = Command::validate;
  return c;
}

std::vector<std::string> artifact_names(const Resolved& r) {
  switch (r.command) {
    case Command::steady: return {"steady_branch.csv", "steady_fold.json"};
    case Command::eigen: return {"eigen_k" + std::to_string(r.k) + ".csv"};
    case Command::periodic: {
      const std::string stem =
          "periodic_k" + std::to_string(r.k) + "_p" + std::to_string(r.p) + "_q" + std::to_string(r.q);
      return {stem + ".csv", stem + ".json"};
    }
    case Command::validate: return {"certificate.json"};
  }
  return {};
}

int run(const RunConfig& config, std::ostream& log, std::ostream& err) {
  const std::string name = command_name(config.command);
  Resolved r{};
  try {
    r = resolved(config);
  } catch (const std::invalid_argument& e) {
    return report(name, "usage", e.what(), nullptr, err, bad_usage);
  }
  try {
    prepare_out_dir(r.out_dir);
  } catch (const IoError& e) {
    return report(name, "io", e.what(), nullptr, err, io_error);
  }
  try {
    switch (r.command) {
      case Command::steady: run_steady(r, log); break;
      case Command::eigen: run_eigen(r, log); break;
      case Command::periodic: run_periodic(r, log); break;
      case Command::validate: {
        std::string failure;
        if (!run_validate(r, log, failure)) return report(name, "validation", failure, &r.out_dir, err, ExitCode::failure);
        break;
      }
    }
  } catch (const IoError& e) {
    return report(name, "io", e.what(), &r.out_dir, err, io_error);
  } catch (const SolverError& e) {
    return report(name, "solver", e.what(), &r.out_dir, err, ExitCode::failure);
  } catch (const ValidationError& e) {
    return report(name, "validation", e.what(), &r.out_dir, err, ExitCode::failure);
  } catch (const std::invalid_argument& e) {
    return report(name, "usage", e.what(), &r.out_dir, err, bad_usage);
  } catch (const std::exception& e) {
    return report(name, "internal", e.what(), &r.out_dir, err, ExitCode::failure);
  }
  return ok;
}

int main_entry(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  std::string help;
  RunConfig config;
  try {
    config = parse_args(args, &help);
  } catch (const std::invalid_argument& e) {
    std::cerr << error_report("", "usage", e.what()) << '\n';
    return bad_usage;
  }
  if (!help.empty()) {
    std::cout << help;
    return ok;
  }
  return run(config, std::cout, std::cerr);
}

}  // namespace mems::cli
