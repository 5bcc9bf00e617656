#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "tsm/dtm.hpp"
#include "tsm/errors.hpp"
#include "tsm/pade.hpp"
#include "tsm/problem.hpp"
#include "tsm/recurrence.hpp"
#include "tsm/solver.hpp"

namespace tsm::cli {

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

namespace {

// Failure that maps to a specific exit code with a ready message.
struct CommandError {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CommandError{kUsage, "cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CommandError{kUsage, "cannot write '" + path + "'"};
  os << text;
}

OdeProblem load_problem(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return parse_problem(text);
  } catch (const ProblemError& e) {
    throw CommandError{kUsage, path + ":" + e.what()};
  }
}

std::vector<double> known_initials(const OdeProblem& p) {
  std::vector<double> alpha;
  for (const auto& v : p.initial_values()) {
    if (!v) throw CommandError{kUsage, "problem has an unknown initial value; expansion needs an initial value problem"};
    alpha.push_back(*v);
  }
  return alpha;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i != 0) s += ',';
    s += format_number(v[i]);
  }
  return s;
}

// ---- solve -----------------------------------------------------------------

struct SolveOptions {
  std::string input;
  int order = 12;
  std::optional<double> h;  // fixed step; adaptive when unset
  double tol = 1e-12;
  std::optional<double> range;
  std::string continuation = "stepwise";
  std::vector<int> pade;
  std::vector<double> kernel;
  int grid = 0;
  std::vector<double> at;
  std::vector<double> bracket{-10.0, 10.0};
};

struct SolveOutput {
  std::string csv;
  SolverConfig config;
  bool bvp = false;
  double alpha0 = 0.0;
  int iterations = 0;
  std::size_t steps = 0;
  std::vector<std::string> warnings;
};

SolverConfig make_config(const SolveOptions& o) {
  SolverConfig cfg;
  cfg.stepping.order = o.order;
  if (o.h) {
    cfg.stepping.mode = StepMode::Fixed;
    cfg.stepping.h = *o.h;
  } else {
    cfg.stepping.mode = StepMode::Adaptive;
  }
  cfg.stepping.tol_local = o.tol;
  cfg.continuation = parse_continuation(o.continuation);
  if (o.pade.size() == 2) {
    cfg.pade_n1 = o.pade[0];
    cfg.pade_n2 = o.pade[1];
  }
  if (o.kernel.size() == 2) {
    cfg.kernel_nu = o.kernel[0];
    cfg.kernel_r = o.kernel[1];
  } else if (cfg.continuation == Continuation::KernelPade) {
    throw std::invalid_argument("kernel-pade needs --kernel NU R");
  }
  cfg.grid_intervals = o.grid;
  cfg.sample_times = o.at;
  cfg.validate();
  return cfg;
}

std::string to_csv(const Trajectory& tr) {
  std::string s = "t";
  for (const auto& v : tr.variables) s += "," + v;
  s += ",err_est\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    s += format_number(tr.times[i]);
    for (const auto& col : tr.values) s += "," + format_number(col[i]);
    s += "," + format_number(tr.error_estimates[i]) + "\n";
  }
  return s;
}

SolveOutput run_solve(const SolveOptions& o) {
  OdeProblem p = load_problem(o.input);
  if (o.range) p.range = *o.range;
  SolveOutput res;
  try {
    res.config = make_config(o);
    const OdeProblem normalized = normalize_system(p);
    Trajectory tr;
    if (normalized.boundary()) {
      if (o.bracket.size() != 2) throw std::invalid_argument("--bracket needs LO HI");
      const auto shot = solve_bvp_shooting(normalized, res.config, {o.bracket[0], o.bracket[1]});
      res.bvp = true;
      res.alpha0 = shot.alpha0;
      res.iterations = shot.iterations;
      tr = shot.trajectory;
    } else {
      tr = solve_ivp(normalized, res.config);
    }
    res.steps = tr.steps;
    res.warnings = tr.warnings;
    res.csv = to_csv(tr);
  } catch (const ProblemError& e) {
    throw CommandError{kUsage, o.input + ": " + e.what()};
  } catch (const std::invalid_argument& e) {
    throw CommandError{kUsage, e.what()};
  } catch (const Error& e) {
    throw CommandError{kSolver, o.input + ": " + e.what()};
  }
  return res;
}

std::string manifest_text(const SolveOptions& o, const SolveOutput* res, int status, double seconds,
                          const std::string& output, const std::string& error) {
  std::ostringstream m;
  m << "command=solve\n";
  m << "input=" << o.input << "\n";
  m << "order=" << o.order << "\n";
  m << "step_mode=" << (o.h ? "fixed" : "adaptive") << "\n";
  if (o.h) m << "h=" << format_number(*o.h) << "\n";
  m << "tol=" << format_number(o.tol) << "\n";
  if (o.range) m << "range=" << format_number(*o.range) << "\n";
  m << "continuation=" << o.continuation << "\n";
  if (res != nullptr && res->config.continuation != Continuation::Stepwise) {
    const auto [n1, n2] = res->config.pade_degrees();
    m << "pade=" << n1 << "," << n2 << "\n";
  } else if (o.pade.size() == 2) {
    m << "pade=" << o.pade[0] << "," << o.pade[1] << "\n";
  }
  if (o.kernel.size() == 2) m << "kernel=" << join(o.kernel) << "\n";
  m << "grid=" << o.grid << "\n";
  if (!o.at.empty()) m << "at=" << join(o.at) << "\n";
  m << "bracket=" << join(o.bracket) << "\n";
  if (res != nullptr) {
    m << "problem_type=" << (res->bvp ? "bvp" : "ivp") << "\n";
    m << "steps=" << res->steps << "\n";
    if (res->bvp) {
      m << "alpha0=" << format_number(res->alpha0) << "\n";
      m << "shooting_iterations=" << res->iterations << "\n";
    }
    for (const auto& w : res->warnings) m << "warning=" << w << "\n";
  }
  m << "exit_status=" << status << "\n";
  m << "wall_time_s=" << format_number(seconds) << "\n";
  if (!output.empty()) m << "output=" << output << "\n";
  if (res != nullptr) m << "output_hash=" << fnv1a_hex(res->csv) << "\n";
  if (!error.empty()) m << "error=" << error << "\n";
  return m.str();
}

int cmd_solve(const SolveOptions& o, const std::string& out_path, std::string manifest_path, std::ostream& out,
              std::ostream& err) {
  if (manifest_path.empty() && !out_path.empty()) manifest_path = out_path + ".manifest";
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  try {
    const SolveOutput res = run_solve(o);
    for (const auto& w : res.warnings) err << "warning: " << w << "\n";
    if (out_path.empty()) {
      out << res.csv;
    } else {
      write_file(out_path, res.csv);
    }
    if (!manifest_path.empty()) write_file(manifest_path, manifest_text(o, &res, kOk, elapsed(), out_path, ""));
    return kOk;
  } catch (const CommandError& e) {
    err << "error: " << e.message << "\n";
    if (!manifest_path.empty()) {
      try {
        write_file(manifest_path, manifest_text(o, nullptr, e.code, elapsed(), out_path, e.message));
      } catch (const CommandError&) {
      }
    }
    return e.code;
  }
}

// ---- rerun -----------------------------------------------------------------

std::vector<double> split_numbers(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  return v;
}

int cmd_rerun(const std::string& manifest_path, const std::string& out_path, std::ostream& out, std::ostream& err) {
  std::map<std::string, std::string> kv;
  {
    std::istringstream in(read_file(manifest_path));
    std::string line;
    while (std::getline(in, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      kv.emplace(line.substr(0, eq), line.substr(eq + 1));
    }
  }
  if (kv["command"] != "solve") throw CommandError{kUsage, "manifest does not describe a solve run"};
  SolveOptions o;
  try {
    o.input = kv.at("input");
    o.order = std::stoi(kv.at("order"));
    if (kv.at("step_mode") == "fixed") o.h = std::stod(kv.at("h"));
    o.tol = std::stod(kv.at("tol"));
    if (kv.count("range") != 0) o.range = std::stod(kv["range"]);
    o.continuation = kv.at("continuation");
    if (kv.count("pade") != 0) {
      for (const double d : split_numbers(kv["pade"])) o.pade.push_back(static_cast<int>(d));
    }
    if (kv.count("kernel") != 0) o.kernel = split_numbers(kv["kernel"]);
    o.grid = std::stoi(kv.at("grid"));
    if (kv.count("at") != 0) o.at = split_numbers(kv["at"]);
    o.bracket = split_numbers(kv.at("bracket"));
  } catch (const std::exception& e) {
    throw CommandError{kUsage, "malformed manifest '" + manifest_path + "': " + e.what()};
  }
  const SolveOutput res = run_solve(o);
  if (!out_path.empty()) write_file(out_path, res.csv);
  const std::string hash = fnv1a_hex(res.csv);
  const auto recorded = kv.find("output_hash");
  if (recorded == kv.end()) {
    out << "output_hash=" << hash << " (manifest has no recorded hash)\n";
    return kOk;
  }
  if (recorded->second != hash) {
    err << "error: output hash " << hash << " differs from recorded " << recorded->second << "\n";
    return kSolver;
  }
  out << "output_hash=" << hash << " matches\n";
  return kOk;
}

// ---- series ----------------------------------------------------------------

int cmd_series(const std::string& input, int order, std::optional<double> weighting, std::ostream& out) {
  const OdeProblem p = load_problem(input);
  try {
    const OdeProblem n = normalize_system(p);
    const auto series = expand_series(compile_plan(n), known_initials(n), n.t0(), order);
    const Weighting w = weighting ? Weighting::step_scaled(*weighting) : Weighting::factorial();
    const auto names = n.variables();
    out << "k,variable,X,X_breve\n";
    std::vector<DtmImage> images;
    for (const auto& x : series) images.push_back(to_image(x, w));
    for (int k = 0; k <= order; ++k) {
      for (std::size_t j = 0; j < series.size(); ++j) {
        const auto kk = static_cast<std::size_t>(k);
        out << k << "," << names[j] << "," << format_number(series[j][kk]) << "," << format_number(images[j].image[kk])
            << "\n";
      }
    }
  } catch (const ProblemError& e) {
    throw CommandError{kUsage, input + ": " + e.what()};
  } catch (const std::invalid_argument& e) {
    throw CommandError{kUsage, e.what()};
  } catch (const Error& e) {
    throw CommandError{kSolver, input + ": " + e.what()};
  }
  return kOk;
}

// ---- pade ------------------------------------------------------------------

struct RouteResult {
  PadeApproximant approximant;
  int n2 = 0;
};

RouteResult pade_route(const TaylorSeries& x, const std::string& route, int n1, int n2, bool strict,
                       const std::string& name, std::ostream& err) {
  for (;; --n2) {
    try {
      if (route == "coupled") return {dtm_pade_coupled(x, n1, n2).approximant, n2};
      return {pade_from_series(x, n1, n2), n2};
    } catch (const DegeneratePade& e) {
      if (strict || n2 == 0) {
        const std::string hint = n2 > 0 ? "; try --pade " + std::to_string(n1) + " " + std::to_string(n2 - 1) : "";
        throw CommandError{kSolver, "variable " + name + ": [" + std::to_string(n1) + "/" + std::to_string(n2) +
                                        "] " + e.what() + hint};
      }
      err << "warning: variable " << name << " (" << route << "): [" << n1 << "/" << n2
          << "] degenerate, falling back to [" << n1 << "/" << n2 - 1 << "]\n";
    }
  }
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

int cmd_pade(const std::string& input, std::vector<int> degrees, int order, const std::string& route, bool check,
             bool strict, const std::vector<double>& eval_at, std::ostream& out, std::ostream& err) {
  const OdeProblem p = load_problem(input);
  if (degrees.size() != 2) degrees = {2, 2};
  const int n1 = degrees[0];
  const int n2 = degrees[1];
  if (n1 < 0 || n2 < 0) throw CommandError{kUsage, "Padé degrees must be nonnegative"};
  if (order < 0) order = n1 + n2;
  if (order < n1 + n2) throw CommandError{kUsage, "--order must be at least N1 + N2"};
  try {
    const OdeProblem n = normalize_system(p);
    const auto series = expand_series(compile_plan(n), known_initials(n), n.t0(), order);
    const auto names = n.variables();
    int status = kOk;
    for (std::size_t j = 0; j < series.size(); ++j) {
      const RouteResult r = pade_route(series[j], route, n1, n2, strict, names[j], err);
      const auto& a = r.approximant;
      out << "variable," << names[j] << ",[" << n1 << "/" << r.n2 << "]," << route << "\n";
      out << "P," << join(a.p) << "\n";
      out << "Q," << join(a.q) << "\n";
      for (const double t : eval_at) out << "eval," << format_number(t) << "," << format_number(a.evaluate(t)) << "\n";
      if (check) {
        const std::string other = route == "coupled" ? "direct" : "coupled";
        const RouteResult o = pade_route(series[j], other, n1, n2, strict, names[j], err);
        const double dev = std::max(max_abs_diff(a.p, o.approximant.p), max_abs_diff(a.q, o.approximant.q));
        out << "check," << names[j] << "," << format_number(dev) << "\n";
        if (!(dev <= 1e-12)) {
          err << "error: variable " << names[j] << ": direct and coupled routes differ by " << format_number(dev) << "\n";
          status = kSolver;
        }
      }
    }
    return status;
  } catch (const ProblemError& e) {
    throw CommandError{kUsage, input + ": " + e.what()};
  } catch (const std::invalid_argument& e) {
    throw CommandError{kUsage, e.what()};
  } catch (const Error& e) {
    throw CommandError{kSolver, input + ": " + e.what()};
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Taylor-series / differential-transform ODE solver", "tsm"};
  app.require_subcommand(1);

  SolveOptions so;
  double h = 0.0;
  double range = 0.0;
  std::string out_path;
  std::string manifest_path;
  auto* solve = app.add_subcommand("solve", "solve an initial or boundary value problem and write a trajectory CSV");
  // -h would collide with --h
  solve->set_help_flag("--help", "print this help message and exit");
  solve->add_option("problem", so.input, "problem file")->required();
  solve->add_option("--order", so.order, "Taylor order N")->capture_default_str();
  auto* h_opt = solve->add_option("--h", h, "fixed step length");
  auto* adaptive = solve->add_flag("--adaptive", "adaptive steps (default when --h is absent)");
  h_opt->excludes(adaptive);
  solve->add_option("--tol", so.tol, "adaptive local tolerance")->capture_default_str();
  auto* range_opt = solve->add_option("--range", range, "integration range H");
  solve->add_option("--continuation", so.continuation, "stepwise | pade | dtm-pade | kernel-pade")
      ->check(CLI::IsMember({"stepwise", "pade", "dtm-pade", "kernel-pade"}))
      ->capture_default_str();
  solve->add_option("--pade", so.pade, "Padé degrees N1 N2")->expected(2);
  solve->add_option("--kernel", so.kernel, "power-law kernel NU R")->expected(2);
  solve->add_option("--grid", so.grid, "sample on n uniform intervals");
  solve->add_option("--at", so.at, "explicit sample times")->delimiter(',');
  solve->add_option("--bracket", so.bracket, "shooting bracket LO HI")->expected(2);
  solve->add_option("--out", out_path, "CSV output path (default stdout)");
  solve->add_option("--manifest", manifest_path, "manifest path (default <out>.manifest)");

  std::string series_input;
  int series_order = 12;
  double weighting = 0.0;
  auto* series = app.add_subcommand("series", "print the raw Taylor coefficients and their weighted images");
  series->add_option("problem", series_input, "problem file")->required();
  series->add_option("--order", series_order, "Taylor order N")->capture_default_str()->check(CLI::NonNegativeNumber);
  auto* weighting_opt = series->add_option("--weighting", weighting, "step-scaled weighting h (images h^k X_k)");

  std::string pade_input;
  std::vector<int> degrees;
  int pade_order = -1;
  std::string route = "direct";
  bool check = false;
  bool strict = false;
  std::vector<double> eval_at;
  auto* pade = app.add_subcommand("pade", "print Padé numerator and denominator coefficients");
  pade->add_option("problem", pade_input, "problem file")->required();
  pade->add_option("--pade", degrees, "degrees N1 N2 (default 2 2)")->expected(2);
  pade->add_option("--order", pade_order, "series order (default N1 + N2)");
  pade->add_option("--route", route, "direct | coupled")->check(CLI::IsMember({"direct", "coupled"}))->capture_default_str();
  pade->add_flag("--check", check, "verify the direct and coupled routes agree to 1e-12");
  pade->add_flag("--strict", strict, "fail on a degenerate system instead of lowering N2");
  pade->add_option("--eval", eval_at, "evaluate the approximant at these times")->delimiter(',');

  std::string rerun_manifest;
  std::string rerun_out;
  auto* rerun = app.add_subcommand("rerun", "repeat a solve from its manifest and compare output hashes");
  rerun->add_option("manifest", rerun_manifest, "manifest file")->required();
  rerun->add_option("--out", rerun_out, "CSV output path");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (solve->parsed()) {
      if (h_opt->count() != 0) so.h = h;
      if (range_opt->count() != 0) so.range = range;
      return cmd_solve(so, out_path, manifest_path, out, err);
    }
    if (series->parsed()) {
      std::optional<double> w;
      if (weighting_opt->count() != 0) w = weighting;
      return cmd_series(series_input, series_order, w, out);
    }
    if (pade->parsed()) return cmd_pade(pade_input, degrees, pade_order, route, check, strict, eval_at, out, err);
    if (rerun->parsed()) return cmd_rerun(rerun_manifest, rerun_out, out, err);
  } catch (const CommandError& e) {
    err << "error: " << e.message << "\n";
    return e.code;
  }
  return kUsage;
}

}  // namespace tsm::cli
