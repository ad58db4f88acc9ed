#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "liesect/config.hpp"
#include "liesect/error.hpp"
#include "liesect/report.hpp"
#include "liesect/verifier.hpp"

namespace liesect::cli {

using nlohmann::json;

namespace {

struct GlobalOptions {
  std::string config;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method;
  std::string output;
  std::optional<int> grid;
  std::string csv;
};

struct DemoOptions {
  std::string which;
  std::optional<double> k;
  bool verify = false;
};

// Exit-code carrying failure raised by command bodies.
struct CommandError {
  int code;
  std::string kind;
  std::string message;
};

std::string one_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

std::string format_vector(const std::vector<double>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt::format("{:.10g}", v[i]);
  }
  return out + ")";
}

std::string format_vector(const Vector& v) { return format_vector(to_std(v)); }

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file || !(file << contents)) {
    throw CommandError{kExitConfigError, "io", "cannot write '" + path + "'"};
  }
}

std::optional<std::uint64_t> env_seed() {
  const char* value = std::getenv("LIESECT_SEED");
  if (value == nullptr || *value == '\0') return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const unsigned long long parsed = std::strtoull(value, &end, 10);
  if (errno != 0 || end == value || *end != '\0' || value[0] == '-') {
    throw CommandError{kExitConfigError, "config",
                       "LIESECT_SEED must be a non-negative integer"};
  }
  return static_cast<std::uint64_t>(parsed);
}

void apply_overrides(ProblemConfig& config, const GlobalOptions& opts) {
  if (opts.seed) {
    config.verify.seed = *opts.seed;
  } else if (auto seed = env_seed()) {
    config.verify.seed = *seed;
  }
  if (opts.grid) {
    if (*opts.grid < 1) throw CommandError{kExitConfigError, "config", "--grid must be >= 1"};
    config.verify.grid = *opts.grid;
  }
  if (opts.tol) {
    if (!(*opts.tol > 0.0)) throw CommandError{kExitConfigError, "config", "--tol must be > 0"};
    config.verify.tolerance = *opts.tol;
  }
  if (opts.method) config.route = *opts.method == "ode" ? Route::Ode : Route::Exp;
}

ProblemConfig load(const GlobalOptions& opts) {
  if (opts.config.empty()) {
    throw CommandError{kExitConfigError, "config", "--config PATH is required"};
  }
  ProblemConfig config = load_config(opts.config);
  apply_overrides(config, opts);
  return config;
}

const AlgebraFrame& require_frame(const ProblemConfig& config) {
  if (!config.frame) {
    throw CommandError{kExitConfigError, "config", "frame: required by this command"};
  }
  return *config.frame;
}

json problem_summary(const ProblemConfig& config) {
  json doc = {{"group", config.group.name()},
              {"n", config.group.dim()},
              {"m", config.fibration.base_dim()},
              {"domain_radius", config.group.domain_radius()}};
  if (config.frame) doc["frame"] = to_json(Matrix(config.frame->matrix().transpose()));
  return doc;
}

void emit(const GlobalOptions& opts, const json& doc) {
  if (!opts.output.empty()) write_file(opts.output, dump_json(doc));
}

// --------------------------------------------------------------------------
// Subalgebra gate shared by solve/verify/subalgebra

struct AlgebraStatus {
  ClosureReport closure;
  TransversalityReport transversality;
  bool ok() const { return closure.is_subalgebra && transversality.transversal; }
};

AlgebraStatus algebra_status(const ProblemConfig& config, double closure_tol) {
  const AlgebraFrame& frame = require_frame(config);
  return {closure_check(config.group, frame, closure_tol),
          transversality_check(config.group, config.fibration, frame)};
}

void print_algebra_status(std::ostream& out, const AlgebraStatus& status) {
  out << fmt::format("closure:        {} (max residual {:.4e}, worst pair ({}, {}), tol {:.1e})\n",
                     status.closure.is_subalgebra ? "closed" : "NOT closed",
                     status.closure.max_residual, status.closure.worst_pair.first + 1,
                     status.closure.worst_pair.second + 1, status.closure.tolerance);
  out << fmt::format("transversality: {} (min singular value {:.4e}, condition {:.4e})\n",
                     status.transversality.transversal ? "transversal" : "NOT transversal",
                     status.transversality.min_singular_value,
                     status.transversality.condition_number);
}

SectionField build_section(const ProblemConfig& config, Route route) {
  const AlgebraFrame& frame = require_frame(config);
  return route == Route::Ode
             ? build_section_ode(config.group, config.fibration, frame, config.solver)
             : build_section_exp(config.group, config.fibration, frame, config.solver);
}

SampleSpec sample_spec(const VerifyOptions& v) {
  return {v.grid, v.random_samples, v.seed, 0};
}

// Full residual suite for one route.
std::vector<ResidualReport> verify_suite(const ProblemConfig& config, Route route) {
  const SectionField sigma = build_section(config, route);
  const Region region{config.fibration.base_point(), config.verify.radius};
  const SampleSpec spec = sample_spec(config.verify);
  const double tol = config.verify.tolerance;
  // Checks that differentiate sigma numerically get ten times the budget.
  const double fd_tol = 10.0 * tol;

  std::vector<ResidualReport> reports;
  reports.push_back(grid_report(Check::Identity, sigma, region, spec, tol));
  reports.push_back(grid_report(Check::Functional, sigma, region, spec, tol));
  reports.push_back(grid_report(Check::Differential, sigma, region, spec, fd_tol));
  reports.push_back(grid_report(Check::Tangency, sigma, region, spec, fd_tol));
  reports.push_back(grid_report(Check::PathIndependence, sigma, region, spec, tol));
  SampleSpec triple = spec;
  triple.grid = std::min(spec.grid, 3);
  reports.push_back(grid_report(Check::Associativity, sigma, region, triple, tol));
  return reports;
}

int suite_exit_code(const std::vector<ResidualReport>& reports) {
  bool numerical = false;
  bool failed = false;
  for (const auto& r : reports) {
    numerical = numerical || r.errors > 0;
    failed = failed || !r.passed();
  }
  if (numerical) return kExitNumericalError;
  return failed ? kExitVerificationFailed : kExitOk;
}

json reports_json(const std::vector<ResidualReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr;
}

// --------------------------------------------------------------------------
// Commands

int cmd_check(const GlobalOptions& opts, std::ostream& out) {
  ProblemConfig config = load(opts);
  const GroupChart& group = config.group;
  const Vector& e = group.identity();
  const Index n = group.dim();
  const Region region{e, std::min(config.verify.radius, group.domain_radius())};
  const SampleSpec spec{1, 50, config.verify.seed, 0};
  auto part = [n](const Vector& p, int i) -> Vector { return p.segment(i * n, n); };

  std::vector<ResidualReport> reports;
  reports.push_back(sample_report("identity_law", 1, region, spec, 1e-12, [&](const Vector& g) {
    return std::max(inf_norm(group.mu(g, e) - g), inf_norm(group.mu(e, g) - g));
  }));
  reports.push_back(sample_report("associativity", 3, region, spec, 1e-10, [&](const Vector& p) {
    const Vector g = part(p, 0), h = part(p, 1), k = part(p, 2);
    return inf_norm(group.mu(group.mu(g, h), k) - group.mu(g, group.mu(h, k)));
  }));
  SampleSpec inverse_spec = spec;
  inverse_spec.random_samples = 20;
  reports.push_back(sample_report("inverse", 1, region, inverse_spec, 1e-9, [&](const Vector& g) {
    return inf_norm(group.mu(g, group.inverse(g)) - e);
  }));

  const Vector sv = singular_values(config.fibration.dp(e));
  const double min_sv = sv[sv.size() - 1];

  out << fmt::format("group {} (n = {}), fibration m = {}, x0 = {}\n", group.name(), n,
                     config.fibration.base_dim(),
                     format_vector(config.fibration.base_point()));
  out << fmt::format("Dp(e) smallest singular value {:.4e} (rank ok), vertical dimension {}\n",
                     min_sv, config.fibration.vertical_subspace().cols());
  out << format_table(reports);

  json doc = {{"command", "check"},
              {"problem", problem_summary(config)},
              {"fibration", {{"min_singular_value", min_sv},
                             {"rank_ok", min_sv > FibrationChart::kRankTolerance},
                             {"vertical_basis", to_json(Matrix(
                                  config.fibration.vertical_subspace().transpose()))}}},
              {"checks", reports_json(reports)}};
  const int code = suite_exit_code(reports);
  doc["passed"] = code == kExitOk;
  emit(opts, doc);
  return code;
}

int cmd_bracket(const GlobalOptions& opts, std::ostream& out) {
  ProblemConfig config = load(opts);
  const AlgebraFrame& frame = require_frame(config);
  const StructureConstants sc = structure_constants(config.group, frame);
  const Index m = frame.size();

  json brackets = json::array();
  out << fmt::format("brackets of the {} frame vectors in {}\n", m, config.group.name());
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) {
      const Vector b = bracket(config.group, frame.column(i), frame.column(j));
      std::string expansion;
      std::vector<double> coefficients;
      for (Index k = 0; k < m; ++k) {
        const double c = sc.coefficients[static_cast<std::size_t>(k)](i, j);
        coefficients.push_back(c);
        expansion += fmt::format("{}{:+.6g} F{}", k ? " " : "", c, k + 1);
      }
      out << fmt::format("[F{},F{}] = {}\n          = {}  (outside span: {:.3e})\n", i + 1,
                         j + 1, format_vector(b), expansion, sc.residual(i, j));
      brackets.push_back({{"pair", {i + 1, j + 1}},
                          {"value", to_std(b)},
                          {"coefficients", coefficients},
                          {"residual", sc.residual(i, j)}});
    }
  }
  if (m == 1) out << "(single vector: no brackets)\n";
  emit(opts, {{"command", "bracket"},
              {"problem", problem_summary(config)},
              {"brackets", std::move(brackets)},
              {"structure_constants", to_json(sc)}});
  return kExitOk;
}

int cmd_subalgebra(const GlobalOptions& opts, std::ostream& out) {
  ProblemConfig config = load(opts);
  const double closure_tol = opts.tol ? *opts.tol : config.verify.closure_tol;
  const AlgebraStatus status = algebra_status(config, closure_tol);
  print_algebra_status(out, status);
  emit(opts, {{"command", "subalgebra"},
              {"problem", problem_summary(config)},
              {"closure", to_json(status.closure)},
              {"transversality", to_json(status.transversality)},
              {"passed", status.ok()}});
  return status.ok() ? kExitOk : kExitVerificationFailed;
}

// Exp route needs a transversal subalgebra; report and stop otherwise.
std::optional<int> gate_exp_route(const ProblemConfig& config, Route route, std::ostream& out,
                                  json& doc) {
  if (route != Route::Exp) return std::nullopt;
  const AlgebraStatus status = algebra_status(config, kDefaultClosureTol);
  if (status.ok()) return std::nullopt;
  print_algebra_status(out, status);
  out << "exp route refused: the frame must span a subalgebra transversal to the fibre\n";
  doc["closure"] = to_json(status.closure);
  doc["transversality"] = to_json(status.transversality);
  doc["passed"] = false;
  return kExitVerificationFailed;
}

int cmd_solve(const GlobalOptions& opts, std::ostream& out) {
  ProblemConfig config = load(opts);
  json doc = {{"command", "solve"},
              {"problem", problem_summary(config)},
              {"route", to_string(config.route)}};
  if (auto code = gate_exp_route(config, config.route, out, doc)) {
    emit(opts, doc);
    return *code;
  }
  const SectionField sigma = build_section(config, config.route);
  SampleSpec spec = sample_spec(config.verify);
  const auto points =
      sample_points(1, Region{config.fibration.base_point(), config.verify.radius}, spec);

  json samples = json::array();
  std::string csv;
  const Index m = config.fibration.base_dim();
  const Index n = config.group.dim();
  for (Index i = 0; i < m; ++i) csv += fmt::format("x{},", i + 1);
  for (Index i = 0; i < n; ++i) csv += fmt::format("sigma{}{}", i + 1, i + 1 < n ? "," : "\n");

  std::size_t failures = 0;
  out << fmt::format("section samples ({} route, {} points)\n", to_string(config.route),
                     points.size());
  for (const Vector& x : points) {
    try {
      const Vector s = sigma.evaluate(x);
      samples.push_back({{"x", to_std(x)}, {"sigma", to_std(s)}});
      out << fmt::format("  x = {}  sigma = {}\n", format_vector(x), format_vector(s));
      for (Index i = 0; i < m; ++i) csv += fmt::format("{:.17g},", x[i]);
      for (Index i = 0; i < n; ++i) csv += fmt::format("{:.17g}{}", s[i], i + 1 < n ? "," : "\n");
    } catch (const Error& ex) {
      ++failures;
      samples.push_back({{"x", to_std(x)}, {"error", one_line(ex.what())}});
      out << fmt::format("  x = {}  error: {}\n", format_vector(x), one_line(ex.what()));
    }
  }
  doc["samples"] = std::move(samples);
  doc["failures"] = failures;
  doc["passed"] = failures == 0;
  emit(opts, doc);
  if (!opts.csv.empty()) write_file(opts.csv, csv);
  return failures == 0 ? kExitOk : kExitNumericalError;
}

int cmd_verify(const GlobalOptions& opts, std::ostream& out) {
  ProblemConfig config = load(opts);
  json doc = {{"command", "verify"},
              {"problem", problem_summary(config)},
              {"route", to_string(config.route)}};
  if (auto code = gate_exp_route(config, config.route, out, doc)) {
    emit(opts, doc);
    return *code;
  }
  const auto reports = verify_suite(config, config.route);
  out << fmt::format("verify: {} route, region radius {}, grid {}, tol {:.1e}\n",
                     to_string(config.route), config.verify.radius, config.verify.grid,
                     config.verify.tolerance);
  out << format_table(reports);
  const int code = suite_exit_code(reports);
  doc["checks"] = reports_json(reports);
  doc["passed"] = code == kExitOk;
  emit(opts, doc);
  return code;
}

// Built-in end-to-end runs against the known closed forms.
ProblemConfig demo_config(const DemoOptions& demo) {
  if (demo.which == "exp") {
    const double k = demo.k.value_or(2.0);
    GroupChart group = GroupChart::abelian_exp(1.2);
    FibrationChart fibration = FibrationChart::standard(group);
    Matrix frame(2, 1);
    frame << k, 1.0;
    ProblemConfig config{std::move(group), std::move(fibration), AlgebraFrame(frame), {},
                         Route::Exp, {}};
    config.solver.rk4_step = 5e-3;
    config.verify.radius = 0.5;
    config.verify.grid = 11;
    return config;
  }
  const double k = demo.k.value_or(1.0);
  GroupChart group = GroupChart::triangular_affine();
  FibrationChart fibration = FibrationChart::standard(group);
  Matrix frame = Matrix::Zero(5, 2);
  frame(0, 0) = k;
  frame(2, 0) = k;
  frame(3, 0) = 1.0;
  frame(4, 1) = 1.0;
  ProblemConfig config{std::move(group), std::move(fibration), AlgebraFrame(frame), {},
                       Route::Exp, {}};
  config.verify.random_samples = 50;
  return config;
}

int cmd_demo(const GlobalOptions& opts, const DemoOptions& demo, std::ostream& out) {
  ProblemConfig config = demo_config(demo);
  apply_overrides(config, opts);
  const bool exp_demo = demo.which == "exp";
  const double k = demo.k.value_or(exp_demo ? 2.0 : 1.0);

  std::vector<Vector> points;
  std::function<Vector(const Vector&)> closed_form;
  double tolerance = 0.0;
  if (exp_demo) {
    for (int i = 0; i <= 100; ++i) points.push_back(Vector::Constant(1, -1.0 + 0.02 * i));
    closed_form = [k](const Vector& x) {
      Vector s(2);
      s << std::exp(k * x[0]), x[0];
      return s;
    };
    tolerance = 1e-8;
  } else {
    points = sample_points(1, Region{Vector::Zero(2), 0.3}, SampleSpec{9, 0, 0, 1});
    closed_form = [k](const Vector& x) {
      const double c = 1.0 + k * x[0];
      Vector s(5);
      s << c, 0.0, c, x[0], x[1];
      return s;
    };
    tolerance = 1e-7;
  }

  std::vector<Route> routes;
  if (opts.method) {
    routes.push_back(config.route);
  } else {
    routes = {Route::Exp, Route::Ode};
  }

  out << fmt::format("demo {}: group {}, k = {}, {} closed-form points\n", demo.which,
                     config.group.name(), k, points.size());
  json doc = {{"command", "demo"},
              {"demo", demo.which},
              {"k", k},
              {"problem", problem_summary(config)}};
  json route_docs = json::array();
  int code = kExitOk;
  for (Route route : routes) {
    const SectionField sigma = build_section(config, route);
    double worst = 0.0;
    std::vector<double> worst_point;
    for (const Vector& x : points) {
      const double err = inf_norm(sigma.evaluate(x) - closed_form(x));
      if (err >= worst) {
        worst = err;
        worst_point = to_std(x);
      }
    }
    const bool ok = worst <= tolerance;
    out << fmt::format("  {:<3} route: max |sigma - closed form| = {:.3e} at x = {} (tol {:.0e}) {}\n",
                       to_string(route), worst, format_vector(worst_point), tolerance,
                       ok ? "PASS" : "FAIL");
    json route_doc = {{"route", to_string(route)},
                      {"closed_form_max_error", worst},
                      {"worst_point", worst_point},
                      {"tolerance", tolerance},
                      {"passed", ok}};
    if (!ok) code = std::max(code, static_cast<int>(kExitVerificationFailed));
    if (demo.verify) {
      const auto reports = verify_suite(config, route);
      out << format_table(reports);
      route_doc["checks"] = reports_json(reports);
      code = std::max(code, suite_exit_code(reports));
    }
    route_docs.push_back(std::move(route_doc));
  }
  doc["routes"] = std::move(route_docs);
  doc["passed"] = code == kExitOk;
  emit(opts, doc);
  return code;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Solve and verify Lie group homomorphism functional equations", "liesect"};
  app.require_subcommand(1);
  GlobalOptions opts;
  DemoOptions demo;

  app.add_option("--config", opts.config, "Problem configuration (JSON)");
  app.add_option("--tol", opts.tol, "Residual tolerance");
  app.add_option("--seed", opts.seed, "Random seed (overrides LIESECT_SEED)");
  app.add_option("--method", opts.method, "Solver route")
      ->check(CLI::IsMember({"exp", "ode"}));
  app.add_option("--output", opts.output, "Write the JSON report here");
  app.add_option("--grid", opts.grid, "Grid points per axis");

  auto* check = app.add_subcommand("check", "Group axioms and fibration rank");
  auto* bracket_cmd = app.add_subcommand("bracket", "Structure constants of the frame");
  auto* subalgebra = app.add_subcommand("subalgebra", "Closure and transversality of the frame");
  auto* solve = app.add_subcommand("solve", "Sample the section on a grid");
  solve->add_option("--csv", opts.csv, "Also write samples as CSV");
  auto* verify = app.add_subcommand("verify", "Full residual suite");
  auto* demo_cmd = app.add_subcommand("demo", "Built-in end-to-end runs");
  demo_cmd->add_option("which", demo.which, "exp | triangular")
      ->required()
      ->check(CLI::IsMember({"exp", "triangular"}));
  demo_cmd->add_option("--k", demo.k, "Frame parameter k");
  demo_cmd->add_flag("--verify", demo.verify, "Also run the residual suite");
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "liesect: error: usage: " << one_line(e.what()) << "\n";
    return kExitConfigError;
  }

  try {
    if (check->parsed()) return cmd_check(opts, out);
    if (bracket_cmd->parsed()) return cmd_bracket(opts, out);
    if (subalgebra->parsed()) return cmd_subalgebra(opts, out);
    if (solve->parsed()) return cmd_solve(opts, out);
    if (verify->parsed()) return cmd_verify(opts, out);
    if (demo_cmd->parsed()) return cmd_demo(opts, demo, out);
  } catch (const CommandError& e) {
    err << "liesect: error: " << e.kind << ": " << one_line(e.message) << "\n";
    return e.code;
  } catch (const Error& e) {
    err << "liesect: error: " << to_string(e.kind()) << ": " << one_line(e.what()) << "\n";
    switch (e.kind()) {
      case ErrorKind::Parse:
      case ErrorKind::Config:
      case ErrorKind::Precondition:
        return kExitConfigError;
      case ErrorKind::Domain:
      case ErrorKind::Numerical:
        return kExitNumericalError;
    }
  } catch (const std::exception& e) {
    err << "liesect: error: internal: " << one_line(e.what()) << "\n";
    return kExitNumericalError;
  }
  err << "liesect: error: usage: no subcommand\n";
  return kExitConfigError;
}

}  // namespace liesect::cli
