#include "liesect/report.hpp"

#include <fmt/format.h>

namespace liesect {

using nlohmann::json;

json to_json(const Vector& v) { return to_std(v); }

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) rows.push_back(to_json(Vector(m.row(i))));
  return rows;
}

json to_json(const ResidualReport& report) {
  json failures = json::array();
  for (const auto& f : report.failures) {
    json entry = {{"point", f.point}};
    if (f.error.empty()) {
      entry["residual"] = f.residual;
    } else {
      entry["error"] = f.error;
    }
    failures.push_back(std::move(entry));
  }
  return {
      {"check", report.check},
      {"samples", report.samples},
      {"errors", report.errors},
      {"max_residual", report.max_residual},
      {"mean_residual", report.mean_residual},
      {"worst_point", report.worst_point},
      {"tolerance", report.tolerance},
      {"passed", report.passed()},
      {"failures", std::move(failures)},
  };
}

json to_json(const ClosureReport& report) {
  return {
      {"is_subalgebra", report.is_subalgebra},
      {"max_residual", report.max_residual},
      {"worst_pair", {report.worst_pair.first, report.worst_pair.second}},
      {"tolerance", report.tolerance},
  };
}

json to_json(const TransversalityReport& report) {
  return {
      {"transversal", report.transversal},
      {"min_singular_value", report.min_singular_value},
      {"condition_number", report.condition_number},
  };
}

json to_json(const StructureConstants& constants) {
  json coefficients = json::array();
  for (const auto& c : constants.coefficients) coefficients.push_back(to_json(c));
  return {{"coefficients", std::move(coefficients)},
          {"residual", to_json(constants.residual)}};
}

std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

std::string format_table(const std::vector<ResidualReport>& reports) {
  std::size_t width = 5;
  for (const auto& r : reports) width = std::max(width, r.check.size());
  std::string out = fmt::format("{:<{}}  {:>7}  {:>6}  {:>12}  {:>12}  {:>9}  {}\n",
                                "check", width, "samples", "errors", "max", "mean",
                                "tol", "status");
  for (const auto& r : reports) {
    out += fmt::format("{:<{}}  {:>7}  {:>6}  {:>12.4e}  {:>12.4e}  {:>9.1e}  {}\n",
                       r.check, width, r.samples, r.errors, r.max_residual,
                       r.mean_residual, r.tolerance,
                       r.passed() ? "PASS"
                                  : fmt::format("FAIL ({} failures)", r.failures.size()));
  }
  return out;
}

}  // namespace liesect
