#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "liesect/group.hpp"
#include "liesect/lie_algebra.hpp"
#include "liesect/section.hpp"

namespace liesect {

struct VerifyOptions {
  double radius = 0.3;
  int grid = 5;
  double tolerance = 1e-6;
  int random_samples = 0;
  std::uint64_t seed = 0;
  double closure_tol = kDefaultClosureTol;
};

/// A fully validated problem: everything needed to build and check a section.
/// See schemas/config.schema.json for the file format.
struct ProblemConfig {
  GroupChart group;
  FibrationChart fibration;
  std::optional<AlgebraFrame> frame;
  SolverParams solver;
  Route route = Route::Exp;
  VerifyOptions verify;
};

/// Throws ConfigError naming the offending key path for any schema,
/// dimension or expression problem; I/O and JSON syntax problems use an
/// empty key path.
ProblemConfig load_config(const std::filesystem::path& path);
ProblemConfig parse_config_text(std::string_view text);
ProblemConfig parse_config(const nlohmann::json& doc);

/// Inverse of parse_config for the shipped demo problems.
nlohmann::json config_to_json(const ProblemConfig& config);

}  // namespace liesect
