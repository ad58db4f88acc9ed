#include "liesect/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "liesect/error.hpp"

namespace liesect {

using nlohmann::json;

namespace {

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string at(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const char* type_name(const json& j) { return j.type_name(); }

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) {
    throw ConfigError(path, std::string("expected an object, got ") + type_name(j));
  }
}

void allow_keys(const json& j, const std::string& path,
                std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(join(path, key), "unknown key");
  }
}

double read_number(const json& j, const std::string& path) {
  if (!j.is_number()) {
    throw ConfigError(path, std::string("expected a number, got ") + type_name(j));
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

long long read_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) {
    throw ConfigError(path, std::string("expected an integer, got ") + type_name(j));
  }
  return j.get<long long>();
}

std::string read_string(const json& j, const std::string& path) {
  if (!j.is_string()) {
    throw ConfigError(path, std::string("expected a string, got ") + type_name(j));
  }
  return j.get<std::string>();
}

const json& read_array(const json& j, const std::string& path) {
  if (!j.is_array()) {
    throw ConfigError(path, std::string("expected an array, got ") + type_name(j));
  }
  return j;
}

Vector read_vector(const json& j, const std::string& path) {
  const json& arr = read_array(j, path);
  Vector out(static_cast<Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out[static_cast<Index>(i)] = read_number(arr[i], at(path, i));
  }
  return out;
}

double positive(double v, const std::string& path) {
  if (!(v > 0.0)) throw ConfigError(path, "must be positive");
  return v;
}

expr::Ast parse_expression(const json& j, const std::string& path) {
  const std::string text = read_string(j, path);
  try {
    return expr::parse(text);
  } catch (const ParseError& e) {
    throw ConfigError(path, std::string("parse error: ") + e.what());
  }
}

GroupChart read_group(const json& j) {
  const std::string path = "group";
  require_object(j, path);
  allow_keys(j, path, {"kind", "domain_radius", "product", "identity"});
  if (!j.contains("kind")) throw ConfigError(join(path, "kind"), "missing");
  const std::string kind = read_string(j["kind"], join(path, "kind"));
  const double radius =
      j.contains("domain_radius")
          ? positive(read_number(j["domain_radius"], join(path, "domain_radius")),
                     join(path, "domain_radius"))
          : kDefaultDomainRadius;

  if (kind == "abelian_exp" || kind == "triangular_affine") {
    for (const char* key : {"product", "identity"}) {
      if (j.contains(key)) {
        throw ConfigError(join(path, key), "only allowed for kind \"custom\"");
      }
    }
    return kind == "abelian_exp" ? GroupChart::abelian_exp(radius)
                                 : GroupChart::triangular_affine(radius);
  }
  if (kind != "custom") {
    throw ConfigError(join(path, "kind"),
                      "expected \"abelian_exp\", \"triangular_affine\" or \"custom\"");
  }
  if (!j.contains("identity")) throw ConfigError(join(path, "identity"), "missing");
  if (!j.contains("product")) throw ConfigError(join(path, "product"), "missing");
  Vector identity = read_vector(j["identity"], join(path, "identity"));
  const auto n = static_cast<int>(identity.size());
  if (n == 0) throw ConfigError(join(path, "identity"), "must not be empty");

  const std::string product_path = join(path, "product");
  const json& product = read_array(j["product"], product_path);
  if (static_cast<int>(product.size()) != n) {
    throw ConfigError(product_path, "expected " + std::to_string(n) +
                                        " expressions (one per identity coordinate), got " +
                                        std::to_string(product.size()));
  }
  std::vector<expr::Ast> components;
  for (std::size_t k = 0; k < product.size(); ++k) {
    auto ast = parse_expression(product[k], at(product_path, k));
    if (ast.max_index('x') > 0) {
      throw ConfigError(at(product_path, k), "product expressions use g1..gn, h1..hn only");
    }
    if (ast.max_index('g') > n || ast.max_index('h') > n) {
      throw ConfigError(at(product_path, k),
                        "variable index exceeds n = " + std::to_string(n));
    }
    components.push_back(std::move(ast));
  }
  return GroupChart::custom(std::move(components), std::move(identity), radius);
}

FibrationChart read_fibration(const json* j, const GroupChart& group) {
  const std::string path = "fibration";
  try {
    if (j == nullptr) {
      if (group.kind() == ProductKind::CustomExpr) {
        throw ConfigError(path, "required for custom groups");
      }
      return FibrationChart::standard(group);
    }
    require_object(*j, path);
    allow_keys(*j, path, {"indices", "expressions"});
    const bool has_indices = j->contains("indices");
    if (has_indices == j->contains("expressions")) {
      throw ConfigError(path, "give exactly one of \"indices\" or \"expressions\"");
    }
    if (has_indices) {
      const std::string ipath = join(path, "indices");
      const json& arr = read_array((*j)["indices"], ipath);
      std::vector<Index> indices;
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const long long v = read_integer(arr[i], at(ipath, i));
        if (v < 1 || v > group.dim()) {
          throw ConfigError(at(ipath, i), "index must lie in [1, " +
                                              std::to_string(group.dim()) + "]");
        }
        indices.push_back(static_cast<Index>(v - 1));
      }
      return FibrationChart::coordinate_projection(group, std::move(indices));
    }
    const std::string epath = join(path, "expressions");
    const json& arr = read_array((*j)["expressions"], epath);
    std::vector<expr::Ast> components;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      auto ast = parse_expression(arr[i], at(epath, i));
      if (ast.max_index('g') > 0 || ast.max_index('h') > 0) {
        throw ConfigError(at(epath, i), "fibration expressions use x1..xn only");
      }
      if (ast.max_index('x') > group.dim()) {
        throw ConfigError(at(epath, i),
                          "variable index exceeds n = " + std::to_string(group.dim()));
      }
      components.push_back(std::move(ast));
    }
    return FibrationChart::from_expressions(group, std::move(components));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

AlgebraFrame read_frame(const json& j, const GroupChart& group,
                        const FibrationChart& fibration) {
  const std::string path = "frame";
  const json& rows = read_array(j, path);
  const Index n = group.dim();
  const Index m = fibration.base_dim();
  if (static_cast<Index>(rows.size()) != m) {
    throw ConfigError(path, "expected " + std::to_string(m) +
                                " vectors (the base dimension), got " +
                                std::to_string(rows.size()));
  }
  Matrix columns(n, m);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Vector row = read_vector(rows[i], at(path, i));
    if (row.size() != n) {
      throw ConfigError(at(path, i), "expected " + std::to_string(n) + " entries, got " +
                                         std::to_string(row.size()));
    }
    columns.col(static_cast<Index>(i)) = row;
  }
  try {
    return AlgebraFrame(std::move(columns));
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

void read_solver(const json& j, const GroupChart& group, SolverParams& params,
                 Route& route) {
  const std::string path = "solver";
  require_object(j, path);
  allow_keys(j, path,
             {"rk4_step", "newton_tol", "max_newton_iter", "path_strategy", "route"});
  if (j.contains("rk4_step")) {
    params.rk4_step = read_number(j["rk4_step"], join(path, "rk4_step"));
  }
  if (j.contains("newton_tol")) {
    params.newton_tol = read_number(j["newton_tol"], join(path, "newton_tol"));
  }
  if (j.contains("max_newton_iter")) {
    const long long v = read_integer(j["max_newton_iter"], join(path, "max_newton_iter"));
    if (v < 1 || v > 10000) {
      throw ConfigError(join(path, "max_newton_iter"), "must lie in [1, 10000]");
    }
    params.max_newton_iter = static_cast<int>(v);
  }
  if (j.contains("path_strategy")) {
    const std::string s = read_string(j["path_strategy"], join(path, "path_strategy"));
    if (s == "straight") {
      params.path_strategy = PathStrategy::StraightLine;
    } else if (s == "two_leg") {
      params.path_strategy = PathStrategy::AxisLegs;
    } else {
      throw ConfigError(join(path, "path_strategy"), "expected \"straight\" or \"two_leg\"");
    }
  }
  if (j.contains("route")) {
    const std::string s = read_string(j["route"], join(path, "route"));
    if (s == "exp") {
      route = Route::Exp;
    } else if (s == "ode") {
      route = Route::Ode;
    } else {
      throw ConfigError(join(path, "route"), "expected \"exp\" or \"ode\"");
    }
  }
  try {
    params.validate(group.domain_radius());
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

VerifyOptions read_verify(const json& j) {
  const std::string path = "verify";
  require_object(j, path);
  allow_keys(j, path,
             {"radius", "grid", "tolerance", "random_samples", "seed", "closure_tol"});
  VerifyOptions v;
  if (j.contains("radius")) {
    v.radius = read_number(j["radius"], join(path, "radius"));
    if (v.radius < 0.0) throw ConfigError(join(path, "radius"), "must be >= 0");
  }
  if (j.contains("grid")) {
    const long long g = read_integer(j["grid"], join(path, "grid"));
    if (g < 1 || g > 1000) throw ConfigError(join(path, "grid"), "must lie in [1, 1000]");
    v.grid = static_cast<int>(g);
  }
  if (j.contains("tolerance")) {
    v.tolerance = positive(read_number(j["tolerance"], join(path, "tolerance")),
                           join(path, "tolerance"));
  }
  if (j.contains("random_samples")) {
    const long long r = read_integer(j["random_samples"], join(path, "random_samples"));
    if (r < 0 || r > 1000000) {
      throw ConfigError(join(path, "random_samples"), "must lie in [0, 1000000]");
    }
    v.random_samples = static_cast<int>(r);
  }
  if (j.contains("seed")) {
    const json& s = j["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw ConfigError(join(path, "seed"), "expected a non-negative integer");
    }
    v.seed = s.get<std::uint64_t>();
  }
  if (j.contains("closure_tol")) {
    v.closure_tol = positive(read_number(j["closure_tol"], join(path, "closure_tol")),
                             join(path, "closure_tol"));
  }
  return v;
}

}  // namespace

ProblemConfig parse_config(const json& doc) {
  require_object(doc, "");
  allow_keys(doc, "", {"group", "fibration", "frame", "solver", "verify", "description"});
  if (!doc.contains("group")) throw ConfigError("group", "missing");
  GroupChart group = read_group(doc["group"]);
  FibrationChart fibration =
      read_fibration(doc.contains("fibration") ? &doc["fibration"] : nullptr, group);
  std::optional<AlgebraFrame> frame;
  if (doc.contains("frame")) frame = read_frame(doc["frame"], group, fibration);

  ProblemConfig config{std::move(group), std::move(fibration), std::move(frame), {},
                       Route::Exp, {}};
  if (doc.contains("solver")) {
    read_solver(doc["solver"], config.group, config.solver, config.route);
  } else {
    try {
      config.solver.validate(config.group.domain_radius());
    } catch (const Error& e) {
      throw ConfigError("solver", e.what());
    }
  }
  if (doc.contains("verify")) config.verify = read_verify(doc["verify"]);
  return config;
}

ProblemConfig parse_config_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("JSON syntax error: ") + e.what());
  }
  return parse_config(doc);
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

json config_to_json(const ProblemConfig& config) {
  json group = {{"kind", config.group.name()},
                {"domain_radius", config.group.domain_radius()}};
  if (config.group.kind() == ProductKind::CustomExpr) {
    json product = json::array();
    for (const auto& ast : config.group.components()) product.push_back(ast.source());
    group["product"] = std::move(product);
    group["identity"] = to_std(config.group.identity());
  }

  json fibration;
  if (config.fibration.is_coordinate_projection()) {
    json indices = json::array();
    for (Index i : config.fibration.indices()) indices.push_back(i + 1);
    fibration["indices"] = std::move(indices);
  } else {
    json expressions = json::array();
    for (const auto& ast : config.fibration.components()) {
      expressions.push_back(ast.source());
    }
    fibration["expressions"] = std::move(expressions);
  }

  json doc = {{"group", std::move(group)}, {"fibration", std::move(fibration)}};
  if (config.frame) {
    json rows = json::array();
    for (Index i = 0; i < config.frame->size(); ++i) {
      rows.push_back(to_std(config.frame->column(i)));
    }
    doc["frame"] = std::move(rows);
  }
  doc["solver"] = {{"rk4_step", config.solver.rk4_step},
                   {"newton_tol", config.solver.newton_tol},
                   {"max_newton_iter", config.solver.max_newton_iter},
                   {"path_strategy", to_string(config.solver.path_strategy)},
                   {"route", to_string(config.route)}};
  doc["verify"] = {{"radius", config.verify.radius},
                   {"grid", config.verify.grid},
                   {"tolerance", config.verify.tolerance},
                   {"random_samples", config.verify.random_samples},
                   {"seed", config.verify.seed},
                   {"closure_tol", config.verify.closure_tol}};
  return doc;
}

}  // namespace liesect
