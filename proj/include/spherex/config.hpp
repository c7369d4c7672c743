#ifndef SPHEREX_CONFIG_HPP
#define SPHEREX_CONFIG_HPP

// JSON problem configuration. The schema is strict: unknown keys are errors.
//
//   {
//     "domain":   {"a": 0, "b": 1},
//     "mesh_n":   64,
//     "f":        {"kind": "affine_quadratic", "params": [1, 1]},
//     "g":        {"kind": "zero"},                          // optional
//     "subspace": {"kind": "full" | "zero_boundary" | "custom",
//                  "basis_file": "basis.txt"},               // optional
//     "solver":   {"tol_g": 1e-10, "tol_r": 1e-8, "max_iters": 200000,
//                  "r_max_guard": 1e6, "n_starts": 8, "accelerate": true},
//     "seed":     0,
//     "r_list":   [0.01, 0.04]
//   }

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spherex/errors.hpp"
#include "spherex/galerkin.hpp"
#include "spherex/integrand.hpp"
#include "spherex/solvers.hpp"

namespace spherex {

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct IntegrandConfig {
  std::string kind;
  std::vector<double> params;
};

struct ProblemConfig {
  double a = 0.0;
  double b = 1.0;
  int mesh_n = 64;
  IntegrandConfig f;
  IntegrandConfig g{"zero", {}};
  std::string subspace_kind = "full";
  std::optional<std::string> basis_file;
  SolverOptions solver;
  int n_starts = 8;
  std::uint64_t seed = 0;
  std::vector<double> r_list;
  std::filesystem::path base_dir;  // for relative basis_file paths
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::string& where,
                           std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

inline double get_number(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  return v.get<double>();
}

inline std::int64_t get_integer(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
  return v.get<std::int64_t>();
}

inline IntegrandConfig parse_integrand(const json& obj, const std::string& where) {
  reject_unknown(obj, where, {"kind", "params"});
  if (!obj.contains("kind") || !obj["kind"].is_string()) {
    throw ConfigError(where + ".kind must be a string");
  }
  IntegrandConfig out{obj["kind"].get<std::string>(), {}};
  if (obj.contains("params")) {
    if (!obj["params"].is_array()) throw ConfigError(where + ".params must be an array");
    for (const auto& p : obj["params"]) {
      if (!p.is_number()) throw ConfigError(where + ".params must hold numbers");
      out.params.push_back(p.get<double>());
    }
  }
  return out;
}

}  // namespace detail

inline ProblemConfig parse_config(const nlohmann::json& doc) {
  using detail::get_integer;
  using detail::get_number;
  detail::reject_unknown(doc, "config",
                         {"domain", "mesh_n", "f", "g", "subspace", "solver", "seed", "r_list"});
  ProblemConfig cfg;
  try {
    for (const char* key : {"domain", "mesh_n", "f"}) {
      if (!doc.contains(key)) throw ConfigError(std::string("missing required key '") + key + "'");
    }
    const auto& dom = doc["domain"];
    detail::reject_unknown(dom, "domain", {"a", "b"});
    cfg.a = get_number(dom, "a", "domain");
    cfg.b = get_number(dom, "b", "domain");
    const auto mesh = get_integer(doc, "mesh_n", "config");
    if (mesh < 1 || mesh > 1024) throw ConfigError("mesh_n must lie in [1, 1024]");
    cfg.mesh_n = static_cast<int>(mesh);
    cfg.f = detail::parse_integrand(doc["f"], "f");
    if (doc.contains("g")) cfg.g = detail::parse_integrand(doc["g"], "g");

    if (doc.contains("subspace")) {
      const auto& sub = doc["subspace"];
      detail::reject_unknown(sub, "subspace", {"kind", "basis_file"});
      if (!sub.contains("kind") || !sub["kind"].is_string()) {
        throw ConfigError("subspace.kind must be a string");
      }
      cfg.subspace_kind = sub["kind"].get<std::string>();
      if (sub.contains("basis_file")) {
        if (!sub["basis_file"].is_string()) throw ConfigError("subspace.basis_file must be a string");
        cfg.basis_file = sub["basis_file"].get<std::string>();
      }
      if (cfg.subspace_kind != "full" && cfg.subspace_kind != "zero_boundary" &&
          cfg.subspace_kind != "custom") {
        throw ConfigError("subspace.kind must be full, zero_boundary or custom");
      }
      if ((cfg.subspace_kind == "custom") != cfg.basis_file.has_value()) {
        throw ConfigError("subspace.basis_file is required for, and only for, kind custom");
      }
    }

    if (doc.contains("solver")) {
      const auto& s = doc["solver"];
      detail::reject_unknown(s, "solver",
                             {"tol_g", "tol_r", "max_iters", "r_max_guard", "n_starts", "accelerate"});
      if (s.contains("tol_g")) cfg.solver.tol_g = get_number(s, "tol_g", "solver");
      if (s.contains("tol_r")) cfg.solver.tol_r = get_number(s, "tol_r", "solver");
      if (s.contains("max_iters")) cfg.solver.max_iters = static_cast<int>(get_integer(s, "max_iters", "solver"));
      if (s.contains("r_max_guard")) cfg.solver.r_max_guard = get_number(s, "r_max_guard", "solver");
      if (s.contains("n_starts")) cfg.n_starts = static_cast<int>(get_integer(s, "n_starts", "solver"));
      if (s.contains("accelerate")) {
        if (!s["accelerate"].is_boolean()) throw ConfigError("solver.accelerate must be a boolean");
        cfg.solver.accelerate = s["accelerate"].get<bool>();
      }
      if (!(cfg.solver.tol_g > 0.0) || !(cfg.solver.tol_r > 0.0) || cfg.solver.max_iters < 1 ||
          !(cfg.solver.r_max_guard > 0.0) || cfg.n_starts < 0) {
        throw ConfigError("solver tolerances, guard and iteration counts must be positive");
      }
    }

    if (doc.contains("seed")) {
      const auto& s = doc["seed"];
      if (!s.is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
      cfg.seed = s.get<std::uint64_t>();
    }

    if (doc.contains("r_list")) {
      if (!doc["r_list"].is_array()) throw ConfigError("r_list must be an array");
      for (const auto& r : doc["r_list"]) {
        if (!r.is_number() || !(r.get<double>() > 0.0)) throw ConfigError("r_list entries must be positive");
        cfg.r_list.push_back(r.get<double>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

inline ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  ProblemConfig cfg = parse_config(doc);
  cfg.base_dir = path.parent_path();
  return cfg;
}

/// Whitespace- or comma-separated table, one row per node, one column per
/// basis vector. Lines starting with '#' are ignored.
inline Eigen::MatrixXd read_basis_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open basis file " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') {
      continue;
    }
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof()) throw ConfigError("basis file has a non-numeric entry: " + line);
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ConfigError("basis file rows have different lengths");
    }
    rows.push_back(std::move(row));
  }
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index k = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd m(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

/// Everything a command needs, validated.
struct Problem {
  GalerkinSpace space;
  Subspace subspace;
  IntegrandSpec f;
  IntegrandSpec g;
  SolverOptions solver;
  int n_starts = 8;
  std::uint64_t seed = 0;
  std::vector<double> r_list;
};

inline IntegrandSpec make_integrand(const IntegrandConfig& c, Role role, const char* which) {
  const auto kind = parse_kind(c.kind);
  if (!kind) throw ConfigError(std::string(which) + ": unknown integrand kind '" + c.kind + "'");
  try {
    return IntegrandSpec(*kind, c.params, role);
  } catch (const InvalidSpec& e) {
    throw ConfigError(std::string(which) + ": " + e.what());
  }
}

inline Problem build_problem(const ProblemConfig& cfg) {
  const IntegrandSpec f = make_integrand(cfg.f, Role::f, "f");
  const IntegrandSpec g = make_integrand(cfg.g, Role::g, "g");
  if (const auto rep = validate_f(f); !rep.pass) throw ConfigError("f: " + rep.message);
  if (const auto rep = validate_g(g); !rep.pass) throw ConfigError("g: " + rep.message);
  try {
    GalerkinSpace space(cfg.a, cfg.b, cfg.mesh_n);
    Subspace V = Subspace::full();
    if (cfg.subspace_kind == "zero_boundary") {
      V = Subspace::zero_boundary(space);
    } else if (cfg.subspace_kind == "custom") {
      std::filesystem::path p(*cfg.basis_file);
      if (p.is_relative()) p = cfg.base_dir / p;
      V = Subspace::custom(space, read_basis_file(p));
    }
    return Problem{std::move(space), std::move(V), f, g, cfg.solver, cfg.n_starts, cfg.seed, cfg.r_list};
  } catch (const InvalidDomain& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  } catch (const ShapeError& e) {
    throw ConfigError(std::string("subspace: ") + e.what());
  }
}

}  // namespace spherex

#endif  // SPHEREX_CONFIG_HPP
