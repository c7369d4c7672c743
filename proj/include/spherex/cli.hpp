#ifndef SPHEREX_CLI_HPP
#define SPHEREX_CLI_HPP

// Command implementations behind the `spherex` executable. Each command
// returns its exit code, a JSON report, optional CSV, and human-readable
// lines for standard error; the executable only does argument parsing and
// I/O.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spherex/config.hpp"
#include "spherex/solvers.hpp"
#include "spherex/verify.hpp"

namespace spherex::cli {

using nlohmann::json;

enum ExitCode : int {
  kSuccess = 0,
  kPropertyFailure = 1,
  kConfigInvalid = 2,
  kInconclusive = 3,
  kRadiusTooLarge = 4,
};

struct CommandResult {
  int exit_code = kSuccess;
  json report = json::object();
  std::string csv;
  std::vector<std::string> summary;
  std::vector<std::string> warnings;
};

/// Finite numbers as numbers; infinities and NaN as "inf", "-inf", "nan".
inline json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json nodal_pairs(const GalerkinSpace& space, const Field& u) {
  json out = json::array();
  for (Eigen::Index i = 0; i < u.size(); ++i) out.push_back({space.nodes()[i], u[i]});
  return out;
}

inline std::string nodal_csv(const GalerkinSpace& space, const Field& u) {
  std::string s = "x,u\n";
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    s += csv_number(space.nodes()[i]) + "," + csv_number(u[i]) + "\n";
  }
  return s;
}

inline json problem_json(const Problem& p) {
  return {{"domain", {{"a", p.space.a()}, {"b", p.space.b()}}},
          {"mesh_n", p.space.n_elems()},
          {"f", p.f.name()},
          {"g", p.g.name()},
          {"L", p.f.lipschitz()},
          {"nu", p.g.lipschitz()},
          {"lambda_floor", lambda_floor(p.f, p.g)},
          {"subspace", p.subspace.name()},
          {"subspace_dim", p.subspace.dimension(p.space)},
          {"seed", p.seed}};
}

inline json v0_json(const V0Report& v0) {
  return {{"holds", v0.holds}, {"functional_norm", number(v0.functional_norm)}};
}

inline json delta_json(const GalerkinSpace& space, const DeltaReport& d) {
  json j = {{"sense", sense_name(d.sense)},
            {"status", delta_status_name(d.status)},
            {"delta", number(d.delta)},
            {"multistart_spread", number(d.multistart_spread)},
            {"runs", d.runs}};
  if (d.minimizer) j["minimizer"] = nodal_pairs(space, *d.minimizer);
  return j;
}

inline json property_json(const PropertyReport& r) {
  json j = {{"name", r.name},
            {"status", property_status_name(r.status)},
            {"n_trials", r.n_trials},
            {"worst_slack", number(r.worst_slack)},
            {"tolerance", r.tolerance}};
  j["witness"] = r.witness.empty() ? json(nullptr) : json::parse(r.witness);
  if (!r.note.empty()) j["note"] = r.note;
  json m = json::object();
  for (const auto& [k, v] : r.metrics) m[k] = number(v);
  j["metrics"] = m;
  return j;
}

inline CommandResult cmd_delta(const Problem& p) {
  CommandResult out;
  const V0Report v0 = v0_condition(p.space, p.subspace, p.f);
  const Thresholds t = compute_thresholds(p.space, p.subspace, p.f, p.g, p.n_starts, p.seed, p.solver);
  out.report = {{"command", "delta"},
                {"problem", problem_json(p)},
                {"delta", number(t.delta)},
                {"delta1", number(t.delta1)},
                {"min", delta_json(p.space, t.min_side)},
                {"max", delta_json(p.space, t.max_side)},
                {"v0", v0_json(v0)}};
  out.summary.push_back("delta = " + csv_number(t.delta) + " (" +
                        std::string(delta_status_name(t.min_side.status)) + "), delta1 = " +
                        csv_number(t.delta1) + " (max side " +
                        std::string(delta_status_name(t.max_side.status)) + ")");
  if (!v0.holds) {
    out.warnings.push_back("nondegeneracy condition fails: int(f_xi(0) v + f_eta(0) v') = 0 on V; "
                           "no radius is guaranteed a unique extremum");
  }
  if (t.delta1 == 0.0) out.warnings.push_back("delta1 = 0: the certified radius range is empty");
  return out;
}

inline json saddle_json(const GalerkinSpace& space, const SaddleResult& s, double r) {
  return {{"r", r},
          {"sense", sense_name(s.sense)},
          {"lambda_star", s.lambda_star},
          {"lambda_floor", s.lambda_floor},
          {"j_value", s.j_value},
          {"constraint_residual", s.constraint_residual},
          {"certified", s.certified},
          {"c_at_floor", number(s.c_at_floor)},
          {"s_empty_branch", s.s_empty_branch},
          {"u_star", nodal_pairs(space, s.u_star)}};
}

inline CommandResult cmd_solve(const Problem& p, double r, Sense sense) {
  CommandResult out;
  if (!(r > 0.0) || !std::isfinite(r)) {
    out.exit_code = kConfigInvalid;
    out.report = {{"command", "solve"}, {"error", "radius must be positive"}};
    return out;
  }
  try {
    const SaddleResult s = solve_sphere(p.space, p.subspace, p.f, p.g, r, sense, p.solver);
    out.report = saddle_json(p.space, s, r);
    out.report["command"] = "solve";
    out.report["problem"] = problem_json(p);
    out.csv = nodal_csv(p.space, s.u_star);
    out.summary.push_back(std::string(sense_name(sense)) + " on C_r, r = " + csv_number(r) +
                          ": lambda* = " + csv_number(s.lambda_star) + ", J = " +
                          csv_number(s.j_value) + ", certified = " + (s.certified ? "true" : "false"));
    if (!s.certified) out.warnings.push_back("lambda* is not above L/(2-nu); uniqueness not certified");
  } catch (const RadiusTooLarge& e) {
    out.exit_code = kRadiusTooLarge;
    out.report = {{"command", "solve"},
                  {"error", "radius_too_large"},
                  {"r", r},
                  {"sense", sense_name(sense)},
                  {"c_at_floor", number(e.c_at_floor())}};
    out.warnings.push_back("radius too large: c(lambda_floor) = " + csv_number(e.c_at_floor()) +
                           " < r; choose r below that value");
  }
  return out;
}

struct SweepSides {
  bool min = true;
  bool max = true;
};

inline CommandResult cmd_sweep(const Problem& p, SweepSides sides) {
  CommandResult out;
  if (p.r_list.empty()) {
    out.exit_code = kConfigInvalid;
    out.report = {{"command", "sweep"}, {"error", "r_list is empty"}};
    return out;
  }
  struct Cell {
    bool present = false;
    bool error = false;
    std::string note;
    SweepRow row;
  };
  auto run = [&](double r, Sense sense, std::uint64_t seed) {
    Cell c;
    c.present = true;
    try {
      c.row = sweep_point(p.space, p.subspace, p.f, p.g, r, sense, seed, p.solver);
    } catch (const InconclusiveSolve& e) {
      c.error = true;
      c.note = e.what();
      c.row.r = r;
    }
    return c;
  };
  const int n = static_cast<int>(p.r_list.size());
  const auto rows = detail::indexed_map(n, p.solver.parallel, [&](int i) {
    const double r = p.r_list[static_cast<std::size_t>(i)];
    const std::uint64_t seed = p.seed + static_cast<std::uint64_t>(i);
    return std::pair{sides.min ? run(r, Sense::min, seed) : Cell{},
                     sides.max ? run(r, Sense::max, seed) : Cell{}};
  });

  out.csv = "r,lambda_min,lambda_max,j_min,j_max,certified_min,certified_max,residual_min,residual_max\n";
  json table = json::array();
  int certified_rows = 0;
  auto cell_json = [](const Cell& c) -> json {
    if (!c.present) return nullptr;
    json j = {{"lambda_star", number(c.row.lambda_star)},
              {"j_value", number(c.row.j_value)},
              {"certified", c.row.certified},
              {"residual", number(c.row.residual)},
              {"fallback", c.row.fallback}};
    if (c.error) {
      j["error"] = c.note;
      j["j_value"] = nullptr;
    }
    return j;
  };
  auto field = [](const Cell& c, auto get) -> std::string {
    if (!c.present || c.error) return "";
    return get(c.row);
  };
  for (int i = 0; i < n; ++i) {
    const auto& [mn, mx] = rows[static_cast<std::size_t>(i)];
    const double r = p.r_list[static_cast<std::size_t>(i)];
    const bool all_certified = (!mn.present || mn.row.certified) && (!mx.present || mx.row.certified);
    certified_rows += all_certified ? 1 : 0;
    table.push_back({{"r", r}, {"min", cell_json(mn)}, {"max", cell_json(mx)}});
    auto lam = [](const SweepRow& s) { return s.fallback ? std::string() : csv_number(s.lambda_star); };
    auto jv = [](const SweepRow& s) { return csv_number(s.j_value); };
    auto cert = [](const SweepRow& s) { return std::string(s.certified ? "true" : "false"); };
    auto res = [](const SweepRow& s) { return csv_number(s.residual); };
    out.csv += csv_number(r) + "," + field(mn, lam) + "," + field(mx, lam) + "," + field(mn, jv) + "," +
               field(mx, jv) + "," + field(mn, cert) + "," + field(mx, cert) + "," + field(mn, res) +
               "," + field(mx, res) + "\n";
    for (const Cell* c : {&mn, &mx}) {
      if (c->error) out.warnings.push_back("r = " + csv_number(r) + ": " + c->note);
    }
  }
  out.report = {{"command", "sweep"}, {"problem", problem_json(p)}, {"rows", table}};
  out.summary.push_back(std::to_string(certified_rows) + " of " + std::to_string(n) +
                        " radii certified");
  if (certified_rows == 0) {
    out.warnings.push_back("no radius in r_list is certified; all rows lie beyond the threshold");
  }
  return out;
}

inline CommandResult cmd_verify(const Problem& p) {
  CommandResult out;
  std::vector<PropertyReport> props;
  bool inconclusive = false;
  auto guarded = [&](const std::string& name, auto&& fn) {
    try {
      fn();
    } catch (const InconclusiveSolve& e) {
      PropertyReport r;
      r.name = name;
      r.status = PropertyStatus::skipped;
      r.note = std::string("inconclusive: ") + e.what();
      props.push_back(r);
      inconclusive = true;
    }
  };
  const auto& S = p.space;
  const auto& V = p.subspace;
  const std::uint64_t seed = p.seed;

  for (const IntegrandSpec* spec : {&p.f, &p.g}) {
    PropertyReport r;
    r.name = "integrand_lipschitz_" + std::string(spec->role() == Role::f ? "f" : "g");
    r.n_trials = 10000;
    r.tolerance = 0.0;
    const double bound = spec->lipschitz();
    const double seen = empirical_lipschitz(*spec, r.n_trials, 10.0, seed);
    r.worst_slack = bound * (1.0 + 1e-9) - seen;
    r.metrics = {{"declared", bound}, {"empirical", seen}};
    r.settle();
    props.push_back(r);
  }

  for (const IntegrandSpec* spec : {&p.f, &p.g}) {
    PropertyReport r;
    r.name = "gradient_fd_" + std::string(spec->role() == Role::f ? "f" : "g");
    r.n_trials = 10;
    r.tolerance = 0.0;
    Rng rng(seed);
    double worst = 0.0;
    for (int k = 0; k < r.n_trials; ++k) {
      const Field u = random_field(S, Subspace::full(), rng, 1.0);
      worst = std::max(worst, fd_gradient_check(S, *spec, u, 1e-5, seed + static_cast<std::uint64_t>(k)));
    }
    r.worst_slack = 1e-6 - worst;
    r.metrics = {{"max_relative_error", worst}};
    r.settle();
    props.push_back(r);
  }

  const double mu_bar = (2.0 - p.g.lipschitz()) / p.f.lipschitz();
  props.push_back(check_strong_monotonicity(S, V, p.f, p.g, 0.9 * mu_bar, 1000, seed));
  {
    PropertyReport r = check_strong_monotonicity(S, V, p.f, p.g, mu_bar, 1000, seed);
    r.name = "strong_monotonicity_boundary";
    props.push_back(r);
  }
  for (double mu : {0.0, 1.0, 2.0}) props.push_back(check_derivative_lipschitz(S, V, p.f, p.g, mu, 1000, seed));

  const V0Report v0 = v0_condition(S, V, p.f);
  std::optional<Thresholds> thresholds;
  guarded("v0_delta_link", [&] {
    thresholds = compute_thresholds(S, V, p.f, p.g, p.n_starts, seed, p.solver);
    PropertyReport r;
    r.name = "v0_delta_link";
    r.n_trials = 2;
    r.tolerance = 0.0;
    // With the nondegeneracy condition a finite threshold is positive;
    // without it the zero field is stationary, so no side may report one.
    bool ok = true;
    for (const DeltaReport* d : {&thresholds->min_side, &thresholds->max_side}) {
      if (d->status == DeltaStatus::finite) ok = ok && v0.holds && d->delta > 0.0;
    }
    r.worst_slack = ok ? 0.0 : -1.0;
    r.metrics = {{"v0_holds", v0.holds ? 1.0 : 0.0},
                 {"functional_norm", v0.functional_norm},
                 {"delta", thresholds->delta},
                 {"delta1", thresholds->delta1}};
    r.note = std::string("min side ") + std::string(delta_status_name(thresholds->min_side.status)) +
             ", max side " + std::string(delta_status_name(thresholds->max_side.status));
    r.settle();
    props.push_back(r);
  });

  std::vector<double> radii = p.r_list;
  if (radii.empty() && thresholds && thresholds->delta1 > 0.0) {
    radii.push_back(std::isfinite(thresholds->delta1) ? 0.5 * thresholds->delta1 : 0.1);
  }
  for (double r : radii) {
    for (Sense s : {Sense::min, Sense::max}) {
      guarded("multistart_uniqueness", [&] {
        props.push_back(multistart_uniqueness(S, V, p.f, p.g, r, s, 20, seed, p.solver));
      });
    }
  }
  if (radii.size() >= 2) {
    for (Sense s : {Sense::min, Sense::max}) {
      guarded("sup_sweep", [&] {
        props.push_back(sup_sweep(S, V, p.f, p.g, radii, s, p.solver, true, seed).report);
      });
    }
  }

  guarded("dual_monotonicity", [&] {
    const double floor = lambda_floor(p.f, p.g);
    std::vector<double> grid;
    for (int k = 0; k < 20; ++k) grid.push_back(floor * (1.05 + 0.5 * k));
    props.push_back(check_dual_monotonicity(S, V, p.f, p.g, grid, Sense::min, p.solver).report);
  });

  if (!v0.holds) out.warnings.push_back("nondegeneracy condition fails for this problem");

  int n_pass = 0, n_fail = 0, n_skip = 0;
  json list = json::array();
  for (const auto& r : props) {
    list.push_back(property_json(r));
    n_pass += r.status == PropertyStatus::pass;
    n_fail += r.status == PropertyStatus::fail;
    n_skip += r.status == PropertyStatus::skipped;
    char line[256];
    std::snprintf(line, sizeof line, "%-32s %-8s worst_slack %-24s tol %g", r.name.c_str(),
                  std::string(property_status_name(r.status)).c_str(),
                  csv_number(r.worst_slack).c_str(), r.tolerance);
    out.summary.push_back(line);
  }
  out.report = {{"command", "verify"},
                {"problem", problem_json(p)},
                {"properties", list},
                {"summary", {{"pass", n_pass}, {"fail", n_fail}, {"skipped", n_skip}}}};
  if (n_fail > 0) {
    out.exit_code = kPropertyFailure;
  } else if (inconclusive) {
    out.exit_code = kInconclusive;
  }
  return out;
}

inline CommandResult cmd_demo_remark1(const Problem& p) {
  CommandResult out;
  const Remark1Report rep = demo_remark1(p.space, p.subspace, p.seed, p.solver);
  out.report = {{"command", "demo remark1"},
                {"f", "neg_norm_sq"},
                {"g", "zero"},
                {"v0", v0_json(rep.v0)},
                {"delta", number(rep.delta.delta)},
                {"delta_report", delta_json(p.space, rep.delta)},
                {"objective_u1", rep.objective_u1},
                {"objective_u2", rep.objective_u2},
                {"gradient_u1", rep.gradient_u1},
                {"gradient_u2", rep.gradient_u2},
                {"distinct_minimizers_spread", rep.distinct_minimizers_spread},
                {"u1", nodal_pairs(p.space, rep.u1)},
                {"u2", nodal_pairs(p.space, rep.u2)}};
  std::string text = rep.text;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    out.summary.push_back(text.substr(start, end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

}  // namespace spherex::cli

#endif  // SPHEREX_CLI_HPP
