#pragma once

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "genfam/catalog.hpp"
#include "genfam/common.hpp"
#include "genfam/expr.hpp"
#include "genfam/family.hpp"
#include "genfam/hessian.hpp"
#include "genfam/solver.hpp"
#include "genfam/verify.hpp"

namespace genfam {

using nlohmann::json;

// Input/schema failure: maps to exit code 1.
class problem_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double critical = 1e-8;      // residual bound for kappa/Hessian access
  double isotropy = 1e-6;      // isotropy violation bound (orthonormal bases)
  double oracle_match = 1e-8;  // closed-form constitutive match
};

struct ProblemFile {
  std::optional<CatalogId> catalog_id;
  std::map<std::string, double> catalog_params;

  int n = 0, k = 0;
  std::string expression;
  std::map<std::string, double> expr_params;

  std::vector<Eigen::VectorXd> explicit_points;
  bool has_grid = false;
  Eigen::VectorXd grid_from, grid_to;
  std::vector<int> grid_steps;

  SolveConfig solve;
  bool joint = false;  // solve over (q, lambda) jointly from each base seed
  Tolerances tol;

  std::string report_path, samples_path;

  bool is_catalog() const { return catalog_id.has_value(); }

  // Explicit points followed by the grid in row-major order (last axis
  // fastest).
  std::vector<Eigen::VectorXd> base_points(int base_dim) const {
    std::vector<Eigen::VectorXd> out = explicit_points;
    if (has_grid) {
      std::vector<int> idx(base_dim, 0);
      for (;;) {
        Eigen::VectorXd q(base_dim);
        for (int a = 0; a < base_dim; ++a) {
          const int steps = grid_steps[a];
          q(a) = steps == 1 ? grid_from(a)
                            : grid_from(a) + idx[a] * (grid_to(a) - grid_from(a)) /
                                                 (steps - 1);
        }
        out.push_back(q);
        int axis = base_dim - 1;
        while (axis >= 0 && ++idx[axis] == grid_steps[axis]) idx[axis--] = 0;
        if (axis < 0) break;
      }
    }
    return out;
  }
};

namespace detail {

inline const json& require_field(const json& j, const std::string& key,
                                 const std::string& where) {
  if (!j.contains(key))
    throw problem_error("missing field '" + key + "' in " + where);
  return j.at(key);
}

inline std::map<std::string, double> parse_param_table(const json& j,
                                                       const std::string& where) {
  std::map<std::string, double> out;
  if (j.is_null()) return out;
  if (!j.is_object()) throw problem_error(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number())
      throw problem_error("parameter '" + key + "' in " + where +
                          " must be a number");
    out[key] = value.get<double>();
  }
  return out;
}

inline Eigen::VectorXd parse_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw problem_error(where + " must be an array");
  Eigen::VectorXd v(j.size());
  int i = 0;
  for (const auto& x : j) {
    if (!x.is_number()) throw problem_error(where + " entries must be numbers");
    v(i++) = x.get<double>();
  }
  return v;
}

}  // namespace detail

inline ProblemFile problem_from_json(const json& j) {
  ProblemFile p;
  if (j.contains("catalog") == j.contains("custom"))
    throw problem_error("problem must contain exactly one of 'catalog' or 'custom'");

  if (j.contains("catalog")) {
    const json& c = j.at("catalog");
    try {
      p.catalog_id = catalog_id_from_string(
          detail::require_field(c, "id", "'catalog'").get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw problem_error(std::string("'catalog': ") + e.what());
    }
    if (c.contains("params"))
      p.catalog_params = detail::parse_param_table(c.at("params"),
                                                   "'catalog.params'");
  } else {
    const json& c = j.at("custom");
    p.n = detail::require_field(c, "n", "'custom'").get<int>();
    p.k = detail::require_field(c, "k", "'custom'").get<int>();
    p.expression =
        detail::require_field(c, "expression", "'custom'").get<std::string>();
    if (c.contains("params"))
      p.expr_params = detail::parse_param_table(c.at("params"),
                                                "'custom.params'");
    if (p.n < 1) throw problem_error("'custom.n' must be >= 1");
    if (p.k < 0) throw problem_error("'custom.k' must be >= 0");
  }

  if (j.contains("base_points")) {
    const json& pts = j.at("base_points");
    if (!pts.is_array()) throw problem_error("'base_points' must be an array");
    for (const auto& q : pts)
      p.explicit_points.push_back(detail::parse_vector(q, "'base_points' entry"));
  }
  if (j.contains("base_grid")) {
    const json& g = j.at("base_grid");
    p.has_grid = true;
    p.grid_from = detail::parse_vector(
        detail::require_field(g, "from", "'base_grid'"), "'base_grid.from'");
    p.grid_to = detail::parse_vector(
        detail::require_field(g, "to", "'base_grid'"), "'base_grid.to'");
    const json& st = detail::require_field(g, "steps", "'base_grid'");
    if (!st.is_array()) throw problem_error("'base_grid.steps' must be an array");
    for (const auto& s : st) {
      const int v = s.get<int>();
      if (v < 1) throw problem_error("'base_grid.steps' entries must be >= 1");
      p.grid_steps.push_back(v);
    }
    if (p.grid_from.size() != p.grid_to.size() ||
        static_cast<std::size_t>(p.grid_from.size()) != p.grid_steps.size())
      throw problem_error("'base_grid' from/to/steps sizes disagree");
  }
  if (p.explicit_points.empty() && !p.has_grid)
    throw problem_error("no base points: provide 'base_points' or 'base_grid'");

  if (j.contains("solve")) {
    const json& s = j.at("solve");
    if (s.contains("newton_tol")) p.solve.newton_tol = s.at("newton_tol").get<double>();
    if (s.contains("max_iters")) p.solve.max_iters = s.at("max_iters").get<int>();
    if (s.contains("seeds")) p.solve.seeds = s.at("seeds").get<int>();
    if (s.contains("seed_box")) {
      const Eigen::VectorXd box =
          detail::parse_vector(s.at("seed_box"), "'solve.seed_box'");
      if (box.size() != 2)
        throw problem_error("'solve.seed_box' must be [lo, hi]");
      p.solve.seed_lo = box(0);
      p.solve.seed_hi = box(1);
    }
    if (s.contains("dedup_radius"))
      p.solve.dedup_radius = s.at("dedup_radius").get<double>();
    if (s.contains("rng_seed"))
      p.solve.rng_seed = s.at("rng_seed").get<std::uint64_t>();
    if (s.contains("joint")) p.joint = s.at("joint").get<bool>();
    try {
      p.solve.validate();
    } catch (const std::invalid_argument& e) {
      throw problem_error(std::string("'solve': ") + e.what());
    }
  }

  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (t.contains("critical")) p.tol.critical = t.at("critical").get<double>();
    if (t.contains("isotropy")) p.tol.isotropy = t.at("isotropy").get<double>();
    if (t.contains("oracle_match"))
      p.tol.oracle_match = t.at("oracle_match").get<double>();
  }

  if (j.contains("outputs")) {
    const json& o = j.at("outputs");
    if (o.contains("report")) p.report_path = o.at("report").get<std::string>();
    if (o.contains("samples")) p.samples_path = o.at("samples").get<std::string>();
  }
  return p;
}

inline ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw problem_error("cannot open problem file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw problem_error("problem file '" + path + "' is not valid JSON: " +
                        e.what());
  }
  try {
    return problem_from_json(j);
  } catch (const json::exception& e) {
    throw problem_error("problem file '" + path + "': " + e.what());
  }
}

enum class OracleStatus { none, matched, mismatch, excluded };

inline const char* to_string(OracleStatus s) {
  switch (s) {
    case OracleStatus::none: return "none";
    case OracleStatus::matched: return "matched";
    case OracleStatus::mismatch: return "mismatch";
    case OracleStatus::excluded: return "excluded";
  }
  return "?";
}

struct PointRecord {
  CriticalPoint cp;
  Eigen::VectorXd f;  // kappa covector components
  int rank = 0;
  PointCheck check;
  OracleStatus oracle = OracleStatus::none;
};

struct BasePointRecord {
  Eigen::VectorXd q;
  std::vector<PointRecord> points;
  bool oracle_complete = true;  // all closed-form covectors found
};

struct Verdicts {
  bool identities = true;        // rank/dimension bookkeeping identities
  bool lagrangian_graph = true;  // T S-bar classifies Lagrangian
  bool equivalences = true;      // clean/transverse <-> rank conditions
  bool immersion = true;         // regular/morse: dim im = n, isotropy small
  bool oracle = true;            // catalog closed forms reproduced
  bool all() const {
    return identities && lagrangian_graph && equivalences && immersion && oracle;
  }
  friend bool operator==(const Verdicts&, const Verdicts&) = default;
};

struct RunReport {
  std::string label;
  bool catalog = false;
  std::string catalog_name;
  int n = 0, k = 0;
  std::uint64_t rng_seed = 0;
  bool joint = false;
  ClassificationResult classification;
  std::vector<BasePointRecord> base;
  Verdicts verdicts;
  std::vector<std::string> notes;

  int exit_code() const { return verdicts.all() ? 0 : 2; }
  json to_json() const;
};

namespace detail {

inline int thread_cap() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("GENFAM_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return hw;
}

template <class Fn>
void parallel_for(int count, Fn&& fn) {
  const int threads = std::min(thread_cap(), count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  for (auto& th : pool) th.join();
}

// Joint exploration: Gauss-Newton projections from (q, seed) with the base
// point free, deduplicated over the full coordinate vector.
inline std::vector<CriticalPoint> joint_solve(const FamilySpec& fam,
                                              const Eigen::VectorXd& q,
                                              const SolveConfig& cfg) {
  const int n = fam.base_dim(), k = fam.fiber_dim();
  std::vector<CriticalPoint> found;
  for (const Eigen::VectorXd& seed : detail::seed_points(fam, cfg)) {
    Eigen::VectorXd x0(n + k);
    x0 << q, seed;
    const auto projected = project_to_critical(fam, x0, 1e-16, 400);
    if (!projected) continue;
    CriticalPoint cp;
    cp.q = projected->head(n);
    cp.lambda =
        detail::canonical_fiber(fam, projected->tail(k));
    if (!fam.in_fiber_domain(cp.lambda)) continue;
    cp.residual_norm = fam.residual_norm(cp.q, cp.lambda);
    if (cp.residual_norm > 1e-10) continue;
    found.push_back(std::move(cp));
  }
  std::sort(found.begin(), found.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) {
              for (int i = 0; i < a.q.size(); ++i)
                if (a.q(i) != b.q(i)) return a.q(i) < b.q(i);
              for (int i = 0; i < a.lambda.size(); ++i)
                if (a.lambda(i) != b.lambda(i)) return a.lambda(i) < b.lambda(i);
              return false;
            });
  std::vector<CriticalPoint> unique;
  for (auto& cp : found) {
    bool fresh = true;
    for (const auto& rep : unique) {
      const double dq = (cp.q - rep.q).norm();
      const double dl = detail::fiber_distance(fam.fibration(), cp.lambda,
                                               rep.lambda);
      if (std::hypot(dq, dl) <= cfg.dedup_radius) {
        fresh = false;
        break;
      }
    }
    if (fresh) unique.push_back(std::move(cp));
  }
  for (std::size_t i = 0; i < unique.size(); ++i)
    unique[i].branch_id = static_cast<int>(i);
  return unique;
}

// Carries branch identities from one base point to the next by fiber
// proximity, so branch labels stay stable along a base path.
inline void stitch_branches(const Fibration& fib,
                            std::vector<BasePointRecord>& base) {
  int next_id = 0;
  std::vector<Eigen::VectorXd> prev_lambda;
  std::vector<int> prev_id;
  for (auto& record : base) {
    std::vector<Eigen::VectorXd> cur_lambda;
    std::vector<int> cur_id(record.points.size(), -1);
    std::vector<bool> taken(prev_id.size(), false);
    // Greedy nearest matching, closest pairs first.
    struct Pair {
      double dist;
      std::size_t cur, prev;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < record.points.size(); ++i)
      for (std::size_t j = 0; j < prev_lambda.size(); ++j)
        pairs.push_back({fiber_distance(fib, record.points[i].cp.lambda,
                                        prev_lambda[j]),
                         i, j});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
      if (a.dist != b.dist) return a.dist < b.dist;
      if (a.cur != b.cur) return a.cur < b.cur;
      return a.prev < b.prev;
    });
    for (const auto& pr : pairs) {
      if (cur_id[pr.cur] != -1 || taken[pr.prev]) continue;
      cur_id[pr.cur] = prev_id[pr.prev];
      taken[pr.prev] = true;
    }
    for (std::size_t i = 0; i < record.points.size(); ++i) {
      if (cur_id[i] == -1) cur_id[i] = next_id++;
      record.points[i].cp.branch_id = cur_id[i];
      cur_lambda.push_back(record.points[i].cp.lambda);
    }
    prev_lambda = std::move(cur_lambda);
    prev_id = std::move(cur_id);
  }
}

}  // namespace detail

inline RunReport run_problem(const ProblemFile& problem,
                             std::optional<std::uint64_t> seed_override = {}) {
  SolveConfig cfg = problem.solve;
  if (seed_override) cfg.rng_seed = *seed_override;

  std::optional<CatalogEntry> entry;
  std::optional<FamilySpec> family;
  RunReport report;
  if (problem.is_catalog()) {
    try {
      entry = instantiate(*problem.catalog_id, problem.catalog_params);
    } catch (const std::invalid_argument& e) {
      throw problem_error(std::string("catalog: ") + e.what());
    }
    family = entry->family;
    report.catalog = true;
    report.catalog_name = to_string(entry->id);
  } else {
    try {
      ExprAst ast = ExprAst::parse(problem.expression, problem.n, problem.k,
                                   problem.expr_params);
      Fibration fib{problem.n, problem.k, Eigen::VectorXd()};
      family = FamilySpec(
          fib, std::make_shared<ExprEnergy>(std::move(ast), problem.expr_params),
          "custom");
    } catch (const parse_error& e) {
      throw problem_error(std::string("expression: ") + e.what());
    }
  }
  const FamilySpec& fam = *family;
  report.label = fam.label();
  report.n = fam.base_dim();
  report.k = fam.fiber_dim();
  report.rng_seed = cfg.rng_seed;
  report.joint = problem.joint;

  const std::vector<Eigen::VectorXd> base_points =
      problem.base_points(fam.base_dim());
  for (const auto& q : base_points)
    if (q.size() != fam.base_dim())
      throw problem_error("base point has dimension " +
                          std::to_string(q.size()) + ", expected " +
                          std::to_string(fam.base_dim()));

  report.base.resize(base_points.size());
  std::vector<std::string> point_errors(base_points.size());
  detail::parallel_for(static_cast<int>(base_points.size()), [&](int i) {
    BasePointRecord record;
    record.q = base_points[i];
    std::vector<CriticalPoint> points;
    try {
      points = problem.joint ? detail::joint_solve(fam, base_points[i], cfg)
                             : multistart(fam, base_points[i], cfg);
      for (auto& cp : points) {
        PointRecord pr;
        pr.f = fam.kappa(cp.q, cp.lambda, problem.tol.critical).f;
        pr.check = check_point(fam, cp.q, cp.lambda, problem.tol.critical,
                               cfg.rng_seed);
        pr.rank = pr.check.rank;
        pr.cp = std::move(cp);
        record.points.push_back(std::move(pr));
      }
    } catch (const std::exception& e) {
      point_errors[i] = e.what();
    }
    report.base[i] = std::move(record);
  });
  for (const auto& err : point_errors)
    if (!err.empty()) throw problem_error("solve failed: " + err);

  detail::stitch_branches(fam.fibration(), report.base);

  // Catalog oracle comparison.
  if (entry) {
    for (auto& record : report.base) {
      std::vector<Eigen::VectorXd> expected;
      bool excluded = false;
      try {
        expected = entry->oracle_constitutive(record.q);
      } catch (const std::domain_error&) {
        excluded = true;
      }
      std::vector<bool> seen(expected.size(), false);
      for (auto& pr : record.points) {
        if (excluded) {
          pr.oracle = OracleStatus::excluded;
          continue;
        }
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < expected.size(); ++i) {
          const double d = (pr.f - expected[i]).norm();
          if (d < best) {
            best = d;
            best_i = i;
          }
        }
        if (best <= problem.tol.oracle_match) {
          pr.oracle = OracleStatus::matched;
          seen[best_i] = true;
        } else {
          pr.oracle = OracleStatus::mismatch;
          report.verdicts.oracle = false;
        }
      }
      if (!excluded && !record.points.empty())
        for (bool s : seen) record.oracle_complete = record.oracle_complete && s;
      if (!record.oracle_complete) report.verdicts.oracle = false;
    }
  }

  // Classification from a spread of samples across base points.
  std::vector<CriticalPoint> class_samples;
  for (std::size_t round = 0; class_samples.size() < 24; ++round) {
    bool any = false;
    for (const auto& record : report.base) {
      if (round < record.points.size()) {
        class_samples.push_back(record.points[round].cp);
        any = true;
        if (class_samples.size() >= 24) break;
      }
    }
    if (!any) break;
  }
  if (!class_samples.empty())
    report.classification =
        classify_family(fam, class_samples, problem.tol.critical, cfg.rng_seed);
  else
    report.classification.evidence = "no critical points found";

  // Verdicts.
  const bool is_lagrangian_class =
      report.classification.family_class == FamilyClass::morse ||
      report.classification.family_class == FamilyClass::regular;
  int max_image = 0;
  for (const auto& record : report.base)
    for (const auto& pr : record.points) {
      const PointCheck& pc = pr.check;
      report.verdicts.identities =
          report.verdicts.identities && pc.kernel_identity && pc.intersection_identity;
      report.verdicts.lagrangian_graph =
          report.verdicts.lagrangian_graph && pc.sbar_lagrangian;
      // Per point: clean iff the Hessian rank equals the codimension of
      // the critical set there; transverse iff the rank is maximal.
      const bool clean_expected =
          pc.rank == (report.n + report.k) - pc.dim_tangent_cr;
      const bool transverse_expected = pc.rank == report.k;
      report.verdicts.equivalences = report.verdicts.equivalences &&
                                     pc.clean == clean_expected &&
                                     pc.transverse == transverse_expected;
      if (is_lagrangian_class)
        report.verdicts.immersion = report.verdicts.immersion &&
                                    pc.dim_kappa_image == report.n &&
                                    pc.isotropy <= problem.tol.isotropy;
      max_image = std::max(max_image, pc.dim_kappa_image);
    }

  if (report.classification.family_class == FamilyClass::degenerate) {
    std::ostringstream note;
    note << "generated set isotropic at samples, dim " << max_image << " < "
         << report.n << " = dim Q: not Lagrangian";
    report.notes.push_back(note.str());
  }
  if (report.classification.family_class == FamilyClass::morse)
    report.notes.push_back("transverse at samples: generated set immersed Lagrangian");
  if (report.classification.family_class == FamilyClass::regular)
    report.notes.push_back("clean at samples: generated set immersed Lagrangian");
  return report;
}

inline json RunReport::to_json() const {
  json j;
  j["schema"] = "genfam-report-v1";
  j["family"] = {{"kind", catalog ? "catalog" : "custom"},
                 {"label", label},
                 {"n", n},
                 {"k", k}};
  if (catalog) j["family"]["id"] = catalog_name;
  j["solve"] = {{"rng_seed", rng_seed}, {"joint", joint}};
  j["classification"] = {
      {"class", to_string(classification.family_class)},
      {"rank", classification.rank},
      {"rank_constant", classification.rank_constant},
      {"evidence", classification.evidence}};
  j["notes"] = notes;
  j["verdicts"] = {{"identities", verdicts.identities},
                   {"lagrangian_graph", verdicts.lagrangian_graph},
                   {"equivalences", verdicts.equivalences},
                   {"immersion", verdicts.immersion},
                   {"oracle", verdicts.oracle},
                   {"exit_code", exit_code()}};
  j["base_points"] = json::array();
  for (const auto& record : base) {
    json b;
    b["q"] = std::vector<double>(record.q.data(),
                                 record.q.data() + record.q.size());
    b["oracle_complete"] = record.oracle_complete;
    b["critical_points"] = json::array();
    for (const auto& pr : record.points) {
      json p;
      p["lambda"] = std::vector<double>(
          pr.cp.lambda.data(), pr.cp.lambda.data() + pr.cp.lambda.size());
      p["f"] = std::vector<double>(pr.f.data(), pr.f.data() + pr.f.size());
      p["residual_norm"] = pr.cp.residual_norm;
      p["branch_id"] = pr.cp.branch_id;
      p["newton_iters"] = pr.cp.newton_iters;
      p["rank"] = pr.rank;
      p["oracle"] = to_string(pr.oracle);
      p["verify"] = {{"dim_tangent_cr", pr.check.dim_tangent_cr},
                     {"dim_kappa_image", pr.check.dim_kappa_image},
                     {"isotropy", pr.check.isotropy},
                     {"sbar_lagrangian", pr.check.sbar_lagrangian},
                     {"dim_intersection", pr.check.dim_intersection},
                     {"dim_sum", pr.check.dim_sum},
                     {"kernel_overlap", pr.check.kernel_overlap},
                     {"kernel_identity", pr.check.kernel_identity},
                     {"intersection_identity", pr.check.intersection_identity},
                     {"clean", pr.check.clean},
                     {"transverse", pr.check.transverse}};
      b["critical_points"].push_back(std::move(p));
    }
    j["base_points"].push_back(std::move(b));
  }
  return j;
}

// Re-reads the verdict flags of a serialized report.
inline Verdicts verdicts_from_json(const json& j) {
  const json& v = j.at("verdicts");
  Verdicts out;
  out.identities = v.at("identities").get<bool>();
  out.lagrangian_graph = v.at("lagrangian_graph").get<bool>();
  out.equivalences = v.at("equivalences").get<bool>();
  out.immersion = v.at("immersion").get<bool>();
  out.oracle = v.at("oracle").get<bool>();
  return out;
}

// One row per (base point, branch): q, lambda, f, residual norm, branch id,
// rank. Floats carry 17 significant digits; the row order is (base point
// index, branch id), bit-stable for a fixed seed.
inline void write_samples(const RunReport& report, std::ostream& os) {
  auto fmt = [](double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
  };
  for (int i = 1; i <= report.n; ++i) os << "q_" << i << '\t';
  for (int i = 1; i <= report.k; ++i) os << "l_" << i << '\t';
  for (int i = 1; i <= report.n; ++i) os << "f_" << i << '\t';
  os << "residual_norm\tbranch_id\trank\n";
  for (const auto& record : report.base) {
    std::vector<const PointRecord*> rows;
    for (const auto& pr : record.points) rows.push_back(&pr);
    std::sort(rows.begin(), rows.end(),
              [](const PointRecord* a, const PointRecord* b) {
                return a->cp.branch_id < b->cp.branch_id;
              });
    for (const PointRecord* pr : rows) {
      for (int i = 0; i < report.n; ++i) os << fmt(pr->cp.q(i)) << '\t';
      for (int i = 0; i < report.k; ++i) os << fmt(pr->cp.lambda(i)) << '\t';
      for (int i = 0; i < report.n; ++i) os << fmt(pr->f(i)) << '\t';
      os << fmt(pr->cp.residual_norm) << '\t' << pr->cp.branch_id << '\t'
         << pr->rank << '\n';
    }
  }
}

}  // namespace genfam
