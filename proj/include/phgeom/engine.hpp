#pragma once

// Command execution: builds a catalog instance from a run configuration,
// runs the requested battery of checks at deterministic sample points and
// assembles a machine-readable report. Shared by the CLI and the test
// suites.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "phgeom/catalog.hpp"
#include "phgeom/report.hpp"

namespace phgeom {

using json = nlohmann::json;

struct RunConfig {
  std::string family;
  json params = json::object();
  int samples = 200;
  std::uint64_t seed = 42;
  double tol = 1e-9;
  std::set<std::string> checks;  // optional name filter (substring match)
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& catalog_families() {
  static const std::vector<std::string> f = {"torus_ph", "torus_phk", "kodaira",
                                             "hopf",     "inoue_splus", "elliptic",
                                             "inoue_s0", "hyperelliptic_pch"};
  return f;
}

namespace detail_engine {

inline cplx parse_complex(const json& j, const std::string& path) {
  if (j.is_number()) return cplx(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return cplx(j[0].get<double>(), j[1].get<double>());
  throw ConfigError("expected a number or [re, im] pair at " + path);
}

template <std::size_t R, std::size_t C>
std::array<std::array<long, C>, R> parse_int_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != R) throw ConfigError("expected " + std::to_string(R) +
                                                        " rows at " + path);
  std::array<std::array<long, C>, R> out{};
  for (std::size_t r = 0; r < R; ++r) {
    if (!j[r].is_array() || j[r].size() != C)
      throw ConfigError("expected " + std::to_string(C) + " columns at " + path + "[" +
                        std::to_string(r) + "]");
    for (std::size_t c = 0; c < C; ++c) {
      if (!j[r][c].is_number_integer())
        throw ConfigError("expected an integer at " + path + "[" + std::to_string(r) + "][" +
                          std::to_string(c) + "]");
      out[r][c] = j[r][c].get<long>();
    }
  }
  return out;
}

}  // namespace detail_engine

inline RunConfig parse_config(const json& j) {
  RunConfig cfg;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("family") || !j["family"].is_string())
    throw ConfigError("config requires a string field 'family'");
  cfg.family = j["family"].get<std::string>();
  bool known = cfg.family == "walker";
  for (auto& f : catalog_families()) known = known || f == cfg.family;
  if (!known) {
    std::string valid;
    for (auto& f : catalog_families()) valid += (valid.empty() ? "" : ", ") + f;
    valid += ", walker";
    throw ConfigError("unknown family '" + cfg.family + "'; valid families: " + valid);
  }
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ConfigError("'params' must be an object");
    cfg.params = j["params"];
  }
  if (j.contains("samples")) {
    if (!j["samples"].is_number_integer() || j["samples"].get<long>() < 1)
      throw ConfigError("'samples' must be a positive integer");
    cfg.samples = j["samples"].get<int>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0)
      throw ConfigError("'seed' must be a nonnegative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("tol")) {
    if (!j["tol"].is_number() || j["tol"].get<double>() <= 0.0)
      throw ConfigError("'tol' must be a positive real");
    cfg.tol = j["tol"].get<double>();
  }
  if (j.contains("checks")) {
    if (!j["checks"].is_array()) throw ConfigError("'checks' must be an array of names");
    for (auto& c : j["checks"]) cfg.checks.insert(c.get<std::string>());
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(j);
}

// ---------------------------------------------------------------------------
// instance construction from a validated config

inline ModelInstance build_instance(const RunConfig& cfg) {
  using detail_engine::parse_complex;
  const json& P = cfg.params;
  auto str_or = [&](const char* key, const std::string& dflt) {
    return P.contains(key) ? P.at(key).get<std::string>() : dflt;
  };
  if (cfg.family == "torus_ph") {
    TorusParams p;
    if (P.contains("lattice")) {
      const json& L = P["lattice"];
      if (!L.is_array() || L.size() != 4)
        throw ConfigError("torus lattice must list 4 generators");
      for (int k = 0; k < 4; ++k) {
        if (!L[k].is_array() || L[k].size() != 2)
          throw ConfigError("each lattice generator is a pair of complex numbers");
        p.lattice[k][0] = parse_complex(L[k][0], "lattice");
        p.lattice[k][1] = parse_complex(L[k][1], "lattice");
      }
    }
    p.phi = str_or("phi", p.phi);
    return build_torus_ph(p);
  }
  if (cfg.family == "torus_phk") {
    TorusPhkParams p;
    p.alpha = str_or("alpha", p.alpha);
    p.beta = str_or("beta", p.beta);
    p.gamma = str_or("gamma", p.gamma);
    if (P.contains("lambda")) p.lambda = parse_complex(P["lambda"], "lambda");
    if (P.contains("mu")) p.mu = parse_complex(P["mu"], "mu");
    return build_torus_phk(p);
  }
  if (cfg.family == "kodaira") {
    KodairaParams p;
    if (P.contains("a3")) p.a3 = parse_complex(P["a3"], "a3");
    if (P.contains("a4")) p.a4 = parse_complex(P["a4"], "a4");
    if (P.contains("b1")) p.b1 = parse_complex(P["b1"], "b1");
    if (P.contains("b2")) p.b2 = parse_complex(P["b2"], "b2");
    if (P.contains("b3")) p.b3 = parse_complex(P["b3"], "b3");
    if (P.contains("b4")) p.b4 = parse_complex(P["b4"], "b4");
    p.phi = str_or("phi", p.phi);
    p.mode = str_or("mode", p.mode);
    if (P.contains("gamma")) p.gamma = parse_complex(P["gamma"], "gamma");
    p.f = str_or("f", p.f);
    return build_kodaira(p);
  }
  if (cfg.family == "hopf") {
    HopfParams p;
    if (P.contains("a")) p.a = parse_complex(P["a"], "a");
    p.phi = str_or("phi", "");
    return build_hopf(p);
  }
  if (cfg.family == "inoue_splus") {
    InoueSPlusParams p;
    if (P.contains("N")) p.N = detail_engine::parse_int_matrix<2, 2>(P["N"], "N");
    if (P.contains("p")) p.p = P["p"].get<long>();
    if (P.contains("q")) p.q = P["q"].get<long>();
    if (P.contains("r")) p.r = P["r"].get<long>();
    if (P.contains("t")) p.t = parse_complex(P["t"], "t");
    p.phi = str_or("phi", "");
    return build_inoue_splus(p);
  }
  if (cfg.family == "elliptic") {
    EllipticParams p;
    if (P.contains("gens")) {
      p.gens.clear();
      for (auto& g : P["gens"]) {
        EllipticGenerator eg;
        if (g.contains("lambda")) eg.lambda = g["lambda"].get<double>();
        if (g.contains("M")) {
          auto M = detail_engine::parse_int_matrix<2, 2>(g["M"], "gens.M");
          for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) eg.M[r][c] = static_cast<double>(M[r][c]);
        }
        p.gens.push_back(eg);
      }
    }
    p.phi = str_or("phi", "");
    return build_elliptic(p);
  }
  if (cfg.family == "inoue_s0") {
    InoueS0Params p;
    if (P.contains("A")) p.A = detail_engine::parse_int_matrix<3, 3>(P["A"], "A");
    return build_inoue_s0(p);
  }
  if (cfg.family == "hyperelliptic_pch") return build_hyperelliptic_pch();
  if (cfg.family == "walker") {
    WalkerParams p;
    p.a = str_or("a", p.a);
    p.b = str_or("b", p.b);
    p.c = str_or("c", p.c);
    return build_walker(p);
  }
  throw ConfigError("unknown family '" + cfg.family + "'");
}

// ---------------------------------------------------------------------------
// check batteries

namespace detail_engine {

inline void push_phe_checks(std::vector<CheckResult>& out, const FormTriple& t,
                            const std::vector<std::array<double, 4>>& pts, double tol) {
  PheReport r = verify_phe(t, pts);
  out.push_back(CheckResult::make("phe.squares.o1_o2", r.squares12, tol, r.worst_point));
  out.push_back(CheckResult::make("phe.squares.o2_o3", r.squares23, tol, r.worst_point));
  out.push_back(CheckResult::make("phe.wedge.o1_o2", r.wedge12, tol, r.worst_point));
  out.push_back(CheckResult::make("phe.wedge.o1_o3", r.wedge13, tol, r.worst_point));
  out.push_back(CheckResult::make("phe.wedge.o2_o3", r.wedge23, tol, r.worst_point));
  out.push_back(CheckResult::make("phe.lee.o1", r.lee1, tol, r.worst_point));
  out.push_back(CheckResult::make("phe.lee.o2", r.lee2, tol, r.worst_point));
  out.push_back(CheckResult::make("phe.lee.o3", r.lee3, tol, r.worst_point));
  out.push_back(
      CheckResult::make_lower_bound("phe.nondegeneracy_margin", r.nondegeneracy, 1e-6));
}

inline void push_structure_checks(std::vector<CheckResult>& out, const ModelInstance& m,
                                  const std::vector<std::array<double, 4>>& pts, double tol) {
  const FormTriple& t = *m.forms;
  // Eq. (1) algebra + derived objects of the reconstruction
  double alg = 0.0, rt = 0.0, t20 = 0.0;
  std::array<double, 4> walg{}, wrt{}, wt20{};
  for (auto& p : pts) {
    PointStructure ps = reconstruct_at(t, p, 1e-5);
    double a = algebra_residual(ps.G, ps.I, ps.S, ps.T).max();
    if (a > alg) { alg = a; walg = p; }
    // fundamental forms of the reconstructed structure reproduce the inputs
    FormValue o1 = evaluate(t.omega1, p.data(), {});
    FormValue o2 = evaluate(t.omega2, p.data(), {});
    FormValue o3 = evaluate(t.omega3, p.data(), {});
    double s = std::max(1.0, o2.max_abs());
    Mat4 f1 = mat_mul(mat_transpose(ps.I), ps.G);
    Mat4 f2 = mat_mul(mat_transpose(ps.S), ps.G);
    Mat4 f3 = mat_mul(mat_transpose(ps.T), ps.G);
    double rr = std::max({mat_max_abs(mat_sub(f1, form_matrix(o1))),
                          mat_max_abs(mat_sub(f2, form_matrix(o2))),
                          mat_max_abs(mat_sub(f3, form_matrix(o3)))}) / s;
    if (rr > rt) { rt = rr; wrt = p; }
    double tt = type20_residual(t, ps.I, p) / s;
    if (tt > t20) { t20 = tt; wt20 = p; }
  }
  out.push_back(CheckResult::make("algebra.eq1", alg, std::max(tol, 1e-10), walg));
  out.push_back(CheckResult::make("roundtrip.fundamental_forms", rt, tol, wrt));
  out.push_back(CheckResult::make("type20.omega", t20, tol, wt20));
}

inline void push_lee_checks(std::vector<CheckResult>& out, const ModelInstance& m,
                            const std::vector<std::array<double, 4>>& pts, double tol,
                            int max_points) {
  const FormTriple& t = *m.forms;
  // pointwise Lee solve against the catalog theta
  double solve_res = 0.0;
  std::array<double, 4> wsolve{};
  for (auto& p : pts) {
    Vec4 th = lee_form_solve_at(t.omega2, p);
    FormValue expect = evaluate(t.theta, p.data(), {});
    for (int k = 0; k < 4; ++k) {
      double r = std::abs(th[k] - expect.c[1 << k]);
      if (r > solve_res) { solve_res = r; wsolve = p; }
    }
  }
  out.push_back(CheckResult::make("lee.solve_matches_theta", solve_res, tol, wsolve));

  // three codifferential routes agree with the solve (subsampled: the
  // FD-based codifferential is the slow path)
  std::vector<std::array<double, 4>> sub(pts.begin(),
                                         pts.begin() + std::min<std::size_t>(pts.size(),
                                                                             max_points));
  IntegrabilityReport rep = integrability_report(t, sub);
  out.push_back(CheckResult::make("lee.routes_agree", rep.lee_equality, std::max(tol, 1e-8)));
  out.push_back(CheckResult::make("nijenhuis.I", rep.nijenhuis_I, std::max(tol, 1e-8)));
  out.push_back(CheckResult::make("nijenhuis.S", rep.nijenhuis_S, std::max(tol, 1e-8)));
  out.push_back(CheckResult::make("nijenhuis.T", rep.nijenhuis_T, std::max(tol, 1e-8)));
}

inline void push_ddc_check(std::vector<CheckResult>& out, const ModelInstance& m,
                           const std::vector<std::array<double, 4>>& pts, double tol) {
  const FormTriple& t = *m.forms;
  DifferentialForm ddc = ddc_operator(t.theta, *m.ambient_I);
  double worst = 0.0;
  std::array<double, 4> wp{};
  for (auto& p : pts) {
    double r = evaluate(ddc, p.data(), {}).max_abs();
    if (r > worst) { worst = r; wp = p; }
  }
  out.push_back(CheckResult::make("ddc_theta", worst, tol, wp));
}

inline void push_invariance_checks(std::vector<CheckResult>& out, const ModelInstance& m,
                                   const std::vector<std::array<double, 4>>& pts, double tol) {
  for (auto& gen : m.generators) {
    InvarianceOutcome o = invariance_check_generator(m, gen, pts);
    out.push_back(
        CheckResult::make("invariance." + gen.name, o.max_residual, tol, o.worst_point));
  }
}

inline void push_walker_checks(std::vector<CheckResult>& out, const ModelInstance& m,
                               const std::vector<std::array<double, 4>>& pts, double tol) {
  const MetricField& g = *m.metric;
  const ChartPtr chart = m.chart;
  VectorField X = VectorField::basis(0, chart);
  VectorField Y = VectorField::basis(1, chart);
  auto rep = is_parallel_null(g, X, pts, &Y);
  out.push_back(CheckResult::make("walker.parallel", rep.max_nabla, tol));
  out.push_back(CheckResult::make("walker.null", rep.max_norm, tol));
  out.push_back(
      CheckResult::make_lower_bound("walker.independent", rep.min_independence, 1e-6));

  Connection conn = christoffel(g);
  double gam_uv = 0.0, ricci = 0.0, jres = 0.0, nabj = 0.0;
  std::array<double, 4> wj{}, wr{};
  ProperJInput in{g, X, Y};
  auto J = proper_complex_structure(in);
  int count = 0;
  for (auto& p : pts) {
    auto Gm = conn.christoffel_at(p.data());
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        gam_uv = std::max({gam_uv, std::abs(Gm[2][i][j]), std::abs(Gm[3][i][j])});
    auto cv = curvature_at(conn, p.data());
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (std::abs(cv.ricci[i][j]) > ricci) { ricci = std::abs(cv.ricci[i][j]); wr = p; }
    Mat4 Jm = J(p);
    Mat4 G = g(p.data(), {});
    double r = mat_max_abs(mat_add(mat_mul(Jm, Jm), mat_identity()));
    r = std::max(r, mat_max_abs(mat_sub(mat_mul(mat_transpose(Jm), mat_mul(G, Jm)), G)));
    Vec4 JX = mat_vec(Jm, Vec4{1.0, 0.0, 0.0, 0.0});
    r = std::max({r, std::abs(JX[0]), std::abs(JX[1] - 1.0), std::abs(JX[2]),
                  std::abs(JX[3])});
    if (r > jres) { jres = r; wj = p; }
    if (count++ % 4 == 0) {  // nabla J via FD is the slow path; subsample
      auto nab = covariant_derivative_endo_at(conn, J, p);
      for (auto& mres : nab) nabj = std::max(nabj, mat_max_abs(mres));
    }
  }
  out.push_back(CheckResult::make("walker.gamma_uv_vanish", gam_uv, tol));
  out.push_back(CheckResult::make("walker.properJ", jres, std::max(tol, 1e-8), wj));
  out.push_back(CheckResult::make("walker.nablaJ", nabj, std::max(tol, 1e-8)));
  out.push_back(CheckResult::make("walker.ricci_flat", ricci, std::max(tol, 1e-8), wr));
}

inline void push_triple_checks(std::vector<CheckResult>& out, const ModelInstance& m,
                               const std::vector<std::array<double, 4>>& pts, double tol) {
  const PHTriple& t = *m.triple;
  double nij = std::max({nijenhuis(t.I).max_residual(pts), nijenhuis(t.S).max_residual(pts),
                         nijenhuis(t.T).max_residual(pts)});
  out.push_back(CheckResult::make("nijenhuis.IST", nij, std::max(tol, 1e-8)));
  double alg = 0.0;
  for (auto& p : pts) {
    Mat4 I = t.I(p.data(), {}), S = t.S(p.data(), {}), T = t.T(p.data(), {});
    Mat4 id = mat_identity();
    alg = std::max({alg, mat_max_abs(mat_add(mat_mul(I, I), id)),
                    mat_max_abs(mat_sub(mat_mul(S, S), id)),
                    mat_max_abs(mat_sub(mat_mul(T, T), id)),
                    mat_max_abs(mat_sub(T, mat_mul(I, S))),
                    mat_max_abs(mat_add(mat_mul(I, S), mat_mul(S, I)))});
  }
  out.push_back(CheckResult::make("algebra.triple", alg, std::max(tol, 1e-10)));
}

}  // namespace detail_engine

// classification consistent with check outcomes
inline std::string classification_string(const ModelInstance& m,
                                         const std::vector<std::array<double, 4>>& pts,
                                         double tol) {
  if (m.family == "walker") return "WalkerMetric";
  if (m.triple && !m.forms) {
    double nij = std::max({nijenhuis(m.triple->I).max_residual(pts),
                           nijenhuis(m.triple->S).max_residual(pts),
                           nijenhuis(m.triple->T).max_residual(pts)});
    return nij < std::max(tol, 1e-8) ? "ParaHypercomplex" : "AlmostOnly";
  }
  if (m.forms_are_carrier_only) return "FramesOnly";
  if (m.forms) return to_string(classify(*m.forms, pts, tol));
  return "Invalid";
}

struct ExecuteOutcome {
  Report report;
  bool ok = false;  // all executed checks passed
};

inline ExecuteOutcome execute(const RunConfig& cfg, const std::string& command) {
  ExecuteOutcome out;
  Report& rep = out.report;
  rep.family = cfg.family;
  rep.params_echo = cfg.params.dump();

  if (command == "list-families") {
    for (auto& f : catalog_families()) rep.notes.push_back(f);
    rep.classification = "n/a";
    out.ok = true;
    return out;
  }

  ModelInstance m = build_instance(cfg);
  for (auto& n : m.notes) rep.notes.push_back(n);
  auto pts = m.sample_points(cfg.seed, cfg.samples);
  const double tol = cfg.tol;
  std::vector<CheckResult> checks;

  if (command == "verify") {
    if (m.forms && !m.forms_are_carrier_only) {
      detail_engine::push_phe_checks(checks, *m.forms, pts, tol);
      detail_engine::push_structure_checks(checks, m, pts, tol);
      detail_engine::push_lee_checks(checks, m, pts, tol, 24);
      detail_engine::push_ddc_check(checks, m, pts, tol);
    }
    if (m.triple) detail_engine::push_triple_checks(checks, m, pts, tol);
    if (m.metric) detail_engine::push_walker_checks(checks, m, pts, tol);
    for (auto& ec : m.extra_checks) checks.push_back(ec(pts, tol));
    detail_engine::push_invariance_checks(checks, m, pts, tol);
  } else if (command == "classify") {
    // classification only; the consistency of the label with the checks is
    // what verify asserts
  } else if (command == "curvature") {
    if (!m.metric && m.forms && !m.forms_are_carrier_only) {
      // curvature of the reconstructed metric: report max |Ricci|
      MetricField g = reconstructed_metric_field(*m.forms);
      Connection conn = christoffel(g);
      double worst = 0.0;
      std::array<double, 4> wp{};
      for (auto& p : pts) {
        auto cv = curvature_at(conn, p.data());
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j)
            if (std::abs(cv.ricci[i][j]) > worst) { worst = std::abs(cv.ricci[i][j]); wp = p; }
      }
      checks.push_back(CheckResult::make("ricci_max", worst, 1e300, wp));
      checks.back().pass = true;  // informational unless the family claims flatness
    } else if (m.metric) {
      detail_engine::push_walker_checks(checks, m, pts, tol);
    } else {
      throw ConfigError("curvature command needs a metric-backed family");
    }
  } else if (command == "invariance") {
    detail_engine::push_invariance_checks(checks, m, pts, tol);
  } else if (command == "ansatz-scan") {
    if (cfg.family != "inoue_s0")
      throw ConfigError("ansatz-scan applies to the inoue_s0 family only");
    AnsatzParams ap;
    if (cfg.params.contains("A"))
      ap.s0.A = detail_engine::parse_int_matrix<3, 3>(cfg.params["A"], "A");
    if (cfg.params.contains("p")) ap.p = cfg.params["p"].get<std::string>();
    if (cfg.params.contains("q")) ap.q = cfg.params["q"].get<std::string>();
    if (cfg.params.contains("r")) ap.r = cfg.params["r"].get<std::string>();
    if (cfg.params.contains("s")) ap.s = cfg.params["s"].get<std::string>();
    AnsatzReport ar = s0_ansatz_check(ap, pts);
    checks.push_back(
        CheckResult::make("ansatz.phe_residual", ar.phe_residual, 1e300, ar.worst_point));
    checks.back().pass = true;  // reported, not thresholded: the scan reports residuals
    checks.push_back(CheckResult::make_lower_bound("ansatz.invariance_defect",
                                                   ar.invariance_defect, 0.1));
    checks.push_back(CheckResult::make_lower_bound("ansatz.dist_b_piZ", ar.dist_b_pi, 0.1));
    checks.push_back(CheckResult::make_lower_bound("ansatz.grid_min_residual",
                                                   ar.grid_min_residual, 0.1));
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }

  // optional subset filter
  if (!cfg.checks.empty()) {
    std::vector<CheckResult> kept;
    for (auto& c : checks) {
      bool match = false;
      for (auto& want : cfg.checks)
        if (c.name.find(want) != std::string::npos) match = true;
      if (match) kept.push_back(c);
    }
    checks = std::move(kept);
  }
  rep.checks = std::move(checks);
  rep.classification = classification_string(m, pts, tol);
  out.ok = rep.all_pass();
  return out;
}

inline void write_report(const Report& r, const std::string& path) {
  std::ofstream outf(path, std::ios::binary);
  if (!outf) throw std::runtime_error("cannot write report to '" + path + "'");
  outf << to_json(r) << "\n";
}

}  // namespace phgeom
