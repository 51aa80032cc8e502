#include "sg/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "sg/conformal.hpp"
#include "sg/einstein.hpp"
#include "sg/heisenberg.hpp"
#include "sg/linalg.hpp"
#include "sg/nodal.hpp"
#include "sg/prescription.hpp"

namespace sg::cli {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

std::string timestamp_utc() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

json base_doc(const std::string& command) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["generated_at"] = timestamp_utc();
  doc["command"] = command;
  return doc;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  os << content;
}

void emit(const json& doc, const std::string& out) {
  std::string text = doc.dump(2) + "\n";
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_file(out, text);
}

OperatorKind parse_operator(const std::string& name) {
  if (name == "laplacian") return OperatorKind::kLaplacian;
  if (name == "yamabe") return OperatorKind::kYamabe;
  if (name == "paneitz") return OperatorKind::kPaneitz;
  throw CLI::ValidationError("--operator",
                             "must be one of laplacian|yamabe|paneitz");
}

json line_to_json(const SpectralLine& l) {
  json j;
  j["eigenvalue"] = l.eigenvalue;
  j["multiplicity"] = l.multiplicity;
  if (l.is_character) {
    j["label"] = {{"type", "character"},
                  {"xi", l.character.xi},
                  {"nu", l.character.nu}};
  } else {
    j["label"] = {{"type", "hermite"},
                  {"n", l.hermite.n},
                  {"alpha_norm", l.hermite.alpha_norm}};
  }
  return j;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  // least squares slope of log y vs log x
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (ys[i] <= 0) continue;
    double lx = std::log(xs[i]), ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) return std::nan("");
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// ---------------------------------------------------------------- heisenberg

int cmd_heisenberg_spectrum(const std::string& config_note, int d,
                            std::vector<int> r, double s,
                            const std::string& op_name, double max_eig,
                            const std::string& out, const std::string& csv,
                            const std::string& nodal_csv) {
  HeisenbergModel model = HeisenbergModel::create(d, r, s);
  OperatorKind op = parse_operator(op_name);
  json doc = base_doc("heisenberg-spectrum");
  if (!config_note.empty()) doc["config"] = config_note;
  doc["params"] = {{"d", d}, {"r", r}, {"s", s},
                   {"operator", op_name}, {"max_eigenvalue", max_eig}};
  json warnings = json::array();
  if (op == OperatorKind::kPaneitz && d == 1) {
    PaneitzConstants pc = paneitz_constants(1);
    warnings.push_back(
        "d=1: discriminant delta0 = c1^2 - 4 c0 = " + std::to_string(pc.delta0) +
        " is negative; the quadratic sign window for negative-eigenvalue "
        "counting degenerates (spectrum itself is still valid)");
  }
  std::vector<SpectralLine> lines = closed_form_spectrum(model, op, max_eig);
  json jl = json::array();
  for (const auto& l : lines) jl.push_back(line_to_json(l));
  doc["lines"] = jl;
  doc["warnings"] = warnings;
  emit(doc, out);

  if (!csv.empty()) {
    std::ostringstream os;
    os.precision(17);
    os << "eigenvalue,multiplicity,type,n_or_xi0,alpha_or_nu0\n";
    for (const auto& l : lines) {
      os << l.eigenvalue << "," << l.multiplicity << ","
         << (l.is_character ? "character" : "hermite") << ",";
      if (l.is_character)
        os << l.character.xi[0] << "," << l.character.nu[0];
      else
        os << l.hermite.n << "," << l.hermite.alpha_norm;
      os << "\n";
    }
    write_file(csv, os.str());
  }
  if (!nodal_csv.empty()) {
    // ground-family nodal sheets sampled as a point cloud (b = 0, sign +)
    double s_null = yamabe_null_parameter(d, 1, 0);
    HeisenbergModel at_null = HeisenbergModel::create(d, r, s_null);
    std::vector<double> b(d, 0.0);
    auto sheets = nodal_set_hermite_ground(at_null, b, +1);
    HermitePointLabel lab;
    lab.n = 1;
    lab.a.assign(d, 0.0);
    lab.b = b;
    lab.alpha.assign(d, 0);
    std::ostringstream os;
    os.precision(17);
    os << "x,y,t,value\n";
    const int samples = 16;
    for (const auto& sheet : sheets) {
      for (double yv : sheet.y_values) {
        for (int it = 0; it < samples; ++it) {
          HeisenbergPoint p;
          p.x.assign(d, 0.25);
          p.y.assign(d, 0.25);
          p.x[sheet.axis] = sheet.x_value;
          p.y[sheet.axis] = yv;
          p.t = static_cast<double>(it) / samples;
          double val = std::abs(eigenfunction_value(at_null, lab, p));
          os << p.x[sheet.axis] << "," << p.y[sheet.axis] << "," << p.t << ","
             << val << "\n";
        }
      }
    }
    write_file(nodal_csv, os.str());
  }
  return 0;
}

// ------------------------------------------------------------------ nu sweep

int cmd_nu_sweep(int d, std::vector<int> r, const std::string& op_name,
                 double s_min, double s_max, int points, bool log_scale,
                 int jobs, const std::string& out, const std::string& csv) {
  HeisenbergModel::create(d, r, std::max(s_min, 1e-9));  // validates d, r
  OperatorKind op = parse_operator(op_name);
  if (op == OperatorKind::kLaplacian)
    throw CLI::ValidationError("--operator", "nu-sweep needs yamabe or paneitz");
  if (op == OperatorKind::kPaneitz && d < 2)
    throw CLI::ValidationError("--operator",
                               "paneitz counting requires d >= 2");
  if (points < 1) throw CLI::ValidationError("--points", "need >= 1");

  std::vector<double> ss(points);
  for (int i = 0; i < points; ++i) {
    if (points == 1)
      ss[i] = s_min;
    else if (log_scale)
      ss[i] = s_min * std::pow(s_max / s_min, static_cast<double>(i) / (points - 1));
    else
      ss[i] = s_min + (s_max - s_min) * static_cast<double>(i) / (points - 1);
  }
  std::vector<std::int64_t> nus(points);
  auto work = [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      HeisenbergModel m = HeisenbergModel::create(d, r, ss[i]);
      nus[i] = (op == OperatorKind::kYamabe ? count_negative_yamabe(m, 0)
                                            : count_negative_paneitz(m, 0))
                   .nu;
    }
  };
  jobs = std::max(1, jobs);
  if (jobs == 1) {
    work(0, points);
  } else {
    std::vector<std::thread> pool;
    int chunk = (points + jobs - 1) / jobs;
    for (int t = 0; t < jobs; ++t) {
      int lo = t * chunk, hi = std::min(points, lo + chunk);
      if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  std::int64_t vol = HeisenbergModel::create(d, r, 1.0).volume();
  json doc = base_doc("nu-sweep");
  doc["params"] = {{"d", d}, {"r", r}, {"operator", op_name},
                   {"s_min", s_min}, {"s_max", s_max}, {"points", points},
                   {"scale", log_scale ? "log" : "linear"}};
  json pts = json::array();
  std::vector<double> nus_d(points);
  for (int i = 0; i < points; ++i) {
    nus_d[i] = static_cast<double>(nus[i]);
    pts.push_back({{"s", ss[i]}, {"nu", nus[i]}, {"volume", vol}});
  }
  doc["points"] = pts;
  if (points >= 2) {
    doc["slope_full"] = fit_slope(ss, nus_d);
    int tail = std::max(2, points / 2);
    std::vector<double> ts(ss.end() - tail, ss.end());
    std::vector<double> tn(nus_d.end() - tail, nus_d.end());
    doc["slope_tail"] = fit_slope(ts, tn);
  }
  emit(doc, out);
  if (!csv.empty()) {
    std::ostringstream os;
    os.precision(17);
    os << "s,nu,volume\n";
    for (int i = 0; i < points; ++i)
      os << ss[i] << "," << nus[i] << "," << vol << "\n";
    write_file(csv, os.str());
  }
  return 0;
}

// --------------------------------------------------------- conformal verify

int cmd_conformal_verify(int n, int N, int factors, std::uint64_t seed,
                         double amplitude, bool refine, bool inject_bug,
                         const std::string& out, const std::string& nodal_out) {
  TorusGrid grid = TorusGrid::create(n, N);
  json doc = base_doc("conformal-verify");
  doc["params"] = {{"n", n}, {"N", N}, {"factors", factors},
                   {"seed", seed}, {"amplitude", amplitude}};
  json checks = json::array();
  bool all_pass = true;
  auto record = [&](const std::string& name, bool pass, json details) {
    details["name"] = name;
    details["pass"] = pass;
    checks.push_back(details);
    if (!pass) all_pass = false;
  };

  // family of conjugated operators: exact covariance by construction
  std::vector<ConformalFactor> family;
  for (int k = 0; k < factors; ++k)
    family.push_back(bandlimited_factor(grid, seed + k, amplitude));

  std::vector<Inertia> inert;
  for (const auto& ups : family)
    inert.push_back(inertia_count(yamabe_conjugated(ups, grid, n), 0.0));
  bool nu_same = true, ker_same = true;
  for (const auto& io : inert) {
    nu_same = nu_same && io.n_neg == inert[0].n_neg;
    ker_same = ker_same && io.n_zero == inert[0].n_zero;
  }
  record("nu_conjugated_identical", nu_same,
         {{"nu", inert[0].n_neg}, {"dim_ker", inert[0].n_zero}});
  record("dim_ker_identical", ker_same, {{"dim_ker", inert[0].n_zero}});

  auto sign_of = [](const Inertia& io) {
    return io.n_neg > 0 ? -1 : (io.n_zero > 0 ? 0 : 1);
  };
  bool sign_same = true;
  for (const auto& io : inert) sign_same = sign_same && sign_of(io) == sign_of(inert[0]);
  record("sign_lambda1_identical", sign_same, {{"sign", sign_of(inert[0])}});

  // direct-operator count must agree (discretization caveat: the inertia
  // tolerance absorbs eigenvalues within tau0 of zero)
  bool dir_same = true;
  json dir_counts = json::array();
  for (const auto& ups : family) {
    DiscreteConformalMetric metric{grid, ups};
    Inertia io = inertia_count(yamabe_direct(metric), 0.0);
    dir_counts.push_back(io.n_neg);
    dir_same = dir_same && io.n_neg == inert[0].n_neg;
  }
  record("nu_direct_matches", dir_same, {{"counts", dir_counts}});

  // lp invariant with a fixed seeded test density
  ConformalFactor probe = bandlimited_factor(grid, seed + 991, 1.0);
  std::vector<double> u0 = probe.values;
  double lp_ref = 0.0;
  bool lp_ok = true;
  json lps = json::array();
  for (std::size_t k = 0; k < family.size(); ++k) {
    const ConformalFactor& ups = family[k];
    double v;
    if (inject_bug && k == family.size() - 1) {
      // negative control: one flipped volume weight must break constancy
      double hn = 1.0;
      for (int a = 0; a < n; ++a) hn *= grid.h();
      v = 0.0;
      for (std::int64_t i = 0; i < grid.size(); ++i) {
        double ui = std::exp(0.5 * (2.0 - n) * ups.values[i]) * u0[i];
        double w = std::exp(n * ups.values[i]) * hn * (i == 0 ? -1.0 : 1.0);
        v += std::pow(std::abs(ui), 2.0 * n / (n - 2.0)) * w;
      }
    } else {
      v = lp_invariant(u0, ups, grid, n, 1);
    }
    lps.push_back(v);
    if (k == 0)
      lp_ref = v;
    else
      lp_ok = lp_ok && std::abs(v - lp_ref) <= 1e-10 * std::abs(lp_ref);
  }
  record("lp_invariant_constant", lp_ok, {{"values", lps}});

  // nodal sign patterns of transformed kernel vectors: the conjugated kernel
  // of the first factor, pushed through the density transform
  SymmetricOperator c0 = yamabe_conjugated(family[0], grid, n);
  KernelBasis kb = kernel_basis(c0, c0.zero_tolerance(), 3, seed);
  bool signs_ok = !kb.vectors.empty();
  if (signs_ok) {
    const auto& u = kb.vectors[0];
    for (const auto& ups : family) {
      std::vector<double> v = density_transform(u, ups, 0.5 * (n - 2));
      for (std::size_t i = 0; i < u.size(); ++i) {
        if ((u[i] > 0) != (v[i] > 0) || (u[i] < 0) != (v[i] < 0)) {
          signs_ok = false;
          break;
        }
      }
    }
  }
  record("nodal_sign_patterns_equal", signs_ok, {{"kernel_dim", kb.vectors.size()}});

  if (nodal_out.size() && !kb.vectors.empty()) {
    // level/nodal structure of a fixed eigenvector as a point cloud
    GridView view = torus_view(grid);
    LanczosOptions lo;
    lo.seed = seed;
    EigenResult er = lanczos_lowest(c0, 2, 1e-8 * (1 + c0.norm1()), lo);
    if (er.eigenvectors.size() >= 2) {
      NodalDecomposition dec = nodal_domains(view, er.eigenvectors[1]);
      write_file(nodal_out,
                 nodal_point_cloud_csv(
                     view, [&](std::int64_t i) { return grid.coords(i); },
                     er.eigenvectors[1], dec));
    }
  }

  if (refine) {
    TorusGrid fine = TorusGrid::create(n, 2 * N);
    double r_coarse = covariance_residual(family[0], grid, n, 5, seed + 500);
    ConformalFactor ups_fine = bandlimited_factor(fine, seed, amplitude);
    double r_fine = covariance_residual(ups_fine, fine, n, 5, seed + 500);
    double ratio = r_coarse / r_fine;
    record("covariance_order", ratio >= 2.5 && ratio <= 6.0,
           {{"residual_coarse", r_coarse},
            {"residual_fine", r_fine},
            {"ratio", ratio}});
  }

  doc["checks"] = checks;
  doc["pass"] = all_pass;
  emit(doc, out);
  if (!all_pass) {
    for (const auto& c : checks)
      if (!c["pass"].get<bool>())
        std::cerr << "invariant violated: " << c["name"].get<std::string>()
                  << "\n";
  }
  return all_pass ? 0 : 1;
}

// ------------------------------------------------------------- prescription

int cmd_prescription(int n, int N, std::uint64_t seed, double amplitude,
                     const std::string& kernel_source,
                     const std::string& candidate, const std::string& out) {
  TorusGrid grid = TorusGrid::create(n, N);
  json doc = base_doc("prescription");
  doc["params"] = {{"n", n}, {"N", N}, {"seed", seed},
                   {"amplitude", amplitude}, {"kernel_source", kernel_source},
                   {"candidate", candidate}};

  ConformalFactor ups0 = bandlimited_factor(grid, seed, amplitude);
  std::vector<double> kernel_vec;
  SymmetricOperator op = yamabe_conjugated(ups0, grid, n);
  if (kernel_source == "tuned") {
    // bisection along c * ups0 on the direct operator; on a conformally flat
    // torus the spectrum stays nonnegative, so this reports the failure
    try {
      TuneResult t = tune_to_kernel(grid, n, ups0, 2, 0.0, 16.0, seed);
      doc["tuned_c"] = t.c_star;
    } catch (const std::exception& e) {
      doc["error"] = std::string("tuning failed: ") + e.what();
      emit(doc, out);
      std::cerr << "tuning failed: " << e.what() << "\n";
      return 1;
    }
  } else if (kernel_source == "flat") {
    op = yamabe_conjugated(constant_factor(grid, 0.0), grid, n);
  } else if (kernel_source != "conjugated") {
    throw CLI::ValidationError("--kernel-source",
                               "must be tuned|conjugated|flat");
  }
  KernelBasis kb = kernel_basis(op, op.zero_tolerance(), 4, seed);
  if (kb.vectors.empty()) {
    doc["error"] = "kernel empty";
    emit(doc, out);
    return 1;
  }
  kernel_vec = kb.vectors[0];

  std::vector<double> s_u;
  if (candidate == "self") {
    s_u = kernel_vec;
  } else if (candidate == "cubed") {
    ConformalFactor f = bandlimited_factor(grid, seed + 5, amplitude);
    s_u.resize(kernel_vec.size());
    for (std::size_t i = 0; i < s_u.size(); ++i)
      s_u[i] = std::exp(f.values[i]) * std::pow(kernel_vec[i], 3);
  } else if (candidate == "signflip") {
    s_u = kernel_vec;
    for (std::size_t i = 0; i < s_u.size() / 2; ++i) s_u[i] = -s_u[i];
  } else {
    throw CLI::ValidationError("--candidate", "must be self|cubed|signflip");
  }

  ForbiddenReport fr = forbidden_function_test(kernel_vec, s_u, grid, n);
  doc["forbidden"] = {
      {"verdict",
       fr.verdict == ForbiddenVerdict::kForbidden ? "FORBIDDEN" : "NOT-DECIDED"},
      {"relative_sign", fr.relative_sign},
      {"margin", fr.margin},
      {"probes_used", fr.probes_used},
      {"sign_tolerance", fr.sign_tolerance},
      {"probe_integrals", fr.probe_integrals}};

  ConstantQReport cq = constant_q_obstruction(kb);
  doc["constant_q"] = {
      {"verdict", cq.verdict == ConstantQVerdict::kObstructed ? "OBSTRUCTED"
                                                              : "NOT-OBSTRUCTED"},
      {"combinations_tried", cq.combinations_tried},
      {"witness_min", cq.witness_min},
      {"witness_max", cq.witness_max}};

  NowhereVanishingReport nv =
      nowhere_vanishing_kernel_check(kb, op, grid, n, seed);
  doc["nowhere_vanishing"] = {{"found", nv.found},
                              {"q_residual", nv.q_residual},
                              {"note", nv.note}};
  doc["tolerances"] = {{"zero_tolerance", op.zero_tolerance()},
                       {"kernel_dim", kb.vectors.size()}};
  emit(doc, out);
  return 0;
}

// ------------------------------------------------------------------ einstein

int cmd_einstein(int n, int k, double lambda, bool extended,
                 const std::string& surface_file,
                 const std::string& surface_inline, int synthetic,
                 bool sign_table, const std::string& out) {
  json doc = base_doc("einstein");
  doc["params"] = {{"n", n}, {"k", k}, {"lambda", lambda},
                   {"einstein_extended", extended}};

  std::vector<double> surface;
  if (!surface_file.empty()) {
    std::ifstream is(surface_file);
    if (!is) throw CLI::ValidationError("--surface-file", "cannot open file");
    double v;
    while (is >> v) surface.push_back(v);
  } else if (!surface_inline.empty()) {
    std::stringstream ss(surface_inline);
    std::string tok;
    while (std::getline(ss, tok, ',')) surface.push_back(std::stod(tok));
  } else if (synthetic > 0) {
    double top = mu_j(1, n) * 0 + (2.0 * n - 3.0) / (4.0 * (n - 1.0));
    for (int i = 0; i < synthetic; ++i)
      surface.push_back(top * (0.1 + 0.8 * static_cast<double>(i) /
                                         std::max(1, synthetic - 1)));
  }

  if (n % 2 == 0 && 2 * k > n && !extended) {
    std::cerr << "no conformally invariant operator with principal part "
                 "Delta^" << k << " exists in even dimension " << n
              << " (k > n/2); pass --extended for the canonical Einstein "
                 "extension\n";
    return 2;
  }

  // product spectrum of P_k from the surface eigenvalues (Ric = -g models)
  if (!surface.empty()) {
    HyperbolicProductModel model;
    model.n = n;
    model.k = k;
    model.surface_spectrum = surface;
    GjmsNegativeCount cnt = count_negative_gjms_product(model);
    json lines = json::array();
    for (double lam : surface)
      lines.push_back({{"surface_eigenvalue", lam},
                       {"Lambda_k", hyperbolic_product_eigenvalue(lam, k, n)}});
    doc["product_lines"] = lines;
    doc["negative_count"] = cnt.count;
    doc["within_stated_hypotheses"] = cnt.within_stated_hypotheses;
  }

  if (sign_table) {
    json table = json::array();
    double top = (2.0 * n - 3.0) / (4.0 * (n - 1.0));  // mu_{(n-1)/2}
    int kmax = (n + 1) / 2 + 3;
    for (int kk = 1; kk <= kmax; ++kk) {
      int neg = 0, pos = 0, zero = 0;
      for (int i = 1; i <= 100; ++i) {
        double lam = top * i / 101.0;
        double v = hyperbolic_product_eigenvalue(lam, kk, n);
        if (v < 0)
          ++neg;
        else if (v > 0)
          ++pos;
        else
          ++zero;
      }
      table.push_back({{"k", kk}, {"negative", neg}, {"positive", pos},
                       {"zero", zero}});
    }
    doc["sign_table"] = table;
    doc["lambda_window_sup"] = top;
  }

  // plain Einstein product spectrum when a base spectrum is implied: use the
  // constant function (eigenvalue 0) plus the surface values as Delta lines
  EinsteinModel em;
  em.n = n;
  em.lambda = lambda;
  em.einstein_extended = extended;
  em.base_spectrum.push_back({0.0, 1});
  for (double lam : surface) em.base_spectrum.push_back({lam, 1});
  auto spec = gjms_spectrum(em, k);
  json sj = json::array();
  for (const auto& l : spec)
    sj.push_back({{"eigenvalue", l.eigenvalue}, {"multiplicity", l.multiplicity}});
  doc["gjms_spectrum"] = sj;

  emit(doc, out);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"spectral geometry toolkit: closed-form spectra on Heisenberg "
               "nilmanifolds, GJMS products on Einstein models, and grid "
               "verification of conformal invariants"};
  app.set_config("--config", "", "key=value config file with [section] headers");
  app.require_subcommand(1);
  app.fallthrough();

  // heisenberg-spectrum
  auto* hs = app.add_subcommand("heisenberg-spectrum",
                                "closed-form operator spectrum on a "
                                "Heisenberg nilmanifold");
  int hs_d = 1;
  std::vector<int> hs_r{1};
  double hs_s = 0.0, hs_max = 100.0;
  std::string hs_op = "yamabe", hs_out, hs_csv, hs_nodal;
  hs->add_option("--d", hs_d, "dimension parameter d (manifold dim 2d+1)");
  hs->add_option("--r", hs_r, "lattice sequence r_1 ... r_d")->expected(-1);
  hs->add_option("--s", hs_s, "metric parameter s > 0")->required();
  hs->add_option("--operator", hs_op, "laplacian|yamabe|paneitz");
  hs->add_option("--max-eigenvalue", hs_max, "spectrum cutoff");
  hs->add_option("--out", hs_out, "output JSON path (default stdout)");
  hs->add_option("--csv", hs_csv, "optional CSV path");
  hs->add_option("--nodal-csv", hs_nodal,
                 "sample the ground-family nodal sheets at the null parameter");

  // nu-sweep
  auto* ns = app.add_subcommand("nu-sweep",
                                "negative-eigenvalue counts over a sweep of s");
  int ns_d = 1, ns_points = 12, ns_jobs = 1;
  std::vector<int> ns_r{1};
  double ns_smin = 8.0, ns_smax = 64.0;
  std::string ns_op = "yamabe", ns_scale = "log", ns_out, ns_csv;
  ns->add_option("--d", ns_d, "dimension parameter");
  ns->add_option("--r", ns_r, "lattice sequence")->expected(-1);
  ns->add_option("--operator", ns_op, "yamabe|paneitz");
  ns->add_option("--s-min", ns_smin, "sweep start");
  ns->add_option("--s-max", ns_smax, "sweep end");
  ns->add_option("--points", ns_points, "number of sweep points");
  ns->add_option("--scale", ns_scale, "log|linear");
  ns->add_option("--jobs", ns_jobs, "worker threads for sweep points");
  ns->add_option("--out", ns_out, "output JSON path");
  ns->add_option("--csv", ns_csv, "optional CSV path");

  // conformal-verify
  auto* cv = app.add_subcommand("conformal-verify",
                                "conformal-invariance suite on the flat torus");
  int cv_n = 3, cv_N = 16, cv_factors = 5;
  std::uint64_t cv_seed = 1;
  double cv_amp = 0.4;
  bool cv_refine = false, cv_bug = false;
  std::string cv_out, cv_nodal;
  cv->add_option("--n", cv_n, "torus dimension (3 or 4)");
  cv->add_option("--N", cv_N, "grid nodes per axis");
  cv->add_option("--factors", cv_factors, "conformal factors in the family");
  cv->add_option("--seed", cv_seed, "family seed");
  cv->add_option("--amplitude", cv_amp, "sup-norm of each factor");
  cv->add_flag("--refine", cv_refine, "include the covariance order study");
  cv->add_flag("--inject-bug", cv_bug,
               "negative control: perturb one weight and expect failure");
  cv->add_option("--out", cv_out, "output JSON path");
  cv->add_option("--nodal-out", cv_nodal, "optional nodal point-cloud CSV");

  // prescription
  auto* pr = app.add_subcommand("prescription",
                                "curvature-prescription obstruction verdicts");
  int pr_n = 3, pr_N = 16;
  std::uint64_t pr_seed = 1;
  double pr_amp = 0.4;
  std::string pr_src = "tuned", pr_cand = "self", pr_out;
  pr->add_option("--n", pr_n, "torus dimension");
  pr->add_option("--N", pr_N, "grid nodes per axis");
  pr->add_option("--seed", pr_seed, "seed");
  pr->add_option("--amplitude", pr_amp, "factor amplitude");
  pr->add_option("--kernel-source", pr_src, "tuned|conjugated|flat");
  pr->add_option("--candidate", pr_cand, "self|cubed|signflip");
  pr->add_option("--out", pr_out, "output JSON path");

  // einstein
  auto* ei = app.add_subcommand("einstein",
                                "GJMS product spectra and sign tables");
  int ei_n = 9, ei_k = 3, ei_synth = 0;
  double ei_lambda = -0.125;
  bool ei_ext = false, ei_table = false;
  std::string ei_sf, ei_si, ei_out;
  ei->add_option("--n", ei_n, "total dimension");
  ei->add_option("--k", ei_k, "operator order");
  ei->add_option("--lambda", ei_lambda, "Einstein constant (Ric = lambda(n-1)g)");
  ei->add_flag("--extended", ei_ext, "allow k > n/2 on Einstein models");
  ei->add_option("--surface-file", ei_sf, "surface spectrum, one value per line");
  ei->add_option("--surface", ei_si, "inline surface spectrum, comma separated");
  ei->add_option("--synthetic", ei_synth,
                 "synthesize this many surface eigenvalues in (0, mu_{(n-1)/2})");
  ei->add_flag("--sign-table", ei_table, "emit the 100-sample sign table");
  ei->add_option("--out", ei_out, "output JSON path");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (hs->parsed())
      return cmd_heisenberg_spectrum("", hs_d, hs_r, hs_s, hs_op, hs_max, hs_out,
                                     hs_csv, hs_nodal);
    if (ns->parsed())
      return cmd_nu_sweep(ns_d, ns_r, ns_op, ns_smin, ns_smax, ns_points,
                          ns_scale != "linear", ns_jobs, ns_out, ns_csv);
    if (cv->parsed())
      return cmd_conformal_verify(cv_n, cv_N, cv_factors, cv_seed, cv_amp,
                                  cv_refine, cv_bug, cv_out, cv_nodal);
    if (pr->parsed())
      return cmd_prescription(pr_n, pr_N, pr_seed, pr_amp, pr_src, pr_cand,
                              pr_out);
    if (ei->parsed())
      return cmd_einstein(ei_n, ei_k, ei_lambda, ei_ext, ei_sf, ei_si, ei_synth,
                          ei_table, ei_out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace sg::cli
