#include "sg/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace sg {

GridView torus_view(const TorusGrid& grid) {
  GridView v;
  v.size = grid.size();
  v.num_axes = grid.n;
  v.neighbor = [grid](std::int64_t idx, int axis, int delta) {
    return grid.neighbor(idx, axis, delta);
  };
  return v;
}

NodalDecomposition nodal_domains(const GridView& view, std::span<const double> u,
                                 double tol) {
  const std::int64_t M = view.size;
  double umax = 0.0;
  for (double x : u) umax = std::max(umax, std::abs(x));
  if (tol < 0) tol = 1e-9 * umax;
  NodalDecomposition dec;
  dec.tol_used = tol;
  dec.labels.assign(M, 0);
  std::vector<signed char> sgn(M, 0);
  bool any = false;
  for (std::int64_t i = 0; i < M; ++i) {
    if (u[i] > tol) {
      sgn[i] = 1;
      any = true;
    } else if (u[i] < -tol) {
      sgn[i] = -1;
      any = true;
    }
  }
  if (!any) throw std::runtime_error("nodal_domains: function numerically zero");

  // BFS flood fill in index order: component labels follow smallest node index
  std::deque<std::int64_t> queue;
  for (std::int64_t i = 0; i < M; ++i) {
    if (sgn[i] == 0 || dec.labels[i] != 0) continue;
    int lab = ++dec.count;
    dec.domain_sign.push_back(sgn[i]);
    dec.labels[i] = lab;
    queue.clear();
    queue.push_back(i);
    while (!queue.empty()) {
      std::int64_t p = queue.front();
      queue.pop_front();
      for (int a = 0; a < view.num_axes; ++a) {
        for (int delta : {+1, -1}) {
          std::int64_t q = view.neighbor(p, a, delta);
          if (sgn[q] == sgn[p] && dec.labels[q] == 0) {
            dec.labels[q] = lab;
            queue.push_back(q);
          }
        }
      }
    }
  }
  for (std::int64_t i = 0; i < M; ++i) {
    for (int a = 0; a < view.num_axes; ++a) {
      std::int64_t q = view.neighbor(i, a, +1);
      if (static_cast<int>(sgn[i]) * sgn[q] < 0 ||
          (sgn[i] != sgn[q] && (sgn[i] == 0 || sgn[q] == 0)))
        dec.boundary_edges.emplace_back(i, q);
    }
  }
  return dec;
}

CourantVerdict courant_check(std::int64_t nu, const NodalDecomposition& dec) {
  CourantVerdict v;
  v.domain_count = dec.count;
  v.negative_count = nu;
  v.pass = dec.count <= nu + 1;
  return v;
}

namespace {

// Boundary quadrature shared by the identity routines. For every grid face
// between `inside` (one endpoint in the domain) and its complement:
//   v_mid * ||grad u||_ghat * dsigma_ghat
//     ~ v_mid * e^{(n-2) Ups_mid} |u_i - u_j| h^{n-2} * extra(mid),
// gradient one-sided from the interior of the domain.
double boundary_sum(const DiscreteConformalMetric& metric,
                    const std::vector<char>& inside, std::span<const double> u,
                    const std::function<double(std::int64_t, std::int64_t)>& face_factor) {
  const TorusGrid& g = metric.grid;
  const double h = g.h();
  const int n = g.n;
  double hn2 = 1.0;
  for (int a = 0; a < n - 2; ++a) hn2 *= h;
  double total = 0.0;
  for (std::int64_t i = 0; i < g.size(); ++i) {
    if (!inside[i]) continue;
    for (int a = 0; a < n; ++a) {
      for (int delta : {+1, -1}) {
        std::int64_t j = g.neighbor(i, a, delta);
        if (inside[j]) continue;
        total += face_factor(i, j) * std::abs(u[i] - u[j]) * hn2;
      }
    }
  }
  return total;
}

}  // namespace

IdentityResult nodal_domain_identity(const DiscreteConformalMetric& metric,
                                     const SymmetricOperator& op,
                                     const NodalDecomposition& dec, int domain,
                                     std::span<const double> u,
                                     std::span<const double> v) {
  if (domain < 1 || domain > dec.count)
    throw std::invalid_argument("nodal_domain_identity: invalid domain label");
  const TorusGrid& g = metric.grid;
  const int n = g.n;
  const auto& ups = metric.upsilon.values;
  std::vector<double> w = metric.volume_weights();
  std::vector<double> pv(g.size());
  op.apply_raw(v, pv);

  double lhs = 0.0;
  std::vector<char> inside(g.size(), 0);
  for (std::int64_t i = 0; i < g.size(); ++i) {
    if (dec.labels[i] == domain) {
      inside[i] = 1;
      lhs += std::abs(u[i]) * pv[i] * w[i];
    }
  }
  auto face = [&](std::int64_t i, std::int64_t j) {
    double um = 0.5 * (ups[i] + ups[j]);
    double vm = 0.5 * (v[i] + v[j]);
    return vm * std::exp((n - 2) * um);
  };
  double rhs = -boundary_sum(metric, inside, u, face);
  IdentityResult res;
  res.lhs = lhs;
  res.rhs = rhs;
  res.residual = std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1e-300);
  return res;
}

IdentityResult green_identity(const DiscreteConformalMetric& metric,
                              const SymmetricOperator& op,
                              const NodalDecomposition& dec,
                              std::span<const double> u,
                              std::span<const double> v) {
  const TorusGrid& g = metric.grid;
  const int n = g.n;
  const auto& ups = metric.upsilon.values;
  std::vector<double> w = metric.volume_weights();
  std::vector<double> pv(g.size());
  op.apply_raw(v, pv);
  double lhs = 0.0;
  for (std::int64_t i = 0; i < g.size(); ++i) lhs += std::abs(u[i]) * pv[i] * w[i];

  // one crossing per unordered sign-change face, counted twice by the
  // decomposition into positive and negative domains
  const double h = g.h();
  double hn2 = 1.0;
  for (int a = 0; a < n - 2; ++a) hn2 *= h;
  double rhs = 0.0;
  for (std::int64_t i = 0; i < g.size(); ++i) {
    bool pi = dec.labels[i] >= 1 && dec.domain_sign[dec.labels[i] - 1] > 0;
    for (int a = 0; a < n; ++a) {
      std::int64_t j = g.neighbor(i, a, +1);
      bool pj = dec.labels[j] >= 1 && dec.domain_sign[dec.labels[j] - 1] > 0;
      bool crossing = (dec.labels[i] != dec.labels[j]) &&
                      !(dec.labels[i] == 0 && dec.labels[j] == 0) &&
                      (pi != pj || dec.labels[i] == 0 || dec.labels[j] == 0);
      if (!crossing) continue;
      double um = 0.5 * (ups[i] + ups[j]);
      double vm = 0.5 * (v[i] + v[j]);
      rhs += vm * std::exp((n - 2) * um) * std::abs(u[i] - u[j]) * hn2;
    }
  }
  rhs *= -2.0;
  IdentityResult res;
  res.lhs = lhs;
  res.rhs = rhs;
  res.residual = std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1e-300);
  return res;
}

double obstruction_integral(const DiscreteConformalMetric& metric,
                            const NodalDecomposition& dec, int domain,
                            std::span<const double> u, std::span<const double> f,
                            const ConformalFactor& ups_hat) {
  if (domain < 1 || domain > dec.count)
    throw std::invalid_argument("obstruction_integral: invalid domain label");
  const int n = metric.grid.n;
  std::vector<double> w = metric.volume_weights();
  double total = 0.0;
  const double cn = static_cast<double>(n - 2) / (4.0 * (n - 1));
  for (std::int64_t i = 0; i < metric.grid.size(); ++i) {
    if (dec.labels[i] != domain) continue;
    double omega = cn * std::exp(0.5 * (n + 2) * ups_hat.values[i]);
    total += f[i] * std::abs(u[i]) * omega * w[i];
  }
  return total;
}

ConservedT conserved_T(const DiscreteConformalMetric& metric,
                       const NodalDecomposition& dec, int domain,
                       std::span<const double> u, const ConformalFactor& ups_hat) {
  if (domain < 1 || domain > dec.count)
    throw std::invalid_argument("conserved_T: invalid domain label");
  const TorusGrid& g = metric.grid;
  const int n = g.n;
  const auto& ub = metric.upsilon.values;   // base factor: g = e^{2 ub} flat
  const auto& uh = ups_hat.values;          // ghat = e^{2 uh} g

  ConservedT out;
  // volume side: int_Omega |u| R_g dv_g
  std::vector<double> rg = scalar_curvature_conformal(metric.upsilon, g, n);
  std::vector<double> w = metric.volume_weights();
  for (std::int64_t i = 0; i < g.size(); ++i)
    if (dec.labels[i] == domain) out.volume_value += std::abs(u[i]) * rg[i] * w[i];

  // boundary side at the representative ghat, with uhat = e^{(2-n)/2 uh} u
  std::vector<double> uhat(g.size());
  for (std::int64_t i = 0; i < g.size(); ++i)
    uhat[i] = std::exp(0.5 * (2 - n) * uh[i]) * u[i];
  std::vector<char> inside(g.size(), 0);
  for (std::int64_t i = 0; i < g.size(); ++i)
    inside[i] = dec.labels[i] == domain;
  const double h = g.h();
  double hn2 = 1.0;
  for (int a = 0; a < n - 2; ++a) hn2 *= h;
  double bsum = 0.0;
  for (std::int64_t i = 0; i < g.size(); ++i) {
    if (!inside[i]) continue;
    for (int a = 0; a < n; ++a) {
      for (int delta : {+1, -1}) {
        std::int64_t j = g.neighbor(i, a, delta);
        if (inside[j]) continue;
        double total_mid = 0.5 * (ub[i] + ub[j] + uh[i] + uh[j]);
        double pre = std::exp(0.25 * (2 - n) * (uh[i] + uh[j]));
        // ||grad uhat||_ghat dsigma_ghat ~ e^{(n-2) (ub+uh)_mid} |duhat| h^{n-2}
        bsum += pre * std::exp((n - 2) * total_mid) *
                std::abs(uhat[i] - uhat[j]) * hn2;
      }
    }
  }
  out.boundary_value = -4.0 * (n - 1) / (n - 2.0) * (-bsum);
  return out;
}

std::vector<std::pair<std::int64_t, std::int64_t>> level_set(
    const GridView& view, std::span<const double> u, double c) {
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;
  for (std::int64_t i = 0; i < view.size; ++i) {
    double a = u[i] - c;
    for (int ax = 0; ax < view.num_axes; ++ax) {
      std::int64_t j = view.neighbor(i, ax, +1);
      double b = u[j] - c;
      if (a * b < 0) edges.emplace_back(i, j);
    }
  }
  return edges;
}

double lp_invariant(std::span<const double> u, const ConformalFactor& ups,
                    const TorusGrid& grid, int n, int k) {
  if (2 * k >= n)
    throw std::invalid_argument("lp_invariant: need k < n/2 (exponent undefined)");
  const double p = 2.0 * n / (n - 2.0 * k);
  double hn = 1.0;
  for (int a = 0; a < n; ++a) hn *= grid.h();
  double total = 0.0;
  for (std::int64_t i = 0; i < grid.size(); ++i) {
    double ui = std::exp(0.5 * (2.0 * k - n) * ups.values[i]) * u[i];
    total += std::pow(std::abs(ui), p) * std::exp(n * ups.values[i]) * hn;
  }
  return total;
}

std::string nodal_decomposition_json(const NodalDecomposition& dec) {
  std::ostringstream os;
  os << "{\"count\":" << dec.count << ",\"labels\":[";
  for (std::size_t i = 0; i < dec.labels.size(); ++i)
    os << (i ? "," : "") << dec.labels[i];
  os << "],\"sign\":[";
  for (std::size_t i = 0; i < dec.domain_sign.size(); ++i)
    os << (i ? "," : "") << dec.domain_sign[i];
  os << "],\"boundary_edges\":[";
  for (std::size_t i = 0; i < dec.boundary_edges.size(); ++i)
    os << (i ? "," : "") << "[" << dec.boundary_edges[i].first << ","
       << dec.boundary_edges[i].second << "]";
  os << "]}";
  return os.str();
}

std::string nodal_point_cloud_csv(
    const GridView& view,
    const std::function<std::vector<double>(std::int64_t)>& coords,
    std::span<const double> u, const NodalDecomposition& dec) {
  (void)view;
  std::ostringstream os;
  os << "x,y,t,value\n";
  os.precision(17);
  for (const auto& [i, j] : dec.boundary_edges) {
    std::vector<double> a = coords(i), b = coords(j);
    // face midpoint as the nodal-set sample
    for (std::size_t c = 0; c < a.size(); ++c) a[c] = 0.5 * (a[c] + b[c]);
    for (std::size_t c = 0; c < 3; ++c)
      os << (c ? "," : "") << (c < a.size() ? a[c] : 0.0);
    os << "," << 0.5 * (u[i] + u[j]) << "\n";
  }
  return os.str();
}

}  // namespace sg
