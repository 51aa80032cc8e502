#include "sg/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sg {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TorusGrid TorusGrid::create(int n, int N) {
  if (n < 3 || n > 4) throw std::invalid_argument("TorusGrid: n must be 3 or 4");
  if (N < 8) throw std::invalid_argument("TorusGrid: need N >= 8");
  TorusGrid g;
  g.n = n;
  g.N = N;
  return g;
}

std::int64_t TorusGrid::size() const {
  std::int64_t s = 1;
  for (int a = 0; a < n; ++a) s *= N;
  return s;
}

std::int64_t TorusGrid::neighbor(std::int64_t idx, int axis, int delta) const {
  // row major, axis 0 slowest
  std::int64_t stride = 1;
  for (int a = axis + 1; a < n; ++a) stride *= N;
  std::int64_t coord = (idx / stride) % N;
  std::int64_t base = idx - coord * stride;
  std::int64_t nc = ((coord + delta) % N + N) % N;
  return base + nc * stride;
}

std::vector<double> TorusGrid::coords(std::int64_t idx) const {
  std::vector<double> c(n);
  for (int a = n - 1; a >= 0; --a) {
    c[a] = static_cast<double>(idx % N) / N;
    idx /= N;
  }
  return c;
}

ConformalFactor bandlimited_factor(const TorusGrid& grid, std::uint64_t seed,
                                   double amplitude) {
  const int n = grid.n;
  const int kmax = 2;
  // draw one coefficient pair per nonzero frequency tuple, in a fixed order
  SplitMix64 rng(seed * 0x9E3779B97F4A7C15ULL + 0xA5A5A5A5ULL);
  std::vector<std::vector<int>> freqs;
  std::vector<int> f(n, -kmax);
  while (true) {
    bool zero = std::all_of(f.begin(), f.end(), [](int v) { return v == 0; });
    if (!zero) freqs.push_back(f);
    int a = n - 1;
    while (a >= 0 && f[a] == kmax) f[a--] = -kmax;
    if (a < 0) break;
    ++f[a];
  }
  std::vector<double> ca(freqs.size()), cb(freqs.size());
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    ca[i] = rng.normal();
    cb[i] = rng.normal();
  }
  ConformalFactor out;
  out.values.assign(grid.size(), 0.0);
  for (std::int64_t idx = 0; idx < grid.size(); ++idx) {
    std::vector<double> x = grid.coords(idx);
    double v = 0.0;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
      double phase = 0.0;
      for (int a = 0; a < n; ++a) phase += freqs[i][a] * x[a];
      v += ca[i] * std::cos(2.0 * kPi * phase) + cb[i] * std::sin(2.0 * kPi * phase);
    }
    out.values[idx] = v;
  }
  double mx = 0.0;
  for (double v : out.values) mx = std::max(mx, std::abs(v));
  if (mx > 0)
    for (double& v : out.values) v *= amplitude / mx;
  return out;
}

ConformalFactor constant_factor(const TorusGrid& grid, double value) {
  ConformalFactor out;
  out.values.assign(grid.size(), value);
  return out;
}

std::vector<double> DiscreteConformalMetric::volume_weights() const {
  const int n = grid.n;
  double hn = 1.0;
  for (int a = 0; a < n; ++a) hn *= grid.h();
  std::vector<double> w(grid.size());
  for (std::int64_t i = 0; i < grid.size(); ++i)
    w[i] = std::exp(n * upsilon.values[i]) * hn;
  return w;
}

SymmetricOperator laplace_beltrami(const DiscreteConformalMetric& metric) {
  const TorusGrid& g = metric.grid;
  const int n = g.n;
  const std::int64_t M = g.size();
  const double inv_h2 = 1.0 / (g.h() * g.h());
  const auto& ups = metric.upsilon.values;
  double hn = 1.0;
  for (int a = 0; a < n; ++a) hn *= g.h();

  // Stiffness S with S u = sum over edges kappa (u_i - u_j); the operator is
  // W^{-1} S with W the volume weights. Stored scaled by h^n so that
  // S_ij / w_i reproduces the flux form exactly.
  SparseSym sp;
  sp.n = static_cast<int>(M);
  sp.row_ptr.assign(M + 1, 0);
  sp.col.reserve(M * (2 * n + 1));
  sp.val.reserve(M * (2 * n + 1));
  std::vector<std::pair<int, double>> row;
  for (std::int64_t i = 0; i < M; ++i) {
    row.clear();
    double diag = 0.0;
    for (int a = 0; a < n; ++a) {
      for (int delta : {+1, -1}) {
        std::int64_t j = g.neighbor(i, a, delta);
        double kap = std::exp((n - 2) * 0.5 * (ups[i] + ups[j])) * inv_h2 * hn;
        row.emplace_back(static_cast<int>(j), -kap);
        diag += kap;
      }
    }
    row.emplace_back(static_cast<int>(i), diag);
    std::sort(row.begin(), row.end());
    for (auto& [c, v] : row) {
      sp.col.push_back(c);
      sp.val.push_back(v);
    }
    sp.row_ptr[i + 1] = static_cast<int>(sp.col.size());
  }
  SymmetricOperator op = SymmetricOperator::sparse(std::move(sp));
  op.set_weights(metric.volume_weights());
  BlockTridiagLayout lay;
  std::int64_t plane = M / g.N;
  for (int b = 0; b <= g.N; ++b) lay.offsets.push_back(static_cast<int>(b * plane));
  lay.cyclic = true;
  op.set_block_layout(std::move(lay));
  return op;
}

std::vector<double> scalar_curvature_conformal(const ConformalFactor& ups,
                                               const TorusGrid& grid, int n) {
  if (n < 3) throw std::invalid_argument("scalar_curvature_conformal: n >= 3");
  const std::int64_t M = grid.size();
  const double h = grid.h();
  std::vector<double> out(M);
  for (std::int64_t i = 0; i < M; ++i) {
    double lap = 0.0, grad2 = 0.0;
    for (int a = 0; a < grid.n; ++a) {
      double up = ups.values[grid.neighbor(i, a, +1)];
      double dn = ups.values[grid.neighbor(i, a, -1)];
      lap += (2.0 * ups.values[i] - up - dn) / (h * h);  // positive Laplacian
      double g = (up - dn) / (2.0 * h);
      grad2 += g * g;
    }
    out[i] = std::exp(-2.0 * ups.values[i]) *
             (2.0 * (n - 1) * lap - (n - 1) * (n - 2) * grad2);
  }
  return out;
}

SymmetricOperator yamabe_direct(const DiscreteConformalMetric& metric) {
  const int n = metric.grid.n;
  SymmetricOperator lap = laplace_beltrami(metric);
  std::vector<double> rhat =
      scalar_curvature_conformal(metric.upsilon, metric.grid, n);
  std::vector<double> w = metric.volume_weights();
  // stiffness S' = S + diag(c Rhat w): operator W^{-1}S' = W^{-1}S + c Rhat
  SparseSym sp = lap.sparse_data();
  const double c = static_cast<double>(n - 2) / (4.0 * (n - 1));
  for (int i = 0; i < sp.n; ++i) {
    for (int p = sp.row_ptr[i]; p < sp.row_ptr[i + 1]; ++p) {
      if (sp.col[p] == i) sp.val[p] += c * rhat[i] * w[i];
    }
  }
  SymmetricOperator op = SymmetricOperator::sparse(std::move(sp));
  op.set_weights(std::move(w));
  if (lap.block_layout()) op.set_block_layout(*lap.block_layout());
  return op;
}

SymmetricOperator yamabe_conjugated(const ConformalFactor& ups,
                                    const TorusGrid& grid, int n) {
  const std::int64_t M = grid.size();
  const double inv_h2 = 1.0 / (grid.h() * grid.h());
  double hn = 1.0;
  for (int a = 0; a < n; ++a) hn *= grid.h();
  // Operator e^{-(n+2)U/2} Lap0 e^{(n-2)U/2}; with weights w = e^{nU}h^n the
  // stiffness is S = E Lap0 E * h^n, E = diag(e^{(n-2)U/2}), which is
  // symmetric, and W^{-1} S is exactly the conjugated operator.
  SparseSym sp;
  sp.n = static_cast<int>(M);
  sp.row_ptr.assign(M + 1, 0);
  sp.col.reserve(M * (2 * n + 1));
  sp.val.reserve(M * (2 * n + 1));
  std::vector<std::pair<int, double>> row;
  const auto& U = ups.values;
  auto E = [&](std::int64_t i) { return std::exp((n - 2) * 0.5 * U[i]); };
  for (std::int64_t i = 0; i < M; ++i) {
    row.clear();
    double diag = 2.0 * n * inv_h2 * E(i) * E(i) * hn;
    for (int a = 0; a < grid.n; ++a) {
      for (int delta : {+1, -1}) {
        std::int64_t j = grid.neighbor(i, a, delta);
        row.emplace_back(static_cast<int>(j), -inv_h2 * E(i) * E(j) * hn);
      }
    }
    row.emplace_back(static_cast<int>(i), diag);
    std::sort(row.begin(), row.end());
    int w2 = 0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (w2 > 0 && row[w2 - 1].first == row[k].first)
        row[w2 - 1].second += row[k].second;
      else
        row[w2++] = row[k];
    }
    row.resize(w2);
    for (auto& [c, v] : row) {
      sp.col.push_back(c);
      sp.val.push_back(v);
    }
    sp.row_ptr[i + 1] = static_cast<int>(sp.col.size());
  }
  SymmetricOperator op = SymmetricOperator::sparse(std::move(sp));
  std::vector<double> w(M);
  for (std::int64_t i = 0; i < M; ++i) w[i] = std::exp(n * U[i]) * hn;
  op.set_weights(std::move(w));
  BlockTridiagLayout lay;
  std::int64_t plane = M / grid.N;
  for (int b = 0; b <= grid.N; ++b) lay.offsets.push_back(static_cast<int>(b * plane));
  lay.cyclic = true;
  op.set_block_layout(std::move(lay));
  return op;
}

double covariance_residual(const ConformalFactor& ups, const TorusGrid& grid,
                           int n, int nvec, std::uint64_t seed) {
  DiscreteConformalMetric metric{grid, ups};
  SymmetricOperator dir = yamabe_direct(metric);
  SymmetricOperator conj = yamabe_conjugated(ups, grid, n);
  const std::int64_t M = grid.size();
  std::vector<double> w = metric.volume_weights();
  std::vector<double> yd(M), yc(M), q(M);
  double worst = 0.0;
  for (int k = 0; k < nvec; ++k) {
    ConformalFactor u = bandlimited_factor(grid, seed + k, 1.0);
    // apply operators through the weighted similarity: q = W^{1/2}u
    for (std::int64_t i = 0; i < M; ++i) q[i] = u.values[i] * std::sqrt(w[i]);
    dir.apply_sym(q, yd);
    conj.apply_sym(q, yc);
    double num = 0.0, den = 0.0;
    for (std::int64_t i = 0; i < M; ++i) {
      double di = yd[i] - yc[i];
      num += di * di;
      den += q[i] * q[i];
    }
    worst = std::max(worst, std::sqrt(num / den));
  }
  return worst;
}

KernelBasis kernel_basis(const SymmetricOperator& op, double tol0, int probe,
                         std::uint64_t seed) {
  LanczosOptions opts;
  opts.seed = seed;
  EigenResult r = lanczos_lowest(op, std::min(probe, op.dim() - 1),
                                 1e-9 * (1.0 + op.norm1()), opts);
  KernelBasis kb;
  kb.tol_used = tol0;
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    if (std::abs(r.eigenvalues[i]) <= tol0) {
      kb.vectors.push_back(r.eigenvectors[i]);
      kb.eigenvalues.push_back(r.eigenvalues[i]);
    }
  }
  // unreliable-dimension warning: some computed eigenvalue falls inside the
  // widened band (tol0, 10 tol0]
  for (double lam : r.eigenvalues)
    if (std::abs(lam) > tol0 && std::abs(lam) <= 10.0 * tol0) kb.gap_warning = true;
  return kb;
}

TuneResult tune_to_kernel(const TorusGrid& grid, int n,
                          const ConformalFactor& ups0, int j, double c_lo,
                          double c_hi, std::uint64_t seed) {
  if (j < 1) throw std::invalid_argument("tune_to_kernel: j >= 1");
  if (n != grid.n)
    throw std::invalid_argument("tune_to_kernel: dimension mismatch with grid");
  auto lam_j = [&](double c) {
    ConformalFactor u;
    u.values.resize(ups0.values.size());
    for (std::size_t i = 0; i < u.values.size(); ++i)
      u.values[i] = c * ups0.values[i];
    DiscreteConformalMetric metric{grid, std::move(u)};
    SymmetricOperator op = yamabe_direct(metric);
    LanczosOptions opts;
    opts.seed = seed;
    EigenResult r =
        lanczos_lowest(op, j + 1, 1e-8 * (1.0 + op.norm1()), opts);
    return std::pair<double, double>(r.eigenvalues[j - 1],
                                     op.zero_tolerance());
  };
  auto [f_lo, tau_lo] = lam_j(c_lo);
  auto [f_hi, tau_hi] = lam_j(c_hi);
  if ((f_lo < 0) == (f_hi < 0))
    throw std::runtime_error(
        "tune_to_kernel: lambda_" + std::to_string(j) +
        " does not change sign on [" + std::to_string(c_lo) + ", " +
        std::to_string(c_hi) + "] (endpoint values " + std::to_string(f_lo) +
        ", " + std::to_string(f_hi) + "); no kernel crossing on this path");
  TuneResult res;
  double lo = c_lo, hi = c_hi;
  double f_at_lo = f_lo;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    auto [f, tau] = lam_j(mid);
    res.c_star = mid;
    res.lambda_j = f;
    res.iterations = it + 1;
    if (std::abs(f) < tau) return res;
    if ((f < 0) == (f_at_lo < 0)) {
      lo = mid;
      f_at_lo = f;
    } else {
      hi = mid;
    }
  }
  return res;
}

std::vector<double> density_transform(const std::vector<double>& u,
                                      const ConformalFactor& ups, double w) {
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = std::exp(-w * ups.values[i]) * u[i];
  return out;
}

}  // namespace sg
