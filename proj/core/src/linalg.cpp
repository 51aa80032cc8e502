#include "sg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace sg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

int lower_index(int i, int j) {  // i >= j
  return i * (i + 1) / 2 + j;
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  while (u1 <= 1e-300) u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double th = 2.0 * M_PI * u2;
  spare_ = r * std::sin(th);
  have_spare_ = true;
  return r * std::cos(th);
}

std::int64_t binomial_int64(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    std::int64_t num = n - k + i;
    if (r > std::numeric_limits<std::int64_t>::max() / num)
      throw std::overflow_error("binomial_int64 overflow");
    r = r * num / i;
  }
  return r;
}

// --- SymmetricOperator -------------------------------------------------------

SymmetricOperator SymmetricOperator::dense_from_full(int n,
                                                     std::span<const double> full) {
  if (static_cast<int>(full.size()) != n * n)
    throw std::invalid_argument("dense_from_full: size mismatch");
  double scale = 0.0;
  for (double v : full) scale = std::max(scale, std::abs(v));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      double d = std::abs(full[i * n + j] - full[j * n + i]);
      if (d > 1e-12 * std::max(1.0, scale))
        throw std::invalid_argument("non-symmetric input at entries (" +
                                    std::to_string(i) + "," + std::to_string(j) +
                                    "): " + std::to_string(full[i * n + j]) +
                                    " vs " + std::to_string(full[j * n + i]));
    }
  std::vector<double> lower(static_cast<size_t>(n) * (n + 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) lower[lower_index(i, j)] = full[i * n + j];
  return dense_from_lower(n, std::move(lower));
}

SymmetricOperator SymmetricOperator::dense_from_lower(int n,
                                                      std::vector<double> lower) {
  if (static_cast<int>(lower.size()) != n * (n + 1) / 2)
    throw std::invalid_argument("dense_from_lower: size mismatch");
  SymmetricOperator op;
  op.n_ = n;
  op.lower_ = std::move(lower);
  return op;
}

SymmetricOperator SymmetricOperator::sparse(SparseSym s) {
  if (static_cast<int>(s.row_ptr.size()) != s.n + 1)
    throw std::invalid_argument("sparse: bad row_ptr");
  SymmetricOperator op;
  op.n_ = s.n;
  op.sp_ = std::move(s);
  return op;
}

void SymmetricOperator::set_weights(std::vector<double> w) {
  if (static_cast<int>(w.size()) != n_)
    throw std::invalid_argument("weights: size mismatch");
  for (double x : w)
    if (!(x > 0.0)) throw std::invalid_argument("weights must be positive");
  weights_ = std::move(w);
  norm1_cache_ = -1.0;
}

void SymmetricOperator::set_block_layout(BlockTridiagLayout layout) {
  if (layout.offsets.size() < 2 || layout.offsets.front() != 0 ||
      layout.offsets.back() != n_)
    throw std::invalid_argument("block layout must cover [0, dim)");
  layout_ = std::move(layout);
}

double SymmetricOperator::entry(int i, int j) const {
  if (is_dense()) {
    return i >= j ? lower_[lower_index(i, j)] : lower_[lower_index(j, i)];
  }
  for (int p = sp_.row_ptr[i]; p < sp_.row_ptr[i + 1]; ++p)
    if (sp_.col[p] == j) return sp_.val[p];
  return 0.0;
}

void SymmetricOperator::apply_sym(std::span<const double> x,
                                  std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  const bool w = has_weights();
  std::vector<double> xs;
  std::span<const double> xin = x;
  if (w) {
    xs.resize(n_);
    for (int i = 0; i < n_; ++i) xs[i] = x[i] / std::sqrt(weights_[i]);
    xin = xs;
  }
  if (is_dense()) {
    for (int i = 0; i < n_; ++i) {
      double acc = 0.0;
      const double* row = &lower_[lower_index(i, 0)];
      for (int j = 0; j < i; ++j) {
        acc += row[j] * xin[j];
        y[j] += row[j] * xin[i];
      }
      y[i] += acc + row[i] * xin[i];
    }
  } else {
    for (int i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (int p = sp_.row_ptr[i]; p < sp_.row_ptr[i + 1]; ++p)
        acc += sp_.val[p] * xin[sp_.col[p]];
      y[i] = acc;
    }
  }
  if (w)
    for (int i = 0; i < n_; ++i) y[i] /= std::sqrt(weights_[i]);
}

void SymmetricOperator::apply_raw(std::span<const double> x,
                                  std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  if (is_dense()) {
    for (int i = 0; i < n_; ++i) {
      double acc = 0.0;
      const double* row = &lower_[lower_index(i, 0)];
      for (int j = 0; j < i; ++j) {
        acc += row[j] * x[j];
        y[j] += row[j] * x[i];
      }
      y[i] += acc + row[i] * x[i];
    }
  } else {
    for (int i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (int p = sp_.row_ptr[i]; p < sp_.row_ptr[i + 1]; ++p)
        acc += sp_.val[p] * x[sp_.col[p]];
      y[i] = acc;
    }
  }
  if (has_weights())
    for (int i = 0; i < n_; ++i) y[i] /= weights_[i];
}

double SymmetricOperator::norm1() const {
  if (norm1_cache_ >= 0.0) return norm1_cache_;
  std::vector<double> colsum(n_, 0.0);
  const bool w = has_weights();
  auto scaled = [&](int i, int j, double v) {
    return w ? v / std::sqrt(weights_[i] * weights_[j]) : v;
  };
  if (is_dense()) {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j <= i; ++j) {
        double v = std::abs(scaled(i, j, lower_[lower_index(i, j)]));
        colsum[j] += v;
        if (i != j) colsum[i] += v;
      }
  } else {
    for (int i = 0; i < n_; ++i)
      for (int p = sp_.row_ptr[i]; p < sp_.row_ptr[i + 1]; ++p)
        colsum[sp_.col[p]] += std::abs(scaled(i, sp_.col[p], sp_.val[p]));
  }
  norm1_cache_ = *std::max_element(colsum.begin(), colsum.end());
  return norm1_cache_;
}

std::vector<double> SymmetricOperator::dense_sym_matrix() const {
  std::vector<double> m(static_cast<size_t>(n_) * n_, 0.0);
  const bool w = has_weights();
  auto scaled = [&](int i, int j, double v) {
    return w ? v / std::sqrt(weights_[i] * weights_[j]) : v;
  };
  if (is_dense()) {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j <= i; ++j) {
        double v = scaled(i, j, lower_[lower_index(i, j)]);
        m[static_cast<size_t>(i) * n_ + j] = v;
        m[static_cast<size_t>(j) * n_ + i] = v;
      }
  } else {
    for (int i = 0; i < n_; ++i)
      for (int p = sp_.row_ptr[i]; p < sp_.row_ptr[i + 1]; ++p)
        m[static_cast<size_t>(i) * n_ + sp_.col[p]] =
            scaled(i, sp_.col[p], sp_.val[p]);
  }
  return m;
}

// --- dense symmetric eigensolver (Householder + implicit-shift QL) ----------

namespace {

void tred2(int n, std::vector<double>& a, std::vector<double>& d,
           std::vector<double>& e) {
  auto A = [&](int i, int j) -> double& { return a[static_cast<size_t>(i) * n + j]; };
  for (int i = n - 1; i >= 1; --i) {
    int l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (int k = 0; k <= l; ++k) scale += std::abs(A(i, k));
      if (scale == 0.0) {
        e[i] = A(i, l);
      } else {
        for (int k = 0; k <= l; ++k) {
          A(i, k) /= scale;
          h += A(i, k) * A(i, k);
        }
        double f = A(i, l);
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        A(i, l) = f - g;
        f = 0.0;
        for (int j = 0; j <= l; ++j) {
          A(j, i) = A(i, j) / h;
          g = 0.0;
          for (int k = 0; k <= j; ++k) g += A(j, k) * A(i, k);
          for (int k = j + 1; k <= l; ++k) g += A(k, j) * A(i, k);
          e[j] = g / h;
          f += e[j] * A(i, j);
        }
        double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = A(i, j);
          e[j] = g = e[j] - hh * f;
          for (int k = 0; k <= j; ++k) A(j, k) -= f * e[k] + g * A(i, k);
        }
      }
    } else {
      e[i] = A(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    int l = i - 1;
    if (d[i] != 0.0) {
      for (int j = 0; j <= l; ++j) {
        double g = 0.0;
        for (int k = 0; k <= l; ++k) g += A(i, k) * A(k, j);
        for (int k = 0; k <= l; ++k) A(k, j) -= g * A(k, i);
      }
    }
    d[i] = A(i, i);
    A(i, i) = 1.0;
    for (int j = 0; j <= l; ++j) A(j, i) = A(i, j) = 0.0;
  }
}

// Implicit-shift QL on tridiagonal (d, e). z (optional) is zrows x n row
// major; its columns are rotated along. e[0] is unused on entry.
void tql2(int n, std::vector<double>& d, std::vector<double>& e,
          std::vector<double>* z, int zrows) {
  if (n == 1) return;
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= kEps * dd) break;
      }
      if (m != l) {
        if (++iter == 60) throw std::runtime_error("tql2: too many iterations");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (int i = m - 1; i >= l; --i) {
          double f = s * e[i];
          double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (z) {
            double* zz = z->data();
            for (int k = 0; k < zrows; ++k) {
              double fk = zz[static_cast<size_t>(k) * n + i + 1];
              zz[static_cast<size_t>(k) * n + i + 1] =
                  s * zz[static_cast<size_t>(k) * n + i] + c * fk;
              zz[static_cast<size_t>(k) * n + i] =
                  c * zz[static_cast<size_t>(k) * n + i] - s * fk;
            }
          }
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

void sort_eigen(int n, std::vector<double>& d, std::vector<double>* z, int zrows) {
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return d[a] < d[b]; });
  std::vector<double> ds(n);
  for (int i = 0; i < n; ++i) ds[i] = d[order[i]];
  d = std::move(ds);
  if (z) {
    std::vector<double> zz(z->size());
    for (int k = 0; k < zrows; ++k)
      for (int i = 0; i < n; ++i)
        zz[static_cast<size_t>(k) * n + i] =
            (*z)[static_cast<size_t>(k) * n + order[i]];
    *z = std::move(zz);
  }
}

}  // namespace

EigenResult eigh_dense(const SymmetricOperator& A) {
  const int n = A.dim();
  if (n > kEighDenseMaxDim)
    throw std::invalid_argument("eigh_dense: dimension exceeds documented limit");
  std::vector<double> m = A.dense_sym_matrix();
  std::vector<double> d(n), e(n);
  tred2(n, m, d, e);
  tql2(n, d, e, &m, n);
  sort_eigen(n, d, &m, n);

  EigenResult res;
  res.eigenvalues = d;
  res.eigenvectors.assign(n, std::vector<double>(n));
  const bool w = A.has_weights();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      double q = m[static_cast<size_t>(i) * n + j];
      res.eigenvectors[j][i] = w ? q / std::sqrt(A.weights()[i]) : q;
    }
  res.residual_norms.assign(n, 0.0);
  if (n <= 1024) {
    std::vector<double> q(n), y(n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i)
        q[i] = w ? res.eigenvectors[j][i] * std::sqrt(A.weights()[i])
                 : res.eigenvectors[j][i];
      A.apply_sym(q, y);
      for (int i = 0; i < n; ++i) y[i] -= d[j] * q[i];
      res.residual_norms[j] = norm2(y);
    }
  } else {
    // explicit residuals would cost another O(n^3); report the backward
    // stable bound instead
    double bound = kEps * n * A.norm1();
    std::fill(res.residual_norms.begin(), res.residual_norms.end(), bound);
  }
  return res;
}

// --- Lanczos with full reorthogonalization and locking -----------------------

namespace {

using ApplyFn = std::function<void(std::span<const double>, std::span<double>)>;

void reorthogonalize(std::span<double> w, const std::vector<std::vector<double>>& vs,
                     int count) {
  if (count == 0) return;
  double before = norm2(w);
  for (int pass = 0; pass < 2; ++pass) {
    for (int i = 0; i < count; ++i) {
      double c = dot(w, vs[i]);
      for (std::size_t t = 0; t < w.size(); ++t) w[t] -= c * vs[i][t];
    }
    double after = norm2(w);
    if (after > 0.5 * before) break;
    before = after;
  }
}

double power_norm_estimate(const ApplyFn& apply, int n, SplitMix64& rng) {
  std::vector<double> v(n), y(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  double nv = norm2(v);
  for (auto& x : v) x /= nv;
  double lam = 1.0;
  for (int it = 0; it < 20; ++it) {
    apply(v, y);
    lam = norm2(y);
    if (lam == 0.0) return 1.0;
    for (int i = 0; i < n; ++i) v[i] = y[i] / lam;
  }
  return lam;
}

// Three-term Chebyshev filter mapping [lo, hi] to [-1, 1]; amplifies
// eigencomponents below lo. Used only to enrich start vectors.
void cheb_filter(const ApplyFn& apply, int n, std::vector<double>& v, int degree,
                 double lo, double hi) {
  double c = 0.5 * (hi + lo), h = 0.5 * (hi - lo);
  std::vector<double> t0 = v, t1(n), y(n);
  apply(t0, y);
  for (int i = 0; i < n; ++i) t1[i] = (y[i] - c * t0[i]) / h;
  for (int k = 2; k <= degree; ++k) {
    apply(t1, y);
    for (int i = 0; i < n; ++i) {
      double next = 2.0 * (y[i] - c * t1[i]) / h - t0[i];
      t0[i] = t1[i];
      t1[i] = next;
    }
    double nrm = norm2(t1);
    if (nrm > 1e100) {
      for (int i = 0; i < n; ++i) {
        t0[i] /= nrm;
        t1[i] /= nrm;
      }
    }
  }
  v = t1;
}

}  // namespace

EigenResult lanczos_lowest(const ApplyFn& apply, int dim, int k, double tol,
                           const LanczosOptions& opts) {
  if (k >= dim) throw std::invalid_argument("lanczos_lowest: need k < dim");
  EigenResult res;
  std::vector<std::vector<double>> locked;
  std::vector<double> locked_vals;

  SplitMix64 rng(opts.seed * 0x9E3779B97F4A7C15ULL + 0x2545F4914F6CDD1DULL);
  const int m_max = std::min(dim, std::max(opts.max_basis, 2 * k + 10));

  double lam_hi = 0.0;
  if (opts.filter_degree > 0 && opts.filter_cutoff > 0.0)
    lam_hi = 1.25 * power_norm_estimate(apply, dim, rng);

  std::vector<std::vector<double>> basis;
  std::vector<double> v(dim), w(dim);

  auto random_start = [&](std::vector<double>& out) {
    for (int i = 0; i < dim; ++i) out[i] = rng.normal();
  };

  int restarts = 0;
  std::vector<double> resume;
  // The loop runs past k locked pairs until a verification pass certifies
  // completeness: a fresh start confined to the orthogonal complement must
  // converge its lowest Ritz pair to a value at or above the k-th locked one
  // (single-vector Krylov spaces hold one copy per multiple eigenvalue, so
  // copies are only found by restarting against the locked set).
  bool verified = false;
  while (!(static_cast<int>(locked.size()) >= k && verified) &&
         restarts < opts.max_restarts) {
    ++restarts;
    if (!resume.empty()) {
      v = resume;
      resume.clear();
    } else {
      random_start(v);
      if (lam_hi > 0.0 && opts.filter_cutoff < lam_hi) {
        reorthogonalize(v, locked, static_cast<int>(locked.size()));
        cheb_filter(apply, dim, v, opts.filter_degree, opts.filter_cutoff, lam_hi);
      }
    }
    reorthogonalize(v, locked, static_cast<int>(locked.size()));
    double nv = norm2(v);
    if (nv < 1e-14) {
      random_start(v);
      reorthogonalize(v, locked, static_cast<int>(locked.size()));
      nv = norm2(v);
    }
    for (auto& x : v) x /= nv;

    basis.clear();
    basis.push_back(v);
    std::vector<double> alpha, beta;
    bool breakdown = false;
    for (int j = 0; j < m_max; ++j) {
      apply(basis[j], w);
      double a = dot(w, basis[j]);
      alpha.push_back(a);
      for (int i = 0; i < dim; ++i)
        w[i] -= a * basis[j][i] + (j > 0 ? beta[j - 1] * basis[j - 1][i] : 0.0);
      reorthogonalize(w, locked, static_cast<int>(locked.size()));
      reorthogonalize(w, basis, static_cast<int>(basis.size()));
      double b = norm2(w);
      if (b < 1e-13 * std::max(1.0, std::abs(a))) {
        breakdown = true;
        break;
      }
      beta.push_back(b);
      if (j + 1 < m_max) {
        std::vector<double> nxt(dim);
        for (int i = 0; i < dim; ++i) nxt[i] = w[i] / b;
        basis.push_back(std::move(nxt));
      }
    }
    const int m = static_cast<int>(alpha.size());
    if (m == 0) break;

    std::vector<double> d = alpha, e(m, 0.0);
    for (int i = 1; i < m; ++i) e[i] = beta[i - 1];
    std::vector<double> y(static_cast<size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) y[static_cast<size_t>(i) * m + i] = 1.0;
    tql2(m, d, e, &y, m);
    sort_eigen(m, d, &y, m);

    auto kth_locked = [&]() {
      std::vector<double> sorted = locked_vals;
      std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
      return sorted[k - 1];
    };
    int newly_locked = 0;
    bool have_first = false, first_converged = false;
    double first_theta = 0.0;
    for (int t = 0; t < m; ++t) {
      std::vector<double> x(dim, 0.0);
      for (int j = 0; j < static_cast<int>(basis.size()); ++j) {
        double c = y[static_cast<size_t>(j) * m + t];
        for (int i = 0; i < dim; ++i) x[i] += c * basis[j][i];
      }
      reorthogonalize(x, locked, static_cast<int>(locked.size()));
      double nx = norm2(x);
      if (nx < 1e-10) continue;
      for (auto& xi : x) xi /= nx;
      apply(x, w);
      double theta = dot(w, x);
      for (int i = 0; i < dim; ++i) w[i] -= theta * x[i];
      double r = norm2(w);
      if (!have_first) {
        have_first = true;
        first_theta = theta;
        first_converged = r <= tol;
      }
      if (r <= tol) {
        bool useful = static_cast<int>(locked.size()) < k;
        if (!useful) {
          double kth = kth_locked();
          useful = theta < kth + std::max(10.0 * tol, 1e-9 * (1.0 + std::abs(kth)));
        }
        if (!useful) break;  // converged strictly above the k-th locked value
        locked.push_back(std::move(x));
        locked_vals.push_back(theta);
        ++newly_locked;
      } else {
        if (!breakdown && newly_locked == 0) resume = std::move(x);
        break;  // later Ritz values are even less converged
      }
    }
    if (static_cast<int>(locked.size()) >= k && have_first && first_converged) {
      std::vector<double> sorted = locked_vals;
      std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
      double kth = sorted[k - 1];
      double margin = std::max(10.0 * tol, 1e-9 * (1.0 + std::abs(kth)));
      if (first_theta >= kth - margin) verified = true;
    }
    // After locking, restart from a fresh random vector: the exhausted Krylov
    // space holds at most one copy of each multiple eigenvalue, and resuming
    // from a higher Ritz vector would steer past the missing copies.
    if (newly_locked > 0 || (breakdown && newly_locked == 0)) resume.clear();
  }

  std::vector<int> order(locked.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return locked_vals[a] < locked_vals[b]; });
  int kept = std::min<int>(k, static_cast<int>(order.size()));
  res.converged = kept == k;
  for (int t = 0; t < kept; ++t) {
    int i = order[t];
    res.eigenvalues.push_back(locked_vals[i]);
    apply(locked[i], w);
    for (int j = 0; j < dim; ++j) w[j] -= locked_vals[i] * locked[i][j];
    res.residual_norms.push_back(norm2(w));
    res.eigenvectors.push_back(std::move(locked[i]));
  }
  return res;
}

EigenResult lanczos_lowest(const SymmetricOperator& A, int k, double tol,
                           const LanczosOptions& opts) {
  EigenResult r = lanczos_lowest(
      [&](std::span<const double> x, std::span<double> y) { A.apply_sym(x, y); },
      A.dim(), k, tol, opts);
  if (A.has_weights()) {
    for (auto& v : r.eigenvectors)
      for (int i = 0; i < A.dim(); ++i) v[i] /= std::sqrt(A.weights()[i]);
  }
  return r;
}

// --- Bunch-Kaufman LDL^T and inertia -----------------------------------------

namespace {

// In-place lower Bunch-Kaufman factorization of a full row-major n*n buffer.
// ipiv follows the LAPACK convention (0-based):
//   ipiv[j] == p >= 0 : 1x1 pivot, rows/cols j and p swapped;
//   ipiv[j] == ipiv[j+1] == -(p+1) : 2x2 pivot in rows (j, j+1), rows j+1 and
//   p swapped.
struct BKFactor {
  int n = 0;
  std::vector<double> a;
  std::vector<int> ipiv;
};

void bk_swap(std::vector<double>& a, int n, int r1, int r2) {
  if (r1 == r2) return;
  auto A = [&](int i, int j) -> double& { return a[static_cast<size_t>(i) * n + j]; };
  if (r1 > r2) std::swap(r1, r2);
  for (int j = 0; j < r1; ++j) std::swap(A(r1, j), A(r2, j));
  for (int i = r1 + 1; i < r2; ++i) std::swap(A(i, r1), A(r2, i));
  for (int i = r2 + 1; i < n; ++i) std::swap(A(i, r1), A(i, r2));
  std::swap(A(r1, r1), A(r2, r2));
}

BKFactor bk_factor(std::vector<double> a, int n) {
  const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
  BKFactor f;
  f.n = n;
  f.ipiv.assign(n, 0);
  auto A = [&](int i, int j) -> double& { return a[static_cast<size_t>(i) * n + j]; };
  int k = 0;
  while (k < n) {
    double absakk = std::abs(A(k, k));
    int imax = k;
    double colmax = 0.0;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(A(i, k)) > colmax) {
        colmax = std::abs(A(i, k));
        imax = i;
      }
    int kstep = 1, kp = k;
    if (std::max(absakk, colmax) == 0.0) {
      f.ipiv[k] = k;  // exactly zero pivot column: zero eigenvalue
      ++k;
      continue;
    }
    if (absakk >= alpha * colmax) {
      kp = k;
    } else {
      double rowmax = 0.0;
      for (int j = k; j < imax; ++j) rowmax = std::max(rowmax, std::abs(A(imax, j)));
      for (int i = imax + 1; i < n; ++i)
        rowmax = std::max(rowmax, std::abs(A(i, imax)));
      if (absakk * rowmax >= alpha * colmax * colmax) {
        kp = k;
      } else if (std::abs(A(imax, imax)) >= alpha * rowmax) {
        kp = imax;
      } else {
        kp = imax;
        kstep = 2;
      }
    }
    if (kstep == 1) {
      bk_swap(a, n, k, kp);
      f.ipiv[k] = kp;
      double d = A(k, k);
      if (d != 0.0) {
        // rank-1 update with the original column, then scale to multipliers
        for (int i = k + 1; i < n; ++i) {
          double l = A(i, k) / d;
          for (int j = k + 1; j <= i; ++j) A(i, j) -= l * A(j, k);
        }
        for (int i = k + 1; i < n; ++i) A(i, k) /= d;
      }
      ++k;
    } else {
      bk_swap(a, n, k + 1, kp);
      f.ipiv[k] = f.ipiv[k + 1] = -(kp + 1);
      double d11 = A(k, k), d21 = A(k + 1, k), d22 = A(k + 1, k + 1);
      double det = d11 * d22 - d21 * d21;
      if (det == 0.0)
        throw std::runtime_error(
            "inertia_count: pivoting breakdown (singular 2x2 pivot) at step " +
            std::to_string(k));
      for (int i = k + 2; i < n; ++i) {
        double w1 = A(i, k), w2 = A(i, k + 1);
        double l1 = (d22 * w1 - d21 * w2) / det;
        double l2 = (d11 * w2 - d21 * w1) / det;
        for (int j = k + 2; j <= i; ++j) A(i, j) -= l1 * A(j, k) + l2 * A(j, k + 1);
      }
      for (int i = k + 2; i < n; ++i) {
        double w1 = A(i, k), w2 = A(i, k + 1);
        A(i, k) = (d22 * w1 - d21 * w2) / det;
        A(i, k + 1) = (d11 * w2 - d21 * w1) / det;
      }
      k += 2;
    }
  }
  f.a = std::move(a);
  return f;
}

void bk_inertia(const BKFactor& f, double tau, Inertia& io) {
  const int n = f.n;
  auto A = [&](int i, int j) -> double {
    return f.a[static_cast<size_t>(i) * n + j];
  };
  int k = 0;
  while (k < n) {
    if (k + 1 < n && f.ipiv[k] < 0) {
      double a = A(k, k), b = A(k + 1, k), c = A(k + 1, k + 1);
      double t = 0.5 * (a + c);
      double disc = std::hypot(0.5 * (a - c), b);
      for (double lam : {t - disc, t + disc}) {
        if (lam < -tau)
          ++io.n_neg;
        else if (lam > tau)
          ++io.n_pos;
        else
          ++io.n_zero;
      }
      k += 2;
    } else {
      double d = A(k, k);
      if (d < -tau)
        ++io.n_neg;
      else if (d > tau)
        ++io.n_pos;
      else
        ++io.n_zero;
      ++k;
    }
  }
}

// Solve A X = B in place; B is n x r row major. The factorization stores L
// with eagerly swapped rows (bk_swap exchanges whole rows), so the permuted
// matrix satisfies P^T A P = L D L^T exactly and the solve separates into
// plain permutation / triangular / block-diagonal sweeps.
void bk_solve(const BKFactor& f, std::vector<double>& b, int r) {
  const int n = f.n;
  auto A = [&](int i, int j) -> double {
    return f.a[static_cast<size_t>(i) * n + j];
  };
  auto row = [&](int i) { return b.data() + static_cast<size_t>(i) * r; };
  auto swap_rows = [&](int i, int j) {
    if (i == j) return;
    for (int t = 0; t < r; ++t) std::swap(row(i)[t], row(j)[t]);
  };
  // P^T b: interchanges in factorization order
  int k = 0;
  while (k < n) {
    if (f.ipiv[k] >= 0) {
      swap_rows(k, f.ipiv[k]);
      ++k;
    } else {
      swap_rows(k + 1, -f.ipiv[k] - 1);
      k += 2;
    }
  }
  // L y = b
  k = 0;
  while (k < n) {
    int step = (k + 1 < n && f.ipiv[k] < 0) ? 2 : 1;
    for (int c = k; c < k + step; ++c)
      for (int i = k + step; i < n; ++i) {
        double l = A(i, c);
        if (l != 0.0)
          for (int t = 0; t < r; ++t) row(i)[t] -= l * row(c)[t];
      }
    k += step;
  }
  // D z = y
  k = 0;
  while (k < n) {
    if (k + 1 < n && f.ipiv[k] < 0) {
      double d11 = A(k, k), d21 = A(k + 1, k), d22 = A(k + 1, k + 1);
      double det = d11 * d22 - d21 * d21;
      for (int t = 0; t < r; ++t) {
        double x1 = row(k)[t], x2 = row(k + 1)[t];
        row(k)[t] = (d22 * x1 - d21 * x2) / det;
        row(k + 1)[t] = (d11 * x2 - d21 * x1) / det;
      }
      k += 2;
    } else {
      double d = A(k, k);
      if (d == 0.0)
        throw std::runtime_error(
            "inertia_count: pivoting breakdown (zero 1x1 pivot) at step " +
            std::to_string(k));
      for (int t = 0; t < r; ++t) row(k)[t] /= d;
      ++k;
    }
  }
  // L^T x = z
  k = n - 1;
  while (k >= 0) {
    int k0 = (f.ipiv[k] < 0 && k > 0) ? k - 1 : k;
    for (int c = k0; c <= k; ++c)
      for (int i = k + 1; i < n; ++i) {
        double l = A(i, c);
        if (l != 0.0)
          for (int t = 0; t < r; ++t) row(c)[t] -= l * row(i)[t];
      }
    k = k0 - 1;
  }
  // x = P z: interchanges in reverse order
  std::vector<int> starts;
  k = 0;
  while (k < n) {
    starts.push_back(k);
    k += (k + 1 < n && f.ipiv[k] < 0) ? 2 : 1;
  }
  for (auto it = starts.rbegin(); it != starts.rend(); ++it) {
    int kk = *it;
    if (f.ipiv[kk] >= 0)
      swap_rows(kk, f.ipiv[kk]);
    else
      swap_rows(kk + 1, -f.ipiv[kk] - 1);
  }
}

struct DenseBlock {
  int rows = 0, cols = 0;
  std::vector<double> a;
  void init(int r, int c) {
    rows = r;
    cols = c;
    a.assign(static_cast<size_t>(r) * c, 0.0);
  }
  double* row(int i) { return a.data() + static_cast<size_t>(i) * cols; }
  const double* row(int i) const { return a.data() + static_cast<size_t>(i) * cols; }
};

struct SparseBlock {
  std::vector<int> r, c;
  std::vector<double> v;
  void clear() {
    r.clear();
    c.clear();
    v.clear();
  }
};

void sparse_at_w_minus(const SparseBlock& s, const DenseBlock& w, DenseBlock& c) {
  for (std::size_t t = 0; t < s.v.size(); ++t) {
    const double* wr = w.row(s.r[t]);
    double* cr = c.row(s.c[t]);
    double val = s.v[t];
    for (int j = 0; j < w.cols; ++j) cr[j] -= val * wr[j];
  }
}

void dense_at_w_minus(const DenseBlock& e, const DenseBlock& w, DenseBlock& f) {
  for (int r0 = 0; r0 < e.rows; ++r0) {
    const double* er = e.row(r0);
    const double* wr = w.row(r0);
    for (int c0 = 0; c0 < e.cols; ++c0) {
      double val = er[c0];
      if (val == 0.0) continue;
      double* fr = f.row(c0);
      for (int j = 0; j < w.cols; ++j) fr[j] -= val * wr[j];
    }
  }
}

// Blockwise LDL^T elimination over a (possibly cyclic) block-tridiagonal
// layout; the last block doubles as the dense border absorbing the wrap
// coupling. Inertia accumulates per eliminated block (Sylvester's law is
// preserved by the block congruence).
Inertia inertia_block_tridiag(const SymmetricOperator& A, double sigma,
                              double tau) {
  const BlockTridiagLayout& lay = *A.block_layout();
  const SparseSym& sp = A.sparse_data();
  const bool wts = A.has_weights();
  const auto& w = A.weights();
  const int nb = static_cast<int>(lay.offsets.size()) - 1;
  if (nb < 3)
    throw std::invalid_argument("block inertia: need at least 3 blocks");
  std::vector<int> block_of(A.dim());
  for (int b = 0; b < nb; ++b)
    for (int i = lay.offsets[b]; i < lay.offsets[b + 1]; ++i) block_of[i] = b;

  auto bval = [&](int i, int j, double v) {
    return wts ? v / std::sqrt(w[i] * w[j]) : v;
  };

  const int border = nb - 1;
  const int b0 = lay.offsets[border], b1 = lay.offsets[border + 1];
  const int mb = b1 - b0;

  Inertia io;
  DenseBlock D, Dnext, E, Enext, F, WC, WE;
  SparseBlock C, Cnext;
  F.init(mb, mb);
  for (int i = b0; i < b1; ++i) {
    for (int p = sp.row_ptr[i]; p < sp.row_ptr[i + 1]; ++p) {
      int j = sp.col[p];
      if (block_of[j] == border) F.row(i - b0)[j - b0] += bval(i, j, sp.val[p]);
    }
    F.row(i - b0)[i - b0] -= sigma;
  }

  auto load_plane = [&](int b, DenseBlock& Db, SparseBlock& Cb, DenseBlock& Eb) {
    const int r0 = lay.offsets[b], r1 = lay.offsets[b + 1];
    const int m = r1 - r0;
    Db.init(m, m);
    Cb.clear();
    Eb.init(m, mb);
    for (int i = r0; i < r1; ++i) {
      for (int p = sp.row_ptr[i]; p < sp.row_ptr[i + 1]; ++p) {
        int j = sp.col[p];
        int bj = block_of[j];
        double v = bval(i, j, sp.val[p]);
        if (bj == b) {
          Db.row(i - r0)[j - r0] += v;
        } else if (bj == b + 1 && b + 1 != border) {
          Cb.r.push_back(i - r0);
          Cb.c.push_back(j - lay.offsets[b + 1]);
          Cb.v.push_back(v);
        } else if (bj == border) {
          if (!(b == border - 1 || (b == 0 && lay.cyclic)))
            throw std::invalid_argument(
                "block inertia: nonzero outside block-tridiagonal pattern");
          Eb.row(i - r0)[j - b0] += v;
        } else if (bj == b - 1 || (b == 0 && bj == border)) {
          // symmetric counterpart, consumed when bj was eliminated
        } else {
          throw std::invalid_argument(
              "block inertia: nonzero outside block-tridiagonal pattern");
        }
      }
      Db.row(i - r0)[i - r0] -= sigma;
    }
  };

  load_plane(0, D, C, E);
  for (int b = 0; b < nb - 1; ++b) {
    const int m = D.rows;
    BKFactor f = bk_factor(std::move(D.a), m);
    bk_inertia(f, tau, io);
    const bool last = b == nb - 2;
    if (!last) {
      WC.init(m, lay.offsets[b + 2] - lay.offsets[b + 1]);
      for (std::size_t t = 0; t < C.v.size(); ++t)
        WC.row(C.r[t])[C.c[t]] += C.v[t];
      bk_solve(f, WC.a, WC.cols);
    }
    WE = E;
    bk_solve(f, WE.a, WE.cols);
    if (!last) {
      load_plane(b + 1, Dnext, Cnext, Enext);
      sparse_at_w_minus(C, WC, Dnext);
      sparse_at_w_minus(C, WE, Enext);
      dense_at_w_minus(E, WE, F);
      D = std::move(Dnext);
      C = std::move(Cnext);
      E = std::move(Enext);
    } else {
      dense_at_w_minus(E, WE, F);
    }
  }
  BKFactor f = bk_factor(std::move(F.a), mb);
  bk_inertia(f, tau, io);
  return io;
}

}  // namespace

Inertia inertia_count(const SymmetricOperator& A, double sigma) {
  const double tau = A.zero_tolerance();
  if (!A.is_dense() && A.block_layout()) return inertia_block_tridiag(A, sigma, tau);
  if (!A.is_dense() && A.dim() > kEighDenseMaxDim)
    throw std::invalid_argument(
        "inertia_count: sparse operator too large without a block layout");
  std::vector<double> m = A.dense_sym_matrix();
  for (int i = 0; i < A.dim(); ++i) m[static_cast<size_t>(i) * A.dim() + i] -= sigma;
  BKFactor f = bk_factor(std::move(m), A.dim());
  Inertia io;
  bk_inertia(f, tau, io);
  return io;
}

}  // namespace sg
