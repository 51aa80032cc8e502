// Test-side oracles, independent of the library's solution paths.
#ifndef SG_TESTS_ORACLES_HPP
#define SG_TESTS_ORACLES_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace oracle {

// Eigenvalue count below sigma through the signs of the leading principal
// minors of A - sigma I (Sturm-style sign count via unpivoted elimination;
// exact zero pivots get a tiny perturbation).
inline int count_eigs_below(std::vector<double> a, int n, double sigma) {
  for (int i = 0; i < n; ++i) a[static_cast<size_t>(i) * n + i] -= sigma;
  int neg = 0;
  for (int k = 0; k < n; ++k) {
    double piv = a[static_cast<size_t>(k) * n + k];
    if (piv == 0.0) piv = 1e-300;
    if (piv < 0) ++neg;
    for (int i = k + 1; i < n; ++i) {
      double l = a[static_cast<size_t>(i) * n + k] / piv;
      for (int j = k; j < n; ++j)
        a[static_cast<size_t>(i) * n + j] -= l * a[static_cast<size_t>(k) * n + j];
    }
  }
  return neg;
}

// Small exact rational arithmetic on int64 (enough for the closed-form
// constants tested here).
struct Rational {
  long long p = 0, q = 1;
  Rational(long long num = 0, long long den = 1) : p(num), q(den) { reduce(); }
  void reduce() {
    if (q < 0) {
      p = -p;
      q = -q;
    }
    long long g = std::gcd(p < 0 ? -p : p, q);
    if (g > 1) {
      p /= g;
      q /= g;
    }
  }
  Rational operator+(const Rational& o) const { return {p * o.q + o.p * q, q * o.q}; }
  Rational operator-(const Rational& o) const { return {p * o.q - o.p * q, q * o.q}; }
  Rational operator*(const Rational& o) const { return {p * o.p, q * o.q}; }
  Rational operator/(const Rational& o) const { return {p * o.q, q * o.p}; }
  bool operator==(const Rational& o) const { return p == o.p && q == o.q; }
  double value() const { return static_cast<double>(p) / q; }
};

inline Rational paneitz_c0(long long d) {
  Rational num((2 * d - 3) * ((2 * d + 1) * (2 * d - 1) * (2 * d - 1) -
                              4 * (16 * d * d + 18 * d + 1)));
  Rational den(256 * (2 * d - 1) * (2 * d - 1));
  return num / den;
}

inline Rational paneitz_c1(long long d) {
  return Rational((2 * d - 1) * (2 * d - 1) - 12) / Rational(8 * (2 * d - 1));
}

inline Rational paneitz_delta0(long long d) {
  Rational c1 = paneitz_c1(d), c0 = paneitz_c0(d);
  return c1 * c1 - Rational(4) * c0;
}

// 4th-order (5-point) finite-difference second derivative.
template <typename F>
double second_derivative(F&& f, double x, double h) {
  return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) -
          f(x - 2 * h)) /
         (12 * h * h);
}

// Brute-force exact nu_1 on Gamma_r \ H_d (d = 1 only) by direct loops over a
// generous label box; independent of the production enumeration bounds.
inline long long brute_nu1_d1(double s, int r1 = 1) {
  const double pi = 3.14159265358979323846;
  double T = s * s * s * s / 16.0;
  long long count = 0;
  int xi_lim = static_cast<int>(std::sqrt(T) / (2 * pi)) + 2;
  int nu_lim = static_cast<int>(std::sqrt(T) / (2 * pi * s) * r1) + 2;
  for (int xi = -xi_lim; xi <= xi_lim; ++xi)
    for (int nu = -nu_lim; nu <= nu_lim; ++nu) {
      double eta = static_cast<double>(nu) / r1;
      if (4 * pi * pi * (xi * xi + s * s * eta * eta) < T) ++count;
    }
  int n_lim = static_cast<int>(std::sqrt(T / (4 * pi * pi)) * s) + 2;
  for (int n = 1; n <= n_lim; ++n)
    for (int a = 0;; ++a) {
      double mu = 2 * pi * n * s * (1 + 2 * a) + 4.0 * n * n / (s * s) * pi * pi;
      if (mu >= T) break;
      count += 2LL * n * r1;  // +-n, multiplicity |n| |Gamma_r|
    }
  return count;
}

// Same for the Paneitz count at d = 2, r = (1,1).
inline long long brute_nu2_d2(double s) {
  const double pi = 3.14159265358979323846;
  double c0 = -359.0 / 2304.0, c1 = -1.0 / 8.0;
  double d0 = c1 * c1 - 4 * c0;
  double S = std::pow(s, 6);
  double lo = 0.5 * (c1 * S - std::sqrt(d0) * S);
  double hi = 0.5 * (c1 * S + std::sqrt(d0) * S);
  long long count = 0;
  int xl = static_cast<int>(std::sqrt(hi) / (2 * pi)) + 2;
  int el = static_cast<int>(std::sqrt(hi) / (2 * pi * s)) + 2;
  for (int x1 = -xl; x1 <= xl; ++x1)
    for (int x2 = -xl; x2 <= xl; ++x2)
      for (int e1 = -el; e1 <= el; ++e1)
        for (int e2 = -el; e2 <= el; ++e2) {
          double l0 = 4 * pi * pi *
                      (x1 * x1 + x2 * x2 + s * s * (e1 * e1 + e2 * e2));
          if (l0 > lo && l0 < hi) ++count;
        }
  int n_lim = static_cast<int>(std::sqrt(hi / (4 * pi * pi)) * s * s) + 2;
  for (int n = 1; n <= n_lim; ++n) {
    double dn = d0 * S * S + 16.0 * 3.0 / 3.0 * n * n * pi * pi * s * s;
    double hn = 0.5 * (c1 * S + std::sqrt(dn));
    double ln = 0.5 * (c1 * S - std::sqrt(dn));
    for (int a = 0;; ++a) {
      double mu = 2 * pi * n * s * (2 + 2 * a) +
                  4.0 * n * n * std::pow(s, -4.0) * pi * pi;
      if (mu >= hn) break;
      if (mu > ln) count += 2LL * n * n * (a + 1);
    }
  }
  return count;
}

}  // namespace oracle

#endif  // SG_TESTS_ORACLES_HPP
