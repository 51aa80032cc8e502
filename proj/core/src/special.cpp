#include "sg/special.hpp"

#include <cmath>
#include <stdexcept>

namespace sg {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::complex<double> jacobi_theta(const ThetaArg& arg) {
  const double t = arg.tau.imag();
  if (!(t > 0.0)) throw std::domain_error("jacobi_theta: Im tau must be > 0");
  const double y = std::abs(arg.z.imag());
  // Tail of the symmetric truncation at K:
  //   e^{-pi t K^2} e^{2 pi y K} / (1 - e^{-pi t (2K+1)})
  int K = 1;
  while (K < 100000) {
    double expo = -kPi * t * K * K + 2.0 * kPi * y * K;
    if (expo < std::log(1e-14)) {
      double denom = 1.0 - std::exp(-kPi * t * (2.0 * K + 1.0));
      if (std::exp(expo) / denom < 1e-14) break;
    }
    ++K;
  }
  const std::complex<double> ipi(0.0, kPi);
  std::complex<double> sum = 1.0;  // k = 0 term
  for (int k = 1; k <= K; ++k) {
    std::complex<double> common = ipi * (double(k) * double(k)) * arg.tau;
    sum += std::exp(common + 2.0 * ipi * double(k) * arg.z);
    sum += std::exp(common - 2.0 * ipi * double(k) * arg.z);
  }
  return sum;
}

std::complex<double> jacobi_theta_triple_product(std::complex<double> z, double s) {
  if (!(s > 0.0)) throw std::domain_error("triple product: s must be > 0");
  // e^{-2 pi s M} < 1e-16 fixes the factor count
  int M = static_cast<int>(std::ceil(16.0 * std::log(10.0) / (2.0 * kPi * s))) + 1;
  if (M < 2) M = 2;
  const std::complex<double> e2z = std::exp(std::complex<double>(0.0, 2.0 * kPi) * z);
  const std::complex<double> e2zi = std::exp(std::complex<double>(0.0, -2.0 * kPi) * z);
  std::complex<double> prod = 1.0;
  for (int m = 1; m <= M; ++m) {
    double q2m = std::exp(-2.0 * m * kPi * s);
    double qodd = std::exp(-(2.0 * m - 1.0) * kPi * s);
    prod *= (1.0 - q2m) * (1.0 + e2z * qodd) * (1.0 + e2zi * qodd);
  }
  return prod;
}

double hermite_h(int k, double v) {
  if (k < 0) throw std::domain_error("hermite_h: k must be >= 0");
  if (k > 200) throw std::domain_error("hermite_h: k > 200 unsupported");
  // h_k(v) = H_k(v) e^{-v^2/2} with the Hermite polynomial from the
  // oscillator eigenrelation (-d^2/dv^2 + v^2) h_k = (1+2k) h_k, i.e.
  // H_0 = 1, H_1 = 2v, H_{j+1} = 2v H_j - 2j H_{j-1}. The polynomial factor
  // e^{v^2/2} h_k has degree k. An exponent offset keeps the intermediate
  // polynomial values from overflowing for large k.
  double pm1 = 1.0, p = 2.0 * v;
  long exp_off = 0;
  if (k == 0) p = 1.0;
  for (int j = 1; j < k; ++j) {
    double nxt = 2.0 * v * p - 2.0 * static_cast<double>(j) * pm1;
    pm1 = p;
    p = nxt;
    double mag = std::max(std::abs(p), std::abs(pm1));
    if (mag > 1e280) {
      int e;
      std::frexp(mag, &e);
      p = std::ldexp(p, -e);
      pm1 = std::ldexp(pm1, -e);
      exp_off += e;
    }
  }
  // h_k = p * 2^exp_off * e^{-v^2/2}, assembled in log space to detect overflow
  if (p == 0.0) return 0.0;
  double log_abs = std::log(std::abs(p)) + exp_off * std::log(2.0) - 0.5 * v * v;
  if (log_abs > 709.0) throw std::overflow_error("hermite_h: value overflows double");
  return (p < 0.0 ? -1.0 : 1.0) * std::exp(log_abs);
}

}  // namespace sg
