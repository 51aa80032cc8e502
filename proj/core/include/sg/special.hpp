#ifndef SG_SPECIAL_HPP
#define SG_SPECIAL_HPP

#include <complex>

namespace sg {

struct ThetaArg {
  std::complex<double> z;
  std::complex<double> tau;  // Im tau > 0 strictly
};

// Jacobi theta function  sum_k exp(i pi k^2 tau) exp(2 i pi k z), truncated
// symmetrically with a geometric tail bound below 1e-14. Accurate to about
// 1e-12 absolute for |Im z| <= 5 Im tau. Throws std::domain_error unless
// Im tau > 0.
std::complex<double> jacobi_theta(const ThetaArg& arg);

// Same function for purely imaginary tau = i s via the triple product
//   prod_{m>=1} (1-q^{2m})(1+e^{2i pi z} q^{2m-1})(1+e^{-2i pi z} q^{2m-1}),
// q = e^{-pi s}. Throws std::domain_error unless s > 0.
std::complex<double> jacobi_theta_triple_product(std::complex<double> z, double s);

// Hermite function h_k(v) = H_k(v) e^{-v^2/2}, the k-th eigenfunction of the
// harmonic oscillator: (-d^2/dv^2 + v^2) h_k = (1+2k) h_k. Computed through
// the stable three-term recurrence for the polynomial factor with
// overflow-guarded rescaling. Supported for k <= 200; a final value
// overflowing a double throws std::overflow_error instead of returning inf.
double hermite_h(int k, double v);

}  // namespace sg

#endif  // SG_SPECIAL_HPP
