#ifndef SG_CONFORMAL_HPP
#define SG_CONFORMAL_HPP

#include <cstdint>
#include <vector>

#include "sg/linalg.hpp"

namespace sg {

// Periodic grid on the flat n-torus, N nodes per axis, spacing h = 1/N.
struct TorusGrid {
  int n = 3;  // dimension, 3 or 4
  int N = 16;

  static TorusGrid create(int n, int N);
  std::int64_t size() const;
  std::int64_t neighbor(std::int64_t idx, int axis, int delta) const;
  std::vector<double> coords(std::int64_t idx) const;
  double h() const { return 1.0 / N; }
};

// Sampled conformal factor Upsilon for the metric e^{2 Upsilon} * flat.
struct ConformalFactor {
  std::vector<double> values;
};

// Seeded random trigonometric polynomial with max frequency 2 per axis,
// scaled to the given sup norm. Sampling the same seed on finer grids gives
// the same continuum function.
ConformalFactor bandlimited_factor(const TorusGrid& grid, std::uint64_t seed,
                                   double amplitude);
ConformalFactor constant_factor(const TorusGrid& grid, double value);

struct DiscreteConformalMetric {
  TorusGrid grid;
  ConformalFactor upsilon;
  std::vector<double> volume_weights() const;  // e^{n Upsilon} h^n per node
};

// Flux-form discretization of u -> -e^{-n Ups} div(e^{(n-2) Ups} grad u):
// edge conductance exp((n-2)(Ups_i+Ups_j)/2)/h^2, self-adjoint with respect
// to the volume weights; constants lie in the kernel exactly. Carries a
// cyclic block-tridiagonal layout over first-axis planes.
SymmetricOperator laplace_beltrami(const DiscreteConformalMetric& metric);

// Scalar curvature of e^{2 Ups} * flat from the classical transformation
//   Rhat = e^{-2 Ups}(2(n-1) Lap0 Ups - (n-1)(n-2) |grad0 Ups|^2)
// with Lap0 the positive flat discrete Laplacian and centered gradients.
std::vector<double> scalar_curvature_conformal(const ConformalFactor& ups,
                                               const TorusGrid& grid, int n);

// laplace_beltrami plus the zeroth-order (n-2)/(4(n-1)) Rhat term.
SymmetricOperator yamabe_direct(const DiscreteConformalMetric& metric);

// Exactly covariant construction u -> e^{-(n+2)Ups/2} Lap0 (e^{(n-2)Ups/2} u),
// self-adjoint with respect to the same volume weights.
SymmetricOperator yamabe_conjugated(const ConformalFactor& ups,
                                    const TorusGrid& grid, int n);

// max over `nvec` seeded bandlimited test vectors u of
// ||(yamabe_direct - yamabe_conjugated) u||_w / ||u||_w.
double covariance_residual(const ConformalFactor& ups, const TorusGrid& grid,
                           int n, int nvec = 10, std::uint64_t seed = 100);

struct KernelBasis {
  std::vector<std::vector<double>> vectors;  // W-orthonormal
  std::vector<double> eigenvalues;
  double tol_used = 0.0;
  bool gap_warning = false;  // spectral gap around tol smaller than 10x tol
};

// Eigenvectors with |lambda| <= tol0 (lowest `probe` eigenpairs examined).
KernelBasis kernel_basis(const SymmetricOperator& op, double tol0, int probe = 6,
                         std::uint64_t seed = 0);

// Bisection for |lambda_j(yamabe_direct(c * ups0))| < tol0 along c in
// [c_lo, c_hi], at most 60 iterations. Throws when lambda_j does not change
// sign over the sampled range. (On a conformally flat torus the weighted
// Yamabe spectrum is nonnegative with lambda_1 = 0 for every factor, so for
// j >= 2 this reports the missing sign change rather than inventing one.)
struct TuneResult {
  double c_star = 0.0;
  double lambda_j = 0.0;
  int iterations = 0;
};
TuneResult tune_to_kernel(const TorusGrid& grid, int n,
                          const ConformalFactor& ups0, int j, double c_lo,
                          double c_hi, std::uint64_t seed = 0);

// Pointwise density transform u -> e^{-w Ups} u.
std::vector<double> density_transform(const std::vector<double>& u,
                                      const ConformalFactor& ups, double w);

}  // namespace sg

#endif  // SG_CONFORMAL_HPP
