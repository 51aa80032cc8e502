#ifndef SG_PRESCRIPTION_HPP
#define SG_PRESCRIPTION_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sg/conformal.hpp"
#include "sg/linalg.hpp"

namespace sg {

// Q_1 curvature samples of the metric: 2/(n-2) P_1(1), pointwise. Agrees with
// Rhat/(2(n-1)) up to discretization error (the flux Laplacian kills
// constants, so only the zeroth-order term survives).
std::vector<double> q_curvature(const DiscreteConformalMetric& metric);

// Weighted pairing  sum_i u_i v_i e^{n ups'_i} h^n at the conformal
// representative ups'.
double constraint_functional(std::span<const double> u, std::span<const double> v,
                             const ConformalFactor& ups_prime,
                             const TorusGrid& grid, int n);

enum class ForbiddenVerdict { kForbidden, kNotDecided };

struct ForbiddenReport {
  ForbiddenVerdict verdict = ForbiddenVerdict::kNotDecided;
  int relative_sign = 0;          // +1: same strict sign as u, -1: opposite
  double margin = 0.0;            // min |probe integral| over the probe set
  int probes_used = 0;
  double sign_tolerance = 0.0;    // nodes with |u| <= tol excluded
  std::vector<double> probe_integrals;
};

// Checks whether s_u has the same or opposite strict sign as u wherever
// |u| > 1e-6 ||u||_inf. If so the pairing integral against every probe
// conformal factor keeps one sign with a positive margin, which excludes s_u
// from the attainable Q-curvatures; otherwise the criterion does not decide.
ForbiddenReport forbidden_function_test(std::span<const double> u,
                                        std::span<const double> s_u,
                                        const TorusGrid& grid, int n,
                                        int probe_count = 20,
                                        std::uint64_t probe_seed = 1234,
                                        double probe_amplitude = 0.3);

enum class ConstantQVerdict { kObstructed, kNotObstructed };

struct ConstantQReport {
  ConstantQVerdict verdict = ConstantQVerdict::kNotObstructed;
  std::vector<double> witness;  // numerically single-signed kernel element
  double witness_min = 0.0, witness_max = 0.0;
  int combinations_tried = 0;
};

// Scans the kernel basis and 100 seeded random unit combinations for a
// numerically single-signed vector (min*max >= -tol*||u||_inf^2). Finding one
// rules out nonzero constant Q-curvatures in the class.
ConstantQReport constant_q_obstruction(const KernelBasis& kernel,
                                       double tol = 1e-9,
                                       std::uint64_t seed = 77);

struct NowhereVanishingReport {
  bool found = false;
  std::vector<double> witness;
  std::vector<double> rescale_ups;  // (2/(n-2k)) log u for positive witnesses
  double q_residual = 0.0;          // ||P_hat(1)|| in the rescaled metric
  std::string note;
};

// Searches the kernel span for a numerically nowhere-vanishing element; when
// one exists (taken positive), the factor (2/(n-2)) log u rescales the metric
// so the constant function is annihilated; the report carries the verified
// residual of that statement through the conjugation identity.
NowhereVanishingReport nowhere_vanishing_kernel_check(
    const KernelBasis& kernel, const SymmetricOperator& op,
    const TorusGrid& grid, int n, std::uint64_t seed = 77);

// Residual of the curvature prescription equation at k = 1:
//   || P_1 u - (n-2)/2 Qhat u^{(n+2)/(n-2)} ||_w / ||u||_w,  u > 0 strictly.
double prescription_pde_residual(std::span<const double> u,
                                 const DiscreteConformalMetric& base,
                                 std::span<const double> q_hat);

}  // namespace sg

#endif  // SG_PRESCRIPTION_HPP
