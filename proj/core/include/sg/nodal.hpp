#ifndef SG_NODAL_HPP
#define SG_NODAL_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sg/conformal.hpp"
#include "sg/linalg.hpp"

namespace sg {

// Grid adjacency abstraction so nodal machinery runs on both the flat torus
// and the twisted Heisenberg grid.
struct GridView {
  std::int64_t size = 0;
  int num_axes = 0;
  std::function<std::int64_t(std::int64_t, int, int)> neighbor;
};

GridView torus_view(const TorusGrid& grid);

struct NodalDecomposition {
  std::vector<int> labels;  // 0 reserved for |u| <= tol nodes
  int count = 0;
  std::vector<int> domain_sign;  // indexed 1..count
  std::vector<std::pair<std::int64_t, std::int64_t>> boundary_edges;
  double tol_used = 0.0;
};

// Union-find over same-strict-sign adjacency; labels are assigned in order of
// the smallest node index in each component. tol < 0 uses the default
// 1e-9 * max|u|. Throws when every node is within tol of zero.
NodalDecomposition nodal_domains(const GridView& view, std::span<const double> u,
                                 double tol = -1.0);

struct CourantVerdict {
  bool pass = false;
  int domain_count = 0;
  std::int64_t negative_count = 0;
};

// Courant-type check: nodal domain count of a null vector against nu + 1.
CourantVerdict courant_check(std::int64_t nu, const NodalDecomposition& dec);

struct IdentityResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  // |lhs-rhs| / (|lhs|+|rhs|+eps)
};

// Both sides of  int_Omega |u| P(v) dv = -int_{dOmega} v ||grad u|| dsigma
// on the torus metric: volume sum over the domain against the operator
// action, boundary sum over sign-change faces with edge-midpoint quadrature
// and one-sided gradients (O(h): the boundary is only resolved to faces).
IdentityResult nodal_domain_identity(const DiscreteConformalMetric& metric,
                                     const SymmetricOperator& op,
                                     const NodalDecomposition& dec, int domain,
                                     std::span<const double> u,
                                     std::span<const double> v);

// Whole-manifold version int_M |u| P(v) dv = -2 int_{N(u)} v ||grad u|| dsigma.
IdentityResult green_identity(const DiscreteConformalMetric& metric,
                              const SymmetricOperator& op,
                              const NodalDecomposition& dec,
                              std::span<const double> u,
                              std::span<const double> v);

// int_Omega f |u| omega dv_g with omega = (n-2)/(4(n-1)) e^{(n+2)/2 ups_hat};
// f is meant to be the scalar curvature of e^{2 ups_hat} g.
double obstruction_integral(const DiscreteConformalMetric& metric,
                            const NodalDecomposition& dec, int domain,
                            std::span<const double> u, std::span<const double> f,
                            const ConformalFactor& ups_hat);

struct ConservedT {
  double boundary_value = 0.0;  // -4(n-1)/(n-2) int_dOmega e^{(2-n)/2 U'} ...
  double volume_value = 0.0;    // int_Omega |u| R_g dv_g
};

// The conserved pairing T(u, Omega, ghat) evaluated both through its boundary
// definition at the representative e^{2 ups_hat} g and through the volume
// integral against the base scalar curvature.
ConservedT conserved_T(const DiscreteConformalMetric& metric,
                       const NodalDecomposition& dec, int domain,
                       std::span<const double> u, const ConformalFactor& ups_hat);

// Edges where u - c changes sign strictly.
std::vector<std::pair<std::int64_t, std::int64_t>> level_set(
    const GridView& view, std::span<const double> u, double c);

// Conformally invariant integral  int |u_g|^{2n/(n-2k)} dv_g evaluated at the
// representative ups: the sampled u transforms as a weight (n-2k)/2 density.
// Exact identity at every grid resolution. Throws for k >= n/2.
double lp_invariant(std::span<const double> u, const ConformalFactor& ups,
                    const TorusGrid& grid, int n, int k);

// JSON/CSV export of a decomposition (schema documented in docs/schema.md).
std::string nodal_decomposition_json(const NodalDecomposition& dec);
std::string nodal_point_cloud_csv(const GridView& view,
                                  const std::function<std::vector<double>(std::int64_t)>& coords,
                                  std::span<const double> u,
                                  const NodalDecomposition& dec);

}  // namespace sg

#endif  // SG_NODAL_HPP
