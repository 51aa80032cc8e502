#ifndef SG_EINSTEIN_HPP
#define SG_EINSTEIN_HPP

#include <cstdint>
#include <utility>
#include <vector>

namespace sg {

// GJMS spectra on Einstein manifolds (Ric = lambda (n-1) g) from the product
// formula P_k = prod_j (Delta + (lambda/4)(n+2j-2)(n-2j)).

struct EinsteinModel {
  int n = 0;          // dimension >= 3
  double lambda = 0;  // Einstein constant
  std::vector<std::pair<double, std::int64_t>> base_spectrum;  // (Delta eig, mult)
  // Even-dimensional Einstein metrics carry a canonical extension of the
  // P_k family beyond k = n/2; callers must opt in.
  bool einstein_extended = false;
};

struct EinsteinLine {
  double eigenvalue = 0;
  std::int64_t multiplicity = 0;
};

// Spectrum of P_k, sorted ascending. Throws std::invalid_argument when n is
// even and k > n/2 without the einstein_extended flag (no conformally
// invariant operator with principal part Delta^k exists there).
std::vector<EinsteinLine> gjms_spectrum(const EinsteinModel& model, int k);

// mu_j = (n+2j-2)(n-2j) / (4(n-1))
double mu_j(int j, int n);

// Lambda_k(lambda) = prod_{1<=j<=k} (lambda - mu_j) for the Ric = -g product
// normalization of hyperbolic products.
double hyperbolic_product_eigenvalue(double lambda_surface, int k, int n);

struct HyperbolicProductModel {
  int n = 0;                            // total dimension >= 4
  std::vector<double> surface_spectrum; // eigenvalues of the surface Laplacian
  int k = 1;                            // operator order
};

struct GjmsNegativeCount {
  std::int64_t count = 0;
  // True when (k odd and k <= (n-1)/2) or (n in {4l, 4l+1} and k >= n/2);
  // outside that range the count is still computed but carries no sign
  // guarantee from the product structure.
  bool within_stated_hypotheses = false;
  std::vector<double> negative_eigenvalues;  // the Lambda_k values < 0
};

GjmsNegativeCount count_negative_gjms_product(const HyperbolicProductModel& model);

// Rayleigh-quotient upper bound t (lambda - (n-2)/(2(n-1)) + mu/t) for the
// Yamabe operator on N x Sigma with the t-scaled product metric.
double yamabe_product_bound(double t, double mu_sup, double lambda_surface, int n);

}  // namespace sg

#endif  // SG_EINSTEIN_HPP
