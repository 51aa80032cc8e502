#include "sg/einstein.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sg {

std::vector<EinsteinLine> gjms_spectrum(const EinsteinModel& model, int k) {
  if (model.n < 3) throw std::invalid_argument("gjms_spectrum: need n >= 3");
  if (k < 1) throw std::invalid_argument("gjms_spectrum: need k >= 1");
  if (model.n % 2 == 0 && 2 * k > model.n && !model.einstein_extended)
    throw std::invalid_argument(
        "gjms_spectrum: no conformally invariant operator with principal part "
        "Delta^" + std::to_string(k) + " exists in even dimension " +
        std::to_string(model.n) + " (k > n/2); set einstein_extended to use "
        "the canonical Einstein extension");
  std::vector<EinsteinLine> out;
  out.reserve(model.base_spectrum.size());
  for (const auto& [mu, mult] : model.base_spectrum) {
    double prod = 1.0;
    for (int j = 1; j <= k; ++j)
      prod *= mu + 0.25 * model.lambda * (model.n + 2 * j - 2) * (model.n - 2 * j);
    out.push_back({prod, mult});
  }
  std::sort(out.begin(), out.end(), [](const EinsteinLine& a, const EinsteinLine& b) {
    return a.eigenvalue < b.eigenvalue;
  });
  return out;
}

double mu_j(int j, int n) {
  if (n < 2) throw std::invalid_argument("mu_j: need n >= 2");
  return static_cast<double>(n + 2 * j - 2) * static_cast<double>(n - 2 * j) /
         (4.0 * (n - 1));
}

double hyperbolic_product_eigenvalue(double lambda_surface, int k, int n) {
  double prod = 1.0;
  for (int j = 1; j <= k; ++j) prod *= lambda_surface - mu_j(j, n);
  return prod;
}

GjmsNegativeCount count_negative_gjms_product(const HyperbolicProductModel& model) {
  const int n = model.n, k = model.k;
  if (n < 4) throw std::invalid_argument("count_negative_gjms_product: need n >= 4");
  GjmsNegativeCount out;
  bool odd_low = (k % 2 == 1) && (2 * k <= n - 1);
  bool extended = (n % 4 == 0 || n % 4 == 1) && (2 * k >= n);
  out.within_stated_hypotheses = odd_low || extended;
  for (double lam : model.surface_spectrum) {
    double v = hyperbolic_product_eigenvalue(lam, k, n);
    if (v < 0.0) {
      ++out.count;
      out.negative_eigenvalues.push_back(v);
    }
  }
  return out;
}

double yamabe_product_bound(double t, double mu_sup, double lambda_surface, int n) {
  if (!(t > 0.0)) throw std::invalid_argument("yamabe_product_bound: need t > 0");
  if (n < 4) throw std::invalid_argument("yamabe_product_bound: need n >= 4");
  return t * (lambda_surface - static_cast<double>(n - 2) / (2.0 * (n - 1)) +
              mu_sup / t);
}

}  // namespace sg
