#ifndef SG_HEISENBERG_HPP
#define SG_HEISENBERG_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sg/linalg.hpp"

namespace sg {

// Compact quotient of the (2d+1)-dimensional Heisenberg group by the lattice
// determined by r = (r_1, ..., r_d), r_j | r_{j+1}, carrying the left
// invariant metric family g_s (s > 0). Coordinates (x, y, t) with fundamental
// domain [0,1)^d x [0,r_1) x ... x [0,r_d) x [0,1).
struct HeisenbergModel {
  int d = 1;
  std::vector<int> r;
  double s = 1.0;

  static HeisenbergModel create(int d, std::vector<int> r, double s);

  int dimension() const { return 2 * d + 1; }  // n = 2d+1 >= 3
  std::int64_t volume() const;                 // |Gamma_r| = r_1 ... r_d
};

// Element of the dual lattice Lambda' = Z^d x prod_j (1/r_j) Z. eta_j is
// stored as the integer nu_j with eta_j = nu_j / r_j.
struct CharacterLabel {
  std::vector<int> xi;
  std::vector<int> nu;
};

// Hermite eigenfunction family, summarized by (n, |alpha|). The (a, b, alpha)
// degeneracy within a family is carried by the multiplicity
// |n|^d |Gamma_r| binom(|alpha|+d-1, d-1).
struct HermiteLabel {
  int n = 1;           // nonzero
  int alpha_norm = 0;  // |alpha|
};

enum class OperatorKind { kLaplacian, kYamabe, kPaneitz };

struct SpectralLine {
  double eigenvalue = 0.0;
  std::int64_t multiplicity = 1;
  bool is_character = true;
  CharacterLabel character;
  HermiteLabel hermite;
  OperatorKind op = OperatorKind::kLaplacian;
};

struct PaneitzConstants {
  double c0 = 0.0;
  double c1 = 0.0;
  double delta0 = 0.0;  // c1^2 - 4 c0 (recomputed, not a simplified form)
};

// --- closed-form spectra -----------------------------------------------------

// All dual lattice points with |xi|^2 + |eta|^2 <= radius^2, in lexicographic
// order of the integer tuple (xi_1..xi_d, nu_1..nu_d).
std::vector<CharacterLabel> dual_lattice_points(const HeisenbergModel& model,
                                                double radius);

double scalar_curvature(const HeisenbergModel& model);  // -(d/2) s^{2d+2}

double laplace_eigenvalue(const HeisenbergModel& model, const CharacterLabel& c);
double laplace_eigenvalue(const HeisenbergModel& model, const HermiteLabel& h);
double yamabe_eigenvalue(const HeisenbergModel& model, const CharacterLabel& c);
double yamabe_eigenvalue(const HeisenbergModel& model, const HermiteLabel& h);

PaneitzConstants paneitz_constants(int d);
double paneitz_eigenvalue(const HeisenbergModel& model, const CharacterLabel& c);
double paneitz_eigenvalue(const HeisenbergModel& model, const HermiteLabel& h);

std::int64_t hermite_multiplicity(const HeisenbergModel& model, int n,
                                  int alpha_norm);

// Unique s > 0 placing the (n, |alpha|) Hermite family in ker P_{1,g_s}:
//   s^{2d+1} = (8 pi |n| / (2d-1)) (2(d+2|alpha|) + sqrt(4(d+2|alpha|)^2+2d-1)).
double yamabe_null_parameter(int d, int n, int alpha_norm);

// All spectral lines of the given operator with eigenvalue <= max_eigenvalue,
// sorted ascending (ties broken deterministically). Enumeration bounds are
// derived from the closed forms, not guessed.
std::vector<SpectralLine> closed_form_spectrum(const HeisenbergModel& model,
                                               OperatorKind op,
                                               double max_eigenvalue);

// Collapse numerically equal lines: (eigenvalue, total multiplicity), sorted.
std::vector<std::pair<double, std::int64_t>> merge_lines(
    const std::vector<SpectralLine>& lines, double tol = 1e-9);

// --- negative eigenvalue counting --------------------------------------------

struct HermiteFamilyCount {
  int n = 0;
  int alpha_norm = 0;
  std::int64_t multiplicity = 0;
};

struct NegativeCountCertificate {
  std::int64_t character_count = 0;
  std::int64_t hermite_count = 0;
  // Explicit contributing labels; suppressed (flags false) above the listing
  // cap since sweeps at large s produce astronomically many labels.
  bool characters_listed = true;
  bool hermite_listed = true;
  std::vector<CharacterLabel> characters;
  std::vector<HermiteFamilyCount> hermite_families;
  double character_radius_sq = 0.0;  // enumeration bound |xi|^2+s^2|eta|^2 < this
  int hermite_n_bound = 0;           // last n examined
};

struct NegativeCount {
  std::int64_t nu = 0;
  NegativeCountCertificate certificate;
};

NegativeCount count_negative_yamabe(const HeisenbergModel& model,
                                    std::int64_t listing_cap = 100000);
// Requires d >= 2 (the d = 1 discriminant delta0 is negative; the quadratic
// sign analysis this count relies on does not apply).
NegativeCount count_negative_paneitz(const HeisenbergModel& model,
                                     std::int64_t listing_cap = 100000);

// --- eigenfunctions and nodal sets -------------------------------------------

struct HermitePointLabel {
  int n = 1;
  std::vector<double> a;      // components in {0, 1/|n|, ..., (|n|-1)/|n|}
  std::vector<double> b;      // components in {0, 1/r_j, ..., (r_j-1)/r_j}
  std::vector<int> alpha;     // multi-index
};

struct HeisenbergPoint {
  std::vector<double> x;  // length d, in [0,1)
  std::vector<double> y;  // length d, in [0,r_j)
  double t = 0.0;         // in [0,1)
};

std::complex<double> eigenfunction_value(const HeisenbergModel& model,
                                         const CharacterLabel& label,
                                         const HeisenbergPoint& p);
// alpha = 0 evaluates through the theta-product form; alpha != 0 through the
// truncated k-sum (Gaussian factor below 1e-14 cut). `force_ksum` evaluates
// the k-sum path regardless, for cross-checking the two routes.
std::complex<double> eigenfunction_value(const HeisenbergModel& model,
                                         const HermitePointLabel& label,
                                         const HeisenbergPoint& p,
                                         bool force_ksum = false);

// Codimension-2 sheet x_j = const, y_j in a half-integer ladder (times the
// remaining coordinates and the t-circle).
struct NodalSheet {
  int axis = 0;          // j
  double x_value = 0.0;
  std::vector<double> y_values;
};

// Nodal set of W_{sign 1}^{0,b} f_0 at the ground null parameter. Throws
// unless s matches yamabe_null_parameter(d, 1, 0) to 1e-8 relative.
std::vector<NodalSheet> nodal_set_hermite_ground(const HeisenbergModel& model,
                                                 const std::vector<double>& b,
                                                 int sign);

// --- character kernel analysis (d = 1, r = (1)) -------------------------------

struct CharacterNodalSet {
  enum class Kind { kXSheets, kYSheets, kProduct, kDiagonal } kind;
  std::vector<double> x_values;
  std::vector<double> y_values;
  int xi = 0, eta = 0;  // diagonal family: {(x,y): 2(xi x + eta y) in Z}
};

struct CharacterNullReport {
  bool has_positive_s = false;
  double s = 0.0;
  double residual = 0.0;  // |lambda(xi,eta)| at the returned s
  int kernel_dim = 0;     // 2 when one index vanishes, 4 when both nonzero
  std::vector<CharacterNodalSet> nodal_sets;
};

CharacterNullReport character_null_analysis(const HeisenbergModel& model, int xi,
                                            int eta);

// --- twisted-grid discretization ----------------------------------------------

// Sparse discretization of Delta_{g_s} on the fundamental domain with the
// left-quotient gluing (x+e_j, y, t+y_j) ~ (x,y,t), N >= 8 points per unit
// length (N r_j along y_j so the t-twist lands on grid nodes). Uniform
// measure (det g_s = 1). Stencil:
//   -X_j^2, -T^2        : 3-point second differences,
//   -s^2 Y_j^2          : 3-point second differences in y_j and (x_j^2-weighted)
//                         t plus the symmetric centered cross term
//                         2 x_j D_{y_j} D_t.
// The operator carries a cyclic block-tridiagonal layout over x_1-planes so
// inertia_count can factor it blockwise.
SymmetricOperator twisted_grid_laplacian(const HeisenbergModel& model, int N);

// PSD discretization of -T^2 on the same grid (3-point), for assembling the
// Paneitz operator as a matrix polynomial.
SymmetricOperator twisted_grid_vertical(const HeisenbergModel& model, int N);

// Grid geometry helpers shared with nodal-set sampling.
struct TwistedGrid {
  int d = 1;
  int N = 0;
  std::vector<int> r;
  std::vector<int> dims;  // per-axis sizes: d x-axes, d y-axes, t
  std::int64_t size() const;
  std::int64_t index(const std::vector<int>& coords) const;
  HeisenbergPoint point(std::int64_t idx) const;
  // neighbor with axis shifted +-1, applying the quotient identifications
  std::int64_t neighbor(std::int64_t idx, int axis, int delta) const;
};

TwistedGrid make_twisted_grid(const HeisenbergModel& model, int N);

}  // namespace sg

#endif  // SG_HEISENBERG_HPP
