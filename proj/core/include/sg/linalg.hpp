#ifndef SG_LINALG_HPP
#define SG_LINALG_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sg {

// Largest dimension eigh_dense accepts. The solver is O(n^3) with dense
// workspace, so 4096 already means ~25s and ~260MB; callers wanting a few
// extreme eigenpairs of something larger should use lanczos_lowest.
inline constexpr int kEighDenseMaxDim = 4096;

struct SparseSym {
  int n = 0;
  std::vector<int> row_ptr;   // size n+1
  std::vector<int> col;
  std::vector<double> val;
};

// Optional structure hint: the matrix is block tridiagonal with respect to
// consecutive index blocks [offsets[b], offsets[b+1]), possibly with an
// extra coupling between the first and last block (cyclic). inertia_count
// exploits this to factor large sparse operators blockwise.
struct BlockTridiagLayout {
  std::vector<int> offsets;
  bool cyclic = false;
};

// Symmetric operator in a (possibly weighted) inner product.
//
// The stored matrix S is symmetric; the operator acting on functions is
//   A = W^{-1} S        with W = diag(w), all w_i > 0,
// so that <Au, v>_w = u^T S v = <u, Av>_w. With no weights, A = S.
// Eigenvalues of A are those of the symmetric B = W^{-1/2} S W^{-1/2};
// eigenvectors are returned W-orthonormal (v = W^{-1/2} q).
class SymmetricOperator {
 public:
  // Dense constructors. `full` is n*n row major and checked for symmetry:
  // an asymmetric pair throws with the offending (i, j).
  static SymmetricOperator dense_from_full(int n, std::span<const double> full);
  // `lower` is the packed lower triangle, row by row (n*(n+1)/2 entries).
  static SymmetricOperator dense_from_lower(int n, std::vector<double> lower);
  static SymmetricOperator sparse(SparseSym s);  // pattern+value symmetry checked

  void set_weights(std::vector<double> w);  // throws unless all w_i > 0
  void set_block_layout(BlockTridiagLayout layout);

  int dim() const { return n_; }
  bool is_dense() const { return !lower_.empty(); }
  bool has_weights() const { return !weights_.empty(); }
  const std::vector<double>& weights() const { return weights_; }
  const SparseSym& sparse_data() const { return sp_; }
  const std::vector<double>& lower_data() const { return lower_; }
  const BlockTridiagLayout* block_layout() const {
    return layout_.offsets.empty() ? nullptr : &layout_;
  }

  double entry(int i, int j) const;  // of S

  // y = B x with B = W^{-1/2} S W^{-1/2} (B = S when unweighted).
  void apply_sym(std::span<const double> x, std::span<double> y) const;

  // y = A x with A = W^{-1} S, the operator acting on functions.
  void apply_raw(std::span<const double> x, std::span<double> y) const;

  double norm1() const;  // max absolute column sum of B

  // Tolerance below which an eigenvalue counts as zero:
  // tau0 = 1e-8 * (1 + ||B||_1). Scales with the operator magnitude.
  double zero_tolerance() const { return 1e-8 * (1.0 + norm1()); }

  // Dense n*n copy of B (used by eigh_dense / dense inertia).
  std::vector<double> dense_sym_matrix() const;

 private:
  int n_ = 0;
  std::vector<double> lower_;    // dense storage (packed lower triangle of S)
  SparseSym sp_;                 // sparse storage of S
  std::vector<double> weights_;
  BlockTridiagLayout layout_;
  mutable double norm1_cache_ = -1.0;
};

struct EigenResult {
  std::vector<double> eigenvalues;               // ascending
  std::vector<std::vector<double>> eigenvectors; // orthonormal in the declared product
  std::vector<double> residual_norms;            // ||A v - lambda v|| (weighted norm)
  bool converged = true;
};

// Full spectrum of a dense operator via Householder tridiagonalization and
// implicit-shift QL. dim() must be <= kEighDenseMaxDim. Residuals are
// computed exactly for n <= 1024 and reported as the backward-stable bound
// eps * n * ||B||_1 above that (documented cost tradeoff).
EigenResult eigh_dense(const SymmetricOperator& A);

struct LanczosOptions {
  int max_basis = 140;        // Krylov basis per restart (full reorthogonalization)
  int max_restarts = 60;      // deflation restarts; multiple eigenvalues need one each
  std::uint64_t seed = 0;     // deterministic start vectors
  // Chebyshev start-vector filter: accelerates convergence when the wanted
  // eigenvalues sit far below the operator norm. 0 disables.
  int filter_degree = 0;
  double filter_cutoff = 0.0; // passband upper edge; <=0 means auto
};

// k algebraically smallest eigenpairs of a self-adjoint action via Lanczos
// with full reorthogonalization and locking. `apply` must implement the
// symmetrized action (same convention as SymmetricOperator::apply_sym).
// Residuals are verified with explicit matvecs; a pair whose residual
// exceeds `tol` leaves the result flagged converged = false.
EigenResult lanczos_lowest(
    const std::function<void(std::span<const double>, std::span<double>)>& apply,
    int dim, int k, double tol, const LanczosOptions& opts = {});

EigenResult lanczos_lowest(const SymmetricOperator& A, int k, double tol,
                           const LanczosOptions& opts = {});

struct Inertia {
  std::int64_t n_neg = 0;
  std::int64_t n_zero = 0;
  std::int64_t n_pos = 0;
};

// Sylvester inertia of A - sigma*I (in the declared inner product): counts of
// eigenvalues below / at / above sigma, where "at" means within the operator's
// zero tolerance. Dense operators use Bunch-Kaufman pivoted LDL^T; sparse
// operators need a BlockTridiagLayout (blockwise elimination, dense
// Bunch-Kaufman per block) or dim() <= kEighDenseMaxDim for densification.
// A breakdown that pivoting cannot repair throws, naming the pivot step.
Inertia inertia_count(const SymmetricOperator& A, double sigma);

// --- small shared helpers ---------------------------------------------------

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

// Deterministic RNG used for solver start vectors and seeded generators.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();          // [0, 1)
  double normal();           // standard normal (Box-Muller on demand)
 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

std::int64_t binomial_int64(int n, int k);  // exact, throws on overflow

}  // namespace sg

#endif  // SG_LINALG_HPP
