#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sg/linalg.hpp"

using namespace sg;

namespace {

std::vector<double> random_symmetric(int n, std::uint64_t seed, double scale = 1.0) {
  SplitMix64 rng(seed);
  std::vector<double> a(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double v = scale * rng.normal();
      a[static_cast<size_t>(i) * n + j] = v;
      a[static_cast<size_t>(j) * n + i] = v;
    }
  return a;
}

SymmetricOperator periodic_second_difference(int N) {
  SparseSym sp;
  sp.n = N;
  sp.row_ptr.assign(N + 1, 0);
  double h2 = static_cast<double>(N) * N;
  for (int i = 0; i < N; ++i) {
    int up = (i + 1) % N, dn = (i + N - 1) % N;
    std::vector<std::pair<int, double>> row{{dn, -h2}, {i, 2 * h2}, {up, -h2}};
    std::sort(row.begin(), row.end());
    for (auto& [c, v] : row) {
      sp.col.push_back(c);
      sp.val.push_back(v);
    }
    sp.row_ptr[i + 1] = static_cast<int>(sp.col.size());
  }
  return SymmetricOperator::sparse(std::move(sp));
}

}  // namespace

TEST_CASE("eigh_dense diagonal and 2x2") {
  auto A = SymmetricOperator::dense_from_full(3, std::vector<double>{3, 0, 0,
                                                                     0, 1, 0,
                                                                     0, 0, 2});
  EigenResult r = eigh_dense(A);
  CHECK(r.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(r.eigenvalues[1] == doctest::Approx(2.0));
  CHECK(r.eigenvalues[2] == doctest::Approx(3.0));

  auto B = SymmetricOperator::dense_from_full(2, std::vector<double>{0, 1, 1, 0});
  EigenResult rb = eigh_dense(B);
  CHECK(rb.eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(rb.eigenvalues[1] == doctest::Approx(1.0));
}

TEST_CASE("eigh_dense rejects asymmetric input naming the entry") {
  std::vector<double> a{1, 2, 3, 4};
  CHECK_THROWS_WITH_AS(SymmetricOperator::dense_from_full(2, a),
                       doctest::Contains("(1,0)"), std::invalid_argument);
}

TEST_CASE("eigh_dense matches minor-sign-count oracle on random intervals") {
  const int n = 50;
  auto a = random_symmetric(n, 42);
  auto A = SymmetricOperator::dense_from_full(n, a);
  EigenResult r = eigh_dense(A);
  SplitMix64 rng(7);
  for (int t = 0; t < 10; ++t) {
    double lo = -12.0 + 24.0 * rng.uniform();
    double hi = lo + 8.0 * rng.uniform();
    int expect = oracle::count_eigs_below(a, n, hi) -
                 oracle::count_eigs_below(a, n, lo);
    int got = 0;
    for (double lam : r.eigenvalues)
      if (lam >= lo && lam < hi) ++got;
    CHECK(got == expect);
  }
}

TEST_CASE("eigh_dense residuals and orthonormality") {
  const int n = 60;
  auto A = SymmetricOperator::dense_from_full(n, random_symmetric(n, 5, 2.0));
  EigenResult r = eigh_dense(A);
  for (double res : r.residual_norms) CHECK(res <= 1e-9 * A.norm1());
  for (int i = 0; i < n; i += 7)
    for (int j = 0; j <= i; j += 7) {
      double d = dot(r.eigenvectors[i], r.eigenvectors[j]);
      CHECK(std::abs(d - (i == j ? 1.0 : 0.0)) < 1e-10);
    }
}

TEST_CASE("spectrum shift identity") {
  const int n = 40;
  auto a = random_symmetric(n, 11);
  auto A = SymmetricOperator::dense_from_full(n, a);
  const double c = 3.7;
  auto ac = a;
  for (int i = 0; i < n; ++i) ac[static_cast<size_t>(i) * n + i] += c;
  auto Ac = SymmetricOperator::dense_from_full(n, ac);
  EigenResult r0 = eigh_dense(A), r1 = eigh_dense(Ac);
  for (int i = 0; i < n; ++i)
    CHECK(std::abs(r1.eigenvalues[i] - (r0.eigenvalues[i] + c)) <=
          1e-10 * (1.0 + std::abs(r0.eigenvalues[i] + c)));
}

TEST_CASE("weighted operator eigenpairs are W-orthonormal and consistent") {
  const int n = 30;
  auto a = random_symmetric(n, 3);
  auto A = SymmetricOperator::dense_from_full(n, a);
  SplitMix64 rng(15);
  std::vector<double> w(n);
  for (auto& x : w) x = 0.5 + rng.uniform();
  A.set_weights(w);
  EigenResult r = eigh_dense(A);
  // A v = lambda v with A = W^{-1} S
  std::vector<double> y(n);
  for (int j = 0; j < n; j += 5) {
    A.apply_raw(r.eigenvectors[j], y);
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(y[i] - r.eigenvalues[j] * r.eigenvectors[j][i]) < 1e-8);
  }
  for (int i = 0; i < n; i += 5)
    for (int j = 0; j <= i; j += 5) {
      double d = 0;
      for (int t = 0; t < n; ++t)
        d += r.eigenvectors[i][t] * r.eigenvectors[j][t] * w[t];
      CHECK(std::abs(d - (i == j ? 1.0 : 0.0)) < 1e-10);
    }
}

TEST_CASE("lanczos on the periodic second-difference matrix") {
  const int N = 64;
  SymmetricOperator A = periodic_second_difference(N);
  LanczosOptions opts;
  EigenResult r = lanczos_lowest(A, 4, 1e-9, opts);
  REQUIRE(r.converged);
  CHECK(std::abs(r.eigenvalues[0]) < 1e-9);
  // constant eigenvector
  double mean = 0;
  for (double v : r.eigenvectors[0]) mean += v;
  mean /= N;
  for (double v : r.eigenvectors[0]) CHECK(std::abs(v - mean) < 1e-7);
  // next eigenvalue (2 - 2cos(2 pi/64)) / h^2, doubly degenerate
  double expect = (2.0 - 2.0 * std::cos(2.0 * M_PI / N)) * N * N;
  CHECK(r.eigenvalues[1] == doctest::Approx(expect).epsilon(1e-10));
  CHECK(r.eigenvalues[2] == doctest::Approx(expect).epsilon(1e-10));
  // agreement with the dense solver
  EigenResult dense = eigh_dense(A);
  for (int i = 0; i < 4; ++i)
    CHECK(std::abs(r.eigenvalues[i] - dense.eigenvalues[i]) < 1e-8);
}

TEST_CASE("lanczos shift identity through the action") {
  const int N = 48;
  SymmetricOperator A = periodic_second_difference(N);
  const double c = 2.25;
  auto shifted = [&](std::span<const double> x, std::span<double> y) {
    A.apply_sym(x, y);
    for (int i = 0; i < N; ++i) y[i] += c * x[i];
  };
  EigenResult r0 = lanczos_lowest(A, 3, 1e-10);
  EigenResult r1 = lanczos_lowest(shifted, N, 3, 1e-10);
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(r1.eigenvalues[i] - (r0.eigenvalues[i] + c)) < 1e-8);
}

TEST_CASE("lanczos resolves a 4-fold degenerate cluster") {
  // diag blocks with an exactly repeated low eigenvalue
  const int n = 120;
  std::vector<double> a(static_cast<size_t>(n) * n, 0.0);
  SplitMix64 rng(9);
  for (int i = 0; i < n; ++i) a[static_cast<size_t>(i) * n + i] = 5.0 + rng.uniform() * 50.0;
  for (int i = 0; i < 4; ++i) a[static_cast<size_t>(i) * n + i] = 1.25;
  auto A = SymmetricOperator::dense_from_full(n, a);
  EigenResult r = lanczos_lowest(A, 5, 1e-10);
  REQUIRE(r.converged);
  for (int i = 0; i < 4; ++i) CHECK(r.eigenvalues[i] == doctest::Approx(1.25));
  CHECK(r.eigenvalues[4] > 4.0);
}

TEST_CASE("inertia_count on diagonal examples") {
  auto A = SymmetricOperator::dense_from_full(3, std::vector<double>{-2, 0, 0,
                                                                     0, 0, 0,
                                                                     0, 0, 5});
  Inertia io = inertia_count(A, 0.0);
  CHECK(io.n_neg == 1);
  CHECK(io.n_zero == 1);
  CHECK(io.n_pos == 1);

  auto B = SymmetricOperator::dense_from_full(3, std::vector<double>{1, 0, 0,
                                                                     0, 2, 0,
                                                                     0, 0, 3});
  Inertia ib = inertia_count(B, 2.5);
  CHECK(ib.n_neg == 2);
  CHECK(ib.n_zero == 0);
  CHECK(ib.n_pos == 1);
}

TEST_CASE("inertia_count matches dense eigensolver counts") {
  const int n = 80;
  auto a = random_symmetric(n, 21);
  auto A = SymmetricOperator::dense_from_full(n, a);
  EigenResult r = eigh_dense(A);
  SplitMix64 rng(33);
  for (int t = 0; t < 6; ++t) {
    double sigma = t == 0 ? 0.0 : -10.0 + 20.0 * rng.uniform();
    Inertia io = inertia_count(A, sigma);
    std::int64_t expect = 0;
    for (double lam : r.eigenvalues)
      if (lam < sigma - A.zero_tolerance()) ++expect;
    CHECK(io.n_neg == expect);
    CHECK(io.n_neg + io.n_zero + io.n_pos == n);
  }
}

TEST_CASE("blockwise inertia on a cyclic block-tridiagonal sparse matrix") {
  // ring of 8 blocks of size 6 with random couplings
  const int nb = 8, m = 6, n = nb * m;
  SplitMix64 rng(77);
  std::vector<double> full(static_cast<size_t>(n) * n, 0.0);
  auto put = [&](int i, int j, double v) {
    full[static_cast<size_t>(i) * n + j] = v;
    full[static_cast<size_t>(j) * n + i] = v;
  };
  for (int b = 0; b < nb; ++b) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j <= i; ++j)
        put(b * m + i, b * m + j, rng.normal());
      // coupling to the next block (cyclically)
      int nxt = (b + 1) % nb;
      put(b * m + i, nxt * m + (i * 3 + 1) % m, rng.normal());
    }
  }
  SparseSym sp;
  sp.n = n;
  sp.row_ptr.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (full[static_cast<size_t>(i) * n + j] != 0.0) {
        sp.col.push_back(j);
        sp.val.push_back(full[static_cast<size_t>(i) * n + j]);
      }
    sp.row_ptr[i + 1] = static_cast<int>(sp.col.size());
  }
  SymmetricOperator S = SymmetricOperator::sparse(std::move(sp));
  BlockTridiagLayout lay;
  for (int b = 0; b <= nb; ++b) lay.offsets.push_back(b * m);
  lay.cyclic = true;
  S.set_block_layout(lay);

  auto D = SymmetricOperator::dense_from_full(n, full);
  for (double sigma : {0.0, -1.5, 0.8, 3.0}) {
    Inertia got = inertia_count(S, sigma);
    int expect = oracle::count_eigs_below(full, n, sigma);
    CHECK(got.n_neg == expect);
    CHECK(got.n_neg + got.n_zero + got.n_pos == n);
    Inertia dense = inertia_count(D, sigma);
    CHECK(got.n_neg == dense.n_neg);
  }
}

TEST_CASE("blockwise inertia agrees with weights") {
  // weighted operator: S v = lambda W v; counts via S - sigma W congruence
  const int nb = 6, m = 4, n = nb * m;
  SplitMix64 rng(5);
  std::vector<double> full(static_cast<size_t>(n) * n, 0.0);
  for (int b = 0; b < nb; ++b)
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j <= i; ++j) {
        double v = rng.normal();
        full[static_cast<size_t>(b * m + i) * n + b * m + j] = v;
        full[static_cast<size_t>(b * m + j) * n + b * m + i] = v;
      }
      int nxt = (b + 1) % nb;
      double v = rng.normal();
      full[static_cast<size_t>(b * m + i) * n + nxt * m + i] = v;
      full[static_cast<size_t>(nxt * m + i) * n + b * m + i] = v;
    }
  std::vector<double> w(n);
  for (auto& x : w) x = 0.25 + rng.uniform();

  SparseSym sp;
  sp.n = n;
  sp.row_ptr.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (full[static_cast<size_t>(i) * n + j] != 0.0) {
        sp.col.push_back(j);
        sp.val.push_back(full[static_cast<size_t>(i) * n + j]);
      }
    sp.row_ptr[i + 1] = static_cast<int>(sp.col.size());
  }
  SymmetricOperator S = SymmetricOperator::sparse(std::move(sp));
  S.set_weights(w);
  BlockTridiagLayout lay;
  for (int b = 0; b <= nb; ++b) lay.offsets.push_back(b * m);
  lay.cyclic = true;
  S.set_block_layout(lay);

  auto Sd = SymmetricOperator::dense_from_full(n, full);
  Sd.set_weights(w);
  EigenResult r = eigh_dense(Sd);
  for (double sigma : {0.0, 1.0, -2.0}) {
    Inertia got = inertia_count(S, sigma);
    std::int64_t expect = 0;
    for (double lam : r.eigenvalues)
      if (lam < sigma - Sd.zero_tolerance()) ++expect;
    CHECK(got.n_neg == expect);
  }
}

TEST_CASE("binomial helper") {
  CHECK(binomial_int64(5, 2) == 10);
  CHECK(binomial_int64(10, 0) == 1);
  CHECK(binomial_int64(3, 5) == 0);
  CHECK(binomial_int64(52, 5) == 2598960);
}
