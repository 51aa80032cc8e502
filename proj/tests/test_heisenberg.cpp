#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "sg/heisenberg.hpp"
#include "sg/linalg.hpp"

using namespace sg;
using cplx = std::complex<double>;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("model validation") {
  CHECK_NOTHROW(HeisenbergModel::create(2, {1, 3}, 1.0));
  CHECK_THROWS_AS(HeisenbergModel::create(2, {2, 3}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(HeisenbergModel::create(1, {1}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(HeisenbergModel::create(1, {0}, 1.0), std::invalid_argument);
  CHECK(HeisenbergModel::create(2, {2, 4}, 1.0).volume() == 8);
  CHECK(HeisenbergModel::create(3, {1, 1, 1}, 1.0).dimension() == 7);
}

TEST_CASE("dual lattice enumeration") {
  auto m = HeisenbergModel::create(1, {1}, 1.0);
  CHECK(dual_lattice_points(m, 1.5).size() == 9);  // xi^2+eta^2 <= 2.25
  CHECK(dual_lattice_points(m, 0.0).size() == 1);

  auto m2 = HeisenbergModel::create(1, {2}, 1.0);
  auto pts = dual_lattice_points(m2, 0.6);
  CHECK(pts.size() == 3);  // (0,0), (0, +-1/2)
  bool has_half = false;
  for (const auto& p : pts)
    if (p.xi[0] == 0 && p.nu[0] == 1) has_half = true;
  CHECK(has_half);
  // lexicographic order of (xi, nu)
  for (std::size_t i = 1; i < pts.size(); ++i) {
    auto key = [](const CharacterLabel& c) { return std::make_pair(c.xi, c.nu); };
    CHECK(key(pts[i - 1]) < key(pts[i]));
  }
}

TEST_CASE("closed-form eigenvalues") {
  auto m = HeisenbergModel::create(1, {1}, 1.0);
  CharacterLabel c10{{1}, {0}};
  CharacterLabel c00{{0}, {0}};
  CHECK(laplace_eigenvalue(m, c10) == doctest::Approx(4 * kPi * kPi));
  CHECK(laplace_eigenvalue(m, c00) == doctest::Approx(0.0));
  HermiteLabel h10{1, 0};
  CHECK(laplace_eigenvalue(m, h10) == doctest::Approx(2 * kPi + 4 * kPi * kPi));
  CHECK(yamabe_eigenvalue(m, c10) == doctest::Approx(4 * kPi * kPi - 1.0 / 16));
  CHECK(yamabe_eigenvalue(m, h10) ==
        doctest::Approx(2 * kPi + 4 * kPi * kPi - 1.0 / 16));
}

TEST_CASE("yamabe equals laplace plus the scalar-curvature multiple") {
  SplitMix64 rng(4);
  for (int d : {1, 2, 3}) {
    double s = 0.5 + 2.0 * rng.uniform();
    auto m = HeisenbergModel::create(d, std::vector<int>(d, 1), s);
    int n = 2 * d + 1;
    double shift = (n - 2.0) / (4.0 * (n - 1.0)) * scalar_curvature(m);
    HermiteLabel h{2, 1};
    CHECK(yamabe_eigenvalue(m, h) ==
          doctest::Approx(laplace_eigenvalue(m, h) + shift));
    CharacterLabel c{std::vector<int>(d, 1), std::vector<int>(d, 0)};
    CHECK(yamabe_eigenvalue(m, c) ==
          doctest::Approx(laplace_eigenvalue(m, c) + shift));
  }
}

TEST_CASE("scalar curvature values and limit") {
  CHECK(scalar_curvature(HeisenbergModel::create(1, {1}, 1.0)) ==
        doctest::Approx(-0.5));
  CHECK(scalar_curvature(HeisenbergModel::create(2, {1, 1}, 1.0)) ==
        doctest::Approx(-1.0));
  double prev = 0.0;
  for (double s : {0.1, 0.5, 1.0, 2.0}) {
    double r = scalar_curvature(HeisenbergModel::create(1, {1}, s));
    CHECK(r < prev);
    prev = r;
  }
  CHECK(std::abs(scalar_curvature(HeisenbergModel::create(1, {1}, 1e-4))) < 1e-15);
}

TEST_CASE("yamabe null parameter") {
  double s1 = yamabe_null_parameter(1, 1, 0);
  CHECK(s1 == doctest::Approx(std::cbrt(8 * kPi * (2 + std::sqrt(5.0)))));
  CHECK(s1 == doctest::Approx(4.7395).epsilon(1e-4));
  CHECK(yamabe_null_parameter(1, 2, 0) ==
        doctest::Approx(std::cbrt(16 * kPi * (2 + std::sqrt(5.0)))));
  for (int d = 1; d <= 3; ++d)
    for (int n = -3; n <= 3; ++n) {
      if (n == 0) continue;
      for (int a = 0; a <= 2; ++a) {
        double s = yamabe_null_parameter(d, n, a);
        auto m = HeisenbergModel::create(d, std::vector<int>(d, 1), s);
        double mu = yamabe_eigenvalue(m, HermiteLabel{n, a});
        CHECK(std::abs(mu) < 1e-10 * std::pow(s, 2 * d + 2));
      }
    }
}

TEST_CASE("paneitz constants against exact rational arithmetic") {
  for (int d = 1; d <= 10; ++d) {
    PaneitzConstants pc = paneitz_constants(d);
    CHECK(pc.c0 == doctest::Approx(oracle::paneitz_c0(d).value()).epsilon(1e-14));
    CHECK(pc.c1 == doctest::Approx(oracle::paneitz_c1(d).value()).epsilon(1e-14));
    CHECK(pc.delta0 ==
          doctest::Approx(oracle::paneitz_delta0(d).value()).epsilon(1e-13));
    if (d >= 2) CHECK(pc.delta0 > 0.0);
  }
  CHECK(oracle::paneitz_c1(2) == oracle::Rational(-1, 8));
  CHECK(oracle::paneitz_c0(2) == oracle::Rational(-359, 2304));
  CHECK(oracle::paneitz_delta0(2) == oracle::Rational(23, 36));
  CHECK(oracle::paneitz_c1(1) == oracle::Rational(-11, 8));
  CHECK(oracle::paneitz_c0(1) == oracle::Rational(137, 256));
  // delta0 = c1^2 - 4 c0 differs from the simplified closed form
  // (1/4)(4d^2-7)/(2d-1); keep both visible so the discrepancy is recorded
  for (int d = 2; d <= 10; ++d) {
    double simplified = 0.25 * (4.0 * d * d - 7.0) / (2.0 * d - 1.0);
    CHECK(std::abs(oracle::paneitz_delta0(d).value() - simplified) > 1e-3);
  }
}

TEST_CASE("paneitz eigenvalues") {
  for (int d : {1, 2}) {
    double s = 1.3;
    auto m = HeisenbergModel::create(d, std::vector<int>(d, 1), s);
    CharacterLabel c0{std::vector<int>(d, 0), std::vector<int>(d, 0)};
    CHECK(paneitz_eigenvalue(m, c0) ==
          doctest::Approx(paneitz_constants(d).c0 * std::pow(s, 4 * d + 4)));
  }
  auto m2 = HeisenbergModel::create(2, {1, 1}, 1.0);
  double mu0 = 4 * kPi + 4 * kPi * kPi;
  PaneitzConstants pc = paneitz_constants(2);
  double expect = mu0 * mu0 - pc.c1 * mu0 + pc.c0 - 4.0 * kPi * kPi;
  CHECK(paneitz_eigenvalue(m2, HermiteLabel{1, 0}) == doctest::Approx(expect));

  // negativity matches the quadratic-root window
  SplitMix64 rng(12);
  for (int t = 0; t < 50; ++t) {
    double s = 0.5 + 4.0 * rng.uniform();
    int n = 1 + static_cast<int>(rng.uniform() * 3);
    int a = static_cast<int>(rng.uniform() * 3);
    auto m = HeisenbergModel::create(2, {1, 1}, s);
    double S = std::pow(s, 6);
    double dn = pc.delta0 * S * S + 16.0 * n * n * kPi * kPi * s * s;
    double u = laplace_eigenvalue(m, HermiteLabel{n, a});
    bool window = u < 0.5 * (pc.c1 * S + std::sqrt(dn)) &&
                  u > 0.5 * (pc.c1 * S - std::sqrt(dn));
    CHECK((paneitz_eigenvalue(m, HermiteLabel{n, a}) < 0) == window);
  }
}

TEST_CASE("hermite multiplicity formula") {
  auto m = HeisenbergModel::create(2, {1, 2}, 1.0);
  for (int n : {1, -1, 2, 3})
    for (int a : {0, 1, 2, 5}) {
      std::int64_t expect = 1;
      for (int j = 0; j < 2; ++j) expect *= std::abs(n);
      expect *= 2;  // |Gamma_r|
      expect *= binomial_int64(a + 1, 1);
      CHECK(hermite_multiplicity(m, n, a) == expect);
    }
}

TEST_CASE("exact negative-eigenvalue counts (yamabe, d=1)") {
  auto count = [&](double s) {
    return count_negative_yamabe(HeisenbergModel::create(1, {1}, s)).nu;
  };
  CHECK(count(8.0) == 29);
  CHECK(count(16.0) == 1869);
  for (double s : {3.0, 4.739, 5.5, 8.0, 11.0})
    CHECK(count(s) == oracle::brute_nu1_d1(s));
  auto m_r2 = HeisenbergModel::create(1, {2}, 8.0);
  CHECK(count_negative_yamabe(m_r2).nu == oracle::brute_nu1_d1(8.0, 2));
  std::int64_t prev = -1;
  for (double s : {4.0, 6.0, 8.0, 12.0, 16.0, 24.0}) {
    std::int64_t nu = count(s);
    CHECK(nu >= prev);
    prev = nu;
  }
  auto nc = count_negative_yamabe(HeisenbergModel::create(1, {1}, 6.0));
  CHECK(nc.nu == 9);
  CHECK(nc.certificate.characters_listed);
  CHECK(nc.certificate.hermite_listed);
  CHECK(static_cast<std::int64_t>(nc.certificate.characters.size()) ==
        nc.certificate.character_count);
  std::int64_t herm_total = 0;
  for (const auto& f : nc.certificate.hermite_families) herm_total += f.multiplicity;
  CHECK(herm_total == nc.certificate.hermite_count);
  CHECK(nc.nu == nc.certificate.character_count + nc.certificate.hermite_count);
}

TEST_CASE("lower bound nu1 >= c |Gamma| s^{2d+2} over the sweep") {
  // the constant is anchored at the verified low end (nu1(8)/8^4 ~ 0.0071)
  for (double s : {8.0, 12.0, 16.0, 24.0, 32.0}) {
    auto nu = count_negative_yamabe(HeisenbergModel::create(1, {1}, s)).nu;
    CHECK(static_cast<double>(nu) >= 0.005 * std::pow(s, 4.0));
  }
}

TEST_CASE("exact negative-eigenvalue counts (paneitz, d=2)") {
  CHECK_THROWS_AS(count_negative_paneitz(HeisenbergModel::create(1, {1}, 4.0)),
                  std::invalid_argument);
  auto count = [&](double s) {
    return count_negative_paneitz(HeisenbergModel::create(2, {1, 1}, s)).nu;
  };
  // c0(2) < 0, so the constant character's eigenvalue c0 s^{4d+4} is
  // negative at every s: the small-s count is 1, not 0
  CHECK(count(0.5) == 1);
  CHECK(oracle::brute_nu2_d2(0.5) == 1);
  for (double s : {0.5, 1.5, 2.0, 3.0, 4.0}) CHECK(count(s) == oracle::brute_nu2_d2(s));
  std::int64_t prev = -1;
  for (double s : {2.0, 4.0, 8.0, 16.0}) {
    auto nu = count(s);
    CHECK(nu >= prev);
    prev = nu;
  }
}

TEST_CASE("eigenfunction values: characters and theta form") {
  auto m = HeisenbergModel::create(1, {1}, 1.0);
  CharacterLabel c00{{0}, {0}};
  HeisenbergPoint p;
  p.x = {0.37};
  p.y = {0.81};
  p.t = 0.13;
  CHECK(std::abs(eigenfunction_value(m, c00, p) - cplx(1, 0)) < 1e-15);

  double s_null = yamabe_null_parameter(1, 1, 0);
  auto mn = HeisenbergModel::create(1, {1}, s_null);
  HermitePointLabel w1;
  w1.n = 1;
  w1.a = {0.0};
  w1.b = {0.0};
  w1.alpha = {0};
  HeisenbergPoint q;
  q.x = {0.5};
  q.y = {0.5};
  q.t = 0.31;
  CHECK(std::abs(eigenfunction_value(mn, w1, q)) < 1e-10);

  SplitMix64 rng(8);
  for (int n : {1, -1, 2}) {
    HermitePointLabel lab;
    lab.n = n;
    lab.a = {0.0};
    lab.b = {0.0};
    lab.alpha = {0};
    for (int t = 0; t < 50; ++t) {
      HeisenbergPoint r;
      r.x = {rng.uniform()};
      r.y = {rng.uniform()};
      r.t = rng.uniform();
      cplx a = eigenfunction_value(mn, lab, r, false);
      cplx b = eigenfunction_value(mn, lab, r, true);
      CHECK(std::abs(a - b) < 1e-10);
    }
  }
}

TEST_CASE("nodal sheets of the ground family") {
  double s_null = yamabe_null_parameter(1, 1, 0);
  auto m = HeisenbergModel::create(1, {1}, s_null);
  auto sheets = nodal_set_hermite_ground(m, {0.0}, +1);
  REQUIRE(sheets.size() == 1);
  CHECK(sheets[0].x_value == doctest::Approx(0.5));
  REQUIRE(sheets[0].y_values.size() == 1);
  CHECK(sheets[0].y_values[0] == doctest::Approx(0.5));

  double s2 = yamabe_null_parameter(2, 1, 0);
  auto m2 = HeisenbergModel::create(2, {1, 1}, s2);
  auto sheets2 = nodal_set_hermite_ground(m2, {0.0, 0.0}, +1);
  CHECK(sheets2.size() == 2);

  auto bad = HeisenbergModel::create(1, {1}, s_null * 1.01);
  CHECK_THROWS_AS(nodal_set_hermite_ground(bad, {0.0}, +1), std::invalid_argument);

  HermitePointLabel lab;
  lab.n = 1;
  lab.a = {0.0};
  lab.b = {0.0};
  lab.alpha = {0};
  SplitMix64 rng(3);
  for (int t = 0; t < 32; ++t) {
    HeisenbergPoint p;
    p.x = {0.5};
    p.y = {0.5};
    p.t = rng.uniform();
    CHECK(std::abs(eigenfunction_value(m, lab, p)) < 1e-8);
    HeisenbergPoint q;
    q.x = {0.2};
    q.y = {0.15};
    q.t = rng.uniform();
    CHECK(std::abs(eigenfunction_value(m, lab, q)) > 1e-3);
  }
}

TEST_CASE("character kernel analysis (d=1, r=1)") {
  auto m = HeisenbergModel::create(1, {1}, 1.0);
  auto zero = character_null_analysis(m, 0, 0);
  CHECK_FALSE(zero.has_positive_s);

  auto r1 = character_null_analysis(m, 0, 2);
  CHECK(r1.has_positive_s);
  CHECK(r1.s == doctest::Approx(8 * kPi * 2));
  CHECK(r1.residual < 1e-10 * std::pow(r1.s, 4.0));
  CHECK(r1.kernel_dim == 2);
  REQUIRE(r1.nodal_sets.size() == 1);
  CHECK(r1.nodal_sets[0].kind == CharacterNodalSet::Kind::kYSheets);
  CHECK(r1.nodal_sets[0].y_values.size() == 4);
  CHECK(r1.nodal_sets[0].y_values[1] == doctest::Approx(0.25));

  auto r2 = character_null_analysis(m, 3, 0);
  CHECK(r2.kernel_dim == 2);
  CHECK(r2.residual < 1e-10 * std::pow(r2.s, 4.0));
  CHECK(r2.nodal_sets[0].kind == CharacterNodalSet::Kind::kXSheets);

  auto r3 = character_null_analysis(m, 1, 2);
  CHECK(r3.kernel_dim == 4);
  CHECK(r3.residual < 1e-10 * std::pow(r3.s, 4.0));
  REQUIRE(r3.nodal_sets.size() == 2);
  CHECK(r3.nodal_sets[1].kind == CharacterNodalSet::Kind::kDiagonal);

  CHECK_THROWS_AS(
      character_null_analysis(HeisenbergModel::create(2, {1, 1}, 1.0), 1, 0),
      std::invalid_argument);
}

TEST_CASE("twisted grid: symmetry, kernel, spectrum at N=16") {
  auto m = HeisenbergModel::create(1, {1}, 1.0);
  SymmetricOperator A = twisted_grid_laplacian(m, 16);
  const int M = A.dim();
  CHECK(M == 16 * 16 * 16);

  const SparseSym& sp = A.sparse_data();
  double asym = 0.0;
  for (int i = 0; i < M; i += 3)
    for (int p = sp.row_ptr[i]; p < sp.row_ptr[i + 1]; ++p)
      asym = std::max(asym, std::abs(sp.val[p] - A.entry(sp.col[p], i)));
  CHECK(asym < 1e-12);

  std::vector<double> ones(M, 1.0), out(M);
  A.apply_raw(ones, out);
  for (int i = 0; i < M; i += 97) CHECK(std::abs(out[i]) < 1e-9);

  LanczosOptions opts;
  opts.seed = 2;
  EigenResult r = lanczos_lowest(A, 11, 1e-6 * (1 + A.norm1()), opts);
  REQUIRE(r.converged);
  auto merged = merge_lines(closed_form_spectrum(m, OperatorKind::kLaplacian, 90.0));
  std::vector<double> exact;
  for (auto& [lam, mult] : merged)
    for (int c = 0; c < mult && static_cast<int>(exact.size()) < 11; ++c)
      exact.push_back(lam);
  REQUIRE(exact.size() == 11);
  CHECK(std::abs(r.eigenvalues[0]) < A.zero_tolerance());
  for (int i = 1; i < 11; ++i)
    CHECK(std::abs(r.eigenvalues[i] - exact[i]) <= 0.025 * exact[i]);
}

TEST_CASE("twisted grid d=2 smoke test") {
  auto m = HeisenbergModel::create(2, {1, 1}, 1.0);
  SymmetricOperator A = twisted_grid_laplacian(m, 8);
  CHECK(A.dim() == 8 * 8 * 8 * 8 * 8);
  std::vector<double> ones(A.dim(), 1.0), out(A.dim());
  A.apply_raw(ones, out);
  for (int i = 0; i < A.dim(); i += 1013) CHECK(std::abs(out[i]) < 1e-8);
}

TEST_CASE("twisted-grid negative counts match the closed-form enumeration") {
  // Inertia of the discrete Laplacian below the Yamabe shift equals nu_1.
  // The s values keep every closed-form line clear of the O(s^2 h^2)
  // discretization error of the k != 0 oscillator branches.
  for (auto [N, s, nu_expect] :
       {std::tuple<int, double, std::int64_t>{16, 4.0, 1},
        {32, 4.0, 1},
        {32, 5.5, 5}}) {
    auto m = HeisenbergModel::create(1, {1}, s);
    CHECK(count_negative_yamabe(m).nu == nu_expect);
    SymmetricOperator A = twisted_grid_laplacian(m, N);
    double shift = (2.0 * m.d - 1.0) / 16.0 * std::pow(s, 2 * m.d + 2);
    Inertia io = inertia_count(A, shift);
    CHECK(io.n_neg == nu_expect);
  }
}

TEST_CASE("spectrum enumeration sorted, bounded, and brute-force complete") {
  auto m = HeisenbergModel::create(1, {1}, 2.0);
  for (auto op : {OperatorKind::kLaplacian, OperatorKind::kYamabe,
                  OperatorKind::kPaneitz}) {
    auto lines = closed_form_spectrum(m, op, 500.0);
    CHECK(!lines.empty());
    for (std::size_t i = 1; i < lines.size(); ++i)
      CHECK(lines[i - 1].eigenvalue <= lines[i].eigenvalue + 1e-12);
    for (const auto& l : lines) CHECK(l.eigenvalue <= 500.0 + 1e-9);
  }
  auto lines = closed_form_spectrum(m, OperatorKind::kPaneitz, 300.0);
  std::int64_t total = 0;
  for (const auto& l : lines) total += l.multiplicity;
  std::int64_t brute = 0;
  for (int xi = -40; xi <= 40; ++xi)
    for (int nu = -40; nu <= 40; ++nu)
      if (paneitz_eigenvalue(m, CharacterLabel{{xi}, {nu}}) <= 300.0) ++brute;
  for (int n = -40; n <= 40; ++n) {
    if (n == 0) continue;
    for (int a = 0; a <= 40; ++a)
      if (paneitz_eigenvalue(m, HermiteLabel{n, a}) <= 300.0)
        brute += hermite_multiplicity(m, n, a);
  }
  CHECK(total == brute);
}
