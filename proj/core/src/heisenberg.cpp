#include "sg/heisenberg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "sg/special.hpp"

namespace sg {

namespace {
constexpr double kPi = 3.14159265358979323846;

double pow_int(double base, int e) {
  if (e < 0) return 1.0 / pow_int(base, -e);
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}
}  // namespace

HeisenbergModel HeisenbergModel::create(int d, std::vector<int> r, double s) {
  if (d < 1) throw std::invalid_argument("HeisenbergModel: need d >= 1");
  if (static_cast<int>(r.size()) != d)
    throw std::invalid_argument("HeisenbergModel: r must have length d");
  for (int j = 0; j < d; ++j) {
    if (r[j] < 1)
      throw std::invalid_argument("HeisenbergModel: r_" + std::to_string(j + 1) +
                                  " must be a positive integer");
    if (j + 1 < d && r[j + 1] % r[j] != 0)
      throw std::invalid_argument("HeisenbergModel: divisibility r_" +
                                  std::to_string(j + 1) + " | r_" +
                                  std::to_string(j + 2) + " violated");
  }
  if (!(s > 0.0)) throw std::invalid_argument("HeisenbergModel: need s > 0");
  HeisenbergModel m;
  m.d = d;
  m.r = std::move(r);
  m.s = s;
  return m;
}

std::int64_t HeisenbergModel::volume() const {
  std::int64_t v = 1;
  for (int rj : r) v *= rj;
  return v;
}

// --- dual lattice -------------------------------------------------------------

namespace {

void enumerate_lattice(const HeisenbergModel& m, double radius_sq,
                       std::vector<int>& coords, int pos, double used,
                       std::vector<CharacterLabel>& out) {
  const int d = m.d;
  if (pos == 2 * d) {
    CharacterLabel lab;
    lab.xi.assign(coords.begin(), coords.begin() + d);
    lab.nu.assign(coords.begin() + d, coords.end());
    out.push_back(std::move(lab));
    return;
  }
  double rem = radius_sq - used;
  if (rem < 0) return;
  if (pos < d) {
    int lim = static_cast<int>(std::floor(std::sqrt(rem) + 1e-12));
    for (int v = -lim; v <= lim; ++v) {
      coords[pos] = v;
      double c = static_cast<double>(v) * v;
      if (c <= rem + 1e-12)
        enumerate_lattice(m, radius_sq, coords, pos + 1, used + c, out);
    }
  } else {
    int rj = m.r[pos - d];
    int lim = static_cast<int>(std::floor(std::sqrt(rem) * rj + 1e-9));
    for (int v = -lim; v <= lim; ++v) {
      coords[pos] = v;
      double eta = static_cast<double>(v) / rj;
      double c = eta * eta;
      if (c <= rem + 1e-12)
        enumerate_lattice(m, radius_sq, coords, pos + 1, used + c, out);
    }
  }
}

}  // namespace

std::vector<CharacterLabel> dual_lattice_points(const HeisenbergModel& model,
                                                double radius) {
  if (radius < 0) throw std::invalid_argument("dual_lattice_points: radius >= 0");
  std::vector<CharacterLabel> out;
  std::vector<int> coords(2 * model.d, 0);
  enumerate_lattice(model, radius * radius, coords, 0, 0.0, out);
  return out;
}

// --- closed-form eigenvalues ---------------------------------------------------

double scalar_curvature(const HeisenbergModel& m) {
  return -0.5 * m.d * pow_int(m.s, 2 * m.d + 2);
}

namespace {

double lambda0(const HeisenbergModel& m, const CharacterLabel& c) {
  double xi2 = 0.0, eta2 = 0.0;
  for (int j = 0; j < m.d; ++j) {
    xi2 += static_cast<double>(c.xi[j]) * c.xi[j];
    double eta = static_cast<double>(c.nu[j]) / m.r[j];
    eta2 += eta * eta;
  }
  return 4.0 * kPi * kPi * (xi2 + m.s * m.s * eta2);
}

double mu0(const HeisenbergModel& m, int n, int alpha_norm) {
  double an = std::abs(n);
  return 2.0 * kPi * an * m.s * (m.d + 2.0 * alpha_norm) +
         4.0 * an * an * pow_int(m.s, -2 * m.d) * kPi * kPi;
}

double yamabe_shift(const HeisenbergModel& m) {
  return (2.0 * m.d - 1.0) / 16.0 * pow_int(m.s, 2 * m.d + 2);
}

}  // namespace

double laplace_eigenvalue(const HeisenbergModel& m, const CharacterLabel& c) {
  return lambda0(m, c);
}

double laplace_eigenvalue(const HeisenbergModel& m, const HermiteLabel& h) {
  if (h.n == 0) throw std::invalid_argument("HermiteLabel: n must be nonzero");
  return mu0(m, h.n, h.alpha_norm);
}

double yamabe_eigenvalue(const HeisenbergModel& m, const CharacterLabel& c) {
  return lambda0(m, c) - yamabe_shift(m);
}

double yamabe_eigenvalue(const HeisenbergModel& m, const HermiteLabel& h) {
  return laplace_eigenvalue(m, h) - yamabe_shift(m);
}

PaneitzConstants paneitz_constants(int d) {
  if (d < 1) throw std::invalid_argument("paneitz_constants: need d >= 1");
  double dd = d;
  double c0 = (2 * dd - 3) *
              ((2 * dd + 1) * (2 * dd - 1) * (2 * dd - 1) -
               4 * (16 * dd * dd + 18 * dd + 1)) /
              (256.0 * (2 * dd - 1) * (2 * dd - 1));
  double c1 = ((2 * dd - 1) * (2 * dd - 1) - 12.0) / (8.0 * (2 * dd - 1));
  PaneitzConstants pc;
  pc.c0 = c0;
  pc.c1 = c1;
  pc.delta0 = c1 * c1 - 4.0 * c0;
  return pc;
}

double paneitz_eigenvalue(const HeisenbergModel& m, const CharacterLabel& c) {
  PaneitzConstants pc = paneitz_constants(m.d);
  double S = pow_int(m.s, 2 * m.d + 2);
  double l0 = lambda0(m, c);
  return l0 * l0 - pc.c1 * S * l0 + pc.c0 * S * S;
}

double paneitz_eigenvalue(const HeisenbergModel& m, const HermiteLabel& h) {
  if (h.n == 0) throw std::invalid_argument("HermiteLabel: n must be nonzero");
  PaneitzConstants pc = paneitz_constants(m.d);
  double S = pow_int(m.s, 2 * m.d + 2);
  double u = mu0(m, h.n, h.alpha_norm);
  double nterm = 4.0 * (m.d + 1.0) / (2.0 * m.d - 1.0) *
                 static_cast<double>(h.n) * h.n * kPi * kPi * m.s * m.s;
  return u * u - pc.c1 * S * u + pc.c0 * S * S - nterm;
}

std::int64_t hermite_multiplicity(const HeisenbergModel& m, int n, int alpha_norm) {
  if (n == 0) throw std::invalid_argument("hermite_multiplicity: n nonzero");
  std::int64_t w = 1;
  for (int j = 0; j < m.d; ++j) w *= std::abs(n);
  return w * m.volume() * binomial_int64(alpha_norm + m.d - 1, m.d - 1);
}

double yamabe_null_parameter(int d, int n, int alpha_norm) {
  if (n == 0) throw std::invalid_argument("yamabe_null_parameter: n nonzero");
  double mfac = d + 2.0 * alpha_norm;
  double v = 8.0 * kPi * std::abs(n) / (2.0 * d - 1.0) *
             (2.0 * mfac + std::sqrt(4.0 * mfac * mfac + 2.0 * d - 1.0));
  return std::pow(v, 1.0 / (2.0 * d + 1.0));
}

// --- spectrum enumeration ------------------------------------------------------

namespace {

// Enumerate characters with lambda0 in [lo, hi]; calls fn(label, lambda0).
template <typename Fn>
void for_characters_in_band(const HeisenbergModel& m, double lo, double hi,
                            Fn&& fn) {
  if (hi < 0) return;
  // |xi|^2 + s^2 |eta|^2 <= hi / (4 pi^2)
  double cap = hi / (4.0 * kPi * kPi);
  std::vector<int> coords(2 * m.d, 0);
  // recursive walk, xi axes then nu axes
  std::function<void(int, double)> rec = [&](int pos, double used) {
    if (pos == 2 * m.d) {
      double l0 = 4.0 * kPi * kPi * used;
      if (l0 >= lo && l0 <= hi) {
        CharacterLabel lab;
        lab.xi.assign(coords.begin(), coords.begin() + m.d);
        lab.nu.assign(coords.begin() + m.d, coords.end());
        fn(lab, l0);
      }
      return;
    }
    double rem = cap - used;
    if (rem < -1e-12) return;
    if (pos < m.d) {
      int lim = static_cast<int>(std::floor(std::sqrt(std::max(rem, 0.0)) + 1e-12));
      for (int v = -lim; v <= lim; ++v) {
        coords[pos] = v;
        rec(pos + 1, used + static_cast<double>(v) * v);
      }
    } else {
      int rj = m.r[pos - m.d];
      double smax = std::sqrt(std::max(rem, 0.0)) / m.s;
      int lim = static_cast<int>(std::floor(smax * rj + 1e-9));
      for (int v = -lim; v <= lim; ++v) {
        coords[pos] = v;
        double eta = static_cast<double>(v) / rj;
        rec(pos + 1, used + m.s * m.s * eta * eta);
      }
    }
  };
  rec(0, 0.0);
}

bool line_less(const SpectralLine& a, const SpectralLine& b) {
  if (a.eigenvalue != b.eigenvalue) return a.eigenvalue < b.eigenvalue;
  if (a.is_character != b.is_character) return a.is_character;
  if (a.is_character) {
    if (a.character.xi != b.character.xi) return a.character.xi < b.character.xi;
    return a.character.nu < b.character.nu;
  }
  if (a.hermite.n != b.hermite.n) return a.hermite.n < b.hermite.n;
  return a.hermite.alpha_norm < b.hermite.alpha_norm;
}

}  // namespace

std::vector<SpectralLine> closed_form_spectrum(const HeisenbergModel& m,
                                               OperatorKind op,
                                               double max_eigenvalue) {
  std::vector<SpectralLine> lines;
  const double S = pow_int(m.s, 2 * m.d + 2);
  PaneitzConstants pc = paneitz_constants(m.d);

  // Eigenvalue of `op` from lambda0 (characters) or mu0 + n-correction.
  auto char_value = [&](double l0) {
    switch (op) {
      case OperatorKind::kLaplacian: return l0;
      case OperatorKind::kYamabe: return l0 - yamabe_shift(m);
      case OperatorKind::kPaneitz: return l0 * l0 - pc.c1 * S * l0 + pc.c0 * S * S;
    }
    return l0;
  };
  auto herm_value = [&](int n, double u) {
    switch (op) {
      case OperatorKind::kLaplacian: return u;
      case OperatorKind::kYamabe: return u - yamabe_shift(m);
      case OperatorKind::kPaneitz: {
        double nterm = 4.0 * (m.d + 1.0) / (2.0 * m.d - 1.0) *
                       static_cast<double>(n) * n * kPi * kPi * m.s * m.s;
        return u * u - pc.c1 * S * u + pc.c0 * S * S - nterm;
      }
    }
    return u;
  };

  // lambda0 range achieving eigenvalue <= max: monotone shift for Laplace and
  // Yamabe; for Paneitz the largest root of the quadratic equal to max.
  double l0_cap = 0.0;
  auto paneitz_l0_cap = [&](double extra) {
    double disc = pc.c1 * pc.c1 * S * S - 4.0 * (pc.c0 * S * S - extra - max_eigenvalue);
    if (disc < 0) return -1.0;
    return 0.5 * (pc.c1 * S + std::sqrt(disc));
  };
  switch (op) {
    case OperatorKind::kLaplacian: l0_cap = max_eigenvalue; break;
    case OperatorKind::kYamabe: l0_cap = max_eigenvalue + yamabe_shift(m); break;
    case OperatorKind::kPaneitz: l0_cap = paneitz_l0_cap(0.0); break;
  }

  for_characters_in_band(m, 0.0, l0_cap, [&](const CharacterLabel& lab, double l0) {
    double v = char_value(l0);
    if (v <= max_eigenvalue) {
      SpectralLine line;
      line.eigenvalue = v;
      line.multiplicity = 1;
      line.is_character = true;
      line.character = lab;
      line.op = op;
      lines.push_back(std::move(line));
    }
  });

  // Hermite families: mu0(n, a) is increasing in |n| and a, and the
  // admissible mu0 window is bounded for every operator, so both loops
  // terminate at explicitly computable indices.
  for (int sign : {+1, -1}) {
    for (int an = 1;; ++an) {
      int n = sign * an;
      double u_cap;
      if (op == OperatorKind::kPaneitz) {
        double nterm = 4.0 * (m.d + 1.0) / (2.0 * m.d - 1.0) *
                       static_cast<double>(an) * an * kPi * kPi * m.s * m.s;
        u_cap = paneitz_l0_cap(nterm);
      } else {
        u_cap = l0_cap;
      }
      if (u_cap < 0 || mu0(m, an, 0) > u_cap) {
        // For Laplace/Yamabe the cap is n-independent, so no larger |n|
        // can contribute. For Paneitz the cap grows like O(n) while mu0
        // grows like O(n^2); stop once mu0(n,0) clears the cap with the
        // quadratic term alone.
        double quad = 4.0 * an * an * pow_int(m.s, -2 * m.d) * kPi * kPi;
        if (op != OperatorKind::kPaneitz || u_cap < 0 || quad > u_cap) break;
        continue;
      }
      for (int a = 0;; ++a) {
        double u = mu0(m, an, a);
        if (u > u_cap) break;
        double v = herm_value(n, u);
        if (v <= max_eigenvalue) {
          SpectralLine line;
          line.eigenvalue = v;
          line.multiplicity = hermite_multiplicity(m, n, a);
          line.is_character = false;
          line.hermite = {n, a};
          line.op = op;
          lines.push_back(std::move(line));
        }
      }
    }
  }

  std::sort(lines.begin(), lines.end(), line_less);
  return lines;
}

std::vector<std::pair<double, std::int64_t>> merge_lines(
    const std::vector<SpectralLine>& lines, double tol) {
  std::vector<std::pair<double, std::int64_t>> out;
  for (const auto& l : lines) {
    if (!out.empty() && std::abs(l.eigenvalue - out.back().first) <=
                            tol * (1.0 + std::abs(l.eigenvalue)))
      out.back().second += l.multiplicity;
    else
      out.emplace_back(l.eigenvalue, l.multiplicity);
  }
  return out;
}

// --- negative eigenvalue counts -------------------------------------------------

namespace {

// Count dual-lattice points with lambda0 strictly inside (lo, hi), optionally
// collecting labels. The innermost xi axis is counted by range.
std::int64_t count_characters_in_window(const HeisenbergModel& m, double lo,
                                        double hi, std::int64_t listing_cap,
                                        std::vector<CharacterLabel>* labels) {
  if (hi <= 0 || hi <= lo) return 0;
  std::int64_t count = 0;
  // order: nu axes (outer), then xi axes; innermost xi_d counted by range
  // when not listing
  const int d = m.d;
  double cap = hi / (4.0 * kPi * kPi);
  double lo_cap = lo / (4.0 * kPi * kPi);
  std::vector<int> coords(2 * d, 0);
  std::function<void(int, double)> rec = [&](int pos, double used) {
    // pos walks nu axes 0..d-1 then xi axes d..2d-1
    if (pos == 2 * d - 1) {
      // innermost xi axis: need used + v^2 in (lo_cap, cap) strictly
      double rem = cap - used;
      if (rem <= 0) return;
      int vmax = static_cast<int>(std::floor(std::sqrt(rem)));
      while (static_cast<double>(vmax) * vmax >= rem) --vmax;  // strict
      if (vmax < 0) return;
      int vmin_excl = -1;  // |v| must be > vmin_excl when lo cuts from below
      if (used <= lo_cap) {
        double need = lo_cap - used;
        int t = static_cast<int>(std::floor(std::sqrt(need)));
        while (static_cast<double>(t) * t <= need) ++t;  // smallest |v| allowed
        vmin_excl = t - 1;
      }
      if (vmin_excl >= vmax) return;
      std::int64_t here =
          vmin_excl < 0 ? 2LL * vmax + 1 : 2LL * (vmax - vmin_excl);
      count += here;
      if (labels && count <= listing_cap) {
        for (int v = -vmax; v <= vmax; ++v) {
          if (vmin_excl >= 0 && std::abs(v) <= vmin_excl) continue;
          CharacterLabel lab;
          lab.nu.assign(coords.begin(), coords.begin() + d);
          lab.xi.assign(coords.begin() + d, coords.end() - 1);
          lab.xi.push_back(v);
          labels->push_back(std::move(lab));
        }
      }
      return;
    }
    double rem = cap - used;
    if (rem <= 0) return;
    if (pos < d) {
      int rj = m.r[pos];
      int lim = static_cast<int>(std::floor(std::sqrt(rem) / m.s * rj + 1e-9));
      for (int v = -lim; v <= lim; ++v) {
        coords[pos] = v;
        double eta = static_cast<double>(v) / rj;
        double c = m.s * m.s * eta * eta;
        if (c < rem) rec(pos + 1, used + c);
      }
    } else {
      int lim = static_cast<int>(std::floor(std::sqrt(rem) + 1e-12));
      for (int v = -lim; v <= lim; ++v) {
        coords[pos] = v;
        double c = static_cast<double>(v) * v;
        if (c < rem) rec(pos + 1, used + c);
      }
    }
  };
  rec(0, 0.0);
  return count;
}

// Hermite families with mu0(n, a) strictly inside (lo(n), hi(n)).
struct HermiteWindow {
  double lo = 0.0, hi = 0.0;
};

template <typename WindowFn>
std::int64_t count_hermite_in_windows(const HeisenbergModel& m, WindowFn&& window,
                                      double n_bound, std::int64_t listing_cap,
                                      std::vector<HermiteFamilyCount>* fams,
                                      bool* fully_listed) {
  std::int64_t count = 0;
  const int d = m.d;
  if (fully_listed) *fully_listed = true;
  for (int an = 1; an <= n_bound; ++an) {
    HermiteWindow w = window(an);
    if (w.hi <= 0) continue;
    double base = mu0(m, an, 0);
    if (base >= w.hi) continue;
    // a range with lo < mu0(n, a) < hi; mu0 linear increasing in a
    double step = 4.0 * kPi * an * m.s;  // mu0(n,a+1)-mu0(n,a)
    int a_hi = static_cast<int>(std::floor((w.hi - base) / step));
    while (a_hi >= 0 && mu0(m, an, a_hi) >= w.hi) --a_hi;
    if (a_hi < 0) continue;
    int a_lo = 0;
    if (base <= w.lo) {
      a_lo = static_cast<int>(std::ceil((w.lo - base) / step));
      while (mu0(m, an, a_lo) <= w.lo) ++a_lo;
    }
    if (a_lo > a_hi) continue;
    // sum of binom(a+d-1, d-1) over a in [a_lo, a_hi], times |n|^d vol, for +-n
    std::int64_t inner =
        binomial_int64(a_hi + d, d) - binomial_int64(a_lo - 1 + d, d);
    std::int64_t weight = m.volume();
    for (int j = 0; j < d; ++j) weight *= an;
    count += 2 * weight * inner;
    if (fams) {
      for (int a = a_lo; a <= a_hi; ++a) {
        if (static_cast<std::int64_t>(fams->size()) + 2 > listing_cap) {
          if (fully_listed) *fully_listed = false;
          break;
        }
        std::int64_t mult = weight * binomial_int64(a + d - 1, d - 1);
        fams->push_back({an, a, mult});
        fams->push_back({-an, a, mult});
      }
    }
  }
  return count;
}

}  // namespace

NegativeCount count_negative_yamabe(const HeisenbergModel& m,
                                    std::int64_t listing_cap) {
  NegativeCount out;
  const double T = yamabe_shift(m);  // lambda0 < T  <=>  Yamabe eigenvalue < 0

  out.certificate.character_radius_sq = T / (4.0 * kPi * kPi);
  std::int64_t nchar = count_characters_in_window(m, -1.0, T, 0, nullptr);
  out.certificate.character_count = nchar;
  if (nchar <= listing_cap) {
    count_characters_in_window(m, -1.0, T, listing_cap,
                               &out.certificate.characters);
  } else {
    out.certificate.characters_listed = false;
  }

  // mu0(n,0) >= 4 pi^2 n^2 s^{-2d} gives the provable n cutoff.
  double nb = m.s > 0 ? std::sqrt(T / (4.0 * kPi * kPi)) * pow_int(m.s, m.d) : 0;
  int n_bound = static_cast<int>(std::ceil(nb)) + 1;
  auto window = [&](int) { return HermiteWindow{-1.0, T}; };
  std::vector<HermiteFamilyCount> fams;
  bool listed = true;
  std::int64_t nherm = count_hermite_in_windows(m, window, n_bound, listing_cap,
                                                &fams, &listed);
  out.certificate.hermite_count = nherm;
  out.certificate.hermite_n_bound = n_bound;
  out.certificate.hermite_listed = listed;
  if (listed) out.certificate.hermite_families = std::move(fams);

  out.nu = nchar + nherm;
  return out;
}

NegativeCount count_negative_paneitz(const HeisenbergModel& m,
                                     std::int64_t listing_cap) {
  if (m.d < 2)
    throw std::invalid_argument(
        "count_negative_paneitz: unsupported for d = 1 (the discriminant "
        "delta0 = c1^2 - 4 c0 is negative there, so the quadratic sign window "
        "degenerates)");
  NegativeCount out;
  PaneitzConstants pc = paneitz_constants(m.d);
  const double S = pow_int(m.s, 2 * m.d + 2);
  if (pc.delta0 <= 0)
    throw std::runtime_error("count_negative_paneitz: delta0 <= 0");
  double sq0 = std::sqrt(pc.delta0) * S;
  double char_lo = 0.5 * (pc.c1 * S - sq0);
  double char_hi = 0.5 * (pc.c1 * S + sq0);

  out.certificate.character_radius_sq = std::max(char_hi, 0.0) / (4.0 * kPi * kPi);
  std::int64_t nchar =
      count_characters_in_window(m, char_lo, char_hi, 0, nullptr);
  out.certificate.character_count = nchar;
  if (nchar <= listing_cap)
    count_characters_in_window(m, char_lo, char_hi, listing_cap,
                               &out.certificate.characters);
  else
    out.certificate.characters_listed = false;

  auto window = [&](int an) {
    double dn = pc.delta0 * S * S + 16.0 * (m.d + 1.0) / (2.0 * m.d - 1.0) *
                                        static_cast<double>(an) * an * kPi *
                                        kPi * m.s * m.s;
    double sq = std::sqrt(dn);
    return HermiteWindow{0.5 * (pc.c1 * S - sq), 0.5 * (pc.c1 * S + sq)};
  };
  // hi(n) <= H0 + H1 n with H0 = (c1 + sqrt(delta0)) S / 2 and
  // H1 = 2 pi s sqrt((d+1)/(2d-1)); mu0(n,0) >= 4 pi^2 s^{-2d} n^2 beats it
  // beyond the larger root of the comparison quadratic.
  double H0 = 0.5 * (pc.c1 + std::sqrt(pc.delta0)) * S;
  double H1 = 2.0 * kPi * m.s * std::sqrt((m.d + 1.0) / (2.0 * m.d - 1.0));
  double q = 4.0 * kPi * kPi * pow_int(m.s, -2 * m.d);
  double disc = H1 * H1 + 4.0 * q * std::max(H0, 0.0);
  int n_bound = static_cast<int>(std::ceil((H1 + std::sqrt(disc)) / (2.0 * q))) + 1;

  std::vector<HermiteFamilyCount> fams;
  bool listed = true;
  std::int64_t nherm = count_hermite_in_windows(m, window, n_bound, listing_cap,
                                                &fams, &listed);
  out.certificate.hermite_count = nherm;
  out.certificate.hermite_n_bound = n_bound;
  out.certificate.hermite_listed = listed;
  if (listed) out.certificate.hermite_families = std::move(fams);

  out.nu = nchar + nherm;
  return out;
}

// --- eigenfunction evaluation ----------------------------------------------------

std::complex<double> eigenfunction_value(const HeisenbergModel& m,
                                         const CharacterLabel& label,
                                         const HeisenbergPoint& p) {
  double phase = 0.0;
  for (int j = 0; j < m.d; ++j) {
    phase += label.xi[j] * p.x[j];
    phase += (static_cast<double>(label.nu[j]) / m.r[j]) * p.y[j];
  }
  return std::exp(std::complex<double>(0.0, 2.0 * kPi * phase));
}

std::complex<double> eigenfunction_value(const HeisenbergModel& m,
                                         const HermitePointLabel& label,
                                         const HeisenbergPoint& p,
                                         bool force_ksum) {
  if (label.n == 0) throw std::invalid_argument("HermitePointLabel: n nonzero");
  const int n = label.n;
  const double an = std::abs(n);
  const double s = m.s;
  bool ground = true;
  for (int aj : label.alpha) ground = ground && aj == 0;

  std::complex<double> t_phase =
      std::exp(std::complex<double>(0.0, 2.0 * kPi * n * p.t));

  if (ground && !force_ksum) {
    // Poisson-type resummation of the k-sum:
    //   sum_k e^{-pi|n|s(u+k)^2} e^{2 i pi n (k+c) y}
    //     = e^{-pi|n|s u^2} e^{2 i pi n c y} theta(n y + i|n|s u, i|n|s).
    std::complex<double> val = t_phase;
    for (int j = 0; j < m.d; ++j) {
      double u = p.x[j] + label.a[j] + label.b[j];
      double c = label.a[j] + label.b[j];
      ThetaArg arg;
      arg.z = std::complex<double>(n * p.y[j], an * s * u);
      arg.tau = std::complex<double>(0.0, an * s);
      val *= std::exp(-kPi * an * s * u * u) *
             std::exp(std::complex<double>(0.0, 2.0 * kPi * n * c * p.y[j])) *
             jacobi_theta(arg);
    }
    return val;
  }

  // truncated k-sum; the Gaussian envelope of h_alpha cuts |u| where
  // e^{-pi |n| s u^2 / 2} < 1e-14
  double umax = std::sqrt(2.0 * 14.0 * std::log(10.0) / (kPi * an * s)) + 1.0;
  std::complex<double> val = t_phase;
  for (int j = 0; j < m.d; ++j) {
    double cj = label.a[j] + label.b[j];
    int kmin = static_cast<int>(std::floor(-umax - p.x[j] - cj));
    int kmax = static_cast<int>(std::ceil(umax - p.x[j] - cj));
    std::complex<double> sum = 0.0;
    for (int k = kmin; k <= kmax; ++k) {
      double u = p.x[j] + k + cj;
      double h = hermite_h(label.alpha[j], std::sqrt(2.0 * kPi * an * s) * u);
      sum += h * std::exp(std::complex<double>(0.0, 2.0 * kPi * n * (k + cj) * p.y[j]));
    }
    val *= sum;
  }
  return val;
}

std::vector<NodalSheet> nodal_set_hermite_ground(const HeisenbergModel& m,
                                                 const std::vector<double>& b,
                                                 int sign) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("nodal_set_hermite_ground: sign must be +-1");
  double s_null = yamabe_null_parameter(m.d, 1, 0);
  if (std::abs(m.s - s_null) > 1e-8 * s_null)
    throw std::invalid_argument(
        "nodal_set_hermite_ground: s is not the ground null parameter (got " +
        std::to_string(m.s) + ", need " + std::to_string(s_null) + ")");
  if (static_cast<int>(b.size()) != m.d)
    throw std::invalid_argument("nodal_set_hermite_ground: b must have length d");
  std::vector<NodalSheet> sheets;
  for (int j = 0; j < m.d; ++j) {
    double t = sign * (b[j] - 0.5);
    double xval = t - std::floor(t);
    NodalSheet sheet;
    sheet.axis = j;
    sheet.x_value = xval;
    for (int l = 1; l <= m.r[j]; ++l) sheet.y_values.push_back(l - 0.5);
    sheets.push_back(std::move(sheet));
  }
  return sheets;
}

CharacterNullReport character_null_analysis(const HeisenbergModel& m, int xi,
                                            int eta) {
  if (m.d != 1 || m.r[0] != 1)
    throw std::invalid_argument("character_null_analysis: requires d=1, r=(1)");
  CharacterNullReport rep;
  if (xi == 0 && eta == 0) {
    rep.has_positive_s = false;  // lambda(0,0) = -s^4/16 < 0 for all s > 0
    return rep;
  }
  // Solving lambda(xi, eta) = 0 as a quadratic in s^2:
  //   s^2 = 32 pi^2 (eta^2 + sqrt(eta^4 + xi^2/(16 pi^2))).
  // (The xi term enters squared; substituting back gives residual 0.)
  double x2 = static_cast<double>(xi) * xi;
  double e2 = static_cast<double>(eta) * eta;
  double s2 =
      32.0 * kPi * kPi * (e2 + std::sqrt(e2 * e2 + x2 / (16.0 * kPi * kPi)));
  rep.has_positive_s = true;
  rep.s = std::sqrt(s2);
  HeisenbergModel at = m;
  at.s = rep.s;
  CharacterLabel lab;
  lab.xi = {xi};
  lab.nu = {eta};
  rep.residual = std::abs(yamabe_eigenvalue(at, lab));
  rep.kernel_dim = (xi == 0 || eta == 0) ? 2 : 4;

  auto ladder = [](int f) {
    std::vector<double> v;
    for (int k = 0; k < 2 * std::abs(f); ++k)
      v.push_back(static_cast<double>(k) / (2.0 * std::abs(f)));
    return v;
  };
  if (xi == 0) {
    CharacterNodalSet s1;
    s1.kind = CharacterNodalSet::Kind::kYSheets;
    s1.y_values = ladder(eta);
    rep.nodal_sets.push_back(std::move(s1));
  } else if (eta == 0) {
    CharacterNodalSet s1;
    s1.kind = CharacterNodalSet::Kind::kXSheets;
    s1.x_values = ladder(xi);
    rep.nodal_sets.push_back(std::move(s1));
  } else {
    CharacterNodalSet prod;
    prod.kind = CharacterNodalSet::Kind::kProduct;
    prod.x_values = ladder(xi);
    prod.y_values = ladder(eta);
    rep.nodal_sets.push_back(std::move(prod));
    CharacterNodalSet diag;
    diag.kind = CharacterNodalSet::Kind::kDiagonal;
    diag.xi = xi;
    diag.eta = eta;
    rep.nodal_sets.push_back(std::move(diag));
  }
  return rep;
}

// --- twisted grid -----------------------------------------------------------------

TwistedGrid make_twisted_grid(const HeisenbergModel& m, int N) {
  if (N < 8) throw std::invalid_argument("twisted grid: need N >= 8");
  TwistedGrid g;
  g.d = m.d;
  g.N = N;
  g.r = m.r;
  for (int j = 0; j < m.d; ++j) g.dims.push_back(N);
  for (int j = 0; j < m.d; ++j) {
    if (m.r[j] < 1)
      throw std::invalid_argument("twisted grid: axis y_" + std::to_string(j + 1) +
                                  " has non-integer step count");
    g.dims.push_back(N * m.r[j]);
  }
  g.dims.push_back(N);
  return g;
}

std::int64_t TwistedGrid::size() const {
  std::int64_t s = 1;
  for (int v : dims) s *= v;
  return s;
}

std::int64_t TwistedGrid::index(const std::vector<int>& coords) const {
  std::int64_t idx = 0;
  for (std::size_t a = 0; a < dims.size(); ++a) idx = idx * dims[a] + coords[a];
  return idx;
}

HeisenbergPoint TwistedGrid::point(std::int64_t idx) const {
  std::vector<int> c(dims.size());
  for (int a = static_cast<int>(dims.size()) - 1; a >= 0; --a) {
    c[a] = static_cast<int>(idx % dims[a]);
    idx /= dims[a];
  }
  HeisenbergPoint p;
  double h = 1.0 / N;
  for (int j = 0; j < d; ++j) p.x.push_back(c[j] * h);
  for (int j = 0; j < d; ++j) p.y.push_back(c[d + j] * h);
  p.t = c[2 * d] * h;
  return p;
}

std::int64_t TwistedGrid::neighbor(std::int64_t idx, int axis, int delta) const {
  std::vector<int> c(dims.size());
  std::int64_t rest = idx;
  for (int a = static_cast<int>(dims.size()) - 1; a >= 0; --a) {
    c[a] = static_cast<int>(rest % dims[a]);
    rest /= dims[a];
  }
  const int tax = 2 * d;
  if (axis < d) {
    c[axis] += delta;
    if (c[axis] == dims[axis]) {  // crossing x_j -> x_j - 1 shifts t by -y_j
      c[axis] = 0;
      c[tax] = ((c[tax] - c[d + axis]) % dims[tax] + dims[tax]) % dims[tax];
    } else if (c[axis] < 0) {
      c[axis] = dims[axis] - 1;
      c[tax] = (c[tax] + c[d + axis]) % dims[tax];
    }
  } else {
    c[axis] = ((c[axis] + delta) % dims[axis] + dims[axis]) % dims[axis];
  }
  return index(c);
}

namespace {

SymmetricOperator assemble_twisted(const HeisenbergModel& m, int N,
                                   bool vertical_only) {
  TwistedGrid g = make_twisted_grid(m, N);
  const std::int64_t M = g.size();
  if (M > (std::int64_t(1) << 31))
    throw std::invalid_argument("twisted grid too large");
  const double h = 1.0 / N;
  const double inv_h2 = 1.0 / (h * h);
  const double s = m.s;
  const double s2 = s * s;
  const double s2d = [&] {
    double v = 1.0;
    for (int i = 0; i < 2 * m.d; ++i) v /= s;
    return v;
  }();
  const int tax = 2 * m.d;

  // fixed-size stencil per row: diag + 2(2d+1) axis neighbors + 4d cross
  const int max_nnz = 1 + 2 * (2 * m.d + 1) + 4 * m.d;
  std::vector<std::pair<int, double>> row;
  row.reserve(max_nnz);

  SparseSym sp;
  sp.n = static_cast<int>(M);
  sp.row_ptr.assign(M + 1, 0);
  sp.col.reserve(M * max_nnz);
  sp.val.reserve(M * max_nnz);

  std::vector<int> c(g.dims.size());
  for (std::int64_t i = 0; i < M; ++i) {
    std::int64_t rest = i;
    for (int a = static_cast<int>(g.dims.size()) - 1; a >= 0; --a) {
      c[a] = static_cast<int>(rest % g.dims[a]);
      rest /= g.dims[a];
    }
    row.clear();
    double diag = 0.0;
    auto add = [&](std::int64_t col, double v) {
      if (v == 0.0) return;
      if (col == i)
        diag += v;
      else
        row.emplace_back(static_cast<int>(col), v);
    };

    if (!vertical_only) {
      for (int j = 0; j < m.d; ++j) {  // -X_j^2
        diag += 2.0 * inv_h2;
        add(g.neighbor(i, j, +1), -inv_h2);
        add(g.neighbor(i, j, -1), -inv_h2);
      }
      // -s^{-2d} T^2
      diag += 2.0 * s2d * inv_h2;
      add(g.neighbor(i, tax, +1), -s2d * inv_h2);
      add(g.neighbor(i, tax, -1), -s2d * inv_h2);
      for (int j = 0; j < m.d; ++j) {  // -s^2 Y_j^2
        double xj = c[j] * h;
        diag += 2.0 * s2 * inv_h2;  // -s^2 D2_y
        add(g.neighbor(i, m.d + j, +1), -s2 * inv_h2);
        add(g.neighbor(i, m.d + j, -1), -s2 * inv_h2);
        diag += 2.0 * s2 * xj * xj * inv_h2;  // -s^2 x_j^2 D2_t
        add(g.neighbor(i, tax, +1), -s2 * xj * xj * inv_h2);
        add(g.neighbor(i, tax, -1), -s2 * xj * xj * inv_h2);
        // -2 s^2 x_j D_y D_t (centered cross term)
        double cc = s2 * xj * inv_h2 / 2.0;
        add(g.neighbor(g.neighbor(i, m.d + j, +1), tax, +1), -cc);
        add(g.neighbor(g.neighbor(i, m.d + j, -1), tax, -1), -cc);
        add(g.neighbor(g.neighbor(i, m.d + j, +1), tax, -1), +cc);
        add(g.neighbor(g.neighbor(i, m.d + j, -1), tax, +1), +cc);
      }
    } else {
      diag += 2.0 * inv_h2;  // -T^2
      add(g.neighbor(i, tax, +1), -inv_h2);
      add(g.neighbor(i, tax, -1), -inv_h2);
    }

    row.emplace_back(static_cast<int>(i), diag);
    std::sort(row.begin(), row.end());
    // merge duplicate columns (t neighbors repeat across stencil parts)
    int w = 0;
    for (std::size_t kq = 0; kq < row.size(); ++kq) {
      if (w > 0 && row[w - 1].first == row[kq].first)
        row[w - 1].second += row[kq].second;
      else
        row[w++] = row[kq];
    }
    row.resize(w);
    for (auto& [cc, vv] : row) {
      sp.col.push_back(cc);
      sp.val.push_back(vv);
    }
    sp.row_ptr[i + 1] = static_cast<int>(sp.col.size());
  }

  SymmetricOperator op = SymmetricOperator::sparse(std::move(sp));
  // x_1 planes give a cyclic block tridiagonal structure
  BlockTridiagLayout lay;
  std::int64_t plane = M / N;
  for (int b = 0; b <= N; ++b) lay.offsets.push_back(static_cast<int>(b * plane));
  lay.cyclic = true;
  op.set_block_layout(std::move(lay));
  return op;
}

}  // namespace

SymmetricOperator twisted_grid_laplacian(const HeisenbergModel& m, int N) {
  return assemble_twisted(m, N, false);
}

SymmetricOperator twisted_grid_vertical(const HeisenbergModel& m, int N) {
  return assemble_twisted(m, N, true);
}

}  // namespace sg
