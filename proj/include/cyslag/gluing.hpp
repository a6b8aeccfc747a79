// Approximate Ricci-flat metrics obtained by interpolating the flat potential
// and the Eguchi-Hanson potential across an annular neck around each singular
// curve, and the scans that measure how far they are from Ricci-flat.
#pragma once

#include "cyslag/canonical.hpp"
#include "cyslag/core.hpp"
#include "cyslag/orbifold.hpp"

#include <random>

namespace cyslag {

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

struct CutoffJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Smoothstep of order k (degree 2k + 1) from 0 at r0 to 1 at r1: the first k
/// derivatives vanish at both ends. k = 2 is the quintic 10x³ − 15x⁴ + 6x⁵.
inline CutoffJet cutoff_jet(double r, double r0, double r1, int order = 2) {
  if (!(r0 < r1)) throw ConfigError("cutoff needs r0 < r1");
  if (order < 2 || order > 6) throw ConfigError("cutoff smoothness order must be in [2, 6]");
  if (r <= r0) return {0.0, 0.0, 0.0};
  if (r >= r1) return {1.0, 0.0, 0.0};
  const double w = r1 - r0;
  // S(x) = 1 − S(1 − x): the upper half is evaluated from r1, where the
  // alternating monomial sum would cancel.
  const bool upper = r - r0 > r1 - r;
  const double x = upper ? (r1 - r) / w : (r - r0) / w;
  // S(x) = Σ_j C(k+j, j) C(2k+1, k−j) (−1)^j x^{k+1+j}
  auto binom = [](int n, int m) {
    double v = 1.0;
    for (int i = 1; i <= m; ++i) v = v * (n - m + i) / i;
    return v;
  };
  const int k = order;
  double v = 0.0, d1 = 0.0, d2 = 0.0;
  for (int j = 0; j <= k; ++j) {
    const double c = binom(k + j, j) * binom(2 * k + 1, k - j) * (j % 2 ? -1.0 : 1.0);
    const int e = k + 1 + j;
    v += c * std::pow(x, e);
    d1 += c * e * std::pow(x, e - 1);
    d2 += c * e * (e - 1) * std::pow(x, e - 2);
  }
  if (upper) return {1.0 - v, d1 / w, -d2 / (w * w)};
  return {v, d1 / w, d2 / (w * w)};
}

inline double cutoff(double r, double r0, double r1, int order = 2) {
  return cutoff_jet(r, r0, r1, order).value;
}

/// F(U) = χ(√U)·U + (1 − χ(√U))·f_a(U). Equal to f_a for √U ≤ r0 and to U for
/// √U ≥ r1, evaluated through the same code paths as the pure pieces.
struct GluedProfile {
  double a = 0.0;
  double r0 = 0.5;
  double r1 = 1.0;
  int order = 2;

  GluedProfile(double resolution, double inner, double outer, int smoothness = 2)
      : a(resolution), r0(inner), r1(outer), order(smoothness) {
    if (!(r0 > 0.0 && r0 < r1)) throw ConfigError("neck radii must satisfy 0 < r0 < r1");
    cutoff_jet(r0, r0, r1, order);
    if (a < 0.0) throw ConfigError("neck parameter a must be non-negative");
  }

  bool admits(double U) const { return a == 0.0 || U > 0.0; }

  /// (1 − χ)(f_a − U) and its U-derivatives.
  RadialJet correction(double U) const {
    if (a == 0.0) return {};
    const double r = std::sqrt(U);
    if (r >= r1) return {};
    const double D = eh_discrepancy(U, a);
    const double q = a / U;
    const double D1 = q * q / (std::sqrt(1.0 + q * q) + 1.0);  // f_a' − 1
    const double D2 = eh_value(U, a).d2;
    if (r <= r0) return {D, D1, D2};
    const CutoffJet c = cutoff_jet(r, r0, r1, order);
    const double c1 = c.d1 / (2.0 * r);
    const double c2 = c.d2 / (4.0 * U) - c.d1 / (4.0 * U * r);
    const double keep = 1.0 - c.value;
    return {keep * D, keep * D1 - c1 * D, keep * D2 - 2.0 * c1 * D1 - c2 * D};
  }

  double value(double U) const {
    if (a == 0.0 || std::sqrt(U) >= r1) return FlatProfile{}.value(U);
    if (std::sqrt(U) <= r0) return eh_value(U, a).f;
    return U + correction(U).f;
  }

  RadialSlopes slopes(double U) const {
    if (a == 0.0 || std::sqrt(U) >= r1) return FlatProfile{}.slopes(U);
    if (std::sqrt(U) <= r0) return EguchiHansonProfile(a).slopes(U);
    const RadialJet g = correction(U);
    return {1.0 + g.d1, g.d2};
  }
};

using GluedPotential = RadialPotential<GluedProfile>;

/// h = χ·(U + |w_3|²) + (1 − χ)·(f_a(U) + |w_3|²) on the normal chart (w_1, w_2, w_3).
inline GluedPotential glued_potential(double a, double r0, double r1, int order = 2) {
  return {GluedProfile(a, r0, r1, order), 2, 1, "neck"};
}

/// Neck radii are in normal-coordinate units; `scale` converts one normal
/// unit into lattice units on E_1 × E_2 × E_3.
struct NeckConfig {
  double r0 = 0.5;
  double r1 = 1.0;
  double scale = 0.1;
  int smoothness = 2;
  std::vector<double> a = std::vector<double>(16, 0.01);

  void validate() const {
    if (!(r0 > 0.0 && r0 < r1)) throw ConfigError("neck: need 0 < r0 < r1");
    if (!(scale > 0.0)) throw ConfigError("neck: scale must be positive");
    if (smoothness < 2 || smoothness > 6) throw ConfigError("neck: smoothness order must be in [2, 6]");
    if (a.size() != 16) throw ConfigError("neck: need one parameter per singular curve (16)");
    for (double v : a)
      if (!(v > 0.0)) throw ConfigError("neck: parameters a_k must be positive");
  }

  std::vector<std::string> warnings() const {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < a.size(); ++k)
      if (a[k] > r0 / 4.0)
        out.push_back("neck " + std::to_string(k) + ": a = " + std::to_string(a[k]) +
                      " exceeds r0/4");
    return out;
  }

  double norm() const {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
  }
};

/// The glued metric on the covering chart of E_1 × E_2 × E_3: the flat metric
/// plus one neck correction per upstairs singular curve, in that curve's
/// normal coordinates w = (z − c)/scale.
class GluedOrbifoldMetric {
 public:
  GluedOrbifoldMetric(Orbifold orb, NeckConfig cfg) : orb_(std::move(orb)), cfg_(std::move(cfg)) {
    cfg_.validate();
    if (2.0 * cfg_.scale * cfg_.r1 >= orb_.min_pairwise_distance())
      throw ConfigError("neck: scaled outer radius makes neighbouring necks overlap");
    const auto classes = orb_.singular_set();
    for (std::size_t k = 0; k < classes.size(); ++k)
      for (const FixedCurve& c : classes[k].members)
        necks_.push_back({c, GluedProfile(cfg_.a[k], cfg_.r0, cfg_.r1, cfg_.smoothness)});
  }

  ComplexChart chart() const { return ComplexChart(3, "E1xE2xE3 glued"); }
  const NeckConfig& config() const { return cfg_; }
  const Orbifold& orbifold() const { return orb_; }

  bool admissible(const CVec& z) const {
    if (z.size() != 3) return false;
    for (const auto& n : necks_)
      if (!n.profile.admits(local(n.curve, z).squaredNorm())) return false;
    return true;
  }

  double value(const CVec& z) const {
    double v = z.squaredNorm();
    const double s2 = cfg_.scale * cfg_.scale;
    for (const auto& n : necks_) v += s2 * n.profile.correction(local(n.curve, z).squaredNorm()).f;
    return v;
  }

  CVec gradient(const CVec& z) const {
    CVec g = z.conjugate();
    for (const auto& n : necks_) {
      const CVec w = local(n.curve, z);
      const RadialJet j = n.profile.correction(w.squaredNorm());
      const auto [p, q] = normal_factors(n.curve);
      g(p) += cfg_.scale * j.d1 * std::conj(w(0));
      g(q) += cfg_.scale * j.d1 * std::conj(w(1));
    }
    return g;
  }

  CMat hessian(const CVec& z) const {
    CMat g = CMat::Identity(3, 3);
    for (const auto& n : necks_) {
      CVec w;
      if (!within_outer(n.curve, z, w)) continue;
      const RadialJet j = n.profile.correction(w.squaredNorm());
      const auto [p, q] = normal_factors(n.curve);
      const std::array<int, 2> idx{p, q};
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          g(idx[r], idx[c]) += (r == c ? j.d1 : 0.0) + j.d2 * std::conj(w(r)) * w(c);
    }
    return g;
  }

  /// Smallest normal distance (in normal units) from z to any singular curve.
  double nearest_neck_distance(const CVec& z) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& n : necks_) best = std::min(best, local(n.curve, z).norm());
    return best;
  }

 private:
  struct Neck {
    FixedCurve curve;
    GluedProfile profile;
  };

  static std::pair<int, int> normal_factors(const FixedCurve& c) {
    const int a = (c.free_factor + 1) % 3, b = (c.free_factor + 2) % 3;
    return {std::min(a, b), std::max(a, b)};
  }

  CVec local(const FixedCurve& c, const CVec& z) const {
    const auto [p, q] = normal_factors(c);
    const auto& E = orb_.curves();
    CVec w(2);
    w(0) = E[p].nearest(z(p) - E[p].to_complex(c.coords[p])) / cfg_.scale;
    w(1) = E[q].nearest(z(q) - E[q].to_complex(c.coords[q])) / cfg_.scale;
    return w;
  }

  /// Normal coordinates of z relative to c, when |w| < r1.
  bool within_outer(const FixedCurve& c, const CVec& z, CVec& w) const {
    const auto [p, q] = normal_factors(c);
    const auto& E = orb_.curves();
    const double reach2 = cfg_.r1 * cfg_.r1 * cfg_.scale * cfg_.scale;
    const cplx d1 = E[p].nearest(z(p) - E[p].to_complex(c.coords[p]));
    if (std::norm(d1) >= reach2) return false;
    const cplx d2 = E[q].nearest(z(q) - E[q].to_complex(c.coords[q]));
    if (std::norm(d1) + std::norm(d2) >= reach2) return false;
    w.resize(2);
    w << d1 / cfg_.scale, d2 / cfg_.scale;
    return true;
  }

  Orbifold orb_;
  NeckConfig cfg_;
  std::vector<Neck> necks_;
};

// ---------------------------------------------------------------------------
// Scans on a single neck chart (w_1, w_2, w_3)

/// Points with |(w_1, w_2)| = r in pseudo-random directions; w_3 = 0.
inline std::vector<CVec> neck_shell(double r, int directions, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<CVec> out;
  for (int d = 0; d < directions; ++d) {
    CVec w(3);
    w << cplx(nd(rng), nd(rng)), cplx(nd(rng), nd(rng)), cplx(0.0, 0.0);
    w.head(2) *= r / w.head(2).norm();
    out.push_back(w);
  }
  return out;
}

struct ScanOptions {
  int radii = 24;
  int directions = 4;
  double fd_step = 1e-3;
  std::uint64_t seed = 1;
  int smoothness = 2;
};

struct PositivityReport {
  bool positive = false;
  double min_eigenvalue = 0.0;
  std::size_t samples = 0;
};

inline PositivityReport glued_metric_positivity(double a, double r0, double r1,
                                                const ScanOptions& opt = {}) {
  const GluedPotential h = glued_potential(a, r0, r1, opt.smoothness);
  std::mt19937_64 rng(opt.seed);
  PositivityReport rep;
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (double r : linspace(r0, r1, opt.radii))
    for (const CVec& w : neck_shell(r, opt.directions, rng)) {
      rep.min_eigenvalue = std::min(rep.min_eigenvalue, metric_from_potential(h, w).min_eigenvalue());
      ++rep.samples;
    }
  rep.positive = rep.min_eigenvalue > 0.0;
  return rep;
}

struct RicciScan {
  double annulus_sup = 0.0;
  double annulus_mean = 0.0;
  double inner_sup = 0.0;
  double outer_sup = 0.0;
  std::size_t samples = 0;
};

inline RicciScan ricci_defect_scan(double a, double r0, double r1, const ScanOptions& opt = {}) {
  const GluedPotential h = glued_potential(a, r0, r1, opt.smoothness);
  std::mt19937_64 rng(opt.seed);
  const double margin = 4.0 * opt.fd_step * std::max(1.0, 2.0 * r1);
  RicciScan rep;
  std::size_t annulus_count = 0;
  auto scan = [&](double lo, double hi, auto&& sink) {
    if (!(hi > lo)) return;
    for (double r : linspace(lo, hi, opt.radii))
      for (const CVec& w : neck_shell(r, opt.directions, rng)) {
        sink(ricci_form(h, w, opt.fd_step).norm());
        ++rep.samples;
      }
  };
  scan(0.5 * r0, r0 - margin, [&](double v) { rep.inner_sup = std::max(rep.inner_sup, v); });
  scan(r0, r1, [&](double v) {
    rep.annulus_sup = std::max(rep.annulus_sup, v);
    rep.annulus_mean += v;
    ++annulus_count;
  });
  scan(r1 + margin, 2.0 * r1, [&](double v) { rep.outer_sup = std::max(rep.outer_sup, v); });
  if (annulus_count) rep.annulus_mean /= static_cast<double>(annulus_count);
  return rep;
}

/// sup over √U ∈ [r0, r1] of |f_a(U) − U|.
inline double neck_potential_discrepancy(double a, double r0, double r1, int radii = 201) {
  double best = 0.0;
  for (double r : linspace(r0, r1, radii))
    best = std::max(best, std::abs(eh_discrepancy(r * r, a)));
  return best;
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InsufficientDataError("slope needs >= 2 points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

struct ScalingRow {
  double a = 0.0;
  double potential_discrepancy = 0.0;
  RicciScan ricci;
};

struct ScalingProbe {
  std::vector<ScalingRow> rows;
  double potential_exponent = 0.0;
  double ricci_exponent = 0.0;
};

inline ScalingProbe scaling_probe(const std::vector<double>& a_list, double r0, double r1,
                                  const ScanOptions& opt = {}) {
  if (a_list.size() < 3) throw InsufficientDataError("scaling_probe needs at least 3 values of a");
  for (std::size_t i = 1; i < a_list.size(); ++i)
    if (std::abs(a_list[i] / a_list[i - 1] - 0.5) > 1e-9)
      throw PreconditionError("scaling_probe: a-sequence must be geometric with ratio 1/2");
  ScalingProbe p;
  std::vector<double> as, pot, ric;
  for (double a : a_list) {
    ScalingRow row{a, neck_potential_discrepancy(a, r0, r1), ricci_defect_scan(a, r0, r1, opt)};
    as.push_back(a);
    pot.push_back(row.potential_discrepancy);
    ric.push_back(row.ricci.annulus_sup);
    p.rows.push_back(row);
  }
  p.potential_exponent = loglog_slope(as, pot);
  p.ricci_exponent = loglog_slope(as, ric);
  return p;
}

}  // namespace cyslag
