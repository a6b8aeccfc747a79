// The flat orbifold (E_1 × E_2 × E_3)/(Z_2 × Z_2): lattice arithmetic, the two
// involutions, their fixed curves, the singular set, torus fibers, and the
// cyclic-quotient blowup charts.
#pragma once

#include "cyslag/core.hpp"

#include <array>
#include <map>
#include <numeric>
#include <set>

namespace cyslag {

/// z = (s4 + t4 τ)/4, exact modulo the lattice Z + Zτ (both indices mod 4).
struct QuarterPoint {
  int s4 = 0;
  int t4 = 0;

  static int mod4(int v) { return ((v % 4) + 4) % 4; }
  QuarterPoint reduced() const { return {mod4(s4), mod4(t4)}; }
  bool is_lattice() const { return mod4(s4) == 0 && mod4(t4) == 0; }
  QuarterPoint operator+(QuarterPoint o) const { return QuarterPoint{s4 + o.s4, t4 + o.t4}.reduced(); }
  QuarterPoint operator-(QuarterPoint o) const { return QuarterPoint{s4 - o.s4, t4 - o.t4}.reduced(); }
  QuarterPoint negated() const { return QuarterPoint{-s4, -t4}.reduced(); }
  auto operator<=>(const QuarterPoint&) const = default;
};

class EllipticCurve {
 public:
  explicit EllipticCurve(cplx tau = kI) : tau_(tau) {
    if (!(tau.imag() > 0.0)) throw ConfigError("elliptic curve period must have Im tau > 0");
  }

  cplx tau() const { return tau_; }
  bool pure_imaginary() const { return tau_.real() == 0.0; }

  cplx to_complex(QuarterPoint q) const { return (static_cast<double>(q.s4) + static_cast<double>(q.t4) * tau_) / 4.0; }

  /// Lattice coordinates (s, t) with z = s + t τ.
  std::pair<double, double> lattice_coords(cplx z) const {
    const double t = z.imag() / tau_.imag();
    return {z.real() - t * tau_.real(), t};
  }

  /// Representative with lattice coordinates in [0, 1).
  cplx reduce(cplx z) const {
    auto [s, t] = lattice_coords(z);
    s -= std::floor(s);
    t -= std::floor(t);
    return s + t * tau_;
  }

  /// Shortest representative of z modulo the lattice.
  cplx nearest(cplx z) const {
    auto [s, t] = lattice_coords(z);
    s -= std::round(s);
    t -= std::round(t);
    cplx best = s + t * tau_;
    for (int ds = -1; ds <= 1; ++ds)
      for (int dt = -1; dt <= 1; ++dt) {
        const cplx c = best + cplx(ds, 0.0) + static_cast<double>(dt) * tau_;
        if (std::norm(c) < std::norm(best)) best = c;
      }
    return best;
  }

  double distance(cplx a, cplx b) const { return std::abs(nearest(a - b)); }

 private:
  cplx tau_;
};

/// z ↦ eps z + shift on one elliptic factor.
struct FactorMap {
  int eps = 1;
  QuarterPoint shift;
};

struct GroupAction {
  std::string name;
  std::array<FactorMap, 3> maps;

  QuarterPoint apply(int factor, QuarterPoint q) const {
    const FactorMap& m = maps[factor];
    return ((m.eps == 1) ? q.reduced() : q.negated()) + m.shift;
  }

  CVec apply(const std::array<EllipticCurve, 3>& curves, const CVec& z) const {
    CVec w(3);
    for (int j = 0; j < 3; ++j)
      w(j) = static_cast<double>(maps[j].eps) * z(j) + curves[j].to_complex(maps[j].shift);
    return w;
  }

  /// (this ∘ other)(z) = this(other(z)).
  GroupAction compose(const GroupAction& other) const {
    GroupAction out{name + "∘" + other.name, {}};
    for (int j = 0; j < 3; ++j) {
      const FactorMap& f = maps[j];
      const FactorMap& g = other.maps[j];
      const QuarterPoint shifted = (f.eps == 1) ? g.shift : g.shift.negated();
      out.maps[j] = FactorMap{f.eps * g.eps, shifted + f.shift};
    }
    return out;
  }
};

/// An elliptic curve {fixed coordinates in two factors} × E_free.
struct FixedCurve {
  int free_factor = 2;
  std::array<QuarterPoint, 3> coords{};  // coords[free_factor] is unused (zero)

  auto operator<=>(const FixedCurve&) const = default;
};

struct SingularClass {
  FixedCurve representative;
  std::vector<FixedCurve> members;
  std::string source;  // action whose fixed curves form the class
};

struct GenericityResult {
  bool is_generic = true;
  std::vector<FixedCurve> intersected;
  std::vector<std::size_t> classes;  // indices into singular_set()
};

inline constexpr double kIntersectionThreshold = 1e-9;

class Orbifold {
 public:
  explicit Orbifold(std::array<cplx, 3> taus = {kI, kI, kI}, bool strict = true)
      : curves_{EllipticCurve(taus[0]), EllipticCurve(taus[1]), EllipticCurve(taus[2])},
        strict_(strict) {}

  const std::array<EllipticCurve, 3>& curves() const { return curves_; }
  bool pure_imaginary() const {
    return std::all_of(curves_.begin(), curves_.end(),
                       [](const EllipticCurve& e) { return e.pure_imaginary(); });
  }

  // z_1 ↦ −z_1 + ½, z_2 ↦ −z_2 + ½, z_3 ↦ z_3
  static GroupAction alpha() {
    return {"alpha", {FactorMap{-1, {2, 0}}, FactorMap{-1, {2, 0}}, FactorMap{1, {0, 0}}}};
  }
  // z_1 ↦ −z_1, z_2 ↦ z_2, z_3 ↦ −z_3
  static GroupAction beta() {
    return {"beta", {FactorMap{-1, {0, 0}}, FactorMap{1, {0, 0}}, FactorMap{-1, {0, 0}}}};
  }
  static GroupAction alpha_beta() { return alpha().compose(beta()); }

  /// Fixed curves of an involution whose fixed set is a union of curves.
  static std::vector<FixedCurve> fixed_locus(const GroupAction& action) {
    std::array<std::vector<QuarterPoint>, 3> per_factor;
    int free_factor = -1;
    for (int j = 0; j < 3; ++j) {
      const FactorMap& m = action.maps[j];
      if (m.eps == 1) {
        if (!m.shift.is_lattice()) return {};  // a translation has no fixed points
        if (free_factor != -1)
          throw PreconditionError("fixed_locus: action fixes more than one factor pointwise");
        free_factor = j;
        continue;
      }
      // 2z ≡ shift: z = shift/2 + half periods.
      const QuarterPoint c = m.shift.reduced();
      if (c.s4 % 2 != 0 || c.t4 % 2 != 0)
        throw PreconditionError("fixed_locus: shift must be a half period");
      const QuarterPoint half{c.s4 / 2, c.t4 / 2};
      for (QuarterPoint hp : {QuarterPoint{0, 0}, QuarterPoint{2, 0}, QuarterPoint{0, 2},
                              QuarterPoint{2, 2}})
        per_factor[j].push_back(half + hp);
    }
    if (free_factor == -1) throw PreconditionError("fixed_locus: action has isolated fixed points");
    std::vector<FixedCurve> out;
    const int a = (free_factor + 1) % 3, b = (free_factor + 2) % 3;
    const int lo = std::min(a, b), hi = std::max(a, b);
    for (QuarterPoint p : per_factor[lo])
      for (QuarterPoint q : per_factor[hi]) {
        FixedCurve c;
        c.free_factor = free_factor;
        c.coords[lo] = p;
        c.coords[hi] = q;
        out.push_back(c);
      }
    return out;
  }

  /// Exact check that every point of the curve is fixed by the action.
  static bool is_fixed(const GroupAction& action, const FixedCurve& c) {
    for (int j = 0; j < 3; ++j) {
      if (j == c.free_factor) {
        if (action.maps[j].eps != 1 || !action.maps[j].shift.is_lattice()) return false;
      } else if (!(action.apply(j, c.coords[j]) - c.coords[j]).is_lattice()) {
        return false;
      }
    }
    return true;
  }

  static FixedCurve image(const GroupAction& action, const FixedCurve& c) {
    FixedCurve out = c;
    for (int j = 0; j < 3; ++j)
      out.coords[j] = (j == c.free_factor) ? QuarterPoint{} : action.apply(j, c.coords[j]);
    return out;
  }

  /// Flat distance between two fixed curves (factors free in either curve
  /// contribute nothing).
  double curve_distance(const FixedCurve& c1, const FixedCurve& c2) const {
    double d2 = 0.0;
    for (int j = 0; j < 3; ++j) {
      if (j == c1.free_factor || j == c2.free_factor) continue;
      const double d = curves_[j].distance(curves_[j].to_complex(c1.coords[j]),
                                           curves_[j].to_complex(c2.coords[j]));
      d2 += d * d;
    }
    return std::sqrt(d2);
  }

  std::vector<FixedCurve> upstairs_curves() const {
    auto a = fixed_locus(alpha());
    auto b = fixed_locus(beta());
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }

  double min_pairwise_distance() const {
    const auto all = upstairs_curves();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < all.size(); ++i)
      for (std::size_t j = i + 1; j < all.size(); ++j)
        best = std::min(best, curve_distance(all[i], all[j]));
    return best;
  }

  /// The 32 upstairs curves grouped into orbits of the Z_2 × Z_2 action.
  std::vector<SingularClass> singular_set() const {
    const std::array<GroupAction, 3> group{alpha(), beta(), alpha_beta()};
    std::vector<SingularClass> classes;
    std::set<FixedCurve> seen;
    auto add_from = [&](const GroupAction& source) {
      for (const FixedCurve& c : fixed_locus(source)) {
        if (seen.count(c)) continue;
        std::set<FixedCurve> orbit{c};
        for (const GroupAction& g : group) orbit.insert(image(g, c));
        SingularClass cls{*orbit.begin(), {orbit.begin(), orbit.end()}, source.name};
        seen.insert(orbit.begin(), orbit.end());
        classes.push_back(std::move(cls));
      }
    };
    add_from(alpha());
    add_from(beta());
    return classes;
  }

  /// (s_1, s_2, s_3) ↦ (α̂ + i s_1, β̂ + i s_2, γ̂ + i s_3), s_j ∈ [0, |τ_j|).
  ParamImmersion torus_fiber(double a, double b, double c, int grid = 5) const {
    if (strict_ && !pure_imaginary())
      throw ConfigError("torus fibers need pure imaginary periods");
    RVec hi(3);
    for (int j = 0; j < 3; ++j) hi(j) = curves_[j].tau().imag();
    const std::array<double, 3> re{a, b, c};
    auto map = [re](const RVec& s) {
      ImmersionJet jet{CVec(3), kI * CMat::Identity(3, 3)};
      for (int j = 0; j < 3; ++j) jet.z(j) = cplx(re[j], s(j));
      return jet;
    };
    return ParamImmersion(3, ComplexChart(3, "E1xE2xE3"), map, RVec::Zero(3), hi, {grid, grid, grid});
  }

  /// Distance from the fiber {Re z = (α̂, β̂, γ̂)} to a fixed curve.
  double fiber_distance(const std::array<double, 3>& re, const FixedCurve& c) const {
    double d2 = 0.0;
    for (int j = 0; j < 3; ++j) {
      if (j == c.free_factor) continue;
      double d = re[j] - curves_[j].to_complex(c.coords[j]).real();
      d -= std::round(d);
      d2 += d * d;
    }
    return std::sqrt(d2);
  }

  GenericityResult genericity(double a, double b, double c) const {
    if (strict_ && !pure_imaginary())
      throw ConfigError("fiber genericity needs pure imaginary periods");
    GenericityResult res;
    const std::array<double, 3> re{a, b, c};
    const auto classes = singular_set();
    for (std::size_t k = 0; k < classes.size(); ++k) {
      bool hit_class = false;
      for (const FixedCurve& m : classes[k].members)
        if (fiber_distance(re, m) < kIntersectionThreshold) {
          res.intersected.push_back(m);
          hit_class = true;
        }
      if (hit_class) res.classes.push_back(k);
    }
    res.is_generic = res.intersected.empty();
    return res;
  }

 private:
  std::array<EllipticCurve, 3> curves_;
  bool strict_;
};

/// Non-generic fibers: (α̂, β̂) ∈ {¼, ¾}² or (α̂, γ̂) ∈ {0, ½}² modulo 1.
inline bool closed_form_nongeneric(double a, double b, double c, double tol = 1e-9) {
  auto near = [tol](double x, double target) {
    double d = x - target;
    d -= std::round(d);
    return std::abs(d) < tol;
  };
  auto quarter = [&](double x) { return near(x, 0.25) || near(x, 0.75); };
  auto half = [&](double x) { return near(x, 0.0) || near(x, 0.5); };
  return (quarter(a) && quarter(b)) || (half(a) && half(c));
}

// ---------------------------------------------------------------------------
// Blowup charts of C^n / Z_n

class BlowupChart {
 public:
  explicit BlowupChart(int n) : n_(n) {
    if (n < 2) throw ConfigError("blowup chart needs n >= 2");
  }
  int order() const { return n_; }

  /// w_1 = z_1^n, w_i = z_i / z_1.
  CVec to_chart(const CVec& z) const {
    check(z);
    if (z(0) == cplx(0.0)) throw DomainError("blowup chart requires z_1 != 0");
    CVec w(n_);
    w(0) = std::pow(z(0), n_);
    for (int i = 1; i < n_; ++i) w(i) = z(i) / z(0);
    return w;
  }

  /// z_1 = w_1^{1/n} (principal branch), z_i = z_1 w_i.
  CVec from_chart(const CVec& w) const {
    check(w);
    CVec z(n_);
    z(0) = std::pow(w(0), 1.0 / n_);
    for (int i = 1; i < n_; ++i) z(i) = z(0) * w(i);
    return z;
  }

  /// Holomorphic Jacobian ∂z/∂w of from_chart, w_1 ≠ 0.
  CMat jacobian(const CVec& w) const {
    check(w);
    if (w(0) == cplx(0.0)) throw DomainError("blowup Jacobian requires w_1 != 0");
    const cplx z1 = std::pow(w(0), 1.0 / n_);
    const cplx dz1 = z1 / (static_cast<double>(n_) * w(0));
    CMat J = CMat::Zero(n_, n_);
    J(0, 0) = dz1;
    for (int i = 1; i < n_; ++i) {
      J(i, 0) = dz1 * w(i);
      J(i, i) = z1;
    }
    return J;
  }

 private:
  void check(const CVec& v) const {
    if (v.size() != n_) throw DimensionError("blowup chart point has wrong dimension");
  }
  int n_;
};

struct RoundTrip {
  CVec chart_point;
  CVec back;
  int root_index = 0;  // back = e^{2πi k/n} z
  double error = 0.0;
};

inline RoundTrip blowup_roundtrip(const BlowupChart& chart, const CVec& z) {
  RoundTrip rt;
  rt.chart_point = chart.to_chart(z);
  rt.back = chart.from_chart(rt.chart_point);
  const int n = chart.order();
  rt.error = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const cplx root = std::polar(1.0, 2.0 * kPi * k / n);
    const double e = (rt.back - root * z).norm();
    if (e < rt.error) {
      rt.error = e;
      rt.root_index = k;
    }
  }
  return rt;
}

/// Coefficient c · w_1^{p/q} of π*(dz_1∧…∧dz_n) against dw_1∧…∧dw_n.
struct ChartVolumeCoefficient {
  double coefficient = 0.0;
  int exponent_num = 0;
  int exponent_den = 1;

  bool finite_at_divisor() const { return exponent_num >= 0; }
};

/// Chain rule: dz_1 = (1/n) w_1^{1/n−1} dw_1 and dz_i ≡ z_1 dw_i modulo dw_1,
/// so the wedge is (1/n) w_1^{1/n−1} · w_1^{(n−1)/n}: the exponents cancel.
inline ChartVolumeCoefficient volume_form_in_blowup_chart(int n) {
  if (n < 2) throw ConfigError("volume_form_in_blowup_chart needs n >= 2");
  int num = 1 - n;  // exponent of dz_1 coefficient, over n
  int den = n;
  num += n - 1;     // z_1^{n-1} = w_1^{(n-1)/n}
  const int g = std::gcd(std::abs(num), den);
  return {1.0 / n, g ? num / g : 0, g ? den / g : 1};
}

/// Numerical counterpart: det ∂z/∂w at a chart point.
inline cplx blowup_jacobian_det(const BlowupChart& chart, const CVec& w) {
  return chart.jacobian(w).determinant();
}

}  // namespace cyslag
