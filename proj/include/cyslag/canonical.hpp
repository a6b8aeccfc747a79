// Explicit Ricci-flat local models: the Eguchi-Hanson type potential on
// K_{CP^1} × E, the same metric written through its ∂∂̄U / ∂U∧∂̄U
// coefficients, and the Calabi ansatz on K_{CP^{n-1}}.
#pragma once

#include "cyslag/core.hpp"

namespace cyslag {

struct RadialSlopes {
  double d1 = 0.0;  // f'(U)
  double d2 = 0.0;  // f''(U)
};

struct RadialJet {
  double f = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Profile of a radial potential f(U), U = Σ|z_i|² over the radial block.
template <class P>
concept RadialProfile = requires(const P& p, double U) {
  { p.slopes(U) } -> std::same_as<RadialSlopes>;
  { p.admits(U) } -> std::convertible_to<bool>;
};

template <class P>
concept ValuedRadialProfile = RadialProfile<P> && requires(const P& p, double U) {
  { p.value(U) } -> std::convertible_to<double>;
};

/// f(U) = U.
struct FlatProfile {
  bool admits(double) const { return true; }
  double value(double U) const { return U; }
  RadialSlopes slopes(double) const { return {1.0, 0.0}; }
};

/// Value and first two derivatives of
///   f_a(U) = U √(1 + a²/U²) + a ln(U / (√(U²+a²) + a)).
inline RadialJet eh_value(double U, double a) {
  if (!(U > 0.0)) throw DomainError("eh_value: U must be positive");
  if (!(a > 0.0)) throw DomainError("eh_value: a must be positive");
  const double s = std::sqrt(U * U + a * a);
  const double d1 = s / U;
  return {s + a * std::log(U / (s + a)), d1, -a * a / (U * U * U * d1)};
}

/// f_a(U) − U without cancellation, for the small-a regime.
inline double eh_discrepancy(double U, double a) {
  if (!(U > 0.0)) throw DomainError("eh_discrepancy: U must be positive");
  if (a == 0.0) return 0.0;
  const double s = std::sqrt(U * U + a * a);
  const double root_gap = a * a / (s + U);  // s − U
  return root_gap - a * std::log1p((root_gap + a) / U);
}

struct EguchiHansonProfile {
  double a = 1.0;

  explicit EguchiHansonProfile(double resolution) : a(resolution) {
    if (!(a > 0.0)) throw DomainError("Eguchi-Hanson parameter must be positive");
  }
  bool admits(double U) const { return U > 0.0; }
  double value(double U) const { return eh_value(U, a).f; }
  RadialSlopes slopes(double U) const {
    const RadialJet j = eh_value(U, a);
    return {j.d1, j.d2};
  }
};

/// Coefficients of ∂∂̄U and ∂U∧∂̄U in
///   ω = (√−1 / (U²√(1+U²))) [ (1+U²) U ∂∂̄U − ∂U ∧ ∂̄U ].
inline std::pair<double, double> kcp1_omega_coefficients(double U) {
  if (!(U > 0.0)) throw DomainError("kcp1_omega_coefficients: U must be positive");
  const double pref = 1.0 / (U * U * std::sqrt(1.0 + U * U));
  return {pref * (1.0 + U * U) * U, -pref};
}

/// f'(U) = (1 + U^{-n})^{1/n}. The potential itself is never materialized.
struct CalabiProfile {
  int n = 2;

  explicit CalabiProfile(int order) : n(order) {
    if (n < 2) throw DomainError("Calabi ansatz needs n >= 2");
  }
  bool admits(double U) const { return U > 0.0; }
  RadialSlopes slopes(double U) const {
    const double un = std::pow(U, -n);
    const double base = 1.0 + un;
    return {std::pow(base, 1.0 / n), -un / U * std::pow(base, (1.0 - n) / n)};
  }
};

/// φ(z) = f(|z_1|² + … + |z_m|²) + |z_{m+1}|² + … + |z_{m+k}|².
template <RadialProfile Profile>
class RadialPotential {
 public:
  RadialPotential(Profile profile, int radial_dim, int flat_dim, std::string label)
      : profile_(std::move(profile)), m_(radial_dim),
        chart_(radial_dim + flat_dim, std::move(label)) {
    if (m_ < 1) throw ConfigError("radial block must have dimension >= 1");
    if (flat_dim < 0) throw ConfigError("flat block dimension must be >= 0");
  }

  const ComplexChart& chart() const { return chart_; }
  const Profile& profile() const { return profile_; }
  int radial_dim() const { return m_; }

  double radial_norm(const CVec& z) const { return z.head(m_).squaredNorm(); }

  bool admissible(const CVec& z) const {
    return z.size() == chart_.dim && profile_.admits(radial_norm(z));
  }

  double value(const CVec& z) const
    requires ValuedRadialProfile<Profile>
  {
    return profile_.value(radial_norm(z)) + z.tail(chart_.dim - m_).squaredNorm();
  }

  CVec gradient(const CVec& z) const {
    CVec g = z.conjugate();
    g.head(m_) *= profile_.slopes(radial_norm(z)).d1;
    return g;
  }

  /// f' δ_ij + f'' z̄_i z_j on the radial block, identity on the flat block.
  CMat hessian(const CVec& z) const {
    const RadialSlopes s = profile_.slopes(radial_norm(z));
    CMat g = CMat::Identity(chart_.dim, chart_.dim);
    const CVec zr = z.head(m_);
    g.topLeftCorner(m_, m_) =
        s.d1 * CMat::Identity(m_, m_) + s.d2 * (zr.conjugate() * zr.transpose());
    return g;
  }

 private:
  Profile profile_;
  int m_;
  ComplexChart chart_;
};

inline RadialPotential<EguchiHansonProfile> eguchi_hanson_potential(double a, bool with_curve) {
  return {EguchiHansonProfile(a), 2, with_curve ? 1 : 0, with_curve ? "K_CP1 x E" : "K_CP1"};
}

inline RadialPotential<CalabiProfile> calabi_metric(int n) {
  return {CalabiProfile(n), n, 0, "K_CP" + std::to_string(n - 1)};
}

/// det(f' δ_ij + f'' z̄_i z_j) for the Calabi ansatz; identically 1.
inline double calabi_det_check(int n, const CVec& z) {
  if (z.size() != n) throw DimensionError("calabi_det_check: point dimension must equal n");
  if (z.squaredNorm() == 0.0) throw DomainError("calabi_det_check: z = 0 is excluded");
  return metric_from_potential(calabi_metric(n), z).entries.determinant().real();
}

}  // namespace cyslag
