// Chart-level complex geometry: Kähler potentials, metrics, Ricci forms and
// pullbacks of the Kähler form and of holomorphic volume forms along
// parametrized immersions.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cyslag {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DegeneracyError : public Error {
 public:
  DegeneracyError(const std::string& what, CVec point)
      : Error(what), point_(std::move(point)) {}
  const CVec& point() const { return point_; }

 private:
  CVec point_;
};

class ImmersionError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

inline std::string format_point(const CVec& z) {
  std::ostringstream os;
  os.precision(6);
  os << '(';
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (i) os << ", ";
    os << z(i).real() << (z(i).imag() < 0 ? "-" : "+") << std::abs(z(i).imag()) << 'i';
  }
  os << ')';
  return os.str();
}

/// `count` evenly spaced values from lo to hi inclusive.
inline std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i)
    out[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  return out;
}

/// Angle reduced to [0, 2π).
inline double wrap_angle(double theta) {
  double t = std::fmod(theta, 2.0 * kPi);
  if (t < 0) t += 2.0 * kPi;
  if (t >= 2.0 * kPi) t = 0.0;
  return t;
}

// ---------------------------------------------------------------------------
// Charts, metrics, potentials

struct ComplexChart {
  int dim = 1;
  std::string label;

  ComplexChart() = default;
  ComplexChart(int n, std::string name) : dim(n), label(std::move(name)) {
    if (dim < 1) throw ConfigError("complex chart dimension must be >= 1");
  }
};

/// Anything that produces a Kähler metric g_{i j̄} = ∂²φ/∂z_i∂z̄_j on a chart.
template <class S>
concept MetricSource = requires(const S& s, const CVec& z) {
  { s.chart() } -> std::convertible_to<ComplexChart>;
  { s.admissible(z) } -> std::convertible_to<bool>;
  { s.hessian(z) } -> std::convertible_to<CMat>;
};

/// A metric source that also materializes the potential and its (1,0) gradient.
template <class P>
concept KahlerPotential = MetricSource<P> && requires(const P& p, const CVec& z) {
  { p.value(z) } -> std::convertible_to<double>;
  { p.gradient(z) } -> std::convertible_to<CVec>;
};

struct HermitianMetric {
  CMat entries;
  CVec point;

  double hermitian_defect() const { return (entries - entries.adjoint()).cwiseAbs().maxCoeff(); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<CMat> es(entries, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  bool is_positive_definite() const {
    Eigen::LLT<CMat> llt(entries);
    return llt.info() == Eigen::Success;
  }
};

template <MetricSource S>
HermitianMetric metric_from_potential(const S& src, const CVec& z) {
  if (z.size() != src.chart().dim)
    throw DimensionError("point has dimension " + std::to_string(z.size()) + ", chart has " +
                         std::to_string(src.chart().dim));
  if (!src.admissible(z))
    throw DomainError("point " + format_point(z) + " outside the admissible domain of chart '" +
                      src.chart().label + "'");
  return HermitianMetric{src.hessian(z), z};
}

/// ∂²F/∂z_i∂z̄_j of a real function F by central differences in the 2n real
/// coordinates (x_1..x_n, y_1..y_n).
template <class F>
CMat fd_complex_hessian(const F& func, const CVec& z, double h) {
  const Eigen::Index n = z.size();
  const Eigen::Index m = 2 * n;
  auto shifted = [&](Eigen::Index a, double da, Eigen::Index b, double db) {
    CVec w = z;
    auto bump = [&](Eigen::Index c, double d) {
      if (d == 0.0) return;
      if (c < n)
        w(c) += cplx(d, 0.0);
      else
        w(c - n) += cplx(0.0, d);
    };
    bump(a, da);
    bump(b, db);
    return static_cast<double>(func(w));
  };
  const double f0 = static_cast<double>(func(z));
  RMat H(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    H(a, a) = (shifted(a, h, a, 0.0) - 2.0 * f0 + shifted(a, -h, a, 0.0)) / (h * h);
    for (Eigen::Index b = a + 1; b < m; ++b) {
      const double v = (shifted(a, h, b, h) - shifted(a, h, b, -h) - shifted(a, -h, b, h) +
                        shifted(a, -h, b, -h)) /
                       (4.0 * h * h);
      H(a, b) = v;
      H(b, a) = v;
    }
  }
  CMat g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      g(i, j) = 0.25 * cplx(H(i, j) + H(n + i, n + j), H(i, n + j) - H(n + i, j));
  return g;
}

/// Default finite-difference step, scaled by max(1, |z|_∞).
inline constexpr double kDefaultFdStep = 1e-4;

inline double scaled_step(const CVec& z, double h) {
  return h * std::max(1.0, z.cwiseAbs().maxCoeff());
}

/// Ricci form matrix -∂∂̄ log det g by central differences of log det of the
/// metric. Shrinks the step up to three times when the stencil leaves the
/// admissible domain.
template <MetricSource S>
CMat ricci_form(const S& src, const CVec& z, double h = kDefaultFdStep) {
  if (!src.admissible(z))
    throw DomainError("ricci_form: point " + format_point(z) + " not admissible");
  auto log_det = [&](const CVec& w) {
    if (!src.admissible(w)) throw DomainError("stencil point " + format_point(w) + " not admissible");
    const CMat g = src.hessian(w);
    Eigen::LLT<CMat> llt(g);
    if (llt.info() != Eigen::Success)
      throw DegeneracyError("metric not positive definite at " + format_point(w), w);
    const CMat& L = llt.matrixL();
    double s = 0.0;
    for (Eigen::Index i = 0; i < L.rows(); ++i) s += 2.0 * std::log(L(i, i).real());
    return s;
  };
  double step = scaled_step(z, h);
  for (int attempt = 0;; ++attempt) {
    try {
      return -fd_complex_hessian(log_det, z, step);
    } catch (const DomainError&) {
      if (attempt == 3) throw;
      step *= 0.5;
    }
  }
}

// ---------------------------------------------------------------------------
// Immersions and volume forms

struct ImmersionJet {
  CVec z;
  CMat jacobian;  // n × k, column a is ∂z/∂t_a
};

class ParamImmersion {
 public:
  using MapFn = std::function<ImmersionJet(const RVec&)>;

  ParamImmersion(int domain_dim, ComplexChart target, MapFn map, RVec lo, RVec hi,
                 std::vector<int> grid)
      : k_(domain_dim), target_(std::move(target)), map_(std::move(map)), lo_(std::move(lo)),
        hi_(std::move(hi)), grid_(std::move(grid)) {
    if (k_ < 1) throw ConfigError("immersion domain dimension must be >= 1");
    if (lo_.size() != k_ || hi_.size() != k_ || static_cast<int>(grid_.size()) != k_)
      throw DimensionError("immersion box/grid size does not match domain dimension");
    for (int a = 0; a < k_; ++a) {
      if (!(hi_(a) > lo_(a))) throw ConfigError("immersion box must have hi > lo");
      if (grid_[a] < 1) throw ConfigError("immersion sample grid must be non-empty");
    }
  }

  int domain_dim() const { return k_; }
  const ComplexChart& target() const { return target_; }
  const RVec& lo() const { return lo_; }
  const RVec& hi() const { return hi_; }
  const std::vector<int>& grid() const { return grid_; }

  ImmersionJet operator()(const RVec& t) const { return map_(t); }

  RVec centroid() const { return 0.5 * (lo_ + hi_); }

  /// Cell-centred tensor grid over the parameter box.
  std::vector<RVec> sample_points() const {
    std::vector<RVec> pts;
    std::vector<int> idx(k_, 0);
    for (;;) {
      RVec t(k_);
      for (int a = 0; a < k_; ++a)
        t(a) = lo_(a) + (hi_(a) - lo_(a)) * (idx[a] + 0.5) / grid_[a];
      pts.push_back(std::move(t));
      int a = 0;
      while (a < k_ && ++idx[a] == grid_[a]) idx[a++] = 0;
      if (a == k_) break;
    }
    return pts;
  }

  /// Same immersion precomposed with the affine map t ↦ S t + shift; the box
  /// and grid are carried over unchanged.
  ParamImmersion reparametrized(const RMat& S, const RVec& shift) const {
    auto inner = map_;
    MapFn m = [inner, S, shift](const RVec& t) {
      ImmersionJet j = inner(S * t + shift);
      j.jacobian = j.jacobian * S.cast<cplx>();
      return j;
    };
    return ParamImmersion(k_, target_, std::move(m), lo_, hi_, grid_);
  }

 private:
  int k_;
  ComplexChart target_;
  MapFn map_;
  RVec lo_, hi_;
  std::vector<int> grid_;
};

struct HolomorphicVolumeForm {
  ComplexChart chart;
  std::function<cplx(const CVec&)> coefficient;

  /// dz_1 ∧ … ∧ dz_n.
  static HolomorphicVolumeForm standard(int n, std::string label = "C^n") {
    return {ComplexChart(n, std::move(label)), [](const CVec&) { return cplx(1.0, 0.0); }};
  }
};

/// Smallest singular value of the real 2n × k Jacobian relative to the largest.
inline double relative_rank_margin(const CMat& J) {
  RMat R(2 * J.rows(), J.cols());
  R << J.real(), J.imag();
  Eigen::JacobiSVD<RMat> svd(R);
  const RVec s = svd.singularValues();
  if (s(0) == 0.0) return 0.0;
  return s(s.size() - 1) / s(0);
}

inline constexpr double kRankThreshold = 1e-10;

inline void require_full_rank(const ImmersionJet& jet) {
  if (relative_rank_margin(jet.jacobian) < kRankThreshold)
    throw ImmersionError("immersion Jacobian rank-deficient at " + format_point(jet.z));
}

/// ι*ω for ω = (√−1/2) Σ g_{i j̄} dz_i ∧ dz̄_j, as the antisymmetric matrix
/// ω(∂_a, ∂_b). For the flat metric this is Σ dx_i ∧ dy_i.
inline RMat two_form_matrix(const CMat& g, const CMat& J) {
  const CMat M = J.transpose() * g * J.conjugate();
  return -M.imag();
}

/// Induced Riemannian metric Re(Jᵀ g J̄).
inline RMat induced_metric_matrix(const CMat& g, const CMat& J) {
  const CMat M = J.transpose() * g * J.conjugate();
  RMat G = M.real();
  return 0.5 * (G + G.transpose());
}

template <MetricSource S>
RMat pullback_two_form(const S& src, const ParamImmersion& imm, const RVec& t) {
  const ImmersionJet jet = imm(t);
  require_full_rank(jet);
  const HermitianMetric g = metric_from_potential(src, jet.z);
  return two_form_matrix(g.entries, jet.jacobian);
}

template <MetricSource S>
RMat induced_metric(const S& src, const ParamImmersion& imm, const RVec& t) {
  const ImmersionJet jet = imm(t);
  require_full_rank(jet);
  return induced_metric_matrix(metric_from_potential(src, jet.z).entries, jet.jacobian);
}

inline cplx pullback_volume_form(const HolomorphicVolumeForm& omega, const ParamImmersion& imm,
                                 const RVec& t) {
  if (imm.domain_dim() != omega.chart.dim)
    throw DimensionError("volume form pullback needs domain dimension " +
                         std::to_string(omega.chart.dim) + ", got " +
                         std::to_string(imm.domain_dim()));
  const ImmersionJet jet = imm(t);
  return omega.coefficient(jet.z) * jet.jacobian.determinant();
}

// ---------------------------------------------------------------------------
// Calibration defect

/// Phase θ for special Lagrangian tests; an empty value means "fit".
using PhaseChoice = std::optional<double>;

struct DefectReport {
  double omega_sup = 0.0;
  double omega_mean = 0.0;
  double phase_sup = 0.0;
  double phase_mean = 0.0;
  double theta = 0.0;
  std::size_t samples = 0;
};

/// Norm of an antisymmetric two-form matrix measured in an orthonormal frame
/// of the induced metric G.
inline double frame_norm(const RMat& omega, const RMat& G) {
  Eigen::LLT<RMat> llt(G);
  if (llt.info() != Eigen::Success) throw ImmersionError("induced metric not positive definite");
  const RMat Linv = llt.matrixL().solve(RMat::Identity(G.rows(), G.cols()));
  return (Linv * omega * Linv.transpose()).norm();
}

template <MetricSource S>
DefectReport slag_defect(const S& src, const HolomorphicVolumeForm& omega,
                         const ParamImmersion& imm, PhaseChoice theta = std::nullopt) {
  const auto pts = imm.sample_points();
  if (pts.empty()) throw ConfigError("slag_defect: empty sample grid");
  DefectReport rep;
  if (theta) {
    rep.theta = wrap_angle(*theta);
  } else {
    const cplx p0 = pullback_volume_form(omega, imm, imm.centroid());
    if (std::abs(p0) == 0.0)
      throw DegeneracyError("volume form pullback vanishes at the grid centroid",
                            imm(imm.centroid()).z);
    rep.theta = wrap_angle(-std::arg(p0));
  }
  const cplx rot = std::polar(1.0, rep.theta);
  for (const RVec& t : pts) {
    const ImmersionJet jet = imm(t);
    require_full_rank(jet);
    const CMat g = metric_from_potential(src, jet.z).entries;
    const RMat G = induced_metric_matrix(g, jet.jacobian);
    const double w = frame_norm(two_form_matrix(g, jet.jacobian), G);
    const cplx p = omega.coefficient(jet.z) * jet.jacobian.determinant();
    const double vol = std::sqrt(G.determinant());
    const double ph = std::abs((rot * p).imag()) / vol;
    rep.omega_sup = std::max(rep.omega_sup, w);
    rep.omega_mean += w;
    rep.phase_sup = std::max(rep.phase_sup, ph);
    rep.phase_mean += ph;
  }
  rep.samples = pts.size();
  rep.omega_mean /= static_cast<double>(pts.size());
  rep.phase_mean /= static_cast<double>(pts.size());
  return rep;
}

// ---------------------------------------------------------------------------
// A few basic potentials

/// φ = Σ |z_i|².
class FlatPotential {
 public:
  explicit FlatPotential(int n, std::string label = "C^n") : chart_(n, std::move(label)) {}
  const ComplexChart& chart() const { return chart_; }
  bool admissible(const CVec&) const { return true; }
  double value(const CVec& z) const { return z.squaredNorm(); }
  CVec gradient(const CVec& z) const { return z.conjugate(); }
  CMat hessian(const CVec&) const { return CMat::Identity(chart_.dim, chart_.dim); }

 private:
  ComplexChart chart_;
};

/// Adapter that replaces the exact Hessian of a potential by its finite
/// difference cross-check.
template <KahlerPotential P>
class FiniteDifferenceMetric {
 public:
  FiniteDifferenceMetric(P potential, double h) : p_(std::move(potential)), h_(h) {}
  ComplexChart chart() const { return p_.chart(); }
  bool admissible(const CVec& z) const { return p_.admissible(z); }
  double value(const CVec& z) const { return p_.value(z); }
  CVec gradient(const CVec& z) const { return p_.gradient(z); }
  CMat hessian(const CVec& z) const {
    return fd_complex_hessian([this](const CVec& w) { return p_.value(w); }, z, scaled_step(z, h_));
  }

 private:
  P p_;
  double h_;
};

}  // namespace cyslag
