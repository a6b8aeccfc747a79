// Linear special Lagrangian families in C^2 and C^n, their traces on the
// exceptional divisor of the blowup, and the algebra of their phases.
#pragma once

#include "cyslag/canonical.hpp"
#include "cyslag/core.hpp"

#include <bit>
#include <random>

namespace cyslag {

class SizeError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// The L_bc family in C^2:  u_1 + i u_2 = (b + i c)(v_2 + i v_1)

/// (v_1, v_2) ↦ ((b v_2 − c v_1) + i v_1, (c v_2 + b v_1) + i v_2).
inline ParamImmersion lbc_immersion(double b, double c, double lo = 0.2, double hi = 1.2,
                                    int grid = 5) {
  CMat J(2, 2);
  J << cplx(-c, 1.0), cplx(b, 0.0), cplx(b, 0.0), cplx(c, 1.0);
  auto map = [J](const RVec& v) {
    ImmersionJet jet{J * v.cast<cplx>(), J};
    return jet;
  };
  return ParamImmersion(2, ComplexChart(2, "C2"), map, RVec::Constant(2, lo), RVec::Constant(2, hi),
                        {grid, grid});
}

/// Point of the plane in direction (v_1, v_2) = (cos φ, sin φ).
inline CVec lbc_point(double b, double c, double phi) {
  const double v1 = std::cos(phi), v2 = std::sin(phi);
  CVec z(2);
  z << cplx(b * v2 - c * v1, v1), cplx(c * v2 + b * v1, v2);
  return z;
}

/// A |q|² + B_1 q_1 + B_2 q_2 + C = 0 in the affine chart q = z_2 / z_1 of CP^1.
struct CircleEquation {
  double A = 0.0, B1 = 0.0, B2 = 0.0, C = 0.0;

  double residual(cplx q) const {
    return A * std::norm(q) + B1 * q.real() + B2 * q.imag() + C;
  }

  /// The same curve on the unit sphere S² ≅ CP^1 is the plane n·x = h.
  std::pair<Eigen::Vector3d, double> sphere_plane() const {
    const Eigen::Vector3d n(B1, B2, A - C);
    return {n, -(A + C)};
  }
};

/// Divisor equation of L_bc obtained from the ratio q = z_2/z_1 along the plane:
///   b(q_1² + q_2²) − 2c q_1 + (b² + c² − 1) q_2 − b = 0.
inline CircleEquation lbc_divisor_equation(double b, double c) {
  return {b, -2.0 * c, b * b + c * c - 1.0, -b};
}

/// The divisor equation with q_1 coefficient −2b in place of −2c.
/// It agrees with lbc_divisor_equation only when b = c.
inline CircleEquation printed_divisor_equation(double b, double c) {
  return {b, -2.0 * b, b * b + c * c - 1.0, -b};
}

/// Cosine of arg p along L_bc given its divisor point q; bounded by 1 in size.
inline double lbc_ray_cosine(double b, double c, cplx q) {
  const double x = b * q.real() - c, y = b * q.imag() - 1.0;
  return (x * x - y * y) / (x * x + y * y);
}

struct CurveInCP {
  enum class Kind { circle, line };
  Kind kind = Kind::circle;
  CircleEquation equation;
  cplx center{0.0, 0.0};
  double radius = 0.0;
  // For lines: B_1 q_1 + B_2 q_2 + C = 0 is the curve itself.

  double residual(cplx q) const { return equation.residual(q); }

  /// Points on the curve (a segment of length 2·extent for lines).
  std::vector<cplx> sample(int count, double extent = 10.0) const {
    std::vector<cplx> pts;
    pts.reserve(count);
    if (kind == Kind::circle) {
      for (int i = 0; i < count; ++i)
        pts.push_back(center + std::polar(radius, 2.0 * kPi * i / count));
    } else {
      const cplx normal(equation.B1, equation.B2);
      const cplx foot = -equation.C * normal / std::norm(normal);
      const cplx dir = kI * normal / std::abs(normal);
      for (int i = 0; i < count; ++i)
        pts.push_back(foot + dir * (extent * (2.0 * i / std::max(1, count - 1) - 1.0)));
    }
    return pts;
  }
};

inline CurveInCP curve_from_equation(const CircleEquation& eq) {
  CurveInCP c;
  c.equation = eq;
  if (eq.A == 0.0) {
    c.kind = CurveInCP::Kind::line;
    if (eq.B1 == 0.0 && eq.B2 == 0.0) throw DomainError("divisor equation is degenerate");
    return c;
  }
  c.center = cplx(-eq.B1 / (2.0 * eq.A), -eq.B2 / (2.0 * eq.A));
  const double r2 = std::norm(c.center) - eq.C / eq.A;
  if (!(r2 >= 0.0)) throw DomainError("divisor equation has no real points");
  c.radius = std::sqrt(r2);
  return c;
}

inline CurveInCP lbc_cp1_circle(double b, double c) {
  return curve_from_equation(lbc_divisor_equation(b, c));
}

/// Unit-sphere image of the point [z_1 : z_2] ∈ CP^1 (q = z_2/z_1).
inline Eigen::Vector3d cp1_to_sphere(cplx z1, cplx z2) {
  const double n = std::norm(z1) + std::norm(z2);
  const cplx m = std::conj(z1) * z2;
  return Eigen::Vector3d(2.0 * m.real(), 2.0 * m.imag(), std::norm(z2) - std::norm(z1)) / n;
}

inline Eigen::Vector3d q_to_sphere(cplx q) { return cp1_to_sphere(cplx(1.0), q); }

/// Inverse of q_to_sphere away from the point at infinity (0, 0, 1).
inline cplx sphere_to_q(const Eigen::Vector3d& x) { return cplx(x(0), x(1)) / (1.0 - x(2)); }

/// Angular distance on the unit sphere from x to the circle of an equation.
inline double sphere_distance(const CircleEquation& eq, const Eigen::Vector3d& x) {
  auto [n, h] = eq.sphere_plane();
  const double len = n.norm();
  const double cx = std::clamp(n.dot(x) / len, -1.0, 1.0);
  const double ch = std::clamp(h / len, -1.0, 1.0);
  return std::abs(std::acos(cx) - std::acos(ch));
}

struct TopologyProbe {
  int divisor_circles = 0;
  bool connected_trace = false;
  bool degenerate_line = false;
  bool inconclusive = false;
  int chart_components = 0;
  double max_gap = 0.0;
  double fit_residual = 0.0;
};

/// Sampling certificate for the divisor trace of L_bc: the directions of the
/// plane form one closed loop on CP^1 lying on a single circle, and the part
/// with |q| ≤ R is connected.
inline TopologyProbe lbc_topology_probe(double b, double c, double R, int samples = 720,
                                        double max_gap = 0.1) {
  if (!(R > 0.0)) throw ConfigError("topology probe radius must be positive");
  TopologyProbe tp;
  std::vector<Eigen::Vector3d> pts;
  std::vector<bool> in_chart;
  for (int i = 0; i < samples; ++i) {
    const CVec z = lbc_point(b, c, kPi * i / samples);  // q(φ + π) = q(φ)
    pts.push_back(cp1_to_sphere(z(0), z(1)));
    in_chart.push_back(std::abs(z(0)) > 0.0 && std::abs(z(1) / z(0)) <= R);
  }
  for (int i = 0; i < samples; ++i)
    tp.max_gap = std::max(tp.max_gap, (pts[(i + 1) % samples] - pts[i]).norm());
  if (tp.max_gap > max_gap) {
    tp.inconclusive = true;
    return tp;
  }
  // Plane fit through the sampled loop.
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= samples;
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  const Eigen::Vector3d normal = es.eigenvectors().col(0);
  for (const auto& p : pts) tp.fit_residual = std::max(tp.fit_residual, std::abs(normal.dot(p - mean)));
  tp.divisor_circles = tp.fit_residual < 1e-9 ? 1 : 0;
  tp.degenerate_line = std::abs(normal.dot(Eigen::Vector3d(0, 0, 1) - mean)) < 1e-9;
  for (int i = 0; i < samples; ++i)
    if (in_chart[i] && !in_chart[(i + samples - 1) % samples]) ++tp.chart_components;
  if (tp.chart_components == 0 && in_chart[0]) tp.chart_components = 1;
  tp.connected_trace = tp.chart_components == 1;
  return tp;
}

struct CoverageReport {
  double max_distance = 0.0;
  double mean_distance = 0.0;
  std::size_t samples = 0;
  std::size_t b_points = 0;
  // Non-fibration witness: two parameters whose divisor circles share points.
  double witness_b1 = 0.0, witness_b2 = 0.0;
  std::vector<cplx> witness_points;
  double witness_residual = 0.0;
  bool witness_circles_coincide = false;
  // q = 0 lies only on the b = 0 member.
  std::vector<double> origin_cover_b;
};

inline Eigen::Vector3d random_sphere_point(std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::Vector3d x(nd(rng), nd(rng), nd(rng));
  return x.normalized();
}

/// Distance of sampled points of CP^1 to the nearest divisor circle of the
/// c = 0 family, plus the intersecting-circles witness.
inline CoverageReport theorem4_coverage(const std::vector<double>& b_grid, int samples,
                                        std::uint64_t seed, double witness_b1 = 1.0,
                                        double witness_b2 = -1.0) {
  if (b_grid.empty() || samples < 1) throw ConfigError("coverage needs a non-empty grid");
  CoverageReport rep;
  rep.samples = samples;
  rep.b_points = b_grid.size();
  std::vector<CircleEquation> eqs;
  for (double b : b_grid) eqs.push_back(lbc_divisor_equation(b, 0.0));
  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Eigen::Vector3d x = random_sphere_point(rng);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& eq : eqs) best = std::min(best, sphere_distance(eq, x));
    rep.max_distance = std::max(rep.max_distance, best);
    rep.mean_distance += best;
  }
  rep.mean_distance /= samples;

  rep.witness_b1 = witness_b1;
  rep.witness_b2 = witness_b2;
  const CircleEquation e1 = lbc_divisor_equation(witness_b1, 0.0);
  const CircleEquation e2 = lbc_divisor_equation(witness_b2, 0.0);
  auto [n1, h1] = e1.sphere_plane();
  auto [n2, h2] = e2.sphere_plane();
  const Eigen::Vector3d cross = n1.cross(n2);
  std::vector<Eigen::Vector3d> common;
  if (cross.norm() < 1e-12 * n1.norm() * n2.norm()) {
    rep.witness_circles_coincide = std::abs(h1 / n1.norm() - h2 / n2.norm()) < 1e-12;
    if (rep.witness_circles_coincide) {
      // any point of the shared circle
      const Eigen::Vector3d u = n1.unitOrthogonal();
      common = {u, -u};
    }
  } else if (std::abs(h1) < 1e-14 && std::abs(h2) < 1e-14) {
    common = {cross.normalized(), -cross.normalized()};
  } else {
    // General position: intersect the two planes, then the sphere.
    const Eigen::Vector3d d = cross.normalized();
    Eigen::Matrix<double, 2, 3> M;
    M.row(0) = n1.transpose();
    M.row(1) = n2.transpose();
    const Eigen::Vector3d p0 = M.completeOrthogonalDecomposition().solve(Eigen::Vector2d(h1, h2));
    const double disc = 1.0 - p0.squaredNorm() + std::pow(p0.dot(d), 2);
    if (disc >= 0.0) {
      const double t = std::sqrt(disc);
      common = {p0 + (-p0.dot(d) + t) * d, p0 + (-p0.dot(d) - t) * d};
    }
  }
  for (const auto& x : common) {
    if (std::abs(1.0 - x(2)) < 1e-9) continue;  // point at infinity
    const cplx q = sphere_to_q(x);
    rep.witness_points.push_back(q);
    rep.witness_residual =
        std::max({rep.witness_residual, std::abs(e1.residual(q)), std::abs(e2.residual(q))});
  }
  for (double b : b_grid)
    if (std::abs(lbc_divisor_equation(b, 0.0).residual(cplx(0.0))) < 1e-14)
      rep.origin_cover_b.push_back(b);
  return rep;
}

// ---------------------------------------------------------------------------
// The L_A family in C^n:  x = A y

/// y ↦ A y + i y.
inline ParamImmersion la_immersion(const RMat& A, double lo = -1.0, double hi = 1.0, int grid = 3) {
  if (A.rows() != A.cols()) throw DimensionError("la_immersion: A must be square");
  const int n = static_cast<int>(A.rows());
  const CMat J = A.cast<cplx>() + kI * CMat::Identity(n, n);
  auto map = [J](const RVec& y) { return ImmersionJet{J * y.cast<cplx>(), J}; };
  return ParamImmersion(n, ComplexChart(n, "C^n"), map, RVec::Constant(n, lo), RVec::Constant(n, hi),
                        std::vector<int>(n, grid));
}

struct SymmetryTest {
  double omega_defect = 0.0;  // sup of the largest |entry| of the flat ι*ω
  bool is_lagrangian = false;
};

inline constexpr double kLagrangianThreshold = 1e-10;

inline SymmetryTest la_symmetry_test(const RMat& A, int grid = 3) {
  const ParamImmersion imm = la_immersion(A, -1.0, 1.0, grid);
  const FlatPotential flat(static_cast<int>(A.rows()));
  SymmetryTest out;
  for (const RVec& t : imm.sample_points())
    out.omega_defect =
        std::max(out.omega_defect, pullback_two_form(flat, imm, t).cwiseAbs().maxCoeff());
  out.is_lagrangian = out.omega_defect < kLagrangianThreshold;
  return out;
}

struct MinorSums {
  double even_sum = 0.0;      // Σ_{k even} i^k Σ_{|S|=k} det A_S
  double odd_sum = 0.0;       // (1/i) Σ_{k odd} i^k Σ_{|S|=k} det A_S
  cplx determinant;           // det(I + iA)
  double theta = 0.0;         // Im(e^{iθ} det(I + iA)) = 0
  double raw_even = 0.0;      // Σ_{k even} Σ det A_S (no powers of i)
  double raw_odd = 0.0;       // Σ_{k odd} Σ det A_S
};

inline constexpr int kMaxMinorOrder = 12;

inline double principal_minor(const RMat& A, unsigned mask) {
  std::vector<int> idx;
  for (int i = 0; i < A.rows(); ++i)
    if (mask & (1u << i)) idx.push_back(i);
  if (idx.empty()) return 1.0;
  RMat sub(idx.size(), idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = 0; c < idx.size(); ++c) sub(r, c) = A(idx[r], idx[c]);
  return sub.determinant();
}

inline MinorSums minor_sum_identity(const RMat& A) {
  if (A.rows() != A.cols()) throw DimensionError("minor_sum_identity: A must be square");
  const int n = static_cast<int>(A.rows());
  if (n > kMaxMinorOrder) throw SizeError("minor_sum_identity: n > 12 needs more than 2^12 minors");
  MinorSums out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    const int k = std::popcount(mask);
    const double m = principal_minor(A, mask);
    const double sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;  // i^k = ±1 or ±i
    if (k % 2 == 0) {
      out.even_sum += sign * m;
      out.raw_even += m;
    } else {
      out.odd_sum += sign * m;
      out.raw_odd += m;
    }
  }
  out.determinant = (RMat::Identity(n, n).cast<cplx>() + kI * A.cast<cplx>()).determinant();
  out.theta = wrap_angle(-std::arg(cplx(out.even_sum, out.odd_sum)));
  return out;
}

/// sin θ · Σ_even det A_S + cos θ · Σ_odd det A_S, the unweighted form of the
/// phase condition; reported alongside la_special_condition.
inline double displayed_phase_expression(const RMat& A, double theta) {
  const MinorSums m = minor_sum_identity(A);
  return std::sin(theta) * m.raw_even + std::cos(theta) * m.raw_odd;
}

inline bool is_symmetric(const RMat& A, double tol = 1e-12) {
  return A.rows() == A.cols() && (A - A.transpose()).cwiseAbs().maxCoeff() <= tol;
}

/// Im(e^{iθ} det(I + iA)) for symmetric A.
inline double la_special_condition(const RMat& A, double theta) {
  if (!is_symmetric(A)) throw PreconditionError("la_special_condition: A must be symmetric");
  const int n = static_cast<int>(A.rows());
  const cplx d = (CMat::Identity(n, n) + kI * A.cast<cplx>()).determinant();
  return (std::polar(1.0, theta) * d).imag();
}

/// The holomorphic volume form on x = A y pulls back to det(A + iI) dy, which
/// equals iⁿ · conj(det(I + iA)) for real A. Returns the phase for that
/// parametrization matching a phase θ of det(I + iA).
inline double la_pullback_phase(int n, double theta) { return wrap_angle(-theta - n * kPi / 2.0); }

// Blowup chart z_1 = x_1 + i y_1, w_i = z_i / z_1 = u_i + i v_i (i ≥ 2).

struct LaChartPoint {
  cplx z1;
  CVec w;  // w_2 … w_n
};

inline LaChartPoint la_chart_point(const CVec& z) {
  if (z(0) == cplx(0.0)) throw DomainError("chart point needs z_1 != 0");
  LaChartPoint p{z(0), CVec(z.size() - 1)};
  for (Eigen::Index i = 1; i < z.size(); ++i) p.w(i - 1) = z(i) / z(0);
  return p;
}

struct LaBlowupResidual {
  std::vector<double> equations;  // (5) then (6_i), i = 2..n
  std::vector<double> divisor;    // P_1 Q_i − Q_1 P_i, i = 2..n
  bool singular = false;          // (P_1, Q_1) = (0, 0)
};

/// Coefficients of P_k x_1 = Q_k y_1 at chart coordinates w.
inline std::pair<RVec, RVec> la_line_coefficients(const RMat& A, const CVec& w) {
  const int n = static_cast<int>(A.rows());
  if (w.size() != n - 1) throw DimensionError("la_blowup_equations: w must have n-1 entries");
  RVec P(n), Q(n);
  for (int k = 0; k < n; ++k) {
    double sv = 0.0, su = 0.0;
    for (int j = 1; j < n; ++j) {
      sv += A(k, j) * w(j - 1).imag();
      su += A(k, j) * w(j - 1).real();
    }
    if (k == 0) {
      P(k) = 1.0 - sv;
      Q(k) = A(0, 0) + su;
    } else {
      P(k) = w(k - 1).real() - sv;
      Q(k) = A(k, 0) + w(k - 1).imag() + su;
    }
  }
  return {P, Q};
}

inline RVec la_divisor_equations(const RMat& A, const CVec& w) {
  auto [P, Q] = la_line_coefficients(A, w);
  RVec D(P.size() - 1);
  for (Eigen::Index i = 1; i < P.size(); ++i) D(i - 1) = P(0) * Q(i) - Q(0) * P(i);
  return D;
}

inline LaBlowupResidual la_blowup_equations(const RMat& A, const LaChartPoint& pt) {
  auto [P, Q] = la_line_coefficients(A, pt.w);
  LaBlowupResidual r;
  const double x1 = pt.z1.real(), y1 = pt.z1.imag();
  for (Eigen::Index k = 0; k < P.size(); ++k) r.equations.push_back(P(k) * x1 - Q(k) * y1);
  const RVec D = la_divisor_equations(A, pt.w);
  r.divisor.assign(D.data(), D.data() + D.size());
  r.singular = std::abs(P(0)) < 1e-12 && std::abs(Q(0)) < 1e-12;
  return r;
}

/// Jacobian of the divisor equations in (u_2, v_2, …, u_n, v_n).
inline RMat la_divisor_jacobian(const RMat& A, const CVec& w, double h = 1e-6) {
  const Eigen::Index m = w.size();
  RMat J(m, 2 * m);
  for (Eigen::Index c = 0; c < 2 * m; ++c) {
    CVec wp = w, wm = w;
    const cplx d = (c % 2 == 0) ? cplx(h, 0.0) : cplx(0.0, h);
    wp(c / 2) += d;
    wm(c / 2) -= d;
    J.col(c) = (la_divisor_equations(A, wp) - la_divisor_equations(A, wm)) / (2.0 * h);
  }
  return J;
}

struct SmoothnessProbe {
  double min_singular_value = std::numeric_limits<double>::infinity();
  double max_residual = 0.0;
  std::vector<std::size_t> non_smooth_samples;
  bool smooth = true;
};

/// Smallest singular value of the row-normalized divisor Jacobian over samples.
inline SmoothnessProbe la_smoothness_probe(const RMat& A, const std::vector<CVec>& samples,
                                           double threshold = 1e-3) {
  SmoothnessProbe p;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    RMat J = la_divisor_jacobian(A, samples[s]);
    double sv = 0.0;
    bool ok = true;
    for (Eigen::Index r = 0; r < J.rows(); ++r) {
      const double len = J.row(r).norm();
      if (len == 0.0) ok = false;
      else J.row(r) /= len;
    }
    if (ok) {
      Eigen::JacobiSVD<RMat> svd(J);
      sv = svd.singularValues().minCoeff();
    }
    p.min_singular_value = std::min(p.min_singular_value, sv);
    p.max_residual = std::max(p.max_residual, la_divisor_equations(A, samples[s]).cwiseAbs().maxCoeff());
    if (sv < threshold) p.non_smooth_samples.push_back(s);
  }
  p.smooth = p.non_smooth_samples.empty();
  return p;
}

/// Divisor chart coordinates w = (z_2/z_1, …) of random directions of L_A.
inline std::vector<CVec> la_divisor_samples(const RMat& A, int count, std::mt19937_64& rng) {
  const int n = static_cast<int>(A.rows());
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_real_distribution<double> U1(0.5, 1.0);
  const CMat J = A.cast<cplx>() + kI * CMat::Identity(n, n);
  std::vector<CVec> out;
  while (static_cast<int>(out.size()) < count) {
    RVec y(n);
    y(0) = U1(rng);
    for (int i = 1; i < n; ++i) y(i) = U(rng);
    const CVec z = J * y.cast<cplx>();
    if (std::abs(z(0)) < 1e-6) continue;
    out.push_back(la_chart_point(z).w);
  }
  return out;
}

/// Orthonormal real basis (2n × n, coordinates x then y) of {x = A y}.
inline RMat la_plane_basis(const RMat& A) {
  const Eigen::Index n = A.rows();
  RMat M(2 * n, n);
  M << A, RMat::Identity(n, n);
  Eigen::HouseholderQR<RMat> qr(M);
  return qr.householderQ() * RMat::Identity(2 * n, n);
}

/// Σ dx_i ∧ dy_i evaluated on the columns of a real basis.
inline RMat flat_omega_on_basis(const RMat& B) {
  const Eigen::Index n = B.rows() / 2;
  RMat J0 = RMat::Zero(2 * n, 2 * n);
  J0.topRightCorner(n, n) = RMat::Identity(n, n);
  J0.bottomLeftCorner(n, n) = -RMat::Identity(n, n);
  return B.transpose() * J0 * B;
}

}  // namespace cyslag
