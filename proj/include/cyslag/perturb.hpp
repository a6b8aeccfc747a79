// Deformations of torus fibers T_{α̂,β̂,γ̂} by a truncated Fourier normal field,
// the discrete calibration-defect energy, its minimization, and the surgered
// torus obtained by replacing T_{0β̂0} near its four singular curves by
// L_00 × T_β̂ pieces.
#pragma once

#include "cyslag/core.hpp"
#include "cyslag/gluing.hpp"
#include "cyslag/orbifold.hpp"

#include <array>
#include <type_traits>

namespace cyslag {

class GuardError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kTorusDim = 3;

using Index3 = std::array<int, 3>;

/// z_j(t) = α̂_j + δ_j(t) + i L_j t_j on t ∈ [0,1)³, where L_j = Im τ_j and
/// δ_j(t) = Re Σ_k ĉ_{j,k} e^{2πi k·t} over |k_b| ≤ N_b. The deformation moves
/// the real parts only, i.e. along J of the tangent directions.
class DeformedTorus {
 public:
  DeformedTorus(std::array<double, 3> base, std::array<double, 3> periods, Index3 modes, Index3 grid)
      : base_(base), periods_(periods), n_(modes), m_(grid) {
    for (int b = 0; b < 3; ++b) {
      if (n_[b] < 0) throw ConfigError("deformation: mode cutoff must be >= 0");
      if (m_[b] < 2 * n_[b] + 1) throw ConfigError("deformation: grid must resolve all modes (M >= 2N+1)");
      if (!(periods_[b] > 0.0)) throw ConfigError("deformation: periods must be positive");
    }
    coeffs_ = Eigen::VectorXcd::Zero(kTorusDim * static_cast<Eigen::Index>(block_size()));
  }

  static Index3 default_grid(Index3 modes) {
    Index3 g{};
    for (int b = 0; b < 3; ++b) g[b] = modes[b] == 0 ? 1 : std::max(4 * modes[b], 2 * modes[b] + 1);
    return g;
  }

  /// The fiber {Re z = (a, b, c)} of the orbifold's torus fibration. The grid
  /// defaults to M_b = 4 N_b (one node along directions carrying no modes).
  static DeformedTorus fiber(const Orbifold& orb, double a, double b, double c, Index3 modes,
                             Index3 grid = {0, 0, 0}) {
    if (!orb.pure_imaginary()) throw ConfigError("torus fibers need pure imaginary periods");
    std::array<double, 3> L{};
    for (int j = 0; j < 3; ++j) L[j] = orb.curves()[j].tau().imag();
    return {{a, b, c}, L, modes, grid[0] > 0 ? grid : default_grid(modes)};
  }
  static DeformedTorus fiber(const Orbifold& orb, double a, double b, double c, int modes = 4) {
    return fiber(orb, a, b, c, Index3{modes, modes, modes});
  }

  const Index3& modes() const { return n_; }
  const Index3& grid() const { return m_; }
  int side(int b) const { return 2 * n_[b] + 1; }
  std::size_t block_size() const { return std::size_t(side(0)) * side(1) * side(2); }
  std::size_t grid_size() const { return std::size_t(m_[0]) * m_[1] * m_[2]; }
  const std::array<double, 3>& base() const { return base_; }
  const std::array<double, 3>& periods() const { return periods_; }
  double guard_radius() const { return guard_; }
  void set_guard_radius(double g) { guard_ = g; }

  const Eigen::VectorXcd& coefficients() const { return coeffs_; }
  void set_coefficients(const Eigen::VectorXcd& c) {
    if (c.size() != coeffs_.size()) throw DimensionError("deformation: coefficient count mismatch");
    coeffs_ = c;
  }

  std::size_t index(int j, int k1, int k2, int k3) const {
    if (j < 0 || j >= kTorusDim || std::abs(k1) > n_[0] || std::abs(k2) > n_[1] || std::abs(k3) > n_[2])
      throw DimensionError("deformation: mode index out of range");
    return ((std::size_t(j) * side(0) + (k1 + n_[0])) * side(1) + (k2 + n_[1])) * side(2) + (k3 + n_[2]);
  }
  cplx& coeff(int j, int k1, int k2, int k3) { return coeffs_(index(j, k1, k2, k3)); }
  cplx coeff(int j, int k1, int k2, int k3) const { return coeffs_(index(j, k1, k2, k3)); }

  /// Same deformation with other cutoffs (higher modes dropped or zero-filled).
  DeformedTorus with_modes(Index3 modes, Index3 grid = {0, 0, 0}) const {
    DeformedTorus out(base_, periods_, modes, grid[0] > 0 ? grid : default_grid(modes));
    out.guard_ = guard_;
    const Index3 N{std::min(n_[0], modes[0]), std::min(n_[1], modes[1]), std::min(n_[2], modes[2])};
    for (int j = 0; j < kTorusDim; ++j)
      for (int a = -N[0]; a <= N[0]; ++a)
        for (int b = -N[1]; b <= N[1]; ++b)
          for (int c = -N[2]; c <= N[2]; ++c) out.coeff(j, a, b, c) = coeff(j, a, b, c);
    return out;
  }

  /// δ(t) and ∂δ/∂t by direct summation.
  std::pair<RVec, RMat> field(const RVec& t) const {
    RVec d = RVec::Zero(3);
    RMat D = RMat::Zero(3, 3);
    for (int k1 = -n_[0]; k1 <= n_[0]; ++k1)
      for (int k2 = -n_[1]; k2 <= n_[1]; ++k2)
        for (int k3 = -n_[2]; k3 <= n_[2]; ++k3) {
          const cplx e = std::exp(2.0 * kPi * kI * (k1 * t(0) + k2 * t(1) + k3 * t(2)));
          const Index3 k{k1, k2, k3};
          for (int j = 0; j < 3; ++j) {
            const cplx v = coeff(j, k1, k2, k3) * e;
            d(j) += v.real();
            for (int b = 0; b < 3; ++b) D(j, b) += (2.0 * kPi * kI * double(k[b]) * v).real();
          }
        }
    return {d, D};
  }

  ImmersionJet evaluate(const RVec& t) const {
    const auto [d, D] = field(t);
    ImmersionJet jet{CVec(3), D.cast<cplx>()};
    for (int j = 0; j < 3; ++j) {
      jet.z(j) = cplx(base_[j] + d(j), periods_[j] * t(j));
      jet.jacobian(j, j) += kI * periods_[j];
    }
    return jet;
  }

  ParamImmersion immersion() const {
    auto self = *this;
    return ParamImmersion(3, ComplexChart(3, "E1xE2xE3"),
                          [self](const RVec& t) { return self.evaluate(t); }, RVec::Zero(3),
                          RVec::Ones(3), {m_[0], m_[1], m_[2]});
  }

  /// Quadrature nodes t_m = m / M_b (periodic trapezoid rule).
  double node(int b, int m) const { return static_cast<double>(m) / m_[b]; }

 private:
  std::array<double, 3> base_;
  std::array<double, 3> periods_;
  Index3 n_, m_;
  double guard_ = 0.2;
  Eigen::VectorXcd coeffs_;
};

namespace detail {

/// Row-major 3-index array with extents (d0, d1, d2).
struct Box {
  Index3 ext;
  std::size_t at(int a, int b, int c) const { return (std::size_t(a) * ext[1] + b) * ext[2] + c; }
  std::size_t size() const { return std::size_t(ext[0]) * ext[1] * ext[2]; }
};

/// Replace axis `axis` of `in` (extent E(…).cols()) by E·in along that axis.
inline std::vector<cplx> apply_axis(const std::vector<cplx>& in, Box from, int axis, const CMat& E,
                                    Box& to) {
  to = from;
  to.ext[axis] = static_cast<int>(E.rows());
  std::vector<cplx> out(to.size(), 0.0);
  Index3 i{};
  for (i[0] = 0; i[0] < to.ext[0]; ++i[0])
    for (i[1] = 0; i[1] < to.ext[1]; ++i[1])
      for (i[2] = 0; i[2] < to.ext[2]; ++i[2]) {
        Index3 s = i;
        cplx acc = 0.0;
        for (s[axis] = 0; s[axis] < from.ext[axis]; ++s[axis])
          acc += E(i[axis], s[axis]) * in[from.at(s[0], s[1], s[2])];
        out[to.at(i[0], i[1], i[2])] = acc;
      }
  return out;
}

inline CMat fourier_matrix(int M, int N, double sign) {
  CMat E(M, 2 * N + 1);
  for (int m = 0; m < M; ++m)
    for (int k = 0; k <= 2 * N; ++k) E(m, k) = std::exp(sign * 2.0 * kPi * kI * double((k - N) * m) / double(M));
  return E;
}

/// Separable synthesis Σ_k c_k e^{2πi k·t_m} over the grid for one coefficient block.
inline std::vector<cplx> synthesize(const cplx* c, Index3 N, Index3 M) {
  Box box{{2 * N[0] + 1, 2 * N[1] + 1, 2 * N[2] + 1}};
  std::vector<cplx> v(c, c + box.size());
  for (int axis = 2; axis >= 0; --axis) {
    Box next;
    v = apply_axis(v, box, axis, fourier_matrix(M[axis], N[axis], 1.0), next);
    box = next;
  }
  return v;
}

/// Adjoint of synthesize: Σ_m r_m e^{−2πi k·t_m} for every k.
inline std::vector<cplx> analyze(const std::vector<double>& r, Index3 N, Index3 M) {
  Box box{M};
  std::vector<cplx> v(r.begin(), r.end());
  for (int axis = 0; axis < 3; ++axis) {
    Box next;
    v = apply_axis(v, box, axis, fourier_matrix(M[axis], N[axis], -1.0).transpose(), next);
    box = next;
  }
  return v;
}

inline CMat cofactor3(const CMat& J) {
  CMat C(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
      C(i, j) = J(i1, j1) * J(i2, j2) - J(i1, j2) * J(i2, j1);
    }
  return C;
}

/// Samples of z and J = ∂z/∂t over the quadrature grid.
struct TorusSamples {
  std::vector<CVec> z;
  std::vector<CMat> J;
  double max_shift = 0.0;
};

inline TorusSamples sample_torus(const DeformedTorus& T) {
  const Index3 N = T.modes(), M = T.grid();
  const std::size_t B = T.block_size(), G = T.grid_size();
  const Box kbox{{T.side(0), T.side(1), T.side(2)}};
  TorusSamples s;
  s.z.assign(G, CVec::Zero(3));
  s.J.assign(G, CMat::Zero(3, 3));
  std::vector<cplx> block(B);
  for (int j = 0; j < 3; ++j) {
    const cplx* c = T.coefficients().data() + j * B;
    const auto delta = synthesize(c, N, M);
    for (std::size_t g = 0; g < G; ++g) s.z[g](j) = delta[g].real();
    for (int b = 0; b < 3; ++b) {
      if (N[b] == 0) continue;
      Index3 k{};
      for (k[0] = 0; k[0] < kbox.ext[0]; ++k[0])
        for (k[1] = 0; k[1] < kbox.ext[1]; ++k[1])
          for (k[2] = 0; k[2] < kbox.ext[2]; ++k[2]) {
            const std::size_t i = kbox.at(k[0], k[1], k[2]);
            block[i] = 2.0 * kPi * kI * double(k[b] - N[b]) * c[i];
          }
      const auto d = synthesize(block.data(), N, M);
      for (std::size_t g = 0; g < G; ++g) s.J[g](j, b) = d[g].real();
    }
  }
  const Box gbox{M};
  for (int m1 = 0; m1 < M[0]; ++m1)
    for (int m2 = 0; m2 < M[1]; ++m2)
      for (int m3 = 0; m3 < M[2]; ++m3) {
        const std::size_t g = gbox.at(m1, m2, m3);
        const std::array<double, 3> t{T.node(0, m1), T.node(1, m2), T.node(2, m3)};
        for (int j = 0; j < 3; ++j) {
          const double shift = s.z[g](j).real();
          s.max_shift = std::max(s.max_shift, std::abs(shift));
          s.z[g](j) = cplx(T.base()[j] + shift, T.periods()[j] * t[j]);
          s.J[g](j, j) += kI * T.periods()[j];
        }
      }
  return s;
}

inline double local_energy(const CMat& g, const CMat& J, cplx volume) {
  const RMat Om = -(J.transpose() * g * J.conjugate()).imag();
  const double ph = (volume * J.determinant()).imag();
  return Om.squaredNorm() + ph * ph;
}

template <class M>
constexpr bool constant_metric_v = std::is_same_v<M, FlatPotential>;

}  // namespace detail

/// E = (1/|grid|) Σ_grid ( ‖ι*ω‖_F² + Im(e^{iθ} ι*Ω)² ), with components taken
/// in the t-coordinates.
template <MetricSource Metric>
double defect_energy(const DeformedTorus& T, const Metric& g, const HolomorphicVolumeForm& Om,
                     double theta) {
  const auto s = detail::sample_torus(T);
  if (s.max_shift > T.guard_radius()) throw GuardError("deformation exceeds the chart guard radius");
  const cplx phase = std::exp(kI * theta);
  double E = 0.0;
  for (std::size_t i = 0; i < s.z.size(); ++i) {
    if (!g.admissible(s.z[i])) throw GuardError("deformed torus left the admissible chart at " + format_point(s.z[i]));
    E += detail::local_energy(g.hessian(s.z[i]), s.J[i], phase * Om.coefficient(s.z[i]));
  }
  return E / static_cast<double>(s.z.size());
}

struct EnergyGradient {
  double energy = 0.0;
  Eigen::VectorXcd gradient;  // ∂E/∂Re ĉ + i ∂E/∂Im ĉ
};

/// Analytic in the Jacobian dependence; the dependence through the ambient
/// point uses a central difference of step `fd_step` (skipped for constant metrics).
template <MetricSource Metric>
EnergyGradient defect_energy_gradient(const DeformedTorus& T, const Metric& g,
                                      const HolomorphicVolumeForm& Om, double theta,
                                      double fd_step = 1e-6) {
  const auto s = detail::sample_torus(T);
  if (s.max_shift > T.guard_radius()) throw GuardError("deformation exceeds the chart guard radius");
  const cplx phase = std::exp(kI * theta);
  const std::size_t G = s.z.size();
  const double w = 1.0 / static_cast<double>(G);
  std::array<std::vector<double>, 3> S;
  std::array<std::array<std::vector<double>, 3>, 3> Tt;
  for (int j = 0; j < 3; ++j) {
    S[j].assign(G, 0.0);
    for (int b = 0; b < 3; ++b) Tt[j][b].assign(G, 0.0);
  }
  EnergyGradient out;
  for (std::size_t i = 0; i < G; ++i) {
    const CVec& z = s.z[i];
    const CMat& J = s.J[i];
    if (!g.admissible(z)) throw GuardError("deformed torus left the admissible chart at " + format_point(z));
    const CMat h = g.hessian(z);
    const cplx vol = phase * Om.coefficient(z);
    const CMat G1 = h * J.conjugate();
    const CMat G2 = J.transpose() * h;
    const RMat Omega = -(J.transpose() * G1).imag();
    const cplx q = vol * J.determinant();
    out.energy += Omega.squaredNorm() + q.imag() * q.imag();
    const RMat dOm = -2.0 * (G1.imag() * Omega.transpose() + G2.transpose().imag() * Omega);
    const RMat dPh = 2.0 * q.imag() * (vol * detail::cofactor3(J)).imag();
    for (int j = 0; j < 3; ++j)
      for (int b = 0; b < 3; ++b) Tt[j][b][i] = w * (dOm(j, b) + dPh(j, b));
    if constexpr (!detail::constant_metric_v<Metric>) {
      for (int j = 0; j < 3; ++j) {
        CVec zp = z, zm = z;
        zp(j) += fd_step;
        zm(j) -= fd_step;
        if (!g.admissible(zp) || !g.admissible(zm))
          throw GuardError("gradient stencil left the admissible chart at " + format_point(z));
        const double ep = detail::local_energy(g.hessian(zp), J, phase * Om.coefficient(zp));
        const double em = detail::local_energy(g.hessian(zm), J, phase * Om.coefficient(zm));
        S[j][i] = w * (ep - em) / (2.0 * fd_step);
      }
    }
  }
  out.energy *= w;
  const Index3 N = T.modes(), M = T.grid();
  const std::size_t B = T.block_size();
  const detail::Box kbox{{T.side(0), T.side(1), T.side(2)}};
  out.gradient = Eigen::VectorXcd::Zero(3 * static_cast<Eigen::Index>(B));
  for (int j = 0; j < 3; ++j) {
    std::vector<cplx> acc(B, 0.0);
    if constexpr (!detail::constant_metric_v<Metric>) acc = detail::analyze(S[j], N, M);
    for (int b = 0; b < 3; ++b) {
      if (N[b] == 0) continue;
      const auto A = detail::analyze(Tt[j][b], N, M);
      Index3 k{};
      for (k[0] = 0; k[0] < kbox.ext[0]; ++k[0])
        for (k[1] = 0; k[1] < kbox.ext[1]; ++k[1])
          for (k[2] = 0; k[2] < kbox.ext[2]; ++k[2]) {
            const std::size_t i = kbox.at(k[0], k[1], k[2]);
            acc[i] += -2.0 * kPi * kI * double(k[b] - N[b]) * A[i];
          }
    }
    for (std::size_t i = 0; i < B; ++i) out.gradient(j * B + i) = acc[i];
  }
  return out;
}

/// sup_t |δ(t) − mean δ|: distance of the deformed torus from the nearest fiber.
inline double distance_to_fiber(const DeformedTorus& T) {
  const auto s = detail::sample_torus(T);
  double worst = 0.0;
  for (int j = 0; j < 3; ++j) {
    double mean = 0.0;
    for (const CVec& z : s.z) mean += z(j).real();
    mean /= static_cast<double>(s.z.size());
    for (const CVec& z : s.z) worst = std::max(worst, std::abs(z(j).real() - mean));
  }
  return worst;
}

enum class MinimizeStatus { converged, max_iter, stalled };

inline std::string to_string(MinimizeStatus s) {
  switch (s) {
    case MinimizeStatus::converged: return "converged";
    case MinimizeStatus::max_iter: return "max_iter";
    case MinimizeStatus::stalled: return "stalled";
  }
  return "unknown";
}

struct MinimizeOptions {
  double tol = 1e-14;
  int max_iter = 200;
  double initial_step = 1e-2;
  double armijo = 1e-4;
  int max_backtracks = 40;
  int stall_window = 20;
  double stall_relative = 1e-12;
  double fd_step = 1e-6;
};

struct MinimizeResult {
  DeformedTorus torus;
  std::vector<double> history;  // E before the first step, then after each accepted step
  MinimizeStatus status = MinimizeStatus::max_iter;
  int iterations = 0;
  std::string gradient_mode = "analytic";
};

/// Gradient descent with Armijo backtracking. Trial steps that leave the chart
/// guard are treated as rejected.
template <MetricSource Metric>
MinimizeResult minimize_defect(const DeformedTorus& start, const Metric& g,
                               const HolomorphicVolumeForm& Om, double theta,
                               const MinimizeOptions& opt = {}) {
  MinimizeResult res{start, {}, MinimizeStatus::max_iter, 0, "analytic"};
  EnergyGradient cur = defect_energy_gradient(start, g, Om, theta, opt.fd_step);
  if (!std::isfinite(cur.energy)) throw PreconditionError("minimize_defect: initial energy is not finite");
  res.history.push_back(cur.energy);
  if (cur.energy < opt.tol) {
    res.status = MinimizeStatus::converged;
    return res;
  }
  double step = opt.initial_step;
  for (int it = 0; it < opt.max_iter; ++it) {
    const double gg = cur.gradient.squaredNorm();
    bool accepted = false;
    DeformedTorus trial = res.torus;
    EnergyGradient next;
    for (int bt = 0; bt < opt.max_backtracks; ++bt, step *= 0.5) {
      trial.set_coefficients(res.torus.coefficients() - step * cur.gradient);
      try {
        next = defect_energy_gradient(trial, g, Om, theta, opt.fd_step);
      } catch (const GuardError&) {
        continue;
      }
      if (std::isfinite(next.energy) && next.energy <= cur.energy - opt.armijo * step * gg) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.status = MinimizeStatus::stalled;
      return res;
    }
    res.torus = trial;
    cur = std::move(next);
    res.history.push_back(cur.energy);
    res.iterations = it + 1;
    step *= 2.0;
    if (cur.energy < opt.tol) {
      res.status = MinimizeStatus::converged;
      return res;
    }
    const int n = static_cast<int>(res.history.size());
    if (n > opt.stall_window) {
      const double old = res.history[n - 1 - opt.stall_window];
      if ((old - cur.energy) < opt.stall_relative * old) {
        res.status = MinimizeStatus::stalled;
        return res;
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Surgered torus

struct SurgeryRadii {
  double r0 = 0.5;     // collar inner radius, normal units
  double r1 = 1.0;     // collar outer radius, normal units
  double scale = 0.1;  // lattice units per normal unit
};

/// One L_00 × T_β̂ piece in the normal chart of a singular curve c:
/// (v_1, v_2, s) ↦ (c_1 + λ i v_1, β̂ + i s, c_3 + λ i v_2).
struct SurgeryPiece {
  FixedCurve curve;
  cplx c1, c3;
  double max_mismatch = 0.0;
  double collar_defect_sup = 0.0;
  std::size_t collar_samples = 0;
};

struct SurgeredTorus {
  double beta = 0.0;
  double a = 0.0;
  std::array<double, 2> corner{0.0, 0.0};  // (α̂, γ̂)
  SurgeryRadii radii;
  std::vector<SurgeryPiece> pieces;
  ParamImmersion immersion;
};

struct SurgeryReport {
  SurgeredTorus torus;
  DefectReport defect;
  double energy = 0.0;
  double collar_mismatch = 0.0;
  double collar_defect_sup = 0.0;
  double outside_defect_sup = 0.0;
  std::string note;
};

inline constexpr double kCollarTolerance = 1e-3;

/// T̃_{α̂β̂γ̂} for a corner (α̂, γ̂) ∈ {0, ½}²: inside the collar around each of
/// the four singular curves it meets, the map is χ·(torus) + (1 − χ)·(piece),
/// with the collar cutoff in normal distance.
inline SurgeryReport build_surgered_torus(double beta, double a, const SurgeryRadii& radii = {},
                                          std::array<double, 2> corner = {0.0, 0.0}, int grid = 12,
                                          int smoothness = 2) {
  auto on_half_lattice = [](double x) {
    const double r = x - std::floor(x);
    return std::abs(r) < 1e-12 || std::abs(r - 0.5) < 1e-12 || std::abs(r - 1.0) < 1e-12;
  };
  if (!on_half_lattice(corner[0]) || !on_half_lattice(corner[1]))
    throw PreconditionError("surgery: (alpha, gamma) must lie in {0, 1/2}^2");
  if (!(a > 0.0)) throw PreconditionError("surgery: neck parameter a must be positive");
  NeckConfig cfg;
  cfg.r0 = radii.r0;
  cfg.r1 = radii.r1;
  cfg.scale = radii.scale;
  cfg.smoothness = smoothness;
  cfg.a.assign(16, a);
  const Orbifold orb;
  const GluedOrbifoldMetric metric(orb, cfg);

  const GenericityResult hits = orb.genericity(corner[0], beta, corner[1]);
  for (const FixedCurve& c : hits.intersected)
    if (c.free_factor != 1)
      throw PreconditionError("surgery: the torus meets a singular curve transverse to E_2");
  if (hits.intersected.size() != 4)
    throw PreconditionError("surgery: expected four singular curves along E_2, found " +
                            std::to_string(hits.intersected.size()));

  const auto& E = orb.curves();
  std::vector<SurgeryPiece> pieces;
  for (const FixedCurve& c : hits.intersected)
    pieces.push_back({c, E[0].to_complex(c.coords[0]), E[2].to_complex(c.coords[2])});

  const std::array<double, 3> L{E[0].tau().imag(), E[1].tau().imag(), E[2].tau().imag()};
  const double lam = radii.scale;
  auto torus_point = [=](const RVec& t) {
    CVec z(3);
    z << cplx(corner[0], L[0] * t(0)), cplx(beta, L[1] * t(1)), cplx(corner[1], L[2] * t(2));
    return z;
  };
  // The L_00 × T_β̂ point with the same Im w, and the normal distance |w| of z.
  auto piece_point = [=](const SurgeryPiece& p, const CVec& z) {
    const cplx d1 = E[0].nearest(z(0) - p.c1), d3 = E[2].nearest(z(2) - p.c3);
    CVec y = z;
    y(0) -= d1.real();
    y(2) -= d3.real();
    return std::pair{y, std::hypot(std::abs(d1), std::abs(d3)) / lam};
  };
  auto blended = [=](const RVec& t) {
    CVec z = torus_point(t);
    for (const SurgeryPiece& p : pieces) {
      const auto [y, r] = piece_point(p, z);
      if (r >= radii.r1) continue;
      const double chi = cutoff(r, radii.r0, radii.r1, smoothness);
      z = chi * z + (1.0 - chi) * y;
    }
    return z;
  };
  auto map = [=](const RVec& t) {
    ImmersionJet jet{blended(t), CMat(3, 3)};
    constexpr double h = 1e-6;
    for (int b = 0; b < 3; ++b) {
      RVec tp = t, tm = t;
      tp(b) += h;
      tm(b) -= h;
      jet.jacobian.col(b) = (blended(tp) - blended(tm)) / (2.0 * h);
    }
    return jet;
  };
  SurgeredTorus T{beta, a, corner, radii, pieces,
                  ParamImmersion(3, ComplexChart(3, "E1xE2xE3"), map, RVec::Zero(3), RVec::Ones(3),
                                 {grid, grid, grid})};

  SurgeryReport rep{T, {}, 0.0, 0.0, 0.0, 0.0, {}};
  const HolomorphicVolumeForm Om = HolomorphicVolumeForm::standard(3);
  rep.defect = slag_defect(metric, Om, T.immersion, PhaseChoice(-kPi / 2.0));
  const cplx phase = std::exp(kI * rep.defect.theta);
  double energy = 0.0;
  const auto pts = T.immersion.sample_points();
  for (const RVec& t : pts) {
    const ImmersionJet jet = T.immersion(t);
    const double e = detail::local_energy(metric.hessian(jet.z), jet.jacobian, phase);
    energy += e;
    bool in_collar = false;
    for (SurgeryPiece& p : rep.torus.pieces) {
      const auto [y, r] = piece_point(p, torus_point(t));
      if (r < radii.r0 || r >= radii.r1) continue;
      in_collar = true;
      p.max_mismatch = std::max(p.max_mismatch, (y - torus_point(t)).norm());
      p.collar_defect_sup = std::max(p.collar_defect_sup, std::sqrt(e));
      ++p.collar_samples;
    }
    if (!in_collar) rep.outside_defect_sup = std::max(rep.outside_defect_sup, std::sqrt(e));
  }
  rep.energy = energy / static_cast<double>(pts.size());
  std::string diag;
  for (const SurgeryPiece& p : rep.torus.pieces) {
    rep.collar_mismatch = std::max(rep.collar_mismatch, p.max_mismatch);
    rep.collar_defect_sup = std::max(rep.collar_defect_sup, p.collar_defect_sup);
    CVec c(2);
    c << p.c1, p.c3;
    diag += " " + format_point(c) + " mismatch " + std::to_string(p.max_mismatch);
  }
  if (rep.collar_mismatch > kCollarTolerance)
    throw PreconditionError("surgery: collar mismatch above tolerance:" + diag);
  rep.note = "measurement only; no claim that a special Lagrangian perturbation exists";
  return rep;
}

}  // namespace cyslag
