#include "cyslag/slag.hpp"

#include <gtest/gtest.h>

using namespace cyslag;

namespace {

RMat random_matrix(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  RMat A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = U(rng);
  return A;
}

RMat symmetric(std::mt19937_64& rng, int n) {
  const RMat A = random_matrix(rng, n);
  return 0.5 * (A + A.transpose());
}

// q = z_2 / z_1 along L_bc, computed straight from the parametrization.
cplx trace_point(double b, double c, double phi) {
  const CVec z = lbc_point(b, c, phi);
  return z(1) / z(0);
}

}  // namespace

TEST(Lbc, FlatSpecialLagrangianWithRealVolume) {
  const FlatPotential flat(2);
  const auto Om = HolomorphicVolumeForm::standard(2);
  for (double b : {-1.0, 0.0, 0.4, 1.0})
    for (double c : {-0.7, 0.0, 0.3}) {
      const ParamImmersion L = lbc_immersion(b, c);
      for (const RVec& t : L.sample_points()) {
        EXPECT_LT(pullback_two_form(flat, L, t).cwiseAbs().maxCoeff(), 1e-15);
        const cplx p = pullback_volume_form(Om, L, t);
        EXPECT_NEAR(p.real(), -(1.0 + b * b + c * c), 1e-14);
        EXPECT_NEAR(p.imag(), 0.0, 1e-15);
      }
      const DefectReport d = slag_defect(flat, Om, L);
      EXPECT_LT(std::max(d.omega_sup, d.phase_sup), 1e-9);
      EXPECT_NEAR(d.theta, kPi, 1e-12);
    }
}

TEST(Lbc, SpecialLagrangianForEguchiHanson) {
  const auto Om = HolomorphicVolumeForm::standard(2);
  for (double a : {0.3, 1.0})
    for (double b : {-0.8, 0.0, 0.5})
      for (double c : {-0.6, 0.2, 1.0}) {
        const DefectReport d = slag_defect(eguchi_hanson_potential(a, false), Om, lbc_immersion(b, c));
        EXPECT_LT(std::max(d.omega_sup, d.phase_sup), 1e-9) << b << " " << c;
      }
}

TEST(Lbc, NonRadialMetricBreaksLagrangian) {
  // Control: a non-radial Kähler potential does not keep L_bc Lagrangian.
  struct Quartic {
    ComplexChart chart() const { return ComplexChart(2, "C2"); }
    bool admissible(const CVec&) const { return true; }
    CMat hessian(const CVec& z) const {
      CMat g = CMat::Identity(2, 2);
      g(0, 0) += 4.0 * std::norm(z(0));
      return g;
    }
  };
  const DefectReport d = slag_defect(Quartic{}, HolomorphicVolumeForm::standard(2), lbc_immersion(0.5, 0.3));
  EXPECT_GT(d.omega_sup, 1e-3);
}

TEST(LbcDivisor, TraceSatisfiesComputedEquation) {
  for (double b : linspace(-1.5, 1.5, 13))
    for (double c : linspace(-1.5, 1.5, 13)) {
      const CircleEquation eq = lbc_divisor_equation(b, c);
      for (int i = 0; i < 50; ++i) {
        const double phi = kPi * (i + 0.5) / 50;
        if (std::abs(lbc_point(b, c, phi)(0)) < 1e-6) continue;
        const cplx q = trace_point(b, c, phi);
        EXPECT_LT(std::abs(eq.residual(q)) / (1.0 + std::norm(q)), 1e-12);
      }
    }
}

TEST(LbcDivisor, PrintedCoefficientDiffersOffDiagonal) {
  // The variant with q_1 coefficient −2b coincides with the trace only when b = c.
  for (double b : {0.3, -0.5, 1.0}) {
    const CircleEquation pe = printed_divisor_equation(b, b), eq = lbc_divisor_equation(b, b);
    EXPECT_EQ(pe.B1, eq.B1);
  }
  const cplx q = trace_point(1.0, 0.0, kPi / 4.0);
  EXPECT_NEAR(std::abs(q - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(lbc_divisor_equation(1.0, 0.0).residual(q), 0.0, 1e-15);
  EXPECT_NEAR(printed_divisor_equation(1.0, 0.0).residual(q), -2.0, 1e-15);
}

TEST(LbcDivisor, CircleAndLineCases) {
  const CurveInCP unit = lbc_cp1_circle(1.0, 0.0);
  EXPECT_EQ(unit.kind, CurveInCP::Kind::circle);
  EXPECT_NEAR(std::abs(unit.center), 0.0, 1e-15);
  EXPECT_NEAR(unit.radius, 1.0, 1e-15);
  for (const cplx q : unit.sample(16)) EXPECT_NEAR(unit.residual(q), 0.0, 1e-14);

  const CurveInCP line = lbc_cp1_circle(0.0, 2.0);
  EXPECT_EQ(line.kind, CurveInCP::Kind::line);
  for (const cplx q : line.sample(9)) EXPECT_NEAR(4.0 * q.real() - 3.0 * q.imag(), 0.0, 1e-12);
  for (int i = 0; i < 20; ++i) {
    const cplx q = trace_point(0.0, 2.0, kPi * (i + 0.5) / 20);
    EXPECT_NEAR(line.residual(q), 0.0, 1e-12);
  }
  EXPECT_THROW(curve_from_equation({0.0, 0.0, 0.0, 1.0}), DomainError);
  EXPECT_THROW(curve_from_equation({1.0, 0.0, 0.0, 1.0}), DomainError);
}

TEST(LbcDivisor, RayCosineMatchesArgumentOfP) {
  for (double b : {-0.9, 0.4, 1.3})
    for (double c : {-0.5, 0.0, 0.8})
      for (int i = 0; i < 40; ++i) {
        const CVec z = lbc_point(b, c, kPi * (i + 0.5) / 40);
        if (std::abs(z(0)) < 1e-8) continue;
        const cplx p = z(0) * z(0);
        const double cosv = lbc_ray_cosine(b, c, z(1) / z(0));
        EXPECT_LE(std::abs(cosv), 1.0 + 1e-15);
        EXPECT_NEAR(cosv, p.real() / std::abs(p), 1e-12);
      }
}

TEST(LbcDivisor, SphereConversions) {
  const Eigen::Vector3d x = q_to_sphere(cplx(0.3, -1.2));
  EXPECT_NEAR(x.norm(), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(sphere_to_q(x) - cplx(0.3, -1.2)), 0.0, 1e-14);
  const CircleEquation eq = lbc_divisor_equation(0.7, -0.2);
  for (const cplx q : lbc_cp1_circle(0.7, -0.2).sample(12)) EXPECT_LT(sphere_distance(eq, q_to_sphere(q)), 1e-12);
}

TEST(LbcTopology, OneCircleAndConnectedChartPart) {
  for (auto [b, c] : {std::pair{1.0, 0.0}, std::pair{0.5, 0.0}, std::pair{0.5, 0.3}}) {
    const TopologyProbe tp = lbc_topology_probe(b, c, 1e3);
    EXPECT_FALSE(tp.inconclusive);
    EXPECT_EQ(tp.divisor_circles, 1);
    EXPECT_TRUE(tp.connected_trace);
    EXPECT_LT(tp.fit_residual, 1e-9);
  }
  EXPECT_TRUE(lbc_topology_probe(0.5, 0.0, 10.0, 8).inconclusive);
  EXPECT_THROW(lbc_topology_probe(0.5, 0.0, 0.0), ConfigError);
}

TEST(Coverage, FamilyCoversSphere) {
  const CoverageReport r = theorem4_coverage(linspace(-1.0, 1.0, 401), 1000, 7, 1.0, 0.5);
  EXPECT_LT(r.max_distance, 5e-3);
  EXPECT_EQ(r.samples, 1000u);
  ASSERT_FALSE(r.witness_points.empty());
  EXPECT_LT(r.witness_residual, 1e-12);
  EXPECT_FALSE(r.witness_circles_coincide);
  ASSERT_EQ(r.origin_cover_b.size(), 1u);
  EXPECT_EQ(r.origin_cover_b[0], 0.0);
}

TEST(Coverage, OppositeParametersGiveTheSameCircle) {
  const CoverageReport r = theorem4_coverage({-1.0, 1.0}, 10, 7, 1.0, -1.0);
  EXPECT_TRUE(r.witness_circles_coincide);
}

TEST(La, LagrangianExamples) {
  RMat S(2, 2), N(2, 2);
  S << 1, 2, 2, 0;
  N << 0, 1, 0, 0;
  EXPECT_LT(la_symmetry_test(S).omega_defect, 1e-15);
  EXPECT_TRUE(la_symmetry_test(S).is_lagrangian);
  EXPECT_NEAR(la_symmetry_test(N).omega_defect, 1.0, 1e-15);
  EXPECT_FALSE(la_symmetry_test(N).is_lagrangian);
  EXPECT_EQ(la_symmetry_test(RMat::Zero(3, 3)).omega_defect, 0.0);
}

TEST(La, LagrangianIffSymmetric) {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 200; ++i) {
    const int n = 2 + i % 4;
    const RMat A = i % 2 ? symmetric(rng, n) : random_matrix(rng, n);
    EXPECT_EQ(la_symmetry_test(A).is_lagrangian, is_symmetric(A)) << A;
  }
}

TEST(La, DefectIsLinearInAsymmetry) {
  std::mt19937_64 rng(52);
  const RMat S = symmetric(rng, 3);
  RMat K = RMat::Zero(3, 3);
  K(0, 2) = 1.0;
  K(2, 0) = -1.0;
  const double d1 = la_symmetry_test(S + 1e-3 * K).omega_defect;
  const double d2 = la_symmetry_test(S + 2e-3 * K).omega_defect;
  EXPECT_NEAR(d2 / d1, 2.0, 1e-9);
  // The basis-free form on an orthonormal basis vanishes exactly for symmetric A.
  EXPECT_LT(flat_omega_on_basis(la_plane_basis(S)).norm(), 1e-14);
  EXPECT_GT(flat_omega_on_basis(la_plane_basis(S + 1e-3 * K)).norm(), 1e-5);
}

TEST(MinorSums, Examples) {
  const MinorSums z = minor_sum_identity(RMat::Zero(2, 2));
  EXPECT_EQ(z.even_sum, 1.0);
  EXPECT_EQ(z.odd_sum, 0.0);
  EXPECT_EQ(z.theta, 0.0);
  const MinorSums id = minor_sum_identity(RMat::Identity(2, 2));
  EXPECT_NEAR(std::abs(id.determinant - cplx(0.0, 2.0)), 0.0, 1e-15);
  EXPECT_EQ(id.even_sum, 0.0);
  EXPECT_EQ(id.odd_sum, 2.0);
  EXPECT_NEAR(id.theta, 3.0 * kPi / 2.0, 1e-15);
  EXPECT_NEAR(la_special_condition(RMat::Identity(2, 2), id.theta), 0.0, 1e-15);
  EXPECT_EQ(id.raw_even, 2.0);
  EXPECT_EQ(id.raw_odd, 2.0);
}

TEST(MinorSums, IdentityAgainstDeterminant) {
  std::mt19937_64 rng(53);
  for (int n = 1; n <= 6; ++n)
    for (int i = 0; i < 20; ++i) {
      const RMat A = i % 2 ? symmetric(rng, n) : random_matrix(rng, n);
      const MinorSums m = minor_sum_identity(A);
      const cplx direct = (CMat::Identity(n, n) + kI * A.cast<cplx>()).determinant();
      EXPECT_LT(std::abs(cplx(m.even_sum, m.odd_sum) - direct), 1e-11);
      if (is_symmetric(A)) {
        EXPECT_LT(std::abs(la_special_condition(A, m.theta)), 1e-12);
      }
    }
  EXPECT_THROW(minor_sum_identity(RMat::Zero(13, 13)), SizeError);
  EXPECT_THROW(minor_sum_identity(RMat::Zero(2, 3)), DimensionError);
}

TEST(MinorSums, SpecialConditionNeedsSymmetry) {
  RMat N(2, 2);
  N << 0, 1, 0, 0;
  EXPECT_THROW(la_special_condition(N, 0.0), PreconditionError);
  const RMat D = RMat::Identity(3, 3);
  // det(I + iI) = (1 + i)³ = −2 + 2i has argument 3π/4.
  EXPECT_NEAR(la_special_condition(D, -3.0 * kPi / 4.0), 0.0, 1e-14);
  EXPECT_NEAR(la_special_condition(D, 0.0), 2.0, 1e-14);
  EXPECT_NEAR(displayed_phase_expression(D, 0.0), minor_sum_identity(D).raw_odd, 0.0);
}

TEST(La, PullbackPhaseMatchesParametrization) {
  std::mt19937_64 rng(54);
  for (int n = 1; n <= 5; ++n)
    for (int i = 0; i < 10; ++i) {
      const RMat A = symmetric(rng, n);
      const MinorSums m = minor_sum_identity(A);
      const ParamImmersion L = la_immersion(A);
      const cplx p = pullback_volume_form(HolomorphicVolumeForm::standard(n), L, L.centroid());
      EXPECT_LT(std::abs((std::polar(1.0, la_pullback_phase(n, m.theta)) * p).imag()) / std::abs(p), 1e-12);
      const DefectReport d = slag_defect(FlatPotential(n), HolomorphicVolumeForm::standard(n), L,
                                         la_pullback_phase(n, m.theta));
      EXPECT_LT(std::max(d.omega_sup, d.phase_sup), 1e-12);
    }
}

TEST(LaBlowup, EquationsHoldAlongThePlane) {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int n = 2; n <= 4; ++n)
    for (int m = 0; m < 10; ++m) {
      const RMat A = symmetric(rng, n);
      const CMat J = A.cast<cplx>() + kI * CMat::Identity(n, n);
      for (int p = 0; p < 50; ++p) {
        RVec y(n);
        for (int i = 0; i < n; ++i) y(i) = U(rng);
        const CVec z = J * y.cast<cplx>();
        if (std::abs(z(0)) < 1e-3) continue;
        const LaChartPoint pt = la_chart_point(z);
        const LaBlowupResidual r = la_blowup_equations(A, pt);
        ASSERT_EQ(r.equations.size(), std::size_t(n));
        for (double e : r.equations) EXPECT_LT(std::abs(e), 1e-10 * std::max(1.0, z.norm()));
        for (double e : r.divisor) EXPECT_LT(std::abs(e), 1e-12 * (1.0 + pt.w.squaredNorm()));
      }
    }
  EXPECT_THROW(la_chart_point(CVec::Zero(2)), DomainError);
}

TEST(LaBlowup, DiagonalOneOneZeroTrace) {
  RMat D = RMat::Zero(3, 3);
  D(0, 0) = D(1, 1) = 1.0;
  std::mt19937_64 rng(56);
  const auto samples = la_divisor_samples(D, 100, rng);
  for (const CVec& w : samples) {
    EXPECT_NEAR(w(0).imag(), 0.0, 1e-12);
    EXPECT_NEAR(w(1).real(), w(1).imag(), 1e-12);
    EXPECT_LT(la_divisor_equations(D, w).cwiseAbs().maxCoeff(), 1e-12);
  }
  const SmoothnessProbe sp = la_smoothness_probe(D, samples);
  EXPECT_TRUE(sp.smooth);
  EXPECT_NEAR(sp.min_singular_value, 1.0, 1e-6);
  // The pair u2 + v2 = 0, u3 + v3 = 0 is violated on the trace.
  double worst = 0.0;
  for (const CVec& w : samples) worst = std::max(worst, std::abs(w(0).real() + w(0).imag()));
  EXPECT_GT(worst, 0.1);
}

TEST(LaBlowup, IdentityInTwoDimensionsIsSmooth) {
  std::mt19937_64 rng(57);
  const RMat I2 = RMat::Identity(2, 2);
  const SmoothnessProbe sp = la_smoothness_probe(I2, la_divisor_samples(I2, 50, rng));
  EXPECT_TRUE(sp.smooth);
  EXPECT_GT(sp.min_singular_value, 0.1);
  EXPECT_LT(sp.max_residual, 1e-12);
}

TEST(LaBlowup, RejectsWrongChartDimension) {
  EXPECT_THROW(la_divisor_equations(RMat::Identity(3, 3), CVec::Zero(1)), DimensionError);
}
