#include "cyslag/core.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cyslag;

namespace {

// φ = |z1|²|z2|² + Re(z1² z̄2), with hand-computed complex Hessian.
struct MixedQuartic {
  ComplexChart chart() const { return ComplexChart(2, "test"); }
  bool admissible(const CVec&) const { return true; }
  double value(const CVec& z) const {
    return std::norm(z(0)) * std::norm(z(1)) + (z(0) * z(0) * std::conj(z(1))).real();
  }
  CVec gradient(const CVec& z) const {
    CVec g(2);
    g << std::conj(z(0)) * std::norm(z(1)) + z(0) * std::conj(z(1)),
        std::norm(z(0)) * std::conj(z(1)) + 0.5 * std::conj(z(0) * z(0));
    return g;
  }
  CMat hessian(const CVec& z) const {
    CMat g(2, 2);
    g << std::norm(z(1)), std::conj(z(0)) * z(1) + z(0),
        z(0) * std::conj(z(1)) + std::conj(z(0)), std::norm(z(0));
    return g;
  }
};

// φ = |z|² + |z|⁴ on C: g = 1 + 4|z|², Ricci = −4 / (1 + 4|z|²)².
struct OneDimQuartic {
  ComplexChart chart() const { return ComplexChart(1, "C"); }
  bool admissible(const CVec&) const { return true; }
  double value(const CVec& z) const { return z.squaredNorm() + std::pow(z.squaredNorm(), 2); }
  CVec gradient(const CVec& z) const { return z.conjugate() * (1.0 + 2.0 * z.squaredNorm()); }
  CMat hessian(const CVec& z) const { return CMat::Constant(1, 1, 1.0 + 4.0 * z.squaredNorm()); }
};

struct PuncturedFlat {
  ComplexChart chart() const { return ComplexChart(1, "C*"); }
  bool admissible(const CVec& z) const { return std::abs(z(0)) > 0.5; }
  CMat hessian(const CVec&) const { return CMat::Identity(1, 1); }
};

static_assert(KahlerPotential<MixedQuartic>);
static_assert(KahlerPotential<FlatPotential>);
static_assert(MetricSource<PuncturedFlat>);
static_assert(!KahlerPotential<PuncturedFlat>);

CVec random_point(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd;
  CVec z(n);
  for (int i = 0; i < n; ++i) z(i) = cplx(nd(rng), nd(rng));
  return z;
}

// The linear immersion t ↦ J t with a 4 × 4 unit box.
ParamImmersion linear(const CMat& J, int grid = 3) {
  const int k = static_cast<int>(J.cols());
  return ParamImmersion(
      k, ComplexChart(static_cast<int>(J.rows()), "C^n"),
      [J](const RVec& t) { return ImmersionJet{J * t.cast<cplx>(), J}; }, RVec::Constant(k, -1.0),
      RVec::Constant(k, 1.0), std::vector<int>(k, grid));
}

}  // namespace

TEST(FdComplexHessian, MatchesHandComputedHessian) {
  std::mt19937_64 rng(3);
  const MixedQuartic phi;
  for (int i = 0; i < 20; ++i) {
    const CVec z = random_point(rng, 2);
    const CMat fd = fd_complex_hessian([&](const CVec& w) { return phi.value(w); }, z, 1e-4);
    EXPECT_LT((fd - phi.hessian(z)).norm(), 1e-6) << format_point(z);
  }
}

TEST(FdComplexHessian, IsHermitian) {
  std::mt19937_64 rng(4);
  const MixedQuartic phi;
  const CVec z = random_point(rng, 2);
  const HermitianMetric g{fd_complex_hessian([&](const CVec& w) { return phi.value(w); }, z, 1e-4), z};
  EXPECT_LT(g.hermitian_defect(), 1e-12);
}

TEST(FiniteDifferenceMetric, AgreesWithExactHessian) {
  std::mt19937_64 rng(5);
  const FiniteDifferenceMetric fd(MixedQuartic{}, 1e-4);
  for (int i = 0; i < 10; ++i) {
    const CVec z = random_point(rng, 2);
    EXPECT_LT((fd.hessian(z) - MixedQuartic{}.hessian(z)).norm(), 1e-6);
  }
}

TEST(MetricFromPotential, RejectsWrongDimension) {
  EXPECT_THROW(metric_from_potential(FlatPotential(3), CVec::Zero(2)), DimensionError);
}

TEST(MetricFromPotential, RejectsInadmissiblePoint) {
  EXPECT_THROW(metric_from_potential(PuncturedFlat{}, CVec::Zero(1)), DomainError);
  EXPECT_NO_THROW(metric_from_potential(PuncturedFlat{}, CVec::Constant(1, 1.0)));
}

TEST(MetricFromPotential, FlatIsPositive) {
  const HermitianMetric g = metric_from_potential(FlatPotential(3), CVec::Zero(3));
  EXPECT_TRUE(g.is_positive_definite());
  EXPECT_DOUBLE_EQ(g.min_eigenvalue(), 1.0);
}

TEST(RicciForm, FlatVanishes) {
  EXPECT_LT(ricci_form(FlatPotential(2), CVec::Constant(2, cplx(0.3, -0.2))).norm(), 1e-12);
}

TEST(RicciForm, OneDimensionalQuarticMatchesClosedForm) {
  for (double r : {0.0, 0.1, 0.5, 1.3}) {
    const CVec z = CVec::Constant(1, std::polar(r, 0.4));
    const double expected = -4.0 / std::pow(1.0 + 4.0 * r * r, 2);
    EXPECT_NEAR(ricci_form(OneDimQuartic{}, z)(0, 0).real(), expected, 1e-6) << r;
    EXPECT_NEAR(ricci_form(OneDimQuartic{}, z)(0, 0).imag(), 0.0, 1e-8);
  }
}

TEST(RicciForm, ShrinksStencilNearBoundary) {
  const CVec z = CVec::Constant(1, 0.5 + 3e-5);
  EXPECT_NO_THROW(ricci_form(PuncturedFlat{}, z, 1e-4));
  EXPECT_THROW(ricci_form(PuncturedFlat{}, CVec::Constant(1, 0.5 + 1e-7), 1e-4), DomainError);
  EXPECT_THROW(ricci_form(PuncturedFlat{}, CVec::Zero(1)), DomainError);
}

TEST(TwoForm, FlatOmegaIsSumDxDy) {
  CMat J = CMat::Zero(2, 2);
  J(0, 0) = 1.0;
  J(0, 1) = kI;
  const RMat w = two_form_matrix(CMat::Identity(2, 2), J);
  EXPECT_NEAR(w(0, 1), 1.0, 1e-15);
  EXPECT_NEAR(w(1, 0), -1.0, 1e-15);
  EXPECT_NEAR(w(0, 0), 0.0, 1e-15);
  EXPECT_TRUE(induced_metric_matrix(CMat::Identity(2, 2), J).isApprox(RMat::Identity(2, 2)));
}

TEST(TwoForm, IsAntisymmetricForRandomData) {
  std::mt19937_64 rng(9);
  const MixedQuartic phi;
  for (int i = 0; i < 10; ++i) {
    CVec z = random_point(rng, 2);
    const CMat g = phi.hessian(z) + 3.0 * CMat::Identity(2, 2);
    CMat J(2, 2);
    J.col(0) = random_point(rng, 2);
    J.col(1) = random_point(rng, 2);
    const RMat w = two_form_matrix(g, J);
    EXPECT_LT((w + w.transpose()).norm(), 1e-12);
  }
}

TEST(SlagDefect, RealPlaneHasPhaseZero) {
  const ParamImmersion L = linear(CMat::Identity(2, 2));
  const DefectReport d = slag_defect(FlatPotential(2), HolomorphicVolumeForm::standard(2), L);
  EXPECT_EQ(d.samples, 9u);
  EXPECT_NEAR(d.theta, 0.0, 1e-15);
  EXPECT_LT(d.omega_sup, 1e-15);
  EXPECT_LT(d.phase_sup, 1e-15);
}

TEST(SlagDefect, RotatedPlanePhase) {
  for (double psi : {0.1, 0.4, 0.7}) {
    const ParamImmersion L = linear(std::polar(1.0, psi) * CMat::Identity(3, 3));
    const DefectReport d = slag_defect(FlatPotential(3), HolomorphicVolumeForm::standard(3), L);
    EXPECT_NEAR(d.theta, wrap_angle(-3.0 * psi), 1e-13);
    EXPECT_LT(d.phase_sup, 1e-14);
    const DefectReport wrong = slag_defect(FlatPotential(3), HolomorphicVolumeForm::standard(3), L, 0.0);
    EXPECT_NEAR(wrong.phase_sup, std::abs(std::sin(3.0 * psi)), 1e-13);
  }
}

TEST(SlagDefect, ComplexLineIsNotLagrangian) {
  CMat J = CMat::Zero(2, 2);
  J(0, 0) = 1.0;
  J(0, 1) = kI;
  const DefectReport d = slag_defect(FlatPotential(2), HolomorphicVolumeForm::standard(2), linear(J), 0.0);
  EXPECT_NEAR(d.omega_sup, std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(d.omega_mean, std::sqrt(2.0), 1e-14);
}

TEST(SlagDefect, InvariantUnderLinearReparametrization) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 10; ++trial) {
    CMat J(3, 3);
    for (int i = 0; i < 9; ++i) J(i % 3, i / 3) = cplx(nd(rng), nd(rng));
    RMat S(3, 3);
    for (int i = 0; i < 9; ++i) S(i % 3, i / 3) = nd(rng);
    const ParamImmersion L = linear(J, 1);
    const ParamImmersion R = L.reparametrized(S, RVec::Zero(3));
    const auto Om = HolomorphicVolumeForm::standard(3);
    const DefectReport a = slag_defect(FlatPotential(3), Om, L, 0.3);
    const DefectReport b = slag_defect(FlatPotential(3), Om, R, 0.3);
    EXPECT_NEAR(a.omega_sup, b.omega_sup, 1e-9 * (1.0 + a.omega_sup));
    EXPECT_NEAR(a.phase_sup, b.phase_sup, 1e-9);
  }
}

TEST(SlagDefect, RankDeficientImmersionThrows) {
  CMat J = CMat::Zero(2, 2);
  J(0, 0) = 1.0;
  J(0, 1) = 2.0;
  EXPECT_THROW(slag_defect(FlatPotential(2), HolomorphicVolumeForm::standard(2), linear(J), 0.0), ImmersionError);
}

TEST(PullbackVolumeForm, DimensionMismatch) {
  CMat J = CMat::Zero(3, 2);
  J(0, 0) = J(1, 1) = 1.0;
  EXPECT_THROW(pullback_volume_form(HolomorphicVolumeForm::standard(3), linear(J), RVec::Zero(2)), DimensionError);
}

TEST(PullbackVolumeForm, IsDeterminant) {
  CMat J(2, 2);
  J << cplx(1, 2), cplx(0, 1), cplx(3, 0), cplx(-1, 1);
  const cplx p = pullback_volume_form(HolomorphicVolumeForm::standard(2), linear(J), RVec::Zero(2));
  EXPECT_NEAR(std::abs(p - (J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0))), 0.0, 1e-15);
}

TEST(ParamImmersion, ValidatesBoxAndGrid) {
  auto map = [](const RVec& t) { return ImmersionJet{t.cast<cplx>(), CMat::Identity(1, 1)}; };
  EXPECT_THROW(ParamImmersion(1, ComplexChart(1, "C"), map, RVec::Ones(1), RVec::Ones(1), {2}), ConfigError);
  EXPECT_THROW(ParamImmersion(1, ComplexChart(1, "C"), map, RVec::Zero(1), RVec::Ones(1), {0}), ConfigError);
  EXPECT_THROW(ParamImmersion(1, ComplexChart(1, "C"), map, RVec::Zero(2), RVec::Ones(1), {2}), DimensionError);
  EXPECT_THROW(ComplexChart(0, "empty"), ConfigError);
}

TEST(ParamImmersion, CellCentredSamples) {
  auto map = [](const RVec& t) { return ImmersionJet{t.cast<cplx>(), CMat::Identity(2, 2)}; };
  const ParamImmersion L(2, ComplexChart(2, "C2"), map, RVec::Zero(2), RVec::Ones(2), {2, 4});
  const auto pts = L.sample_points();
  ASSERT_EQ(pts.size(), 8u);
  EXPECT_DOUBLE_EQ(pts.front()(0), 0.25);
  EXPECT_DOUBLE_EQ(pts.front()(1), 0.125);
  EXPECT_DOUBLE_EQ(pts.back()(1), 0.875);
}

TEST(Utilities, WrapAngleAndLinspace) {
  EXPECT_NEAR(wrap_angle(-kPi / 2.0), 1.5 * kPi, 1e-15);
  EXPECT_EQ(wrap_angle(2.0 * kPi), 0.0);
  EXPECT_NEAR(wrap_angle(7.0 * kPi), kPi, 1e-14);
  const auto v = linspace(-1.0, 1.0, 5);
  ASSERT_EQ(v.size(), 5u);
  EXPECT_DOUBLE_EQ(v[1], -0.5);
  EXPECT_DOUBLE_EQ(linspace(2.0, 3.0, 1)[0], 2.0);
}
