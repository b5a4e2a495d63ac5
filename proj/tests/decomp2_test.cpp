#include <gtest/gtest.h>

#include <random>

#include "devitensor/decomp2.hpp"
#include "support/check.hpp"
#include "support/oracles.hpp"

using namespace devitensor;

namespace {

DenseTensor diag(double a, double b, double c) { return DenseTensor::matrix({{{a, 0, 0}, {0, b, 0}, {0, 0, c}}}); }

}  // namespace

TEST(Decompose2, Identity) {
  const auto d = decompose2(identity());
  EXPECT_DOUBLE_EQ(d.d, 1.0);
  EXPECT_EQ(d.dvec, (Vec3{0, 0, 0}));
  EXPECT_LE(d.D.norm(), 1e-16);
}

TEST(Decompose2, RotationGenerator) {
  DenseTensor a(2);
  a(1, 2) = 1.0;
  a(2, 1) = -1.0;
  const auto d = decompose2(a);
  EXPECT_EQ(d.d, 0.0);
  EXPECT_LE(d.D.norm(), 1e-16);
  EXPECT_NEAR(d.dvec[0], 1.0, 1e-16);
  EXPECT_NEAR(d.dvec[1], 0.0, 1e-16);
  EXPECT_NEAR(d.dvec[2], 0.0, 1e-16);
}

TEST(Decompose2, AlreadyTraceless) {
  const auto d = decompose2(diag(3, -1, -2));
  EXPECT_EQ(d.d, 0.0);
  EXPECT_EQ(d.dvec, (Vec3{0, 0, 0}));
  EXPECT_TRUE(TensorNear(d.D.tensor(), diag(3, -1, -2), 0.0));
}

TEST(Decompose2, RandomReconstruction) {
  std::mt19937_64 rng(61);
  for (int k = 0; k < 100; ++k) {
    const DenseTensor t = oracle::random_tensor(2, rng);
    EXPECT_TRUE(TensorNear(decompose2(t).reconstruct(), t, 1e-12 * t.norm()));
  }
}

TEST(MultipolesFromEigen, DistinctExample) {
  const auto em = multipoles_from_eigen(3, -2);
  EXPECT_DOUBLE_EQ(em.amplitude, 5.0);
  EXPECT_NEAR(em.m1[0], std::sqrt(0.8), 1e-15);
  EXPECT_NEAR(em.m1[1], std::sqrt(0.2), 1e-15);
  EXPECT_NEAR(em.m2[1], -std::sqrt(0.2), 1e-15);
  const std::vector<Vec3> dirs{em.m1, em.m2};
  EXPECT_TRUE(TensorNear(em.amplitude * traceless_outer(dirs).tensor(), diag(3, -2, -1), 1e-14));
  EXPECT_NEAR(multipole_eigen_angle(3, -2), 0.46365, 1e-5);
  EXPECT_NEAR(line_angle(em.m1, {1, 0, 0}), std::acos(std::sqrt(0.8)), 1e-14);
}

TEST(MultipolesFromEigen, DoubleEigenvalueCollapses) {
  const auto em = multipoles_from_eigen(2, -1);
  EXPECT_DOUBLE_EQ(em.amplitude, 3.0);
  EXPECT_TRUE(VecLineNear(em.m1, {1, 0, 0}, 0.0));
  EXPECT_TRUE(VecLineNear(em.m2, {1, 0, 0}, 0.0));
}

TEST(MultipolesFromEigen, NegativeLeadingEigenvalue) {
  const auto em = multipoles_from_eigen(-3, 2);
  EXPECT_DOUBLE_EQ(em.amplitude, 5.0);
  const std::vector<Vec3> dirs{em.m1, em.m2};
  EXPECT_TRUE(TensorNear(em.amplitude * traceless_outer(dirs).tensor(), diag(-3, 2, 1), 1e-14));
}

TEST(MultipolesFromEigen, TripleEigenvalueIsDegenerate) {
  EXPECT_THROW_CODE(multipoles_from_eigen(0.0, 0.0), DegenerateSpectrum);
}

TEST(ClassifyEigenMultipole, Spherical) {
  const DenseTensor t = 5.0 * identity();
  EXPECT_EQ(classify_eigen_multipole(t, eigen_path_multipoles(t)).id, EigenCase::Spherical);
}

TEST(ClassifyEigenMultipole, DoubleEigenvalue) {
  const DenseTensor t = diag(4, 1, 1);
  const auto mp = multipoles(traceless_symmetric_part(t));
  const auto cs = classify_eigen_multipole(t, mp);
  EXPECT_EQ(cs.id, EigenCase::DoubleEigenvalue);
  ASSERT_TRUE(cs.axis.has_value());
  EXPECT_TRUE(VecLineNear(*cs.axis, {1, 0, 0}, 1e-8));
}

TEST(ClassifyEigenMultipole, GenericBisectors) {
  const DenseTensor t = diag(3, -1, -2);
  const auto mp = multipoles(traceless_symmetric_part(t));
  const auto cs = classify_eigen_multipole(t, mp);
  EXPECT_EQ(cs.id, EigenCase::Generic);
  EXPECT_TRUE(cs.bisectors_match);
  EXPECT_TRUE(VecLineNear(cs.eigen.vectors[0], {1, 0, 0}, 1e-12));
  EXPECT_TRUE(VecLineNear(cs.eigen.vectors[1], {0, 0, 1}, 1e-12));
}

TEST(ClassifyEigenMultipole, RandomBisectorPropertyAndAmplitude) {
  std::mt19937_64 rng(62);
  for (int k = 0; k < 200; ++k) {
    const DenseTensor t = oracle::random_symmetric2(rng);
    const Deviator d = traceless_symmetric_part(t);
    const auto mp = multipoles(d);
    const auto cs = classify_eigen_multipole(t, mp);
    EXPECT_EQ(cs.id, EigenCase::Generic);
    EXPECT_LE(cs.bisector_error, 1e-8);
    const auto ep = eigen_path_multipoles(t);
    EXPECT_NEAR(ep.amplitude, mp.amplitude, 1e-8 * d.norm());
    EXPECT_TRUE(SameLineSet(ep.directions, mp.directions, 1e-8));
  }
}

TEST(EigenPath, IdentityShiftChangesOnlyTrace) {
  std::mt19937_64 rng(63);
  const DenseTensor t = oracle::random_symmetric2(rng);
  const auto a = eigen_path_multipoles(t), b = eigen_path_multipoles(t + 7.5 * identity());
  EXPECT_NEAR(a.amplitude, b.amplitude, 1e-12);
  EXPECT_TRUE(SameLineSet(a.directions, b.directions, 1e-10));
  EXPECT_NEAR(decompose2(t + 7.5 * identity()).d - decompose2(t).d, 7.5, 1e-12);
}

TEST(EigenPath, AmplitudeZeroIffDeviatorZero) {
  EXPECT_EQ(eigen_path_multipoles(2.0 * identity()).amplitude, 0.0);
  EXPECT_GT(eigen_path_multipoles(diag(1, 1, 1.001)).amplitude, 0.0);
}
