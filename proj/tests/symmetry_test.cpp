#include <gtest/gtest.h>

#include <random>

#include "devitensor/symmetry.hpp"
#include "support/check.hpp"
#include "support/oracles.hpp"

using namespace devitensor;

namespace {

const double kR2 = 1.0 / std::sqrt(2.0);

std::vector<Vec3> cubic_normals() {
  return {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {kR2, kR2, 0}, {kR2, -kR2, 0},
          {kR2, 0, kR2}, {kR2, 0, -kR2}, {0, kR2, kR2}, {0, kR2, -kR2}};
}

std::vector<Vec3> rotated(const std::vector<Vec3>& v, const DenseTensor& q) {
  std::vector<Vec3> out;
  for (const Vec3& x : v) out.push_back(apply(q, x));
  return out;
}

}  // namespace

TEST(PlanesOfDeviator2, ZeroIsAllDirections) {
  EXPECT_EQ(planes_of_deviator2(MultipoleForm{2, 0.0, {}}).kind, PlaneSetKind::AllDirections);
}

TEST(PlanesOfDeviator2, CoincidentMultipolesGiveTransverseFamily) {
  const auto s = planes_of_deviator2(MultipoleForm{2, 3.0, {{1, 0, 0}, {1, 0, 0}}});
  EXPECT_EQ(s.kind, PlaneSetKind::TransverseFamily);
  EXPECT_TRUE(VecLineNear(s.axis, {1, 0, 0}, 0.0));
}

TEST(PlanesOfDeviator2, DistinctMultipolesGiveThreeAxes) {
  const MultipoleForm mp{2, 5.0, {{std::sqrt(0.8), std::sqrt(0.2), 0}, {std::sqrt(0.8), -std::sqrt(0.2), 0}}};
  const auto s = planes_of_deviator2(mp);
  ASSERT_EQ(s.kind, PlaneSetKind::Finite);
  EXPECT_TRUE(VecLineNear(s.normals[0], {1, 0, 0}, 1e-15));
  EXPECT_TRUE(VecLineNear(s.normals[1], {0, 0, 1}, 1e-15));
  EXPECT_TRUE(VecLineNear(s.normals[2], {0, 1, 0}, 1e-15));
}

TEST(PlanesOfDeviator4, FourfoldAxisGivesTransverseFamily) {
  const auto s = planes_of_deviator4(MultipoleForm{4, 1.0, std::vector<Vec3>(4, Vec3{0, 0, 1})});
  EXPECT_EQ(s.kind, PlaneSetKind::TransverseFamily);
  EXPECT_TRUE(VecLineNear(s.axis, {0, 0, 1}, 0.0));
}

TEST(PlanesOfDeviator4, CubeDiagonalsGiveNinePlanes) {
  const double s = 1.0 / std::sqrt(3.0);
  const MultipoleForm mp{4, 1.0, {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}}};
  const auto planes = planes_of_deviator4(mp);
  ASSERT_EQ(planes.kind, PlaneSetKind::Finite);
  EXPECT_TRUE(SameLineSet(planes.normals, cubic_normals(), 1e-12));
}

TEST(PlanesOfDeviator4, RandomDirectionsHaveNoPlanes) {
  std::mt19937_64 rng(91);
  for (int k = 0; k < 10; ++k) {
    MultipoleForm mp{4, 1.0, {}};
    for (int i = 0; i < 4; ++i) mp.directions.push_back(oracle::random_unit(rng));
    const auto planes = planes_of_deviator4(mp);
    EXPECT_EQ(planes.kind, PlaneSetKind::Finite);
    EXPECT_TRUE(planes.normals.empty());
  }
}

TEST(PlanesOfDeviator4, EveryReportedNormalIsAMirror) {
  std::mt19937_64 rng(92);
  for (const auto& fx : oracle::fixtures()) {
    const auto dec = decompose_stiffness(StiffnessTensor::from(fx.c));
    const auto mp = multipoles(dec.D4);
    const auto planes = planes_of_deviator4(mp);
    for (const Vec3& n : planes.normals)
      EXPECT_LE(oracle::mirror_defect(dec.D4.tensor(), n).norm(), 1e-8 * dec.D4.norm()) << fx.label;
  }
}

TEST(Intersect, AllDirectionsIsNeutral) {
  const auto t = SymmetryPlaneSet::transverse({0, 0, 1});
  EXPECT_EQ(intersect(SymmetryPlaneSet::all(), t).kind, PlaneSetKind::TransverseFamily);
  EXPECT_EQ(intersect(t, SymmetryPlaneSet::all()).kind, PlaneSetKind::TransverseFamily);
  EXPECT_EQ(intersect(SymmetryPlaneSet::all(), SymmetryPlaneSet::all()).kind, PlaneSetKind::AllDirections);
}

TEST(Intersect, TwoTransverseFamilies) {
  const auto a = SymmetryPlaneSet::transverse({0, 0, 1});
  EXPECT_EQ(intersect(a, SymmetryPlaneSet::transverse({0, 0, -1})).kind, PlaneSetKind::TransverseFamily);
  const auto perp = intersect(a, SymmetryPlaneSet::transverse({1, 0, 0}));
  ASSERT_EQ(perp.kind, PlaneSetKind::Finite);
  EXPECT_TRUE(SameLineSet(perp.normals, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, 1e-15));
  const auto oblique = intersect(a, SymmetryPlaneSet::transverse({1, 0, 1}));
  ASSERT_EQ(oblique.kind, PlaneSetKind::Finite);
  EXPECT_TRUE(SameLineSet(oblique.normals, {{0, 1, 0}}, 1e-15));
}

TEST(Intersect, FiniteWithTransverseKeepsAxisAndPerpendiculars) {
  const auto fin = SymmetryPlaneSet::finite(cubic_normals());
  const auto out = intersect(fin, SymmetryPlaneSet::transverse({0, 0, 1}));
  EXPECT_TRUE(SameLineSet(out.normals, {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}, {kR2, kR2, 0}, {kR2, -kR2, 0}}, 1e-12));
}

TEST(Intersect, FiniteSets) {
  const auto a = SymmetryPlaneSet::finite({{1, 0, 0}, {0, 1, 0}});
  const auto b = SymmetryPlaneSet::finite({{0, -1, 0}, {0, 0, 1}});
  const auto out = intersect(a, b);
  EXPECT_TRUE(SameLineSet(out.normals, {{0, 1, 0}}, 0.0));
}

TEST(LabelOf, Table) {
  EXPECT_EQ(label_of(SymmetryPlaneSet::all()), SymmetryClass::Isotropic);
  EXPECT_EQ(label_of(SymmetryPlaneSet::transverse({0, 0, 1})), SymmetryClass::TransverselyIsotropic);
  EXPECT_EQ(label_of(SymmetryPlaneSet::finite(cubic_normals())), SymmetryClass::Cubic);
  EXPECT_EQ(label_of(SymmetryPlaneSet::finite({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}})), SymmetryClass::Orthotropic);
  const double c = std::cos(M_PI / 3), s = std::sin(M_PI / 3);
  EXPECT_EQ(label_of(SymmetryPlaneSet::finite({{1, 0, 0}, {c, s, 0}, {-c, s, 0}})), SymmetryClass::Trigonal);
  EXPECT_EQ(label_of(SymmetryPlaneSet::finite({{1, 0, 0}})), SymmetryClass::Monoclinic);
  EXPECT_EQ(label_of(SymmetryPlaneSet::finite({})), SymmetryClass::Triclinic);
}

TEST(LabelOf, UnmatchedConfigurationsAreAmbiguous) {
  EXPECT_THROW_CODE(label_of(SymmetryPlaneSet::finite({{1, 0, 0}, {0, 1, 0}})), ConfigurationAmbiguous);
  EXPECT_THROW_CODE(label_of(SymmetryPlaneSet::finite({{1, 0, 0}, {0, 1, 0}, {1, 1, 1}})), ConfigurationAmbiguous);
}

TEST(ClassifyStiffness, CanonicalFixtures) {
  for (const auto& fx : oracle::fixtures()) {
    const auto cls = classify_stiffness(StiffnessTensor::from(fx.c));
    EXPECT_EQ(to_string(cls.label), fx.label);
    EXPECT_EQ(plane_count(cls.label), fx.planes);
    if (cls.planes.kind == PlaneSetKind::Finite) EXPECT_EQ(static_cast<int>(cls.planes.normals.size()), fx.planes);
  }
}

TEST(ClassifyStiffness, CubicPlanes) {
  const auto cls = classify_stiffness(StiffnessTensor::from(oracle::fixtures()[2].c));
  EXPECT_TRUE(SameLineSet(cls.planes.normals, cubic_normals(), 1e-10));
}

TEST(ClassifyStiffness, TransverseAxisIsE3) {
  const auto cls = classify_stiffness(StiffnessTensor::from(oracle::fixtures()[1].c));
  ASSERT_EQ(cls.planes.kind, PlaneSetKind::TransverseFamily);
  EXPECT_TRUE(VecLineNear(cls.planes.axis, {0, 0, 1}, 1e-10));
}

TEST(ClassifyStiffness, RotatedOrthotropicPlanesAreRotatedAxes) {
  std::mt19937_64 rng(93);
  const DenseTensor q = oracle::random_rotation(rng);
  const auto cls = classify_stiffness(StiffnessTensor::from(oracle::rotate(oracle::fixtures()[5].c, q)));
  EXPECT_EQ(cls.label, SymmetryClass::Orthotropic);
  EXPECT_TRUE(SameLineSet(cls.planes.normals, rotated({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, q), 1e-8));
}

TEST(ClassifyStiffness, MirrorSoundnessAndEquivariance) {
  std::mt19937_64 rng(94);
  for (const auto& fx : oracle::fixtures()) {
    const DenseTensor q = oracle::random_rotation(rng);
    const DenseTensor rc = oracle::rotate(fx.c, q);
    const auto base = classify_stiffness(StiffnessTensor::from(fx.c));
    const auto cls = classify_stiffness(StiffnessTensor::from(rc));
    EXPECT_EQ(cls.label, base.label) << fx.label;
    for (const Vec3& n : cls.planes.normals) EXPECT_LE(oracle::mirror_defect(rc, n).norm(), 1e-8 * rc.norm());
    if (cls.planes.kind == PlaneSetKind::Finite)
      EXPECT_TRUE(SameLineSet(cls.planes.normals, rotated(base.planes.normals, q), 1e-6)) << fx.label;
    if (cls.planes.kind == PlaneSetKind::TransverseFamily)
      EXPECT_TRUE(VecLineNear(cls.planes.axis, apply(q, base.planes.axis), 1e-6));
  }
}

TEST(ClassifyStiffness, AgreesWithBruteForceOracle) {
  std::mt19937_64 rng(95);
  for (const auto& fx : oracle::fixtures()) {
    const DenseTensor c = oracle::rotate(fx.c, oracle::random_rotation(rng));
    const auto bf = oracle::brute_force_planes(c);
    EXPECT_EQ(bf.label, fx.label);
    const auto cls = classify_stiffness(StiffnessTensor::from(c));
    EXPECT_EQ(std::string(to_string(cls.label)), bf.label);
    if (!bf.infinite) EXPECT_TRUE(SameLineSet(cls.planes.normals, bf.normals, 1e-6)) << fx.label;
  }
}

TEST(ClassifyStiffness, PerturbedIsotropicNeverExceedsOracle) {
  std::mt19937_64 rng(96);
  for (int k = 0; k < 3; ++k) {
    const DenseTensor c = oracle::isotropic(2.0, 1.0) + 1e-3 * oracle::random_stiffness(rng);
    const auto cls = classify_stiffness(StiffnessTensor::from(c));
    const auto bf = oracle::brute_force_planes(c);
    EXPECT_EQ(std::string(to_string(cls.label)), bf.label);
    EXPECT_EQ(cls.label, SymmetryClass::Triclinic);
  }
}

TEST(MirrorResidual, ReflectionAcrossCoordinatePlane) {
  const DenseTensor c = oracle::fixtures()[5].c;
  EXPECT_EQ(mirror_residual(c, {1, 0, 0}), 0.0);
  EXPECT_GT(mirror_residual(c, {1, 1, 0}), 1e-3);
}
