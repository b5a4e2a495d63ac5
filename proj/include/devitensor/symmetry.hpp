#pragma once

// Mirror planes of deviators from their multipoles, and the anisotropy class
// of a stiffness tensor from the intersection of its deviators' plane sets.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "devitensor/multipole.hpp"
#include "devitensor/stiffness.hpp"

namespace devitensor {

enum class PlaneSetKind { AllDirections, TransverseFamily, Finite };

/// Mirror-plane normals, each defined up to sign. TransverseFamily holds the
/// axis itself plus every direction orthogonal to it.
struct SymmetryPlaneSet {
  PlaneSetKind kind = PlaneSetKind::Finite;
  Vec3 axis{};
  std::vector<Vec3> normals;

  static SymmetryPlaneSet all() { return {PlaneSetKind::AllDirections, {}, {}}; }
  static SymmetryPlaneSet transverse(const Vec3& axis) {
    return {PlaneSetKind::TransverseFamily, canonical_sign(normalized(axis)), {}};
  }
  static SymmetryPlaneSet finite(std::vector<Vec3> normals) {
    return {PlaneSetKind::Finite, {}, std::move(normals)};
  }

  bool contains(const Vec3& n, double angle_tol) const {
    switch (kind) {
      case PlaneSetKind::AllDirections:
        return true;
      case PlaneSetKind::TransverseFamily:
        return line_angle(n, axis) <= angle_tol || std::abs(dot(normalized(n), axis)) <= std::sin(angle_tol);
      case PlaneSetKind::Finite:
        return std::any_of(normals.begin(), normals.end(),
                           [&](const Vec3& m) { return line_angle(m, n) <= angle_tol; });
    }
    return false;
  }
};

enum class SymmetryClass {
  Isotropic,
  TransverselyIsotropic,
  Cubic,
  Tetragonal,
  Trigonal,
  Orthotropic,
  Monoclinic,
  Triclinic,
};

constexpr std::string_view to_string(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::Isotropic: return "isotropic";
    case SymmetryClass::TransverselyIsotropic: return "transversely_isotropic";
    case SymmetryClass::Cubic: return "cubic";
    case SymmetryClass::Tetragonal: return "tetragonal";
    case SymmetryClass::Trigonal: return "trigonal";
    case SymmetryClass::Orthotropic: return "orthotropic";
    case SymmetryClass::Monoclinic: return "monoclinic";
    case SymmetryClass::Triclinic: return "triclinic";
  }
  return "unknown";
}

/// Number of mirror planes of each class (-1: infinitely many).
constexpr int plane_count(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::Isotropic:
    case SymmetryClass::TransverselyIsotropic: return -1;
    case SymmetryClass::Cubic: return 9;
    case SymmetryClass::Tetragonal: return 5;
    case SymmetryClass::Trigonal:
    case SymmetryClass::Orthotropic: return 3;
    case SymmetryClass::Monoclinic: return 1;
    case SymmetryClass::Triclinic: return 0;
  }
  return 0;
}

/// ‖R(T) - T‖ for the reflection R = I - 2 n⊗n applied to every index.
inline double mirror_residual(const DenseTensor& t, const Vec3& normal) {
  return (rotate(t, reflection_matrix(normal), 1e-8) - t).norm();
}

namespace detail {

inline void add_unique_line(std::vector<Vec3>& set, const Vec3& n, double angle_tol) {
  for (const Vec3& m : set)
    if (line_angle(m, n) <= angle_tol) return;
  set.push_back(canonical_sign(normalized(n)));
}

inline bool is_perpendicular(const Vec3& a, const Vec3& b, double angle_tol) {
  return std::abs(dot(normalized(a), normalized(b))) <= std::sin(angle_tol);
}

inline std::vector<Vec3> verified(const std::vector<Vec3>& candidates, const DenseTensor& t, const Tolerances& tol) {
  std::vector<Vec3> out;
  const double limit = tol.mirror * t.norm();
  for (const Vec3& n : candidates)
    if (mirror_residual(t, n) <= limit) add_unique_line(out, n, tol.dir);
  return out;
}

inline bool all_lines_equal(const std::vector<Vec3>& dirs, double angle_tol) {
  return std::all_of(dirs.begin(), dirs.end(), [&](const Vec3& n) { return line_angle(n, dirs.front()) <= angle_tol; });
}

}  // namespace detail

/// Order-2 deviator: all directions if a = 0; the axis family if n1 = ±n2;
/// otherwise N1 = (n1+n2)/|n1+n2|, N2 = n1×n2/|n1×n2|, N3 = N1×N2.
inline SymmetryPlaneSet planes_of_deviator2(const MultipoleForm& mp, const Tolerances& tol = {}) {
  if (mp.is_zero()) return SymmetryPlaneSet::all();
  if (mp.order != 2 || mp.directions.size() != 2)
    throw Error(ErrorCode::UnsupportedOrder, "planes_of_deviator2 expects two multipoles");
  const Vec3& n1 = mp.directions[0];
  const Vec3& n2 = mp.directions[1];
  if (line_angle(n1, n2) <= tol.dir) return SymmetryPlaneSet::transverse(n1);
  const Vec3 b1 = normalized(n1 + n2);
  const Vec3 b2 = normalized(cross(n1, n2));
  const Vec3 b3 = cross(b1, b2);
  return SymmetryPlaneSet::finite(detail::verified({b1, b2, b3}, mp.reconstruct(), tol));
}

/// Order-4 deviator. A mirror maps the four multipole lines onto each other,
/// so each plane normal is a multipole, a bisector n_i ± n_j or a common
/// perpendicular n_i × n_j; every candidate is kept only if reflecting the
/// deviator across it reproduces the deviator.
inline SymmetryPlaneSet planes_of_deviator4(const MultipoleForm& mp, const Tolerances& tol = {}) {
  if (mp.is_zero()) return SymmetryPlaneSet::all();
  if (mp.order != 4 || mp.directions.size() != 4)
    throw Error(ErrorCode::UnsupportedOrder, "planes_of_deviator4 expects four multipoles");
  const auto& n = mp.directions;
  if (detail::all_lines_equal(n, tol.dir)) return SymmetryPlaneSet::transverse(n.front());

  std::vector<Vec3> candidates;
  for (std::size_t i = 0; i < 4; ++i) {
    candidates.push_back(n[i]);
    for (std::size_t j = i + 1; j < 4; ++j) {
      for (const Vec3& v : {n[i] + n[j], n[i] - n[j], cross(n[i], n[j])})
        if (norm(v) > 1e-9) candidates.push_back(normalized(v));
    }
  }
  return SymmetryPlaneSet::finite(detail::verified(candidates, mp.reconstruct(), tol));
}

/// Variant-aware intersection; AllDirections is neutral.
inline SymmetryPlaneSet intersect(const SymmetryPlaneSet& a, const SymmetryPlaneSet& b, const Tolerances& tol = {}) {
  using K = PlaneSetKind;
  if (a.kind == K::AllDirections) return b;
  if (b.kind == K::AllDirections) return a;
  if (a.kind == K::TransverseFamily && b.kind == K::TransverseFamily) {
    if (line_angle(a.axis, b.axis) <= tol.dir) return a;
    std::vector<Vec3> common{normalized(cross(a.axis, b.axis))};
    if (detail::is_perpendicular(a.axis, b.axis, tol.dir)) {
      detail::add_unique_line(common, a.axis, tol.dir);
      detail::add_unique_line(common, b.axis, tol.dir);
    }
    for (Vec3& v : common) v = canonical_sign(v);
    return SymmetryPlaneSet::finite(common);
  }
  const SymmetryPlaneSet& fin = a.kind == K::Finite ? a : b;
  const SymmetryPlaneSet& other = a.kind == K::Finite ? b : a;
  std::vector<Vec3> common;
  for (const Vec3& n : fin.normals) {
    const bool member = other.kind == K::TransverseFamily
                            ? (line_angle(n, other.axis) <= tol.dir || detail::is_perpendicular(n, other.axis, tol.dir))
                            : other.contains(n, tol.dir);
    if (member) detail::add_unique_line(common, n, tol.dir);
  }
  return SymmetryPlaneSet::finite(common);
}

/// Class label from the plane structure: infinite families give isotropic /
/// transversely isotropic; finite sets are recognised by count and geometry
/// (3 orthogonal: orthotropic, 3 at 60° around a common axis: trigonal).
inline SymmetryClass label_of(const SymmetryPlaneSet& planes, const Tolerances& tol = {}) {
  switch (planes.kind) {
    case PlaneSetKind::AllDirections: return SymmetryClass::Isotropic;
    case PlaneSetKind::TransverseFamily: return SymmetryClass::TransverselyIsotropic;
    case PlaneSetKind::Finite: break;
  }
  const auto& n = planes.normals;
  const double loose = std::max(tol.dir, 1e-6);
  switch (n.size()) {
    case 0: return SymmetryClass::Triclinic;
    case 1: return SymmetryClass::Monoclinic;
    case 3: {
      const bool orthogonal = detail::is_perpendicular(n[0], n[1], loose) &&
                              detail::is_perpendicular(n[0], n[2], loose) &&
                              detail::is_perpendicular(n[1], n[2], loose);
      if (orthogonal) return SymmetryClass::Orthotropic;
      const Vec3 axis = normalized(cross(n[0], n[1]));
      const double sixty = std::acos(0.5);
      const bool coplanar = detail::is_perpendicular(n[2], axis, loose);
      const bool spaced = std::abs(line_angle(n[0], n[1]) - sixty) <= loose &&
                          std::abs(line_angle(n[0], n[2]) - sixty) <= loose &&
                          std::abs(line_angle(n[1], n[2]) - sixty) <= loose;
      if (coplanar && spaced) return SymmetryClass::Trigonal;
      break;
    }
    case 5: return SymmetryClass::Tetragonal;
    case 9: return SymmetryClass::Cubic;
    default: break;
  }
  throw Error(ErrorCode::ConfigurationAmbiguous,
              std::to_string(n.size()) + " mirror planes match no elastic symmetry class");
}

struct StiffnessClassification {
  SymmetryClass label = SymmetryClass::Triclinic;
  SymmetryPlaneSet planes;
  StiffnessDecomposition decomposition;
  MultipoleForm mp_D, mp_Dhat, mp_D4;
  SymmetryPlaneSet planes_D, planes_Dhat, planes_D4;
};

namespace detail {

inline Deviator zero_if_negligible(const Deviator& d, double scale, double rel) {
  return d.norm() <= rel * scale ? Deviator::zero(d.order()) : d;
}

inline Vec3 any_perpendicular(const Vec3& a) {
  const Vec3 trial = std::abs(a[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  return normalized(cross(a, trial));
}

}  // namespace detail

/// MP[C] = MP[D] ∩ MP[D̂] ∩ MP[𝒟], then every reported plane is checked by
/// reflecting C itself.
inline StiffnessClassification classify_stiffness(const StiffnessTensor& c, std::uint64_t seed = 0,
                                                  const Tolerances& tol = {}) {
  StiffnessClassification out;
  out.decomposition = decompose_stiffness(c, tol);
  const double scale = c.norm();
  const auto& dec = out.decomposition;
  out.mp_D = multipoles(detail::zero_if_negligible(dec.D, scale, tol.zero), seed, tol);
  out.mp_Dhat = multipoles(detail::zero_if_negligible(dec.Dhat, scale, tol.zero), seed, tol);
  out.mp_D4 = multipoles(detail::zero_if_negligible(dec.D4, scale, tol.zero), seed, tol);
  out.planes_D = planes_of_deviator2(out.mp_D, tol);
  out.planes_Dhat = planes_of_deviator2(out.mp_Dhat, tol);
  out.planes_D4 = planes_of_deviator4(out.mp_D4, tol);

  SymmetryPlaneSet planes = intersect(intersect(out.planes_D, out.planes_Dhat, tol), out.planes_D4, tol);
  const double limit = tol.mirror * scale;
  if (planes.kind == PlaneSetKind::Finite) {
    std::vector<Vec3> kept;
    for (const Vec3& n : planes.normals)
      if (mirror_residual(c.tensor(), n) <= limit) kept.push_back(n);
    planes.normals = std::move(kept);
  } else if (planes.kind == PlaneSetKind::TransverseFamily) {
    const Vec3 p = detail::any_perpendicular(planes.axis);
    if (mirror_residual(c.tensor(), planes.axis) > limit || mirror_residual(c.tensor(), p) > limit)
      throw Error(ErrorCode::ConfigurationAmbiguous, "transverse family fails the mirror test on C");
  }
  out.label = label_of(planes, tol);
  out.planes = std::move(planes);
  return out;
}

}  // namespace devitensor
