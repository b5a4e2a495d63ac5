#pragma once

// Second-order tensors: T_ij = d δ_ij + ε_ijk d_k + D_ij, and the link between
// the multipoles of D and the eigendecomposition of T.

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "devitensor/multipole.hpp"
#include "devitensor/spectral.hpp"

namespace devitensor {

struct SecondOrderDecomposition {
  double d = 0.0;  // tr(T) / 3
  Vec3 dvec{};     // axial vector, d_i = ½ ε_ijk T_jk
  Deviator D = Deviator::zero(2);

  DenseTensor reconstruct() const {
    DenseTensor t = d * identity() + D.tensor();
    const DenseTensor w = contract_single(permutation_tensor(), DenseTensor::vector(dvec));
    return t + w;
  }
};

inline SecondOrderDecomposition decompose2(const DenseTensor& t) {
  if (t.order() != 2) throw Error(ErrorCode::DimensionError, "decompose2 needs order 2");
  SecondOrderDecomposition out;
  out.d = trace(t)[0] / 3.0;
  const DenseTensor axial = 0.5 * contract_double(permutation_tensor(), t);
  out.dvec = to_vec3(axial);
  out.D = traceless_symmetric_part(t);
  return out;
}

/// Closed-form multipoles of diag(λ1, λ2, -λ1-λ2) in its eigenframe.
struct EigenMultipoles {
  double amplitude = 0.0;
  Vec3 m1{}, m2{};
};

/// Requires |λ1| >= |λ2| >= |λ3| for the deviator eigenvalues. Unit norm of
/// m1, m2 forces a = λ1 - λ2:
///   m1 = (sqrt((2λ1+λ2)/a),  sqrt((-λ1-2λ2)/a), 0)
///   m2 = (sqrt((2λ1+λ2)/a), -sqrt((-λ1-2λ2)/a), 0)
/// since a (u² - (u²-v²)/3) = λ1 and the entries sum to 1. For λ1 < 0 the
/// raw a is negative; the returned amplitude is |a| with m1 negated.
/// A double eigenvalue (λ2 = λ3) collapses to m1 = m2 = e1.
inline EigenMultipoles multipoles_from_eigen(double lambda1, double lambda2, double scale = -1.0,
                                             const Tolerances& tol = {}) {
  const double ref = scale >= 0.0 ? scale : std::hypot(lambda1, lambda2, lambda1 + lambda2);
  const double a = lambda1 - lambda2;
  if (std::abs(a) <= tol.gap * ref || ref == 0.0)
    throw Error(ErrorCode::DegenerateSpectrum, "triple eigenvalue: multipoles undefined");
  const double u = std::sqrt(std::max(0.0, (2.0 * lambda1 + lambda2) / a));
  const double v = std::sqrt(std::max(0.0, (-lambda1 - 2.0 * lambda2) / a));
  EigenMultipoles out;
  out.amplitude = std::abs(a);
  out.m1 = {u, v, 0.0};
  out.m2 = {u, -v, 0.0};
  if (a < 0) out.m1 = -out.m1;
  return out;
}

/// Angle between the first multipole and the λ1 eigenvector:
/// arccos(sqrt((2λ1+λ2)/(λ1-λ2))).
inline double multipole_eigen_angle(double lambda1, double lambda2) {
  return std::acos(std::sqrt(std::max(0.0, (2.0 * lambda1 + lambda2) / (lambda1 - lambda2))));
}

/// Closed-form multipoles of dev(T) mapped into the global frame.
inline MultipoleForm eigen_path_multipoles(const DenseTensor& t, const Tolerances& tol = {}) {
  const Deviator dev = traceless_symmetric_part(t);
  const double scale = dev.norm();
  if (scale <= tol.zero * std::max(t.norm(), 1e-300)) return MultipoleForm{2, 0.0, {}};
  const EigenSystem3 es = eigen_sym3(dev.tensor(), tol);
  const EigenMultipoles em = multipoles_from_eigen(es.values[0], es.values[1], scale, tol);
  auto to_global = [&](const Vec3& m) {
    return normalized(m[0] * es.vectors[0] + m[1] * es.vectors[1] + m[2] * es.vectors[2]);
  };
  return MultipoleForm{2, em.amplitude, {to_global(em.m1), to_global(em.m2)}};
}

enum class EigenCase { Spherical, DoubleEigenvalue, Generic };

constexpr std::string_view to_string(EigenCase c) {
  switch (c) {
    case EigenCase::Spherical: return "spherical";
    case EigenCase::DoubleEigenvalue: return "double_eigenvalue";
    case EigenCase::Generic: return "generic";
  }
  return "unknown";
}

struct EigenMultipoleCase {
  EigenCase id = EigenCase::Spherical;
  EigenSystem3 eigen;
  std::optional<Vec3> axis;       // Case 2: the collapsed multipole
  bool bisectors_match = false;   // Case 3: m1 ± m2 align with v1, v2
  double bisector_error = 0.0;    // largest line angle in the bisector check
};

/// Case 1: a = 0 (triple eigenvalue). Case 2: m1 = ±m2 (double eigenvalue).
/// Case 3: the bisector of m1, m2 closer to the multipole lines is v1 (largest
/// |λ| of dev T), the other bisector is v2. Ties go to the more degenerate case.
inline EigenMultipoleCase classify_eigen_multipole(const DenseTensor& t, const MultipoleForm& mp,
                                                   const Tolerances& tol = {}) {
  EigenMultipoleCase out;
  out.eigen = eigen_sym3(t, tol);
  const double dev_norm = traceless_symmetric_part(t).norm();
  if (mp.is_zero() || dev_norm <= tol.zero * std::max(t.norm(), 1e-300)) {
    out.id = EigenCase::Spherical;
    return out;
  }
  const Vec3& n1 = mp.directions[0];
  const Vec3& n2 = mp.directions[1];
  if (line_angle(n1, n2) <= tol.dir) {
    out.id = EigenCase::DoubleEigenvalue;
    out.axis = n1;
    return out;
  }
  out.id = EigenCase::Generic;
  const Vec3 bp = normalized(n1 + n2);
  const Vec3 bm = normalized(n1 - n2);
  const bool plus_closer = std::abs(dot(bp, n1)) >= std::abs(dot(bm, n1));
  const Vec3& closer = plus_closer ? bp : bm;
  const Vec3& farther = plus_closer ? bm : bp;
  const EigenSystem3 dev_eigen = eigen_sym3(traceless_symmetric_part(t).tensor(), tol);
  out.bisector_error =
      std::max(line_angle(closer, dev_eigen.vectors[0]), line_angle(farther, dev_eigen.vectors[1]));
  out.bisectors_match = out.bisector_error <= 1e-8;
  return out;
}

}  // namespace devitensor
