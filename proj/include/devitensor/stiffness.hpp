#pragma once

// Deviatoric decomposition of stiffness tensors (minor + major symmetric,
// order 4) into Lamé scalars, two second-order deviators and one fourth-order
// deviator, plus the isomorphism φ between symmetric second-order tensors
// and asymmetric fourth-order tensors.

#include <array>
#include <cmath>
#include <string>

#include "devitensor/harmonic.hpp"
#include "devitensor/spectral.hpp"

namespace devitensor {

class StiffnessTensor {
 public:
  /// Accepts symmetry residuals up to tol.stiffness_accept·‖C‖ by projecting
  /// onto the minor+major symmetric subspace; larger residuals throw.
  static StiffnessTensor from(const DenseTensor& c, const Tolerances& tol = {}) {
    if (c.order() != 4) throw Error(ErrorCode::DimensionError, "stiffness tensor must be order 4");
    if (!c.all_finite()) throw Error(ErrorCode::NonFinite, "stiffness tensor has non-finite coefficients");
    const auto rep = stiffness_symmetry_residual(c);
    StiffnessTensor s;
    s.residual_ = rep.residual;
    if (rep.residual == 0.0) {
      s.c_ = c;
      return s;
    }
    detail::require_stiffness_symmetry(c, tol.stiffness_accept);
    s.c_ = DenseTensor(4);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l)
            s.c_(i, j, k, l) = (c(i, j, k, l) + c(j, i, k, l) + c(i, j, l, k) + c(j, i, l, k) + c(k, l, i, j) +
                                c(l, k, i, j) + c(k, l, j, i) + c(l, k, j, i)) /
                               8.0;
    s.symmetrized_ = true;
    return s;
  }

  const DenseTensor& tensor() const noexcept { return c_; }
  double norm() const noexcept { return c_.norm(); }
  bool was_symmetrized() const noexcept { return symmetrized_; }
  double input_residual() const noexcept { return residual_; }

 private:
  DenseTensor c_{4};
  bool symmetrized_ = false;
  double residual_ = 0.0;
};

/// λ δ_ij δ_kl + μ (δ_ik δ_jl + δ_il δ_jk).
inline DenseTensor isotropic_stiffness(double lambda, double mu) {
  DenseTensor c(4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          c(i, j, k, l) = lambda * (i == j) * (k == l) + mu * ((i == k) * (j == l) + (i == l) * (j == k));
  return c;
}

// ---------------------------------------------------------------------------
// Symmetric / asymmetric split and φ

struct SymAsymSplit {
  DenseTensor S{4};  // totally symmetric part
  DenseTensor A{4};  // C - S
};

inline SymAsymSplit split_sym_asym(const StiffnessTensor& c) {
  SymAsymSplit out;
  out.S = symmetrize(c.tensor());
  out.A = c.tensor() - out.S;
  return out;
}

/// For minor+major symmetric C the 24-term average reduces to three terms.
inline DenseTensor symmetric_part_three_term(const DenseTensor& c) {
  DenseTensor s(4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) s(i, j, k, l) = (c(i, j, k, l) + c(i, k, l, j) + c(i, l, j, k)) / 3.0;
  return s;
}

/// φ(R)_ijkl = δ_ij R_kl + δ_kl R_ij - ½(δ_ik R_jl + δ_jl R_ik + δ_il R_jk + δ_jk R_il).
inline DenseTensor phi(const DenseTensor& r) {
  if (r.order() != 2) throw Error(ErrorCode::DimensionError, "phi needs a second-order tensor");
  DenseTensor out(4);
  auto dl = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          out(i, j, k, l) = dl(i, j) * r(k, l) + dl(k, l) * r(i, j) -
                            0.5 * (dl(i, k) * r(j, l) + dl(j, l) * r(i, k) + dl(i, l) * r(j, k) + dl(j, k) * r(i, l));
  return out;
}

/// R_ij = A_ijll/(n-2) - δ_ij A_kkll / (2(n-1)(n-2)) with n = 3. Throws
/// NotInImage when φ(R) does not return A.
inline DenseTensor phi_inverse(const DenseTensor& a, const Tolerances& tol = {}) {
  if (a.order() != 4) throw Error(ErrorCode::DimensionError, "phi_inverse needs an order-4 tensor");
  const DenseTensor all = trace(a, 2, 3);
  const double akkll = trace(all)[0];
  DenseTensor r = all - (akkll / 4.0) * identity();
  const double res = (phi(r) - a).norm();
  if (res > tol.sym * std::max(a.norm(), 1e-300) && res > 0.0)
    throw Error(ErrorCode::NotInImage, "tensor is not in the image of phi (residual " + std::to_string(res) + ")");
  return r;
}

// ---------------------------------------------------------------------------
// Decomposition

/// Backus form: C = 𝒟 + 6 s(I D1) + 3 s(I I) d + φ(D2) + ½ φ(I) d̂.
struct BackusForm {
  double d = 0.0;
  double dhat = 0.0;
  Deviator D1 = Deviator::zero(2);
  Deviator D2 = Deviator::zero(2);
  Deviator D4 = Deviator::zero(4);
};

/// Lamé scalars and the two second-order deviators in engineering form:
/// C = λ δδ + μ(δδ + δδ) + δ_ij D_kl + δ_kl D_ij
///     + δ_ik D̂_jl + δ_il D̂_jk + δ_jk D̂_il + δ_jl D̂_ik + 𝒟.
/// Related to the Backus form by d = (λ+2μ)/3, d̂ = 2(λ-μ)/3,
/// D1 = (D + 2D̂)/3, D2 = 2(D - D̂)/3.
struct StiffnessDecomposition {
  double lambda = 0.0;
  double mu = 0.0;
  Deviator D = Deviator::zero(2);
  Deviator Dhat = Deviator::zero(2);
  Deviator D4 = Deviator::zero(4);

  BackusForm backus() const {
    BackusForm b;
    b.d = (lambda + 2.0 * mu) / 3.0;
    b.dhat = 2.0 * (lambda - mu) / 3.0;
    b.D1 = traceless_symmetric_part((D.tensor() + 2.0 * Dhat.tensor()) / 3.0);
    b.D2 = traceless_symmetric_part(2.0 * (D.tensor() - Dhat.tensor()) / 3.0);
    b.D4 = D4;
    return b;
  }

  static StiffnessDecomposition from_backus(const BackusForm& b) {
    StiffnessDecomposition s;
    s.lambda = b.d + b.dhat;
    s.mu = b.d - 0.5 * b.dhat;
    s.D = traceless_symmetric_part(b.D1.tensor() + b.D2.tensor());
    s.Dhat = traceless_symmetric_part(b.D1.tensor() - 0.5 * b.D2.tensor());
    s.D4 = b.D4;
    return s;
  }
};

/// The five mutually orthogonal terms 𝒟, 6 s(I D1), 3 s(I I) d, φ(D2), ½ φ(I) d̂.
inline std::array<DenseTensor, 5> deviatoric_parts(const StiffnessDecomposition& dec) {
  const BackusForm b = dec.backus();
  return {b.D4.tensor(), 6.0 * sym_identity_product(b.D1.tensor()),
          3.0 * b.d * sym_identity_product(identity()), phi(b.D2.tensor()), 0.5 * b.dhat * phi(identity())};
}

inline DenseTensor reconstruct_stiffness(const StiffnessDecomposition& dec) {
  DenseTensor c(4);
  for (const DenseTensor& part : deviatoric_parts(dec)) c += part;
  return c;
}

namespace detail {

// δ_ij X_kl + δ_kl X_ij + δ_ik Y_jl + δ_il Y_jk + δ_jk Y_il + δ_jl Y_ik
inline DenseTensor second_order_terms(const DenseTensor& x, const DenseTensor& y) {
  DenseTensor out(4);
  auto dl = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          out(i, j, k, l) = dl(i, j) * x(k, l) + dl(k, l) * x(i, j) + dl(i, k) * y(j, l) + dl(i, l) * y(j, k) +
                            dl(j, k) * y(i, l) + dl(j, l) * y(i, k);
  return out;
}

}  // namespace detail

/// C written out term by term in the engineering form (used to cross-check
/// reconstruct_stiffness).
inline DenseTensor engineering_expansion(const StiffnessDecomposition& dec) {
  return isotropic_stiffness(dec.lambda, dec.mu) + detail::second_order_terms(dec.D.tensor(), dec.Dhat.tensor()) +
         dec.D4.tensor();
}

/// λ = (2 C_iikk - C_ikik)/15, μ = (3 C_ikik - C_iikk)/30,
/// D = 5/7 dev(C_kkij) - 4/7 dev(C_kikj), D̂ = 3/7 dev(C_kikj) - 2/7 dev(C_kkij),
/// 𝒟 = C minus everything else. The 5/7, 4/7, 3/7, 2/7 weights invert the
/// trace map (X, Y) -> (3X + 4Y, 2X + 5Y) of the second-order terms.
inline StiffnessDecomposition decompose_stiffness(const StiffnessTensor& stiff, const Tolerances& tol = {}) {
  const DenseTensor& c = stiff.tensor();
  const DenseTensor p = trace(c, 0, 1);  // C_kkij
  const DenseTensor q = trace(c, 0, 2);  // C_kikj
  const double ciikk = trace(p)[0];
  const double cikik = trace(q)[0];

  StiffnessDecomposition out;
  out.lambda = (2.0 * ciikk - cikik) / 15.0;
  out.mu = (3.0 * cikik - ciikk) / 30.0;
  const DenseTensor pdev = p - (ciikk / 3.0) * identity();
  const DenseTensor qdev = q - (cikik / 3.0) * identity();
  const double scale = std::max(c.norm(), 1e-300);
  out.D = Deviator::from((5.0 / 7.0) * pdev - (4.0 / 7.0) * qdev, tol, scale);
  out.Dhat = Deviator::from((3.0 / 7.0) * qdev - (2.0 / 7.0) * pdev, tol, scale);
  const DenseTensor rest = c - isotropic_stiffness(out.lambda, out.mu) -
                           detail::second_order_terms(out.D.tensor(), out.Dhat.tensor());
  out.D4 = Deviator::from(rest, tol, scale);
  return out;
}

/// Independent route: harmonic decomposition of S = sC gives 𝒟, D1 and d;
/// φ⁻¹(C - S) = R gives D2 = dev(R) and d̂ = 2 tr(R)/3.
inline StiffnessDecomposition decompose_stiffness_harmonic(const StiffnessTensor& stiff,
                                                          const Tolerances& tol = {}) {
  const auto [s, a] = split_sym_asym(stiff);
  const HarmonicDecomposition h = harmonic_decompose(s, tol);
  const DenseTensor r = phi_inverse(a, tol);
  const double scale = std::max(stiff.norm(), 1e-300);
  BackusForm b;
  b.D4 = h.parts[0];
  b.D1 = Deviator::from(h.parts[1].tensor() / 6.0, tol, scale);
  b.d = h.parts[2].tensor()[0] / 3.0;
  b.D2 = traceless_symmetric_part(r);
  b.dhat = 2.0 * trace(r)[0] / 3.0;
  return StiffnessDecomposition::from_backus(b);
}

/// 1/E(d) = (λ + 2μ) + 6 D1 : (d⊗d) + (d⊗d) : 𝒟 : (d⊗d), E^RI = 1/(λ + 2μ).
///
/// With D1 the Backus second-order deviator this equals d⊗d : C : d⊗d, the
/// longitudinal stiffness along d; for isotropic C it gives 1/(λ + 2μ), which
/// is not the classical Young's modulus μ(3λ+2μ)/(λ+μ).
inline double youngs_modulus(const StiffnessDecomposition& dec, const Vec3& dir) {
  if (std::abs(norm(dir) - 1.0) > 1e-8) throw Error(ErrorCode::DimensionError, "direction must be a unit vector");
  const BackusForm b = dec.backus();
  const DenseTensor dd = outer_product(dir, dir);
  const double inv = dec.lambda + 2.0 * dec.mu + 6.0 * inner(b.D1.tensor(), dd) +
                     inner(dd, contract_double(dec.D4.tensor(), dd));
  if (!(inv > 0.0))
    throw Error(ErrorCode::NonPositiveCompliance, "1/E(d) = " + std::to_string(inv) + " is not positive");
  return 1.0 / inv;
}

inline StiffnessDecomposition rotate(const StiffnessDecomposition& dec, const DenseTensor& q) {
  StiffnessDecomposition out = dec;
  out.D = rotate(dec.D, q);
  out.Dhat = rotate(dec.Dhat, q);
  out.D4 = rotate(dec.D4, q);
  return out;
}

}  // namespace devitensor
