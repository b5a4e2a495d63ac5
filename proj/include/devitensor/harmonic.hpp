#pragma once

// Totally symmetric tensors as homogeneous polynomials, and their splitting
// into deviators (harmonic parts) of orders q, q-2, ...

#include <array>
#include <vector>

#include "devitensor/tensor.hpp"

namespace devitensor {

struct Monomial {
  int e1 = 0, e2 = 0, e3 = 0;  // r1^e1 r2^e2 r3^e3
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Monomials of degree q, ordered by descending e1 then descending e2.
inline std::vector<Monomial> monomials(int q) {
  std::vector<Monomial> out;
  for (int a = q; a >= 0; --a)
    for (int b = q - a; b >= 0; --b) out.push_back({a, b, q - a - b});
  return out;
}

inline std::size_t monomial_position(const Monomial& m, int q) {
  // Block for e1 = a starts after all blocks with larger e1.
  std::size_t pos = 0;
  for (int a = q; a > m.e1; --a) pos += static_cast<std::size_t>(q - a + 1);
  return pos + static_cast<std::size_t>(q - m.e1 - m.e2);
}

inline int multinomial(const Monomial& m) {
  return factorial(m.e1 + m.e2 + m.e3) / (factorial(m.e1) * factorial(m.e2) * factorial(m.e3));
}

/// Homogeneous polynomial of degree q in (r1, r2, r3). The coefficient of a
/// monomial is the sum of the tensor entries over all index tuples producing
/// it, so evaluation is a plain dot product with the monomial values.
class HomogeneousPolynomial {
 public:
  explicit HomogeneousPolynomial(int degree = 0)
      : degree_(degree), coeffs_(static_cast<std::size_t>((degree + 1) * (degree + 2) / 2), 0.0) {}

  int degree() const noexcept { return degree_; }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  std::vector<double>& coeffs() noexcept { return coeffs_; }

  double coeff(const Monomial& m) const { return coeffs_[monomial_position(m, degree_)]; }
  double& coeff(const Monomial& m) { return coeffs_[monomial_position(m, degree_)]; }

  double operator()(const Vec3& r) const {
    double s = 0.0;
    const auto ms = monomials(degree_);
    for (std::size_t k = 0; k < ms.size(); ++k)
      s += coeffs_[k] * std::pow(r[0], ms[k].e1) * std::pow(r[1], ms[k].e2) * std::pow(r[2], ms[k].e3);
    return s;
  }

  HomogeneousPolynomial laplacian() const {
    if (degree_ < 2) return HomogeneousPolynomial(0);
    HomogeneousPolynomial out(degree_ - 2);
    const auto ms = monomials(degree_);
    for (std::size_t k = 0; k < ms.size(); ++k) {
      const auto [a, b, c] = ms[k];
      if (a >= 2) out.coeff({a - 2, b, c}) += a * (a - 1) * coeffs_[k];
      if (b >= 2) out.coeff({a, b - 2, c}) += b * (b - 1) * coeffs_[k];
      if (c >= 2) out.coeff({a, b, c - 2}) += c * (c - 1) * coeffs_[k];
    }
    return out;
  }

  double max_abs() const {
    double m = 0.0;
    for (double c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

 private:
  int degree_;
  std::vector<double> coeffs_;
};

namespace detail {

inline Monomial index_counts(const Index& idx, int q) {
  Monomial m;
  for (int k = 0; k < q; ++k) {
    if (idx[k] == 0) ++m.e1;
    else if (idx[k] == 1) ++m.e2;
    else ++m.e3;
  }
  return m;
}

}  // namespace detail

/// T(r) = T_{i1..iq} r_{i1} ... r_{iq}; depends only on symmetrize(T).
inline HomogeneousPolynomial generate_polynomial(const DenseTensor& t) {
  const int q = t.order();
  HomogeneousPolynomial p(q);
  for (std::size_t f = 0; f < t.size(); ++f) p.coeff(detail::index_counts(DenseTensor::unflat(f, q), q)) += t[f];
  return p;
}

/// S_{i1..iq} = (1/q!) ∂_{i1} ... ∂_{iq} P(r).
inline DenseTensor symmetric_from_polynomial(const HomogeneousPolynomial& p) {
  const int q = p.degree();
  if (q > kMaxOrder) throw Error(ErrorCode::OrderOverflow, "polynomial degree exceeds 4");
  DenseTensor s(q);
  for (std::size_t f = 0; f < s.size(); ++f) {
    const Monomial m = detail::index_counts(DenseTensor::unflat(f, q), q);
    s[f] = p.coeff(m) / multinomial(m);
  }
  return s;
}

/// S = H(q) + s(I H(q-2)) + s(I I H(q-4)) + ...; parts[0] has order q.
struct HarmonicDecomposition {
  std::vector<Deviator> parts;

  DenseTensor reconstruct() const {
    const int q = parts.front().order();
    DenseTensor s(q);
    for (std::size_t k = 0; k < parts.size(); ++k) {
      DenseTensor term = parts[k].tensor();
      for (std::size_t j = 0; j < k; ++j) term = outer_product(identity(), term);
      s += symmetrize(term);
    }
    return s;
  }
};

/// Lower parts from the traces of S (same identities as
/// traceless_symmetric_part): q=2: h0 = tr S / 3; q=3: h1 = 3/5 tr S;
/// q=4: h0 = tr tr S / 5, H2 = 6/7 dev(tr S). The top part is the remainder.
inline HarmonicDecomposition harmonic_decompose(const DenseTensor& s, const Tolerances& tol = {}) {
  const double scale = s.norm();
  const double rs = symmetry_residual(s);
  if (rs > tol.sym * scale && scale > 0)
    throw Error(ErrorCode::NotTotallySymmetric, "symmetry residual " + std::to_string(rs));
  const DenseTensor sym = symmetrize(s);
  HarmonicDecomposition out;
  switch (sym.order()) {
    case 0:
    case 1:
      out.parts = {Deviator::from(sym, tol)};
      break;
    case 2: {
      const double h0 = trace(sym)[0] / 3.0;
      out.parts = {Deviator::from(sym - h0 * identity(), tol, scale), Deviator::from(DenseTensor::scalar(h0), tol)};
      break;
    }
    case 3: {
      const DenseTensor h1 = 0.6 * trace(sym);
      out.parts = {Deviator::from(sym - sym_identity_product(h1), tol, scale), Deviator::from(h1, tol)};
      break;
    }
    default: {
      const DenseTensor a = trace(sym);
      const double h0 = trace(a)[0] / 5.0;
      const DenseTensor h2 = (6.0 / 7.0) * (a - (trace(a)[0] / 3.0) * identity());
      const DenseTensor h4 = sym - sym_identity_product(h2) - h0 * sym_identity_product(identity());
      out.parts = {Deviator::from(h4, tol, scale), Deviator::from(h2, tol, scale),
                   Deviator::from(DenseTensor::scalar(h0), tol)};
      break;
    }
  }
  return out;
}

}  // namespace devitensor
