#pragma once

// Dense three-dimensional tensors of order 0..4.
//
// Coefficients are stored row-major with the first index varying slowest:
// flat(i1, ..., iq) = ((i1 * 3 + i2) * 3 + ...) + iq, indices 0-based.
// Storage is always the full 3^q array, also for symmetric tensors.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "devitensor/error.hpp"
#include "devitensor/tolerances.hpp"

namespace devitensor {

inline constexpr int kDim = 3;
inline constexpr int kMaxOrder = 4;

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;
using Index = std::array<int, kMaxOrder>;

constexpr std::size_t pow3(int q) {
  std::size_t n = 1;
  for (int i = 0; i < q; ++i) n *= 3;
  return n;
}

constexpr int factorial(int q) { return q <= 1 ? 1 : q * factorial(q - 1); }

class DenseTensor {
 public:
  DenseTensor() { coeffs_.fill(0.0); }

  explicit DenseTensor(int order) : order_(order) {
    if (order < 0 || order > kMaxOrder)
      throw Error(ErrorCode::OrderOverflow, "order " + std::to_string(order) + " outside 0..4");
    coeffs_.fill(0.0);
  }

  static DenseTensor scalar(double v) {
    DenseTensor t(0);
    t.coeffs_[0] = v;
    return t;
  }

  static DenseTensor vector(const Vec3& v) {
    DenseTensor t(1);
    std::copy(v.begin(), v.end(), t.coeffs_.begin());
    return t;
  }

  static DenseTensor matrix(const Mat3& m) {
    DenseTensor t(2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t.coeffs_[3 * i + j] = m[i][j];
    return t;
  }

  /// Checked construction from a flat coefficient list of length 3^order.
  static DenseTensor from_coeffs(int order, std::span<const double> values) {
    DenseTensor t(order);
    if (values.size() != t.size())
      throw Error(ErrorCode::DimensionError, "expected " + std::to_string(t.size()) +
                                                 " coefficients, got " + std::to_string(values.size()));
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (!std::isfinite(values[k]))
        throw Error(ErrorCode::NonFinite, "coefficient " + std::to_string(k) + " is not finite");
      t.coeffs_[k] = values[k];
    }
    return t;
  }

  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return pow3(order_); }

  std::span<const double> coeffs() const noexcept { return {coeffs_.data(), size()}; }
  std::span<double> coeffs() noexcept { return {coeffs_.data(), size()}; }

  double operator[](std::size_t flat) const noexcept { return coeffs_[flat]; }
  double& operator[](std::size_t flat) noexcept { return coeffs_[flat]; }

  template <class... I>
  double operator()(I... idx) const noexcept {
    static_assert(sizeof...(I) <= kMaxOrder);
    return coeffs_[flat_index(idx...)];
  }
  template <class... I>
  double& operator()(I... idx) noexcept {
    static_assert(sizeof...(I) <= kMaxOrder);
    return coeffs_[flat_index(idx...)];
  }

  double at(const Index& idx) const noexcept { return coeffs_[flat(idx, order_)]; }
  double& at(const Index& idx) noexcept { return coeffs_[flat(idx, order_)]; }

  static std::size_t flat(const Index& idx, int order) noexcept {
    std::size_t f = 0;
    for (int k = 0; k < order; ++k) f = f * 3 + static_cast<std::size_t>(idx[k]);
    return f;
  }

  static Index unflat(std::size_t f, int order) noexcept {
    Index idx{};
    for (int k = order - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(f % 3);
      f /= 3;
    }
    return idx;
  }

  double norm() const noexcept {
    double s = 0.0;
    for (double c : coeffs()) s += c * c;
    return std::sqrt(s);
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double c : coeffs()) m = std::max(m, std::abs(c));
    return m;
  }

  bool all_finite() const noexcept {
    return std::all_of(coeffs().begin(), coeffs().end(), [](double c) { return std::isfinite(c); });
  }

  DenseTensor& operator+=(const DenseTensor& o) {
    require_same_order(o);
    for (std::size_t k = 0; k < size(); ++k) coeffs_[k] += o.coeffs_[k];
    return *this;
  }
  DenseTensor& operator-=(const DenseTensor& o) {
    require_same_order(o);
    for (std::size_t k = 0; k < size(); ++k) coeffs_[k] -= o.coeffs_[k];
    return *this;
  }
  DenseTensor& operator*=(double s) noexcept {
    for (std::size_t k = 0; k < size(); ++k) coeffs_[k] *= s;
    return *this;
  }
  DenseTensor& operator/=(double s) noexcept { return *this *= (1.0 / s); }

  friend DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
  friend DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
  friend DenseTensor operator-(DenseTensor a) { return a *= -1.0; }
  friend DenseTensor operator*(DenseTensor a, double s) { return a *= s; }
  friend DenseTensor operator*(double s, DenseTensor a) { return a *= s; }
  friend DenseTensor operator/(DenseTensor a, double s) { return a /= s; }

  friend bool operator==(const DenseTensor& a, const DenseTensor& b) {
    return a.order_ == b.order_ && std::equal(a.coeffs().begin(), a.coeffs().end(), b.coeffs().begin());
  }

 private:
  template <class... I>
  static std::size_t flat_index(I... idx) noexcept {
    std::size_t f = 0;
    ((f = f * 3 + static_cast<std::size_t>(idx)), ...);
    return f;
  }

  void require_same_order(const DenseTensor& o) const {
    if (o.order_ != order_)
      throw Error(ErrorCode::DimensionError, "order mismatch " + std::to_string(order_) + " vs " +
                                                 std::to_string(o.order_));
  }

  int order_ = 0;
  std::array<double, 81> coeffs_;
};

// ---------------------------------------------------------------------------
// Small vector helpers

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator-(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline Vec3 normalized(const Vec3& a) { return (1.0 / norm(a)) * a; }

/// Angle between two lines (directions up to sign), in [0, pi/2].
inline double line_angle(const Vec3& a, const Vec3& b) {
  const double c = std::abs(dot(a, b)) / (norm(a) * norm(b));
  const double s = norm(cross(a, b)) / (norm(a) * norm(b));
  return std::atan2(s, c);
}

/// Flip so the largest-magnitude component is positive.
inline Vec3 canonical_sign(const Vec3& a) {
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(a[i]) > std::abs(a[k]) + 1e-12) k = i;
  return a[k] < 0 ? -a : a;
}

inline Vec3 to_vec3(const DenseTensor& v) { return {v[0], v[1], v[2]}; }

inline Mat3 to_mat3(const DenseTensor& t) {
  Mat3 m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = t(i, j);
  return m;
}

// ---------------------------------------------------------------------------
// Constants

inline DenseTensor identity() {
  return DenseTensor::matrix({{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}});
}

inline DenseTensor permutation_tensor() {
  DenseTensor e(3);
  e(0, 1, 2) = e(1, 2, 0) = e(2, 0, 1) = 1.0;
  e(0, 2, 1) = e(2, 1, 0) = e(1, 0, 2) = -1.0;
  return e;
}

/// Rotation by `angle` radians about the unit axis (Rodrigues).
inline DenseTensor rotation_matrix(const Vec3& axis, double angle) {
  const Vec3 k = normalized(axis);
  const double c = std::cos(angle), s = std::sin(angle), v = 1.0 - c;
  return DenseTensor::matrix({{{c + k[0] * k[0] * v, k[0] * k[1] * v - k[2] * s, k[0] * k[2] * v + k[1] * s},
                               {k[1] * k[0] * v + k[2] * s, c + k[1] * k[1] * v, k[1] * k[2] * v - k[0] * s},
                               {k[2] * k[0] * v - k[1] * s, k[2] * k[1] * v + k[0] * s, c + k[2] * k[2] * v}}});
}

/// Householder reflection I - 2 m⊗m across the plane with unit normal m.
inline DenseTensor reflection_matrix(const Vec3& normal) {
  const Vec3 m = normalized(normal);
  DenseTensor q = identity();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) q(i, j) -= 2.0 * m[i] * m[j];
  return q;
}

// ---------------------------------------------------------------------------
// Products and contractions

inline DenseTensor outer_product(const DenseTensor& a, const DenseTensor& b) {
  if (a.order() + b.order() > kMaxOrder)
    throw Error(ErrorCode::OrderOverflow, "outer product of orders " + std::to_string(a.order()) + " and " +
                                              std::to_string(b.order()) + " exceeds 4");
  DenseTensor c(a.order() + b.order());
  const std::size_t nb = b.size();
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < nb; ++j) c[i * nb + j] = a[i] * b[j];
  return c;
}

inline DenseTensor outer_product(const Vec3& a, const Vec3& b) {
  return outer_product(DenseTensor::vector(a), DenseTensor::vector(b));
}

namespace detail {

// Sum over the last `count` indices of a against the first `count` of b.
inline DenseTensor contract(const DenseTensor& a, const DenseTensor& b, int count) {
  if (a.order() < count || b.order() < count)
    throw Error(ErrorCode::OrderUnderflow, "contraction over " + std::to_string(count) +
                                               " indices needs operands of order >= " + std::to_string(count));
  const int order = a.order() + b.order() - 2 * count;
  if (order > kMaxOrder) throw Error(ErrorCode::OrderOverflow, "contraction result order exceeds 4");
  DenseTensor c(order);
  const std::size_t inner = pow3(count);
  const std::size_t na = pow3(a.order() - count);
  const std::size_t nb = pow3(b.order() - count);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < inner; ++k) s += a[i * inner + k] * b[k * nb + j];
      c[i * nb + j] = s;
    }
  return c;
}

}  // namespace detail

/// A · B: sum over the last index of A and the first of B.
inline DenseTensor contract_single(const DenseTensor& a, const DenseTensor& b) {
  return detail::contract(a, b, 1);
}

/// A : B: sum over the last two indices of A and the first two of B.
inline DenseTensor contract_double(const DenseTensor& a, const DenseTensor& b) {
  return detail::contract(a, b, 2);
}

/// Full contraction <A, B> of two tensors of equal order.
inline double inner(const DenseTensor& a, const DenseTensor& b) {
  if (a.order() != b.order()) throw Error(ErrorCode::DimensionError, "inner product of unequal orders");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

/// Contract the index pair (first, second), 0-based. Default is tr_{1,2}.
inline DenseTensor trace(const DenseTensor& t, int first = 0, int second = 1) {
  const int q = t.order();
  if (q < 2) throw Error(ErrorCode::InvalidSlots, "trace needs order >= 2");
  if (first == second || first < 0 || second < 0 || first >= q || second >= q)
    throw Error(ErrorCode::InvalidSlots,
                "invalid slot pair (" + std::to_string(first) + ", " + std::to_string(second) + ")");
  DenseTensor r(q - 2);
  for (std::size_t f = 0; f < r.size(); ++f) {
    const Index rest = DenseTensor::unflat(f, q - 2);
    double s = 0.0;
    for (int m = 0; m < 3; ++m) {
      Index full{};
      int p = 0;
      for (int k = 0; k < q; ++k) full[k] = (k == first || k == second) ? m : rest[p++];
      s += t.at(full);
    }
    r[f] = s;
  }
  return r;
}

inline double determinant(const DenseTensor& t) {
  if (t.order() != 2) throw Error(ErrorCode::DimensionError, "determinant needs order 2");
  return t(0, 0) * (t(1, 1) * t(2, 2) - t(1, 2) * t(2, 1)) - t(0, 1) * (t(1, 0) * t(2, 2) - t(1, 2) * t(2, 0)) +
         t(0, 2) * (t(1, 0) * t(2, 1) - t(1, 1) * t(2, 0));
}

inline DenseTensor transpose(const DenseTensor& t) {
  if (t.order() != 2) throw Error(ErrorCode::DimensionError, "transpose needs order 2");
  DenseTensor r(2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = t(j, i);
  return r;
}

/// Matrix product of two order-2 tensors (single contraction).
inline DenseTensor matmul(const DenseTensor& a, const DenseTensor& b) { return contract_single(a, b); }

inline Vec3 apply(const DenseTensor& m, const Vec3& v) {
  return {m(0, 0) * v[0] + m(0, 1) * v[1] + m(0, 2) * v[2], m(1, 0) * v[0] + m(1, 1) * v[1] + m(1, 2) * v[2],
          m(2, 0) * v[0] + m(2, 1) * v[1] + m(2, 2) * v[2]};
}

// ---------------------------------------------------------------------------
// Index permutations and symmetrization

/// All q! permutations of (0, ..., q-1), identity first.
inline std::vector<std::array<int, kMaxOrder>> permutations(int q) {
  std::array<int, kMaxOrder> p{0, 1, 2, 3};
  std::vector<std::array<int, kMaxOrder>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.begin() + q));
  return out;
}

/// (πT)_{i_{π(1)} ... i_{π(q)}} = T_{i_1 ... i_q}.
inline DenseTensor permute(const DenseTensor& t, const std::array<int, kMaxOrder>& perm) {
  const int q = t.order();
  DenseTensor r(q);
  for (std::size_t f = 0; f < t.size(); ++f) {
    const Index idx = DenseTensor::unflat(f, q);
    Index dst{};
    for (int k = 0; k < q; ++k) dst[perm[k]] = idx[k];
    r.at(dst) = t[f];
  }
  return r;
}

/// Totally symmetric part sT = (1/q!) Σ_π πT.
inline DenseTensor symmetrize(const DenseTensor& t) {
  const int q = t.order();
  if (q < 2) return t;
  DenseTensor r(q);
  for (std::size_t f = 0; f < t.size(); ++f) {
    Index idx = DenseTensor::unflat(f, q);
    std::sort(idx.begin(), idx.begin() + q);
    double s = 0.0;
    int n = 0;
    do {
      s += t.at(idx);
      ++n;
    } while (std::next_permutation(idx.begin(), idx.begin() + q));
    // n distinct arrangements of the multiset; averaging over them equals the
    // q!-average since each arrangement occurs q!/n times.
    r[f] = s / n;
  }
  return r;
}

/// max |πT - T| over all permutations.
inline double symmetry_residual(const DenseTensor& t) {
  const DenseTensor s = symmetrize(t);
  return (t - s).max_abs();
}

/// Largest coefficient of any pairwise trace.
inline double trace_residual(const DenseTensor& t) {
  double r = 0.0;
  for (int a = 0; a < t.order(); ++a)
    for (int b = a + 1; b < t.order(); ++b) r = std::max(r, trace(t, a, b).max_abs());
  return r;
}

/// s(I ⊗ T): totally symmetric part of δ_{i1 i2} T_{i3 ...}.
inline DenseTensor sym_identity_product(const DenseTensor& t) { return symmetrize(outer_product(identity(), t)); }

// ---------------------------------------------------------------------------
// Deviators

/// Totally symmetric, traceless tensor. Construction validates both properties.
class Deviator {
 public:
  Deviator() : t_(0) {}

  /// Validates relative to `scale` (defaults to ‖t‖).
  static Deviator from(const DenseTensor& t, const Tolerances& tol = {}, double scale = -1.0) {
    const double ref = scale >= 0.0 ? scale : t.norm();
    const double sym_limit = tol.sym * std::max(ref, 1e-300);
    const double tr_limit = tol.trace * std::max(ref, 1e-300);
    if (!t.all_finite()) throw Error(ErrorCode::NonFinite, "deviator has non-finite coefficients");
    const double rs = symmetry_residual(t);
    if (rs > sym_limit && ref > 0)
      throw Error(ErrorCode::NotTotallySymmetric, "symmetry residual " + std::to_string(rs));
    if (t.order() >= 2) {
      const double rt = trace_residual(t);
      if (rt > tr_limit && ref > 0) throw Error(ErrorCode::NotTraceless, "trace residual " + std::to_string(rt));
    }
    return Deviator(t);
  }

  static Deviator zero(int order) { return Deviator(DenseTensor(order)); }

  const DenseTensor& tensor() const noexcept { return t_; }
  int order() const noexcept { return t_.order(); }
  double norm() const noexcept { return t_.norm(); }

 private:
  explicit Deviator(DenseTensor t) : t_(std::move(t)) {}
  friend Deviator traceless_symmetric_part(const DenseTensor&);
  DenseTensor t_;
};

/// ⌊T⌋: symmetrize, then subtract the isotropic-times-trace terms.
///
/// Coefficients follow from requiring every trace to vanish, using
/// tr s(I⊗v) = 5/3 v (order 3), tr s(I⊗A) = (7 A + tr(A) I)/6 and
/// tr s(I⊗I) = 5/3 I (order 4):
///   q = 2: S - tr(S)/3 I
///   q = 3: S - 3/5 s(I ⊗ tr S)
///   q = 4: S - 6/7 s(I ⊗ tr S) + 3/35 tr(tr S) s(I ⊗ I)
inline Deviator traceless_symmetric_part(const DenseTensor& t) {
  const DenseTensor s = symmetrize(t);
  switch (s.order()) {
    case 0:
    case 1:
      return Deviator(s);
    case 2:
      return Deviator(s - (trace(s)[0] / 3.0) * identity());
    case 3:
      return Deviator(s - 0.6 * sym_identity_product(trace(s)));
    default: {
      const DenseTensor a = trace(s);
      const double aa = trace(a)[0];
      return Deviator(s - (6.0 / 7.0) * sym_identity_product(a) +
                      (3.0 * aa / 35.0) * sym_identity_product(identity()));
    }
  }
}

/// ⌊n1 ⊗ ... ⊗ nq⌋ for unit (or arbitrary) vectors.
inline Deviator traceless_outer(std::span<const Vec3> dirs) {
  DenseTensor t = DenseTensor::scalar(1.0);
  for (const Vec3& d : dirs) t = outer_product(t, DenseTensor::vector(d));
  return traceless_symmetric_part(t);
}

// ---------------------------------------------------------------------------
// Basis change

inline double orthogonality_residual(const DenseTensor& q) {
  return (matmul(transpose(q), q) - identity()).max_abs();
}

/// Active rotation T'_{i1..iq} = Q_{i1 j1} ... Q_{iq jq} T_{j1..jq}.
inline DenseTensor rotate(const DenseTensor& t, const DenseTensor& q, double tol_orth = Tolerances{}.orth) {
  if (q.order() != 2) throw Error(ErrorCode::DimensionError, "rotation must be order 2");
  const double r = orthogonality_residual(q);
  if (r > tol_orth) throw Error(ErrorCode::NotOrthogonal, "|QᵀQ - I| = " + std::to_string(r));
  DenseTensor cur = t;
  const int order = t.order();
  for (int mode = 0; mode < order; ++mode) {
    DenseTensor next(order);
    const std::size_t stride = pow3(order - mode - 1);
    for (std::size_t f = 0; f < cur.size(); ++f) {
      const int i = static_cast<int>((f / stride) % 3);
      const std::size_t base = f - static_cast<std::size_t>(i) * stride;
      next[f] = q(i, 0) * cur[base] + q(i, 1) * cur[base + stride] + q(i, 2) * cur[base + 2 * stride];
    }
    cur = next;
  }
  return cur;
}

inline Deviator rotate(const Deviator& d, const DenseTensor& q) {
  return Deviator::from(rotate(d.tensor(), q), {}, d.norm());
}

}  // namespace devitensor
