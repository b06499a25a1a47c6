#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include "flr/errors.hpp"

namespace flr {

inline constexpr int kMaxDim = 16;

// Dense row-major matrix with fixed capacity kMaxDim x kMaxDim.
template <typename T>
class SmallMatrix {
 public:
  SmallMatrix() = default;
  SmallMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    assert(rows >= 0 && rows <= kMaxDim && cols >= 0 && cols <= kMaxDim);
    data_.fill(T(0));
  }

  static SmallMatrix identity(int n) {
    SmallMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }

  T& operator()(int r, int c) noexcept { return data_[static_cast<std::size_t>(r * kMaxDim + c)]; }
  T operator()(int r, int c) const noexcept {
    return data_[static_cast<std::size_t>(r * kMaxDim + c)];
  }

  SmallMatrix block(int r0, int c0, int nr, int nc) const {
    SmallMatrix out(nr, nc);
    for (int r = 0; r < nr; ++r)
      for (int c = 0; c < nc; ++c) out(r, c) = (*this)(r0 + r, c0 + c);
    return out;
  }

  void set_block(int r0, int c0, const SmallMatrix& b) {
    for (int r = 0; r < b.rows(); ++r)
      for (int c = 0; c < b.cols(); ++c) (*this)(r0 + r, c0 + c) = b(r, c);
  }

  template <typename U>
  SmallMatrix<U> cast() const {
    SmallMatrix<U> out(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) out(r, c) = static_cast<U>((*this)(r, c));
    return out;
  }

  friend SmallMatrix operator*(const SmallMatrix& a, const SmallMatrix& b) {
    assert(a.cols_ == b.rows_);
    SmallMatrix out(a.rows_, b.cols_);
    for (int r = 0; r < a.rows_; ++r)
      for (int k = 0; k < a.cols_; ++k) {
        const T v = a(r, k);
        for (int c = 0; c < b.cols_; ++c) out(r, c) += v * b(k, c);
      }
    return out;
  }
  friend SmallMatrix operator+(SmallMatrix a, const SmallMatrix& b) {
    for (int r = 0; r < a.rows_; ++r)
      for (int c = 0; c < a.cols_; ++c) a(r, c) += b(r, c);
    return a;
  }
  friend SmallMatrix operator-(SmallMatrix a, const SmallMatrix& b) {
    for (int r = 0; r < a.rows_; ++r)
      for (int c = 0; c < a.cols_; ++c) a(r, c) -= b(r, c);
    return a;
  }
  SmallMatrix operator-() const {
    SmallMatrix out(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) out(r, c) = -(*this)(r, c);
    return out;
  }

  // Max-row-sum norm.
  T norm_inf() const {
    T best = 0;
    for (int r = 0; r < rows_; ++r) {
      T s = 0;
      for (int c = 0; c < cols_; ++c) s += std::abs((*this)(r, c));
      if (s > best) best = s;
    }
    return best;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::array<T, kMaxDim * kMaxDim> data_{};
};

template <typename T>
constexpr T default_pivot_tolerance() {
  return T(64) * std::numeric_limits<T>::epsilon();
}

namespace detail {

template <typename T>
SmallMatrix<T> block_inverse_rec(const SmallMatrix<T>& m, T pivot_threshold) {
  const int n = m.rows();
  if (n == 1) {
    const T a = m(0, 0);
    if (!(std::abs(a) > pivot_threshold) || !std::isfinite(a))
      throw SingularMatrix("block_inverse: zero pivot");
    SmallMatrix<T> out(1, 1);
    out(0, 0) = T(1) / a;
    return out;
  }
  const int k = n / 2;
  const SmallMatrix<T> a = m.block(0, 0, k, k);
  const SmallMatrix<T> b = m.block(0, k, k, n - k);
  const SmallMatrix<T> c = m.block(k, 0, n - k, k);
  const SmallMatrix<T> d = m.block(k, k, n - k, n - k);

  const SmallMatrix<T> a_inv = block_inverse_rec(a, pivot_threshold);
  const SmallMatrix<T> ca_inv = c * a_inv;
  const SmallMatrix<T> a_inv_b = a_inv * b;
  const SmallMatrix<T> schur_inv = block_inverse_rec(d - ca_inv * b, pivot_threshold);
  const SmallMatrix<T> upper_right = -(a_inv_b * schur_inv);

  SmallMatrix<T> out(n, n);
  out.set_block(0, 0, a_inv - upper_right * ca_inv);
  out.set_block(0, k, upper_right);
  out.set_block(k, 0, -(schur_inv * ca_inv));
  out.set_block(k, k, schur_inv);
  return out;
}

}  // namespace detail

// Inverse by recursive 2x2 block partition split at floor(n/2). A pivot with
// |p| <= rel_tol * max|diag(m)| raises SingularMatrix.
template <typename T>
SmallMatrix<T> block_inverse(const SmallMatrix<T>& m, T rel_tol = default_pivot_tolerance<T>()) {
  if (m.rows() != m.cols() || m.rows() < 1) throw NumericalError("block_inverse: need a square matrix");
  T scale = 0;
  for (int i = 0; i < m.rows(); ++i) scale = std::max(scale, std::abs(m(i, i)));
  return detail::block_inverse_rec(m, rel_tol * scale);
}

// Windowed moments with the bias channel first: xtx is (Q+1)x(Q+1),
// xty is (Q+1)x3.
struct MomentPair {
  SmallMatrix<double> xtx;
  SmallMatrix<double> xty;

  int guide_count() const noexcept { return xtx.rows() - 1; }
  double mass() const noexcept { return xtx(0, 0); }
};

// Raw-space affine map: y_c = A[0][c] + sum_j x_j A[j+1][c].
class AffineModel {
 public:
  AffineModel() = default;
  explicit AffineModel(int guide_count) : guides_(guide_count) { coeff_.fill(0.0f); }

  int guide_count() const noexcept { return guides_; }
  float& operator()(int row, int c) noexcept { return coeff_[static_cast<std::size_t>(row * 3 + c)]; }
  float operator()(int row, int c) const noexcept {
    return coeff_[static_cast<std::size_t>(row * 3 + c)];
  }
  std::span<const float> coefficients() const noexcept {
    return {coeff_.data(), static_cast<std::size_t>((guides_ + 1) * 3)};
  }
  std::span<float> coefficients() noexcept {
    return {coeff_.data(), static_cast<std::size_t>((guides_ + 1) * 3)};
  }

  std::array<float, 3> apply(std::span<const float> x) const noexcept {
    std::array<float, 3> y{(*this)(0, 0), (*this)(0, 1), (*this)(0, 2)};
    for (int j = 0; j < guides_; ++j) {
      const float g = x[static_cast<std::size_t>(j)];
      for (int c = 0; c < 3; ++c) y[static_cast<std::size_t>(c)] += g * (*this)(j + 1, c);
    }
    return y;
  }

  bool finite() const noexcept {
    for (float v : coefficients())
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  int guides_ = 0;
  std::array<float, kMaxDim * 3> coeff_{};
};

inline constexpr double kDefaultEpsAdd = 1e-5;
inline constexpr double kDefaultEpsMul = 1e-4;
inline constexpr double kVarianceFloor = 1e-12;

struct NormalizedMoments {
  SmallMatrix<double> c_hat;  // Q x Q regularized correlation
  SmallMatrix<double> b_hat;  // Q x 3
  std::array<double, kMaxDim> mu_x{};
  std::array<double, 3> mu_y{};
  std::array<double, kMaxDim> sigma_hat{};
};

NormalizedMoments normalize_moments(const MomentPair& mp, double eps_add, double eps_mul);

// Normalized-moment solve, denormalized into one raw-space model.
AffineModel solve_model(const MomentPair& mp, double eps_add = kDefaultEpsAdd,
                        double eps_mul = kDefaultEpsMul);

// (XtX + eps I)^-1 XtY, no normalization.
AffineModel solve_tikhonov(const MomentPair& mp, double eps);

// Outer-product moments of a set of samples; `guides` holds Q values per
// sample (row-major), `y` 3 per sample.
MomentPair moments_from_samples(std::span<const double> guides, std::span<const double> y,
                                std::span<const double> weights, int guide_count);

}  // namespace flr
