#include "doctest.h"
#include "flr/solver.hpp"
#include "test_support.hpp"

using namespace flr;

namespace {

// Gauss-Jordan with partial pivoting; independent of block_inverse.
std::vector<std::vector<double>> solve_oracle(std::vector<std::vector<double>> a,
                                              std::vector<std::vector<double>> b) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b[0].size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (int c = 0; c < n; ++c) a[r][c] -= f * a[col][c];
      for (int c = 0; c < m; ++c) b[r][c] -= f * b[col][c];
    }
  }
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < m; ++c) b[r][c] /= a[r][r];
  return b;
}

struct Samples {
  std::vector<double> x, y, w;
  int q;
};

Samples random_samples(int n, int q, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  Samples s{{}, {}, {}, q};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < q; ++j) s.x.push_back(u(rng));
    for (int c = 0; c < 3; ++c) s.y.push_back(u(rng));
    s.w.push_back(0.2 + u(rng));
  }
  return s;
}

}  // namespace

TEST_CASE("block inverse on a known matrix") {
  SmallMatrix<double> m(2, 2);
  m(0, 0) = 4, m(0, 1) = 1, m(1, 0) = 2, m(1, 1) = 3;
  const auto inv = block_inverse(m);
  CHECK(inv(0, 0) == doctest::Approx(0.3));
  CHECK(inv(0, 1) == doctest::Approx(-0.1));
  CHECK(inv(1, 0) == doctest::Approx(-0.2));
  CHECK(inv(1, 1) == doctest::Approx(0.4));
}

TEST_CASE("block inverse of odd sizes up to 16") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n : {1, 3, 5, 7, 9, 13, 16}) {
    SmallMatrix<double> a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = u(rng) + (i == j ? n : 0);
    const auto err = (a * block_inverse(a) - SmallMatrix<double>::identity(n)).norm_inf();
    CHECK(err < 1e-12);
  }
}

TEST_CASE("block inverse flags singular input") {
  SmallMatrix<double> m(2, 2);
  m(0, 0) = 1, m(0, 1) = 2, m(1, 0) = 2, m(1, 1) = 4;
  CHECK_THROWS_AS(block_inverse(m), SingularMatrix);
  CHECK_THROWS_AS(block_inverse(SmallMatrix<double>(2, 3)), NumericalError);
  SmallMatrix<float> z(3, 3);
  CHECK_THROWS_AS(block_inverse(z), SingularMatrix);
}

TEST_CASE("moments_from_samples matches explicit sums") {
  std::mt19937 rng(12);
  const auto s = random_samples(9, 2, rng);
  const auto mp = moments_from_samples(s.x, s.y, s.w, 2);
  double n = 0, x1x2 = 0, x1y2 = 0;
  for (int i = 0; i < 9; ++i) {
    n += s.w[i];
    x1x2 += s.w[i] * s.x[i * 2] * s.x[i * 2 + 1];
    x1y2 += s.w[i] * s.x[i * 2 + 1] * s.y[i * 3 + 2];
  }
  CHECK(mp.mass() == doctest::Approx(n));
  CHECK(mp.xtx(1, 2) == doctest::Approx(x1x2));
  CHECK(mp.xtx(2, 1) == doctest::Approx(x1x2));
  CHECK(mp.xty(2, 2) == doctest::Approx(x1y2));
}

TEST_CASE("tikhonov solve matches an elimination oracle") {
  std::mt19937 rng(13);
  const auto s = random_samples(40, 3, rng);
  const auto mp = moments_from_samples(s.x, s.y, s.w, 3);
  const double eps = 1e-3;
  std::vector<std::vector<double>> a(4, std::vector<double>(4)), b(4, std::vector<double>(3));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) a[i][j] = mp.xtx(i, j) + (i == j ? eps : 0);
    for (int c = 0; c < 3; ++c) b[i][c] = mp.xty(i, c);
  }
  const auto ref = solve_oracle(a, b);
  const auto model = solve_tikhonov(mp, eps);
  for (int i = 0; i < 4; ++i)
    for (int c = 0; c < 3; ++c) CHECK(model(i, c) == doctest::Approx(ref[i][c]).epsilon(1e-5));
}

TEST_CASE("normalized solve: constant guide variance term") {
  // A constant guide v gives diag W = 2 eps_mul v^2 + eps_add.
  const double v = 0.6, eps_add = 1e-5, eps_mul = 1e-4;
  std::vector<double> x(25, v), y(75, 0.3), w(25, 1.0);
  const auto mp = moments_from_samples(x, y, w, 1);
  const auto nm = normalize_moments(mp, eps_add, eps_mul);
  CHECK(nm.sigma_hat[0] == doctest::Approx(std::sqrt(2 * eps_mul * v * v + eps_add)).epsilon(1e-9));
  CHECK(nm.mu_x[0] == doctest::Approx(v));
  const auto model = solve_model(mp, eps_add, eps_mul);
  CHECK(model.finite());
  const std::array<float, 1> xf{static_cast<float>(v)};
  CHECK(model.apply(xf)[0] == doctest::Approx(0.3).epsilon(1e-5));
}

TEST_CASE("normalized solve agrees with tikhonov when regularizers vanish") {
  std::mt19937 rng(14);
  for (int q : {1, 3, 6}) {
    const auto s = random_samples(80, q, rng);
    const auto mp = moments_from_samples(s.x, s.y, s.w, q);
    const auto a = solve_model(mp, 0.0, 0.0);
    const auto b = solve_tikhonov(mp, 0.0);
    for (int i = 0; i < 80; ++i) {
      std::vector<float> xi(s.x.begin() + i * q, s.x.begin() + (i + 1) * q);
      const auto pa = a.apply(xi), pb = b.apply(xi);
      for (int c = 0; c < 3; ++c) CHECK(std::abs(pa[c] - pb[c]) < 1e-3);
    }
  }
}

TEST_CASE("normalized solve reproduces an exact affine map") {
  std::mt19937 rng(15);
  std::uniform_real_distribution<double> u(-1, 1);
  const int q = 4;
  auto s = random_samples(60, q, rng);
  double coeff[q + 1][3];
  for (auto& row : coeff)
    for (double& v : row) v = u(rng);
  for (int i = 0; i < 60; ++i)
    for (int c = 0; c < 3; ++c) {
      double v = coeff[0][c];
      for (int j = 0; j < q; ++j) v += s.x[i * q + j] * coeff[j + 1][c];
      s.y[i * 3 + c] = v;
    }
  const auto model = solve_model(moments_from_samples(s.x, s.y, s.w, q), 1e-9, 0.0);
  for (int j = 0; j <= q; ++j)
    for (int c = 0; c < 3; ++c) CHECK(model(j, c) == doctest::Approx(coeff[j][c]).epsilon(1e-4));
}

TEST_CASE("solver rejects empty windows") {
  MomentPair mp{SmallMatrix<double>(2, 2), SmallMatrix<double>(2, 3)};
  CHECK_THROWS_AS(solve_model(mp), NumericalError);
}

TEST_CASE("normalized correlation equals weighted Pearson correlation without regularizers") {
  std::mt19937 rng(16);
  const auto s = random_samples(50, 3, rng);
  const auto nm = normalize_moments(moments_from_samples(s.x, s.y, s.w, 3), 0.0, 0.0);
  double n = 0, mean[3] = {};
  for (int i = 0; i < 50; ++i) {
    n += s.w[i];
    for (int j = 0; j < 3; ++j) mean[j] += s.w[i] * s.x[i * 3 + j];
  }
  for (double& m : mean) m /= n;
  double cov[3][3] = {};
  for (int i = 0; i < 50; ++i)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) cov[a][b] += s.w[i] * (s.x[i * 3 + a] - mean[a]) * (s.x[i * 3 + b] - mean[b]) / n;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      CHECK(nm.c_hat(a, b) == doctest::Approx(cov[a][b] / std::sqrt(cov[a][a] * cov[b][b])).epsilon(1e-9));
}

TEST_CASE("one-guide window y = 2g + 1 recovers slope and bias") {
  std::vector<double> x, y, w;
  for (int i = 0; i < 30; ++i) {
    const double g = 0.1 + 0.03 * i;
    x.push_back(g);
    for (int c = 0; c < 3; ++c) y.push_back(2 * g + 1);
    w.push_back(1.0 + 0.1 * (i % 4));
  }
  const auto model = solve_model(moments_from_samples(x, y, w, 1), 1e-9, 0.0);
  for (int c = 0; c < 3; ++c) {
    CHECK(std::abs(model(1, c) - 2.0) < 1e-4);
    CHECK(std::abs(model(0, c) - 1.0) < 1e-4);
  }
}
