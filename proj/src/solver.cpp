#include "flr/solver.hpp"

#include <algorithm>

namespace flr {

namespace {

void check_moments(const MomentPair& mp) {
  const int p = mp.xtx.rows();
  if (p < 2 || p > kMaxDim || mp.xtx.cols() != p || mp.xty.rows() != p || mp.xty.cols() != 3)
    throw NumericalError("moment pair has inconsistent shape");
  if (!(mp.mass() > 0.0)) throw NumericalError("moment pair has non-positive sample mass");
}

}  // namespace

NormalizedMoments normalize_moments(const MomentPair& mp, double eps_add, double eps_mul) {
  check_moments(mp);
  const int q = mp.guide_count();
  const double n = mp.mass();

  NormalizedMoments out;
  for (int i = 0; i < q; ++i) out.mu_x[static_cast<std::size_t>(i)] = mp.xtx(0, i + 1) / n;
  for (int c = 0; c < 3; ++c) out.mu_y[static_cast<std::size_t>(c)] = mp.xty(0, c) / n;

  // W^ = S/n + eps_mul diag(mu mu^T) + eps_add I - (1 - eps_mul) mu mu^T
  SmallMatrix<double> w(q, q);
  for (int i = 0; i < q; ++i) {
    const double mi = out.mu_x[static_cast<std::size_t>(i)];
    for (int j = 0; j < q; ++j) {
      const double mj = out.mu_x[static_cast<std::size_t>(j)];
      w(i, j) = mp.xtx(i + 1, j + 1) / n - (1.0 - eps_mul) * mi * mj;
    }
    w(i, i) += eps_mul * mi * mi + eps_add;
  }

  for (int i = 0; i < q; ++i)
    out.sigma_hat[static_cast<std::size_t>(i)] = std::sqrt(std::max(w(i, i), kVarianceFloor));

  out.c_hat = SmallMatrix<double>(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      out.c_hat(i, j) =
          w(i, j) / (out.sigma_hat[static_cast<std::size_t>(i)] * out.sigma_hat[static_cast<std::size_t>(j)]);

  out.b_hat = SmallMatrix<double>(q, 3);
  for (int i = 0; i < q; ++i)
    for (int c = 0; c < 3; ++c)
      out.b_hat(i, c) = (mp.xty(i + 1, c) / n - out.mu_x[static_cast<std::size_t>(i)] *
                                                     out.mu_y[static_cast<std::size_t>(c)]) /
                        out.sigma_hat[static_cast<std::size_t>(i)];
  return out;
}

AffineModel solve_model(const MomentPair& mp, double eps_add, double eps_mul) {
  const NormalizedMoments nm = normalize_moments(mp, eps_add, eps_mul);
  const int q = mp.guide_count();

  SmallMatrix<double> lhs = nm.c_hat;
  for (int i = 0; i < q; ++i) lhs(i, i) += eps_add;
  const SmallMatrix<double> a_hat = block_inverse(lhs) * nm.b_hat;

  AffineModel model(q);
  for (int c = 0; c < 3; ++c) {
    double bias = nm.mu_y[static_cast<std::size_t>(c)];
    for (int j = 0; j < q; ++j) {
      const double slope = a_hat(j, c) / nm.sigma_hat[static_cast<std::size_t>(j)];
      model(j + 1, c) = static_cast<float>(slope);
      bias -= nm.mu_x[static_cast<std::size_t>(j)] * slope;
    }
    model(0, c) = static_cast<float>(bias);
  }
  if (!model.finite()) throw NumericalError("solve_model: non-finite model");
  return model;
}

AffineModel solve_tikhonov(const MomentPair& mp, double eps) {
  check_moments(mp);
  const int p = mp.xtx.rows();
  SmallMatrix<double> lhs = mp.xtx;
  for (int i = 0; i < p; ++i) lhs(i, i) += eps;
  const SmallMatrix<double> a = block_inverse(lhs) * mp.xty;

  AffineModel model(p - 1);
  for (int r = 0; r < p; ++r)
    for (int c = 0; c < 3; ++c) model(r, c) = static_cast<float>(a(r, c));
  if (!model.finite()) throw NumericalError("solve_tikhonov: non-finite model");
  return model;
}

MomentPair moments_from_samples(std::span<const double> guides, std::span<const double> y,
                                std::span<const double> weights, int guide_count) {
  const int p = guide_count + 1;
  MomentPair mp{SmallMatrix<double>(p, p), SmallMatrix<double>(p, 3)};
  std::array<double, kMaxDim> x{};
  for (std::size_t s = 0; s < weights.size(); ++s) {
    x[0] = 1.0;
    for (int j = 0; j < guide_count; ++j)
      x[static_cast<std::size_t>(j + 1)] = guides[s * static_cast<std::size_t>(guide_count) + static_cast<std::size_t>(j)];
    const double w = weights[s];
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) mp.xtx(i, j) += w * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
      for (int c = 0; c < 3; ++c) mp.xty(i, c) += w * x[static_cast<std::size_t>(i)] * y[s * 3 + static_cast<std::size_t>(c)];
    }
  }
  return mp;
}

}  // namespace flr
