#pragma once

#include "flr/image.hpp"
#include "flr/solver.hpp"

namespace flr {

// Square window of side 2*radius+1, clamp-to-edge at image borders.
struct WindowSpec {
  int radius = 20;
  float sigma = 10.0f;
  Weighting weighting = Weighting::gaussian;

  void validate() const;
};

enum class Solver { normalized, tikhonov };

struct DenseOptions {
  WindowSpec window;
  Solver solver = Solver::normalized;
  double eps_add = kDefaultEpsAdd;
  double eps_mul = kDefaultEpsMul;
};

// Sum over the window of w_i x_i x_i^T and w_i x_i y_i^T with x_i = [1, guides].
MomentPair gather_window_moments(const GuideStack& guides, const ImagePlane& y, int cx, int cy,
                                 const WindowSpec& spec);

// Per-pixel windowed regression. Moments come from `fit`, the model at
// each pixel is evaluated on `apply`.
ImagePlane denoise_dense(const GuideStack& fit, const GuideStack& apply, const ImagePlane& y,
                         const DenseOptions& options);

inline ImagePlane denoise_dense(const GuideStack& guides, const ImagePlane& y,
                                const DenseOptions& options) {
  return denoise_dense(guides, guides, y, options);
}

}  // namespace flr
