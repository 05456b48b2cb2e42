#pragma once

#include <functional>
#include <random>

#include "gssn/prox.hpp"
#include "gssn/types.hpp"

namespace gssn::testing {

inline Vector random_vector(Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> gauss;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = scale * gauss(rng);
  return v;
}

/// Coarse scan over [lo, hi] followed by local refinement; independent oracle
/// for scalar prox objectives. Returns the best objective value found.
template <class F>
double grid_minimize(const F& f, double lo, double hi, double step, double refine_to) {
  double best_s = lo, best_v = f(lo);
  for (double s = lo; s <= hi; s += step) {
    const double v = f(s);
    if (v < best_v) {
      best_v = v;
      best_s = s;
    }
  }
  double width = step;
  while (width > refine_to) {
    const double next = width / 100.0;
    const double wlo = std::max(lo, best_s - width);
    const double whi = std::min(hi, best_s + width);
    for (double s = wlo; s <= whi; s += next) {
      const double v = f(s);
      if (v < best_v) {
        best_v = v;
        best_s = s;
      }
    }
    width = next;
  }
  return best_v;
}

/// Embeds the block-diagonal P (or W) of an SC element into a dense n x n
/// matrix for whole-space defect checks.
inline Matrix embed(const ScdElement& el, bool use_w) {
  Matrix out = Matrix::Zero(el.dim(), el.dim());
  for (const ScdBlock& blk : el.blocks()) {
    const Matrix& m = use_w ? blk.W : blk.P;
    for (size_t i = 0; i < blk.indices.size(); ++i)
      for (size_t j = 0; j < blk.indices.size(); ++j)
        out(blk.indices[i], blk.indices[j]) = m(static_cast<Index>(i), static_cast<Index>(j));
  }
  return out;
}

/// Max of the four SC defects ||P^2-P||, ||P-P^T||, ||W-W^T||, ||W(I-P)-(I-P)||.
inline double sc_defect(const ScdElement& el) {
  const Matrix P = embed(el, false);
  const Matrix W = embed(el, true);
  const Matrix I = Matrix::Identity(el.dim(), el.dim());
  double worst = (P * P - P).norm();
  worst = std::max(worst, (P - P.transpose()).norm());
  worst = std::max(worst, (W - W.transpose()).norm());
  worst = std::max(worst, (W * (I - P) - (I - P)).norm());
  return worst;
}

}  // namespace gssn::testing
