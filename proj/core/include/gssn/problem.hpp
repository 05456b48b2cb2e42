#pragma once

#include <memory>
#include <stdexcept>

#include "gssn/prox.hpp"
#include "gssn/smooth.hpp"

namespace gssn {

/// min phi(x) = f(x) + g(x)
struct CompositeProblem {
  std::shared_ptr<const SmoothFunction> smooth;
  std::shared_ptr<const ProxFunction> nonsmooth;
  Index dimension;

  CompositeProblem(std::shared_ptr<const SmoothFunction> f,
                   std::shared_ptr<const ProxFunction> g, Index dim)
      : smooth(std::move(f)), nonsmooth(std::move(g)), dimension(dim) {
    if (smooth->dim() != dim)
      throw std::invalid_argument("CompositeProblem: smooth dimension mismatch");
  }

  double phi(const Vector& x) const {
    return smooth->value(x) + nonsmooth->eval(x);
  }
};

}  // namespace gssn
