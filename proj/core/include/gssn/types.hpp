#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <limits>

namespace gssn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Index = Eigen::Index;

inline constexpr double inf = std::numeric_limits<double>::infinity();

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace gssn
