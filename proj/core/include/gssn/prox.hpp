#pragma once

#include <functional>
#include <vector>

#include "gssn/types.hpp"

namespace gssn {

/// One block of an SC-derivative element: P is a symmetric projection on the
/// block coordinates, W symmetric with W(I-P) = I-P. The whole element is the
/// block-diagonal direct sum.
struct ScdBlock {
  std::vector<Index> indices;
  Matrix P;
  Matrix W;
};

class ScdElement {
 public:
  ScdElement() = default;
  explicit ScdElement(std::vector<ScdBlock> blocks, Index dim);

  Index dim() const { return dim_; }
  const std::vector<ScdBlock>& blocks() const { return blocks_; }

  /// Orthonormal basis of rge P as a sparse n x m matrix. Per block the
  /// eigenvectors of P_block with eigenvalue 1; for 0/1 diagonal P these are
  /// unit vectors.
  const SparseMatrix& basis() const { return basis_; }
  Index active_dim() const { return basis_.cols(); }

  /// Reduced matrix Z^T W Z (m x m, block sparse).
  const SparseMatrix& reduced_w() const { return reduced_w_; }

  Vector project(const Vector& v) const;        // P v
  Vector apply_w(const Vector& v) const;        // W v

 private:
  std::vector<ScdBlock> blocks_;
  Index dim_ = 0;
  SparseMatrix basis_;
  SparseMatrix reduced_w_;
};

/// Nonsmooth part g of the composite objective: value, proximal mapping and
/// SC-derivative element at a graph point of the subdifferential.
class ProxFunction {
 public:
  using EvalFn = std::function<double(const Vector&)>;
  using ProxFn = std::function<Vector(double, const Vector&)>;
  using ScdFn = std::function<ScdElement(const Vector&, const Vector&)>;

  ProxFunction(EvalFn eval, ProxFn prox, ScdFn scd, double prox_bound_threshold = inf)
      : eval_(std::move(eval)), prox_(std::move(prox)), scd_(std::move(scd)),
        threshold_(prox_bound_threshold) {}

  double eval(const Vector& x) const { return eval_(x); }
  Vector prox(double lambda, const Vector& x) const;
  ScdElement scd_element(const Vector& z, const Vector& z_star) const { return scd_(z, z_star); }
  double prox_bound_threshold() const { return threshold_; }

 private:
  EvalFn eval_;
  ProxFn prox_;
  ScdFn scd_;
  double threshold_;
};

// ---- scalar prox kernels -------------------------------------------------

/// Soft threshold: argmin_s 1/(2*lambda) (s-x)^2 + mu |s|.
double soft_threshold(double mu, double lambda, double x);

/// Half thresholding: global minimizer of 1/(2*lambda) (s-x)^2 + mu |s|^{1/2},
/// 0 on ties.
double half_threshold(double mu, double lambda, double x);

/// Hard threshold: x if x^2 > 2*lambda*mu, else 0 (ties to 0).
double hard_threshold(double mu, double lambda, double x);

// ---- catalog members -----------------------------------------------------

Vector prox_l1(double mu, double lambda, const Vector& x);
Vector prox_lhalf(double mu, double lambda, const Vector& x);
Vector prox_l0(double mu, double lambda, const Vector& x);

ScdElement scd_l1(double mu, const Vector& z, const Vector& z_star, double tol = 1e-8);
ScdElement scd_lq(double mu, double q, const Vector& z, const Vector& z_star);
ScdElement scd_l0(double mu, const Vector& z, const Vector& z_star, double tol = 1e-8);

ProxFunction make_l1(double mu);
ProxFunction make_lq(double mu, double q);  // q in (0,1); prox implemented for q = 1/2
ProxFunction make_l0(double mu);
ProxFunction make_zero(Index dim);

/// Tresca friction term: per contact block i of 3 coordinates,
/// F_i ||v_12|| + indicator(v_3 + d_i >= 0), free tail unpenalized.
Vector prox_tresca_block(const Vector& F, const Vector& d, double lambda, const Vector& v);
ScdElement scd_tresca_block(const Vector& F, const Vector& d, const Vector& z,
                            const Vector& z_star, double tol = 1e-8);
ProxFunction make_tresca(Vector F, Vector d, Index dim);

/// Blockwise composition over a partition of the coordinates.
ProxFunction separable_sum(std::vector<std::pair<std::vector<Index>, ProxFunction>> parts,
                           Index dim);

}  // namespace gssn
