#include "gssn/prox.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

namespace gssn {

namespace {

bool is_binary_diagonal(const Matrix& P) {
  for (Index i = 0; i < P.rows(); ++i)
    for (Index j = 0; j < P.cols(); ++j) {
      const double target = (i == j) ? std::round(P(i, i)) : 0.0;
      if (i == j && target != 0.0 && target != 1.0) return false;
      if (std::abs(P(i, j) - target) > 1e-14) return false;
    }
  return true;
}

}  // namespace

ScdElement::ScdElement(std::vector<ScdBlock> blocks, Index dim)
    : blocks_(std::move(blocks)), dim_(dim) {
  std::vector<char> seen(dim, 0);
  Index m = 0;
  std::vector<Eigen::Triplet<double>> basis_trip;
  std::vector<Eigen::Triplet<double>> w_trip;
  std::vector<Matrix> local_bases(blocks_.size());

  for (size_t bi = 0; bi < blocks_.size(); ++bi) {
    const ScdBlock& blk = blocks_[bi];
    const Index bs = static_cast<Index>(blk.indices.size());
    if (blk.P.rows() != bs || blk.P.cols() != bs || blk.W.rows() != bs || blk.W.cols() != bs)
      throw std::invalid_argument("ScdElement: block matrix size mismatch");
    for (Index idx : blk.indices) {
      if (idx < 0 || idx >= dim || seen[idx])
        throw std::invalid_argument("ScdElement: indices must partition the dimension");
      seen[idx] = 1;
    }
    Matrix& Zb = local_bases[bi];
    if (is_binary_diagonal(blk.P)) {
      Index mb = 0;
      for (Index i = 0; i < bs; ++i)
        if (blk.P(i, i) > 0.5) ++mb;
      Zb = Matrix::Zero(bs, mb);
      Index col = 0;
      for (Index i = 0; i < bs; ++i)
        if (blk.P(i, i) > 0.5) Zb(i, col++) = 1.0;
    } else {
      Eigen::SelfAdjointEigenSolver<Matrix> es(blk.P);
      Index mb = 0;
      for (Index i = 0; i < bs; ++i)
        if (es.eigenvalues()[i] > 0.5) ++mb;
      Zb.resize(bs, mb);
      Index col = 0;
      for (Index i = 0; i < bs; ++i)
        if (es.eigenvalues()[i] > 0.5) Zb.col(col++) = es.eigenvectors().col(i);
    }
    const Matrix Wred = Zb.transpose() * blk.W * Zb;
    for (Index j = 0; j < Zb.cols(); ++j) {
      for (Index i = 0; i < bs; ++i)
        if (Zb(i, j) != 0.0) basis_trip.emplace_back(blk.indices[i], m + j, Zb(i, j));
      for (Index j2 = 0; j2 < Zb.cols(); ++j2)
        if (Wred(j, j2) != 0.0) w_trip.emplace_back(m + j, m + j2, Wred(j, j2));
    }
    m += Zb.cols();
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw std::invalid_argument("ScdElement: indices must partition the dimension");

  basis_.resize(dim, m);
  basis_.setFromTriplets(basis_trip.begin(), basis_trip.end());
  basis_.makeCompressed();
  reduced_w_.resize(m, m);
  reduced_w_.setFromTriplets(w_trip.begin(), w_trip.end());
  reduced_w_.makeCompressed();
}

Vector ScdElement::project(const Vector& v) const {
  Vector out = Vector::Zero(dim_);
  for (const ScdBlock& blk : blocks_) {
    const Index bs = static_cast<Index>(blk.indices.size());
    Vector local(bs);
    for (Index i = 0; i < bs; ++i) local[i] = v[blk.indices[i]];
    Vector res = blk.P * local;
    for (Index i = 0; i < bs; ++i) out[blk.indices[i]] = res[i];
  }
  return out;
}

Vector ScdElement::apply_w(const Vector& v) const {
  Vector out = Vector::Zero(dim_);
  for (const ScdBlock& blk : blocks_) {
    const Index bs = static_cast<Index>(blk.indices.size());
    Vector local(bs);
    for (Index i = 0; i < bs; ++i) local[i] = v[blk.indices[i]];
    Vector res = blk.W * local;
    for (Index i = 0; i < bs; ++i) out[blk.indices[i]] = res[i];
  }
  return out;
}

Vector ProxFunction::prox(double lambda, const Vector& x) const {
  if (!(lambda > 0) || lambda >= threshold_)
    throw std::invalid_argument("ProxFunction::prox: lambda outside (0, threshold)");
  return prox_(lambda, x);
}

// ---- scalar kernels ------------------------------------------------------

double soft_threshold(double mu, double lambda, double x) {
  const double t = lambda * mu;
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

double hard_threshold(double mu, double lambda, double x) {
  return (x * x > 2.0 * lambda * mu) ? x : 0.0;
}

double half_threshold(double mu, double lambda, double x) {
  if (x == 0.0) return 0.0;
  const double ax = std::abs(x);
  const double c = 0.5 * lambda * mu;  // t^3 - ax*t + c = 0 for t = sqrt(|s|)
  // nonzero stationary points exist iff the cubic's local minimum is <= 0
  const double tmin = std::sqrt(ax / 3.0);
  if (tmin * tmin * tmin - ax * tmin + c > 0.0) return 0.0;
  // Newton from t0 = sqrt(ax): cubic is convex and increasing on [tmin, inf),
  // so the iteration decreases monotonically to the largest root.
  double t = std::sqrt(ax);
  for (int it = 0; it < 100; ++it) {
    const double ft = t * t * t - ax * t + c;
    const double dft = 3.0 * t * t - ax;
    if (dft <= 0.0) break;
    const double step = ft / dft;
    t -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, t)) break;
  }
  const double s = t * t;
  const double obj_s = (s - ax) * (s - ax) / (2.0 * lambda) + mu * std::sqrt(s);
  const double obj_0 = ax * ax / (2.0 * lambda);
  if (obj_s >= obj_0) return 0.0;  // ties resolve to 0
  return x > 0 ? s : -s;
}

// ---- separable vector proxes ---------------------------------------------

Vector prox_l1(double mu, double lambda, const Vector& x) {
  return x.unaryExpr([&](double xi) { return soft_threshold(mu, lambda, xi); });
}

Vector prox_lhalf(double mu, double lambda, const Vector& x) {
  return x.unaryExpr([&](double xi) { return half_threshold(mu, lambda, xi); });
}

Vector prox_l0(double mu, double lambda, const Vector& x) {
  return x.unaryExpr([&](double xi) { return hard_threshold(mu, lambda, xi); });
}

namespace {

ScdElement diagonal_element(const Vector& z, const std::function<double(Index)>& w_active) {
  std::vector<ScdBlock> blocks;
  blocks.reserve(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    ScdBlock blk;
    blk.indices = {i};
    blk.P = Matrix::Constant(1, 1, z[i] != 0.0 ? 1.0 : 0.0);
    blk.W = Matrix::Constant(1, 1, z[i] != 0.0 ? w_active(i) : 1.0);
    blocks.push_back(std::move(blk));
  }
  return ScdElement(std::move(blocks), z.size());
}

}  // namespace

ScdElement scd_l1(double mu, const Vector& z, const Vector& z_star, double tol) {
  for (Index i = 0; i < z.size(); ++i) {
    if (z[i] != 0.0) {
      if (std::abs(z_star[i] - mu * (z[i] > 0 ? 1.0 : -1.0)) > tol)
        throw std::invalid_argument("scd_l1: (z, z*) not on the subdifferential graph");
    } else if (std::abs(z_star[i]) > mu + tol) {
      throw std::invalid_argument("scd_l1: (z, z*) not on the subdifferential graph");
    }
  }
  return diagonal_element(z, [](Index) { return 0.0; });
}

ScdElement scd_lq(double mu, double q, const Vector& z, const Vector& z_star) {
  (void)z_star;
  return diagonal_element(z, [&](Index i) {
    return mu * q * (q - 1.0) * std::pow(std::abs(z[i]), q - 2.0);
  });
}

ScdElement scd_l0(double mu, const Vector& z, const Vector& z_star, double tol) {
  (void)mu;
  for (Index i = 0; i < z.size(); ++i)
    if (z[i] != 0.0 && std::abs(z_star[i]) > tol)
      throw std::invalid_argument("scd_l0: (z, z*) not on the subdifferential graph");
  return diagonal_element(z, [](Index) { return 0.0; });
}

ProxFunction make_l1(double mu) {
  return ProxFunction(
      [mu](const Vector& x) { return mu * x.lpNorm<1>(); },
      [mu](double lambda, const Vector& x) { return prox_l1(mu, lambda, x); },
      [mu](const Vector& z, const Vector& zs) { return scd_l1(mu, z, zs); });
}

ProxFunction make_lq(double mu, double q) {
  if (!(q > 0 && q < 1)) throw std::invalid_argument("make_lq: q must lie in (0,1)");
  if (q != 0.5) throw std::invalid_argument("make_lq: prox only implemented for q = 1/2");
  return ProxFunction(
      [mu, q](const Vector& x) {
        double sum = 0;
        for (Index i = 0; i < x.size(); ++i) sum += std::pow(std::abs(x[i]), q);
        return mu * sum;
      },
      [mu](double lambda, const Vector& x) { return prox_lhalf(mu, lambda, x); },
      [mu, q](const Vector& z, const Vector& zs) { return scd_lq(mu, q, z, zs); });
}

ProxFunction make_l0(double mu) {
  return ProxFunction(
      [mu](const Vector& x) {
        Index nnz = 0;
        for (Index i = 0; i < x.size(); ++i)
          if (x[i] != 0.0) ++nnz;
        return mu * static_cast<double>(nnz);
      },
      [mu](double lambda, const Vector& x) { return prox_l0(mu, lambda, x); },
      [mu](const Vector& z, const Vector& zs) { return scd_l0(mu, z, zs); });
}

ProxFunction make_zero(Index dim) {
  return ProxFunction(
      [](const Vector&) { return 0.0; },
      [](double, const Vector& x) { return x; },
      [dim](const Vector& z, const Vector&) {
        std::vector<ScdBlock> blocks(dim);
        for (Index i = 0; i < dim; ++i) {
          blocks[i].indices = {i};
          blocks[i].P = Matrix::Constant(1, 1, 1.0);
          blocks[i].W = Matrix::Constant(1, 1, 0.0);
        }
        (void)z;
        return ScdElement(std::move(blocks), dim);
      });
}

// ---- Tresca friction blocks ----------------------------------------------

Vector prox_tresca_block(const Vector& F, const Vector& d, double lambda, const Vector& v) {
  const Index p = F.size();
  Vector out = v;
  for (Index i = 0; i < p; ++i) {
    const Index o = 3 * i;
    const double n12 = std::hypot(v[o], v[o + 1]);
    const double t = lambda * F[i];
    if (n12 <= t) {
      out[o] = out[o + 1] = 0.0;
    } else {
      const double scale = 1.0 - t / n12;
      out[o] = scale * v[o];
      out[o + 1] = scale * v[o + 1];
    }
    out[o + 2] = std::max(v[o + 2], -d[i]);
  }
  return out;
}

ScdElement scd_tresca_block(const Vector& F, const Vector& d, const Vector& z,
                            const Vector& z_star, double tol) {
  const Index p = F.size();
  const Index n = z.size();
  std::vector<ScdBlock> blocks;
  blocks.reserve(p + 1);
  for (Index i = 0; i < p; ++i) {
    const Index o = 3 * i;
    ScdBlock blk;
    blk.indices = {o, o + 1, o + 2};
    blk.P = Matrix::Zero(3, 3);
    blk.W = Matrix::Zero(3, 3);
    const Eigen::Vector2d t(z[o], z[o + 1]);
    const Eigen::Vector2d ts(z_star[o], z_star[o + 1]);
    const double nt = t.norm();
    if (nt > 0) {
      if ((ts - F[i] * t / nt).norm() > tol)
        throw std::invalid_argument("scd_tresca_block: tangential graph violation");
      blk.P.topLeftCorner(2, 2).setIdentity();
      blk.W.topLeftCorner(2, 2) =
          (F[i] / nt) * (Matrix::Identity(2, 2) - (t * t.transpose()) / (nt * nt));
    } else {
      if (ts.norm() > F[i] + tol)
        throw std::invalid_argument("scd_tresca_block: tangential graph violation");
      blk.W.topLeftCorner(2, 2).setIdentity();
    }
    const double gap = z[o + 2] + d[i];
    if (gap < -tol)
      throw std::invalid_argument("scd_tresca_block: gap constraint violated");
    if (gap > tol) {
      if (std::abs(z_star[o + 2]) > tol)
        throw std::invalid_argument("scd_tresca_block: normal graph violation");
      blk.P(2, 2) = 1.0;
    } else {
      if (z_star[o + 2] > tol)
        throw std::invalid_argument("scd_tresca_block: normal graph violation");
      blk.W(2, 2) = 1.0;
    }
    blocks.push_back(std::move(blk));
  }
  if (n > 3 * p) {
    ScdBlock tail;
    const Index len = n - 3 * p;
    tail.indices.resize(len);
    std::iota(tail.indices.begin(), tail.indices.end(), 3 * p);
    tail.P = Matrix::Identity(len, len);
    tail.W = Matrix::Zero(len, len);
    blocks.push_back(std::move(tail));
  }
  return ScdElement(std::move(blocks), n);
}

ProxFunction make_tresca(Vector F, Vector d, Index dim) {
  if (3 * F.size() > dim || F.size() != d.size())
    throw std::invalid_argument("make_tresca: inconsistent block counts");
  auto Fp = std::make_shared<Vector>(std::move(F));
  auto dp = std::make_shared<Vector>(std::move(d));
  return ProxFunction(
      [Fp, dp](const Vector& v) {
        double sum = 0;
        for (Index i = 0; i < Fp->size(); ++i) {
          const Index o = 3 * i;
          if (v[o + 2] + (*dp)[i] < -1e-12) return inf;
          sum += (*Fp)[i] * std::hypot(v[o], v[o + 1]);
        }
        return sum;
      },
      [Fp, dp](double lambda, const Vector& v) {
        return prox_tresca_block(*Fp, *dp, lambda, v);
      },
      [Fp, dp](const Vector& z, const Vector& zs) {
        return scd_tresca_block(*Fp, *dp, z, zs);
      });
}

// ---- separable composition -----------------------------------------------

ProxFunction separable_sum(std::vector<std::pair<std::vector<Index>, ProxFunction>> parts,
                           Index dim) {
  std::vector<char> seen(dim, 0);
  for (const auto& [idx, fn] : parts)
    for (Index i : idx) {
      if (i < 0 || i >= dim || seen[i])
        throw std::invalid_argument("separable_sum: index sets must partition the dimension");
      seen[i] = 1;
    }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw std::invalid_argument("separable_sum: index sets must partition the dimension");

  auto shared = std::make_shared<std::vector<std::pair<std::vector<Index>, ProxFunction>>>(
      std::move(parts));

  auto gather = [](const std::vector<Index>& idx, const Vector& x) {
    Vector out(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) out[static_cast<Index>(i)] = x[idx[i]];
    return out;
  };

  double threshold = inf;
  for (const auto& [idx, fn] : *shared) threshold = std::min(threshold, fn.prox_bound_threshold());

  return ProxFunction(
      [shared, gather](const Vector& x) {
        double sum = 0;
        for (const auto& [idx, fn] : *shared) sum += fn.eval(gather(idx, x));
        return sum;
      },
      [shared, gather](double lambda, const Vector& x) {
        Vector out(x.size());
        for (const auto& [idx, fn] : *shared) {
          Vector local = fn.prox(lambda, gather(idx, x));
          for (size_t i = 0; i < idx.size(); ++i) out[idx[i]] = local[static_cast<Index>(i)];
        }
        return out;
      },
      [shared, gather, dim](const Vector& z, const Vector& zs) {
        std::vector<ScdBlock> blocks;
        for (const auto& [idx, fn] : *shared) {
          ScdElement el = fn.scd_element(gather(idx, z), gather(idx, zs));
          for (const ScdBlock& blk : el.blocks()) {
            ScdBlock remapped = blk;
            for (size_t i = 0; i < remapped.indices.size(); ++i)
              remapped.indices[i] = idx[remapped.indices[i]];
            blocks.push_back(std::move(remapped));
          }
        }
        return ScdElement(std::move(blocks), dim);
      },
      threshold);
}

}  // namespace gssn
