#include "flowdecomp/linalg.hpp"

#include <cmath>
#include <numeric>
#include <utility>

#include "flowdecomp/errors.hpp"

namespace flowdecomp {

LuFactorization::LuFactorization(Mat a) : lu_(std::move(a)) {
  if (lu_.rows() != lu_.cols()) {
    throw InvalidArgument("LU factorization requires a square matrix");
  }
  const Eigen::Index n = lu_.rows();
  perm_.resize(static_cast<std::size_t>(n));
  std::iota(perm_.begin(), perm_.end(), Eigen::Index{0});

  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index pivot = k;
    double best = std::abs(lu_(k, k));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        pivot = i;
      }
    }
    if (best == 0.0) {
      singular_ = true;
      continue;
    }
    if (pivot != k) {
      lu_.row(k).swap(lu_.row(pivot));
      std::swap(perm_[static_cast<std::size_t>(k)], perm_[static_cast<std::size_t>(pivot)]);
      sign_ = -sign_;
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double factor = lu_(i, k) / lu_(k, k);
      lu_(i, k) = factor;
      for (Eigen::Index j = k + 1; j < n; ++j) lu_(i, j) -= factor * lu_(k, j);
    }
  }
}

double LuFactorization::determinant() const {
  if (singular_) return 0.0;
  double det = sign_;
  for (Eigen::Index k = 0; k < lu_.rows(); ++k) det *= lu_(k, k);
  return det;
}

Vec LuFactorization::solve(const Vec& b) const {
  if (singular_) throw NotDecomposableError("LU solve on a singular matrix");
  const Eigen::Index n = lu_.rows();
  if (b.size() != n) throw InvalidArgument("LU solve: right-hand side has wrong length");
  Vec y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = b(perm_[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < i; ++j) s -= lu_(i, j) * y(j);
    y(i) = s;
  }
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double s = y(i);
    for (Eigen::Index j = i + 1; j < n; ++j) s -= lu_(i, j) * y(j);
    y(i) = s / lu_(i, i);
  }
  return y;
}

}  // namespace flowdecomp
