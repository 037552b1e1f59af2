#pragma once

#include <Eigen/Dense>
#include <vector>

namespace flowdecomp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Doolittle LU factorization with partial (row) pivoting, P A = L U.
/// A zero pivot marks the matrix singular; the determinant is then 0 and
/// solve() throws NotDecomposableError.
class LuFactorization {
 public:
  explicit LuFactorization(Mat a);

  double determinant() const;
  bool singular() const noexcept { return singular_; }
  Vec solve(const Vec& b) const;

 private:
  Mat lu_;
  std::vector<Eigen::Index> perm_;
  int sign_ = 1;
  bool singular_ = false;
};

inline double lu_determinant(const Mat& a) { return LuFactorization(a).determinant(); }

}  // namespace flowdecomp
