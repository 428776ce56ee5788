#pragma once

#include <Eigen/Dense>

namespace polyobs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// 0.5 * (A + A^T)
inline Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

// A + A^T
inline Matrix he(const Matrix& a) { return a + a.transpose(); }

// Smallest eigenvalue of a symmetric matrix; +inf for a 0x0 block.
inline double min_eigenvalue(const Matrix& s) {
  if (s.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double max_eigenvalue(const Matrix& s) {
  if (s.rows() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

inline double min_singular_value(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return std::numeric_limits<double>::infinity();
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues().minCoeff();
}

inline bool is_finite(const Matrix& a) { return a.allFinite(); }

}  // namespace polyobs
