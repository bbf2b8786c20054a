#pragma once

#include <Eigen/Dense>

#include <random>

#include "fhqr/iq_matrix.hpp"

namespace testing {

using fhqr::cplx;
using fhqr::IQMatrix;
using EMatrix = Eigen::MatrixXcd;

inline IQMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  IQMatrix m(rows, cols);
  for (auto& v : m.data()) v = cplx(n(rng), n(rng));
  return m;
}

inline IQMatrix random_rank(std::size_t rows, std::size_t cols, std::size_t rank, std::mt19937_64& rng) {
  return fhqr::matmul(random_matrix(rows, rank, rng), random_matrix(rank, cols, rng));
}

inline EMatrix to_eigen(const IQMatrix& m) {
  EMatrix e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

// Singular values from Eigen's divide-and-conquer SVD.
inline Eigen::VectorXd singular_values(const IQMatrix& m) {
  return Eigen::BDCSVD<EMatrix>(to_eigen(m)).singularValues();
}

// Optimal rank-k Frobenius error (Eckart-Young).
inline double optimal_error(const Eigen::VectorXd& s, std::size_t k) {
  double tail = 0.0;
  for (Eigen::Index i = static_cast<Eigen::Index>(k); i < s.size(); ++i) tail += s[i] * s[i];
  return std::sqrt(tail);
}

inline double max_abs_diff(const IQMatrix& a, const IQMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace testing
