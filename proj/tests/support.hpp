#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "rpclass/dataset.hpp"
#include "rpclass/error.hpp"
#include "rpclass/rng.hpp"

namespace rpclass::testing {

// Two Gaussian blobs with means 0 and `shift` * e_1, both classes guaranteed.
inline LabeledDataset blobs(Eigen::Index n, Eigen::Index p, double shift, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Eigen::MatrixXd x(n, p);
  std::vector<Label> y(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    y[static_cast<std::size_t>(i)] = static_cast<Label>(i % 2);
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = z(rng);
    if (y[static_cast<std::size_t>(i)] == 1) x(i, 0) += shift;
  }
  return LabeledDataset(std::move(x), std::move(y));
}

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = z(rng);
  return m;
}

inline Eigen::MatrixXd random_orthogonal(Eigen::Index p, std::uint64_t seed) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian_matrix(p, p, seed));
  return qr.householderQ() * Eigen::MatrixXd::Identity(p, p);
}

inline Eigen::MatrixXd random_spd(Eigen::Index p, std::uint64_t seed) {
  const Eigen::MatrixXd g = gaussian_matrix(p, 2 * p, seed);
  return g * g.transpose() / static_cast<double>(2 * p) + 0.1 * Eigen::MatrixXd::Identity(p, p);
}

inline double relative_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / b.norm();
}

}  // namespace rpclass::testing

// Asserts that `stmt` throws rpclass::Error carrying `expected`.
#define EXPECT_ERROR_CODE(stmt, expected)                                         \
  do {                                                                            \
    try {                                                                         \
      stmt;                                                                       \
      ADD_FAILURE() << "no exception from " #stmt;                                \
    } catch (const ::rpclass::Error& e) {                                         \
      EXPECT_EQ(e.code(), expected) << e.what();                                  \
    }                                                                             \
  } while (0)
