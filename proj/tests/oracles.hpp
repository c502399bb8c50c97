#pragma once

// Independent reference implementations used as test oracles. They share no
// code with the library beyond the dataset container.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "rpclass/base_classifiers.hpp"

namespace rpclass::oracle {

struct ClassMoments {
  double n0 = 0, n1 = 0;
  Eigen::VectorXd mu0, mu1;
  Eigen::MatrixXd scatter0, scatter1;
};

inline ClassMoments moments(const Eigen::MatrixXd& x, const std::vector<Label>& y) {
  const Eigen::Index p = x.cols();
  ClassMoments m{0, 0, Eigen::VectorXd::Zero(p), Eigen::VectorXd::Zero(p), Eigen::MatrixXd::Zero(p, p),
                 Eigen::MatrixXd::Zero(p, p)};
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 0) {
      m.mu0 += x.row(static_cast<Eigen::Index>(i)).transpose();
      m.n0 += 1;
    } else {
      m.mu1 += x.row(static_cast<Eigen::Index>(i)).transpose();
      m.n1 += 1;
    }
  }
  m.mu0 /= m.n0;
  m.mu1 /= m.n1;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const Eigen::VectorXd c = x.row(static_cast<Eigen::Index>(i)).transpose() - (y[i] == 0 ? m.mu0 : m.mu1);
    (y[i] == 0 ? m.scatter0 : m.scatter1) += c * c.transpose();
  }
  return m;
}

inline double lda_discriminant(const Eigen::MatrixXd& x, const std::vector<Label>& y, const Eigen::VectorXd& q) {
  const ClassMoments m = moments(x, y);
  const Eigen::MatrixXd sigma = (m.scatter0 + m.scatter1) / (m.n0 + m.n1 - 2);
  const Eigen::VectorXd w = sigma.fullPivLu().solve(m.mu1 - m.mu0);
  return std::log(m.n1 / m.n0) + (q - (m.mu0 + m.mu1) / 2).dot(w);
}

inline double qda_discriminant(const Eigen::MatrixXd& x, const std::vector<Label>& y, const Eigen::VectorXd& q) {
  const ClassMoments m = moments(x, y);
  const Eigen::MatrixXd s0 = m.scatter0 / (m.n0 - 1), s1 = m.scatter1 / (m.n1 - 1);
  const auto lu0 = s0.fullPivLu(), lu1 = s1.fullPivLu();
  const Eigen::VectorXd c0 = q - m.mu0, c1 = q - m.mu1;
  return std::log(m.n1 / m.n0) - 0.5 * (std::log(lu1.determinant()) - std::log(lu0.determinant())) -
         0.5 * (c1.dot(lu1.solve(c1)) - c0.dot(lu0.solve(c0)));
}

// k nearest by sorting (distance, index); vote ties go to the larger class, then 0.
inline Label knn(const Eigen::MatrixXd& x, const std::vector<Label>& y, int k, const Eigen::VectorXd& q) {
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < y.size(); ++i)
    order.emplace_back((x.row(static_cast<Eigen::Index>(i)).transpose() - q).squaredNorm(), i);
  std::sort(order.begin(), order.end());
  int ones = 0;
  for (int i = 0; i < k; ++i) ones += y[order[static_cast<std::size_t>(i)].second];
  const int zeros = k - ones;
  if (ones != zeros) return ones > zeros ? 1 : 0;
  const auto n1 = std::count(y.begin(), y.end(), 1);
  return n1 > static_cast<long>(y.size()) - n1 ? 1 : 0;
}

inline Label classify(const BaseClassifierSpec& spec, const Eigen::MatrixXd& x, const std::vector<Label>& y,
                      const Eigen::VectorXd& q) {
  switch (spec.kind) {
    case BaseKind::LDA: return lda_discriminant(x, y, q) >= 0 ? 1 : 0;
    case BaseKind::QDA: return qda_discriminant(x, y, q) >= 0 ? 1 : 0;
    case BaseKind::KNN: return knn(x, y, spec.knn_k, q);
  }
  return 0;
}

// Refits on each n-1 subset by copying rows.
inline double leave_one_out(const BaseClassifierSpec& spec, const Eigen::MatrixXd& x, const std::vector<Label>& y) {
  const std::size_t n = y.size();
  int mistakes = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::MatrixXd xf(static_cast<Eigen::Index>(n - 1), x.cols());
    std::vector<Label> yf;
    Eigen::Index r = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      xf.row(r++) = x.row(static_cast<Eigen::Index>(j));
      yf.push_back(y[j]);
    }
    mistakes += classify(spec, xf, yf, x.row(static_cast<Eigen::Index>(i)).transpose()) != y[i];
  }
  return static_cast<double>(mistakes) / static_cast<double>(n);
}

}  // namespace rpclass::oracle
