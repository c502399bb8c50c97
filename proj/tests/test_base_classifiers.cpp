#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rpclass/base_classifiers.hpp"
#include "support.hpp"

using namespace rpclass;
using rpclass::testing::blobs;
using rpclass::testing::gaussian_matrix;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

GaussianModelFit symmetric_fit() {
  GaussianModelFit f;
  f.pi0 = f.pi1 = 0.5;
  f.mu0 = vec({-1, 0});
  f.mu1 = vec({1, 0});
  f.sigma = Eigen::MatrixXd::Identity(2, 2);
  return f;
}

// Plain loops over the rows, no Eigen reductions.
struct DirectMoments {
  double pi0, pi1;
  Eigen::VectorXd mu0, mu1;
  Eigen::MatrixXd pooled;
};

DirectMoments direct_moments(const LabeledDataset& data) {
  const Eigen::Index n = data.size(), p = data.dim();
  DirectMoments m{0, 0, Eigen::VectorXd::Zero(p), Eigen::VectorXd::Zero(p), Eigen::MatrixXd::Zero(p, p)};
  double n0 = 0, n1 = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (data.labels[i] == 0) m.mu0(j) += data.features(i, j);
      else m.mu1(j) += data.features(i, j);
    }
    (data.labels[i] == 0 ? n0 : n1) += 1;
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    m.mu0(j) /= n0;
    m.mu1(j) /= n1;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd& mu = data.labels[i] == 0 ? m.mu0 : m.mu1;
    for (Eigen::Index a = 0; a < p; ++a)
      for (Eigen::Index b = 0; b < p; ++b)
        m.pooled(a, b) += (data.features(i, a) - mu(a)) * (data.features(i, b) - mu(b));
  }
  m.pooled /= double(n - 2);
  m.pi0 = n0 / n;
  m.pi1 = n1 / n;
  return m;
}

// 2x2 LDA discriminant using the explicit adjugate inverse.
double discriminant_2d(const GaussianModelFit& f, const Eigen::VectorXd& x) {
  const double a = f.sigma(0, 0), b = f.sigma(0, 1), c = f.sigma(1, 0), d = f.sigma(1, 1);
  const double det = a * d - b * c;
  const double dm0 = f.mu1(0) - f.mu0(0), dm1 = f.mu1(1) - f.mu0(1);
  const double w0 = (d * dm0 - b * dm1) / det;
  const double w1 = (-c * dm0 + a * dm1) / det;
  const double x0 = x(0) - (f.mu0(0) + f.mu1(0)) / 2, x1 = x(1) - (f.mu0(1) + f.mu1(1)) / 2;
  return std::log(f.pi1 / f.pi0) + x0 * w0 + x1 * w1;
}

// k nearest by stable sort on (distance, index), majority with the documented tie rule.
Label knn_oracle(const LabeledDataset& train, int k, const Eigen::VectorXd& x) {
  std::vector<std::pair<double, std::size_t>> order;
  for (Eigen::Index i = 0; i < train.size(); ++i)
    order.emplace_back((train.features.row(i).transpose() - x).squaredNorm(), static_cast<std::size_t>(i));
  std::sort(order.begin(), order.end());
  int ones = 0;
  for (int i = 0; i < k; ++i) ones += train.labels[order[i].second];
  const int zeros = k - ones;
  if (ones != zeros) return ones > zeros ? 1 : 0;
  return train.count(1) > train.count(0) ? 1 : 0;
}

}  // namespace

TEST(FitGaussian, DegenerateZeroVariance) {
  Eigen::MatrixXd x(4, 2);
  x << 0, 0, 0, 0, 1, 1, 1, 1;
  const auto fit = fit_gaussian_model(LabeledDataset(x, {0, 0, 1, 1}), true);
  EXPECT_TRUE(fit.mu0.isZero(0));
  EXPECT_TRUE(fit.mu1.isOnes(0));
  EXPECT_TRUE(fit.sigma.isZero(0));
  EXPECT_EQ(fit.pi0, 0.5);
  EXPECT_EQ(fit.pi1, 0.5);
}

TEST(FitGaussian, HandDatasetMatchesDirectArithmetic) {
  Eigen::MatrixXd x(6, 2);
  x << 1, 2, 2, 1, 3, 3, 6, 5, 7, 8, 5, 6;
  const LabeledDataset data(x, {0, 0, 0, 1, 1, 1});
  const auto fit = fit_gaussian_model(data, true);
  // Class 0 mean (2,2), class 1 mean (6,19/3); scatter computed by hand.
  EXPECT_NEAR(fit.mu0(0), 2.0, 1e-15);
  EXPECT_NEAR(fit.mu0(1), 2.0, 1e-15);
  EXPECT_NEAR(fit.mu1(0), 6.0, 1e-15);
  EXPECT_NEAR(fit.mu1(1), 19.0 / 3.0, 1e-15);
  // s00 = (1+0+1) + (0+1+1) = 4; s11 = (0+1+1) + (16/9+25/9+1/9) = 2 + 42/9;
  // s01 = (-1*0 + 0*-1 + 1*1) + (0*-4/3 + 1*5/3 + -1*-1/3) = 1 + 2 = 3.
  EXPECT_NEAR(fit.sigma(0, 0), 4.0 / 4.0, 1e-14);
  EXPECT_NEAR(fit.sigma(1, 1), (2.0 + 42.0 / 9.0) / 4.0, 1e-14);
  EXPECT_NEAR(fit.sigma(0, 1), 3.0 / 4.0, 1e-14);
  EXPECT_NEAR(fit.sigma(1, 0), 3.0 / 4.0, 1e-14);
}

TEST(FitGaussian, PooledCovarianceEqualsDirectFormula) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto data = blobs(30 + s, 4, 1.5, s);
    const auto fit = fit_gaussian_model(data, true);
    const auto m = direct_moments(data);
    EXPECT_NEAR(fit.pi0, m.pi0, 1e-15);
    EXPECT_LT((fit.mu0 - m.mu0).norm(), 1e-12 * m.mu0.norm() + 1e-15);
    EXPECT_LT((fit.mu1 - m.mu1).norm(), 1e-12 * m.mu1.norm());
    for (Eigen::Index a = 0; a < 4; ++a)
      for (Eigen::Index b = 0; b < 4; ++b)
        EXPECT_NEAR(fit.sigma(a, b), m.pooled(a, b), 1e-12 * std::abs(m.pooled(a, b)) + 1e-15);
  }
}

TEST(FitGaussian, PerClassCovariances) {
  const auto data = blobs(40, 3, 1.0, 5);
  const auto fit = fit_gaussian_model(data, false);
  for (Label r : {0, 1}) {
    const Eigen::VectorXd& mu = r == 0 ? fit.mu0 : fit.mu1;
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(3, 3);
    double nr = 0;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      if (data.labels[i] != r) continue;
      const Eigen::VectorXd c = data.features.row(i).transpose() - mu;
      s += c * c.transpose();
      ++nr;
    }
    s /= nr - 1;
    EXPECT_LT((s - (r == 0 ? fit.sigma0 : fit.sigma1)).norm(), 1e-12 * s.norm());
  }
}

TEST(FitGaussian, PermutationInvariant) {
  const auto data = blobs(25, 3, 1.0, 9);
  std::vector<std::size_t> rows(25);
  std::iota(rows.begin(), rows.end(), 0);
  std::shuffle(rows.begin(), rows.end(), std::mt19937_64(4));
  const auto a = fit_gaussian_model(data, true);
  const auto b = fit_gaussian_model(data.subset(rows), true);
  EXPECT_EQ(a.pi0, b.pi0);
  EXPECT_LT((a.mu0 - b.mu0).norm(), 1e-12);
  EXPECT_LT((a.mu1 - b.mu1).norm(), 1e-12);
  EXPECT_LT((a.sigma - b.sigma).norm(), 1e-12);
}

TEST(FitGaussian, Preconditions) {
  Eigen::MatrixXd x = gaussian_matrix(4, 2, 1);
  EXPECT_ERROR_CODE(fit_gaussian_model(LabeledDataset(x, {0, 0, 0, 0}), true), ErrorCode::MissingClass);
  EXPECT_ERROR_CODE(fit_gaussian_model(LabeledDataset(x.topRows(2), {0, 1}), true), ErrorCode::InsufficientData);
  EXPECT_ERROR_CODE(fit_gaussian_model(LabeledDataset(x.topRows(3), {0, 0, 1}), false), ErrorCode::InsufficientData);
}

TEST(Lda, SymmetricGeometry) {
  const auto f = symmetric_fit();
  EXPECT_EQ(predict_lda(f, vec({0.5, 0})), 1);
  EXPECT_EQ(predict_lda(f, vec({-0.5, 0})), 0);
  EXPECT_EQ(predict_lda(f, vec({0, 0})), 1);
}

TEST(Lda, SingularWhenPExceedsN) {
  const auto data = blobs(5, 10, 1.0, 2);
  EXPECT_ERROR_CODE(lda_rule(fit_gaussian_model(data, true)), ErrorCode::SingularCovariance);
  EXPECT_ERROR_CODE(fit_base({BaseKind::LDA}, data), ErrorCode::SingularCovariance);
}

TEST(Lda, MatchesExplicitTwoByTwoDiscriminant) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> z;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto data = blobs(15, 2, 1.0, 100 + s);
    const auto fit = fit_gaussian_model(data, true);
    const auto rule = lda_rule(fit);
    for (int t = 0; t < 50; ++t) {
      const Eigen::VectorXd x = vec({2 * z(rng), 2 * z(rng)});
      const double oracle = discriminant_2d(fit, x);
      EXPECT_NEAR(rule.discriminant(x), oracle, 1e-9 * (1 + std::abs(oracle)));
      if (std::abs(oracle) > 1e-9) {
        EXPECT_EQ(predict_lda(fit, x), oracle >= 0 ? 1 : 0);
      }
    }
  }
}

TEST(Lda, AffineEquivariance) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  for (Eigen::Index p : {2, 3}) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto data = blobs(20, p, 1.0, 40 + s);
      const auto fit = fit_gaussian_model(data, true);
      const Eigen::MatrixXd m = gaussian_matrix(p, p, 70 + s) + 2.0 * Eigen::MatrixXd::Identity(p, p);
      const Eigen::VectorXd c = gaussian_matrix(p, 1, 90 + s);
      GaussianModelFit g = fit;
      g.mu0 = m * fit.mu0 + c;
      g.mu1 = m * fit.mu1 + c;
      g.sigma = m * fit.sigma * m.transpose();
      const auto r = lda_rule(fit), rg = lda_rule(g);
      for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd x(p);
        for (Eigen::Index j = 0; j < p; ++j) x(j) = z(rng);
        EXPECT_NEAR(r.discriminant(x), rg.discriminant(m * x + c), 1e-8 * (1 + std::abs(r.discriminant(x))));
      }
    }
  }
}

TEST(Qda, ReducesToLdaWithEqualCovariances) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z;
  for (std::uint64_t s = 0; s < 10; ++s) {
    GaussianModelFit f;
    f.pi0 = f.pi1 = 0.5;
    f.mu0 = gaussian_matrix(3, 1, s);
    f.mu1 = gaussian_matrix(3, 1, s + 50);
    f.sigma = rpclass::testing::random_spd(3, s + 100);
    f.sigma0 = f.sigma1 = f.sigma;
    for (int t = 0; t < 100; ++t) {
      const Eigen::VectorXd x = vec({2 * z(rng), 2 * z(rng), 2 * z(rng)});
      const double dl = lda_rule(f).discriminant(x);
      EXPECT_NEAR(qda_rule(f).discriminant(x), dl, 1e-9 * (1 + std::abs(dl)));
      if (std::abs(dl) > 1e-9) {
        EXPECT_EQ(predict_qda(f, x), predict_lda(f, x));
      }
    }
  }
}

TEST(Qda, BisectorBoundaryWithIdentityCovariances) {
  GaussianModelFit f;
  f.pi0 = f.pi1 = 0.5;
  f.mu1 = vec({1, 2});
  f.mu0 = -f.mu1;
  f.sigma0 = f.sigma1 = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_EQ(predict_qda(f, vec({2, -1})), 1);  // on the bisector
  EXPECT_EQ(predict_qda(f, vec({0.1, 0})), 1);
  EXPECT_EQ(predict_qda(f, vec({-0.1, 0})), 0);
}

TEST(Qda, SingularWhenClassSizeEqualsDimension) {
  Eigen::MatrixXd x = gaussian_matrix(10, 3, 4);
  const LabeledDataset data(x, {0, 0, 0, 0, 0, 0, 0, 1, 1, 1});
  EXPECT_ERROR_CODE(qda_rule(fit_gaussian_model(data, false)), ErrorCode::SingularCovariance);
}

TEST(Knn, KEqualsNPredictsMajority) {
  const auto data = blobs(9, 2, 3.0, 1);  // five class 0, four class 1
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  for (int t = 0; t < 20; ++t) EXPECT_EQ(predict_knn(data, 9, vec({5 * z(rng), 5 * z(rng)})), 0);
}

TEST(Knn, OneNearestOnTrainingPoint) {
  const auto data = blobs(20, 2, 0.5, 6);
  for (Eigen::Index i = 0; i < data.size(); ++i)
    EXPECT_EQ(predict_knn(data, 1, data.features.row(i).transpose()), data.labels[i]);
}

TEST(Knn, MatchesSortOracle) {
  const auto data = blobs(20, 2, 1.0, 12);
  std::mt19937_64 rng(13);
  std::normal_distribution<double> z;
  for (int t = 0; t < 100; ++t) {
    const Eigen::VectorXd x = vec({2 * z(rng), 2 * z(rng)});
    EXPECT_EQ(predict_knn(data, 3, x), knn_oracle(data, 3, x));
  }
}

TEST(Knn, TieRules) {
  // Query equidistant from rows 0 (label 1) and 1 (label 0): lower index wins.
  Eigen::MatrixXd x(3, 1);
  x << -1, 1, 5;
  EXPECT_EQ(predict_knn(LabeledDataset(x, {1, 0, 0}), 1, vec({0})), 1);
  EXPECT_EQ(predict_knn(LabeledDataset(x, {0, 1, 1}), 1, vec({0})), 0);
  // Vote tie with k=2 goes to the larger class.
  EXPECT_EQ(predict_knn(LabeledDataset(x, {1, 0, 0}), 2, vec({0})), 0);
  EXPECT_EQ(predict_knn(LabeledDataset(x, {0, 1, 1}), 2, vec({0})), 1);
  // Equal class sizes: class 0.
  Eigen::MatrixXd x4(4, 1);
  x4 << -1, 1, 5, 6;
  EXPECT_EQ(predict_knn(LabeledDataset(x4, {1, 0, 0, 1}), 2, vec({0})), 0);
}

TEST(Knn, PermutationInvariantWithDistinctDistances) {
  const auto data = blobs(15, 3, 1.0, 21);
  std::vector<std::size_t> rows(15);
  std::iota(rows.begin(), rows.end(), 0);
  std::shuffle(rows.begin(), rows.end(), std::mt19937_64(1));
  const auto shuffled = data.subset(rows);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z;
  for (int t = 0; t < 50; ++t) {
    const Eigen::VectorXd x = vec({z(rng), z(rng), z(rng)});
    EXPECT_EQ(predict_knn(data, 5, x), predict_knn(shuffled, 5, x));
  }
}

TEST(Knn, InvalidK) {
  const auto data = blobs(6, 2, 1.0, 1);
  EXPECT_ERROR_CODE(predict_knn(data, 7, vec({0, 0})), ErrorCode::InvalidK);
  EXPECT_ERROR_CODE(predict_knn(data, 0, vec({0, 0})), ErrorCode::InvalidK);
  EXPECT_ERROR_CODE(fit_base({BaseKind::KNN, 7}, data), ErrorCode::InvalidK);
}

TEST(Bayes, ClassifyGeometry) {
  GaussianPopulation pop;
  pop.mu0 = vec({-1, 0});
  pop.mu1 = vec({1, 0});
  pop.sigma = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_EQ(bayes_lda_classify(pop, vec({0.5, 0})), 1);
  EXPECT_EQ(bayes_lda_classify(pop, vec({-0.5, 0})), 0);
  EXPECT_EQ(bayes_lda_classify(pop, vec({0, 0})), 1);
}

TEST(Bayes, RiskKnownValues) {
  const double phi_minus_one = 0.5 * std::erfc(1.0 / std::sqrt(2.0));
  EXPECT_NEAR(bayes_lda_risk(0.5, 2.0), phi_minus_one, 1e-15);
  EXPECT_NEAR(bayes_lda_risk(0.5, 2.0), 0.158655, 1e-6);
  EXPECT_LE(bayes_lda_risk(0.5, 10.0), 3e-7);
  EXPECT_NEAR(bayes_lda_risk(0.5, 10.0), 0.5 * std::erfc(5.0 / std::sqrt(2.0)), 1e-20);
}

TEST(Bayes, RiskFromPopulationUsesMahalanobis) {
  GaussianPopulation pop;
  pop.pi0 = 0.3;
  pop.pi1 = 0.7;
  pop.mu0 = vec({0, 0});
  pop.mu1 = vec({2, 0});
  pop.sigma = 4.0 * Eigen::MatrixXd::Identity(2, 2);
  EXPECT_NEAR(pop.delta(), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(bayes_lda_risk(pop), bayes_lda_risk(0.3, 1.0));
}

TEST(Bayes, RiskSymmetricUnderClassSwap) {
  for (double pi0 : {0.1, 0.3, 0.45}) {
    for (double delta : {0.5, 1.0, 3.0}) EXPECT_NEAR(bayes_lda_risk(pi0, delta), bayes_lda_risk(1 - pi0, delta), 1e-15);
  }
}

TEST(Bayes, RiskStrictlyDecreasingInDelta) {
  for (double pi0 : {0.5, 0.2}) {
    double prev = 1.0;
    for (double delta = 0.1; delta <= 8.0; delta += 0.1) {
      const double r = bayes_lda_risk(pi0, delta);
      EXPECT_LT(r, prev);
      EXPECT_GE(r, 0.0);
      EXPECT_LE(r, 0.5);
      prev = r;
    }
  }
}

TEST(Bayes, DegenerateSeparation) {
  EXPECT_ERROR_CODE(bayes_lda_risk(0.5, 0.0), ErrorCode::DegenerateSeparation);
}

TEST(Bayes, RiskMatchesSimulation) {
  GaussianPopulation pop;
  pop.pi0 = 0.4;
  pop.pi1 = 0.6;
  pop.mu0 = vec({0, 0});
  pop.mu1 = vec({1.5, 0});
  pop.sigma = Eigen::MatrixXd::Identity(2, 2);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> z;
  std::bernoulli_distribution coin(pop.pi1);
  const int n = 200000;
  int mistakes = 0;
  for (int i = 0; i < n; ++i) {
    const Label y = coin(rng);
    Eigen::VectorXd x = (y ? pop.mu1 : pop.mu0) + vec({z(rng), z(rng)});
    mistakes += bayes_lda_classify(pop, x) != y;
  }
  EXPECT_NEAR(double(mistakes) / n, bayes_lda_risk(pop), 0.004);
}

TEST(Bayes, NormalCdf) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-15);
  EXPECT_NEAR(normal_cdf(-8.0), 6.22096057427178e-16, 1e-28);
}

TEST(BaseKinds, NamesRoundTrip) {
  for (auto k : {BaseKind::LDA, BaseKind::QDA, BaseKind::KNN}) EXPECT_EQ(parse_base_kind(to_string(k)), k);
}
