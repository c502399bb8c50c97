#include "rpclass/base_classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rpclass/error.hpp"

namespace rpclass {

GaussianModelFit fit_gaussian_model(const LabeledDataset& data, bool pooled) {
  const Eigen::Index n = data.size();
  const Eigen::Index p = data.dim();
  const auto n1 = static_cast<Eigen::Index>(data.count(1));
  const Eigen::Index n0 = n - n1;
  if (n0 == 0 || n1 == 0) {
    throw Error(ErrorCode::MissingClass, "class " + std::string(n0 == 0 ? "0" : "1") + " has no observations");
  }
  if (pooled && n < 3) throw Error(ErrorCode::InsufficientData, "pooled covariance needs n >= 3");
  if (!pooled && (n0 < 2 || n1 < 2)) {
    throw Error(ErrorCode::InsufficientData, "per-class covariance needs at least 2 points per class");
  }

  GaussianModelFit fit;
  fit.pi0 = static_cast<double>(n0) / static_cast<double>(n);
  fit.pi1 = static_cast<double>(n1) / static_cast<double>(n);
  fit.mu0 = Eigen::VectorXd::Zero(p);
  fit.mu1 = Eigen::VectorXd::Zero(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (data.labels[static_cast<std::size_t>(i)] == 1)
      fit.mu1 += data.features.row(i).transpose();
    else
      fit.mu0 += data.features.row(i).transpose();
  }
  fit.mu0 /= static_cast<double>(n0);
  fit.mu1 /= static_cast<double>(n1);

  // Centre each row on its own class mean, then form the scatter blocks.
  Eigen::MatrixXd c0(n0, p);
  Eigen::MatrixXd c1(n1, p);
  Eigen::Index i0 = 0;
  Eigen::Index i1 = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (data.labels[static_cast<std::size_t>(i)] == 1)
      c1.row(i1++) = data.features.row(i) - fit.mu1.transpose();
    else
      c0.row(i0++) = data.features.row(i) - fit.mu0.transpose();
  }
  Eigen::MatrixXd s0 = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd s1 = Eigen::MatrixXd::Zero(p, p);
  s0.selfadjointView<Eigen::Lower>().rankUpdate(c0.transpose());
  s1.selfadjointView<Eigen::Lower>().rankUpdate(c1.transpose());
  s0 = s0.selfadjointView<Eigen::Lower>();
  s1 = s1.selfadjointView<Eigen::Lower>();

  if (pooled) {
    fit.sigma = (s0 + s1) / static_cast<double>(n - 2);
  } else {
    fit.sigma0 = s0 / static_cast<double>(n0 - 1);
    fit.sigma1 = s1 / static_cast<double>(n1 - 1);
  }
  return fit;
}

SymmetricInverse invert_covariance(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() == 0 || sigma.rows() != sigma.cols()) {
    throw Error(ErrorCode::SingularCovariance, "covariance is empty or not square");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::SingularCovariance, "eigendecomposition failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending
  const double largest = lambda(lambda.size() - 1);
  const double smallest = lambda(0);
  if (!(largest > 0.0) || smallest / largest < kRcondThreshold) {
    throw Error(ErrorCode::SingularCovariance,
                "reciprocal condition number " + std::to_string(largest > 0.0 ? smallest / largest : 0.0) +
                    " below threshold");
  }
  const Eigen::MatrixXd& v = eig.eigenvectors();
  SymmetricInverse out;
  out.inverse = v * lambda.cwiseInverse().asDiagonal() * v.transpose();
  out.log_det = lambda.array().log().sum();
  return out;
}

double LdaRule::discriminant(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  require_dim(x, direction.size());
  return log_prior_ratio + (x - midpoint).dot(direction);
}

double QdaRule::discriminant(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  require_dim(x, mu0.size());
  const Eigen::VectorXd r0 = x - mu0;
  const Eigen::VectorXd r1 = x - mu1;
  const double q0 = r0.dot(precision0 * r0);
  const double q1 = r1.dot(precision1 * r1);
  return constant - 0.5 * (q1 - q0);
}

LdaRule lda_rule(const GaussianModelFit& fit) {
  const SymmetricInverse inv = invert_covariance(fit.sigma);
  LdaRule rule;
  rule.log_prior_ratio = std::log(fit.pi1 / fit.pi0);
  rule.midpoint = 0.5 * (fit.mu1 + fit.mu0);
  rule.direction = inv.inverse * (fit.mu1 - fit.mu0);
  return rule;
}

QdaRule qda_rule(const GaussianModelFit& fit) {
  const SymmetricInverse inv0 = invert_covariance(fit.sigma0);
  const SymmetricInverse inv1 = invert_covariance(fit.sigma1);
  QdaRule rule;
  rule.constant = std::log(fit.pi1 / fit.pi0) - 0.5 * (inv1.log_det - inv0.log_det);
  rule.mu0 = fit.mu0;
  rule.mu1 = fit.mu1;
  rule.precision0 = inv0.inverse;
  rule.precision1 = inv1.inverse;
  return rule;
}

Label predict_lda(const GaussianModelFit& fit, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return lda_rule(fit).predict(x);
}

Label predict_qda(const GaussianModelFit& fit, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return qda_rule(fit).predict(x);
}

namespace {

// Majority among the k nearest rows of `train`, optionally skipping one row.
Label knn_vote(const LabeledDataset& train, int k, const Eigen::Ref<const Eigen::VectorXd>& x,
               std::ptrdiff_t skip) {
  const Eigen::Index n = train.size();
  const Eigen::Index available = skip >= 0 ? n - 1 : n;
  if (k < 1 || k > available) {
    throw Error(ErrorCode::InvalidK, "k=" + std::to_string(k) + " with " + std::to_string(available) +
                                         " training points");
  }
  std::vector<std::pair<double, Eigen::Index>> dist;
  dist.reserve(static_cast<std::size_t>(available));
  std::size_t class1 = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == skip) continue;
    dist.emplace_back((train.features.row(i).transpose() - x).squaredNorm(), i);
    class1 += train.labels[static_cast<std::size_t>(i)] == 1;
  }
  // Pair comparison orders equal distances by index.
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
  int votes1 = 0;
  for (int j = 0; j < k; ++j) votes1 += train.labels[static_cast<std::size_t>(dist[static_cast<std::size_t>(j)].second)];
  const int votes0 = k - votes1;
  if (votes1 != votes0) return votes1 > votes0 ? 1 : 0;
  const std::size_t class0 = static_cast<std::size_t>(available) - class1;
  return class1 > class0 ? 1 : 0;
}

}  // namespace

Label KnnRule::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  require_dim(x, train.dim());
  return knn_vote(train, k, x, -1);
}

Label KnnRule::predict_held_out(std::size_t i) const {
  const auto row = static_cast<Eigen::Index>(i);
  const Eigen::VectorXd x = train.features.row(row).transpose();
  return knn_vote(train, k, x, static_cast<std::ptrdiff_t>(row));
}

Label predict_knn(const LabeledDataset& train, int k, const Eigen::Ref<const Eigen::VectorXd>& x) {
  require_dim(x, train.dim());
  return knn_vote(train, k, x, -1);
}

std::string_view to_string(BaseKind kind) {
  switch (kind) {
    case BaseKind::LDA: return "lda";
    case BaseKind::QDA: return "qda";
    case BaseKind::KNN: return "knn";
  }
  return "lda";
}

BaseKind parse_base_kind(std::string_view name) {
  if (name == "lda" || name == "LDA") return BaseKind::LDA;
  if (name == "qda" || name == "QDA") return BaseKind::QDA;
  if (name == "knn" || name == "KNN") return BaseKind::KNN;
  throw Error(ErrorCode::InvalidArgument, "unknown base classifier '" + std::string(name) + "'");
}

FittedBase fit_base(const BaseClassifierSpec& spec, const LabeledDataset& data) {
  switch (spec.kind) {
    case BaseKind::LDA: return lda_rule(fit_gaussian_model(data, true));
    case BaseKind::QDA: return qda_rule(fit_gaussian_model(data, false));
    case BaseKind::KNN:
      if (spec.knn_k < 1 || spec.knn_k > data.size()) {
        throw Error(ErrorCode::InvalidK, "k=" + std::to_string(spec.knn_k) + " with n=" + std::to_string(data.size()));
      }
      return KnnRule{data, spec.knn_k};
  }
  throw Error(ErrorCode::InvalidArgument, "unknown base classifier");
}

Label predict(const FittedBase& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return std::visit([&](const auto& rule) { return rule.predict(x); }, model);
}

double GaussianPopulation::delta() const {
  const Eigen::VectorXd diff = mu1 - mu0;
  return std::sqrt(diff.dot(sigma.llt().solve(diff)));
}

Label bayes_lda_classify(const GaussianPopulation& pop, const Eigen::Ref<const Eigen::VectorXd>& x) {
  require_dim(x, pop.mu0.size());
  const Eigen::VectorXd w = pop.sigma.llt().solve(pop.mu1 - pop.mu0);
  const double g = std::log(pop.pi1 / pop.pi0) + (x - 0.5 * (pop.mu1 + pop.mu0)).dot(w);
  return g >= 0.0 ? 1 : 0;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double bayes_lda_risk(double pi0, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorCode::DegenerateSeparation, "Delta must be > 0");
  if (!(pi0 >= 0.0 && pi0 <= 1.0)) throw Error(ErrorCode::InvalidArgument, "prior outside [0,1]");
  const double pi1 = 1.0 - pi0;
  if (pi0 == 0.0 || pi1 == 0.0) return 0.0;
  return pi0 * normal_cdf(std::log(pi1 / pi0) / delta - delta / 2.0) +
         pi1 * normal_cdf(std::log(pi0 / pi1) / delta - delta / 2.0);
}

double bayes_lda_risk(const GaussianPopulation& pop) { return bayes_lda_risk(pop.pi0, pop.delta()); }

}  // namespace rpclass
