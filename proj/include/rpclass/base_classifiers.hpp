#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string_view>
#include <variant>

#include "rpclass/dataset.hpp"

namespace rpclass {

// Reciprocal condition number below which a covariance is treated as singular.
inline constexpr double kRcondThreshold = 1e-12;

struct GaussianModelFit {
  double pi0 = 0.5;
  double pi1 = 0.5;
  Eigen::VectorXd mu0;
  Eigen::VectorXd mu1;
  // Pooled covariance with 1/(n-2) normalization. Empty when fitted unpooled.
  Eigen::MatrixXd sigma;
  // Per-class covariances with 1/(n_r-1) normalization. Empty when fitted pooled.
  Eigen::MatrixXd sigma0;
  Eigen::MatrixXd sigma1;
};

// pooled=true estimates the common covariance (needs n >= 3); pooled=false
// estimates one covariance per class (needs n_r >= 2).
GaussianModelFit fit_gaussian_model(const LabeledDataset& data, bool pooled);

// Inverse and log-determinant of a symmetric matrix after a conditioning
// check. Throws SingularCovariance when rcond < kRcondThreshold.
struct SymmetricInverse {
  Eigen::MatrixXd inverse;
  double log_det;
};
SymmetricInverse invert_covariance(const Eigen::MatrixXd& sigma);

// log(pi1/pi0) + (x - (mu1+mu0)/2)^T w >= 0, with w the discriminant direction.
struct LdaRule {
  double log_prior_ratio = 0.0;
  Eigen::VectorXd midpoint;
  Eigen::VectorXd direction;

  double discriminant(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Label predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return discriminant(x) >= 0.0 ? 1 : 0;
  }
};

struct QdaRule {
  double constant = 0.0;  // log(pi1/pi0) - (log det S1 - log det S0) / 2
  Eigen::VectorXd mu0;
  Eigen::VectorXd mu1;
  Eigen::MatrixXd precision0;
  Eigen::MatrixXd precision1;

  double discriminant(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Label predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return discriminant(x) >= 0.0 ? 1 : 0;
  }
};

// k-nearest-neighbour vote. Distance ties go to the lower training index;
// vote ties go to the class with more training points, then to class 0.
struct KnnRule {
  LabeledDataset train;
  int k = 5;

  Label predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  // Prediction at training row i using the other n-1 rows only.
  Label predict_held_out(std::size_t i) const;
};

LdaRule lda_rule(const GaussianModelFit& fit);
QdaRule qda_rule(const GaussianModelFit& fit);

Label predict_lda(const GaussianModelFit& fit, const Eigen::Ref<const Eigen::VectorXd>& x);
Label predict_qda(const GaussianModelFit& fit, const Eigen::Ref<const Eigen::VectorXd>& x);
Label predict_knn(const LabeledDataset& train, int k, const Eigen::Ref<const Eigen::VectorXd>& x);

enum class BaseKind { LDA, QDA, KNN };

std::string_view to_string(BaseKind kind);
BaseKind parse_base_kind(std::string_view name);

struct BaseClassifierSpec {
  BaseKind kind = BaseKind::LDA;
  int knn_k = 5;
};

using FittedBase = std::variant<LdaRule, QdaRule, KnnRule>;

FittedBase fit_base(const BaseClassifierSpec& spec, const LabeledDataset& data);
Label predict(const FittedBase& model, const Eigen::Ref<const Eigen::VectorXd>& x);

// Population-level Gaussian model with common covariance.
struct GaussianPopulation {
  double pi0 = 0.5;
  double pi1 = 0.5;
  Eigen::VectorXd mu0;
  Eigen::VectorXd mu1;
  Eigen::MatrixXd sigma;

  // Mahalanobis distance between the class means.
  double delta() const;
};

Label bayes_lda_classify(const GaussianPopulation& pop, const Eigen::Ref<const Eigen::VectorXd>& x);
double bayes_lda_risk(const GaussianPopulation& pop);
// Same risk in terms of the priors and Delta directly.
double bayes_lda_risk(double pi0, double delta);

double normal_cdf(double z);

}  // namespace rpclass
