#include "rpclass/synthetic.hpp"

#include <cmath>
#include <string>

#include "rpclass/error.hpp"

namespace rpclass {

GaussianPopulation SyntheticSpec::population() const {
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "synthetic dimension p must be >= 1");
  if (!(pi0 >= 0.0 && pi0 <= 1.0)) throw Error(ErrorCode::InvalidArgument, "pi0 must lie in [0, 1]");
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be > 0");
  if (!(std::abs(rho) < 1.0)) throw Error(ErrorCode::InvalidArgument, "rho must lie in (-1, 1)");
  if (model == SyntheticModel::SparseLinear && (support < 1 || support > p)) {
    throw Error(ErrorCode::InvalidArgument, "sparse support must lie in [1, p]");
  }

  GaussianPopulation pop;
  pop.pi0 = pi0;
  pop.pi1 = 1.0 - pi0;
  pop.sigma.resize(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) pop.sigma(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
  pop.mu0 = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd direction = Eigen::VectorXd::Zero(p);
  if (model == SyntheticModel::SparseLinear)
    direction.head(support).setOnes();
  else
    direction.setOnes();
  const double scale = std::sqrt(direction.dot(pop.sigma.llt().solve(direction)));
  pop.mu1 = direction * (delta / scale);
  return pop;
}

double delta_for_bayes_risk(double pi0, double risk) {
  if (!(risk > 0.0 && risk < std::min(pi0, 1.0 - pi0))) {
    throw Error(ErrorCode::InvalidArgument, "target Bayes risk must lie in (0, min(pi0, pi1))");
  }
  // Risk is strictly decreasing in Delta.
  double lo = 1e-8;
  double hi = 1.0;
  while (bayes_lda_risk(pi0, hi) > risk) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (bayes_lda_risk(pi0, mid) > risk ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

LabeledDataset sample_population(const GaussianPopulation& pop, Eigen::Index n, RngSeed seed) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "sample size must be >= 1");
  const Eigen::Index p = pop.mu0.size();
  const Eigen::MatrixXd chol = pop.sigma.llt().matrixL();
  Engine rng = make_engine(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(n, p);
  std::vector<Label> y(static_cast<std::size_t>(n));
  Eigen::VectorXd z(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Label label = unif(rng) < pop.pi1 ? 1 : 0;
    for (Eigen::Index j = 0; j < p; ++j) z(j) = normal(rng);
    x.row(i) = ((label == 1 ? pop.mu1 : pop.mu0) + chol * z).transpose();
    y[static_cast<std::size_t>(i)] = label;
  }
  return LabeledDataset(std::move(x), std::move(y));
}

LabeledDataset generate_synthetic(const SyntheticSpec& spec, Eigen::Index n, RngSeed seed) {
  return sample_population(spec.population(), n, seed);
}

SyntheticSpec synthetic_from_json(const nlohmann::json& j) {
  SyntheticSpec s;
  const std::string model = j.value("model", std::string("gaussian"));
  if (model == "gaussian" || model == "GaussianCommonCov")
    s.model = SyntheticModel::GaussianCommonCov;
  else if (model == "sparse_linear" || model == "SparseLinear")
    s.model = SyntheticModel::SparseLinear;
  else
    throw Error(ErrorCode::ConfigError, "unknown synthetic model '" + model + "'");
  s.p = j.value("p", s.p);
  s.pi0 = j.value("pi0", s.pi0);
  s.support = j.value("support", s.support);
  s.rho = j.value("rho", s.rho);
  if (j.contains("bayes_risk")) {
    s.delta = delta_for_bayes_risk(s.pi0, j.at("bayes_risk").get<double>());
  } else {
    s.delta = j.value("delta", s.delta);
  }
  return s;
}

nlohmann::json to_json(const SyntheticSpec& s) {
  return {{"model", s.model == SyntheticModel::SparseLinear ? "sparse_linear" : "gaussian"},
          {"p", s.p},
          {"pi0", s.pi0},
          {"delta", s.delta},
          {"support", s.support},
          {"rho", s.rho}};
}

}  // namespace rpclass
