#pragma once

#include <nlohmann/json.hpp>

#include "rpclass/base_classifiers.hpp"
#include "rpclass/rng.hpp"

namespace rpclass {

enum class SyntheticModel { GaussianCommonCov, SparseLinear };

// Two Gaussian classes with common covariance. mu0 = 0 and mu1 is scaled so
// the Mahalanobis separation equals `delta`:
//   GaussianCommonCov: mu1 proportional to the all-ones vector;
//   SparseLinear:      mu1 nonzero on the first `support` coordinates only.
// Covariance is AR(1), Sigma_ij = rho^|i-j| (rho = 0 gives the identity).
struct SyntheticSpec {
  SyntheticModel model = SyntheticModel::GaussianCommonCov;
  Eigen::Index p = 10;
  double pi0 = 0.5;
  double delta = 2.0;
  Eigen::Index support = 3;
  double rho = 0.0;

  GaussianPopulation population() const;
};

// Delta giving the requested Bayes risk at prior pi0.
double delta_for_bayes_risk(double pi0, double risk);

LabeledDataset sample_population(const GaussianPopulation& pop, Eigen::Index n, RngSeed seed);
LabeledDataset generate_synthetic(const SyntheticSpec& spec, Eigen::Index n, RngSeed seed);

// Keys: model ("gaussian" | "sparse_linear"), p, pi0, delta or bayes_risk, support, rho.
SyntheticSpec synthetic_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SyntheticSpec& spec);

}  // namespace rpclass
