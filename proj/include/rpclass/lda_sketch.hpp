#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "rpclass/base_classifiers.hpp"
#include "rpclass/projections.hpp"

namespace rpclass {

// Above this ambient dimension the averaged precision is kept in factored form.
inline constexpr Eigen::Index kMaterializeLimit = 2000;

// (1/B) sum_b A_b^T (A_b S A_b^T)^{-1} A_b.
class PrecisionEnsembleEstimate {
 public:
  struct Term {
    Eigen::MatrixXd projection;     // d x p
    Eigen::MatrixXd inner_inverse;  // (A S A^T)^{-1}, d x d
  };

  PrecisionEnsembleEstimate(Eigen::Index p, Eigen::Index d, int b, ProjectionFamily family,
                            RngSeed seed, std::optional<Eigen::MatrixXd> matrix,
                            std::vector<Term> terms);

  Eigen::Index dim() const { return p_; }
  Eigen::Index projected_dim() const { return d_; }
  int ensemble_size() const { return b_; }
  ProjectionFamily family() const { return family_; }
  RngSeed seed() const { return seed_; }

  bool materialized() const { return matrix_.has_value(); }
  // Requires materialized().
  const Eigen::MatrixXd& matrix() const;

  // Estimate times v, for either storage form.
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& v) const;

 private:
  Eigen::Index p_;
  Eigen::Index d_;
  int b_;
  ProjectionFamily family_;
  RngSeed seed_;
  std::optional<Eigen::MatrixXd> matrix_;
  std::vector<Term> terms_;
};

// Seed of summand b (zero-based).
RngSeed summand_seed(RngSeed master, int b);

// Throws SingularSketch naming the first offending b.
PrecisionEnsembleEstimate precision_ensemble(const Eigen::MatrixXd& sigma_hat, Eigen::Index d,
                                             int b, ProjectionFamily family, RngSeed seed,
                                             Eigen::Index materialize_limit = kMaterializeLimit);

Label predict_lda_ensemble(const GaussianModelFit& fit, const PrecisionEnsembleEstimate& prec,
                           const Eigen::Ref<const Eigen::VectorXd>& x);

// Plug-in LDA with the ensemble precision; the rule is precomputed at fit.
struct LdaEnsembleModel {
  GaussianModelFit fit;
  PrecisionEnsembleEstimate precision;
  LdaRule rule;

  Label predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

LdaEnsembleModel fit_lda_ensemble(const LabeledDataset& data, Eigen::Index d, int b,
                                  ProjectionFamily family, RngSeed seed);

// floor(min(n - 2, p) / 2), at least 1.
Eigen::Index default_sketch_dim(Eigen::Index n, Eigen::Index p);

struct SketchedLdaModel {
  GaussianModelFit fit;
  Projection projection;
  LdaRule rule;  // ambient direction A^T (A S A^T)^{-1} A (mu1 - mu0)

  Label predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

SketchedLdaModel sketch_lda(const GaussianModelFit& fit, const Projection& a);
SketchedLdaModel fit_sketched_lda(const LabeledDataset& data, Eigen::Index d,
                                  ProjectionFamily family, RngSeed seed);
Label predict_sketched_lda(const SketchedLdaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace rpclass
