#include "rpclass/lda_sketch.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "rpclass/error.hpp"

namespace rpclass {

namespace {

// Summands are reduced in blocks of this size, then blocks in index order, so
// the floating-point sum does not depend on the thread count.
constexpr int kBlock = 32;

PrecisionEnsembleEstimate::Term make_term(const Eigen::MatrixXd& sigma_hat, const Projection& a, int b) {
  Eigen::MatrixXd inner = a.matrix() * sigma_hat * a.matrix().transpose();
  inner = 0.5 * (inner + inner.transpose()).eval();
  try {
    return {a.matrix(), invert_covariance(inner).inverse};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularCovariance) throw;
    throw Error(ErrorCode::SingularSketch, "A S A^T is numerically singular for projection b=" + std::to_string(b));
  }
}

void check_sigma(const Eigen::MatrixXd& sigma_hat, Eigen::Index d) {
  if (sigma_hat.rows() != sigma_hat.cols() || sigma_hat.rows() < 1) {
    throw Error(ErrorCode::DimMismatch, "covariance must be square and nonempty");
  }
  if (d < 1 || d > sigma_hat.rows()) {
    throw Error(ErrorCode::InvalidDims, "projected dimension d=" + std::to_string(d) + " must lie in [1, " +
                                            std::to_string(sigma_hat.rows()) + "]");
  }
}

}  // namespace

PrecisionEnsembleEstimate::PrecisionEnsembleEstimate(Eigen::Index p, Eigen::Index d, int b,
                                                     ProjectionFamily family, RngSeed seed,
                                                     std::optional<Eigen::MatrixXd> matrix,
                                                     std::vector<Term> terms)
    : p_(p), d_(d), b_(b), family_(family), seed_(seed), matrix_(std::move(matrix)), terms_(std::move(terms)) {}

const Eigen::MatrixXd& PrecisionEnsembleEstimate::matrix() const {
  if (!matrix_) throw Error(ErrorCode::InvalidArgument, "precision estimate is stored in factored form");
  return *matrix_;
}

Eigen::VectorXd PrecisionEnsembleEstimate::apply(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  require_dim(v, p_);
  if (matrix_) return *matrix_ * v;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(p_);
  for (const Term& t : terms_) out.noalias() += t.projection.transpose() * (t.inner_inverse * (t.projection * v));
  return out / static_cast<double>(b_);
}

RngSeed summand_seed(RngSeed master, int b) { return derive(master, {static_cast<std::uint64_t>(b)}); }

PrecisionEnsembleEstimate precision_ensemble(const Eigen::MatrixXd& sigma_hat, Eigen::Index d, int b,
                                             ProjectionFamily family, RngSeed seed,
                                             Eigen::Index materialize_limit) {
  check_sigma(sigma_hat, d);
  if (b < 1) throw Error(ErrorCode::InvalidArgument, "ensemble size B must be >= 1");
  const Eigen::Index p = sigma_hat.rows();
  const int blocks = (b + kBlock - 1) / kBlock;
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(blocks));

  auto term_at = [&](int i) {
    return make_term(sigma_hat, sample_projection(family, d, p, summand_seed(seed, i)), i);
  };

  if (p > materialize_limit) {
    std::vector<PrecisionEnsembleEstimate::Term> terms(static_cast<std::size_t>(b));
#pragma omp parallel for schedule(dynamic)
    for (int blk = 0; blk < blocks; ++blk) {
      try {
        for (int i = blk * kBlock; i < std::min(b, (blk + 1) * kBlock); ++i) terms[static_cast<std::size_t>(i)] = term_at(i);
      } catch (...) {
        failures[static_cast<std::size_t>(blk)] = std::current_exception();
      }
    }
    for (const auto& f : failures)
      if (f) std::rethrow_exception(f);
    return {p, d, b, family, seed, std::nullopt, std::move(terms)};
  }

  std::vector<Eigen::MatrixXd> partial(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(dynamic)
  for (int blk = 0; blk < blocks; ++blk) {
    try {
      Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p, p);
      for (int i = blk * kBlock; i < std::min(b, (blk + 1) * kBlock); ++i) {
        const auto t = term_at(i);
        const Eigen::MatrixXd half = t.inner_inverse * t.projection;  // d x p
        acc.noalias() += t.projection.transpose() * half;
      }
      partial[static_cast<std::size_t>(blk)] = std::move(acc);
    } catch (...) {
      failures[static_cast<std::size_t>(blk)] = std::current_exception();
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(p, p);
  for (const auto& part : partial) sum += part;
  sum /= static_cast<double>(b);
  Eigen::MatrixXd symmetric = 0.5 * (sum + sum.transpose());
  return {p, d, b, family, seed, std::move(symmetric), {}};
}

Label predict_lda_ensemble(const GaussianModelFit& fit, const PrecisionEnsembleEstimate& prec,
                           const Eigen::Ref<const Eigen::VectorXd>& x) {
  require_dim(x, prec.dim());
  const double g = std::log(fit.pi1 / fit.pi0) + (x - 0.5 * (fit.mu1 + fit.mu0)).dot(prec.apply(fit.mu1 - fit.mu0));
  return g >= 0.0 ? 1 : 0;
}

Label LdaEnsembleModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const { return rule.predict(x); }

LdaEnsembleModel fit_lda_ensemble(const LabeledDataset& data, Eigen::Index d, int b, ProjectionFamily family,
                                  RngSeed seed) {
  GaussianModelFit fit = fit_gaussian_model(data, true);
  PrecisionEnsembleEstimate prec = precision_ensemble(fit.sigma, d, b, family, seed);
  LdaRule rule;
  rule.log_prior_ratio = std::log(fit.pi1 / fit.pi0);
  rule.midpoint = 0.5 * (fit.mu1 + fit.mu0);
  rule.direction = prec.apply(fit.mu1 - fit.mu0);
  return {std::move(fit), std::move(prec), std::move(rule)};
}

Eigen::Index default_sketch_dim(Eigen::Index n, Eigen::Index p) {
  return std::max<Eigen::Index>(1, std::min(n - 2, p) / 2);
}

Label SketchedLdaModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const { return rule.predict(x); }

SketchedLdaModel sketch_lda(const GaussianModelFit& fit, const Projection& a) {
  check_sigma(fit.sigma, a.rows());
  if (a.cols() != fit.sigma.rows()) throw Error(ErrorCode::DimMismatch, "projection does not match model dimension");
  const auto term = make_term(fit.sigma, a, 0);
  LdaRule rule;
  rule.log_prior_ratio = std::log(fit.pi1 / fit.pi0);
  rule.midpoint = 0.5 * (fit.mu1 + fit.mu0);
  rule.direction = a.matrix().transpose() * (term.inner_inverse * (a.matrix() * (fit.mu1 - fit.mu0)));
  return {fit, a, std::move(rule)};
}

SketchedLdaModel fit_sketched_lda(const LabeledDataset& data, Eigen::Index d, ProjectionFamily family,
                                  RngSeed seed) {
  GaussianModelFit fit = fit_gaussian_model(data, true);
  if (d < 1 || d > data.dim()) {
    throw Error(ErrorCode::InvalidDims, "projected dimension d=" + std::to_string(d) + " must lie in [1, " +
                                            std::to_string(data.dim()) + "]");
  }
  return sketch_lda(fit, sample_projection(family, d, data.dim(), seed));
}

Label predict_sketched_lda(const SketchedLdaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return model.predict(x);
}

}  // namespace rpclass
