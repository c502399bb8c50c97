#include "rpclass/rp_ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include "rpclass/error.hpp"

namespace rpclass {

namespace {

void validate(const RpEnsembleConfig& config, Eigen::Index p) {
  if (config.d < 1 || config.d > p) {
    throw Error(ErrorCode::InvalidDims, "projected dimension d=" + std::to_string(config.d) +
                                            " must lie in [1, " + std::to_string(p) + "]");
  }
  if (config.b1 < 1 || config.b2 < 1) throw Error(ErrorCode::InvalidArgument, "B1 and B2 must be >= 1");
  if (config.alpha && !(*config.alpha >= 0.0 && *config.alpha <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in [0, 1]");
  }
}

struct GroupResult {
  std::optional<Projection> projection;
  std::optional<FittedBase> base;
  double error = 1.0;
  int candidate = -1;
  std::vector<double> candidate_errors;
};

GroupResult run_group(const LabeledDataset& data, const RpEnsembleConfig& config, int b1) {
  const EstimatorKind estimator = config.resolved_estimator();
  GroupResult out;
  if (config.keep_candidates) out.candidate_errors.assign(static_cast<std::size_t>(config.b2), 1.0);
  for (int b2 = 0; b2 < config.b2; ++b2) {
    Projection a = sample_projection(config.family, config.d, data.dim(),
                                     candidate_seed(config.seed, b1, b2), config.sparsity);
    const LabeledDataset projected = project(a, data);
    double value = 1.0;
    bool usable = true;
    try {
      value = estimate_error(estimator, config.base, projected).value;
    } catch (const Error& e) {
      // An unfittable candidate scores as the worst and is never selected.
      if (!is_fit_failure(e.code())) throw;
      usable = false;
    }
    if (config.keep_candidates) out.candidate_errors[static_cast<std::size_t>(b2)] = value;
    if (usable && (out.candidate < 0 || value < out.error)) {
      out.error = value;
      out.candidate = b2;
      out.projection = std::move(a);
    }
  }
  if (out.candidate < 0) {
    throw Error(ErrorCode::UntrainableEnsemble,
                "every candidate projection in group " + std::to_string(b1) + " failed to fit");
  }
  out.base = fit_base(config.base, project(*out.projection, data));
  return out;
}

}  // namespace

RngSeed candidate_seed(RngSeed master, int b1, int b2) {
  return derive(master, {static_cast<std::uint64_t>(b1), static_cast<std::uint64_t>(b2)});
}

RpEnsembleModel train_rp_ensemble(const LabeledDataset& data, const RpEnsembleConfig& config) {
  validate(config, data.dim());
  if (data.count(0) == 0 || data.count(1) == 0) {
    throw Error(ErrorCode::MissingClass, "training data must contain both classes");
  }

  const auto groups = static_cast<std::size_t>(config.b1);
  std::vector<GroupResult> results(groups);
  std::vector<std::exception_ptr> failures(groups);

#pragma omp parallel for schedule(dynamic)
  for (int b1 = 0; b1 < config.b1; ++b1) {
    try {
      results[static_cast<std::size_t>(b1)] = run_group(data, config, b1);
    } catch (...) {
      failures[static_cast<std::size_t>(b1)] = std::current_exception();
    }
  }
  for (const auto& failure : failures)
    if (failure) std::rethrow_exception(failure);

  RpEnsembleModel model;
  model.config = config;
  model.ambient_dim = data.dim();
  model.projections.reserve(groups);
  model.bases.reserve(groups);
  for (auto& r : results) {
    model.projections.push_back(std::move(*r.projection));
    model.bases.push_back(std::move(*r.base));
    model.selected_errors.push_back(r.error);
    model.selected_candidate.push_back(r.candidate);
    if (config.keep_candidates) model.candidate_errors.push_back(std::move(r.candidate_errors));
  }
  model.alpha = config.alpha ? *config.alpha : select_alpha(model, data);
  return model;
}

VoteFraction vote_fraction(const RpEnsembleModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  require_dim(x, model.ambient_dim);
  VoteFraction v{0, model.b1()};
  for (std::size_t b = 0; b < model.bases.size(); ++b) {
    const Eigen::VectorXd z = model.projections[b].matrix() * x;
    v.votes += predict(model.bases[b], z);
  }
  return v;
}

Label predict_rp_ensemble(const RpEnsembleModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return vote_fraction(model, x).nu() >= model.alpha ? 1 : 0;
}

double select_alpha(std::span<const VoteFraction> votes, std::span<const Label> labels) {
  if (votes.size() != labels.size()) throw Error(ErrorCode::DimMismatch, "votes and labels differ in length");
  const auto n = static_cast<double>(labels.size());
  const auto n1 = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  if (n1 == 0.0 || n1 == n) throw Error(ErrorCode::MissingClass, "alpha selection needs both classes");
  const double pi1 = n1 / n;

  std::vector<double> candidates{0.0, 1.0};
  for (const VoteFraction& v : votes) {
    candidates.push_back(v.nu());
    const double above = v.nu() + 0.5 / v.total;
    if (above <= 1.0) candidates.push_back(above);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  double best_alpha = 0.0;
  long best_mistakes = std::numeric_limits<long>::max();
  for (double alpha : candidates) {
    long mistakes = 0;
    for (std::size_t i = 0; i < votes.size(); ++i) {
      const Label predicted = votes[i].nu() >= alpha ? 1 : 0;
      mistakes += predicted != labels[i];
    }
    // Ascending scan keeps the smaller alpha on a full tie.
    if (mistakes < best_mistakes ||
        (mistakes == best_mistakes && std::abs(alpha - pi1) < std::abs(best_alpha - pi1))) {
      best_mistakes = mistakes;
      best_alpha = alpha;
    }
  }
  return best_alpha;
}

double select_alpha(const RpEnsembleModel& model, const LabeledDataset& data) {
  std::vector<VoteFraction> votes(static_cast<std::size_t>(data.size()));
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    votes[static_cast<std::size_t>(i)] = vote_fraction(model, data.features.row(i).transpose());
  }
  return select_alpha(votes, data.labels);
}

double test_error(const Classifier& classify, const LabeledDataset& test) {
  long mistakes = 0;
  for (Eigen::Index i = 0; i < test.size(); ++i) {
    mistakes += classify(test.features.row(i).transpose()) != test.labels[static_cast<std::size_t>(i)];
  }
  return static_cast<double>(mistakes) / static_cast<double>(test.size());
}

double test_error(const RpEnsembleModel& model, const LabeledDataset& test) {
  require_dim(test.features.row(0).transpose(), model.ambient_dim);
  long mistakes = 0;
#pragma omp parallel for schedule(static) reduction(+ : mistakes)
  for (Eigen::Index i = 0; i < test.size(); ++i) {
    mistakes += predict_rp_ensemble(model, test.features.row(i).transpose()) !=
                test.labels[static_cast<std::size_t>(i)];
  }
  return static_cast<double>(mistakes) / static_cast<double>(test.size());
}

}  // namespace rpclass
