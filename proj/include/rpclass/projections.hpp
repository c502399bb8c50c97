#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string_view>

#include "rpclass/dataset.hpp"
#include "rpclass/rng.hpp"

namespace rpclass {

enum class ProjectionFamily { Gaussian, Haar, AxisAligned, Sparse };

std::string_view to_string(ProjectionFamily family);
ProjectionFamily parse_family(std::string_view name);

// A d x p linear map. Immutable once sampled.
class Projection {
 public:
  Projection(Eigen::MatrixXd entries, ProjectionFamily family);

  Eigen::Index rows() const { return entries_.rows(); }
  Eigen::Index cols() const { return entries_.cols(); }
  const Eigen::MatrixXd& matrix() const { return entries_; }
  ProjectionFamily family() const { return family_; }

  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  Eigen::MatrixXd entries_;
  ProjectionFamily family_;
};

// Entries i.i.d. N(0, 1/p).
Projection sample_gaussian(Eigen::Index d, Eigen::Index p, RngSeed seed);
// Uniform on {A : A A^T = I_d}.
Projection sample_haar(Eigen::Index d, Eigen::Index p, RngSeed seed);
// d distinct standard basis rows chosen uniformly without replacement.
Projection sample_axis_aligned(Eigen::Index d, Eigen::Index p, RngSeed seed);
// Entries +-sqrt(s/p) with probability 1/(2s) each, 0 otherwise.
Projection sample_sparse(Eigen::Index d, Eigen::Index p, double sparsity, RngSeed seed);

double default_sparsity(Eigen::Index p);

// Dispatches on family. Sparse uses `sparsity` or default_sparsity(p).
Projection sample_projection(ProjectionFamily family, Eigen::Index d, Eigen::Index p,
                             RngSeed seed, std::optional<double> sparsity = std::nullopt);

LabeledDataset project(const Projection& a, const LabeledDataset& data);

struct JlParams {
  double epsilon;
  double delta;
  long n_points;
};

// 16 log(n/delta) / eps^2, before rounding.
double jl_bound_value(const JlParams& params);
// Integer projected dimension used for the guarantee: ceil(jl_bound_value) + 1.
long jl_dimension_bound(const JlParams& params);

struct DistortionReport {
  double min_ratio;
  double max_ratio;
  long pairs;
};

// Extremes of |Ax_i - Ax_j|^2 / |x_i - x_j|^2 over all pairs i < j of the rows of `points`.
DistortionReport check_distortion(const Projection& a, const Eigen::MatrixXd& points);

}  // namespace rpclass
