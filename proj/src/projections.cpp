#include "rpclass/projections.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rpclass/error.hpp"

namespace rpclass {

namespace {

void check_dims(Eigen::Index d, Eigen::Index p) {
  if (d < 1 || p < 1 || d > p) {
    throw Error(ErrorCode::InvalidDims,
                "need 1 <= d <= p, got d=" + std::to_string(d) + " p=" + std::to_string(p));
  }
}

Eigen::MatrixXd standard_normal(Eigen::Index rows, Eigen::Index cols, Engine& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(rows, cols);
  // Row-major fill so the draw order does not depend on Eigen's storage order.
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = normal(rng);
  return g;
}

}  // namespace

std::string_view to_string(ProjectionFamily family) {
  switch (family) {
    case ProjectionFamily::Gaussian: return "gaussian";
    case ProjectionFamily::Haar: return "haar";
    case ProjectionFamily::AxisAligned: return "axis";
    case ProjectionFamily::Sparse: return "sparse";
  }
  return "gaussian";
}

ProjectionFamily parse_family(std::string_view name) {
  if (name == "gaussian") return ProjectionFamily::Gaussian;
  if (name == "haar") return ProjectionFamily::Haar;
  if (name == "axis" || name == "axis-aligned" || name == "axis_aligned") return ProjectionFamily::AxisAligned;
  if (name == "sparse") return ProjectionFamily::Sparse;
  throw Error(ErrorCode::InvalidArgument, "unknown projection family '" + std::string(name) + "'");
}

Projection::Projection(Eigen::MatrixXd entries, ProjectionFamily family)
    : entries_(std::move(entries)), family_(family) {
  check_dims(entries_.rows(), entries_.cols());
}

Eigen::VectorXd Projection::apply(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  require_dim(x, cols());
  return entries_ * x;
}

Projection sample_gaussian(Eigen::Index d, Eigen::Index p, RngSeed seed) {
  check_dims(d, p);
  Engine rng = make_engine(seed);
  return Projection(standard_normal(d, p, rng) / std::sqrt(static_cast<double>(p)),
                    ProjectionFamily::Gaussian);
}

Projection sample_haar(Eigen::Index d, Eigen::Index p, RngSeed seed) {
  check_dims(d, p);
  Engine rng = make_engine(seed);
  // QR of a p x d Gaussian matrix; fixing sign(R_ii) > 0 makes Q Haar distributed.
  Eigen::MatrixXd g = standard_normal(p, d, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(p, d);
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < d; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return Projection(q.transpose(), ProjectionFamily::Haar);
}

Projection sample_axis_aligned(Eigen::Index d, Eigen::Index p, RngSeed seed) {
  check_dims(d, p);
  Engine rng = make_engine(seed);
  // Partial Fisher-Yates: the first d slots are a uniform ordered d-subset.
  std::vector<Eigen::Index> coords(static_cast<std::size_t>(p));
  std::iota(coords.begin(), coords.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < d; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, p - 1);
    std::swap(coords[static_cast<std::size_t>(i)], coords[static_cast<std::size_t>(pick(rng))]);
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, p);
  for (Eigen::Index i = 0; i < d; ++i) a(i, coords[static_cast<std::size_t>(i)]) = 1.0;
  return Projection(std::move(a), ProjectionFamily::AxisAligned);
}

Projection sample_sparse(Eigen::Index d, Eigen::Index p, double sparsity, RngSeed seed) {
  check_dims(d, p);
  if (!(sparsity >= 1.0) || !std::isfinite(sparsity)) {
    throw Error(ErrorCode::InvalidSparsity, "sparsity must be >= 1, got " + std::to_string(sparsity));
  }
  Engine rng = make_engine(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double scale = std::sqrt(sparsity / static_cast<double>(p));
  const double half = 0.5 / sparsity;
  Eigen::MatrixXd a(d, p);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const double u = unif(rng);
      a(i, j) = u < half ? scale : (u < 2.0 * half ? -scale : 0.0);
    }
  }
  return Projection(std::move(a), ProjectionFamily::Sparse);
}

double default_sparsity(Eigen::Index p) { return std::max(1.0, std::sqrt(static_cast<double>(p))); }

Projection sample_projection(ProjectionFamily family, Eigen::Index d, Eigen::Index p, RngSeed seed,
                             std::optional<double> sparsity) {
  switch (family) {
    case ProjectionFamily::Gaussian: return sample_gaussian(d, p, seed);
    case ProjectionFamily::Haar: return sample_haar(d, p, seed);
    case ProjectionFamily::AxisAligned: return sample_axis_aligned(d, p, seed);
    case ProjectionFamily::Sparse: return sample_sparse(d, p, sparsity.value_or(default_sparsity(p)), seed);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown projection family");
}

LabeledDataset project(const Projection& a, const LabeledDataset& data) {
  if (a.cols() != data.dim()) {
    throw Error(ErrorCode::DimMismatch, "projection has " + std::to_string(a.cols()) +
                                            " columns, data has dimension " + std::to_string(data.dim()));
  }
  LabeledDataset out;
  out.features = data.features * a.matrix().transpose();
  out.labels = data.labels;
  return out;
}

double jl_bound_value(const JlParams& params) {
  if (!(params.epsilon > 0.0 && params.epsilon < 1.0) || !(params.delta > 0.0 && params.delta < 1.0) ||
      params.n_points < 2) {
    throw Error(ErrorCode::InvalidArgument, "JL parameters need eps, delta in (0,1) and n >= 2");
  }
  return 16.0 * std::log(static_cast<double>(params.n_points) / params.delta) /
         (params.epsilon * params.epsilon);
}

long jl_dimension_bound(const JlParams& params) {
  return static_cast<long>(std::ceil(jl_bound_value(params))) + 1;
}

DistortionReport check_distortion(const Projection& a, const Eigen::MatrixXd& points) {
  if (points.rows() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two points");
  if (points.cols() != a.cols()) {
    throw Error(ErrorCode::DimMismatch, "points have dimension " + std::to_string(points.cols()) +
                                            ", projection expects " + std::to_string(a.cols()));
  }
  const Eigen::MatrixXd projected = points * a.matrix().transpose();
  DistortionReport report{std::numeric_limits<double>::infinity(),
                          -std::numeric_limits<double>::infinity(), 0};
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < points.rows(); ++j) {
      const double before = (points.row(i) - points.row(j)).squaredNorm();
      if (before == 0.0) {
        throw Error(ErrorCode::DuplicatePoints,
                    "points " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
      const double ratio = (projected.row(i) - projected.row(j)).squaredNorm() / before;
      report.min_ratio = std::min(report.min_ratio, ratio);
      report.max_ratio = std::max(report.max_ratio, ratio);
      ++report.pairs;
    }
  }
  return report;
}

}  // namespace rpclass
