#include "rpclass/model_io.hpp"

#include <fstream>
#include <string>

#include "rpclass/error.hpp"

namespace rpclass {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vec_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json mat_json(const Eigen::MatrixXd& m) {
  std::vector<double> entries;
  entries.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) entries.push_back(m(i, j));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

Eigen::MatrixXd mat_from(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto entries = j.at("entries").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(entries.size()) != rows * cols) {
    throw Error(ErrorCode::ParseError, "matrix entry count does not match its shape");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = entries[static_cast<std::size_t>(i * cols + k)];
  return m;
}

json projection_json(const Projection& a) {
  json j = mat_json(a.matrix());
  j["family"] = std::string(to_string(a.family()));
  return j;
}

Projection projection_from(const json& j) {
  return Projection(mat_from(j), parse_family(j.at("family").get<std::string>()));
}

json lda_json(const LdaRule& r) {
  return {{"kind", "lda"},
          {"log_prior_ratio", r.log_prior_ratio},
          {"midpoint", vec_json(r.midpoint)},
          {"direction", vec_json(r.direction)}};
}

LdaRule lda_from(const json& j) {
  return LdaRule{j.at("log_prior_ratio").get<double>(), vec_from(j.at("midpoint")), vec_from(j.at("direction"))};
}

json base_json(const FittedBase& base) {
  return std::visit(
      [](const auto& r) -> json {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, LdaRule>) {
          return lda_json(r);
        } else if constexpr (std::is_same_v<T, QdaRule>) {
          return {{"kind", "qda"},
                  {"constant", r.constant},
                  {"mu0", vec_json(r.mu0)},
                  {"mu1", vec_json(r.mu1)},
                  {"precision0", mat_json(r.precision0)},
                  {"precision1", mat_json(r.precision1)}};
        } else {
          return {{"kind", "knn"}, {"k", r.k}, {"features", mat_json(r.train.features)}, {"labels", r.train.labels}};
        }
      },
      base);
}

FittedBase base_from(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "lda") return lda_from(j);
  if (kind == "qda") {
    return QdaRule{j.at("constant").get<double>(), vec_from(j.at("mu0")), vec_from(j.at("mu1")),
                   mat_from(j.at("precision0")), mat_from(j.at("precision1"))};
  }
  if (kind == "knn") {
    return KnnRule{LabeledDataset(mat_from(j.at("features")), j.at("labels").get<std::vector<Label>>()),
                   j.at("k").get<int>()};
  }
  throw Error(ErrorCode::ParseError, "unknown base classifier kind '" + kind + "'");
}

json fit_json(const GaussianModelFit& f) {
  json j = {{"pi0", f.pi0}, {"pi1", f.pi1}, {"mu0", vec_json(f.mu0)}, {"mu1", vec_json(f.mu1)}};
  if (f.sigma.size() > 0) j["sigma"] = mat_json(f.sigma);
  return j;
}

GaussianModelFit fit_from(const json& j) {
  GaussianModelFit f;
  f.pi0 = j.at("pi0").get<double>();
  f.pi1 = j.at("pi1").get<double>();
  f.mu0 = vec_from(j.at("mu0"));
  f.mu1 = vec_from(j.at("mu1"));
  if (j.contains("sigma")) f.sigma = mat_from(j.at("sigma"));
  return f;
}

json header(const char* type) { return {{"format", "rpclass-model"}, {"version", kFormatVersion}, {"type", type}}; }

}  // namespace

json to_json(const RpEnsembleConfig& c) {
  json j = {{"d", c.d},
            {"b1", c.b1},
            {"b2", c.b2},
            {"base", std::string(to_string(c.base.kind))},
            {"k", c.base.knn_k},
            {"estimator", std::string(to_string(c.resolved_estimator()))},
            {"family", std::string(to_string(c.family))},
            {"seed", c.seed.value}};
  j["alpha"] = c.alpha ? json(*c.alpha) : json("data-driven");
  if (c.sparsity) j["sparsity"] = *c.sparsity;
  return j;
}

RpEnsembleConfig rp_config_from_json(const json& j) {
  RpEnsembleConfig c;
  c.d = j.value("d", Eigen::Index{5});
  c.b1 = j.value("b1", 500);
  c.b2 = j.value("b2", 50);
  c.base.kind = parse_base_kind(j.value("base", std::string("lda")));
  c.base.knn_k = j.value("k", 5);
  if (j.contains("estimator")) c.estimator = parse_estimator(j.at("estimator").get<std::string>());
  c.family = parse_family(j.value("family", std::string("gaussian")));
  c.seed.value = j.value("seed", std::uint64_t{0});
  if (j.contains("alpha") && j.at("alpha").is_number()) c.alpha = j.at("alpha").get<double>();
  if (j.contains("sparsity")) c.sparsity = j.at("sparsity").get<double>();
  return c;
}

json to_json(const AnyModel& model) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, RpEnsembleModel>) {
          json j = header("rp_ensemble");
          j["config"] = to_json(m.config);
          j["ambient_dim"] = m.ambient_dim;
          j["alpha"] = m.alpha;
          json groups = json::array();
          for (std::size_t b = 0; b < m.bases.size(); ++b) {
            groups.push_back({{"projection", projection_json(m.projections[b])},
                              {"selected_candidate", m.selected_candidate[b]},
                              {"estimated_error", m.selected_errors[b]},
                              {"base", base_json(m.bases[b])}});
          }
          j["groups"] = std::move(groups);
          return j;
        } else if constexpr (std::is_same_v<T, SketchedLdaModel>) {
          json j = header("sketched_lda");
          j["fit"] = fit_json(m.fit);
          j["projection"] = projection_json(m.projection);
          j["rule"] = lda_json(m.rule);
          return j;
        } else if constexpr (std::is_same_v<T, LdaEnsembleModel>) {
          json j = header("lda_ensemble");
          j["fit"] = fit_json(m.fit);
          j["d"] = m.precision.projected_dim();
          j["b"] = m.precision.ensemble_size();
          j["family"] = std::string(to_string(m.precision.family()));
          j["seed"] = m.precision.seed().value;
          if (m.precision.materialized()) j["precision"] = mat_json(m.precision.matrix());
          j["rule"] = lda_json(m.rule);
          return j;
        } else {
          json j = header("base");
          j["base"] = base_json(m);
          return j;
        }
      },
      model);
}

AnyModel model_from_json(const json& j) {
  try {
    if (j.value("format", "") != "rpclass-model") throw Error(ErrorCode::ParseError, "not an rpclass model file");
    if (j.at("version").get<int>() != kFormatVersion) throw Error(ErrorCode::ParseError, "unsupported model version");
    const std::string type = j.at("type").get<std::string>();
    if (type == "rp_ensemble") {
      RpEnsembleModel m;
      m.config = rp_config_from_json(j.at("config"));
      m.ambient_dim = j.at("ambient_dim").get<Eigen::Index>();
      m.alpha = j.at("alpha").get<double>();
      for (const json& g : j.at("groups")) {
        m.projections.push_back(projection_from(g.at("projection")));
        m.selected_candidate.push_back(g.at("selected_candidate").get<int>());
        m.selected_errors.push_back(g.at("estimated_error").get<double>());
        m.bases.push_back(base_from(g.at("base")));
      }
      return m;
    }
    if (type == "sketched_lda") {
      return SketchedLdaModel{fit_from(j.at("fit")), projection_from(j.at("projection")), lda_from(j.at("rule"))};
    }
    if (type == "lda_ensemble") {
      GaussianModelFit fit = fit_from(j.at("fit"));
      std::optional<Eigen::MatrixXd> matrix;
      if (j.contains("precision")) matrix = mat_from(j.at("precision"));
      const auto p = static_cast<Eigen::Index>(fit.mu0.size());
      PrecisionEnsembleEstimate prec(p, j.at("d").get<Eigen::Index>(), j.at("b").get<int>(),
                                     parse_family(j.at("family").get<std::string>()),
                                     RngSeed{j.at("seed").get<std::uint64_t>()}, std::move(matrix), {});
      return LdaEnsembleModel{std::move(fit), std::move(prec), lda_from(j.at("rule"))};
    }
    if (type == "base") return base_from(j.at("base"));
    throw Error(ErrorCode::ParseError, "unknown model type '" + type + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed model: ") + e.what());
  }
}

void save_model(const AnyModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << to_json(model).dump() << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

AnyModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

Label predict(const AnyModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return std::visit(
      [&](const auto& m) -> Label {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, RpEnsembleModel>) {
          return predict_rp_ensemble(m, x);
        } else if constexpr (std::is_same_v<T, FittedBase>) {
          return rpclass::predict(m, x);
        } else {
          return m.predict(x);
        }
      },
      model);
}

Eigen::Index input_dim(const AnyModel& model) {
  return std::visit(
      [](const auto& m) -> Eigen::Index {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, RpEnsembleModel>) {
          return m.ambient_dim;
        } else if constexpr (std::is_same_v<T, FittedBase>) {
          return std::visit(
              [](const auto& r) -> Eigen::Index {
                using R = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<R, LdaRule>) return r.direction.size();
                else if constexpr (std::is_same_v<R, QdaRule>) return r.mu0.size();
                else return r.train.dim();
              },
              m);
        } else {
          return m.rule.direction.size();
        }
      },
      model);
}

}  // namespace rpclass
