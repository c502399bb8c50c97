#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <variant>

#include "rpclass/lda_sketch.hpp"
#include "rpclass/rp_ensemble.hpp"

namespace rpclass {

// Any model the CLI can train, save and apply.
using AnyModel = std::variant<RpEnsembleModel, SketchedLdaModel, LdaEnsembleModel, FittedBase>;

// Format: {"format": "rpclass-model", "version": 1, "type": ..., ...}.
// Doubles are written with round-trip precision, so a reloaded model
// predicts bit-identically.
nlohmann::json to_json(const AnyModel& model);
AnyModel model_from_json(const nlohmann::json& j);

void save_model(const AnyModel& model, const std::filesystem::path& path);
AnyModel load_model(const std::filesystem::path& path);

Label predict(const AnyModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::Index input_dim(const AnyModel& model);

nlohmann::json to_json(const RpEnsembleConfig& config);
RpEnsembleConfig rp_config_from_json(const nlohmann::json& j);

}  // namespace rpclass
