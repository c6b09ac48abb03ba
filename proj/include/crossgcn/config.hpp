#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "crossgcn/model.hpp"
#include "crossgcn/training.hpp"

namespace crossgcn::config {

/// Flat experiment configuration. File format is `key = value` lines
/// (TOML-style scalars, `#` comments); unknown keys are rejected so a typo'd
/// hyperparameter cannot silently run with a default.
struct ExperimentConfig {
  std::string dataset;            // path to a prepared dataset directory
  std::string variant = "cross";  // cross | cross-fix | gcn | gin
  index_t layers = 2;
  index_t hidden = 16;      // E
  index_t order = 2;        // K for cross layers
  bool cross_layer1 = true; // per-layer toggles: false sets that layer's K to 1
  bool cross_layer2 = true;
  real dropout = 0.5;
  real weight_decay = 5e-4;
  real lr = 0.01;
  index_t epochs = 200;
  index_t n_splits = 20;
  std::uint64_t seed = 1;
  real alpha1 = 1.0;  // initial order weights (trained further unless cross-fix)
  real alpha2 = 1.0;
  index_t gin_hidden = 0;  // 0 means same as hidden
  bool bias_outside = false;
  bool use_fixed_split = false;
  index_t jobs = 1;
};

/// Parses a config file. Throws DataError with a line number on malformed
/// lines, unknown keys, duplicate keys, or bad values.
ExperimentConfig parse_config_file(const std::string& path);

/// Applies one `key=value` override (the CLI's repeatable --set flag).
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

/// Cross-field validation (layer count, ranges). Throws DataError.
void validate(const ExperimentConfig& cfg);

/// Expands the flat config into the model's layer stack for a dataset with
/// the given feature width and class count.
model::ModelConfig build_model_config(const ExperimentConfig& cfg, index_t in_dim,
                                      index_t n_classes);

training::TrainOptions build_train_options(const ExperimentConfig& cfg);

nlohmann::json config_to_json(const ExperimentConfig& cfg);

}  // namespace crossgcn::config
