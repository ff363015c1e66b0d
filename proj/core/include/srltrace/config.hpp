#pragma once

#include <cstdint>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "srltrace/features.hpp"
#include "srltrace/gbdt.hpp"
#include "srltrace/trace_model.hpp"

namespace srltrace {

// Everything that influences pipeline outputs. Config files are flat JSON
// objects whose keys are exactly the field names below (sessionizer and
// learner fields included, without prefixes).
struct PipelineConfig {
  SessionizerConfig sessionizer;
  double pass_fraction = 0.5;       // (0, 1]
  double decision_threshold = 0.5;  // (0, 1)
  FeatureSet feature_set = FeatureSet::kSrl;
  bool srl_only = false;
  GbdtParams learner;
  double test_fraction = 0.3;  // (0, 1)
  std::uint64_t seed = 7;      // split, permutation and echoed learner seed
  int permutation_repeats = 20;

  void validate() const;  // throws InvalidConfig

  FeatureOptions feature_options() const { return {sessionizer, pass_fraction, srl_only}; }

  bool operator==(const PipelineConfig&) const = default;
};

// Overwrites the fields named in `doc`. Unknown keys and ill-typed values
// throw InvalidConfig.
void apply_config(PipelineConfig& cfg, const nlohmann::json& doc);
PipelineConfig load_config_file(const std::filesystem::path& path);

// Flat key/value echo of every field, in a fixed key order.
nlohmann::ordered_json to_json(const PipelineConfig& cfg);

}  // namespace srltrace
