#include "srltrace/config.hpp"

#include <fstream>
#include <limits>

#include "srltrace/errors.hpp"

namespace srltrace {
namespace {

double as_number(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) throw InvalidConfig("config key '" + key + "' must be a number");
  return v.get<double>();
}

std::int64_t as_integer(const nlohmann::json& v, const std::string& key) {
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      throw InvalidConfig("config key '" + key + "' is out of range");
    }
    return static_cast<std::int64_t>(u);
  }
  if (!v.is_number_integer()) throw InvalidConfig("config key '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

int as_int(const nlohmann::json& v, const std::string& key) {
  const auto i = as_integer(v, key);
  if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) {
    throw InvalidConfig("config key '" + key + "' is out of range");
  }
  return static_cast<int>(i);
}

}  // namespace

void PipelineConfig::validate() const {
  sessionizer.validate();
  learner.validate();
  if (!(pass_fraction > 0.0 && pass_fraction <= 1.0)) {
    throw InvalidConfig("pass_fraction must be in (0, 1]");
  }
  if (!(decision_threshold > 0.0 && decision_threshold < 1.0)) {
    throw InvalidConfig("decision_threshold must be in (0, 1)");
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidConfig("test_fraction must be in (0, 1)");
  }
  if (permutation_repeats < 1) throw InvalidConfig("permutation_repeats must be >= 1");
}

void apply_config(PipelineConfig& cfg, const nlohmann::json& doc) {
  if (!doc.is_object()) throw InvalidConfig("config must be a JSON object of key/value pairs");
  for (const auto& [key, v] : doc.items()) {
    if (key == "break_gap_ms") {
      cfg.sessionizer.break_gap_ms = as_integer(v, key);
    } else if (key == "top_band_px") {
      cfg.sessionizer.top_band_px = as_number(v, key);
    } else if (key == "min_depth_px") {
      cfg.sessionizer.min_depth_px = as_number(v, key);
    } else if (key == "backscroll_epsilon_px") {
      cfg.sessionizer.backscroll_epsilon_px = as_number(v, key);
    } else if (key == "pass_fraction") {
      cfg.pass_fraction = as_number(v, key);
    } else if (key == "decision_threshold") {
      cfg.decision_threshold = as_number(v, key);
    } else if (key == "feature_set") {
      if (!v.is_string()) throw InvalidConfig("config key 'feature_set' must be a string");
      cfg.feature_set = feature_set_from_string(v.get<std::string>());
    } else if (key == "srl_only") {
      if (!v.is_boolean()) throw InvalidConfig("config key 'srl_only' must be a boolean");
      cfg.srl_only = v.get<bool>();
    } else if (key == "n_rounds") {
      cfg.learner.n_rounds = as_int(v, key);
    } else if (key == "max_depth") {
      cfg.learner.max_depth = as_int(v, key);
    } else if (key == "learning_rate") {
      cfg.learner.learning_rate = as_number(v, key);
    } else if (key == "lambda_l2") {
      cfg.learner.lambda_l2 = as_number(v, key);
    } else if (key == "min_child_weight") {
      cfg.learner.min_child_weight = as_number(v, key);
    } else if (key == "seed") {
      const auto s = as_integer(v, key);
      if (s < 0) throw InvalidConfig("seed must be >= 0");
      cfg.seed = static_cast<std::uint64_t>(s);
      cfg.learner.seed = cfg.seed;
    } else if (key == "test_fraction") {
      cfg.test_fraction = as_number(v, key);
    } else if (key == "permutation_repeats") {
      cfg.permutation_repeats = as_int(v, key);
    } else {
      throw InvalidConfig("unknown config key '" + key + "'");
    }
  }
}

PipelineConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidConfig("cannot open config file '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidConfig(path.string() + ": " + e.what());
  }
  PipelineConfig cfg;
  apply_config(cfg, doc);
  return cfg;
}

nlohmann::ordered_json to_json(const PipelineConfig& cfg) {
  nlohmann::ordered_json j;
  j["break_gap_ms"] = cfg.sessionizer.break_gap_ms;
  j["top_band_px"] = cfg.sessionizer.top_band_px;
  j["min_depth_px"] = cfg.sessionizer.min_depth_px;
  j["backscroll_epsilon_px"] = cfg.sessionizer.backscroll_epsilon_px;
  j["pass_fraction"] = cfg.pass_fraction;
  j["decision_threshold"] = cfg.decision_threshold;
  j["feature_set"] = to_string(cfg.feature_set);
  j["srl_only"] = cfg.srl_only;
  j["n_rounds"] = cfg.learner.n_rounds;
  j["max_depth"] = cfg.learner.max_depth;
  j["learning_rate"] = cfg.learner.learning_rate;
  j["lambda_l2"] = cfg.learner.lambda_l2;
  j["min_child_weight"] = cfg.learner.min_child_weight;
  j["seed"] = cfg.seed;
  j["test_fraction"] = cfg.test_fraction;
  j["permutation_repeats"] = cfg.permutation_repeats;
  return j;
}

}  // namespace srltrace
