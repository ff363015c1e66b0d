#include "srltrace/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "srltrace/errors.hpp"

namespace srltrace {
namespace {

constexpr double kBaseProbabilityClamp = 1e-6;

void validate_dataset(const Dataset& ds) {
  if (ds.rows.empty()) throw InvalidDataset("dataset is empty");
  if (ds.feature_names.empty()) throw InvalidDataset("dataset has no features");
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    const auto& row = ds.rows[i];
    if (row.values.size() != ds.feature_names.size()) {
      throw InvalidDataset("row " + std::to_string(i) + " has " +
                           std::to_string(row.values.size()) + " values, expected " +
                           std::to_string(ds.feature_names.size()));
    }
    for (std::size_t j = 0; j < row.values.size(); ++j) {
      if (!std::isfinite(row.values[j])) {
        throw InvalidDataset("non-finite value in row " + std::to_string(i) + ", feature '" +
                             ds.feature_names[j] + "'");
      }
    }
    if (row.label != 0 && row.label != 1) {
      throw InvalidDataset("label of row " + std::to_string(i) + " is not 0/1");
    }
  }
}

class TreeGrower {
 public:
  TreeGrower(const FeatureMatrix& x, std::span<const double> grad, std::span<const double> hess,
             const GbdtParams& params, std::span<double> margins)
      : x_(x), grad_(grad), hess_(hess), params_(params), margins_(margins) {}

  RegressionTree grow(std::vector<std::size_t> rows) {
    tree_.nodes.clear();
    grow_node(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  int grow_node(std::vector<std::size_t> rows, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    if (depth < params_.max_depth) {
      const SplitCandidate split = find_best_split(x_, rows, grad_, hess_, params_);
      if (split.valid()) {
        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        const auto column = x_.column(static_cast<std::size_t>(split.feature));
        for (std::size_t r : rows) (column[r] < split.threshold ? left : right).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        const int l = grow_node(std::move(left), depth + 1);
        const int r = grow_node(std::move(right), depth + 1);
        TreeNode& node = tree_.nodes[static_cast<std::size_t>(id)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.gain = split.gain;
        node.left = l;
        node.right = r;
        return id;
      }
    }

    double g = 0.0;
    double h = 0.0;
    for (std::size_t r : rows) {
      g += grad_[r];
      h += hess_[r];
    }
    const double value = -g / (h + params_.lambda_l2) * params_.learning_rate;
    tree_.nodes[static_cast<std::size_t>(id)].value = value;
    for (std::size_t r : rows) margins_[r] += value;
    return id;
  }

  const FeatureMatrix& x_;
  std::span<const double> grad_;
  std::span<const double> hess_;
  const GbdtParams& params_;
  std::span<double> margins_;
  RegressionTree tree_;
};

nlohmann::ordered_json node_to_json(const RegressionTree& tree, int id) {
  const TreeNode& n = tree.nodes[static_cast<std::size_t>(id)];
  if (n.is_leaf()) return {{"v", n.value}};
  nlohmann::ordered_json j;
  j["f"] = n.feature;
  j["t"] = n.threshold;
  j["g"] = n.gain;
  j["l"] = node_to_json(tree, n.left);
  j["r"] = node_to_json(tree, n.right);
  return j;
}

int node_from_json(const nlohmann::ordered_json& j, RegressionTree& tree, std::size_t n_features,
                   int depth) {
  if (depth > 64) throw DataError("model tree nesting too deep");
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (j.contains("v")) {
    tree.nodes.back().value = j.at("v").get<double>();
    return id;
  }
  const int feature = j.at("f").get<int>();
  if (feature < 0 || static_cast<std::size_t>(feature) >= n_features) {
    throw DataError("model references feature index " + std::to_string(feature) +
                    " outside the feature list");
  }
  const double threshold = j.at("t").get<double>();
  const double gain = j.contains("g") ? j.at("g").get<double>() : 0.0;
  const int l = node_from_json(j.at("l"), tree, n_features, depth + 1);
  const int r = node_from_json(j.at("r"), tree, n_features, depth + 1);
  TreeNode& n = tree.nodes[static_cast<std::size_t>(id)];
  n.feature = feature;
  n.threshold = threshold;
  n.gain = gain;
  n.left = l;
  n.right = r;
  return id;
}

int depth_of(const RegressionTree& tree, int id) {
  const TreeNode& n = tree.nodes[static_cast<std::size_t>(id)];
  if (n.is_leaf()) return 0;
  return 1 + std::max(depth_of(tree, n.left), depth_of(tree, n.right));
}

}  // namespace

void GbdtParams::validate() const {
  if (n_rounds < 1) throw InvalidConfig("n_rounds must be >= 1");
  if (max_depth < 1) throw InvalidConfig("max_depth must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw InvalidConfig("learning_rate must be in (0, 1]");
  }
  if (!(lambda_l2 >= 0.0) || !std::isfinite(lambda_l2)) throw InvalidConfig("lambda_l2 must be >= 0");
  if (!(min_child_weight >= 0.0) || !std::isfinite(min_child_weight)) {
    throw InvalidConfig("min_child_weight must be >= 0");
  }
}

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) noexcept { return std::log(p / (1.0 - p)); }

GradHess logistic_grad_hess(double margin, int label) noexcept {
  const double p = sigmoid(margin);
  return {p - label, p * (1.0 - p)};
}

double logistic_loss(std::span<const double> margins, std::span<const int> labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    // log(1 + e^m) - y m, computed stably.
    const double m = margins[i];
    const double softplus = m > 0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
    total += softplus - labels[i] * m;
  }
  return margins.empty() ? 0.0 : total / static_cast<double>(margins.size());
}

FeatureMatrix::FeatureMatrix(const Dataset& dataset)
    : rows_(dataset.rows.size()), cols_(dataset.feature_names.size()), data_(rows_ * cols_) {
  for (std::size_t r = 0; r < rows_; ++r) {
    const auto& values = dataset.rows[r].values;
    for (std::size_t c = 0; c < cols_ && c < values.size(); ++c) data_[c * rows_ + r] = values[c];
  }
}

double split_gain(double grad_left, double hess_left, double grad_right, double hess_right,
                  double lambda) {
  const double g = grad_left + grad_right;
  const double h = hess_left + hess_right;
  return 0.5 * (grad_left * grad_left / (hess_left + lambda) +
                grad_right * grad_right / (hess_right + lambda) - g * g / (h + lambda));
}

SplitCandidate find_best_split(const FeatureMatrix& x, std::span<const std::size_t> rows,
                               std::span<const double> grad, std::span<const double> hess,
                               const GbdtParams& params) {
  SplitCandidate best;
  if (rows.size() < 2) return best;

  double g_total = 0.0;
  double h_total = 0.0;
  for (std::size_t r : rows) {
    g_total += grad[r];
    h_total += hess[r];
  }

  std::vector<std::size_t> order(rows.begin(), rows.end());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    const auto col = x.column(f);
    std::copy(rows.begin(), rows.end(), order.begin());
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });

    double g_left = 0.0;
    double h_left = 0.0;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      g_left += grad[order[i]];
      h_left += hess[order[i]];
      const double lo = col[order[i]];
      const double hi = col[order[i + 1]];
      if (!(lo < hi)) continue;

      const double g_right = g_total - g_left;
      const double h_right = h_total - h_left;
      if (h_left < params.min_child_weight || h_right < params.min_child_weight) continue;

      const double gain = split_gain(g_left, h_left, g_right, h_right, params.lambda_l2);
      if (gain > best.gain * (1.0 + kSplitTieTolerance)) {
        double threshold = lo + (hi - lo) / 2.0;
        if (!(lo < threshold)) threshold = hi;
        best.feature = static_cast<int>(f);
        best.threshold = threshold;
        best.gain = gain;
      }
    }
  }
  return best;
}

int RegressionTree::leaf_index(std::span<const double> row) const {
  int id = 0;
  while (!nodes[static_cast<std::size_t>(id)].is_leaf()) {
    const TreeNode& n = nodes[static_cast<std::size_t>(id)];
    id = row[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
  }
  return id;
}

double RegressionTree::predict(std::span<const double> row) const {
  return nodes[static_cast<std::size_t>(leaf_index(row))].value;
}

int RegressionTree::depth() const { return nodes.empty() ? 0 : depth_of(*this, 0); }

GbdtModel fit(const Dataset& dataset, const GbdtParams& params, FitDiagnostics* diagnostics) {
  params.validate();
  validate_dataset(dataset);

  const FeatureMatrix x(dataset);
  const std::size_t n = x.rows();
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = dataset.rows[i].label;

  const double positives = std::accumulate(labels.begin(), labels.end(), 0.0);
  const double mean = std::clamp(positives / static_cast<double>(n), kBaseProbabilityClamp,
                                 1.0 - kBaseProbabilityClamp);

  GbdtModel model;
  model.base_score_logit = logit(mean);
  model.feature_names = dataset.feature_names;
  model.params = params;
  model.trees.reserve(static_cast<std::size_t>(params.n_rounds));

  std::vector<double> margins(n, model.base_score_logit);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  std::vector<std::size_t> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});

  if (diagnostics) {
    diagnostics->round_losses.clear();
    diagnostics->round_losses.push_back(logistic_loss(margins, labels));
  }

  for (int round = 0; round < params.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto gh = logistic_grad_hess(margins[i], labels[i]);
      grad[i] = gh.grad;
      hess[i] = gh.hess;
    }
    TreeGrower grower(x, grad, hess, params, margins);
    model.trees.push_back(grower.grow(all_rows));
    if (diagnostics) diagnostics->round_losses.push_back(logistic_loss(margins, labels));
  }
  return model;
}

double predict_margin(const GbdtModel& model, std::span<const double> row) {
  if (row.size() != model.feature_names.size()) {
    throw ArityMismatch(model.feature_names.size(), row.size());
  }
  double margin = model.base_score_logit;
  for (const auto& tree : model.trees) margin += tree.predict(row);
  return margin;
}

double predict_proba(const GbdtModel& model, std::span<const double> row) {
  return sigmoid(predict_margin(model, row));
}

std::vector<std::pair<std::string, double>> gain_importance(const GbdtModel& model) {
  std::vector<double> totals(model.feature_names.size(), 0.0);
  for (const auto& tree : model.trees) {
    for (const auto& node : tree.nodes) {
      if (!node.is_leaf()) totals[static_cast<std::size_t>(node.feature)] += node.gain;
    }
  }
  std::vector<std::pair<std::string, double>> table;
  table.reserve(totals.size());
  for (std::size_t i = 0; i < totals.size(); ++i) table.emplace_back(model.feature_names[i], totals[i]);
  return table;
}

nlohmann::ordered_json params_to_json(const GbdtParams& p) {
  nlohmann::ordered_json j;
  j["n_rounds"] = p.n_rounds;
  j["max_depth"] = p.max_depth;
  j["learning_rate"] = p.learning_rate;
  j["lambda_l2"] = p.lambda_l2;
  j["min_child_weight"] = p.min_child_weight;
  j["seed"] = p.seed;
  return j;
}

nlohmann::ordered_json model_to_json(const GbdtModel& model) {
  nlohmann::ordered_json j;
  j["format_version"] = kModelFormatVersion;
  j["feature_names"] = model.feature_names;
  j["base_score_logit"] = model.base_score_logit;
  j["params"] = params_to_json(model.params);
  nlohmann::ordered_json trees = nlohmann::ordered_json::array();
  for (const auto& tree : model.trees) trees.push_back(node_to_json(tree, 0));
  j["trees"] = std::move(trees);
  return j;
}

GbdtModel model_from_json(const nlohmann::ordered_json& doc) {
  try {
    if (doc.at("format_version").get<int>() != kModelFormatVersion) {
      throw DataError("unsupported model format_version");
    }
    GbdtModel model;
    model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    model.base_score_logit = doc.at("base_score_logit").get<double>();
    const auto& p = doc.at("params");
    model.params.n_rounds = p.at("n_rounds").get<int>();
    model.params.max_depth = p.at("max_depth").get<int>();
    model.params.learning_rate = p.at("learning_rate").get<double>();
    model.params.lambda_l2 = p.at("lambda_l2").get<double>();
    model.params.min_child_weight = p.at("min_child_weight").get<double>();
    model.params.seed = p.at("seed").get<std::uint64_t>();
    for (const auto& t : doc.at("trees")) {
      RegressionTree tree;
      node_from_json(t, tree, model.feature_names.size(), 0);
      model.trees.push_back(std::move(tree));
    }
    return model;
  } catch (const nlohmann::ordered_json::exception& e) {
    throw DataError(std::string("invalid model document: ") + e.what());
  }
}

void save_model(const GbdtModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out << model_to_json(model).dump() << '\n';
}

GbdtModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file '" + path.string() + "'");
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::ordered_json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace srltrace
