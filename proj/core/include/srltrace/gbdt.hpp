#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "srltrace/features.hpp"

namespace srltrace {

struct GbdtParams {
  int n_rounds = 100;
  int max_depth = 3;
  double learning_rate = 0.1;
  double lambda_l2 = 1.0;
  double min_child_weight = 1.0;
  std::uint64_t seed = 0;  // echoed only; training is deterministic

  void validate() const;  // throws InvalidConfig

  bool operator==(const GbdtParams&) const = default;
};

// Internal nodes route a row left iff value < threshold.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf contribution (already scaled by the learning rate)
  double gain = 0.0;   // split gain, internal nodes only

  bool is_leaf() const noexcept { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

// Nodes stored in preorder; nodes[0] is the root.
struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> row) const;
  int leaf_index(std::span<const double> row) const;
  int depth() const;

  bool operator==(const RegressionTree&) const = default;
};

struct GbdtModel {
  double base_score_logit = 0.0;
  std::vector<RegressionTree> trees;
  std::vector<std::string> feature_names;
  GbdtParams params;

  bool operator==(const GbdtModel&) const = default;
};

double sigmoid(double x) noexcept;
double logit(double p) noexcept;

// First and second derivative of the logistic loss in the margin:
// grad = p - y, hess = p (1 - p) with p = sigmoid(margin).
struct GradHess {
  double grad = 0.0;
  double hess = 0.0;
};
GradHess logistic_grad_hess(double margin, int label) noexcept;

// Mean logistic loss of labels under raw margins.
double logistic_loss(std::span<const double> margins, std::span<const int> labels);

// Dense feature matrix, column-major.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(const Dataset& dataset);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double at(std::size_t row, std::size_t col) const { return data_[col * rows_ + row]; }
  std::span<const double> column(std::size_t col) const {
    return {data_.data() + col * rows_, rows_};
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;

  bool valid() const noexcept { return feature >= 0; }
};

// Exact greedy search over midpoints between consecutive distinct values of
// every feature among `rows`. Candidates whose either child has hessian sum
// below min_child_weight are skipped; only strictly positive gain counts.
// Ties go to the lowest feature index, then the lowest threshold; gains
// within kSplitTieTolerance (relative) of each other count as tied, so the
// choice does not hinge on summation order.
inline constexpr double kSplitTieTolerance = 1e-9;
SplitCandidate find_best_split(const FeatureMatrix& x, std::span<const std::size_t> rows,
                               std::span<const double> grad, std::span<const double> hess,
                               const GbdtParams& params);

double split_gain(double grad_left, double hess_left, double grad_right, double hess_right,
                  double lambda);

struct FitDiagnostics {
  // Training loss before the first round and after each round.
  std::vector<double> round_losses;
};

// Throws InvalidDataset for empty data, non-finite values or non-binary
// labels; InvalidConfig for bad params.
GbdtModel fit(const Dataset& dataset, const GbdtParams& params,
              FitDiagnostics* diagnostics = nullptr);

double predict_margin(const GbdtModel& model, std::span<const double> row);
double predict_proba(const GbdtModel& model, std::span<const double> row);  // ArityMismatch

// Total split gain per feature name, in model feature order.
std::vector<std::pair<std::string, double>> gain_importance(const GbdtModel& model);

inline constexpr int kModelFormatVersion = 1;

nlohmann::ordered_json model_to_json(const GbdtModel& model);
GbdtModel model_from_json(const nlohmann::ordered_json& doc);  // throws DataError
void save_model(const GbdtModel& model, const std::filesystem::path& path);
GbdtModel load_model(const std::filesystem::path& path);

nlohmann::ordered_json params_to_json(const GbdtParams& params);

}  // namespace srltrace
