#pragma once

#include "hotspot/json_io.hpp"
#include "hotspot/labeling.hpp"
#include "hotspot/random.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hotspot {

enum class Task { Regression, Classification };

std::string_view to_string(Task task);
Task parse_task(std::string_view text);  // "regression" | "classification"

struct ForestParams {
  int n_trees = 100;
  std::optional<int> max_depth;  // unlimited when empty
  int min_samples_split = 2;
  std::optional<int> mtry;       // ceil(p/3) regression, ceil(sqrt(p)) classification
  Task task = Task::Regression;
  std::uint64_t seed = 42;
  bool bootstrap = true;         // off only in tests
  int threads = 0;               // 0 = hardware concurrency; not part of the model
};

// Throws InvalidArgument when the params are out of range for p features.
int resolved_mtry(const ForestParams& params, std::size_t n_features);

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double impurity_decrease = 0.0;
  int n_samples = 0;
  double value = 0.0;          // leaf mean, or plurality label for classification
  std::vector<int> histogram;  // classification: count per entry of Forest::labels

  bool is_leaf() const noexcept { return feature < 0; }
};

// Preorder node array, root at index 0. A row goes left when
// row[feature] <= threshold.
struct Tree {
  std::vector<TreeNode> nodes;

  const TreeNode& leaf_for(std::span<const double> row) const;
  std::size_t depth() const;
};

struct Forest {
  ForestParams params;
  std::vector<std::string> feature_names;
  std::vector<int> labels;  // sorted class vocabulary (classification only)
  std::vector<Tree> trees;
};

// Sorted distinct targets; throws InvalidArgument on non-integral targets.
std::vector<int> label_vocabulary(const DesignMatrix& data);

// Grows one CART tree on the given sample (row indices, repeats allowed).
// `labels` is the class vocabulary for classification, ignored otherwise.
Tree train_tree(const DesignMatrix& data, std::span<const std::size_t> sample, const ForestParams& params,
                std::span<const int> labels, rng::Engine& engine);

// Tree i uses the engine seeded with rng::derive(params.seed, i), drawing
// its bootstrap sample first. Output does not depend on thread scheduling.
Forest train_forest(const DesignMatrix& data, const ForestParams& params);

// Regression: mean of tree leaf values. Classification: plurality vote over
// per-tree labels, ties to the smallest label.
double predict(const Forest& forest, std::span<const double> row);

struct ImportanceReport {
  std::vector<std::string> feature_names;
  std::vector<double> importance;  // sums to 1
  std::vector<std::string> ranking;  // descending importance, ties by column order
};

// Mean decrease in impurity. Throws NoSplits when every tree is a single leaf.
ImportanceReport mdi_importance(const Forest& forest);

Json to_json(const Forest& forest);
Forest forest_from_json(const Json& j);
Json to_json(const ImportanceReport& report);
ImportanceReport importance_from_json(const Json& j);

}  // namespace hotspot
