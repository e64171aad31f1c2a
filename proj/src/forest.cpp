#include "hotspot/forest.hpp"
#include "hotspot/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

namespace hotspot {

std::string_view to_string(Task task) {
  return task == Task::Regression ? "regression" : "classification";
}

Task parse_task(std::string_view text) {
  if (text == "regression") return Task::Regression;
  if (text == "classification") return Task::Classification;
  throw Error(ErrorCode::InvalidArgument, "unknown task '" + std::string(text) + "'");
}

int resolved_mtry(const ForestParams& params, std::size_t n_features) {
  if (n_features == 0) throw Error(ErrorCode::EmptyFeatureSet, "no features");
  if (params.n_trees < 1) throw Error(ErrorCode::InvalidArgument, "n_trees must be >= 1");
  if (params.min_samples_split < 2) throw Error(ErrorCode::InvalidArgument, "min_samples_split must be >= 2");
  if (params.max_depth && *params.max_depth < 1) throw Error(ErrorCode::InvalidArgument, "max_depth must be >= 1");
  const double p = static_cast<double>(n_features);
  const int mtry = params.mtry.value_or(params.task == Task::Regression
                                            ? static_cast<int>(std::ceil(p / 3.0))
                                            : static_cast<int>(std::ceil(std::sqrt(p))));
  if (mtry < 1 || mtry > static_cast<int>(n_features)) {
    throw Error(ErrorCode::InvalidArgument,
                "mtry " + std::to_string(mtry) + " outside [1, " + std::to_string(n_features) + "]");
  }
  return mtry;
}

std::vector<int> label_vocabulary(const DesignMatrix& data) {
  std::vector<int> labels;
  labels.reserve(data.targets.size());
  for (double t : data.targets) {
    if (t != std::floor(t) || std::abs(t) > 1e9) {
      throw Error(ErrorCode::InvalidArgument, "classification target is not an integer");
    }
    labels.push_back(static_cast<int>(t));
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

namespace {

struct Candidate {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const DesignMatrix& data, const ForestParams& params, std::span<const int> labels,
              rng::Engine& engine)
      : data_(data), params_(params), labels_(labels), engine_(engine),
        mtry_(resolved_mtry(params, data.cols())) {
    if (params.task == Task::Classification) {
      class_of_.resize(data.rows);
      for (std::size_t i = 0; i < data.rows; ++i) {
        const int label = static_cast<int>(data.targets[i]);
        const auto it = std::lower_bound(labels.begin(), labels.end(), label);
        if (it == labels.end() || *it != label) {
          throw Error(ErrorCode::InvalidArgument, "target outside the label vocabulary");
        }
        class_of_[i] = static_cast<int>(it - labels.begin());
      }
    }
    features_.resize(data.cols());
  }

  Tree build(std::vector<std::size_t> sample) {
    tree_.nodes.clear();
    grow(sample, 0, sample.size(), 0);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<std::size_t>& idx, std::size_t begin, std::size_t end, int depth) {
    const int node_id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    const std::size_t n = end - begin;
    {
      TreeNode& node = tree_.nodes.back();
      node.n_samples = static_cast<int>(n);
      fill_leaf(node, idx, begin, end);
    }
    double impurity = 0.0;
    const bool pure = is_pure(idx, begin, end, impurity);
    const bool depth_stop = params_.max_depth && depth >= *params_.max_depth;
    if (pure || depth_stop || static_cast<int>(n) < params_.min_samples_split) return node_id;

    const Candidate best = best_split(idx, begin, end, impurity);
    if (best.feature < 0) return node_id;

    const auto mid = std::stable_partition(
        idx.begin() + static_cast<std::ptrdiff_t>(begin), idx.begin() + static_cast<std::ptrdiff_t>(end),
        [&](std::size_t i) { return data_.at(i, static_cast<std::size_t>(best.feature)) <= best.threshold; });
    const std::size_t split = static_cast<std::size_t>(mid - idx.begin());

    const int left = grow(idx, begin, split, depth + 1);
    const int right = grow(idx, split, end, depth + 1);
    TreeNode& node = tree_.nodes[static_cast<std::size_t>(node_id)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.impurity_decrease = best.gain;
    node.left = left;
    node.right = right;
    return node_id;
  }

  void fill_leaf(TreeNode& node, const std::vector<std::size_t>& idx, std::size_t begin, std::size_t end) const {
    if (params_.task == Task::Regression) {
      double sum = 0.0;
      for (std::size_t k = begin; k < end; ++k) sum += data_.targets[idx[k]];
      node.value = end > begin ? sum / static_cast<double>(end - begin) : 0.0;
      return;
    }
    node.histogram.assign(labels_.size(), 0);
    for (std::size_t k = begin; k < end; ++k) ++node.histogram[static_cast<std::size_t>(class_of_[idx[k]])];
    // First maximum wins, so ties go to the smallest label.
    const auto top = std::max_element(node.histogram.begin(), node.histogram.end());
    node.value = labels_.empty() ? 0.0 : labels_[static_cast<std::size_t>(top - node.histogram.begin())];
  }

  // Also reports the node impurity (variance or Gini).
  bool is_pure(const std::vector<std::size_t>& idx, std::size_t begin, std::size_t end, double& impurity) const {
    const double n = static_cast<double>(end - begin);
    if (params_.task == Task::Regression) {
      const double first = data_.targets[idx[begin]];
      bool same = true;
      double sum = 0.0;
      for (std::size_t k = begin; k < end; ++k) {
        same = same && data_.targets[idx[k]] == first;
        sum += data_.targets[idx[k]];
      }
      const double mean = sum / n;
      double ss = 0.0;
      for (std::size_t k = begin; k < end; ++k) {
        const double d = data_.targets[idx[k]] - mean;
        ss += d * d;
      }
      impurity = ss / n;
      return same;
    }
    std::vector<long> counts(labels_.size(), 0);
    for (std::size_t k = begin; k < end; ++k) ++counts[static_cast<std::size_t>(class_of_[idx[k]])];
    double sq = 0.0;
    int nonzero = 0;
    for (long c : counts) {
      sq += static_cast<double>(c) * static_cast<double>(c);
      nonzero += c > 0;
    }
    impurity = 1.0 - sq / (n * n);
    return nonzero <= 1;
  }

  std::vector<int> sample_features() {
    std::iota(features_.begin(), features_.end(), 0);
    const std::size_t p = features_.size();
    for (int k = 0; k < mtry_; ++k) {
      const std::size_t j = static_cast<std::size_t>(k) + rng::below(engine_, p - static_cast<std::size_t>(k));
      std::swap(features_[static_cast<std::size_t>(k)], features_[j]);
    }
    std::vector<int> chosen(features_.begin(), features_.begin() + mtry_);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
  }

  Candidate best_split(const std::vector<std::size_t>& idx, std::size_t begin, std::size_t end, double impurity) {
    const std::size_t n = end - begin;
    const double nd = static_cast<double>(n);
    const double min_gain = impurity * 1e-12;
    Candidate best;
    best.gain = min_gain;

    const std::vector<int> chosen = sample_features();
    order_.assign(idx.begin() + static_cast<std::ptrdiff_t>(begin), idx.begin() + static_cast<std::ptrdiff_t>(end));

    double mean = 0.0;
    std::vector<long> total;
    double total_sq = 0.0;
    if (params_.task == Task::Regression) {
      for (std::size_t i : order_) mean += data_.targets[i];
      mean /= nd;
    } else {
      total.assign(labels_.size(), 0);
      for (std::size_t i : order_) ++total[static_cast<std::size_t>(class_of_[i])];
      for (long c : total) total_sq += static_cast<double>(c) * static_cast<double>(c);
    }

    std::vector<long> left_counts;
    for (int f : chosen) {
      const auto col = static_cast<std::size_t>(f);
      std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
        const double va = data_.at(a, col);
        const double vb = data_.at(b, col);
        return va < vb || (va == vb && a < b);
      });
      // Centered running sum for regression; exact integer sums of squared
      // class counts for Gini.
      double left_sum = 0.0;
      double left_sq = 0.0;
      double right_sq = total_sq;
      if (params_.task == Task::Classification) left_counts.assign(labels_.size(), 0);
      for (std::size_t k = 0; k + 1 < n; ++k) {
        const std::size_t i = order_[k];
        if (params_.task == Task::Regression) {
          left_sum += data_.targets[i] - mean;
        } else {
          const auto c = static_cast<std::size_t>(class_of_[i]);
          const double l = static_cast<double>(left_counts[c]);
          const double r = static_cast<double>(total[c] - left_counts[c]);
          left_sq += 2.0 * l + 1.0;
          right_sq -= 2.0 * r - 1.0;
          ++left_counts[c];
        }
        const double lo = data_.at(i, col);
        const double hi = data_.at(order_[k + 1], col);
        if (!(lo < hi)) continue;

        const double nl = static_cast<double>(k + 1);
        const double nr = nd - nl;
        double gain = 0.0;
        if (params_.task == Task::Regression) {
          gain = left_sum * left_sum / (nl * nr);
        } else {
          gain = (left_sq / nl + right_sq / nr - total_sq / nd) / nd;
        }
        if (gain > best.gain) {
          double threshold = lo + (hi - lo) / 2.0;
          if (!(threshold < hi)) threshold = lo;
          best = Candidate{f, threshold, gain};
        }
      }
    }
    return best;
  }

  const DesignMatrix& data_;
  const ForestParams& params_;
  std::span<const int> labels_;
  rng::Engine& engine_;
  int mtry_;
  std::vector<int> class_of_;
  std::vector<int> features_;
  std::vector<std::size_t> order_;
  Tree tree_;
};

}  // namespace

const TreeNode& Tree::leaf_for(std::span<const double> row) const {
  const TreeNode* node = &nodes.front();
  while (!node->is_leaf()) {
    const auto next = row[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left : node->right;
    node = &nodes[static_cast<std::size_t>(next)];
  }
  return *node;
}

std::size_t Tree::depth() const {
  std::vector<std::size_t> level(nodes.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes[i].is_leaf()) {
      level[static_cast<std::size_t>(nodes[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

Tree train_tree(const DesignMatrix& data, std::span<const std::size_t> sample, const ForestParams& params,
                std::span<const int> labels, rng::Engine& engine) {
  if (data.rows == 0 || sample.empty()) throw Error(ErrorCode::EmptyDataset, "cannot grow a tree on zero samples");
  TreeBuilder builder(data, params, labels, engine);
  return builder.build(std::vector<std::size_t>(sample.begin(), sample.end()));
}

Forest train_forest(const DesignMatrix& data, const ForestParams& params) {
  if (data.rows == 0) throw Error(ErrorCode::EmptyDataset, "cannot train a forest on zero rows");
  resolved_mtry(params, data.cols());

  Forest forest;
  forest.params = params;
  forest.feature_names = data.feature_names;
  if (params.task == Task::Classification) forest.labels = label_vocabulary(data);
  forest.trees.resize(static_cast<std::size_t>(params.n_trees));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= forest.trees.size()) return;
      try {
        rng::Engine engine(rng::derive(params.seed, t));
        std::vector<std::size_t> sample(data.rows);
        if (params.bootstrap) {
          for (auto& s : sample) s = static_cast<std::size_t>(rng::below(engine, data.rows));
          std::sort(sample.begin(), sample.end());
        } else {
          std::iota(sample.begin(), sample.end(), std::size_t{0});
        }
        forest.trees[t] = train_tree(data, sample, params, forest.labels, engine);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = forest.trees.size();
      }
    }
  };

  unsigned n_threads = params.threads > 0 ? static_cast<unsigned>(params.threads)
                                          : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(forest.trees.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < n_threads; ++k) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return forest;
}

double predict(const Forest& forest, std::span<const double> row) {
  if (forest.trees.empty()) throw Error(ErrorCode::InvalidArgument, "forest has no trees");
  if (forest.params.task == Task::Regression) {
    double sum = 0.0;
    for (const auto& tree : forest.trees) sum += tree.leaf_for(row).value;
    return sum / static_cast<double>(forest.trees.size());
  }
  std::map<int, int> votes;
  for (const auto& tree : forest.trees) ++votes[static_cast<int>(tree.leaf_for(row).value)];
  int best_label = votes.begin()->first;
  int best_votes = 0;
  for (const auto& [label, count] : votes) {
    if (count > best_votes) {
      best_votes = count;
      best_label = label;
    }
  }
  return best_label;
}

ImportanceReport mdi_importance(const Forest& forest) {
  const std::size_t p = forest.feature_names.size();
  std::vector<double> total(p, 0.0);
  bool any_split = false;
  for (const auto& tree : forest.trees) {
    const double root_n = static_cast<double>(tree.nodes.front().n_samples);
    for (const auto& node : tree.nodes) {
      if (node.is_leaf()) continue;
      any_split = true;
      total[static_cast<std::size_t>(node.feature)] += node.n_samples / root_n * node.impurity_decrease;
    }
  }
  if (!any_split) throw Error(ErrorCode::NoSplits, "every tree is a single leaf");

  for (auto& v : total) v /= static_cast<double>(forest.trees.size());
  const double sum = std::accumulate(total.begin(), total.end(), 0.0);
  ImportanceReport report;
  report.feature_names = forest.feature_names;
  report.importance.resize(p);
  for (std::size_t j = 0; j < p; ++j) report.importance[j] = total[j] / sum;

  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return report.importance[a] > report.importance[b]; });
  for (std::size_t j : order) report.ranking.push_back(report.feature_names[j]);
  return report;
}

namespace {

Json node_to_json(const Tree& tree, std::size_t id, Task task) {
  const TreeNode& node = tree.nodes[id];
  Json j;
  j["n"] = node.n_samples;
  if (node.is_leaf()) {
    j["v"] = node.value;
    if (task == Task::Classification) j["h"] = node.histogram;
    return j;
  }
  j["f"] = node.feature;
  j["t"] = node.threshold;
  j["d"] = node.impurity_decrease;
  j["l"] = node_to_json(tree, static_cast<std::size_t>(node.left), task);
  j["r"] = node_to_json(tree, static_cast<std::size_t>(node.right), task);
  return j;
}

int node_from_json(const Json& j, Tree& tree) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  TreeNode node;
  node.n_samples = j.at("n").get<int>();
  if (j.contains("f")) {
    node.feature = j.at("f").get<int>();
    node.threshold = j.at("t").get<double>();
    node.impurity_decrease = j.at("d").get<double>();
    node.left = node_from_json(j.at("l"), tree);
    node.right = node_from_json(j.at("r"), tree);
  } else {
    node.value = j.at("v").get<double>();
    if (j.contains("h")) node.histogram = j.at("h").get<std::vector<int>>();
  }
  tree.nodes[static_cast<std::size_t>(id)] = std::move(node);
  return id;
}

}  // namespace

Json to_json(const Forest& forest) {
  Json params{{"n_trees", forest.params.n_trees},
              {"max_depth", forest.params.max_depth ? Json(*forest.params.max_depth) : Json(nullptr)},
              {"min_samples_split", forest.params.min_samples_split},
              {"mtry", resolved_mtry(forest.params, forest.feature_names.size())},
              {"task", to_string(forest.params.task)},
              {"seed", forest.params.seed},
              {"bootstrap", forest.params.bootstrap}};
  Json trees = Json::array();
  for (const auto& tree : forest.trees) trees.push_back(node_to_json(tree, 0, forest.params.task));
  return Json{{"schema", "hotspot.forest/1"},
              {"params", params},
              {"feature_names", forest.feature_names},
              {"labels", forest.labels},
              {"trees", trees}};
}

Forest forest_from_json(const Json& j) {
  if (j.value("schema", "") != "hotspot.forest/1") {
    throw Error(ErrorCode::InvalidArgument, "not a hotspot.forest/1 document");
  }
  Forest forest;
  const Json& p = j.at("params");
  forest.params.n_trees = p.at("n_trees").get<int>();
  if (!p.at("max_depth").is_null()) forest.params.max_depth = p.at("max_depth").get<int>();
  forest.params.min_samples_split = p.at("min_samples_split").get<int>();
  forest.params.mtry = p.at("mtry").get<int>();
  forest.params.task = parse_task(p.at("task").get<std::string>());
  forest.params.seed = p.at("seed").get<std::uint64_t>();
  forest.params.bootstrap = p.at("bootstrap").get<bool>();
  forest.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  forest.labels = j.at("labels").get<std::vector<int>>();
  for (const auto& tj : j.at("trees")) {
    Tree tree;
    node_from_json(tj, tree);
    forest.trees.push_back(std::move(tree));
  }
  return forest;
}

Json to_json(const ImportanceReport& report) {
  Json features = Json::array();
  for (std::size_t k = 0; k < report.feature_names.size(); ++k) {
    features.push_back({{"feature", report.feature_names[k]}, {"importance", report.importance[k]}});
  }
  return Json{{"schema", "hotspot.importance/1"}, {"features", features}, {"ranking", report.ranking}};
}

ImportanceReport importance_from_json(const Json& j) {
  if (j.value("schema", "") != "hotspot.importance/1") {
    throw Error(ErrorCode::InvalidArgument, "not a hotspot.importance/1 document");
  }
  ImportanceReport report;
  for (const auto& f : j.at("features")) {
    report.feature_names.push_back(f.at("feature").get<std::string>());
    report.importance.push_back(f.at("importance").get<double>());
  }
  report.ranking = j.at("ranking").get<std::vector<std::string>>();
  return report;
}

}  // namespace hotspot
