#pragma once

#include "hotspot/forest.hpp"
#include "hotspot/fuse.hpp"
#include "hotspot/json_io.hpp"
#include "hotspot/labeling.hpp"
#include "hotspot/mlp.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hotspot {

enum class ModelKind { RandomForest, Mlp };

std::string_view to_string(ModelKind kind);     // "rf" | "mlp"
ModelKind parse_model_kind(std::string_view text);
std::string_view display_name(ModelKind kind);  // "Random Forest" | "Multilayer Perceptron"

// Hyperparameters for both model families; the task field of each is
// overridden by the task passed to train_model.
struct ModelParams {
  ForestParams forest;
  MlpConfig mlp;
};

struct TrainedModel {
  ModelKind kind = ModelKind::RandomForest;
  Task task = Task::Regression;
  GridSpec grid;
  std::size_t train_rows = 0;
  std::vector<std::string> dropped;  // canonical names removed before training
  std::variant<Forest, MlpParams> model;
};

// Throws EmptyDataset, UnknownFeature or EmptyFeatureSet.
TrainedModel train_model(const Dataset& train, ModelKind kind, Task task, const ModelParams& params,
                         std::span<const std::string> drop = {});

double predict(const TrainedModel& model, std::span<const double> row);

Json to_json(const TrainedModel& model);
TrainedModel model_from_json(const Json& j);

struct CellSummary {
  GridCellId cell;
  int test_rows = 0;
  int true_count = 0;
  int hits = 0;
  double mean_prediction = 0.0;
};

struct EvalReport {
  ModelKind kind = ModelKind::RandomForest;
  Task task = Task::Regression;
  int cell_count = 0;
  int grid_rows = 0;
  int grid_cols = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::vector<std::string> features;
  double hit_rate = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  std::optional<double> r2;         // regression only
  std::size_t unseen_label_rows = 0;  // classification: true label absent from training
  std::vector<CellSummary> cells;
  bool leakage_note = false;
  std::string model_digest;
};

// Scores a trained model on a test split built on the same grid.
// Regression hits use round-half-away-from-zero.
EvalReport evaluate(const TrainedModel& model, const Dataset& test);

// Same as evaluate but on precomputed predictions (one per test row).
EvalReport score_predictions(const TrainedModel& model, const Dataset& test, std::span<const double> predictions);

// Trains on `train`, scores on `test`. Throws GridMismatch when the two
// datasets use different grids, EmptyDataset when either is empty.
EvalReport year_split_eval(const Dataset& train, const Dataset& test, ModelKind kind, Task task,
                           const ModelParams& params);

EvalReport ablate_features(const Dataset& train, const Dataset& test, std::span<const std::string> drop,
                           ModelKind kind, Task task, const ModelParams& params);

struct SweepEntry {
  int cell_count = 0;
  EvalReport report;
};

struct SweepReport {
  std::vector<SweepEntry> entries;
};

// Rebuilds grid and datasets for each count and runs year_split_eval.
// cell_counts must be strictly increasing and >= 1.
SweepReport grid_sweep(std::span<const JoinedRecord> train_records, std::span<const JoinedRecord> test_records,
                       const BoundingBox& bbox, std::span<const int> cell_counts, ModelKind kind, Task task,
                       const ModelParams& params);

Json to_json(const EvalReport& report);
Json to_json(const SweepReport& report);

// Fixed-width "Model  Type  Accuracy" table, one line per report.
std::string format_table(std::span<const EvalReport> reports);
std::string format_sweep_table(const SweepReport& report);

}  // namespace hotspot
