#include "hotspot/eval.hpp"
#include "hotspot/csv.hpp"
#include "hotspot/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace hotspot {

std::string_view to_string(ModelKind kind) { return kind == ModelKind::RandomForest ? "rf" : "mlp"; }

ModelKind parse_model_kind(std::string_view text) {
  if (text == "rf") return ModelKind::RandomForest;
  if (text == "mlp") return ModelKind::Mlp;
  throw Error(ErrorCode::InvalidArgument, "unknown model '" + std::string(text) + "' (expected rf or mlp)");
}

std::string_view display_name(ModelKind kind) {
  return kind == ModelKind::RandomForest ? "Random Forest" : "Multilayer Perceptron";
}

namespace {

// Project a 13-feature row onto the columns the model was trained on.
std::vector<double> project(const TrainedModel& model, const FeatureRow& row) {
  if (model.dropped.empty()) return {row.begin(), row.end()};
  std::vector<double> out;
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    if (std::find(model.dropped.begin(), model.dropped.end(), kFeatureNames[j]) == model.dropped.end()) {
      out.push_back(row[j]);
    }
  }
  return out;
}

bool uses(const std::vector<std::string>& features, std::string_view name) {
  return std::find(features.begin(), features.end(), name) != features.end();
}

}  // namespace

TrainedModel train_model(const Dataset& train, ModelKind kind, Task task, const ModelParams& params,
                         std::span<const std::string> drop) {
  if (train.empty()) throw Error(ErrorCode::EmptyDataset, "training split is empty");
  const DesignMatrix design = to_design(train, drop);

  TrainedModel model;
  model.kind = kind;
  model.task = task;
  model.grid = train.grid;
  model.train_rows = train.size();
  // Canonical order so that models trained with permuted drop lists match.
  for (std::string_view name : kFeatureNames) {
    if (std::find(drop.begin(), drop.end(), name) != drop.end()) model.dropped.emplace_back(name);
  }
  if (kind == ModelKind::RandomForest) {
    ForestParams fp = params.forest;
    fp.task = task;
    model.model = train_forest(design, fp);
  } else {
    MlpConfig mc = params.mlp;
    mc.task = task;
    model.model = train_mlp(design, mc);
  }
  return model;
}

double predict(const TrainedModel& model, std::span<const double> row) {
  return std::visit([&](const auto& m) { return hotspot::predict(m, row); }, model.model);
}

Json to_json(const TrainedModel& model) {
  Json inner = std::visit([](const auto& m) { return to_json(m); }, model.model);
  return Json{{"schema", "hotspot.model/1"},
              {"kind", to_string(model.kind)},
              {"task", to_string(model.task)},
              {"grid", model.grid},
              {"train_rows", model.train_rows},
              {"dropped", model.dropped},
              {"model", std::move(inner)}};
}

TrainedModel model_from_json(const Json& j) {
  if (j.value("schema", "") != "hotspot.model/1") {
    throw Error(ErrorCode::InvalidArgument, "not a hotspot.model/1 document");
  }
  TrainedModel model;
  model.kind = parse_model_kind(j.at("kind").get<std::string>());
  model.task = parse_task(j.at("task").get<std::string>());
  model.grid = j.at("grid").get<GridSpec>();
  model.train_rows = j.at("train_rows").get<std::size_t>();
  model.dropped = j.at("dropped").get<std::vector<std::string>>();
  if (model.kind == ModelKind::RandomForest) {
    model.model = forest_from_json(j.at("model"));
  } else {
    model.model = mlp_from_json(j.at("model"));
  }
  return model;
}

EvalReport evaluate(const TrainedModel& model, const Dataset& test) {
  if (test.empty()) throw Error(ErrorCode::EmptyDataset, "test split is empty");
  if (!(model.grid == test.grid)) throw Error(ErrorCode::GridMismatch, "model and test split use different grids");
  std::vector<double> predictions;
  predictions.reserve(test.size());
  for (const auto& row : test.rows) {
    const auto x = project(model, row);
    predictions.push_back(predict(model, x));
  }
  return score_predictions(model, test, predictions);
}

EvalReport score_predictions(const TrainedModel& model, const Dataset& test, std::span<const double> predictions) {
  if (predictions.size() != test.size()) {
    throw Error(ErrorCode::InvalidArgument, "one prediction per test row is required");
  }
  if (test.empty()) throw Error(ErrorCode::EmptyDataset, "test split is empty");
  EvalReport report;
  report.kind = model.kind;
  report.task = model.task;
  report.cell_count = test.grid.cell_count();
  report.grid_rows = test.grid.rows;
  report.grid_cols = test.grid.cols;
  report.train_rows = model.train_rows;
  report.test_rows = test.size();
  for (std::string_view name : kFeatureNames) {
    if (std::find(model.dropped.begin(), model.dropped.end(), name) == model.dropped.end()) {
      report.features.emplace_back(name);
    }
  }
  report.leakage_note = uses(report.features, "latitude") || uses(report.features, "longitude");

  std::vector<int> vocabulary;
  if (model.task == Task::Classification) {
    vocabulary = std::visit([](const auto& m) { return m.labels; }, model.model);
  }

  const double n = static_cast<double>(test.size());
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  double target_sum = 0.0;
  std::size_t hits = 0;
  struct Acc {
    int rows = 0;
    int truth = 0;
    int hits = 0;
    double pred_sum = 0.0;
  };
  std::map<GridCellId, Acc> per_cell;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const double y = test.targets[i];
    const double yhat = predictions[i];
    const bool hit = model.task == Task::Regression ? std::round(yhat) == y : yhat == y;
    hits += hit;
    abs_sum += std::abs(yhat - y);
    sq_sum += (yhat - y) * (yhat - y);
    target_sum += y;
    if (model.task == Task::Classification &&
        !std::binary_search(vocabulary.begin(), vocabulary.end(), test.targets[i])) {
      ++report.unseen_label_rows;
    }
    auto& acc = per_cell[test.cells[i]];
    ++acc.rows;
    acc.truth = test.targets[i];
    acc.hits += hit;
    acc.pred_sum += yhat;
  }
  report.hit_rate = static_cast<double>(hits) / n;
  report.mae = abs_sum / n;
  report.rmse = std::sqrt(sq_sum / n);
  if (model.task == Task::Regression) {
    const double mean = target_sum / n;
    double ss_tot = 0.0;
    for (int y : test.targets) ss_tot += (y - mean) * (y - mean);
    // Constant targets: 1 for a perfect fit, else 0.
    report.r2 = ss_tot > 0.0 ? 1.0 - sq_sum / ss_tot : (sq_sum == 0.0 ? 1.0 : 0.0);
  }
  for (const auto& [cell, acc] : per_cell) {
    report.cells.push_back(CellSummary{cell, acc.rows, acc.truth, acc.hits, acc.pred_sum / acc.rows});
  }
  report.model_digest = csv::hex_digest(canonical(to_json(model)));
  return report;
}

EvalReport year_split_eval(const Dataset& train, const Dataset& test, ModelKind kind, Task task,
                           const ModelParams& params) {
  return ablate_features(train, test, {}, kind, task, params);
}

EvalReport ablate_features(const Dataset& train, const Dataset& test, std::span<const std::string> drop,
                           ModelKind kind, Task task, const ModelParams& params) {
  if (!(train.grid == test.grid)) throw Error(ErrorCode::GridMismatch, "train and test splits use different grids");
  if (test.empty()) throw Error(ErrorCode::EmptyDataset, "test split is empty");
  const TrainedModel model = train_model(train, kind, task, params, drop);
  return evaluate(model, test);
}

SweepReport grid_sweep(std::span<const JoinedRecord> train_records, std::span<const JoinedRecord> test_records,
                       const BoundingBox& bbox, std::span<const int> cell_counts, ModelKind kind, Task task,
                       const ModelParams& params) {
  for (std::size_t k = 0; k < cell_counts.size(); ++k) {
    if (cell_counts[k] < 1) throw Error(ErrorCode::InvalidArgument, "cell counts must be >= 1");
    if (k > 0 && cell_counts[k] <= cell_counts[k - 1]) {
      throw Error(ErrorCode::InvalidArgument, "cell counts must be strictly increasing");
    }
  }
  SweepReport sweep;
  for (int count : cell_counts) {
    const GridSpec grid = make_grid(bbox, count);
    const Dataset train = build_dataset(train_records, grid);
    const Dataset test = build_dataset(test_records, grid);
    sweep.entries.push_back({count, year_split_eval(train, test, kind, task, params)});
  }
  return sweep;
}

Json to_json(const EvalReport& report) {
  Json cells = Json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"row", c.cell.row},
                     {"col", c.cell.col},
                     {"test_rows", c.test_rows},
                     {"true_count", c.true_count},
                     {"hits", c.hits},
                     {"mean_prediction", c.mean_prediction}});
  }
  Json j{{"schema", "hotspot.eval/1"},
         {"model", to_string(report.kind)},
         {"task", to_string(report.task)},
         {"cell_count", report.cell_count},
         {"grid_rows", report.grid_rows},
         {"grid_cols", report.grid_cols},
         {"train_rows", report.train_rows},
         {"test_rows", report.test_rows},
         {"features", report.features},
         {"hit_rate", report.hit_rate},
         {"hit_rate_definition", report.task == Task::Regression
                                     ? "fraction of test rows with round(prediction) == true cell count"
                                     : "fraction of test rows whose predicted label equals the true cell count"},
         {"mae", report.mae},
         {"rmse", report.rmse},
         {"r2", report.r2 ? Json(*report.r2) : Json(nullptr)},
         {"unseen_label_rows", report.unseen_label_rows},
         {"cells", cells},
         {"leakage_note", report.leakage_note},
         {"model_digest", report.model_digest}};
  if (report.leakage_note) {
    j["leakage_explanation"] =
        "targets are per-cell counts and the inputs include the coordinates that determine the cell";
  }
  return j;
}

Json to_json(const SweepReport& report) {
  Json entries = Json::array();
  for (const auto& e : report.entries) entries.push_back({{"cell_count", e.cell_count}, {"report", to_json(e.report)}});
  return Json{{"schema", "hotspot.sweep/1"}, {"entries", entries}};
}

std::string format_table(std::span<const EvalReport> reports) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-24s %-16s %9s\n", "Model", "Type", "Accuracy");
  out << line;
  for (const auto& r : reports) {
    std::string type(to_string(r.task));
    type[0] = static_cast<char>(std::toupper(type[0]));
    std::snprintf(line, sizeof(line), "%-24s %-16s %7.1f %%\n", std::string(display_name(r.kind)).c_str(),
                  type.c_str(), 100.0 * r.hit_rate);
    out << line;
  }
  return out.str();
}

std::string format_sweep_table(const SweepReport& report) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof(line), "%8s %10s %9s\n", "Cells", "Grid", "Accuracy");
  out << line;
  for (const auto& e : report.entries) {
    const std::string shape = std::to_string(e.report.grid_rows) + "x" + std::to_string(e.report.grid_cols);
    std::snprintf(line, sizeof(line), "%8d %10s %7.1f %%\n", e.cell_count, shape.c_str(), 100.0 * e.report.hit_rate);
    out << line;
  }
  return out.str();
}

}  // namespace hotspot
