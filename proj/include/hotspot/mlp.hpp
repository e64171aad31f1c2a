#pragma once

#include "hotspot/forest.hpp"
#include "hotspot/json_io.hpp"
#include "hotspot/labeling.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hotspot {

struct MlpConfig {
  std::vector<int> hidden_layers{21, 21, 21};
  Task task = Task::Regression;
  double learning_rate = 1e-3;
  int batch_size = 32;
  int epochs = 200;
  std::uint64_t seed = 42;
};

// Fully connected layer; weights are outputs x inputs, row-major.
struct DenseLayer {
  int inputs = 0;
  int outputs = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  double& w(int out, int in) { return weights[static_cast<std::size_t>(out) * static_cast<std::size_t>(inputs) + static_cast<std::size_t>(in)]; }
  double w(int out, int in) const { return weights[static_cast<std::size_t>(out) * static_cast<std::size_t>(inputs) + static_cast<std::size_t>(in)]; }
};

struct MlpParams {
  MlpConfig config;
  std::vector<std::string> feature_names;
  std::vector<double> input_mean;  // training-split statistics
  std::vector<double> input_std;   // > 0; constant features get 1
  std::vector<int> labels;         // classification vocabulary
  std::vector<DenseLayer> layers;  // hidden layers then the output layer
};

// He-normal weights (stddev sqrt(2/fan_in)), zero biases, identity
// standardization. Throws InvalidArgument on a bad config.
MlpParams init(const MlpConfig& config, std::size_t n_inputs, std::size_t n_outputs);

// Regression: one linear output. Classification: softmax over `labels`.
std::vector<double> forward(const MlpParams& params, std::span<const double> row);

// Regression value, or the most probable label (ties to the smaller label).
double predict(const MlpParams& params, std::span<const double> row);

// Mean loss over `batch` rows of `data` (MSE or cross-entropy); when `grads`
// is non-null it receives d(loss)/d(parameter) in the same layout as
// params.layers.
double batch_loss(const MlpParams& params, const DesignMatrix& data, std::span<const std::size_t> batch,
                  std::vector<DenseLayer>* grads = nullptr);

// Mini-batch Adam (beta1 0.9, beta2 0.999, eps 1e-8). When `epoch_losses`
// is given it receives the full training loss before training (index 0)
// and after each epoch.
MlpParams train_mlp(const DesignMatrix& data, const MlpConfig& config, std::vector<double>* epoch_losses = nullptr);

Json to_json(const MlpParams& params);
MlpParams mlp_from_json(const Json& j);

}  // namespace hotspot
