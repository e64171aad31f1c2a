#include "hotspot/mlp.hpp"
#include "hotspot/error.hpp"
#include "hotspot/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hotspot {

namespace {

void validate(const MlpConfig& config) {
  if (config.hidden_layers.empty()) throw Error(ErrorCode::InvalidArgument, "at least one hidden layer is required");
  for (int width : config.hidden_layers) {
    if (width < 1) throw Error(ErrorCode::InvalidArgument, "hidden layer widths must be positive");
  }
  if (!(config.learning_rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "learning_rate must be > 0");
  if (config.batch_size < 1) throw Error(ErrorCode::InvalidArgument, "batch_size must be >= 1");
  if (config.epochs < 0) throw Error(ErrorCode::InvalidArgument, "epochs must be >= 0");
}

// Activations of every layer for one row; acts[0] is the standardized input,
// acts.back() the raw output (pre-softmax).
struct Pass {
  std::vector<std::vector<double>> acts;
};

void run(const MlpParams& params, std::span<const double> row, Pass& pass) {
  const std::size_t n_layers = params.layers.size();
  pass.acts.resize(n_layers + 1);
  auto& input = pass.acts[0];
  input.resize(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) input[j] = (row[j] - params.input_mean[j]) / params.input_std[j];

  for (std::size_t l = 0; l < n_layers; ++l) {
    const DenseLayer& layer = params.layers[l];
    const auto& in = pass.acts[l];
    auto& out = pass.acts[l + 1];
    out.assign(static_cast<std::size_t>(layer.outputs), 0.0);
    for (int o = 0; o < layer.outputs; ++o) {
      double z = layer.bias[static_cast<std::size_t>(o)];
      const double* w = &layer.weights[static_cast<std::size_t>(o) * static_cast<std::size_t>(layer.inputs)];
      for (int i = 0; i < layer.inputs; ++i) z += w[i] * in[static_cast<std::size_t>(i)];
      const bool hidden = l + 1 < n_layers;
      out[static_cast<std::size_t>(o)] = hidden ? std::max(0.0, z) : z;
    }
  }
}

void softmax_inplace(std::vector<double>& z) {
  const double top = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (auto& v : z) {
    v = std::exp(v - top);
    sum += v;
  }
  for (auto& v : z) v /= sum;
}

std::size_t label_index(const MlpParams& params, double target) {
  const int label = static_cast<int>(target);
  const auto it = std::lower_bound(params.labels.begin(), params.labels.end(), label);
  if (it == params.labels.end() || *it != label || static_cast<double>(label) != target) {
    throw Error(ErrorCode::InvalidArgument, "target outside the label vocabulary");
  }
  return static_cast<std::size_t>(it - params.labels.begin());
}

std::vector<DenseLayer> zeros_like(const std::vector<DenseLayer>& layers) {
  std::vector<DenseLayer> out = layers;
  for (auto& l : out) {
    std::fill(l.weights.begin(), l.weights.end(), 0.0);
    std::fill(l.bias.begin(), l.bias.end(), 0.0);
  }
  return out;
}

}  // namespace

MlpParams init(const MlpConfig& config, std::size_t n_inputs, std::size_t n_outputs) {
  validate(config);
  if (n_inputs == 0 || n_outputs == 0) throw Error(ErrorCode::InvalidArgument, "network needs inputs and outputs");

  MlpParams params;
  params.config = config;
  params.input_mean.assign(n_inputs, 0.0);
  params.input_std.assign(n_inputs, 1.0);

  rng::Engine engine(rng::derive(config.seed, 0));
  int fan_in = static_cast<int>(n_inputs);
  std::vector<int> widths = config.hidden_layers;
  widths.push_back(static_cast<int>(n_outputs));
  for (int width : widths) {
    DenseLayer layer;
    layer.inputs = fan_in;
    layer.outputs = width;
    layer.weights.resize(static_cast<std::size_t>(fan_in) * static_cast<std::size_t>(width));
    layer.bias.assign(static_cast<std::size_t>(width), 0.0);
    const double scale = std::sqrt(2.0 / fan_in);
    for (auto& w : layer.weights) w = scale * rng::normal(engine);
    params.layers.push_back(std::move(layer));
    fan_in = width;
  }
  return params;
}

std::vector<double> forward(const MlpParams& params, std::span<const double> row) {
  if (row.size() != params.input_mean.size()) {
    throw Error(ErrorCode::InvalidArgument, "row has " + std::to_string(row.size()) + " features, network expects " +
                                                std::to_string(params.input_mean.size()));
  }
  Pass pass;
  run(params, row, pass);
  auto out = std::move(pass.acts.back());
  if (params.config.task == Task::Classification) softmax_inplace(out);
  return out;
}

double predict(const MlpParams& params, std::span<const double> row) {
  const auto out = forward(params, row);
  if (params.config.task == Task::Regression) return out.front();
  const auto top = std::max_element(out.begin(), out.end());
  return params.labels.at(static_cast<std::size_t>(top - out.begin()));
}

double batch_loss(const MlpParams& params, const DesignMatrix& data, std::span<const std::size_t> batch,
                  std::vector<DenseLayer>* grads) {
  if (batch.empty()) throw Error(ErrorCode::EmptyDataset, "empty batch");
  const bool classify = params.config.task == Task::Classification;
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  const std::size_t n_layers = params.layers.size();
  if (grads) *grads = zeros_like(params.layers);

  Pass pass;
  std::vector<double> delta;
  std::vector<double> prev_delta;
  double loss = 0.0;
  for (std::size_t r : batch) {
    run(params, data.row(r), pass);
    auto& out = pass.acts.back();
    delta.assign(out.size(), 0.0);
    if (classify) {
      std::vector<double> prob = out;
      softmax_inplace(prob);
      const std::size_t y = label_index(params, data.targets[r]);
      loss -= std::log(std::max(prob[y], 1e-300));
      for (std::size_t k = 0; k < prob.size(); ++k) delta[k] = (prob[k] - (k == y ? 1.0 : 0.0)) * inv_b;
    } else {
      const double err = out.front() - data.targets[r];
      loss += err * err;
      delta[0] = 2.0 * err * inv_b;
    }
    if (!grads) continue;

    for (std::size_t l = n_layers; l-- > 0;) {
      const DenseLayer& layer = params.layers[l];
      DenseLayer& g = (*grads)[l];
      const auto& in = pass.acts[l];
      for (int o = 0; o < layer.outputs; ++o) {
        const double d = delta[static_cast<std::size_t>(o)];
        if (d == 0.0) continue;
        g.bias[static_cast<std::size_t>(o)] += d;
        double* gw = &g.weights[static_cast<std::size_t>(o) * static_cast<std::size_t>(layer.inputs)];
        for (int i = 0; i < layer.inputs; ++i) gw[i] += d * in[static_cast<std::size_t>(i)];
      }
      if (l == 0) break;
      prev_delta.assign(static_cast<std::size_t>(layer.inputs), 0.0);
      for (int o = 0; o < layer.outputs; ++o) {
        const double d = delta[static_cast<std::size_t>(o)];
        if (d == 0.0) continue;
        for (int i = 0; i < layer.inputs; ++i) prev_delta[static_cast<std::size_t>(i)] += layer.w(o, i) * d;
      }
      // ReLU gate: the hidden activation is positive exactly when its input was.
      for (std::size_t i = 0; i < prev_delta.size(); ++i) {
        if (!(in[i] > 0.0)) prev_delta[i] = 0.0;
      }
      std::swap(delta, prev_delta);
    }
  }
  return loss * inv_b;
}

MlpParams train_mlp(const DesignMatrix& data, const MlpConfig& config, std::vector<double>* epoch_losses) {
  validate(config);
  if (data.rows == 0) throw Error(ErrorCode::EmptyDataset, "cannot train a network on zero rows");

  std::vector<int> labels;
  if (config.task == Task::Classification) labels = label_vocabulary(data);
  const std::size_t n_outputs = config.task == Task::Classification ? labels.size() : 1;
  MlpParams params = init(config, data.cols(), n_outputs);
  params.feature_names = data.feature_names;
  params.labels = std::move(labels);

  const std::size_t p = data.cols();
  const double n = static_cast<double>(data.rows);
  for (std::size_t j = 0; j < p; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < data.rows; ++i) mean += data.at(i, j);
    mean /= n;
    double var = 0.0;
    for (std::size_t i = 0; i < data.rows; ++i) var += (data.at(i, j) - mean) * (data.at(i, j) - mean);
    const double sd = std::sqrt(var / n);
    params.input_mean[j] = mean;
    params.input_std[j] = sd > 1e-12 ? sd : 1.0;
  }

  std::vector<std::size_t> order(data.rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (epoch_losses) {
    epoch_losses->clear();
    epoch_losses->push_back(batch_loss(params, data, order));
  }

  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  std::vector<DenseLayer> m = zeros_like(params.layers);
  std::vector<DenseLayer> v = zeros_like(params.layers);
  std::vector<DenseLayer> grads;
  rng::Engine engine(rng::derive(config.seed, 1));
  const std::size_t batch_size = std::min<std::size_t>(static_cast<std::size_t>(config.batch_size), data.rows);
  long step = 0;

  const auto adam = [&](std::vector<double>& theta, std::vector<double>& m1, std::vector<double>& m2,
                        const std::vector<double>& g, double c1, double c2) {
    for (std::size_t k = 0; k < theta.size(); ++k) {
      m1[k] = kBeta1 * m1[k] + (1.0 - kBeta1) * g[k];
      m2[k] = kBeta2 * m2[k] + (1.0 - kBeta2) * g[k] * g[k];
      theta[k] -= config.learning_rate * (m1[k] / c1) / (std::sqrt(m2[k] / c2) + kEps);
    }
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t k = order.size(); k > 1; --k) {
      std::swap(order[k - 1], order[static_cast<std::size_t>(rng::below(engine, k))]);
    }
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t stop = std::min(order.size(), start + batch_size);
      batch_loss(params, data, std::span(order).subspan(start, stop - start), &grads);
      ++step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      for (std::size_t l = 0; l < params.layers.size(); ++l) {
        adam(params.layers[l].weights, m[l].weights, v[l].weights, grads[l].weights, c1, c2);
        adam(params.layers[l].bias, m[l].bias, v[l].bias, grads[l].bias, c1, c2);
      }
    }
    if (epoch_losses) {
      std::vector<std::size_t> all(data.rows);
      std::iota(all.begin(), all.end(), std::size_t{0});
      epoch_losses->push_back(batch_loss(params, data, all));
    }
  }
  return params;
}

Json to_json(const MlpParams& params) {
  const auto& c = params.config;
  Json layers = Json::array();
  for (const auto& l : params.layers) {
    layers.push_back({{"inputs", l.inputs}, {"outputs", l.outputs}, {"weights", l.weights}, {"bias", l.bias}});
  }
  return Json{{"schema", "hotspot.mlp/1"},
              {"config",
               {{"hidden_layers", c.hidden_layers},
                {"activation", "relu"},
                {"task", to_string(c.task)},
                {"learning_rate", c.learning_rate},
                {"batch_size", c.batch_size},
                {"epochs", c.epochs},
                {"seed", c.seed}}},
              {"feature_names", params.feature_names},
              {"input_mean", params.input_mean},
              {"input_std", params.input_std},
              {"labels", params.labels},
              {"layers", layers}};
}

MlpParams mlp_from_json(const Json& j) {
  if (j.value("schema", "") != "hotspot.mlp/1") throw Error(ErrorCode::InvalidArgument, "not a hotspot.mlp/1 document");
  MlpParams params;
  const Json& c = j.at("config");
  params.config.hidden_layers = c.at("hidden_layers").get<std::vector<int>>();
  params.config.task = parse_task(c.at("task").get<std::string>());
  params.config.learning_rate = c.at("learning_rate").get<double>();
  params.config.batch_size = c.at("batch_size").get<int>();
  params.config.epochs = c.at("epochs").get<int>();
  params.config.seed = c.at("seed").get<std::uint64_t>();
  params.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  params.input_mean = j.at("input_mean").get<std::vector<double>>();
  params.input_std = j.at("input_std").get<std::vector<double>>();
  params.labels = j.at("labels").get<std::vector<int>>();
  for (const auto& lj : j.at("layers")) {
    DenseLayer l;
    l.inputs = lj.at("inputs").get<int>();
    l.outputs = lj.at("outputs").get<int>();
    l.weights = lj.at("weights").get<std::vector<double>>();
    l.bias = lj.at("bias").get<std::vector<double>>();
    params.layers.push_back(std::move(l));
  }
  return params;
}

}  // namespace hotspot
