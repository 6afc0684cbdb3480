#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "harshnet/envgen.hpp"

namespace harshnet::predictor {

/// Position-major signal carrier: value(pos, ch) = values[pos * channels + ch].
struct Tensor1D {
  std::size_t length = 0;
  std::size_t channels = 0;
  std::vector<double> values;

  Tensor1D() = default;
  Tensor1D(std::size_t len, std::size_t ch)
      : length(len), channels(ch), values(len * ch, 0.0) {}

  double& at(std::size_t pos, std::size_t ch) { return values[pos * channels + ch]; }
  double at(std::size_t pos, std::size_t ch) const { return values[pos * channels + ch]; }
};

struct ConvSpec {
  std::size_t kernel = 1;
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t padding = 0;
};

/// Weights stored [out][tap][in] flattened, so the innermost loop over input
/// channels runs over contiguous memory on both weights and activations.
struct ConvLayer {
  ConvSpec spec;
  std::vector<double> weights;
  std::vector<double> bias;

  double& w(std::size_t oc, std::size_t tap, std::size_t ic) {
    return weights[(oc * spec.kernel + tap) * spec.in_channels + ic];
  }
  double w(std::size_t oc, std::size_t tap, std::size_t ic) const {
    return weights[(oc * spec.kernel + tap) * spec.in_channels + ic];
  }
};

/// Three parallel branches with kernel sizes 1/3/5, each running five
/// length-preserving convolutions with channels 64,64,16,16,4 and a ReLU
/// after every conv, then a non-overlapping 4-wide max-pool. The pooled
/// branch outputs concatenate along channels and pass through a linear 1x1
/// fusion conv and a dense layer down to one scalar.
struct NetworkShape {
  std::size_t input_length = 32;
  std::array<std::size_t, 3> kernels{1, 3, 5};
  std::array<std::size_t, 5> channels{64, 64, 16, 16, 4};
  std::size_t pool = 4;
  std::size_t fused_channels = 3;

  std::size_t pooled_length() const { return input_length / pool; }
  std::size_t concat_channels() const { return 3 * channels.back(); }
  std::size_t fc_inputs() const { return pooled_length() * fused_channels; }
  void validate() const;  // throws std::invalid_argument
};

struct NetworkParams {
  NetworkShape shape;
  std::array<std::vector<ConvLayer>, 3> branches;
  ConvLayer fusion;
  std::vector<double> fc_weights;
  double fc_bias = 0.0;

  std::size_t parameter_count() const;
};

/// Flat view over every trainable scalar, in a fixed canonical order.
std::vector<double*> parameter_pointers(NetworkParams& p);

/// Zero-valued gradient (or accumulator) with the same structure as p.
NetworkParams zeros_like(const NetworkParams& p);

/// Uniform weights in +-sqrt(6 / (fan_in + fan_out)) with fan counted as
/// kernel * channels; biases zero. Deterministic per seed.
NetworkParams xavier_init(const NetworkShape& shape, std::uint64_t seed);

struct ForwardCache {
  // activations[b][0] is the input; [1..5] are post-ReLU conv outputs.
  std::array<std::array<Tensor1D, 6>, 3> activations;
  std::array<std::vector<std::size_t>, 3> pool_argmax;  // source position per (pos, ch)
  std::array<Tensor1D, 3> pooled;
  Tensor1D concat;
  Tensor1D fused;
  double output = 0.0;
};

/// Input must have exactly shape.input_length entries (single channel).
double forward(const NetworkParams& p, const std::vector<double>& input,
               ForwardCache* cache = nullptr);

/// Gradient of (output - target)^2 with respect to every parameter.
NetworkParams backward(const NetworkParams& p, const ForwardCache& cache, double target);

/// Accumulates scale * grad of (output - target)^2 into grad.
void backward_into(const NetworkParams& p, const ForwardCache& cache, double target,
                   double scale, NetworkParams& grad);

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 8;
  double learning_rate = 4e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
};

struct TrainResult {
  NetworkParams params;
  std::vector<double> epoch_loss;  // mean squared error per epoch
  std::size_t steps = 0;           // optimizer updates taken
};

/// Mini-batch Adam on mean squared error. Features and targets must already
/// be normalized; rows are reshuffled every epoch from the given seed. The
/// final short batch is used. Deterministic per (data, config, seeds).
TrainResult train(const std::vector<std::vector<double>>& features,
                  const std::vector<double>& targets, const TrainConfig& cfg,
                  std::uint64_t init_seed, std::uint64_t shuffle_seed);

struct Metrics {
  double r_squared = 0.0;
  double rmse = 0.0;             // label units
  double rmse_normalized = 0.0;  // rmse / label stddev
  double relative_error_pct = 0.0;
};

/// Throws on empty input or zero-variance actuals.
Metrics metrics_from_predictions(const std::vector<double>& predicted,
                                 const std::vector<double>& actual,
                                 double label_stddev);

/// Trained network plus the normalization it was trained under.
struct Model {
  NetworkParams params;
  envgen::FeatureStats stats;
  TrainConfig config;
  std::uint64_t init_seed = 0;
  std::uint64_t train_seed = 0;
  std::uint64_t dataset_seed = 0;
};

Model train_on_dataset(const envgen::Dataset& train, const envgen::FeatureStats& stats,
                       const TrainConfig& cfg, std::uint64_t init_seed,
                       std::uint64_t train_seed, std::vector<double>* epoch_loss = nullptr);

/// Denormalized throughput prediction, clamped at zero.
double predict(const Model& m, const envgen::EnvironmentSample& s);

Metrics evaluate(const Model& m, const envgen::Dataset& test);

/// JSON persistence; round-trip is value-exact.
void save_model(const Model& m, const std::string& path);
Model load_model(const std::string& path);

}  // namespace harshnet::predictor
