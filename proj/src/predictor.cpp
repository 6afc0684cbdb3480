#include "harshnet/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace harshnet::predictor {

void NetworkShape::validate() const {
  if (input_length == 0) throw std::invalid_argument("input length must be positive");
  if (pool == 0 || input_length % pool != 0)
    throw std::invalid_argument("pool width must divide the input length");
  for (auto k : kernels)
    if (k == 0 || k % 2 == 0)
      throw std::invalid_argument("kernel sizes must be odd so padding preserves length");
  for (auto c : channels)
    if (c == 0) throw std::invalid_argument("channel counts must be positive");
  if (fused_channels == 0) throw std::invalid_argument("fused channels must be positive");
}

namespace {

ConvLayer make_layer(std::size_t kernel, std::size_t in_ch, std::size_t out_ch) {
  ConvLayer l;
  l.spec = ConvSpec{kernel, in_ch, out_ch, (kernel - 1) / 2};
  l.weights.assign(kernel * in_ch * out_ch, 0.0);
  l.bias.assign(out_ch, 0.0);
  return l;
}

NetworkParams make_params(const NetworkShape& shape) {
  shape.validate();
  NetworkParams p;
  p.shape = shape;
  for (std::size_t b = 0; b < 3; ++b) {
    std::size_t in_ch = 1;
    for (std::size_t i = 0; i < shape.channels.size(); ++i) {
      p.branches[b].push_back(make_layer(shape.kernels[b], in_ch, shape.channels[i]));
      in_ch = shape.channels[i];
    }
  }
  p.fusion = make_layer(1, shape.concat_channels(), shape.fused_channels);
  p.fc_weights.assign(shape.fc_inputs(), 0.0);
  p.fc_bias = 0.0;
  return p;
}

}  // namespace

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& branch : branches)
    for (const auto& l : branch) n += l.weights.size() + l.bias.size();
  n += fusion.weights.size() + fusion.bias.size();
  n += fc_weights.size() + 1;
  return n;
}

std::vector<double*> parameter_pointers(NetworkParams& p) {
  std::vector<double*> ptrs;
  ptrs.reserve(p.parameter_count());
  auto add = [&](std::vector<double>& v) {
    for (auto& x : v) ptrs.push_back(&x);
  };
  for (auto& branch : p.branches)
    for (auto& l : branch) {
      add(l.weights);
      add(l.bias);
    }
  add(p.fusion.weights);
  add(p.fusion.bias);
  add(p.fc_weights);
  ptrs.push_back(&p.fc_bias);
  return ptrs;
}

NetworkParams zeros_like(const NetworkParams& p) { return make_params(p.shape); }

NetworkParams xavier_init(const NetworkShape& shape, std::uint64_t seed) {
  NetworkParams p = make_params(shape);
  std::mt19937_64 rng(seed);
  auto fill = [&](std::vector<double>& w, std::size_t fan_in, std::size_t fan_out) {
    double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& x : w) x = dist(rng);
  };
  for (auto& branch : p.branches)
    for (auto& l : branch)
      fill(l.weights, l.spec.kernel * l.spec.in_channels, l.spec.kernel * l.spec.out_channels);
  fill(p.fusion.weights, p.fusion.spec.in_channels, p.fusion.spec.out_channels);
  fill(p.fc_weights, p.fc_weights.size(), 1);
  return p;
}

namespace {

void conv_relu_forward(const ConvLayer& l, const Tensor1D& in, Tensor1D& out, bool relu) {
  const auto& s = l.spec;
  out = Tensor1D(in.length, s.out_channels);
  const std::ptrdiff_t len = static_cast<std::ptrdiff_t>(in.length);
  for (std::ptrdiff_t pos = 0; pos < len; ++pos) {
    double* orow = &out.values[pos * s.out_channels];
    for (std::size_t oc = 0; oc < s.out_channels; ++oc) {
      double acc = l.bias[oc];
      for (std::size_t tap = 0; tap < s.kernel; ++tap) {
        std::ptrdiff_t ipos = pos + static_cast<std::ptrdiff_t>(tap) -
                              static_cast<std::ptrdiff_t>(s.padding);
        if (ipos < 0 || ipos >= len) continue;
        const double* wrow = &l.weights[(oc * s.kernel + tap) * s.in_channels];
        const double* irow = &in.values[ipos * s.in_channels];
        for (std::size_t ic = 0; ic < s.in_channels; ++ic) acc += wrow[ic] * irow[ic];
      }
      orow[oc] = relu ? std::max(0.0, acc) : acc;
    }
  }
}

void conv_relu_backward(const ConvLayer& l, const Tensor1D& in, const Tensor1D& out,
                        const Tensor1D& d_out_pre_mask, ConvLayer& grad, Tensor1D& d_in,
                        bool relu) {
  const auto& s = l.spec;
  d_in = Tensor1D(in.length, s.in_channels);
  const std::ptrdiff_t len = static_cast<std::ptrdiff_t>(in.length);
  for (std::ptrdiff_t pos = 0; pos < len; ++pos) {
    for (std::size_t oc = 0; oc < s.out_channels; ++oc) {
      double dz = d_out_pre_mask.at(pos, oc);
      if (relu && out.at(pos, oc) <= 0.0) dz = 0.0;
      if (dz == 0.0) continue;
      grad.bias[oc] += dz;
      for (std::size_t tap = 0; tap < s.kernel; ++tap) {
        std::ptrdiff_t ipos = pos + static_cast<std::ptrdiff_t>(tap) -
                              static_cast<std::ptrdiff_t>(s.padding);
        if (ipos < 0 || ipos >= len) continue;
        double* gw = &grad.weights[(oc * s.kernel + tap) * s.in_channels];
        const double* wrow = &l.weights[(oc * s.kernel + tap) * s.in_channels];
        const double* irow = &in.values[ipos * s.in_channels];
        double* drow = &d_in.values[ipos * s.in_channels];
        for (std::size_t ic = 0; ic < s.in_channels; ++ic) {
          gw[ic] += dz * irow[ic];
          drow[ic] += dz * wrow[ic];
        }
      }
    }
  }
}

}  // namespace

double forward(const NetworkParams& p, const std::vector<double>& input, ForwardCache* cache) {
  const auto& shape = p.shape;
  if (input.size() != shape.input_length)
    throw std::invalid_argument("expected an input of length " +
                                std::to_string(shape.input_length));
  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;

  Tensor1D x(shape.input_length, 1);
  x.values = input;
  const std::size_t plen = shape.pooled_length();
  const std::size_t bch = shape.channels.back();

  for (std::size_t b = 0; b < 3; ++b) {
    c.activations[b][0] = x;
    for (std::size_t i = 0; i < p.branches[b].size(); ++i)
      conv_relu_forward(p.branches[b][i], c.activations[b][i], c.activations[b][i + 1], true);

    const Tensor1D& last = c.activations[b].back();
    c.pooled[b] = Tensor1D(plen, bch);
    c.pool_argmax[b].assign(plen * bch, 0);
    for (std::size_t opos = 0; opos < plen; ++opos)
      for (std::size_t ch = 0; ch < bch; ++ch) {
        std::size_t best = opos * shape.pool;
        double best_v = last.at(best, ch);
        for (std::size_t w = 1; w < shape.pool; ++w) {
          std::size_t pos = opos * shape.pool + w;
          if (last.at(pos, ch) > best_v) {
            best_v = last.at(pos, ch);
            best = pos;
          }
        }
        c.pooled[b].at(opos, ch) = best_v;
        c.pool_argmax[b][opos * bch + ch] = best;
      }
  }

  c.concat = Tensor1D(plen, shape.concat_channels());
  for (std::size_t pos = 0; pos < plen; ++pos)
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t ch = 0; ch < bch; ++ch)
        c.concat.at(pos, b * bch + ch) = c.pooled[b].at(pos, ch);

  conv_relu_forward(p.fusion, c.concat, c.fused, false);

  double out = p.fc_bias;
  for (std::size_t i = 0; i < p.fc_weights.size(); ++i)
    out += p.fc_weights[i] * c.fused.values[i];
  c.output = out;
  return out;
}

void backward_into(const NetworkParams& p, const ForwardCache& cache, double target,
                   double scale, NetworkParams& grad) {
  const auto& shape = p.shape;
  const std::size_t plen = shape.pooled_length();
  const std::size_t bch = shape.channels.back();
  // Every gradient below is linear in the residual, so the scale folds in once.
  double g = scale * 2.0 * (cache.output - target);

  grad.fc_bias += g;
  Tensor1D d_fused(plen, shape.fused_channels);
  for (std::size_t i = 0; i < p.fc_weights.size(); ++i) {
    grad.fc_weights[i] += g * cache.fused.values[i];
    d_fused.values[i] = g * p.fc_weights[i];
  }

  Tensor1D d_concat;
  conv_relu_backward(p.fusion, cache.concat, cache.fused, d_fused, grad.fusion, d_concat,
                     false);

  for (std::size_t b = 0; b < 3; ++b) {
    Tensor1D d_act(shape.input_length, bch);
    for (std::size_t opos = 0; opos < plen; ++opos)
      for (std::size_t ch = 0; ch < bch; ++ch) {
        std::size_t src = cache.pool_argmax[b][opos * bch + ch];
        d_act.at(src, ch) += d_concat.at(opos, b * bch + ch);
      }
    for (std::size_t i = p.branches[b].size(); i-- > 0;) {
      Tensor1D d_in;
      conv_relu_backward(p.branches[b][i], cache.activations[b][i],
                         cache.activations[b][i + 1], d_act, grad.branches[b][i], d_in,
                         true);
      d_act = std::move(d_in);
    }
  }
}

NetworkParams backward(const NetworkParams& p, const ForwardCache& cache, double target) {
  NetworkParams grad = zeros_like(p);
  backward_into(p, cache, target, 1.0, grad);
  return grad;
}

TrainResult train(const std::vector<std::vector<double>>& features,
                  const std::vector<double>& targets, const TrainConfig& cfg,
                  std::uint64_t init_seed, std::uint64_t shuffle_seed) {
  if (features.empty()) throw std::invalid_argument("empty training set");
  if (features.size() != targets.size())
    throw std::invalid_argument("feature/target count mismatch");
  if (cfg.batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");

  TrainResult res;
  res.params = xavier_init(NetworkShape{}, init_seed);
  NetworkParams grad = zeros_like(res.params);
  NetworkParams m1 = zeros_like(res.params);
  NetworkParams m2 = zeros_like(res.params);
  auto ptr_p = parameter_pointers(res.params);
  auto ptr_g = parameter_pointers(grad);
  auto ptr_m = parameter_pointers(m1);
  auto ptr_v = parameter_pointers(m2);
  const std::size_t np = ptr_p.size();

  const std::size_t n = features.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(shuffle_seed);
  ForwardCache cache;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double sq_sum = 0.0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      std::size_t stop = std::min(n, start + cfg.batch_size);
      double inv = 1.0 / static_cast<double>(stop - start);
      for (std::size_t j = 0; j < np; ++j) *ptr_g[j] = 0.0;
      for (std::size_t k = start; k < stop; ++k) {
        std::size_t i = order[k];
        double out = forward(res.params, features[i], &cache);
        double err = out - targets[i];
        sq_sum += err * err;
        backward_into(res.params, cache, targets[i], inv, grad);
      }
      ++res.steps;
      double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(res.steps));
      double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(res.steps));
      for (std::size_t j = 0; j < np; ++j) {
        double gj = *ptr_g[j];
        double& mj = *ptr_m[j];
        double& vj = *ptr_v[j];
        mj = cfg.beta1 * mj + (1.0 - cfg.beta1) * gj;
        vj = cfg.beta2 * vj + (1.0 - cfg.beta2) * gj * gj;
        *ptr_p[j] -= cfg.learning_rate * (mj / bc1) / (std::sqrt(vj / bc2) + cfg.adam_epsilon);
      }
    }
    res.epoch_loss.push_back(sq_sum / static_cast<double>(n));
  }
  return res;
}

Metrics metrics_from_predictions(const std::vector<double>& predicted,
                                 const std::vector<double>& actual, double label_stddev) {
  if (predicted.empty() || predicted.size() != actual.size())
    throw std::invalid_argument("prediction/actual size mismatch or empty");
  if (!(label_stddev > 0.0)) throw std::invalid_argument("label stddev must be positive");
  const double n = static_cast<double>(actual.size());
  double mean = std::accumulate(actual.begin(), actual.end(), 0.0) / n;
  double ss_tot = 0.0, ss_res = 0.0, rel = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    double dt = actual[i] - mean;
    ss_tot += dt * dt;
    double dr = predicted[i] - actual[i];
    ss_res += dr * dr;
    rel += std::abs(dr) / std::max(std::abs(actual[i]), 1e-12);
  }
  if (ss_tot < 1e-12)
    throw std::invalid_argument("zero-variance labels: r-squared undefined");
  Metrics m;
  m.r_squared = 1.0 - ss_res / ss_tot;
  m.rmse = std::sqrt(ss_res / n);
  m.rmse_normalized = m.rmse / label_stddev;
  m.relative_error_pct = 100.0 * rel / n;
  return m;
}

Model train_on_dataset(const envgen::Dataset& train_set, const envgen::FeatureStats& stats,
                       const TrainConfig& cfg, std::uint64_t init_seed,
                       std::uint64_t train_seed, std::vector<double>* epoch_loss) {
  std::vector<std::vector<double>> features;
  std::vector<double> targets;
  features.reserve(train_set.samples.size());
  targets.reserve(train_set.samples.size());
  for (const auto& s : train_set.samples) {
    features.push_back(envgen::normalized_features(s, stats));
    targets.push_back((s.throughput - stats.label_mean) / stats.label_stddev);
  }
  auto res = train(features, targets, cfg, init_seed, train_seed);
  Model m;
  m.params = std::move(res.params);
  m.stats = stats;
  m.config = cfg;
  m.init_seed = init_seed;
  m.train_seed = train_seed;
  m.dataset_seed = train_set.seed;
  if (epoch_loss) *epoch_loss = std::move(res.epoch_loss);
  return m;
}

double predict(const Model& m, const envgen::EnvironmentSample& s) {
  auto f = envgen::normalized_features(s, m.stats);
  double raw = forward(m.params, f);
  return std::max(0.0, raw * m.stats.label_stddev + m.stats.label_mean);
}

Metrics evaluate(const Model& m, const envgen::Dataset& test) {
  if (test.samples.empty()) throw std::invalid_argument("empty test set");
  std::vector<double> predicted, actual;
  predicted.reserve(test.samples.size());
  actual.reserve(test.samples.size());
  for (const auto& s : test.samples) {
    predicted.push_back(predict(m, s));
    actual.push_back(s.throughput);
  }
  return metrics_from_predictions(predicted, actual, m.stats.label_stddev);
}

namespace {

nlohmann::json layer_to_json(const ConvLayer& l) {
  return {{"kernel", l.spec.kernel},
          {"in_channels", l.spec.in_channels},
          {"out_channels", l.spec.out_channels},
          {"padding", l.spec.padding},
          {"weights", l.weights},
          {"bias", l.bias}};
}

ConvLayer layer_from_json(const nlohmann::json& j) {
  ConvLayer l;
  l.spec.kernel = j.at("kernel").get<std::size_t>();
  l.spec.in_channels = j.at("in_channels").get<std::size_t>();
  l.spec.out_channels = j.at("out_channels").get<std::size_t>();
  l.spec.padding = j.at("padding").get<std::size_t>();
  l.weights = j.at("weights").get<std::vector<double>>();
  l.bias = j.at("bias").get<std::vector<double>>();
  if (l.weights.size() != l.spec.kernel * l.spec.in_channels * l.spec.out_channels ||
      l.bias.size() != l.spec.out_channels)
    throw std::runtime_error("conv layer shape mismatch in model file");
  return l;
}

}  // namespace

void save_model(const Model& m, const std::string& path) {
  nlohmann::json j;
  j["format"] = "harshnet-model-v1";
  j["shape"] = {{"input_length", m.params.shape.input_length},
                {"kernels", m.params.shape.kernels},
                {"channels", m.params.shape.channels},
                {"pool", m.params.shape.pool},
                {"fused_channels", m.params.shape.fused_channels}};
  auto branches = nlohmann::json::array();
  for (const auto& branch : m.params.branches) {
    auto jb = nlohmann::json::array();
    for (const auto& l : branch) jb.push_back(layer_to_json(l));
    branches.push_back(jb);
  }
  j["branches"] = branches;
  j["fusion"] = layer_to_json(m.params.fusion);
  j["fc"] = {{"weights", m.params.fc_weights}, {"bias", m.params.fc_bias}};
  j["stats"] = {{"feature_mean", m.stats.mean},
                {"feature_stddev", m.stats.stddev},
                {"label_mean", m.stats.label_mean},
                {"label_stddev", m.stats.label_stddev}};
  j["manifest"] = {{"epochs", m.config.epochs},
                   {"batch_size", m.config.batch_size},
                   {"learning_rate", m.config.learning_rate},
                   {"beta1", m.config.beta1},
                   {"beta2", m.config.beta2},
                   {"adam_epsilon", m.config.adam_epsilon},
                   {"init_seed", m.init_seed},
                   {"train_seed", m.train_seed},
                   {"dataset_seed", m.dataset_seed}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(1) << '\n';
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  if (j.value("format", "") != "harshnet-model-v1")
    throw std::runtime_error("unrecognized model format in " + path);
  Model m;
  const auto& js = j.at("shape");
  m.params.shape.input_length = js.at("input_length").get<std::size_t>();
  m.params.shape.kernels = js.at("kernels").get<std::array<std::size_t, 3>>();
  m.params.shape.channels = js.at("channels").get<std::array<std::size_t, 5>>();
  m.params.shape.pool = js.at("pool").get<std::size_t>();
  m.params.shape.fused_channels = js.at("fused_channels").get<std::size_t>();
  m.params.shape.validate();
  for (std::size_t b = 0; b < 3; ++b)
    for (const auto& jl : j.at("branches").at(b)) m.params.branches[b].push_back(layer_from_json(jl));
  m.params.fusion = layer_from_json(j.at("fusion"));
  m.params.fc_weights = j.at("fc").at("weights").get<std::vector<double>>();
  m.params.fc_bias = j.at("fc").at("bias").get<double>();
  if (m.params.fc_weights.size() != m.params.shape.fc_inputs())
    throw std::runtime_error("dense layer shape mismatch in model file");
  const auto& st = j.at("stats");
  m.stats.mean = st.at("feature_mean").get<std::vector<double>>();
  m.stats.stddev = st.at("feature_stddev").get<std::vector<double>>();
  m.stats.label_mean = st.at("label_mean").get<double>();
  m.stats.label_stddev = st.at("label_stddev").get<double>();
  const auto& mf = j.at("manifest");
  m.config.epochs = mf.at("epochs").get<std::size_t>();
  m.config.batch_size = mf.at("batch_size").get<std::size_t>();
  m.config.learning_rate = mf.at("learning_rate").get<double>();
  m.config.beta1 = mf.at("beta1").get<double>();
  m.config.beta2 = mf.at("beta2").get<double>();
  m.config.adam_epsilon = mf.at("adam_epsilon").get<double>();
  m.init_seed = mf.at("init_seed").get<std::uint64_t>();
  m.train_seed = mf.at("train_seed").get<std::uint64_t>();
  m.dataset_seed = mf.at("dataset_seed").get<std::uint64_t>();
  return m;
}

}  // namespace harshnet::predictor
