#include "harshnet/envgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "harshnet/csvio.hpp"

namespace harshnet::envgen {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Latent-field parameters of the EMI model.
constexpr double kEmiLogMean = -0.693;     // typical reading around 0.5
constexpr double kSpatialRho = 0.7;        // lag-1 correlation across positions
constexpr double kSpatialSigma = 0.35;
constexpr double kTemporalRho = 0.9;
constexpr double kTemporalSigma = 0.12;
constexpr double kMiddaySlotBump = 0.25;   // industrial load peaks at midday

constexpr double kLabelNoise = 0.01;

}  // namespace

double temperature_derating(double celsius) {
  if (celsius <= 35.0) return 1.0;
  return std::max(0.5, 1.0 - 0.02 * (celsius - 35.0));
}

double humidity_derating(double percent) {
  if (percent <= 60.0) return 1.0;
  return std::max(0.4, 1.0 - 0.006 * (percent - 60.0));
}

double oracle_throughput(const std::vector<double>& emi, double temperature,
                         double humidity, const OracleConstants& c) {
  if (emi.size() != kEmiPositions) throw std::invalid_argument("expected 30 EMI readings");
  double mean_emi = std::accumulate(emi.begin(), emi.end(), 0.0) / emi.size();
  double sinr = c.power_ref / (c.noise_floor + c.emi_coupling * mean_emi);
  return c.bandwidth_ref * std::log2(1.0 + sinr) * temperature_derating(temperature) *
         humidity_derating(humidity);
}

Dataset generate_dataset(std::size_t n, std::uint64_t seed, const OracleConstants& c) {
  if (n == 0) throw std::invalid_argument("dataset size must be at least 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  Dataset ds;
  ds.seed = seed;
  ds.samples.reserve(n);

  // Slot offsets for the three readings per day: night, midday, evening.
  const double slot_temp[3] = {-4.0, 6.0, 1.0};
  const double slot_hum[3] = {6.0, -12.0, 2.0};
  const double slot_emi[3] = {0.0, kMiddaySlotBump, 0.0};

  double level = 0.3 * unit(rng);  // slow temporal drift of overall EMI load
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t day = i / 3;
    std::size_t slot = i % 3;
    level = kTemporalRho * level + kTemporalSigma * unit(rng);

    EnvironmentSample s;
    s.emi.resize(kEmiPositions);
    double x = kSpatialSigma * unit(rng);
    for (std::size_t j = 0; j < kEmiPositions; ++j) {
      if (j > 0)
        x = kSpatialRho * x +
            kSpatialSigma * std::sqrt(1.0 - kSpatialRho * kSpatialRho) * unit(rng);
      s.emi[j] = std::exp(kEmiLogMean + level + slot_emi[slot] + x);
    }

    double season = 2.0 * kPi * static_cast<double>(day % 365) / 365.0;
    s.temperature = 20.0 + 14.0 * std::sin(season) + slot_temp[slot] + 2.0 * unit(rng);
    s.humidity = 60.0 + 18.0 * std::sin(season + 2.0) + slot_hum[slot] + 6.0 * unit(rng);
    s.humidity = std::clamp(s.humidity, 0.0, 100.0);

    double clean = oracle_throughput(s.emi, s.temperature, s.humidity, c);
    s.throughput = std::max(0.0, clean * (1.0 + kLabelNoise * unit(rng)));
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

Split split_dataset(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train fraction must be in (0,1)");
  std::size_t n = ds.samples.size();
  std::size_t n_train = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * train_fraction));
  if (n_train == 0 || n_train == n)
    throw std::invalid_argument("split produces an empty partition");

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);

  std::vector<std::size_t> train_idx(idx.begin(), idx.begin() + n_train);
  std::vector<std::size_t> test_idx(idx.begin() + n_train, idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  Split sp;
  sp.train.seed = ds.seed;
  sp.test.seed = ds.seed;
  for (auto i : train_idx) sp.train.samples.push_back(ds.samples[i]);
  for (auto i : test_idx) sp.test.samples.push_back(ds.samples[i]);
  auto stats = compute_stats(sp.train);
  sp.train.stats = stats;
  sp.test.stats = stats;
  return sp;
}

namespace {

std::vector<double> raw_features(const EnvironmentSample& s) {
  std::vector<double> f;
  f.reserve(kFeatureCount);
  f.insert(f.end(), s.emi.begin(), s.emi.end());
  f.push_back(s.temperature);
  f.push_back(s.humidity);
  return f;
}

}  // namespace

FeatureStats compute_stats(const Dataset& train) {
  if (train.samples.empty()) throw std::invalid_argument("empty training set");
  const double n = static_cast<double>(train.samples.size());
  FeatureStats st;
  st.mean.assign(kFeatureCount, 0.0);
  st.stddev.assign(kFeatureCount, 0.0);
  for (const auto& s : train.samples) {
    auto f = raw_features(s);
    for (std::size_t j = 0; j < kFeatureCount; ++j) st.mean[j] += f[j];
    st.label_mean += s.throughput;
  }
  for (auto& m : st.mean) m /= n;
  st.label_mean /= n;
  double label_var = 0.0;
  for (const auto& s : train.samples) {
    auto f = raw_features(s);
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      double d = f[j] - st.mean[j];
      st.stddev[j] += d * d;
    }
    double d = s.throughput - st.label_mean;
    label_var += d * d;
  }
  for (auto& v : st.stddev) {
    v = std::sqrt(v / n);
    if (v < 1e-12) v = 1.0;  // constant feature, leave it centered only
  }
  st.label_stddev = std::sqrt(label_var / n);
  if (st.label_stddev < 1e-12) st.label_stddev = 1.0;
  return st;
}

std::vector<double> normalized_features(const EnvironmentSample& s, const FeatureStats& st) {
  auto f = raw_features(s);
  for (std::size_t j = 0; j < kFeatureCount; ++j) f[j] = (f[j] - st.mean[j]) / st.stddev[j];
  return f;
}

namespace {

std::vector<std::string> csv_header() {
  std::vector<std::string> h;
  for (std::size_t j = 0; j < kEmiPositions; ++j) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "emi_%02zu", j);
    h.emplace_back(buf);
  }
  h.emplace_back("temperature");
  h.emplace_back("humidity");
  h.emplace_back("throughput");
  return h;
}

}  // namespace

void write_csv(const Dataset& ds, const std::string& path) {
  csvio::Table t;
  t.header = csv_header();
  for (const auto& s : ds.samples) {
    std::vector<std::string> row;
    row.reserve(kFeatureCount + 1);
    for (double e : s.emi) row.push_back(csvio::format_double(e));
    row.push_back(csvio::format_double(s.temperature));
    row.push_back(csvio::format_double(s.humidity));
    row.push_back(csvio::format_double(s.throughput));
    t.rows.push_back(std::move(row));
  }
  csvio::write_table(path, t);
}

Dataset read_csv(const std::string& path) {
  auto t = csvio::read_table(path);
  if (t.header != csv_header()) throw std::runtime_error("unexpected csv header in " + path);
  Dataset ds;
  ds.samples.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    EnvironmentSample s;
    s.emi.reserve(kEmiPositions);
    for (std::size_t j = 0; j < kEmiPositions; ++j)
      s.emi.push_back(csvio::parse_double(row[j]));
    s.temperature = csvio::parse_double(row[kEmiPositions]);
    s.humidity = csvio::parse_double(row[kEmiPositions + 1]);
    s.throughput = csvio::parse_double(row[kEmiPositions + 2]);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

void write_manifest(const Dataset& ds, const OracleConstants& c, const std::string& path) {
  nlohmann::json j;
  j["seed"] = ds.seed;
  j["count"] = ds.samples.size();
  j["oracle"] = {{"bandwidth_ref", c.bandwidth_ref},
                 {"power_ref", c.power_ref},
                 {"noise_floor", c.noise_floor},
                 {"emi_coupling", c.emi_coupling}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace harshnet::envgen
