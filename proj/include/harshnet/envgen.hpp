#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace harshnet::envgen {

inline constexpr std::size_t kEmiPositions = 30;
inline constexpr std::size_t kFeatureCount = kEmiPositions + 2;

/// One measurement: 30 EMI radiation power densities at fixed positions,
/// ambient temperature and humidity, and the throughput label in Mbps.
struct EnvironmentSample {
  std::vector<double> emi;
  double temperature = 0.0;
  double humidity = 0.0;
  double throughput = 0.0;
};

/// Per-feature z-score statistics in CSV column order, plus label statistics.
/// Always computed from a training partition, never from test data.
struct FeatureStats {
  std::vector<double> mean;
  std::vector<double> stddev;
  double label_mean = 0.0;
  double label_stddev = 1.0;
};

struct Dataset {
  std::vector<EnvironmentSample> samples;
  std::uint64_t seed = 0;
  std::optional<FeatureStats> stats;
};

/// Constants of the synthetic ground-truth channel. Throughput is
///   bandwidth_ref * log2(1 + power_ref / (noise_floor + emi_coupling * mean(emi)))
/// scaled down by the temperature and humidity deratings below.
struct OracleConstants {
  double bandwidth_ref = 12.0;
  double power_ref = 1.0;
  double noise_floor = 0.004;
  double emi_coupling = 0.06;
};

// 1.0 up to 35 C, then linear decay of 0.02 per degree, floored at 0.5.
double temperature_derating(double celsius);
// 1.0 up to 60%, then linear decay of 0.006 per point, floored at 0.4.
double humidity_derating(double percent);

double oracle_throughput(const std::vector<double>& emi, double temperature,
                         double humidity, const OracleConstants& c = {});

/// Deterministic per seed. EMI positions form a spatially correlated
/// lognormal field; temperature and humidity follow a seasonal cycle with
/// three readings per day; labels carry 1% multiplicative Gaussian noise.
Dataset generate_dataset(std::size_t n, std::uint64_t seed,
                         const OracleConstants& c = {});

struct Split {
  Dataset train;
  Dataset test;
};

/// Seed-shuffled disjoint split. floor(n * train_fraction) rows to train,
/// remainder to test; each partition keeps chronological row order.
/// Train statistics are computed and attached to both partitions.
Split split_dataset(const Dataset& ds, double train_fraction, std::uint64_t seed);

FeatureStats compute_stats(const Dataset& train);

/// Feature vector in CSV column order, z-scored with the given statistics.
std::vector<double> normalized_features(const EnvironmentSample& s, const FeatureStats& st);

void write_csv(const Dataset& ds, const std::string& path);
Dataset read_csv(const std::string& path);

/// Sidecar JSON recording seed, sample count, and oracle constants.
void write_manifest(const Dataset& ds, const OracleConstants& c, const std::string& path);

}  // namespace harshnet::envgen
