#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "harshnet/envgen.hpp"

using namespace harshnet::envgen;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
  return fs::temp_directory_path() / name;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  double num = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  return num / std::sqrt(va * vb);
}

}  // namespace

TEST_CASE("oracle hits its configured ceiling with a clean environment") {
  OracleConstants c;
  std::vector<double> emi(kEmiPositions, 0.0);
  double expected = c.bandwidth_ref * std::log2(1.0 + c.power_ref / c.noise_floor);
  CHECK(oracle_throughput(emi, 20.0, 40.0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("oracle decreases when every EMI reading doubles") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> val(0.01, 2.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> emi(kEmiPositions);
    for (auto& e : emi) e = val(rng);
    double before = oracle_throughput(emi, 25.0, 50.0);
    for (auto& e : emi) e *= 2.0;
    CHECK(oracle_throughput(emi, 25.0, 50.0) < before);
  }
}

TEST_CASE("oracle strictly decreases in any single EMI entry") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> val(0.01, 2.0);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<double> emi(kEmiPositions);
    for (auto& e : emi) e = val(rng);
    double before = oracle_throughput(emi, 30.0, 55.0);
    emi[rng() % kEmiPositions] += val(rng);
    CHECK(oracle_throughput(emi, 30.0, 55.0) < before);
  }
}

TEST_CASE("derating curves kick in above their thresholds") {
  CHECK(temperature_derating(10.0) == 1.0);
  CHECK(temperature_derating(35.0) == 1.0);
  CHECK(temperature_derating(45.0) == doctest::Approx(0.8));
  CHECK(temperature_derating(100.0) == 0.5);
  CHECK(humidity_derating(30.0) == 1.0);
  CHECK(humidity_derating(60.0) == 1.0);
  CHECK(humidity_derating(80.0) == doctest::Approx(0.88));
  CHECK(humidity_derating(100.0) == doctest::Approx(0.76));
}

TEST_CASE("generation is bit-identical per seed") {
  auto a = generate_dataset(64, 7);
  auto b = generate_dataset(64, 7);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].emi == b.samples[i].emi);
    CHECK(a.samples[i].temperature == b.samples[i].temperature);
    CHECK(a.samples[i].humidity == b.samples[i].humidity);
    CHECK(a.samples[i].throughput == b.samples[i].throughput);
  }
  auto c = generate_dataset(64, 8);
  CHECK(a.samples[0].emi != c.samples[0].emi);
}

TEST_CASE("generated samples satisfy the field invariants") {
  auto ds = generate_dataset(416, 7);
  REQUIRE(ds.samples.size() == 416);
  for (const auto& s : ds.samples) {
    REQUIRE(s.emi.size() == kEmiPositions);
    for (double e : s.emi) CHECK(e >= 0.0);
    CHECK(s.humidity >= 0.0);
    CHECK(s.humidity <= 100.0);
    CHECK(s.throughput >= 0.0);
  }
}

TEST_CASE("generation rejects an empty request") {
  CHECK_THROWS_AS(generate_dataset(0, 1), std::invalid_argument);
}

TEST_CASE("neighboring EMI positions are strongly correlated") {
  auto ds = generate_dataset(416, 7);
  std::vector<double> left, right;
  for (const auto& s : ds.samples)
    for (std::size_t j = 0; j + 1 < kEmiPositions; ++j) {
      left.push_back(s.emi[j]);
      right.push_back(s.emi[j + 1]);
    }
  CHECK(pearson(left, right) >= 0.5);
}

TEST_CASE("mean EMI level anticorrelates with the label") {
  auto ds = generate_dataset(416, 7);
  std::vector<double> mean_emi, label;
  for (const auto& s : ds.samples) {
    double m = 0;
    for (double e : s.emi) m += e;
    mean_emi.push_back(m / kEmiPositions);
    label.push_back(s.throughput);
  }
  CHECK(pearson(mean_emi, label) < 0.0);
}

TEST_CASE("split produces the documented partition sizes") {
  auto ds = generate_dataset(416, 7);
  auto sp = split_dataset(ds, 0.75, 21);
  CHECK(sp.train.samples.size() == 312);
  CHECK(sp.test.samples.size() == 104);

  auto tiny = generate_dataset(4, 7);
  auto sp2 = split_dataset(tiny, 0.75, 21);
  CHECK(sp2.train.samples.size() == 3);
  CHECK(sp2.test.samples.size() == 1);
}

TEST_CASE("split is a disjoint exhaustive partition") {
  auto ds = generate_dataset(101, 9);
  auto sp = split_dataset(ds, 0.6, 5);
  CHECK(sp.train.samples.size() + sp.test.samples.size() == ds.samples.size());
  // Labels are continuous, so they identify rows; the sorted union must
  // reproduce the original multiset.
  std::vector<double> all, orig;
  for (const auto& s : sp.train.samples) all.push_back(s.throughput);
  for (const auto& s : sp.test.samples) all.push_back(s.throughput);
  for (const auto& s : ds.samples) orig.push_back(s.throughput);
  std::sort(all.begin(), all.end());
  std::sort(orig.begin(), orig.end());
  CHECK(all == orig);
}

TEST_CASE("split partitions keep chronological order") {
  auto ds = generate_dataset(50, 1);
  auto sp = split_dataset(ds, 0.5, 2);
  auto is_subsequence = [&](const std::vector<EnvironmentSample>& sub) {
    std::size_t i = 0;
    for (const auto& s : ds.samples)
      if (i < sub.size() && sub[i].throughput == s.throughput &&
          sub[i].temperature == s.temperature)
        ++i;
    return i == sub.size();
  };
  CHECK(is_subsequence(sp.train.samples));
  CHECK(is_subsequence(sp.test.samples));
}

TEST_CASE("split rejects fractions that empty a partition") {
  auto ds = generate_dataset(4, 7);
  CHECK_THROWS_AS(split_dataset(ds, 0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_dataset(ds, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_dataset(ds, 0.0, 1), std::invalid_argument);
}

TEST_CASE("train statistics z-score the training partition exactly") {
  auto ds = generate_dataset(200, 13);
  auto sp = split_dataset(ds, 0.75, 3);
  REQUIRE(sp.train.stats.has_value());
  const auto& st = *sp.train.stats;
  std::vector<double> mean(kFeatureCount, 0.0), var(kFeatureCount, 0.0);
  for (const auto& s : sp.train.samples) {
    auto f = normalized_features(s, st);
    for (std::size_t j = 0; j < kFeatureCount; ++j) mean[j] += f[j];
  }
  double n = static_cast<double>(sp.train.samples.size());
  for (auto& m : mean) m /= n;
  for (const auto& s : sp.train.samples) {
    auto f = normalized_features(s, st);
    for (std::size_t j = 0; j < kFeatureCount; ++j)
      var[j] += (f[j] - mean[j]) * (f[j] - mean[j]);
  }
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    CHECK(std::abs(mean[j]) < 1e-9);
    CHECK(std::abs(std::sqrt(var[j] / n) - 1.0) < 1e-9);
  }
}

TEST_CASE("csv round trip preserves every value") {
  auto ds = generate_dataset(40, 17);
  auto path = temp_file("envgen_roundtrip.csv");
  write_csv(ds, path.string());
  auto back = read_csv(path.string());
  REQUIRE(back.samples.size() == ds.samples.size());
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    CHECK(back.samples[i].emi == ds.samples[i].emi);
    CHECK(back.samples[i].temperature == ds.samples[i].temperature);
    CHECK(back.samples[i].humidity == ds.samples[i].humidity);
    CHECK(back.samples[i].throughput == ds.samples[i].throughput);
  }
  fs::remove(path);
}

TEST_CASE("csv layout matches the declared 33-column header") {
  auto ds = generate_dataset(3, 2);
  auto path = temp_file("envgen_header.csv");
  write_csv(ds, path.string());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header.substr(0, 14) == "emi_00,emi_01,");
  CHECK(header.find("emi_29,temperature,humidity,throughput") != std::string::npos);
  CHECK(std::count(header.begin(), header.end(), ',') == 32);
  std::string row;
  std::getline(in, row);
  CHECK(std::count(row.begin(), row.end(), ',') == 32);
  fs::remove(path);
}

TEST_CASE("two writes of one dataset are byte-identical") {
  auto ds = generate_dataset(25, 5);
  auto pa = temp_file("envgen_a.csv");
  auto pb = temp_file("envgen_b.csv");
  write_csv(ds, pa.string());
  write_csv(ds, pb.string());
  std::ifstream fa(pa, std::ios::binary), fb(pb, std::ios::binary);
  std::string a((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  std::string b((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  CHECK(a == b);
  CHECK_FALSE(a.empty());
  fs::remove(pa);
  fs::remove(pb);
}

TEST_CASE("manifest records seed, count, and oracle constants") {
  auto ds = generate_dataset(10, 99);
  auto path = temp_file("envgen_manifest.json");
  write_manifest(ds, OracleConstants{}, path.string());
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("\"seed\": 99") != std::string::npos);
  CHECK(text.find("\"count\": 10") != std::string::npos);
  CHECK(text.find("bandwidth_ref") != std::string::npos);
  fs::remove(path);
}
