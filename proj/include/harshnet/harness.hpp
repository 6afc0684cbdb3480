#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "harshnet/envgen.hpp"
#include "harshnet/game.hpp"
#include "harshnet/predictor.hpp"
#include "harshnet/servicemgmt.hpp"

namespace harshnet::harness {

/// Everything one experiment needs, loadable from a JSON file. Any omitted
/// key falls back to the defaults below.
struct ScenarioConfig {
  std::size_t dataset_size = 416;
  std::uint64_t dataset_seed = 7;
  double train_fraction = 0.75;
  std::uint64_t split_seed = 21;
  envgen::OracleConstants oracle;

  predictor::TrainConfig training;
  std::uint64_t init_seed = 1;
  std::uint64_t train_seed = 2;

  double bandwidth = 8.0;    // Mbps scale of B log2(1+SINR)
  double noise_power = 0.2;
  double power_cap = 1.0;
  std::uint64_t gain_seed = 11;
  double dominance_ratio = 2.0;
  double p_static = 0.8;     // baseline transmit power
  std::size_t max_iter = 200;
  double nonconverged_tolerance = 0.05;  // accepted fraction of bad samples

  std::vector<servicemgmt::ServiceDescriptor> roster;
  std::string output_dir = "out";

  void validate() const;  // throws std::invalid_argument
};

ScenarioConfig default_scenario();
ScenarioConfig load_scenario(const std::string& path);

/// Row-wise diagonally dominant gain matrix: off-diagonal entries are drawn
/// uniform, each direct gain is the row's off-diagonal sum times the
/// dominance ratio times a uniform factor in [1, 1.5].
std::vector<double> generate_gains(std::size_t L, double dominance_ratio, std::uint64_t seed);

/// Game built from the scenario for the given participants (indices into the
/// roster). Gains are the submatrix of the full roster gain matrix.
game::GameConfig build_game(const ScenarioConfig& sc,
                            const std::vector<std::size_t>& participants,
                            const std::vector<double>& full_gains);

struct BaselineOutcome {
  std::vector<double> powers;
  std::vector<double> rates;
  std::vector<double> sinrs;
  std::vector<bool> admitted;
  double total_rate = 0.0;
};

/// Fixed-power admission: services ask in descending weight order (ties by
/// ascending index) and are admitted at p_static while the cumulative rate of
/// the admitted set stays within r_hat; everyone else stays silent.
BaselineOutcome static_baseline(const game::GameConfig& cfg, double p_static, double r_hat);

struct TrainedPipeline {
  envgen::Dataset train;
  envgen::Dataset test;
  predictor::Model model;
  std::vector<double> epoch_loss;
};

TrainedPipeline train_pipeline(const ScenarioConfig& sc);

struct SampleResult {
  std::size_t index = 0;  // chronological position within the test partition
  double actual = 0.0;
  double predicted = 0.0;
  double lambda = 0.0;
  bool converged = false;
  std::size_t sweeps = 0;
  double prop_total_rate = 0.0;
  double prop_avg_power = 0.0;
  double prop_avg_sinr_linear = 0.0;
  double prop_avg_sinr_db = 0.0;
  double base_total_rate = 0.0;
  double base_avg_power = 0.0;
  double base_avg_sinr_linear = 0.0;
  double base_avg_sinr_db = 0.0;
  game::EquilibriumResult equilibrium;
};

struct ComparisonReport {
  std::vector<SampleResult> samples;
  predictor::Metrics metrics;
  std::vector<double> epoch_loss;
  std::size_t services = 0;
  std::size_t nonconverged = 0;
  // Averages over converged samples only.
  double prop_avg_power = 0.0, base_avg_power = 0.0;
  double prop_avg_sinr_linear = 0.0, base_avg_sinr_linear = 0.0;
  double prop_avg_sinr_db = 0.0, base_avg_sinr_db = 0.0;
  double prop_avg_rate = 0.0, base_avg_rate = 0.0;
  double power_reduction_pct = 0.0;   // (base - prop) / base, on average power
  double sinr_improvement_pct = 0.0;  // (prop - base) / base, on average linear SINR
};

/// Full experiment: generate, split, train, then per test sample tune the
/// price against the prediction, solve the game, and run the static baseline.
ComparisonReport run_comparison(const ScenarioConfig& sc);

/// Writes metrics.csv, prediction.csv, convergence.csv, training_loss.csv,
/// summary.json and four SVG charts into out_dir.
void emit_outputs(const ComparisonReport& report, const ScenarioConfig& sc,
                  const std::string& out_dir);

/// Re-renders the SVG charts from previously emitted CSV files.
void render_plots(const std::string& dir);

struct AllocationRound {
  double r_hat = 0.0;
  double lambda = 0.0;
  std::vector<std::size_t> participants;  // roster indices in game order
  game::EquilibriumResult equilibrium;
  std::vector<servicemgmt::ServiceEvent> events;
};

/// Sequential allocation rounds with service-group management between them:
/// each round plays the game among currently active services, then failover,
/// suspension, and reactivation react to the measured rates.
std::vector<AllocationRound> run_allocation(const ScenarioConfig& sc,
                                            const std::vector<double>& r_hats);

}  // namespace harshnet::harness
