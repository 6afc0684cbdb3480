#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "harshnet/csvio.hpp"
#include "harshnet/harness.hpp"

namespace {

namespace fs = std::filesystem;
using namespace harshnet;

constexpr int kOk = 0;
constexpr int kValidationError = 2;
constexpr int kNonConvergence = 3;

harness::ScenarioConfig scenario_from(const std::string& config_path,
                                      std::optional<std::uint64_t> seed) {
  auto sc = config_path.empty() ? harness::default_scenario()
                                : harness::load_scenario(config_path);
  if (seed) sc.dataset_seed = *seed;
  sc.validate();
  return sc;
}

std::string manifest_path_for(const std::string& csv_path) {
  fs::path p(csv_path);
  p.replace_extension(".manifest.json");
  return p.string();
}

int cmd_gen_data(const std::string& config, std::optional<std::uint64_t> seed,
                 std::optional<std::size_t> count, const std::string& out) {
  auto sc = scenario_from(config, seed);
  if (count) sc.dataset_size = *count;
  auto ds = envgen::generate_dataset(sc.dataset_size, sc.dataset_seed, sc.oracle);
  envgen::write_csv(ds, out);
  envgen::write_manifest(ds, sc.oracle, manifest_path_for(out));
  std::cout << "wrote " << ds.samples.size() << " samples to " << out << '\n';
  return kOk;
}

int cmd_train(const std::string& config, std::optional<std::uint64_t> seed,
              const std::string& out) {
  auto sc = scenario_from(config, seed);
  auto pipeline = harness::train_pipeline(sc);
  predictor::save_model(pipeline.model, out);
  auto metrics = predictor::evaluate(pipeline.model, pipeline.test);
  nlohmann::json j;
  j["model"] = out;
  j["train_samples"] = pipeline.train.samples.size();
  j["test_samples"] = pipeline.test.samples.size();
  j["final_epoch_mse"] = pipeline.epoch_loss.empty() ? 0.0 : pipeline.epoch_loss.back();
  j["test"] = {{"r_squared", metrics.r_squared},
               {"rmse", metrics.rmse},
               {"rmse_normalized", metrics.rmse_normalized},
               {"relative_error_pct", metrics.relative_error_pct}};
  std::cout << j.dump(2) << '\n';
  return kOk;
}

int cmd_eval(const std::string& config, std::optional<std::uint64_t> seed,
             const std::string& model_path) {
  auto sc = scenario_from(config, seed);
  auto model = predictor::load_model(model_path);
  auto ds = envgen::generate_dataset(sc.dataset_size, sc.dataset_seed, sc.oracle);
  auto split = envgen::split_dataset(ds, sc.train_fraction, sc.split_seed);
  auto metrics = predictor::evaluate(model, split.test);
  nlohmann::json j = {{"r_squared", metrics.r_squared},
                      {"rmse", metrics.rmse},
                      {"rmse_normalized", metrics.rmse_normalized},
                      {"relative_error_pct", metrics.relative_error_pct},
                      {"test_samples", split.test.samples.size()}};
  std::cout << j.dump(2) << '\n';
  return kOk;
}

int cmd_predict(const std::string& model_path, const std::string& data_path) {
  auto model = predictor::load_model(model_path);
  auto ds = envgen::read_csv(data_path);
  std::cout << "index,actual,predicted\n";
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    std::cout << i << ',' << csvio::format_double(ds.samples[i].throughput) << ','
              << csvio::format_double(predictor::predict(model, ds.samples[i])) << '\n';
  return kOk;
}

int cmd_allocate(const std::string& config, std::optional<std::uint64_t> seed,
                 const std::vector<double>& r_hats, const std::string& events_out) {
  auto sc = scenario_from(config, seed);
  auto rounds = harness::run_allocation(sc, r_hats);

  nlohmann::json j = nlohmann::json::array();
  std::size_t nonconverged = 0;
  std::size_t played = 0;
  std::vector<servicemgmt::LoggedEvent> log;
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    const auto& r = rounds[i];
    nlohmann::json jr;
    jr["round"] = i;
    jr["r_hat"] = r.r_hat;
    jr["lambda"] = r.lambda;
    nlohmann::json services = nlohmann::json::array();
    for (std::size_t a = 0; a < r.participants.size(); ++a)
      services.push_back({{"id", sc.roster[r.participants[a]].id},
                          {"power", r.equilibrium.powers[a]},
                          {"rate", r.equilibrium.rates[a]},
                          {"utility", r.equilibrium.utilities[a]}});
    jr["services"] = services;
    jr["total_rate"] = r.equilibrium.total_rate();
    if (!r.participants.empty()) {
      ++played;
      jr["converged"] = r.equilibrium.converged;
      jr["sweeps"] = r.equilibrium.sweeps;
      if (!r.equilibrium.converged) ++nonconverged;
    }
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : r.events) {
      events.push_back({{"event", servicemgmt::event_name(e.kind)},
                        {"service_id", e.service_id},
                        {"group_id", e.group_id}});
      log.push_back({static_cast<int>(i), e});
    }
    jr["events"] = events;
    j.push_back(std::move(jr));
  }
  if (!events_out.empty()) servicemgmt::write_event_log(events_out, log);
  std::cout << j.dump(2) << '\n';
  if (played > 0 &&
      static_cast<double>(nonconverged) >
          sc.nonconverged_tolerance * static_cast<double>(played))
    return kNonConvergence;
  return kOk;
}

int cmd_compare(const std::string& config, std::optional<std::uint64_t> seed,
                std::string out_dir) {
  auto sc = scenario_from(config, seed);
  if (out_dir.empty()) out_dir = sc.output_dir;
  auto report = harness::run_comparison(sc);
  harness::emit_outputs(report, sc, out_dir);
  nlohmann::json j;
  j["output_dir"] = out_dir;
  j["test_samples"] = report.samples.size();
  j["nonconverged"] = report.nonconverged;
  j["r_squared"] = report.metrics.r_squared;
  j["relative_error_pct"] = report.metrics.relative_error_pct;
  j["avg_power"] = {{"game", report.prop_avg_power}, {"static", report.base_avg_power}};
  j["avg_sinr_db"] = {{"game", report.prop_avg_sinr_db}, {"static", report.base_avg_sinr_db}};
  j["power_reduction_pct"] = report.power_reduction_pct;
  j["sinr_improvement_pct"] = report.sinr_improvement_pct;
  std::cout << j.dump(2) << '\n';
  if (static_cast<double>(report.nonconverged) >
      sc.nonconverged_tolerance * static_cast<double>(report.samples.size()))
    return kNonConvergence;
  return kOk;
}

int cmd_plot(const std::string& dir) {
  harness::render_plots(dir);
  std::cout << "rendered charts in " << dir << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"environment-aware throughput prediction and game-based power allocation"};
  app.require_subcommand(1);

  std::string config, out, model_path, data_path, dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> count;
  std::vector<double> r_hats;

  auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset CSV");
  gen->add_option("--config", config, "scenario JSON file");
  gen->add_option("--seed", seed, "dataset seed override");
  gen->add_option("-n,--count", count, "sample count override");
  gen->add_option("--out", out, "output CSV path")->default_val("data.csv");

  auto* train = app.add_subcommand("train", "train the throughput regressor");
  train->add_option("--config", config, "scenario JSON file");
  train->add_option("--seed", seed, "dataset seed override");
  train->add_option("--out", out, "model JSON path")->default_val("model.json");

  auto* eval = app.add_subcommand("eval", "evaluate a saved model on the test split");
  eval->add_option("--config", config, "scenario JSON file");
  eval->add_option("--seed", seed, "dataset seed override");
  eval->add_option("--model", model_path, "model JSON path")->required();

  auto* predict = app.add_subcommand("predict", "predict throughput for a dataset CSV");
  predict->add_option("--model", model_path, "model JSON path")->required();
  predict->add_option("--data", data_path, "dataset CSV path")->required();

  auto* alloc = app.add_subcommand("allocate", "run priced allocation rounds");
  alloc->add_option("--config", config, "scenario JSON file");
  alloc->add_option("--seed", seed, "dataset seed override");
  alloc->add_option("--rhat", r_hats, "predicted throughput cap per round (Mbps)")
      ->required()
      ->expected(-1);
  alloc->add_option("--events", out, "event log CSV path");

  auto* compare = app.add_subcommand("compare", "full comparison experiment");
  compare->add_option("--config", config, "scenario JSON file");
  compare->add_option("--seed", seed, "dataset seed override");
  compare->add_option("--out", out, "output directory (default from scenario)");

  auto* plot = app.add_subcommand("plot", "re-render SVG charts from emitted CSVs");
  plot->add_option("--dir", dir, "directory with metrics/prediction/convergence CSVs")
      ->default_val("out");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kValidationError;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(config, seed, count, out);
    if (train->parsed()) return cmd_train(config, seed, out);
    if (eval->parsed()) return cmd_eval(config, seed, model_path);
    if (predict->parsed()) return cmd_predict(model_path, data_path);
    if (alloc->parsed()) return cmd_allocate(config, seed, r_hats, out);
    if (compare->parsed()) return cmd_compare(config, seed, out);
    if (plot->parsed()) return cmd_plot(dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidationError;
  }
  return kValidationError;
}
