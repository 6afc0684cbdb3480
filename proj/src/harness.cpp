#include "harshnet/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "harshnet/csvio.hpp"
#include "harshnet/svgplot.hpp"

namespace harshnet::harness {

namespace {

double db_of(double linear) { return 10.0 * std::log10(std::max(linear, 1e-30)); }

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

void ScenarioConfig::validate() const {
  if (dataset_size < 4) throw std::invalid_argument("dataset too small to split");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train fraction must be in (0,1)");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  if (!(noise_power > 0.0)) throw std::invalid_argument("noise power must be positive");
  if (!(power_cap > 0.0) || std::isinf(power_cap))
    throw std::invalid_argument("power cap must be positive and finite");
  if (!(p_static > 0.0 && p_static <= power_cap))
    throw std::invalid_argument("static power must be in (0, power_cap]");
  if (!(dominance_ratio >= 1.0))
    throw std::invalid_argument("dominance ratio must be at least 1");
  if (nonconverged_tolerance < 0.0 || nonconverged_tolerance > 1.0)
    throw std::invalid_argument("non-convergence tolerance must be in [0,1]");
  if (max_iter == 0) throw std::invalid_argument("need at least one sweep");
  if (roster.empty()) throw std::invalid_argument("roster must not be empty");
  std::vector<int> ids;
  for (const auto& s : roster) {
    if (!(s.weight > 0.0)) throw std::invalid_argument("service weights must be positive");
    if (s.min_rate < 0.0) throw std::invalid_argument("min_rate must be nonnegative");
    ids.push_back(s.id);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
    throw std::invalid_argument("duplicate service ids in roster");
}

ScenarioConfig default_scenario() {
  ScenarioConfig sc;
  const char* tags[] = {"video", "telemetry", "scada", "voice", "inspection", "bulk"};
  const double weights[] = {0.30, 0.22, 0.16, 0.13, 0.10, 0.09};
  for (int i = 0; i < 6; ++i) {
    servicemgmt::ServiceDescriptor s;
    s.id = i;
    s.function_tag = tags[i];
    s.weight = weights[i];
    s.min_rate = 0.5;
    sc.roster.push_back(std::move(s));
  }
  return sc;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open scenario: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("bad scenario json: " + std::string(e.what()));
  }
  ScenarioConfig sc = default_scenario();
  if (j.contains("dataset")) {
    const auto& d = j["dataset"];
    sc.dataset_size = d.value("size", sc.dataset_size);
    sc.dataset_seed = d.value("seed", sc.dataset_seed);
    sc.train_fraction = d.value("train_fraction", sc.train_fraction);
    sc.split_seed = d.value("split_seed", sc.split_seed);
    if (d.contains("oracle")) {
      const auto& o = d["oracle"];
      sc.oracle.bandwidth_ref = o.value("bandwidth_ref", sc.oracle.bandwidth_ref);
      sc.oracle.power_ref = o.value("power_ref", sc.oracle.power_ref);
      sc.oracle.noise_floor = o.value("noise_floor", sc.oracle.noise_floor);
      sc.oracle.emi_coupling = o.value("emi_coupling", sc.oracle.emi_coupling);
    }
  }
  if (j.contains("training")) {
    const auto& t = j["training"];
    sc.training.epochs = t.value("epochs", sc.training.epochs);
    sc.training.batch_size = t.value("batch_size", sc.training.batch_size);
    sc.training.learning_rate = t.value("learning_rate", sc.training.learning_rate);
    sc.training.beta1 = t.value("beta1", sc.training.beta1);
    sc.training.beta2 = t.value("beta2", sc.training.beta2);
    sc.training.adam_epsilon = t.value("adam_epsilon", sc.training.adam_epsilon);
    sc.init_seed = t.value("init_seed", sc.init_seed);
    sc.train_seed = t.value("train_seed", sc.train_seed);
  }
  if (j.contains("game")) {
    const auto& g = j["game"];
    sc.bandwidth = g.value("bandwidth", sc.bandwidth);
    sc.noise_power = g.value("noise_power", sc.noise_power);
    sc.power_cap = g.value("power_cap", sc.power_cap);
    sc.gain_seed = g.value("gain_seed", sc.gain_seed);
    sc.dominance_ratio = g.value("dominance_ratio", sc.dominance_ratio);
    sc.p_static = g.value("p_static", 0.8 * sc.power_cap);
    sc.max_iter = g.value("max_iter", sc.max_iter);
    sc.nonconverged_tolerance =
        g.value("nonconverged_tolerance", sc.nonconverged_tolerance);
  }
  if (j.contains("roster")) {
    sc.roster.clear();
    for (const auto& e : j["roster"]) {
      servicemgmt::ServiceDescriptor s;
      s.id = e.at("id").get<int>();
      s.function_tag = e.at("function_tag").get<std::string>();
      s.weight = e.at("weight").get<double>();
      s.min_rate = e.value("min_rate", 0.0);
      sc.roster.push_back(std::move(s));
    }
  }
  sc.output_dir = j.value("output_dir", sc.output_dir);
  sc.validate();
  return sc;
}

std::vector<double> generate_gains(std::size_t L, double dominance_ratio,
                                   std::uint64_t seed) {
  if (L == 0) throw std::invalid_argument("need at least one service");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cross(0.02, 0.2);
  std::uniform_real_distribution<double> headroom(1.0, 1.5);
  std::vector<double> g(L * L, 0.0);
  for (std::size_t l = 0; l < L; ++l) {
    double row_sum = 0.0;
    for (std::size_t k = 0; k < L; ++k) {
      if (k == l) continue;
      g[l * L + k] = cross(rng);
      row_sum += g[l * L + k];
    }
    if (L == 1) row_sum = 0.1;  // lone service still needs a direct gain
    g[l * L + l] = dominance_ratio * row_sum * headroom(rng);
  }
  return g;
}

game::GameConfig build_game(const ScenarioConfig& sc,
                            const std::vector<std::size_t>& participants,
                            const std::vector<double>& full_gains) {
  const std::size_t full = sc.roster.size();
  if (full_gains.size() != full * full)
    throw std::invalid_argument("gain matrix does not match the roster");
  game::GameConfig cfg;
  cfg.num_services = participants.size();
  cfg.bandwidth = sc.bandwidth;
  cfg.noise_power = sc.noise_power;
  cfg.power_cap = sc.power_cap;
  cfg.lambda = 0.0;
  cfg.gains.resize(participants.size() * participants.size());
  for (std::size_t a = 0; a < participants.size(); ++a) {
    cfg.weights.push_back(sc.roster[participants[a]].weight);
    for (std::size_t b = 0; b < participants.size(); ++b)
      cfg.gains[a * participants.size() + b] =
          full_gains[participants[a] * full + participants[b]];
  }
  return cfg;
}

BaselineOutcome static_baseline(const game::GameConfig& cfg, double p_static, double r_hat) {
  const std::size_t L = cfg.num_services;
  if (!(p_static > 0.0 && p_static <= cfg.power_cap))
    throw std::invalid_argument("static power must be in (0, power_cap]");

  std::vector<std::size_t> order(L);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (cfg.weights[a] != cfg.weights[b]) return cfg.weights[a] > cfg.weights[b];
    return a < b;
  });

  BaselineOutcome out;
  out.admitted.assign(L, false);
  out.powers.assign(L, 0.0);
  for (std::size_t l : order) {
    out.powers[l] = p_static;
    auto rates = game::rate_from_sinr(game::sinr(out.powers, cfg), cfg);
    double total = 0.0;
    for (std::size_t k = 0; k < L; ++k)
      if (out.powers[k] > 0.0) total += rates[k];
    if (total <= r_hat) {
      out.admitted[l] = true;
    } else {
      out.powers[l] = 0.0;
    }
  }
  out.sinrs = game::sinr(out.powers, cfg);
  out.rates = game::rate_from_sinr(out.sinrs, cfg);
  out.total_rate = std::accumulate(out.rates.begin(), out.rates.end(), 0.0);
  return out;
}

TrainedPipeline train_pipeline(const ScenarioConfig& sc) {
  sc.validate();
  auto ds = envgen::generate_dataset(sc.dataset_size, sc.dataset_seed, sc.oracle);
  auto split = envgen::split_dataset(ds, sc.train_fraction, sc.split_seed);
  TrainedPipeline p;
  p.model = predictor::train_on_dataset(split.train, *split.train.stats, sc.training,
                                        sc.init_seed, sc.train_seed, &p.epoch_loss);
  p.train = std::move(split.train);
  p.test = std::move(split.test);
  return p;
}

namespace {

std::vector<std::size_t> comparison_participants(const ScenarioConfig& sc) {
  auto groups = servicemgmt::form_groups(sc.roster);
  std::vector<std::size_t> participants;
  for (const auto* svc : servicemgmt::active_services(groups)) {
    for (std::size_t i = 0; i < sc.roster.size(); ++i)
      if (sc.roster[i].id == svc->id) participants.push_back(i);
  }
  return participants;
}

}  // namespace

ComparisonReport run_comparison(const ScenarioConfig& sc) {
  auto pipeline = train_pipeline(sc);
  auto full_gains = generate_gains(sc.roster.size(), sc.dominance_ratio, sc.gain_seed);
  auto participants = comparison_participants(sc);
  auto cfg = build_game(sc, participants, full_gains);

  ComparisonReport report;
  report.epoch_loss = pipeline.epoch_loss;
  report.services = participants.size();

  std::vector<double> predicted, actual;
  for (std::size_t i = 0; i < pipeline.test.samples.size(); ++i) {
    const auto& sample = pipeline.test.samples[i];
    SampleResult r;
    r.index = i;
    r.actual = sample.throughput;
    r.predicted = predictor::predict(pipeline.model, sample);
    predicted.push_back(r.predicted);
    actual.push_back(r.actual);

    double cap = std::max(r.predicted, 1e-6);  // a zero prediction still prices the game
    auto tuned = game::tune_lambda(cfg, cap, sc.max_iter);
    r.lambda = tuned.lambda;
    r.converged = tuned.equilibrium.converged;
    r.sweeps = tuned.equilibrium.sweeps;
    r.prop_total_rate = tuned.equilibrium.total_rate();
    r.prop_avg_power = mean_of(tuned.equilibrium.powers);
    r.prop_avg_sinr_linear = mean_of(tuned.equilibrium.sinrs);
    r.prop_avg_sinr_db = db_of(r.prop_avg_sinr_linear);
    r.equilibrium = std::move(tuned.equilibrium);

    auto base = static_baseline(cfg, sc.p_static, cap);
    r.base_total_rate = base.total_rate;
    r.base_avg_power = mean_of(base.powers);
    r.base_avg_sinr_linear = mean_of(base.sinrs);
    r.base_avg_sinr_db = db_of(r.base_avg_sinr_linear);
    report.samples.push_back(std::move(r));
  }

  report.metrics = predictor::metrics_from_predictions(predicted, actual,
                                                       pipeline.model.stats.label_stddev);

  std::size_t used = 0;
  for (const auto& s : report.samples) {
    if (!s.converged) {
      ++report.nonconverged;
      continue;
    }
    ++used;
    report.prop_avg_power += s.prop_avg_power;
    report.base_avg_power += s.base_avg_power;
    report.prop_avg_sinr_linear += s.prop_avg_sinr_linear;
    report.base_avg_sinr_linear += s.base_avg_sinr_linear;
    report.prop_avg_rate += s.prop_total_rate;
    report.base_avg_rate += s.base_total_rate;
  }
  if (used > 0) {
    double inv = 1.0 / static_cast<double>(used);
    report.prop_avg_power *= inv;
    report.base_avg_power *= inv;
    report.prop_avg_sinr_linear *= inv;
    report.base_avg_sinr_linear *= inv;
    report.prop_avg_rate *= inv;
    report.base_avg_rate *= inv;
    report.prop_avg_sinr_db = db_of(report.prop_avg_sinr_linear);
    report.base_avg_sinr_db = db_of(report.base_avg_sinr_linear);
    if (report.base_avg_power > 0.0)
      report.power_reduction_pct =
          100.0 * (report.base_avg_power - report.prop_avg_power) / report.base_avg_power;
    if (report.base_avg_sinr_linear > 0.0)
      report.sinr_improvement_pct = 100.0 *
          (report.prop_avg_sinr_linear - report.base_avg_sinr_linear) /
          report.base_avg_sinr_linear;
  }
  return report;
}

namespace {

using csvio::format_double;

std::vector<std::size_t> ascending_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<std::size_t> rank(values.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) rank[order[pos]] = pos;
  return rank;
}

struct ChartData {
  // prediction rows ordered by ascending rank
  std::vector<double> pred_rank, pred_actual, pred_predicted;
  // per-sample comparison columns in chronological order
  std::vector<double> sample_index, prop_power, base_power, prop_db, base_db;
  // first sample's trace: utility per service over sweeps
  std::vector<double> sweep_index;
  std::vector<std::vector<double>> sweep_utilities;  // [service][sweep]
};

void write_charts(const std::string& dir, const ChartData& d) {
  namespace fs = std::filesystem;
  {
    svgplot::ChartSpec spec;
    spec.title = "Throughput prediction on the test partition";
    spec.x_label = "test sample (sorted by measured throughput)";
    spec.y_label = "throughput (Mbps)";
    spec.series.push_back({"measured", d.pred_rank, d.pred_actual, ""});
    spec.series.push_back({"predicted", d.pred_rank, d.pred_predicted, ""});
    svgplot::write_line_chart((fs::path(dir) / "fig_prediction.svg").string(), spec);
  }
  {
    svgplot::ChartSpec spec;
    spec.title = "Best-response convergence (first test sample)";
    spec.x_label = "sweep";
    spec.y_label = "service utility";
    for (std::size_t l = 0; l < d.sweep_utilities.size(); ++l)
      spec.series.push_back(
          {"service " + std::to_string(l), d.sweep_index, d.sweep_utilities[l], ""});
    svgplot::write_line_chart((fs::path(dir) / "fig_convergence.svg").string(), spec);
  }
  {
    svgplot::ChartSpec spec;
    spec.title = "Average transmit power per test sample";
    spec.x_label = "test sample";
    spec.y_label = "average power (W)";
    spec.series.push_back({"game", d.sample_index, d.prop_power, ""});
    spec.series.push_back({"static", d.sample_index, d.base_power, ""});
    svgplot::write_line_chart((fs::path(dir) / "fig_power.svg").string(), spec);
  }
  {
    svgplot::ChartSpec spec;
    spec.title = "Average SINR per test sample";
    spec.x_label = "test sample";
    spec.y_label = "average SINR (dB)";
    spec.series.push_back({"game", d.sample_index, d.prop_db, ""});
    spec.series.push_back({"static", d.sample_index, d.base_db, ""});
    svgplot::write_line_chart((fs::path(dir) / "fig_sinr.svg").string(), spec);
  }
}

}  // namespace

void emit_outputs(const ComparisonReport& report, const ScenarioConfig& sc,
                  const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory: " + out_dir);
  const std::size_t L = report.services;

  csvio::Table metrics;
  metrics.header = {"sample", "actual", "predicted", "lambda", "converged", "sweeps",
                    "prop_total_rate", "prop_avg_power", "prop_avg_sinr_linear",
                    "prop_avg_sinr_db", "base_total_rate", "base_avg_power",
                    "base_avg_sinr_linear", "base_avg_sinr_db"};
  for (const auto& s : report.samples)
    metrics.rows.push_back({std::to_string(s.index), format_double(s.actual),
                            format_double(s.predicted), format_double(s.lambda),
                            s.converged ? "1" : "0", std::to_string(s.sweeps),
                            format_double(s.prop_total_rate), format_double(s.prop_avg_power),
                            format_double(s.prop_avg_sinr_linear),
                            format_double(s.prop_avg_sinr_db),
                            format_double(s.base_total_rate), format_double(s.base_avg_power),
                            format_double(s.base_avg_sinr_linear),
                            format_double(s.base_avg_sinr_db)});
  csvio::write_table((fs::path(out_dir) / "metrics.csv").string(), metrics);

  std::vector<double> actuals;
  for (const auto& s : report.samples) actuals.push_back(s.actual);
  auto ranks = ascending_ranks(actuals);
  csvio::Table pred;
  pred.header = {"chrono_index", "ascending_rank", "actual", "predicted"};
  for (const auto& s : report.samples)
    pred.rows.push_back({std::to_string(s.index), std::to_string(ranks[s.index]),
                         format_double(s.actual), format_double(s.predicted)});
  csvio::write_table((fs::path(out_dir) / "prediction.csv").string(), pred);

  csvio::Table conv;
  conv.header = {"sample", "sweep", "rate_delta"};
  for (std::size_t l = 0; l < L; ++l) conv.header.push_back("power_" + std::to_string(l));
  for (std::size_t l = 0; l < L; ++l) conv.header.push_back("utility_" + std::to_string(l));
  for (const auto& s : report.samples)
    for (std::size_t it = 0; it < s.equilibrium.trace.size(); ++it) {
      const auto& rec = s.equilibrium.trace[it];
      std::vector<std::string> row = {std::to_string(s.index), std::to_string(it + 1),
                                      format_double(rec.rate_delta)};
      for (double p : rec.powers) row.push_back(format_double(p));
      for (double u : rec.utilities) row.push_back(format_double(u));
      conv.rows.push_back(std::move(row));
    }
  csvio::write_table((fs::path(out_dir) / "convergence.csv").string(), conv);

  csvio::Table loss;
  loss.header = {"epoch", "mse"};
  for (std::size_t e = 0; e < report.epoch_loss.size(); ++e)
    loss.rows.push_back({std::to_string(e + 1), format_double(report.epoch_loss[e])});
  csvio::write_table((fs::path(out_dir) / "training_loss.csv").string(), loss);

  nlohmann::json summary;
  summary["test_samples"] = report.samples.size();
  summary["services"] = report.services;
  summary["nonconverged"] = report.nonconverged;
  summary["prediction"] = {{"r_squared", report.metrics.r_squared},
                           {"rmse", report.metrics.rmse},
                           {"rmse_normalized", report.metrics.rmse_normalized},
                           {"relative_error_pct", report.metrics.relative_error_pct}};
  summary["game"] = {{"avg_power", report.prop_avg_power},
                     {"avg_sinr_db", report.prop_avg_sinr_db},
                     {"avg_sinr_linear", report.prop_avg_sinr_linear},
                     {"avg_total_rate", report.prop_avg_rate}};
  summary["static_baseline"] = {{"avg_power", report.base_avg_power},
                                {"avg_sinr_db", report.base_avg_sinr_db},
                                {"avg_sinr_linear", report.base_avg_sinr_linear},
                                {"avg_total_rate", report.base_avg_rate}};
  summary["power_reduction_pct"] = report.power_reduction_pct;
  summary["sinr_improvement_pct"] = report.sinr_improvement_pct;
  summary["scenario"] = {{"dataset_size", sc.dataset_size},
                         {"dataset_seed", sc.dataset_seed},
                         {"gain_seed", sc.gain_seed},
                         {"dominance_ratio", sc.dominance_ratio},
                         {"p_static", sc.p_static}};
  std::ofstream sout(fs::path(out_dir) / "summary.json", std::ios::binary);
  if (!sout) throw std::runtime_error("cannot write summary.json");
  sout << summary.dump(2) << '\n';

  ChartData d;
  std::vector<std::size_t> order(report.samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ranks[a] < ranks[b]; });
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const auto& s = report.samples[order[pos]];
    d.pred_rank.push_back(static_cast<double>(pos));
    d.pred_actual.push_back(s.actual);
    d.pred_predicted.push_back(s.predicted);
  }
  for (const auto& s : report.samples) {
    d.sample_index.push_back(static_cast<double>(s.index));
    d.prop_power.push_back(s.prop_avg_power);
    d.base_power.push_back(s.base_avg_power);
    d.prop_db.push_back(s.prop_avg_sinr_db);
    d.base_db.push_back(s.base_avg_sinr_db);
  }
  if (!report.samples.empty()) {
    const auto& trace = report.samples.front().equilibrium.trace;
    d.sweep_utilities.assign(L, {});
    for (std::size_t it = 0; it < trace.size(); ++it) {
      d.sweep_index.push_back(static_cast<double>(it + 1));
      for (std::size_t l = 0; l < L; ++l)
        d.sweep_utilities[l].push_back(trace[it].utilities[l]);
    }
  }
  write_charts(out_dir, d);
}

void render_plots(const std::string& dir) {
  namespace fs = std::filesystem;
  auto metrics = csvio::read_table((fs::path(dir) / "metrics.csv").string());
  auto pred = csvio::read_table((fs::path(dir) / "prediction.csv").string());
  auto conv = csvio::read_table((fs::path(dir) / "convergence.csv").string());

  auto col = [](const csvio::Table& t, const std::string& name) {
    auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end()) throw std::runtime_error("missing csv column: " + name);
    return static_cast<std::size_t>(it - t.header.begin());
  };

  ChartData d;
  {
    std::size_t c_rank = col(pred, "ascending_rank");
    std::size_t c_actual = col(pred, "actual");
    std::size_t c_pred = col(pred, "predicted");
    std::vector<std::vector<std::string>> rows = pred.rows;
    std::stable_sort(rows.begin(), rows.end(),
                     [&](const auto& a, const auto& b) {
                       return std::stoul(a[c_rank]) < std::stoul(b[c_rank]);
                     });
    for (const auto& row : rows) {
      d.pred_rank.push_back(static_cast<double>(d.pred_rank.size()));
      d.pred_actual.push_back(csvio::parse_double(row[c_actual]));
      d.pred_predicted.push_back(csvio::parse_double(row[c_pred]));
    }
  }
  {
    std::size_t c_sample = col(metrics, "sample");
    std::size_t c_pp = col(metrics, "prop_avg_power");
    std::size_t c_bp = col(metrics, "base_avg_power");
    std::size_t c_pd = col(metrics, "prop_avg_sinr_db");
    std::size_t c_bd = col(metrics, "base_avg_sinr_db");
    for (const auto& row : metrics.rows) {
      d.sample_index.push_back(csvio::parse_double(row[c_sample]));
      d.prop_power.push_back(csvio::parse_double(row[c_pp]));
      d.base_power.push_back(csvio::parse_double(row[c_bp]));
      d.prop_db.push_back(csvio::parse_double(row[c_pd]));
      d.base_db.push_back(csvio::parse_double(row[c_bd]));
    }
  }
  {
    std::vector<std::size_t> ucols;
    for (std::size_t c = 0; c < conv.header.size(); ++c)
      if (conv.header[c].rfind("utility_", 0) == 0) ucols.push_back(c);
    d.sweep_utilities.assign(ucols.size(), {});
    if (!conv.rows.empty()) {
      std::size_t c_sample = col(conv, "sample");
      const std::string first = conv.rows.front()[c_sample];
      for (const auto& row : conv.rows) {
        if (row[c_sample] != first) continue;
        d.sweep_index.push_back(static_cast<double>(d.sweep_index.size() + 1));
        for (std::size_t u = 0; u < ucols.size(); ++u)
          d.sweep_utilities[u].push_back(csvio::parse_double(row[ucols[u]]));
      }
    }
  }
  write_charts(dir, d);
}

std::vector<AllocationRound> run_allocation(const ScenarioConfig& sc,
                                            const std::vector<double>& r_hats) {
  sc.validate();
  auto groups = servicemgmt::form_groups(sc.roster);
  auto full_gains = generate_gains(sc.roster.size(), sc.dominance_ratio, sc.gain_seed);

  std::vector<AllocationRound> rounds;
  for (double r_hat : r_hats) {
    AllocationRound round;
    round.r_hat = r_hat;
    for (const auto* svc : servicemgmt::active_services(groups))
      for (std::size_t i = 0; i < sc.roster.size(); ++i)
        if (sc.roster[i].id == svc->id) round.participants.push_back(i);

    std::map<int, double> rates;
    if (!round.participants.empty()) {
      auto cfg = build_game(sc, round.participants, full_gains);
      auto tuned = game::tune_lambda(cfg, std::max(r_hat, 1e-9), sc.max_iter);
      round.lambda = tuned.lambda;
      round.equilibrium = std::move(tuned.equilibrium);
      for (std::size_t a = 0; a < round.participants.size(); ++a)
        rates[sc.roster[round.participants[a]].id] = round.equilibrium.rates[a];
    }
    round.events = servicemgmt::reorganize(groups, r_hat, rates);
    rounds.push_back(std::move(round));
  }
  return rounds;
}

}  // namespace harshnet::harness
