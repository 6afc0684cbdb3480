#include "harshnet/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace harshnet::game {

namespace {

constexpr double kLn2 = 0.693147180559945309417;

double interference(std::size_t l, const std::vector<double>& p, const GameConfig& cfg) {
  double acc = 0.0;
  for (std::size_t k = 0; k < cfg.num_services; ++k)
    if (k != l) acc += cfg.gain(l, k) * p[k];
  return acc;
}

}  // namespace

void GameConfig::validate() const {
  if (num_services == 0) throw std::invalid_argument("game needs at least one service");
  if (gains.size() != num_services * num_services)
    throw std::invalid_argument("gain matrix must be L x L");
  for (std::size_t l = 0; l < num_services; ++l) {
    if (!(gain(l, l) > 0.0)) throw std::invalid_argument("direct gains must be positive");
    for (std::size_t k = 0; k < num_services; ++k)
      if (gain(l, k) < 0.0) throw std::invalid_argument("gains must be nonnegative");
  }
  if (!(noise_power > 0.0)) throw std::invalid_argument("noise power must be positive");
  if (!(power_cap > 0.0)) throw std::invalid_argument("power cap must be positive");
  if (lambda < 0.0) throw std::invalid_argument("price must be nonnegative");
  if (lambda == 0.0 && std::isinf(power_cap))
    throw std::invalid_argument("free power with no cap makes the game unbounded");
  if (!(epsilon > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (weights.size() != num_services)
    throw std::invalid_argument("need one weight per service");
  for (double w : weights)
    if (!(w > 0.0)) throw std::invalid_argument("weights must be positive");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
}

std::vector<double> sinr(const std::vector<double>& p, const GameConfig& cfg) {
  std::vector<double> out(cfg.num_services);
  for (std::size_t l = 0; l < cfg.num_services; ++l)
    out[l] = cfg.gain(l, l) * p[l] / (cfg.noise_power + interference(l, p, cfg));
  return out;
}

std::vector<double> rate_from_sinr(const std::vector<double>& s, const GameConfig& cfg) {
  std::vector<double> out(s.size());
  for (std::size_t l = 0; l < s.size(); ++l) out[l] = cfg.bandwidth * std::log2(1.0 + s[l]);
  return out;
}

double utility(std::size_t l, const std::vector<double>& p, const GameConfig& cfg) {
  if (l >= cfg.num_services) throw std::out_of_range("service index out of range");
  double s = cfg.gain(l, l) * p[l] / (cfg.noise_power + interference(l, p, cfg));
  return cfg.weights[l] * cfg.bandwidth * std::log2(1.0 + s) - cfg.lambda * p[l];
}

double best_response(std::size_t l, const std::vector<double>& p, const GameConfig& cfg) {
  if (l >= cfg.num_services) throw std::out_of_range("service index out of range");
  if (cfg.lambda == 0.0) {
    if (std::isinf(cfg.power_cap))
      throw std::invalid_argument("free power with no cap makes the game unbounded");
    return cfg.power_cap;  // utility strictly increasing in own power
  }
  double floor = (cfg.noise_power + interference(l, p, cfg)) / cfg.gain(l, l);
  double unclamped = cfg.weights[l] * cfg.bandwidth / (cfg.lambda * kLn2) - floor;
  return std::clamp(unclamped, 0.0, cfg.power_cap);
}

double EquilibriumResult::total_rate() const {
  return std::accumulate(rates.begin(), rates.end(), 0.0);
}

EquilibriumResult find_equilibrium(const GameConfig& cfg, const std::vector<double>& p_init,
                                   std::size_t max_iter) {
  cfg.validate();
  if (p_init.size() != cfg.num_services)
    throw std::invalid_argument("initial profile has wrong length");
  if (max_iter == 0) throw std::invalid_argument("need at least one sweep");

  EquilibriumResult res;
  res.powers = p_init;
  for (auto& p : res.powers) p = std::clamp(p, 0.0, cfg.power_cap);
  std::vector<double> prev_rates = rate_from_sinr(sinr(res.powers, cfg), cfg);

  for (std::size_t it = 0; it < max_iter; ++it) {
    for (std::size_t l = 0; l < cfg.num_services; ++l)
      res.powers[l] = best_response(l, res.powers, cfg);

    res.sinrs = sinr(res.powers, cfg);
    res.rates = rate_from_sinr(res.sinrs, cfg);
    res.utilities.resize(cfg.num_services);
    for (std::size_t l = 0; l < cfg.num_services; ++l)
      res.utilities[l] = cfg.weights[l] * res.rates[l] - cfg.lambda * res.powers[l];

    double delta_sq = 0.0;
    for (std::size_t l = 0; l < cfg.num_services; ++l) {
      double d = res.rates[l] - prev_rates[l];
      delta_sq += d * d;
    }
    double delta = std::sqrt(delta_sq);
    res.trace.push_back(SweepRecord{res.powers, res.rates, res.utilities, delta});
    res.sweeps = it + 1;
    prev_rates = res.rates;
    if (delta < cfg.epsilon) {
      res.converged = true;
      break;
    }
  }
  return res;
}

std::vector<double> random_profile(const GameConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double hi = std::isinf(cfg.power_cap) ? 1.0 : cfg.power_cap;
  std::uniform_real_distribution<double> dist(0.0, hi);
  std::vector<double> p(cfg.num_services);
  for (auto& x : p) x = dist(rng);
  return p;
}

NashCheck verify_nash(const std::vector<double>& profile, const GameConfig& cfg,
                      std::size_t grid_points, double tol) {
  cfg.validate();
  if (profile.size() != cfg.num_services)
    throw std::invalid_argument("profile has wrong length");
  if (grid_points < 2) throw std::invalid_argument("grid needs at least both endpoints");
  if (std::isinf(cfg.power_cap))
    throw std::invalid_argument("grid verification needs a finite cap");

  NashCheck check;
  check.worst_gain = -std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < cfg.num_services; ++l) {
    // Own interference is fixed while l deviates, so evaluate u_l directly.
    double intf = cfg.noise_power + interference(l, profile, cfg);
    auto u = [&](double pl) {
      return cfg.weights[l] * cfg.bandwidth * std::log2(1.0 + cfg.gain(l, l) * pl / intf) -
             cfg.lambda * pl;
    };
    double held = u(profile[l]);
    for (std::size_t j = 0; j < grid_points; ++j) {
      double pl = cfg.power_cap * static_cast<double>(j) / static_cast<double>(grid_points - 1);
      double gain = u(pl) - held;
      if (gain > check.worst_gain) {
        check.worst_gain = gain;
        check.worst_service = l;
      }
    }
  }
  check.verified = check.worst_gain < tol;
  return check;
}

TuneResult tune_lambda(const GameConfig& cfg, double r_hat, std::size_t max_iter) {
  if (!(r_hat > 0.0)) throw std::invalid_argument("throughput cap must be positive");
  if (std::isinf(cfg.power_cap))
    throw std::invalid_argument("price tuning needs a finite cap");

  GameConfig probe = cfg;
  std::vector<double> init(cfg.num_services, cfg.power_cap / 2.0);
  TuneResult res;

  auto solve = [&](double lambda) {
    probe.lambda = lambda;
    auto eq = find_equilibrium(probe, init, max_iter);
    res.lattice.push_back(TunePoint{lambda, eq.total_rate()});
    return eq;
  };
  auto finish = [&](double lambda, EquilibriumResult eq) {
    res.lambda = lambda;
    res.slack = r_hat - eq.total_rate();
    res.equilibrium = std::move(eq);
    std::sort(res.lattice.begin(), res.lattice.end(),
              [](const TunePoint& a, const TunePoint& b) { return a.lambda < b.lambda; });
    return res;
  };

  auto eq_lo = solve(kLambdaFloor);
  if (eq_lo.total_rate() <= r_hat) return finish(kLambdaFloor, std::move(eq_lo));

  res.cap_binding = true;
  double lo = kLambdaFloor;
  double hi = 1.0;
  auto eq_hi = solve(hi);
  while (eq_hi.total_rate() > r_hat && hi < kLambdaCeiling) {
    lo = hi;
    hi *= 2.0;
    eq_hi = solve(hi);
  }
  if (eq_hi.total_rate() > r_hat) {
    res.satisfiable = false;
    return finish(hi, std::move(eq_hi));
  }

  // Invariant: lo violates the cap, hi satisfies it.
  for (int step = 0; step < 60; ++step) {
    double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;  // bracket is down to adjacent doubles
    auto eq_mid = solve(mid);
    if (eq_mid.total_rate() <= r_hat) {
      hi = mid;
      eq_hi = std::move(eq_mid);
    } else {
      lo = mid;
    }
  }
  return finish(hi, std::move(eq_hi));
}

}  // namespace harshnet::game
