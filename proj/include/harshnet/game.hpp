#pragma once

#include <cstdint>
#include <vector>

namespace harshnet::game {

/// Priced power-control game. Each service l transmits at power p_l and
/// earns utility w_l * B * log2(1 + SINR_l) - lambda * p_l.
struct GameConfig {
  std::size_t num_services = 0;
  double bandwidth = 1.0;      // rate per unit spectral efficiency (e.g. Mbps)
  double noise_power = 1.0;    // W
  std::vector<double> gains;   // row-major L x L, gains[l*L+k] couples k into l
  double power_cap = 1.0;      // W, may be +infinity when lambda > 0
  double lambda = 0.0;         // price per W
  double epsilon = 1e-6;       // convergence tolerance on the rate vector
  std::vector<double> weights;

  double gain(std::size_t l, std::size_t k) const {
    return gains[l * num_services + k];
  }
  void validate() const;  // throws std::invalid_argument
};

std::vector<double> sinr(const std::vector<double>& p, const GameConfig& cfg);
std::vector<double> rate_from_sinr(const std::vector<double>& s, const GameConfig& cfg);
double utility(std::size_t l, const std::vector<double>& p, const GameConfig& cfg);

/// Unique maximizer of service l's utility given the other powers:
/// clamp(w_l B / (lambda ln 2) - (noise + interference) / g_ll, 0, cap).
double best_response(std::size_t l, const std::vector<double>& p, const GameConfig& cfg);

struct SweepRecord {
  std::vector<double> powers;
  std::vector<double> rates;
  std::vector<double> utilities;
  double rate_delta = 0.0;  // L2 change of the rate vector over this sweep
};

struct EquilibriumResult {
  std::vector<double> powers;
  std::vector<double> rates;
  std::vector<double> sinrs;
  std::vector<double> utilities;
  std::size_t sweeps = 0;
  bool converged = false;
  std::vector<SweepRecord> trace;

  double total_rate() const;
};

/// Sequential best-response sweeps in ascending service order, stopping when
/// the rate vector moves less than cfg.epsilon between sweeps. Non-convergence
/// is reported through the flag, never thrown.
EquilibriumResult find_equilibrium(const GameConfig& cfg, const std::vector<double>& p_init,
                                   std::size_t max_iter = 200);

std::vector<double> random_profile(const GameConfig& cfg, std::uint64_t seed);

struct NashCheck {
  bool verified = false;
  double worst_gain = 0.0;
  std::size_t worst_service = 0;
};

/// Grid search over unilateral deviations on [0, cap] including endpoints.
NashCheck verify_nash(const std::vector<double>& profile, const GameConfig& cfg,
                      std::size_t grid_points, double tol);

struct TunePoint {
  double lambda = 0.0;
  double total_rate = 0.0;
};

struct TuneResult {
  double lambda = 0.0;
  EquilibriumResult equilibrium;
  bool cap_binding = false;   // false when lambda_floor already satisfies the cap
  bool satisfiable = true;
  double slack = 0.0;         // r_hat - equilibrium total rate
  std::vector<TunePoint> lattice;  // evaluated points, ascending lambda
};

inline constexpr double kLambdaFloor = 1e-6;
inline constexpr double kLambdaCeiling = 1152921504606846976.0;  // 2^60

/// Smallest price on the bisection lattice whose equilibrium keeps the total
/// rate within the predicted cap r_hat. Equilibria are recomputed from the
/// deterministic cap/2 start at every probe. 60 bisection steps in log space.
/// The returned price always satisfies the cap; the lattice is additionally
/// monotone (total rate non-increasing in the price) when noise dominates
/// interference, which is the regime the tuning is meant for.
TuneResult tune_lambda(const GameConfig& cfg, double r_hat, std::size_t max_iter = 200);

}  // namespace harshnet::game
