#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "harshnet/game.hpp"

using namespace harshnet::game;

namespace {

GameConfig single(double g, double sigma2, double bandwidth, double w, double lambda,
                  double cap = 10.0) {
  GameConfig cfg;
  cfg.num_services = 1;
  cfg.gains = {g};
  cfg.noise_power = sigma2;
  cfg.bandwidth = bandwidth;
  cfg.weights = {w};
  cfg.lambda = lambda;
  cfg.power_cap = cap;
  return cfg;
}

GameConfig random_config(std::uint64_t seed, std::size_t L, double dominance) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cross(0.02, 0.2);
  std::uniform_real_distribution<double> wv(0.05, 1.0);
  std::uniform_real_distribution<double> lv(0.01, 1.0);
  GameConfig cfg;
  cfg.num_services = L;
  cfg.bandwidth = 5.0;
  cfg.noise_power = 0.02;
  cfg.power_cap = 1.0;
  cfg.lambda = lv(rng);
  cfg.gains.assign(L * L, 0.0);
  for (std::size_t l = 0; l < L; ++l) {
    double row = 0.0;
    for (std::size_t k = 0; k < L; ++k) {
      if (k == l) continue;
      cfg.gains[l * L + k] = cross(rng);
      row += cfg.gains[l * L + k];
    }
    if (L == 1) row = 0.1;
    cfg.gains[l * L + l] = dominance * row;
    cfg.weights.push_back(wv(rng));
  }
  return cfg;
}

}  // namespace

TEST_CASE("config validation catches each broken field") {
  auto good = random_config(1, 3, 2.0);
  CHECK_NOTHROW(good.validate());

  auto bad = good;
  bad.gains[0] = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = good;
  bad.gains[1] = -0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = good;
  bad.weights[2] = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = good;
  bad.gains.pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = good;
  bad.lambda = 0.0;
  bad.power_cap = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = good;
  bad.noise_power = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("sinr matches hand-evaluated instances") {
  auto cfg1 = single(2.0, 1.0, 1.0, 1.0, 0.1);
  CHECK(sinr({3.0}, cfg1)[0] == doctest::Approx(6.0));
  CHECK(sinr({0.0}, cfg1)[0] == 0.0);

  GameConfig cfg2;
  cfg2.num_services = 2;
  cfg2.gains = {1.0, 0.5, 0.5, 1.0};
  cfg2.noise_power = 0.1;
  cfg2.weights = {1.0, 1.0};
  cfg2.lambda = 0.1;
  cfg2.power_cap = 5.0;
  auto s = sinr({1.0, 1.0}, cfg2);
  CHECK(s[0] == doctest::Approx(1.0 / 0.6));
  CHECK(s[1] == doctest::Approx(1.0 / 0.6));
}

TEST_CASE("rate is log2-based") {
  GameConfig cfg;
  cfg.bandwidth = 1.0;
  CHECK(rate_from_sinr({0.0}, cfg)[0] == 0.0);
  CHECK(rate_from_sinr({1.0}, cfg)[0] == doctest::Approx(1.0));
  cfg.bandwidth = 10.0;
  CHECK(rate_from_sinr({3.0}, cfg)[0] == doctest::Approx(20.0));
}

TEST_CASE("utility matches its hand-evaluated instance") {
  auto cfg = single(1.0, 1.0, 1.0, 1.0, 0.1, 10.0);
  CHECK(utility(0, {1.0}, cfg) == doctest::Approx(0.9));
  CHECK(utility(0, {0.0}, cfg) == 0.0);
}

TEST_CASE("utility with no pricing increases in own power") {
  auto cfg = random_config(3, 3, 2.0);
  cfg.lambda = 0.0;
  std::vector<double> p{0.3, 0.5, 0.2};
  double before = utility(1, p, cfg);
  p[1] = 0.8;
  CHECK(utility(1, p, cfg) > before);
}

TEST_CASE("best response clamps at both ends") {
  auto cfg = random_config(4, 2, 2.0);
  cfg.lambda = 1e-12;
  CHECK(best_response(0, {0.1, 0.1}, cfg) == cfg.power_cap);

  cfg.lambda = 1e9;  // pricing dwarfs any rate gain
  CHECK(best_response(0, {0.1, 0.1}, cfg) == 0.0);

  cfg.lambda = 0.0;
  CHECK(best_response(0, {0.1, 0.1}, cfg) == cfg.power_cap);
  cfg.power_cap = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(best_response(0, {0.1, 0.1}, cfg), std::invalid_argument);
}

TEST_CASE("closed-form best response matches a fine grid search") {
  const std::size_t grid = 100000;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto cfg = random_config(100 + seed, 1 + seed % 5, 2.0);
    auto p = random_profile(cfg, seed);
    std::size_t l = seed % cfg.num_services;
    double closed = best_response(l, p, cfg);

    double best_u = -std::numeric_limits<double>::infinity();
    double best_p = 0.0;
    auto probe = p;
    for (std::size_t j = 0; j <= grid; ++j) {
      probe[l] = cfg.power_cap * static_cast<double>(j) / static_cast<double>(grid);
      double u = utility(l, probe, cfg);
      if (u > best_u) {
        best_u = u;
        best_p = probe[l];
      }
    }
    CHECK(std::abs(closed - best_p) <= cfg.power_cap / static_cast<double>(grid));
  }
}

TEST_CASE("best response is invariant to jointly scaling weight and price") {
  auto cfg = random_config(7, 3, 2.0);
  std::vector<double> p{0.4, 0.2, 0.6};
  double base = best_response(1, p, cfg);
  auto scaled = cfg;
  scaled.weights[1] *= 4.0;  // powers of two keep the arithmetic exact
  scaled.lambda *= 4.0;
  CHECK(best_response(1, p, scaled) == base);
}

TEST_CASE("single-player game lands on the closed form after one sweep") {
  auto cfg = single(0.5, 0.1, 2.0, 0.8, 1.0, 4.0);
  double expected = 0.8 * 2.0 / std::log(2.0) - 0.1 / 0.5;  // interior of [0, 4]
  REQUIRE(expected > 0.0);
  REQUIRE(expected < 4.0);
  auto res = find_equilibrium(cfg, {1.0}, 10);
  CHECK(res.converged);
  CHECK(res.sweeps <= 2);
  CHECK(res.powers[0] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(res.trace[0].powers[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("dominant-diagonal games converge quickly to a unique point") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto cfg = random_config(200 + seed, 6, 10.0);
    auto a = find_equilibrium(cfg, random_profile(cfg, seed), 50);
    auto b = find_equilibrium(cfg, random_profile(cfg, seed + 1000), 50);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(a.sweeps <= 50);
    for (std::size_t l = 0; l < 6; ++l)
      CHECK(a.powers[l] == doctest::Approx(b.powers[l]).epsilon(1e-6));
  }
}

TEST_CASE("running out of sweeps reports rather than throws") {
  GameConfig cfg;
  cfg.num_services = 2;
  cfg.gains = {1.0, 0.9, 0.9, 1.0};
  cfg.noise_power = 0.01;
  cfg.weights = {1.0, 1.0};
  cfg.lambda = 0.05;
  cfg.power_cap = 2.0;
  cfg.bandwidth = 5.0;
  auto res = find_equilibrium(cfg, {0.0, 0.0}, 1);
  CHECK_FALSE(res.converged);
  CHECK(res.sweeps == 1);
  CHECK(res.trace.size() == 1);
  CHECK(res.trace[0].rate_delta >= cfg.epsilon);
}

TEST_CASE("equilibria survive grid-based nash verification") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto cfg = random_config(300 + seed, 4, 5.0);
    auto res = find_equilibrium(cfg, random_profile(cfg, seed), 100);
    REQUIRE(res.converged);
    auto check = verify_nash(res.powers, cfg, 10000, 1e-5);
    CHECK(check.verified);
  }
}

TEST_CASE("verification flags a deliberately moved player") {
  // Interior equilibrium with enough curvature that a 3 W detour is visible.
  GameConfig cfg;
  cfg.num_services = 2;
  cfg.gains = {1.0, 0.2, 0.2, 1.0};
  cfg.noise_power = 0.5;
  cfg.weights = {1.0, 1.0};
  cfg.lambda = 0.1;
  cfg.bandwidth = 1.0;
  cfg.power_cap = 20.0;
  auto res = find_equilibrium(cfg, {1.0, 1.0}, 200);
  REQUIRE(res.converged);
  CHECK(verify_nash(res.powers, cfg, 20000, 1e-5).verified);

  auto perturbed = res.powers;
  perturbed[1] += 3.0;
  REQUIRE(perturbed[1] < cfg.power_cap);
  auto bad = verify_nash(perturbed, cfg, 20000, 1e-5);
  CHECK_FALSE(bad.verified);
  CHECK(bad.worst_service == 1);
  CHECK(bad.worst_gain > 1e-3);
}

TEST_CASE("single player at the optimum verifies at any reasonable tolerance") {
  auto cfg = single(0.5, 0.1, 2.0, 0.8, 1.0, 4.0);
  auto res = find_equilibrium(cfg, {0.0}, 10);
  auto check = verify_nash(res.powers, cfg, 10000, 1e-6);
  CHECK(check.verified);
}

TEST_CASE("price tuning leaves a generous cap alone") {
  auto cfg = random_config(11, 4, 2.0);
  auto tuned = tune_lambda(cfg, 1e9, 200);
  CHECK(tuned.lambda == kLambdaFloor);
  CHECK_FALSE(tuned.cap_binding);
  CHECK(tuned.satisfiable);
  CHECK(tuned.slack > 0.0);
}

TEST_CASE("price tuning meets a binding cap within one percent slack") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto cfg = random_config(400 + seed, 6, 2.0);
    auto open = tune_lambda(cfg, 1e9, 200);
    double open_rate = open.equilibrium.total_rate();
    double r_hat = 0.4 * open_rate;

    auto tuned = tune_lambda(cfg, r_hat, 200);
    REQUIRE(tuned.cap_binding);
    REQUIRE(tuned.satisfiable);
    double total = tuned.equilibrium.total_rate();
    CHECK(total <= r_hat);
    CHECK((r_hat - total) / r_hat <= 0.01);
    CHECK(tuned.lambda > kLambdaFloor);

    auto tighter = tune_lambda(cfg, r_hat / 2.0, 200);
    CHECK(tighter.lambda > tuned.lambda);
  }
}

TEST_CASE("equilibrium total rate is non-increasing along the price lattice") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto cfg = random_config(500 + seed, 6, 2.0);
    // Monotonicity holds when noise dominates interference. In the
    // interference-choked corner (everyone at cap, tiny noise) a higher price
    // can raise the total by backing weak services off.
    cfg.noise_power = 0.3;
    auto open = tune_lambda(cfg, 1e9, 200);
    auto tuned = tune_lambda(cfg, 0.3 * open.equilibrium.total_rate(), 200);
    REQUIRE(tuned.lattice.size() > 10);
    for (std::size_t i = 0; i + 1 < tuned.lattice.size(); ++i) {
      CHECK(tuned.lattice[i].lambda < tuned.lattice[i + 1].lambda);
      // Allowance for the finite convergence tolerance of each solve.
      CHECK(tuned.lattice[i + 1].total_rate <= tuned.lattice[i].total_rate + 1e-5);
    }
  }
}

TEST_CASE("a vanishing cap drives powers toward zero") {
  auto cfg = random_config(13, 4, 2.0);
  auto tuned = tune_lambda(cfg, 1e-6, 200);
  REQUIRE(tuned.satisfiable);
  CHECK(tuned.equilibrium.total_rate() <= 1e-6);
  for (double p : tuned.equilibrium.powers) CHECK(p < 1e-3);
}

TEST_CASE("random profiles are deterministic and in range") {
  auto cfg = random_config(17, 5, 2.0);
  auto a = random_profile(cfg, 9);
  auto b = random_profile(cfg, 9);
  CHECK(a == b);
  for (double p : a) {
    CHECK(p >= 0.0);
    CHECK(p <= cfg.power_cap);
  }
}
