#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "harshnet/core.hpp"

using namespace harshnet;

namespace {

AttentionMatrix toy_attention() {
  return AttentionMatrix{Matrix::from_rows({{0.3, 0.7}, {0.8, 0.2}, {0.4, 0.6}})};
}

AllocationMatrix toy_allocation() {
  return AllocationMatrix{Matrix::from_rows({{6, 25}, {10, 40}, {1, 100}}), {"Mbps", "Mb"}};
}

}  // namespace

TEST_CASE("validate_attention accepts the toy matrix") {
  CHECK(validate_attention(toy_attention()).ok);
}

TEST_CASE("validate_attention accepts a single-entry matrix") {
  CHECK(validate_attention(AttentionMatrix{Matrix::from_rows({{1.0}})}).ok);
}

TEST_CASE("validate_attention rejects a bad row sum and reports it") {
  auto res = validate_attention(AttentionMatrix{Matrix::from_rows({{0.5, 0.6}})});
  CHECK_FALSE(res.ok);
  CHECK(res.row == 0);
  CHECK_FALSE(res.col.has_value());
  CHECK(res.row_sum == doctest::Approx(1.1));
}

TEST_CASE("validate_attention reports the first negative entry") {
  auto res = validate_attention(
      AttentionMatrix{Matrix::from_rows({{0.5, 0.5}, {1.2, -0.2}})});
  CHECK_FALSE(res.ok);
  CHECK(res.row == 1);
  REQUIRE(res.col.has_value());
  CHECK(*res.col == 1);
  CHECK(res.entry == doctest::Approx(-0.2));
}

TEST_CASE("validate_attention rejects empty matrices") {
  CHECK_THROWS_AS(validate_attention(AttentionMatrix{Matrix{}}), std::invalid_argument);
}

TEST_CASE("total_utility is zero on an all-zero allocation") {
  AllocationMatrix zeros{Matrix(3, 2, 0.0), {}};
  CHECK(total_utility(zeros, toy_attention(), UtilityShape::identity()) == 0.0);
}

TEST_CASE("total_utility reproduces the hand-summed toy value") {
  // Independent oracle: explicit accumulation over the toy matrices.
  auto a = toy_allocation();
  auto w = toy_attention();
  double oracle = 0.0;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 2; ++c) oracle += w.w(r, c) * a.a(r, c);
  CHECK(oracle == doctest::Approx(95.7).epsilon(1e-12));
  CHECK(total_utility(a, w, UtilityShape::identity()) == doctest::Approx(95.7).epsilon(1e-12));
}

TEST_CASE("total_utility with one service and identity is the allocation itself") {
  AttentionMatrix w{Matrix::from_rows({{1.0}})};
  for (double x : {0.0, 0.5, 3.25, 100.0}) {
    AllocationMatrix a{Matrix::from_rows({{x}}), {}};
    CHECK(total_utility(a, w, UtilityShape::identity()) == doctest::Approx(x));
  }
}

TEST_CASE("total_utility rejects mismatched dimensions") {
  AllocationMatrix a{Matrix(2, 2, 1.0), {}};
  AttentionMatrix w{Matrix(3, 2, 0.5)};
  CHECK_THROWS_AS(total_utility(a, w, UtilityShape::identity()), std::invalid_argument);
}

TEST_CASE("check_feasibility accepts a boundary-tight column") {
  AllocationMatrix a{Matrix::from_rows({{6}, {10}, {1}}), {}};
  CHECK(check_feasibility(a, ResourceVector{{17.0}, {}}).ok);
}

TEST_CASE("check_feasibility reports the violating column and excess") {
  AllocationMatrix a{Matrix::from_rows({{6}, {10}, {1}}), {}};
  auto res = check_feasibility(a, ResourceVector{{16.0}, {}});
  CHECK_FALSE(res.ok);
  CHECK(res.column == 0);
  CHECK(res.excess == doctest::Approx(1.0));
}

TEST_CASE("check_feasibility accepts an empty allocation vacuously") {
  AllocationMatrix a{Matrix(0, 1, 0.0), {}};
  CHECK(check_feasibility(a, ResourceVector{{5.0}, {}}).ok);
}

TEST_CASE("check_feasibility rejects mismatched dimensions") {
  AllocationMatrix a{Matrix(2, 2, 1.0), {}};
  CHECK_THROWS_AS(check_feasibility(a, ResourceVector{{5.0}, {}}), std::invalid_argument);
}

TEST_CASE("utility shapes are non-decreasing and anchored at zero") {
  auto shapes = {UtilityShape::identity(), UtilityShape::log_rate(2.5),
                 UtilityShape::step(3.0, 0.2, 0.9)};
  for (const auto& f : shapes) {
    double prev = f(0.0);
    for (double a = 0.25; a <= 20.0; a += 0.25) {
      CHECK(f(a) >= prev);
      prev = f(a);
    }
  }
  CHECK(UtilityShape::identity()(0.0) == 0.0);
  CHECK(UtilityShape::log_rate(4.0)(0.0) == 0.0);
}

TEST_CASE("step shape rejects a decreasing configuration") {
  CHECK_THROWS_AS(UtilityShape::step(1.0, 0.9, 0.1), std::invalid_argument);
}

TEST_CASE("property: bumping any single entry never decreases total utility") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> val(0.0, 50.0);
  std::uniform_real_distribution<double> wv(0.01, 1.0);
  auto shapes = {UtilityShape::identity(), UtilityShape::log_rate(1.5),
                 UtilityShape::step(10.0, 0.0, 1.0)};
  for (int rep = 0; rep < 50; ++rep) {
    std::size_t L = 1 + rng() % 5, D = 1 + rng() % 4;
    Matrix a(L, D), w(L, D);
    for (std::size_t r = 0; r < L; ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < D; ++c) {
        a(r, c) = val(rng);
        w(r, c) = wv(rng);
        sum += w(r, c);
      }
      for (std::size_t c = 0; c < D; ++c) w(r, c) /= sum;
    }
    AllocationMatrix alloc{a, {}};
    AttentionMatrix att{w};
    for (const auto& f : shapes) {
      double base = total_utility(alloc, att, f);
      std::size_t r = rng() % L, c = rng() % D;
      AllocationMatrix bumped = alloc;
      bumped.a(r, c) += val(rng) + 0.1;
      CHECK(total_utility(bumped, att, f) >= base - 1e-12);
    }
  }
}

TEST_CASE("property: identity utility is additive in the allocation") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> val(0.0, 10.0);
  for (int rep = 0; rep < 30; ++rep) {
    std::size_t L = 1 + rng() % 4, D = 1 + rng() % 3;
    Matrix a1(L, D), a2(L, D), w(L, D);
    for (std::size_t r = 0; r < L; ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < D; ++c) {
        a1(r, c) = val(rng);
        a2(r, c) = val(rng);
        w(r, c) = val(rng) + 0.01;
        sum += w(r, c);
      }
      for (std::size_t c = 0; c < D; ++c) w(r, c) /= sum;
    }
    Matrix asum(L, D);
    for (std::size_t i = 0; i < asum.data().size(); ++i)
      asum.data()[i] = a1.data()[i] + a2.data()[i];
    AttentionMatrix att{w};
    auto u = [&](const Matrix& m) {
      return total_utility(AllocationMatrix{m, {}}, att, UtilityShape::identity());
    };
    CHECK(u(asum) == doctest::Approx(u(a1) + u(a2)).epsilon(1e-12));
  }
}

TEST_CASE("property: normalizing positive rows always yields a valid attention matrix") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> val(1e-6, 100.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::size_t L = 1 + rng() % 6, D = 1 + rng() % 5;
    Matrix w(L, D);
    for (std::size_t r = 0; r < L; ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < D; ++c) {
        w(r, c) = val(rng);
        sum += w(r, c);
      }
      for (std::size_t c = 0; c < D; ++c) w(r, c) /= sum;
    }
    CHECK(validate_attention(AttentionMatrix{w}).ok);
  }
}
