#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

namespace harshnet {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Per-service attention weights over resource types. Rows must be
/// nonnegative and sum to one (see validate_attention).
struct AttentionMatrix {
  Matrix w;  // L x D
};

/// Quantities allocated to each service per resource type. Column units are
/// descriptive metadata only; no unit algebra is performed.
struct AllocationMatrix {
  Matrix a;  // L x D
  std::vector<std::string> column_units;
};

/// Available quantity of each resource type.
struct ResourceVector {
  std::vector<double> r;
  std::vector<std::string> units;
};

/// Mapping from allocated quantity to service quality. Three families:
/// identity f(a)=a, logarithmic rate f(a)=scale*log2(1+a), and a step
/// function f(a) = a >= threshold ? high : low.
class UtilityShape {
 public:
  enum class Kind { identity, log_rate, step };

  static UtilityShape identity();
  static UtilityShape log_rate(double scale);
  static UtilityShape step(double threshold, double low, double high);

  double operator()(double a) const;
  Kind kind() const { return kind_; }

 private:
  UtilityShape(Kind k, double p0, double p1, double p2)
      : kind_(k), p0_(p0), p1_(p1), p2_(p2) {}
  Kind kind_;
  double p0_, p1_, p2_;
};

// Absolute tolerances for the attention row-sum and the resource budgets.
inline constexpr double kRowSumTolerance = 1e-9;
inline constexpr double kBudgetTolerance = 1e-9;

struct AttentionCheck {
  bool ok = true;
  std::size_t row = 0;
  std::optional<std::size_t> col;  // set when a single entry is at fault
  double entry = 0.0;
  double row_sum = 0.0;
  std::string message;
};

struct FeasibilityCheck {
  bool ok = true;
  std::size_t column = 0;
  double excess = 0.0;
  std::string message;
};

/// Accepts iff all entries are nonnegative and every row sums to one within
/// kRowSumTolerance. Reports the first violation in row-major scan order.
AttentionCheck validate_attention(const AttentionMatrix& attention);

/// Sum over services and resources of w_{l,d} * f(a_{l,d}).
/// Throws std::invalid_argument on dimension mismatch.
double total_utility(const AllocationMatrix& alloc, const AttentionMatrix& attention,
                     const UtilityShape& shape);

/// Accepts iff every column of the allocation fits its resource budget
/// within kBudgetTolerance. Reports the first violating column and excess.
FeasibilityCheck check_feasibility(const AllocationMatrix& alloc, const ResourceVector& budget);

}  // namespace harshnet
