#include "harshnet/core.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace harshnet {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
  std::size_t r = 0;
  for (const auto& row : rows) {
    if (row.size() != m.cols()) throw std::invalid_argument("ragged initializer rows");
    std::size_t c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

UtilityShape UtilityShape::identity() { return UtilityShape(Kind::identity, 0, 0, 0); }

UtilityShape UtilityShape::log_rate(double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("log_rate scale must be positive");
  return UtilityShape(Kind::log_rate, scale, 0, 0);
}

UtilityShape UtilityShape::step(double threshold, double low, double high) {
  if (low > high) throw std::invalid_argument("step utility must be non-decreasing (low <= high)");
  return UtilityShape(Kind::step, threshold, low, high);
}

double UtilityShape::operator()(double a) const {
  switch (kind_) {
    case Kind::identity:
      return a;
    case Kind::log_rate:
      return p0_ * std::log2(1.0 + a);
    case Kind::step:
      return a >= p0_ ? p2_ : p1_;
  }
  return 0.0;
}

AttentionCheck validate_attention(const AttentionMatrix& attention) {
  const Matrix& w = attention.w;
  if (w.rows() < 1 || w.cols() < 1)
    throw std::invalid_argument("attention matrix must have at least one row and column");

  for (std::size_t r = 0; r < w.rows(); ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < w.cols(); ++c) {
      double v = w(r, c);
      if (v < 0.0) {
        AttentionCheck bad;
        bad.ok = false;
        bad.row = r;
        bad.col = c;
        bad.entry = v;
        bad.row_sum = 0.0;
        std::ostringstream os;
        os << "negative entry " << v << " at (" << r << ", " << c << ")";
        bad.message = os.str();
        return bad;
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      AttentionCheck bad;
      bad.ok = false;
      bad.row = r;
      bad.row_sum = sum;
      std::ostringstream os;
      os << "row " << r << " sums to " << sum << ", expected 1";
      bad.message = os.str();
      return bad;
    }
  }
  return AttentionCheck{};
}

double total_utility(const AllocationMatrix& alloc, const AttentionMatrix& attention,
                     const UtilityShape& shape) {
  const Matrix& a = alloc.a;
  const Matrix& w = attention.w;
  if (a.rows() != w.rows() || a.cols() != w.cols())
    throw std::invalid_argument("allocation and attention dimensions differ");

  double total = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) total += w(r, c) * shape(a(r, c));
  return total;
}

FeasibilityCheck check_feasibility(const AllocationMatrix& alloc, const ResourceVector& budget) {
  const Matrix& a = alloc.a;
  if (a.rows() > 0 && a.cols() != budget.r.size())
    throw std::invalid_argument("allocation columns and resource vector length differ");

  for (std::size_t d = 0; d < budget.r.size(); ++d) {
    double sum = 0.0;
    for (std::size_t l = 0; l < a.rows(); ++l) sum += a(l, d);
    if (sum > budget.r[d] + kBudgetTolerance) {
      FeasibilityCheck bad;
      bad.ok = false;
      bad.column = d;
      bad.excess = sum - budget.r[d];
      std::ostringstream os;
      os << "column " << d << " allocates " << sum << " against budget " << budget.r[d];
      bad.message = os.str();
      return bad;
    }
  }
  return FeasibilityCheck{};
}

}  // namespace harshnet
