#include "harshnet/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace harshnet::svgplot {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

constexpr int kMarginLeft = 64;
constexpr int kMarginRight = 16;
constexpr int kMarginTop = 36;
constexpr int kMarginBottom = 48;

std::string num(double v) {
  // Two decimals is plenty for pixel coordinates and keeps files small.
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

Range span(const std::vector<Series>& series, bool use_x) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series)
    for (double v : use_x ? s.x : s.y) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!(lo <= hi)) return {0.0, 1.0};
  if (lo == hi) return {lo - 0.5, hi + 0.5};
  double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

}  // namespace

void write_line_chart(const std::string& path, const ChartSpec& spec) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);

  const double plot_w = spec.width - kMarginLeft - kMarginRight;
  const double plot_h = spec.height - kMarginTop - kMarginBottom;
  Range rx = span(spec.series, true);
  Range ry = span(spec.series, false);
  auto sx = [&](double v) { return kMarginLeft + (v - rx.lo) / (rx.hi - rx.lo) * plot_w; };
  auto sy = [&](double v) {
    return kMarginTop + plot_h - (v - ry.lo) / (ry.hi - ry.lo) * plot_h;
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width
      << "\" height=\"" << spec.height << "\" viewBox=\"0 0 " << spec.width << ' '
      << spec.height << "\">\n";
  out << "<rect width=\"" << spec.width << "\" height=\"" << spec.height
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << spec.width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << spec.title << "</text>\n";

  // Axes and gridlines with five ticks per axis.
  for (int i = 0; i <= 4; ++i) {
    double fx = rx.lo + (rx.hi - rx.lo) * i / 4.0;
    double fy = ry.lo + (ry.hi - ry.lo) * i / 4.0;
    double px = sx(fx);
    double py = sy(fy);
    out << "<line x1=\"" << num(px) << "\" y1=\"" << kMarginTop << "\" x2=\"" << num(px)
        << "\" y2=\"" << num(kMarginTop + plot_h) << "\" stroke=\"#dddddd\"/>\n";
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << num(py) << "\" x2=\""
        << num(kMarginLeft + plot_w) << "\" y2=\"" << num(py) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << num(px) << "\" y=\"" << num(kMarginTop + plot_h + 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
        << tick_label(fx) << "</text>\n";
    out << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << num(py + 3)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
        << tick_label(fy) << "</text>\n";
  }
  out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
      << num(plot_w) << "\" height=\"" << num(plot_h)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << num(kMarginLeft + plot_w / 2) << "\" y=\""
      << spec.height - 12 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"12\">" << spec.x_label << "</text>\n";
  out << "<text x=\"14\" y=\"" << num(kMarginTop + plot_h / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 14 " << num(kMarginTop + plot_h / 2) << ")\">"
      << spec.y_label << "</text>\n";

  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    const auto& s = spec.series[si];
    if (s.x.size() != s.y.size()) throw std::invalid_argument("series x/y length mismatch");
    std::string color =
        s.color.empty() ? kPalette[si % (sizeof(kPalette) / sizeof(*kPalette))] : s.color;
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) out << ' ';
      out << num(sx(s.x[i])) << ',' << num(sy(s.y[i]));
    }
    out << "\"/>\n";
    double ly = kMarginTop + 14.0 * (static_cast<double>(si) + 1.0);
    out << "<line x1=\"" << num(kMarginLeft + plot_w - 130) << "\" y1=\"" << num(ly - 4)
        << "\" x2=\"" << num(kMarginLeft + plot_w - 110) << "\" y2=\"" << num(ly - 4)
        << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    out << "<text x=\"" << num(kMarginLeft + plot_w - 105) << "\" y=\"" << num(ly)
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace harshnet::svgplot
