#include "iorisk/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace iorisk {
namespace {

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// White to dark red.
std::string ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(255 - 100 * t));
  const int g = static_cast<int>(std::lround(255 - 235 * t));
  const int b = static_cast<int>(std::lround(255 - 235 * t));
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

constexpr std::array<const char*, 8> kPalette = {
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
    "#59a14f", "#edc948", "#b07aa1", "#ff9da7"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_heatmap_svg(const Heatmap& h, ColorScale scale) {
  constexpr int kCell = 48, kLeft = 90, kTop = 40, kBottom = 90;
  const int width = kLeft + kCell * h.cols() + 140;
  const int height = kTop + kCell * h.rows + kBottom;

  double max_h = 0.0;
  for (int r = 0; r < h.rows; ++r)
    for (int c = 0; c < h.cols(); ++c) max_h = std::max(max_h, h.core_h(r, c));
  auto norm = [&](double v, ColorScale s) {
    if (max_h <= 0.0 || v <= 0.0) return 0.0;
    if (s == ColorScale::Linear) return v / max_h;
    return std::log1p(v) / std::log1p(max_h);
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
    << "\" height=\"" << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<metadata>measure=" << measure_name(h.measure)
    << ";weight=core_h;max_core_h=" << csv::format_double(max_h)
    << ";scales=linear:v/max,log:log1p(v)/log1p(max);active="
    << (scale == ColorScale::Log ? "log" : "linear") << "</metadata>\n";
  o << "<text x=\"" << kLeft << "\" y=\"20\">core-h by job size and "
    << measure_name(h.measure) << "</text>\n";
  for (int r = 0; r < h.rows; ++r) {
    // Largest jobs at the top.
    const int y = kTop + kCell * (h.rows - 1 - r);
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + kCell / 2 + 4
      << "\" text-anchor=\"end\">" << escape(h.row_label(r)) << "</text>\n";
    for (int c = 0; c < h.cols(); ++c) {
      const double v = h.core_h(r, c);
      o << "<rect x=\"" << kLeft + kCell * c << "\" y=\"" << y << "\" width=\""
        << kCell << "\" height=\"" << kCell << "\" fill=\"" << ramp(norm(v, scale))
        << "\" stroke=\"#999\" data-core-h=\"" << csv::format_double(v)
        << "\" data-linear=\"" << fmt(norm(v, ColorScale::Linear))
        << "\" data-log=\"" << fmt(norm(v, ColorScale::Log)) << "\"/>\n";
    }
  }
  const int axis_y = kTop + kCell * h.rows;
  for (int c = 0; c < h.cols(); ++c) {
    const int x = kLeft + kCell * c + kCell / 2;
    o << "<text x=\"" << x << "\" y=\"" << axis_y + 14
      << "\" text-anchor=\"end\" transform=\"rotate(-45 " << x << ' ' << axis_y + 14
      << ")\">" << escape(h.col_label(c)) << "</text>\n";
  }
  o << "<text x=\"10\" y=\"" << kTop - 8 << "\">nodes</text>\n";
  const int lx = kLeft + kCell * h.cols() + 20;
  for (int i = 0; i <= 4; ++i) {
    const double t = i / 4.0;
    o << "<rect x=\"" << lx << "\" y=\"" << kTop + 20 * (4 - i)
      << "\" width=\"16\" height=\"20\" fill=\"" << ramp(t) << "\"/>\n";
  }
  o << "<text x=\"" << lx + 22 << "\" y=\"" << kTop + 12 << "\">"
    << fmt(max_h) << " core-h</text>\n";
  o << "<text x=\"" << lx + 22 << "\" y=\"" << kTop + 96 << "\">0</text>\n";
  o << "</svg>\n";
  return o.str();
}

std::string render_daily_svg(const DailySeries& s) {
  constexpr int kWidth = 800, kHeight = 300, kLeft = 50, kTop = 30, kPlotH = 220;
  const int plot_w = kWidth - kLeft - 150;
  const std::size_t n = s.bins.size();

  double max_v = 0.0;
  for (double v : s.total_oss) max_v = std::max(max_v, v);
  if (max_v <= 0.0) max_v = 1.0;

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
    << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<text x=\"" << kLeft << "\" y=\"18\">OSS risk on " << escape(s.fs_id) << ", "
    << day_label(s.day_start) << "</text>\n";
  o << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + kPlotH << "\" x2=\""
    << kLeft + plot_w << "\" y2=\"" << kTop + kPlotH << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
    << "\" y2=\"" << kTop + kPlotH << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << kLeft - 4 << "\" y=\"" << kTop + 4 << "\" text-anchor=\"end\">"
    << fmt(max_v) << "</text>\n";

  if (n > 0) {
    auto x_at = [&](std::size_t i) {
      return kLeft + (n == 1 ? 0.0 : plot_w * static_cast<double>(i) / (n - 1));
    };
    auto y_at = [&](double v) { return kTop + kPlotH * (1.0 - v / max_v); };
    std::vector<double> base(n, 0.0);
    auto layer = [&](const std::vector<double>& values, const char* color,
                     const std::string& label, std::size_t slot) {
      std::ostringstream pts;
      for (std::size_t i = 0; i < n; ++i)
        pts << fmt(x_at(i)) << ',' << fmt(y_at(base[i] + values[i])) << ' ';
      for (std::size_t i = n; i-- > 0;)
        pts << fmt(x_at(i)) << ',' << fmt(y_at(base[i])) << ' ';
      o << "<polygon points=\"" << pts.str() << "\" fill=\"" << color
        << "\" fill-opacity=\"0.8\"/>\n";
      for (std::size_t i = 0; i < n; ++i) base[i] += values[i];
      const int ly = kTop + 14 * static_cast<int>(slot);
      o << "<rect x=\"" << kLeft + plot_w + 10 << "\" y=\"" << ly
        << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
      o << "<text x=\"" << kLeft + plot_w + 24 << "\" y=\"" << ly + 9 << "\">"
        << escape(label) << "</text>\n";
    };
    for (std::size_t j = 0; j < s.top_jobs.size(); ++j)
      layer(s.job_oss[j], kPalette[j % kPalette.size()], s.top_jobs[j], j);
    layer(s.other_oss, "#bab0ac", "other", s.top_jobs.size());
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace iorisk
