#include "dshrink/svg.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace dshrink::svg {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 460;
constexpr double kLeft = 70;
constexpr double kRight = 170;
constexpr double kTop = 40;
constexpr double kBottom = 60;

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  if (std::abs(v) < 0.005) v = 0.0;
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, r.ptr);
}

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

struct Frame {
  Range xr, yr;
  double px(double x) const { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - yr.lo) / (yr.hi - yr.lo) * (kHeight - kTop - kBottom); }
};

void open_document(std::ostringstream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
     << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight)
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(title) << "</text>\n";
}

void y_axis(std::ostringstream& os, const Frame& f, const std::string& label) {
  const double x0 = kLeft;
  os << "<line x1=\"" << num(x0) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x0)
     << "\" y2=\"" << num(kHeight - kBottom) << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double v = f.yr.lo + (f.yr.hi - f.yr.lo) * t / 5.0;
    const double y = f.py(v);
    os << "<line x1=\"" << num(x0 - 4) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x0)
       << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(x0 - 7) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
       << num(v) << "</text>\n";
  }
  os << "<text transform=\"translate(16," << num((kTop + kHeight - kBottom) / 2)
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(label) << "</text>\n";
}

void legend(std::ostringstream& os, const std::vector<std::string>& names) {
  for (std::size_t k = 0; k < names.size(); ++k) {
    const double y = kTop + 10 + 18.0 * static_cast<double>(k);
    const double x = kWidth - kRight + 15;
    os << "<rect x=\"" << num(x) << "\" y=\"" << num(y - 9) << "\" width=\"12\" height=\"12\" fill=\""
       << kPalette[k % kPalette.size()] << "\"/>\n";
    os << "<text x=\"" << num(x + 18) << "\" y=\"" << num(y + 2) << "\">" << escape(names[k])
       << "</text>\n";
  }
}

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::string render(const LineChart& chart) {
  Frame f;
  for (const auto& s : chart.series) {
    for (const double x : s.x) f.xr.add(x);
    for (const double y : s.y) f.yr.add(y);
  }
  if (chart.reference_y) f.yr.add(*chart.reference_y);
  if (chart.marker_x) f.xr.add(*chart.marker_x);
  f.xr.finish();
  f.yr.finish();

  std::ostringstream os;
  open_document(os, chart.title);
  y_axis(os, f, chart.y_label);
  const double base = kHeight - kBottom;
  os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(base) << "\" x2=\""
     << num(kWidth - kRight) << "\" y2=\"" << num(base) << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double v = f.xr.lo + (f.xr.hi - f.xr.lo) * t / 5.0;
    os << "<text x=\"" << num(f.px(v)) << "\" y=\"" << num(base + 18)
       << "\" text-anchor=\"middle\">" << num(v) << "</text>\n";
  }
  os << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << num(kHeight - 15)
     << "\" text-anchor=\"middle\">" << escape(chart.x_label) << "</text>\n";

  if (chart.reference_y) {
    os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(f.py(*chart.reference_y)) << "\" x2=\""
       << num(kWidth - kRight) << "\" y2=\"" << num(f.py(*chart.reference_y))
       << "\" stroke=\"gray\" stroke-dasharray=\"5,4\"/>\n";
  }
  if (chart.marker_x) {
    os << "<line x1=\"" << num(f.px(*chart.marker_x)) << "\" y1=\"" << num(kTop) << "\" x2=\""
       << num(f.px(*chart.marker_x)) << "\" y2=\"" << num(base)
       << "\" stroke=\"gray\" stroke-dasharray=\"5,4\"/>\n";
  }
  std::vector<std::string> names;
  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const auto& s = chart.series[k];
    names.push_back(s.name);
    os << "<polyline fill=\"none\" stroke-width=\"1.6\" stroke=\"" << kPalette[k % kPalette.size()]
       << "\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (i) os << ' ';
      os << num(f.px(s.x[i])) << ',' << num(f.py(s.y[i]));
    }
    os << "\"/>\n";
  }
  legend(os, names);
  os << "</svg>\n";
  return os.str();
}

std::string render(const BoxPlot& plot) {
  Frame f;
  for (const auto& g : plot.groups) {
    for (const auto& b : g.boxes) {
      for (const double v : b) f.yr.add(v);
    }
  }
  f.yr.finish();
  f.xr.lo = 0.0;
  f.xr.hi = static_cast<double>(std::max<std::size_t>(plot.groups.size(), 1));

  std::ostringstream os;
  open_document(os, plot.title);
  y_axis(os, f, plot.y_label);
  const double base = kHeight - kBottom;
  os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(f.py(0.0)) << "\" x2=\""
     << num(kWidth - kRight) << "\" y2=\"" << num(f.py(0.0))
     << "\" stroke=\"gray\" stroke-dasharray=\"2,3\"/>\n";

  const double slot = f.px(1.0) - f.px(0.0);
  for (std::size_t gi = 0; gi < plot.groups.size(); ++gi) {
    const auto& g = plot.groups[gi];
    const double left = f.px(static_cast<double>(gi));
    os << "<text x=\"" << num(left + slot / 2) << "\" y=\"" << num(base + 18)
       << "\" text-anchor=\"middle\">" << escape(g.name) << "</text>\n";
    const double width = slot * 0.8 / static_cast<double>(std::max<std::size_t>(g.boxes.size(), 1));
    for (std::size_t b = 0; b < g.boxes.size(); ++b) {
      std::vector<double> v = g.boxes[b];
      if (v.empty()) continue;
      std::sort(v.begin(), v.end());
      const double q1 = quantile(v, 0.25);
      const double med = quantile(v, 0.5);
      const double q3 = quantile(v, 0.75);
      const double fence = 1.5 * (q3 - q1);
      double lo = q1, hi = q3;
      for (const double x : v) {
        if (x >= q1 - fence) lo = std::min(lo, x);
        if (x <= q3 + fence) hi = std::max(hi, x);
      }
      const char* color = kPalette[b % kPalette.size()];
      const double x0 = left + slot * 0.1 + width * static_cast<double>(b);
      const double xc = x0 + width / 2;
      os << "<line x1=\"" << num(xc) << "\" y1=\"" << num(f.py(lo)) << "\" x2=\"" << num(xc)
         << "\" y2=\"" << num(f.py(hi)) << "\" stroke=\"" << color << "\"/>\n";
      os << "<rect x=\"" << num(x0 + width * 0.1) << "\" y=\"" << num(f.py(q3)) << "\" width=\""
         << num(width * 0.8) << "\" height=\"" << num(std::max(0.0, f.py(q1) - f.py(q3)))
         << "\" fill=\"white\" stroke=\"" << color << "\"/>\n";
      os << "<line x1=\"" << num(x0 + width * 0.1) << "\" y1=\"" << num(f.py(med)) << "\" x2=\""
         << num(x0 + width * 0.9) << "\" y2=\"" << num(f.py(med)) << "\" stroke=\"" << color
         << "\" stroke-width=\"2\"/>\n";
      for (const double x : v) {
        if (x < lo || x > hi) {
          os << "<circle cx=\"" << num(xc) << "\" cy=\"" << num(f.py(x))
             << "\" r=\"1.5\" fill=\"none\" stroke=\"" << color << "\"/>\n";
        }
      }
    }
  }
  legend(os, plot.legend);
  os << "</svg>\n";
  return os.str();
}

}  // namespace dshrink::svg
