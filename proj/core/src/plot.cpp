#include "rislab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "rislab/numerics.hpp"

namespace rislab {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

void write_svg(std::ostream& out, const std::vector<PlotSeries>& series, const PlotOptions& opts) {
  if (series.empty()) throw DomainError("write_svg: no series");
  const std::size_t len = series.front().mean.size();
  if (len == 0) throw DomainError("write_svg: empty series");
  for (const auto& s : series) {
    if (s.mean.size() != len) throw ShapeError("write_svg: series differ in length");
    if (!s.half_width.empty() && s.half_width.size() != len) {
      throw ShapeError("write_svg: band length differs from its series");
    }
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < len; ++i) {
      const double h = s.half_width.empty() ? 0.0 : s.half_width[i];
      if (!std::isfinite(s.mean[i]) || !std::isfinite(h)) throw DomainError("write_svg: non-finite values");
      lo = std::min(lo, s.mean[i] - h);
      hi = std::max(hi, s.mean[i] + h);
    }
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("write_svg: non-finite values");
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }

  const double left = 70, right = 20, top = 40, bottom = 50;
  const double pw = opts.width - left - right;
  const double ph = opts.height - top - bottom;
  const double xmax = len > 1 ? static_cast<double>(len - 1) : 1.0;
  auto px = [&](double i) { return left + pw * i / xmax; };
  auto py = [&](double v) { return top + ph * (hi - v) / (hi - lo); };

  const std::size_t stride = std::max<std::size_t>(1, (len + opts.max_points - 1) / std::max<std::size_t>(1, opts.max_points));
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < len; i += stride) idx.push_back(i);
  if (idx.back() != len - 1) idx.push_back(len - 1);

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\""
      << opts.height << "\" viewBox=\"0 0 " << opts.width << ' ' << opts.height << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << opts.width << "\" height=\"" << opts.height
      << "\" fill=\"white\"/>\n";
  if (!opts.title.empty()) {
    out << "<text x=\"" << num(opts.width / 2.0) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << escape(opts.title) << "</text>\n";
  }
  out << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    const double x = static_cast<double>(len - 1) * i / 4.0;
    out << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(v) + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << tick(v) << "</text>\n"
        << "<text x=\"" << num(px(x)) << "\" y=\"" << num(top + ph + 16)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << tick(std::round(x)) << "</text>\n";
  }
  out << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(opts.height - 10.0)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(opts.x_label) << "</text>\n"
      << "<text x=\"16\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" font-size=\"13\" "
      << "transform=\"rotate(-90 16 " << num(top + ph / 2) << ")\">" << escape(opts.y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const char* color = kPalette[s % std::size(kPalette)];
    if (!ser.half_width.empty()) {
      out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
      for (std::size_t i : idx) out << num(px(i)) << ',' << num(py(ser.mean[i] + ser.half_width[i])) << ' ';
      for (auto it = idx.rbegin(); it != idx.rend(); ++it) {
        out << num(px(*it)) << ',' << num(py(ser.mean[*it] - ser.half_width[*it])) << ' ';
      }
      out << "\"/>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i : idx) out << num(px(i)) << ',' << num(py(ser.mean[i])) << ' ';
    out << "\"/>\n";
    const double ly = top + 16 + 18.0 * s;
    out << "<line x1=\"" << num(left + pw - 150) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
        << num(left + pw - 130) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << num(left + pw - 124) << "\" y=\"" << num(ly) << "\" font-size=\"12\">"
        << escape(ser.label) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace rislab
