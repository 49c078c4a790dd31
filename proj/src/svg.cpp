#include "omcsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace omcsim {

namespace {

constexpr int width = 880, height = 540;
constexpr int ml = 70, mr = 160, mt = 42, mb = 52;

const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// tick spacing of the form {1,2,5}x10^k covering the range with ~6 steps
double nice_step(double range) {
  if (!(range > 0)) return 1.0;
  const double raw = range / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  if (frac <= 1.5) return mag;
  if (frac <= 3.5) return 2 * mag;
  if (frac <= 7.5) return 5 * mag;
  return 10 * mag;
}

}  // namespace

std::string render_svg_plot(const std::string& title,
                            const std::string& x_label,
                            const std::string& y_label,
                            const std::vector<PlotSeries>& series) {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (first) {
        xmin = xmax = s.x[i];
        ymin = ymax = s.y[i];
        first = false;
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const double pw = width - ml - mr, ph = height - mt - mb;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
     << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << (ml + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"16\">"
     << title << "</text>\n";

  // frame
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
     << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"#333\"/>\n";

  const double xs = nice_step(xmax - xmin);
  for (double x = std::ceil(xmin / xs) * xs; x <= xmax + 1e-12 * xs; x += xs) {
    os << "<line x1=\"" << px(x) << "\" y1=\"" << mt + ph << "\" x2=\""
       << px(x) << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << px(x) << "\" y=\"" << mt + ph + 20
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"11\">"
       << num(x) << "</text>\n";
  }
  const double ys = nice_step(ymax - ymin);
  for (double y = std::ceil(ymin / ys) * ys; y <= ymax + 1e-12 * ys; y += ys) {
    os << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(y) << "\" x2=\"" << ml
       << "\" y2=\"" << py(y) << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << ml - 9 << "\" y=\"" << py(y) + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
       << num(y) << "</text>\n";
  }
  os << "<text x=\"" << (ml + pw / 2) << "\" y=\"" << height - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\">"
     << x_label << "</text>\n";
  os << "<text x=\"18\" y=\"" << (mt + ph / 2)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\""
        " transform=\"rotate(-90 18 "
     << (mt + ph / 2) << ")\">" << y_label << "</text>\n";

  int ci = 0;
  for (const auto& s : series) {
    const char* color = palette[ci % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.3\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      os << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
    }
    os << "\"/>\n";
    const int ly = mt + 16 + 20 * ci;
    os << "<line x1=\"" << width - mr + 12 << "\" y1=\"" << ly << "\" x2=\""
       << width - mr + 40 << "\" y2=\"" << ly << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << width - mr + 46 << "\" y=\"" << ly + 4
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label
       << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
  return os.str();
}

void write_svg_file(const std::string& path, const std::string& svg_text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << svg_text;
}

}  // namespace omcsim
