#include "lvq/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace lvq {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

void write_arc_svg(const std::vector<AveragedARC>& arcs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write SVG file: " + path);

  const double width = 720, height = 520;
  const double ml = 70, mr = 20, mt = 20, mb = 55;  // margins
  const double pw = width - ml - mr, ph = height - mt - mb;

  double x_min = 1.0, y_min = 1.0, y_max = 0.0;
  for (const auto& arc : arcs)
    for (std::size_t i = 0; i < arc.grid.size(); ++i) {
      x_min = std::min(x_min, arc.grid[i]);
      y_min = std::min(y_min, arc.mean_accuracy[i]);
      y_max = std::max(y_max, arc.mean_accuracy[i]);
    }
  if (y_max <= y_min) y_max = y_min + 1e-3;
  y_min = std::max(0.0, y_min - 0.02);
  y_max = std::min(1.0, y_max + 0.02);
  x_min = std::max(0.0, x_min - 0.02);

  const auto px = [&](double tc) { return ml + (tc - x_min) / (1.0 - x_min) * pw; };
  const auto py = [&](double ta) { return mt + (y_max - ta) / (y_max - y_min) * ph; };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
      << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << mt + ph << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double tc = x_min + (1.0 - x_min) * k / 5.0;
    out << "<line x1=\"" << px(tc) << "\" y1=\"" << mt + ph << "\" x2=\"" << px(tc)
        << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(tc) << "\" y=\"" << mt + ph + 20
        << "\" font-size=\"12\" text-anchor=\"middle\">" << num(tc) << "</text>\n";
    const double ta = y_min + (y_max - y_min) * k / 5.0;
    out << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(ta) << "\" x2=\"" << ml
        << "\" y2=\"" << py(ta) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml - 9 << "\" y=\"" << py(ta) + 4
        << "\" font-size=\"12\" text-anchor=\"end\">" << num(ta) << "</text>\n";
  }
  out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
      << "\" font-size=\"14\" text-anchor=\"middle\">classified fraction t_c</text>\n";
  out << "<text x=\"18\" y=\"" << mt + ph / 2
      << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << mt + ph / 2 << ")\">accuracy t_a</text>\n";

  for (std::size_t a = 0; a < arcs.size(); ++a) {
    const auto& arc = arcs[a];
    if (arc.grid.empty()) continue;
    const char* color = kPalette[a % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < arc.grid.size(); ++i)
      out << num(px(arc.grid[i])) << ',' << num(py(arc.mean_accuracy[i])) << ' ';
    out << "\"/>\n";
    const double ly = mt + 18 + 18 * static_cast<double>(a);
    out << "<line x1=\"" << ml + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << ml + 34
        << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << ml + 40 << "\" y=\"" << ly
        << "\" font-size=\"12\">" << provenance_name(arc.provenance) << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace lvq
