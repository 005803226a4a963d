#include "predgeom/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#ifndef PREDGEOM_VERSION
#define PREDGEOM_VERSION "0.0.0-unknown"
#endif

namespace predgeom {

std::string format_csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // covers -0.0 as well
  char buf[64];
  const double a = std::abs(v);
  if (a >= 1e6 || a <= 1e-4) {
    std::snprintf(buf, sizeof buf, "%.16e", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", v);
  }
  return buf;
}

std::string Csv::to_string() const {
  std::ostringstream out;
  auto emit_row = [&out](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  emit_row(header);
  for (const auto& row : rows) emit_row(row);
  return out.str();
}

Csv Csv::parse(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.eof()) break;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (first) {
      csv.header = std::move(cells);
      first = false;
    } else {
      csv.rows.push_back(std::move(cells));
    }
  }
  if (first) throw std::runtime_error("Csv::parse: missing header row");
  return csv;
}

void Csv::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("Csv::write: cannot open " + path);
  out << to_string();
  if (!out) throw std::runtime_error("Csv::write: write failed for " + path);
}

Csv Csv::read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("Csv::read: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string tool_version() { return PREDGEOM_VERSION; }

void write_manifest(const std::string& out_path, const std::string& subcommand,
                    const std::string& resolved_config_json, uint64_t seed,
                    double wall_seconds) {
  nlohmann::json m;
  m["subcommand"] = subcommand;
  m["config"] = nlohmann::json::parse(resolved_config_json);
  m["seed"] = seed;
  m["version"] = tool_version();
  m["wall_seconds"] = wall_seconds;
  const std::string path = out_path + ".manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_manifest: cannot open " + path);
  out << m.dump(2) << '\n';
}

namespace {

struct Bounds {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void take(double v) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  void finish() {
    if (!(lo <= hi)) {  // no data at all
      lo = 0.0;
      hi = 1.0;
    }
    if (lo == hi) {  // degenerate span: pad symmetrically
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series) {
  const double width = 720, height = 480;
  const double ml = 80, mr = 24, mt = 48, mb = 56;  // margins
  const double pw = width - ml - mr, ph = height - mt - mb;

  Bounds bx, by;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      bx.take(s.x[i]);
      by.take(s.y[i]);
    }
  bx.finish();
  by.finish();

  auto px = [&](double v) { return ml + (v - bx.lo) / (bx.hi - bx.lo) * pw; };
  auto py = [&](double v) { return mt + ph - (v - by.lo) / (by.hi - by.lo) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
      << "width=\"" << width << "\" height=\"" << height << "\" viewBox=\"0 0 "
      << width << " " << height << "\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

  // axes
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
      << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";

  const int kTicks = 5;
  for (int t = 0; t <= kTicks; ++t) {
    const double fx = bx.lo + (bx.hi - bx.lo) * t / kTicks;
    const double fy = by.lo + (by.hi - by.lo) * t / kTicks;
    svg << "<line x1=\"" << fmt2(px(fx)) << "\" y1=\"" << mt + ph << "\" x2=\""
        << fmt2(px(fx)) << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt2(px(fx)) << "\" y=\"" << mt + ph + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << fmt_tick(fx) << "</text>\n";
    svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << fmt2(py(fy)) << "\" x2=\""
        << ml << "\" y2=\"" << fmt2(py(fy)) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << fmt2(py(fy) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << fmt_tick(fy) << "</text>\n";
  }

  svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"13\">" << x_label << "</text>\n";
  svg << "<text x=\"18\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 18 " << mt + ph / 2 << ")\">" << y_label
      << "</text>\n";

  for (size_t si = 0; si < series.size(); ++si) {
    const SvgSeries& s = series[si];
    svg << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"2\" points=\"";
    for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (i) svg << ' ';
      svg << fmt2(px(s.x[i])) << ',' << fmt2(py(s.y[i]));
    }
    svg << "\"/>\n";
    for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      svg << "<circle cx=\"" << fmt2(px(s.x[i])) << "\" cy=\""
          << fmt2(py(s.y[i])) << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";

    // legend entry
    const double ly = mt + 16 + 18 * static_cast<double>(si);
    svg << "<line x1=\"" << ml + pw - 150 << "\" y1=\"" << ly << "\" x2=\""
        << ml + pw - 120 << "\" y2=\"" << ly << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << ml + pw - 112 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label
        << "</text>\n";
  }

  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_svg_chart: cannot open " + path);
  out << svg.str();
}

}  // namespace predgeom
