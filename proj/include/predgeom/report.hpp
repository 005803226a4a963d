#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace predgeom {

// Canonical CSV number format: scientific for |v| >= 1e6 or 0 < |v| <= 1e-4,
// shortest-round-trip decimal otherwise ('.' decimal separator everywhere).
// Every representable double parses back bit-identically.
std::string format_csv_number(double v);

// Comma-separated table with a header row.  Cells are stored verbatim;
// numeric formatting happens on the way in via format_csv_number.
struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
  static Csv parse(const std::string& text);

  void write(const std::string& path) const;
  static Csv read(const std::string& path);
};

// Version string baked in at configure time (git describe when available).
std::string tool_version();

// Writes <out_path>.manifest.json recording how an output file was produced:
// subcommand, fully resolved config (a JSON object in serialized form),
// master seed, tool version, and wall-clock seconds.
void write_manifest(const std::string& out_path, const std::string& subcommand,
                    const std::string& resolved_config_json, uint64_t seed,
                    double wall_seconds);

struct SvgSeries {
  std::string label;
  std::string color;  // any SVG color string
  std::vector<double> x, y;
};

// Minimal self-contained SVG 1.1 line chart: linear axes with ticks, one
// polyline per series, and a legend.  Enough to eyeball risk-vs-lambda runs.
void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series);

}  // namespace predgeom
