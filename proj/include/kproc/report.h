#ifndef KPROC_REPORT_H_
#define KPROC_REPORT_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "kproc/experiments.h"

namespace kproc {

using Cell = std::variant<double, std::int64_t, std::string>;

// Rectangular result with scalar metadata. CSV puts the metadata on leading
// "# key=value" lines; JSON under "meta". Doubles are written with 17
// significant digits in CSV and round-trip precision in JSON, so both carry
// the same numbers.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, Cell>> meta;

  void add_meta(std::string key, Cell value) { meta.emplace_back(std::move(key), std::move(value)); }
};

std::string format_cell(const Cell& cell);

// theta,estimate,se,replicas
Table curve_table(const AgingCurve& curve);
// n,median_disc
Table convergence_table(std::span<const ConvergenceRow> rows);

void write_csv(std::ostream& out, const Table& table);
void write_json(std::ostream& out, const Table& table);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> error;  // optional half-width of error bars
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = true;
  std::vector<PlotSeries> series;
};

// Static SVG line plot.
std::string render_svg(const PlotSpec& spec);

// 64-bit FNV-1a, used to fingerprint configurations in manifests.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace kproc

#endif  // KPROC_REPORT_H_
