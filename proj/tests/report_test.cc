#include <cmath>
#include <cstdlib>
#include <limits>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"
#include "kproc/report.h"

namespace kproc {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

AgingCurve sample_curve() {
  AgingCurve c;
  c.kind = CurveKind::kMcLambdaT;
  c.theta = {0.5, 1.0, 2.0};
  c.values = {{0.6123456789012345, 0.01, 1000}, {1.0 / 3.0, 0.02, 1000}, {0.1, 1e-300, 1000}};
  c.t = 1e-3;
  c.tail_frequency = 0.25;
  c.tail_bias_bound = {0.1, 0.2, 0.05};
  return c;
}

TEST(FormatCell, RoundTripsDoubles) {
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, -0.0}) {
    EXPECT_EQ(std::strtod(format_cell(x).c_str(), nullptr), x);
  }
  EXPECT_EQ(format_cell(std::int64_t{-42}), "-42");
  EXPECT_EQ(format_cell(std::string("abc")), "abc");
}

TEST(CurveTable, ColumnsAndMeta) {
  const auto table = curve_table(sample_curve());
  EXPECT_EQ(table.columns, (std::vector<std::string>{"theta", "estimate", "se", "replicas"}));
  ASSERT_EQ(table.rows.size(), 3u);
  std::ostringstream csv;
  write_csv(csv, table);
  const std::string text = csv.str();
  EXPECT_NE(text.find("# kind=mc_lambda_t\n"), std::string::npos);
  EXPECT_NE(text.find("# tail_bias_bound_max=0.20000000000000001\n"), std::string::npos);
  EXPECT_NE(text.find("\ntheta,estimate,se,replicas\n"), std::string::npos);
}

TEST(CurveTable, ClosedFormHasNoTailMeta) {
  const std::vector<double> grid{1.0};
  const auto table = curve_table(closed_form_curve(0.5, grid));
  for (const auto& [key, value] : table.meta) EXPECT_NE(key, "tail_frequency");
}

TEST(Writers, CsvAndJsonCarryTheSameNumbers) {
  const auto table = curve_table(sample_curve());
  std::ostringstream csv, json;
  write_csv(csv, table);
  write_json(json, table);
  const auto doc = nlohmann::json::parse(json.str());

  std::istringstream lines(csv.str());
  std::string line;
  std::size_t row = 0, meta = 0;
  bool header_seen = false;
  while (std::getline(lines, line)) {
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      const std::string key = line.substr(2, eq - 2), value = line.substr(eq + 1);
      const auto& j = doc["meta"][key];
      if (j.is_string()) {
        EXPECT_EQ(j.get<std::string>(), value);
      } else {
        EXPECT_EQ(j.get<double>(), std::stod(value)) << key;
      }
      ++meta;
      continue;
    }
    const auto cells = split(line, ',');
    if (!header_seen) {
      header_seen = true;
      EXPECT_EQ(doc["columns"].get<std::vector<std::string>>(), cells);
      continue;
    }
    ASSERT_LT(row, doc["rows"].size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
      EXPECT_EQ(doc["rows"][row][k].get<double>(), std::stod(cells[k]));
    }
    ++row;
  }
  EXPECT_EQ(row, doc["rows"].size());
  EXPECT_EQ(meta, doc["meta"].size());
}

TEST(ConvergenceTable, Layout) {
  const std::vector<ConvergenceRow> rows{{100, 0.5}, {1000, 0.25}};
  std::ostringstream csv;
  write_csv(csv, convergence_table(rows));
  EXPECT_EQ(csv.str(), "n,median_disc\n100,0.5\n1000,0.25\n");
}

// Checks that every element opened is closed in order.
bool tags_balanced(const std::string& xml) {
  std::vector<std::string> stack;
  const std::regex tag(R"(<(/?)([a-zA-Z]+)[^>]*?(/?)>)");
  for (auto it = std::sregex_iterator(xml.begin(), xml.end(), tag); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    if (m[3].length()) continue;
    if (m[1].length()) {
      if (stack.empty() || stack.back() != m[2].str()) return false;
      stack.pop_back();
    } else {
      stack.push_back(m[2].str());
    }
  }
  return stack.empty();
}

TEST(Svg, WellFormedAndEscaped) {
  PlotSpec spec;
  spec.title = "a < b & c";
  spec.x_label = "theta";
  spec.y_label = "value";
  spec.series.push_back({"mc", {0.5, 1.0, 2.0}, {0.6, 0.5, 0.4}, {0.01, 0.01, 0.01}});
  spec.series.push_back({"exact", {0.0, 1.0, 10.0}, {1.0, 0.5, 0.2}, {}});
  const auto svg = render_svg(spec);
  EXPECT_EQ(svg.rfind("<svg xmlns=\"http://www.w3.org/2000/svg\"", 0), 0u);
  EXPECT_EQ(svg.substr(svg.size() - 7), "</svg>\n");
  EXPECT_NE(svg.find("a &lt; b &amp; c"), std::string::npos);
  EXPECT_TRUE(tags_balanced(svg));
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  EXPECT_EQ(svg.find("inf"), std::string::npos);
}

TEST(Svg, EmptyPlotStillRenders) {
  PlotSpec spec;
  const auto svg = render_svg(spec);
  EXPECT_TRUE(tags_balanced(svg));
  EXPECT_EQ(svg.find("nan"), std::string::npos);
}

TEST(Fnv1a64, ReferenceVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

}  // namespace
}  // namespace kproc
