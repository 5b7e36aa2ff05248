#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lowdisc/coloring.hpp"

namespace lowdisc {

std::uint64_t fnv1a64(std::string_view bytes);
// 16 lowercase hex digits of fnv1a64 over the compact dump of `config`.
std::string config_hash(const nlohmann::json& config);

// {"version": ..., "config_hash": ...}
nlohmann::json meta_block(const std::string& hash);

// Shortest text that reads back to the same double.
std::string format_double(double v);

// Rows must have exactly as many fields as the header; fields are written
// verbatim and must not contain commas, quotes or newlines.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add(std::vector<std::string> row);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

extern const std::vector<std::string> kResultsColumns;

// results.csv rows for one run.
void add_result_rows(CsvTable& table, std::string_view kind, std::size_t n, std::uint64_t seed,
                     const SensitiveTable& t);

struct SvgSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
  std::string color = "#1f77b4";
  bool line = false;
};

// Scatter/line plot; axes are log2 when requested (non-positive values are
// skipped).
std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<SvgSeries>& series, bool log_x, bool log_y);

std::string svg_bars(const std::string& title, const std::vector<std::pair<std::string, double>>& bars);

}  // namespace lowdisc
