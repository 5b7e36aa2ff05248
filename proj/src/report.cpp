#include "lowdisc/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "lowdisc/errors.hpp"
#include "lowdisc/version.hpp"

namespace lowdisc {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_hash(const nlohmann::json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

nlohmann::json meta_block(const std::string& hash) { return {{"version", kVersion}, {"config_hash", hash}}; }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw StructuralError("csv: empty header");
}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header_.size())
    throw StructuralError("csv: row has " + std::to_string(row.size()) + " fields, header has " +
                          std::to_string(header_.size()));
  for (const auto& f : row)
    if (f.find_first_of(",\"\n\r") != std::string::npos) throw StructuralError("csv: field needs quoting: " + f);
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += r[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

const std::vector<std::string> kResultsColumns = {"kind",    "n",   "seed",     "set_id", "set_size",
                                                  "class_i", "chi", "envelope", "ratio"};

void add_result_rows(CsvTable& table, std::string_view kind, std::size_t n, std::uint64_t seed,
                     const SensitiveTable& t) {
  for (const auto& r : t.rows)
    table.add({std::string(kind), std::to_string(n), std::to_string(seed), std::to_string(r.set_id),
               std::to_string(r.size), std::to_string(r.class_i), std::to_string(r.chi), format_double(r.envelope),
               format_double(r.ratio)});
}

namespace {

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

constexpr double kW = 640, kH = 420, kL = 70, kR = 160, kT = 40, kB = 50;

}  // namespace

std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<SvgSeries>& series, bool log_x, bool log_y) {
  auto tx = [&](double v) { return log_x ? std::log2(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log2(v) : v; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      if ((log_x && x <= 0) || (log_y && y <= 0)) continue;
      x0 = std::min(x0, tx(x));
      x1 = std::max(x1, tx(x));
      y0 = std::min(y0, ty(y));
      y1 = std::max(y1, ty(y));
    }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double pw = kW - kL - kR, ph = kH - kT - kB;
  auto px = [&](double v) { return kL + (tx(v) - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return kT + ph - (ty(v) - y0) / (y1 - y0) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << esc(title) << "</text>\n";
  o << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = x0 + (x1 - x0) * t / 4, fy = y0 + (y1 - y0) * t / 4;
    const double gx = kL + pw * t / 4, gy = kT + ph - ph * t / 4;
    o << "<text x=\"" << num(gx) << "\" y=\"" << kH - kB + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
      << (log_x ? "2^" : "") << num(fx) << "</text>\n";
    o << "<text x=\"" << kL - 6 << "\" y=\"" << num(gy + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
      << (log_y ? "2^" : "") << num(fy) << "</text>\n";
  }
  o << "<text x=\"" << kL + pw / 2 << "\" y=\"" << kH - 10 << "\" text-anchor=\"middle\" font-size=\"12\">"
    << esc(xlabel) << "</text>\n";
  o << "<text x=\"16\" y=\"" << kT + ph / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
    << kT + ph / 2 << ")\">" << esc(ylabel) << "</text>\n";
  double ly = kT + 10;
  for (const auto& s : series) {
    std::vector<std::pair<double, double>> pts;
    for (auto [x, y] : s.points)
      if (!((log_x && x <= 0) || (log_y && y <= 0))) pts.push_back({px(x), py(y)});
    if (s.line && pts.size() > 1) {
      o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (auto [x, y] : pts) o << num(x) << ',' << num(y) << ' ';
      o << "\"/>\n";
    } else {
      for (auto [x, y] : pts)
        o << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
    }
    o << "<rect x=\"" << kW - kR + 12 << "\" y=\"" << ly - 8 << "\" width=\"10\" height=\"10\" fill=\"" << s.color
      << "\"/>\n";
    o << "<text x=\"" << kW - kR + 28 << "\" y=\"" << ly + 1 << "\" font-size=\"11\">" << esc(s.name) << "</text>\n";
    ly += 18;
  }
  o << "</svg>\n";
  return o.str();
}

std::string svg_bars(const std::string& title, const std::vector<std::pair<std::string, double>>& bars) {
  double top = 0;
  for (const auto& b : bars) top = std::max(top, b.second);
  if (!(top > 0)) top = 1;
  const double pw = kW - kL - 40, ph = kH - kT - kB - 40;
  const double slot = bars.empty() ? pw : pw / static_cast<double>(bars.size());
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << esc(title) << "</text>\n";
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double h = bars[i].second / top * ph;
    const double x = kL + slot * static_cast<double>(i) + slot * 0.15;
    const double y = kT + ph - h;
    o << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(slot * 0.7) << "\" height=\""
      << num(h) << "\" fill=\"" << (i % 2 ? "#d62728" : "#1f77b4") << "\"/>\n";
    o << "<text x=\"" << num(x + slot * 0.35) << "\" y=\"" << num(y - 4)
      << "\" text-anchor=\"middle\" font-size=\"10\">" << num(bars[i].second) << "</text>\n";
    o << "<text x=\"" << num(x + slot * 0.35) << "\" y=\"" << kT + ph + 14
      << "\" text-anchor=\"end\" font-size=\"10\" transform=\"rotate(-40 " << num(x + slot * 0.35) << " "
      << kT + ph + 14 << ")\">" << esc(bars[i].first) << "</text>\n";
  }
  o << "<line x1=\"" << kL << "\" y1=\"" << kT + ph << "\" x2=\"" << kL + pw << "\" y2=\"" << kT + ph
    << "\" stroke=\"black\"/>\n";
  o << "</svg>\n";
  return o.str();
}

}  // namespace lowdisc
