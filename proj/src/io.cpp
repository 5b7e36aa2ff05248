#include "lowdisc/io.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>
#include "json.hpp"
#include <sstream>

#include "lowdisc/errors.hpp"
#include "lowdisc/geometry.hpp"

namespace lowdisc {

using nlohmann::json;

std::string to_json(const SetSystem& sys) {
  json j;
  j["n"] = sys.n();
  json sets = json::array();
  for (std::size_t i = 0; i < sys.size(); ++i) sets.push_back(sys.set(i).indices());
  j["sets"] = std::move(sets);
  if (sys.has_labels()) {
    json labels = json::array();
    for (std::size_t i = 0; i < sys.size(); ++i) labels.push_back(sys.label(i));
    j["labels"] = std::move(labels);
  }
  return j.dump() + "\n";
}

SetSystem set_system_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw StructuralError(std::string("malformed set system JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("n") || !j.contains("sets") || !j["n"].is_number_integer() ||
      !j["sets"].is_array())
    throw StructuralError("set system JSON needs integer \"n\" and array \"sets\"");
  const auto n = j["n"].get<std::int64_t>();
  if (n < 1) throw StructuralError("set system JSON: n must be positive");
  const json* labels = j.contains("labels") ? &j["labels"] : nullptr;
  if (labels && (!labels->is_array() || labels->size() != j["sets"].size()))
    throw StructuralError("set system JSON: labels must match sets in length");
  SetSystem sys(static_cast<std::size_t>(n));
  sys.reserve(j["sets"].size());
  for (std::size_t i = 0; i < j["sets"].size(); ++i) {
    const json& s = j["sets"][i];
    if (!s.is_array()) throw StructuralError("set system JSON: every set must be an array");
    std::vector<std::uint32_t> idx;
    idx.reserve(s.size());
    for (const auto& v : s) {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 0 || v.get<std::int64_t>() >= n)
        throw StructuralError("set system JSON: element id out of range in set " + std::to_string(i));
      if (!idx.empty() && v.get<std::uint32_t>() <= idx.back())
        throw StructuralError("set system JSON: ids must be strictly ascending in set " + std::to_string(i));
      idx.push_back(v.get<std::uint32_t>());
    }
    sys.add_indices(idx, labels ? (*labels)[i].get<std::string>() : std::string{});
  }
  return sys;
}

std::vector<std::uint8_t> to_binary(const SetSystem& sys) {
  const std::size_t row_bytes = (sys.n() + 7) / 8;
  std::vector<std::uint8_t> out{'S', 'S', 'Y', 'S', 1};
  auto put_u32 = [&](std::uint64_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  };
  put_u32(sys.n());
  put_u32(sys.size());
  out.reserve(out.size() + row_bytes * sys.size());
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const std::uint64_t* w = sys.set(i).data();
    for (std::size_t byte = 0; byte < row_bytes; ++byte)
      out.push_back(static_cast<std::uint8_t>(w[byte / 8] >> (8 * (byte % 8))));
  }
  return out;
}

SetSystem set_system_from_binary(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 13 || bytes[0] != 'S' || bytes[1] != 'S' || bytes[2] != 'Y' || bytes[3] != 'S')
    throw StructuralError("binary set system: bad magic");
  if (bytes[4] != 1) throw StructuralError("binary set system: unsupported version " + std::to_string(bytes[4]));
  auto get_u32 = [&](std::size_t at) {
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(bytes[at + b]) << (8 * b);
    return v;
  };
  const std::size_t n = get_u32(5), m = get_u32(9);
  if (n < 1) throw StructuralError("binary set system: n must be positive");
  const std::size_t row_bytes = (n + 7) / 8;
  if (bytes.size() != 13 + row_bytes * m) throw StructuralError("binary set system: length does not match header");
  SetSystem sys(n);
  sys.reserve(m);
  BitVec row(n);
  for (std::size_t i = 0; i < m; ++i) {
    std::fill(row.data(), row.data() + row.words(), 0);
    const std::uint8_t* src = bytes.data() + 13 + i * row_bytes;
    for (std::size_t byte = 0; byte < row_bytes; ++byte)
      row.data()[byte / 8] |= static_cast<std::uint64_t>(src[byte]) << (8 * (byte % 8));
    if (n % 8 && (src[row_bytes - 1] >> (n % 8)))
      throw StructuralError("binary set system: padding bits set in row " + std::to_string(i));
    sys.add(row);
  }
  return sys;
}

std::string to_json(const PointSet& pts) {
  json j;
  j["dim"] = pts.dim;
  json arr = json::array();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    json p = json::array();
    for (std::size_t c = 0; c < pts.dim; ++c) p.push_back(pts.coord(i, c));
    arr.push_back(std::move(p));
  }
  j["points"] = std::move(arr);
  j["seed"] = pts.seed;
  return j.dump() + "\n";
}

PointSet point_set_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw StructuralError(std::string("malformed point set JSON: ") + e.what());
  }
  if (!j.contains("dim") || !j.contains("points")) throw StructuralError("point set JSON needs \"dim\" and \"points\"");
  PointSet pts;
  pts.dim = j["dim"].get<std::size_t>();
  if (pts.dim < 1 || pts.dim > 4) throw StructuralError("point set JSON: dim must lie in 1..4");
  pts.seed = j.value("seed", std::uint64_t{0});
  for (const auto& p : j["points"]) {
    if (!p.is_array() || p.size() != pts.dim) throw StructuralError("point set JSON: point of wrong dimension");
    for (const auto& c : p) pts.coords.push_back(c.get<double>());
  }
  return pts;
}

std::string coloring_to_text(const Coloring& chi, const std::vector<std::string>& header) {
  std::string out;
  for (const auto& h : header) out += "# " + h + "\n";
  for (std::size_t i = 0; i < chi.size(); ++i) out += std::to_string(chi[i]) + "\n";
  return out;
}

Coloring coloring_from_text(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::int8_t> values;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    if (line == "1" || line == "+1") values.push_back(1);
    else if (line == "-1") values.push_back(-1);
    else if (line == "0") values.push_back(0);
    else throw StructuralError("coloring file: bad value \"" + line + "\"");
  }
  return Coloring(std::move(values));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& contents) {
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << contents;
  if (!out) throw IoError("write failed for " + path);
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& contents) {
  write_file(path, std::string(contents.begin(), contents.end()));
}

SetSystem load_set_system(const std::string& path) {
  auto bytes = read_binary_file(path);
  if (bytes.size() >= 4 && bytes[0] == 'S' && bytes[1] == 'S' && bytes[2] == 'Y' && bytes[3] == 'S')
    return set_system_from_binary(bytes);
  return set_system_from_json(std::string(bytes.begin(), bytes.end()));
}

}  // namespace lowdisc
