#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lowdisc/set_system.hpp"

namespace lowdisc {

struct PointSet;

// {"n": int, "sets": [[ascending ids], ...], "labels": [str, ...]?}
std::string to_json(const SetSystem& sys);
SetSystem set_system_from_json(const std::string& text);

// "SSYS", version byte 1, u32 n, u32 m (little endian), then m rows of
// ceil(n/8) bytes with bit i of a row at byte i/8, bit i%8.
std::vector<std::uint8_t> to_binary(const SetSystem& sys);
SetSystem set_system_from_binary(const std::vector<std::uint8_t>& bytes);

// {"dim": d, "points": [[x, ...], ...], "seed": u64}
std::string to_json(const PointSet& pts);
PointSet point_set_from_json(const std::string& text);

// One value per line, preceded by '#' header lines.
std::string coloring_to_text(const Coloring& chi, const std::vector<std::string>& header);
Coloring coloring_from_text(const std::string& text);

std::string read_text_file(const std::string& path);
std::vector<std::uint8_t> read_binary_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);
void write_file(const std::string& path, const std::vector<std::uint8_t>& contents);

// Dispatches on the file content (binary magic or JSON).
SetSystem load_set_system(const std::string& path);

}  // namespace lowdisc
