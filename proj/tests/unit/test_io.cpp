#include <filesystem>
#include <string>

#include "doctest.h"
#include "lowdisc/errors.hpp"
#include "lowdisc/generators.hpp"
#include "lowdisc/io.hpp"

using namespace lowdisc;

TEST_CASE("JSON round trip keeps sets, order and labels") {
  SetSystem s(10);
  s.add_indices({0, 9}, "first");
  s.add(BitVec(10), "empty");
  s.add_indices({0, 9}, "dup");
  s.add(BitVec::full(10));
  auto back = set_system_from_json(to_json(s));
  CHECK(back == s);
  CHECK(back.has_labels());
  CHECK(back.label(2) == "dup");
  CHECK(back.label(3).empty());

  auto plain = random_abstract_system(33, 12, {}, 4);
  CHECK(set_system_from_json(to_json(plain)) == plain);
}

TEST_CASE("JSON input validation") {
  CHECK_NOTHROW(set_system_from_json(R"({"n": 3, "sets": [[0, 2], []]})"));
  CHECK_THROWS_AS(set_system_from_json(R"({"n": 3, "sets": [[0, 3]]})"), Error);
  CHECK_THROWS_AS(set_system_from_json(R"({"n": 3, "sets": [[2, 1]]})"), Error);
  CHECK_THROWS_AS(set_system_from_json(R"({"sets": []})"), Error);
  CHECK_THROWS_AS(set_system_from_json("not json"), Error);
}

TEST_CASE("binary format layout and round trip") {
  SetSystem s(10);
  s.add_indices({0, 8, 9});
  auto bytes = to_binary(s);
  REQUIRE(bytes.size() == 4 + 1 + 4 + 4 + 2);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "SSYS");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 10);
  CHECK(bytes[9] == 1);
  CHECK(bytes[13] == 0x01);
  CHECK(bytes[14] == 0x03);
  CHECK(set_system_from_binary(bytes) == s);

  for (std::size_t n : {1u, 7u, 8u, 63u, 64u, 65u, 200u}) {
    auto sys = random_abstract_system(n, 17, {}, n);
    auto b = to_binary(sys);
    CHECK(set_system_from_binary(b) == sys);
    CHECK(to_binary(set_system_from_binary(b)) == b);
  }

  bytes.pop_back();
  CHECK_THROWS_AS(set_system_from_binary(bytes), Error);
}

TEST_CASE("padding bits in the binary format must be zero") {
  SetSystem s(3);
  s.add_indices({1});
  auto b = to_binary(s);
  b.back() |= 0x80;
  CHECK_THROWS_AS(set_system_from_binary(b), Error);
}

TEST_CASE("point sets and colorings round trip") {
  auto pts = gen_points(20, 3, PointDist::gaussian, 5);
  auto back = point_set_from_json(to_json(pts));
  CHECK(back.dim == 3);
  CHECK(back.coords == pts.coords);
  CHECK(back.seed == 5);

  Coloring chi(std::vector<std::int8_t>{1, -1, 0, 1});
  auto text = coloring_to_text(chi, {"seed 7", "mode calibrated"});
  CHECK(text.rfind("# seed 7\n", 0) == 0);
  CHECK(coloring_from_text(text) == chi);
  CHECK_THROWS_AS(coloring_from_text("1\n2\n"), Error);
}

TEST_CASE("file helpers dispatch on content") {
  const auto dir = std::filesystem::temp_directory_path() / "lowdisc_io_test";
  std::filesystem::create_directories(dir);
  auto sys = random_abstract_system(12, 5, {}, 1);
  write_file((dir / "a.json").string(), to_json(sys));
  write_file((dir / "a.bin").string(), to_binary(sys));
  CHECK(load_set_system((dir / "a.json").string()) == sys);
  CHECK(load_set_system((dir / "a.bin").string()) == sys);
  CHECK_THROWS_AS(read_text_file((dir / "missing.json").string()), IoError);
  std::filesystem::remove_all(dir);
}
