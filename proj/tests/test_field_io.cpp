#include <filesystem>
#include <sstream>

#include "corrint/field_io.hpp"
#include "corrint/model.hpp"
#include "doctest.h"

using namespace corrint;

namespace {

Field sample() {
  Field f;
  f.axes = {{"x1", -1.5, 2.0, 4}, {"X", 0.1, 0.3, 3}};
  f.fixed = {{"x2", 7.25}};
  f.t = -3.125;
  f.config_hash = 0xdeadbeefcafef00dull;
  f.allocate();
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = 1.0 / (3.0 + double(i)) * 1e-7;
  return f;
}

void same(const Field& a, const Field& b) {
  CHECK(same_grid(a, b));
  CHECK(a.fixed == b.fixed);
  CHECK(a.t == b.t);
  CHECK(a.config_hash == b.config_hash);
  CHECK(a.values == b.values);
}

}  // namespace

TEST_CASE("binary round trip is exact") {
  const Field f = sample();
  std::stringstream ss;
  io::write_binary(ss, f);
  same(io::read_binary(ss), f);
}

TEST_CASE("csv round trip is exact") {
  const Field f = sample();
  std::stringstream ss;
  io::write_csv(ss, f);
  same(io::read_csv(ss), f);
}

TEST_CASE("malformed binary input is rejected") {
  const Field f = sample();
  std::stringstream ss;
  io::write_binary(ss, f);
  const std::string good = ss.str();

  std::stringstream truncated(good.substr(0, good.size() - 3));
  CHECK_THROWS_AS(io::read_binary(truncated), ConfigError);
  std::stringstream trailing(good + "x");
  CHECK_THROWS_AS(io::read_binary(trailing), ConfigError);
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  std::stringstream bm(bad_magic);
  CHECK_THROWS_AS(io::read_binary(bm), ConfigError);
  std::string bad_version = good;
  bad_version[8] = 9;
  std::stringstream bv(bad_version);
  CHECK_THROWS_AS(io::read_binary(bv), ConfigError);
}

TEST_CASE("malformed csv input is rejected") {
  std::stringstream no_axes("1,2,3\n");
  CHECK_THROWS_AS(io::read_csv(no_axes), ConfigError);
  const Field f = sample();
  std::stringstream ss;
  io::write_csv(ss, f);
  std::string text = ss.str();
  std::stringstream short_rows(text.substr(0, text.rfind('\n', text.size() - 2) + 1));
  CHECK_THROWS_AS(io::read_csv(short_rows), ConfigError);
  std::stringstream bad_number(text + "1,2,abc\n");
  CHECK_THROWS_AS(io::read_csv(bad_number), ConfigError);
}

TEST_CASE("pgm needs a 2D field") {
  Field f = sample();
  std::stringstream ss;
  io::write_pgm(ss, f);
  CHECK(ss.str().rfind("P5", 0) == 0);
  f.axes.pop_back();
  f.allocate();
  std::stringstream s2;
  CHECK_THROWS_AS(io::write_pgm(s2, f), ConfigError);
}

TEST_CASE("save and load through files") {
  const auto dir = std::filesystem::temp_directory_path() / "corrint_io_test";
  std::filesystem::remove_all(dir);
  const Field f = sample();
  const std::string bin = (dir / "sub" / "f.cfld").string(), csv = (dir / "f.csv").string();
  io::save(bin, f, io::Format::binary);
  io::save(csv, f, io::Format::csv);
  same(io::load(bin), f);
  same(io::load(csv), f);
  CHECK(io::parse_format("bin") == io::Format::binary);
  CHECK_THROWS_AS(io::parse_format("png"), ConfigError);
  std::filesystem::remove_all(dir);
}
