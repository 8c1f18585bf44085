#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "synthlearn/config.hpp"

using namespace synthlearn;

TEST_CASE("config parses sections, comments, and typed values") {
  Config cfg = Config::parse_string(
      "# leading comment\n"
      "[gan]\n"
      "batch = 16   # trailing comment\n"
      "gamma = 0.01\n"
      "ada = true\n"
      "\n"
      "[classifier]\n"
      "widths = 16,32,64\n",
      "inline");
  CHECK(cfg.get_int("gan", "batch", 0) == 16);
  CHECK(cfg.get_double("gan", "gamma", 0.0) == doctest::Approx(0.01));
  CHECK(cfg.get_bool("gan", "ada", false));
  const auto widths = cfg.get_size_list("classifier", "widths", {});
  REQUIRE(widths.size() == 3);
  CHECK(widths[2] == 64);
  CHECK_NOTHROW(cfg.require_all_consumed());
}

TEST_CASE("unknown keys are rejected, with section attribution") {
  Config cfg = Config::parse_string("[gan]\nbatch = 16\nbtach = 8\n", "inline");
  (void)cfg.get_int("gan", "batch", 0);
  CHECK_THROWS_WITH_AS(cfg.require_all_consumed(),
                       doctest::Contains("[gan] btach"), ConfigError);
}

TEST_CASE("duplicate keys are rejected at parse time") {
  CHECK_THROWS_AS(Config::parse_string("[gan]\nbatch = 16\nbatch = 8\n", "inline"),
                  ConfigError);
}

TEST_CASE("keys before any section header are rejected") {
  CHECK_THROWS_AS(Config::parse_string("batch = 16\n", "inline"), ConfigError);
}

TEST_CASE("typed getters validate their input") {
  Config cfg = Config::parse_string("[a]\nx = notanumber\nb = maybe\n", "inline");
  CHECK_THROWS_AS((void)cfg.get_double("a", "x", 0.0), ConfigError);
  CHECK_THROWS_AS((void)cfg.get_bool("a", "b", false), ConfigError);
}

TEST_CASE("set overrides and render produces canonical text") {
  Config cfg = Config::parse_string("[b]\nk = 1\n[a]\nz = 2\n", "inline");
  cfg.set("a", "y", "3");
  const std::string text = cfg.render();
  // sections and keys render sorted, so equal configs render identically
  CHECK(text == "[a]\ny = 3\nz = 2\n\n[b]\nk = 1\n");
  Config again = Config::parse_string(text, "rendered");
  CHECK(again.render() == text);
}

TEST_CASE("parse_file reports missing files") {
  CHECK_THROWS_AS(Config::parse_file("/nonexistent/config.ini"), ConfigError);
}

TEST_CASE("strict scalar parsing rejects trailing garbage") {
  CHECK(parse_double_strict("0.25", "t") == doctest::Approx(0.25));
  CHECK(parse_double_strict("1/3773", "t") == doctest::Approx(1.0 / 3773.0));
  CHECK_THROWS_AS(parse_double_strict("0.25x", "t"), ConfigError);
  CHECK_THROWS_AS(parse_double_strict("", "t"), ConfigError);
  CHECK(parse_int_strict("42", "t") == 42);
  CHECK_THROWS_AS(parse_int_strict("42.5", "t"), ConfigError);
}

TEST_CASE("grid expansion fills ellipsis ranges by the last explicit step") {
  const auto grid = expand_grid("0.03,0.06,0.1,0.2,0.3,...,1.5");
  REQUIRE(grid.size() == 17);
  CHECK(grid[0] == doctest::Approx(0.03));
  CHECK(grid[3] == doctest::Approx(0.2));
  CHECK(grid[4] == doctest::Approx(0.3));
  CHECK(grid[5] == doctest::Approx(0.4));
  CHECK(grid.back() == doctest::Approx(1.5));
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
}

TEST_CASE("grid expansion accepts plain lists and rejects bad ranges") {
  const auto plain = expand_grid("1,2,5");
  REQUIRE(plain.size() == 3);
  CHECK(plain[2] == doctest::Approx(5.0));
  CHECK_THROWS_AS(expand_grid("0.3,0.2,...,1.5"), ConfigError);  // decreasing step
  CHECK_THROWS_AS(expand_grid("...,1.5"), ConfigError);          // no step context
}

TEST_CASE("delta parsing supports the reciprocal convention") {
  CHECK(parse_delta("auto:3773") == doctest::Approx(1.0 / 3773.0));
  CHECK(parse_delta("1e-5") == doctest::Approx(1e-5));
  CHECK_THROWS_AS(parse_delta("2.0"), ConfigError);   // outside (0, 1)
  CHECK_THROWS_AS(parse_delta("auto:0"), ConfigError);
}
