#include <doctest.h>

#include <string>

#include "dodiff/kvdoc.hpp"

using namespace dodiff;

TEST_CASE("parse sections, comments and values") {
  const auto doc = kv::Document::parse(
      "# header\n"
      "[weight]\n"
      "type = box   # trailing\n"
      "alpha0 = 0.5\n"
      "\n"
      "[grid]\n"
      "times = 0.25, 0.5 1\n"
      "coefficients = 1 | 0.5, -1 | 0\n"
      "N = 12\n");
  REQUIRE(doc.has("weight"));
  const auto& w = doc.section("weight");
  CHECK(w.text("type") == "box");
  CHECK(w.number("alpha0") == 0.5);
  CHECK(w.number_or("h", 0.1) == 0.1);
  CHECK_FALSE(w.optional_number("alpha1").has_value());
  const auto& g = doc.section("grid");
  CHECK(g.numbers("times") == std::vector<double>{0.25, 0.5, 1.0});
  const auto groups = g.number_groups("coefficients");
  REQUIRE(groups.size() == 3);
  CHECK(groups[1] == std::vector<double>{0.5, -1.0});
  CHECK(g.integer("N") == 12);
}

TEST_CASE("errors carry line and key") {
  try {
    kv::Document::parse("[a]\nx = 1\nx = 2\n");
    FAIL("duplicate key accepted");
  } catch (const kv::ConfigError& e) {
    CHECK(e.line() == 3);
    CHECK(e.key() == "x");
  }
  CHECK_THROWS_AS(kv::Document::parse("[a]\njust words\n"), kv::ConfigError);
  CHECK_THROWS_AS(kv::Document::parse("x = 1\n"), kv::ConfigError);
  CHECK_THROWS_AS(kv::Document::parse("[a\n"), kv::ConfigError);

  const auto doc = kv::Document::parse("[a]\nx = 1\ny = nope\n");
  try {
    doc.section("a").number("y");
    FAIL("non-number accepted");
  } catch (const kv::ConfigError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("y") != std::string::npos);
  }
  try {
    doc.section("a").require_only({"x"});
    FAIL("unknown key accepted");
  } catch (const kv::ConfigError& e) {
    CHECK(e.key() == "y");
  }
  CHECK_THROWS_AS(doc.section("b"), kv::ConfigError);
}

TEST_CASE("serialize round trip") {
  const std::string text = "[w]\na = 0.1\nb = 1, 2, 3\n[x]\nname = sin\n";
  const auto doc = kv::Document::parse(text);
  const auto again = kv::Document::parse(doc.serialize());
  CHECK(again.serialize() == doc.serialize());
  CHECK(again.section("w").numbers("b") == std::vector<double>{1, 2, 3});
  CHECK(kv::Document::parse("[n]\nv = " + kv::format_number(0.1 + 0.2) + "\n").section("n").number("v") ==
        0.1 + 0.2);
}
