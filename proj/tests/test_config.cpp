#include <doctest.h>

#include "tqmc/config.hpp"

using namespace tqmc;

TEST_SUITE("config") {
  TEST_CASE("scalars, arrays, inline tables and sections") {
    auto t = config::parse(R"(
# comment
name = "disk run"   # trailing
count = 12
scale = 1.5e-3
flag = true
poly = [-1, -1,
        0]
body = { kind = "disk", center = [0.5, 0.5], radius = 0.35 }
[discrepancy]
G = 32
[outer.inner]
x = -2
)");
    CHECK(config::require(t, "name").as_string("name") == "disk run");
    CHECK(config::require(t, "count").as_int("count") == 12);
    CHECK(config::require(t, "scale").as_double("scale") == doctest::Approx(1.5e-3));
    CHECK(config::require(t, "count").as_double("count") == 12.0);
    CHECK(config::require(t, "flag").as_bool("flag"));
    auto poly = config::as_ints(config::require(t, "poly"), "poly");
    CHECK(poly == std::vector<std::int64_t>{-1, -1, 0});
    const auto& body = config::require(t, "body").as_table("body");
    CHECK(config::as_doubles(config::require(body, "center"), "center") == std::vector<double>{0.5, 0.5});
    CHECK(config::require(config::require(t, "discrepancy").as_table("d"), "G").as_int("G") == 32);
    const auto& outer = config::require(t, "outer").as_table("outer");
    CHECK(config::require(config::require(outer, "inner").as_table("inner"), "x").as_int("x") == -2);
    CHECK(config::require(t, "poly").line == 7);
  }

  TEST_CASE("errors carry the line") {
    try {
      config::parse("a = 1\nb = [1, 2\nc = 3\n");
      FAIL("expected a parse error");
    } catch (const config::ParseError& e) {
      CHECK(e.line() >= 2);
    }
    try {
      config::parse("a = 1\na = 2\n");
      FAIL("expected a duplicate key error");
    } catch (const config::ParseError& e) {
      CHECK(e.line() == 2);
    }
    auto t = config::parse("x = \"text\"\n\ny = 3\n");
    try {
      config::require(t, "x").as_int("x");
      FAIL("expected a type error");
    } catch (const config::ParseError& e) {
      CHECK(e.line() == 1);
      CHECK(std::string(e.what()).find("'x'") != std::string::npos);
    }
    CHECK_THROWS_AS(config::require(t, "missing"), config::ParseError);
    CHECK(config::find(t, "missing") == nullptr);
  }

  TEST_CASE("raw text of rationals is kept") {
    auto v = config::parse_value("[3/2, 2]");
    const auto& items = v.as_array("bracket");
    REQUIRE(items.size() == 2);
    CHECK(items[0].raw == "3/2");
    CHECK(items[1].raw == "2");
  }
}
