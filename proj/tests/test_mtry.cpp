#include <doctest.h>

#include "rfsel/error.hpp"
#include "rfsel/mtry_expr.hpp"

using rfsel::ConfigError;
using rfsel::MtryExpr;

TEST_SUITE("mtry") {

TEST_CASE("grid expressions evaluate by flooring") {
  const std::size_t p = 200;
  CHECK(MtryExpr::parse("1").resolve(p) == 1);
  CHECK(MtryExpr::parse("sqrt(p)/2").resolve(p) == 7);
  CHECK(MtryExpr::parse("sqrt(p)").resolve(p) == 14);
  CHECK(MtryExpr::parse("sqrt").resolve(p) == 14);
  CHECK(MtryExpr::parse("2sqrt(p)").resolve(p) == 28);
  CHECK(MtryExpr::parse("4*sqrt(p)").resolve(p) == 56);
  CHECK(MtryExpr::parse("p/4").resolve(p) == 50);
  CHECK(MtryExpr::parse("p/3").resolve(p) == 66);
  CHECK(MtryExpr::parse("p/2").resolve(p) == 100);
  CHECK(MtryExpr::parse("3p/4").resolve(p) == 150);
  CHECK(MtryExpr::parse("p").resolve(p) == 200);
  CHECK(MtryExpr::parse(" P / 3 ").resolve(9) == 3);
  CHECK(MtryExpr::parse("sqrt(p)").resolve(9) == 3);
  CHECK(MtryExpr::parse("sqrt(p)").resolve(500) == 22);
  CHECK(MtryExpr::parse("p/3").label() == "p/3");
}

TEST_CASE("resolve clamps to one; resolve_strict rejects values outside 1..p") {
  CHECK(MtryExpr::parse("sqrt(p)/2").resolve(3) == 1);
  CHECK_THROWS_AS(MtryExpr::parse("sqrt(p)/2").resolve_strict(3), ConfigError);
  CHECK_THROWS_AS(MtryExpr::parse("300").resolve(200), ConfigError);
  CHECK_THROWS_AS(MtryExpr::parse("2p").resolve_strict(10), ConfigError);
  CHECK(MtryExpr::p_over(3).resolve_strict(30) == 10);
}

TEST_CASE("malformed expressions") {
  for (const char* bad : {"", "q", "p/", "p/0", "sqrt(p", "p3", "-2", "0p", "p/3x"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(MtryExpr::parse(bad), ConfigError);
  }
}

}  // TEST_SUITE
