#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "digitdyn/cli.hpp"
#include "digitdyn/core.hpp"

using namespace digitdyn;
using nlohmann::json;

namespace {

struct Run {
  int rc;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int rc = cli_dispatch(std::move(args), out, err);
  return {rc, out.str(), err.str()};
}

bool has(const std::string& text, const std::string& piece) {
  return text.find(piece) != std::string::npos;
}

}  // namespace

TEST_CASE("integer arguments accept plain and digit-vector forms") {
  CHECK(parse_integer_arg("543") == 543);
  CHECK(parse_integer_arg("[5,4,3]@10") == 543);
  CHECK(parse_integer_arg("[1,0]@2") == 2);
  CHECK(parse_integer_arg("[6,4]@8") == 52);
  CHECK(parse_integer_arg("[]@7") == 0);

  CHECK_THROWS_AS(parse_integer_arg(""), precondition_error);
  CHECK_THROWS_AS(parse_integer_arg("abc"), precondition_error);
  CHECK_THROWS_AS(parse_integer_arg("[5,4,3"), precondition_error);
  CHECK_THROWS_AS(parse_integer_arg("[9]@8"), precondition_error);
  CHECK_THROWS_AS(parse_integer_arg("[x]@8"), precondition_error);
}

TEST_CASE("rational arguments canonicalize and demand positive denominators") {
  CHECK(parse_rational_arg("2/3") == Rat(2, 3));
  CHECK(parse_rational_arg("4/6") == Rat(2, 3));
  CHECK(parse_rational_arg("5") == Rat(5));
  CHECK_THROWS_AS(parse_rational_arg("1/-2"), precondition_error);
  CHECK_THROWS_AS(parse_rational_arg("1/0"), precondition_error);
  CHECK_THROWS_AS(parse_rational_arg("x"), precondition_error);
}

TEST_CASE("orbit prints the tail, the cycle, and the distinct count") {
  auto r = cli({"orbit", "-b", "10", "25"});
  REQUIRE(r.rc == 0);
  CHECK(has(r.out, "orbit of 25 in base 10 (exponent 2)"));
  CHECK(has(r.out, "tail (3): 25 29 85"));
  CHECK(has(r.out, "cycle (8): 4 16 37 58 89 145 42 20"));
  CHECK(has(r.out, "distinct values: 11"));
}

TEST_CASE("orbit json carries the same walk") {
  auto r = cli({"orbit", "-b", "10", "25", "--json"});
  REQUIRE(r.rc == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["start"] == 25);
  CHECK(doc["base"] == 10);
  CHECK(doc["exponent"] == 2);
  CHECK(doc["tail"] == json({25, 29, 85}));
  CHECK(doc["cycle"]["length"] == 8);
  CHECK(doc["cycle"]["members"] == json({4, 16, 37, 58, 89, 145, 42, 20}));
  CHECK(doc["cycle"]["propagating"] == false);
  CHECK(doc["distinct"] == 11);
}

TEST_CASE("cycles reports the census with propagation marks") {
  auto r = cli({"cycles", "-b", "3", "-m", "2"});
  REQUIRE(r.rc == 0);
  CHECK(has(r.out, "base 3, exponent 2, scanned to 8 (complete), 8 steps"));
  CHECK(has(r.out, "4 cycles:"));
  CHECK(has(r.out, "[2P] 2 4"));
  CHECK(has(r.out, "fixed points predicted by the divisor count: 3"));
}

TEST_CASE("cycles json lists every cycle and the fixed-point prediction") {
  auto r = cli({"cycles", "-b", "8", "--json"});
  REQUIRE(r.rc == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["base"] == 8);
  CHECK(doc["bound"] == 63);
  CHECK(doc["complete"] == true);
  CHECK(doc["steps"] == 68);
  REQUIRE(doc["cycles"].size() == 6);
  CHECK(doc["cycles"][1]["members"] == json({20}));
  CHECK(doc["cycles"][1]["propagating"] == true);
  CHECK(doc["cycles"][5]["members"] == json({5, 25, 10}));
  CHECK(doc["fixed_point_prediction"] == 3);
}

TEST_CASE("onecycles lists fixed points with their duals") {
  auto r = cli({"onecycles", "-b", "8"});
  REQUIRE(r.rc == 0);
  CHECK(has(r.out, "base 8: 3 positive fixed points"));
  CHECK(has(r.out, "n = 1 = [0,1]"));
  CHECK(has(r.out, "n = 20 = [2,4]  g=2 g'=2 h=1 h'=3 d=5 D=13  dual n = 52"));
  CHECK(has(r.out, "n = 52 = [6,4]  g=2 g'=2 h=3 h'=1 d=13 D=5  dual n = 20"));

  auto j = cli({"onecycles", "-b", "8", "--json"});
  REQUIRE(j.rc == 0);
  auto doc = json::parse(j.out);
  CHECK(doc["count"] == 3);
  REQUIRE(doc["fixed_points"].size() == 3);
  CHECK_FALSE(doc["fixed_points"][0].contains("g"));
  CHECK(doc["fixed_points"][1]["dual"] == 52);
  CHECK(doc["fixed_points"][2]["d"] == 13);
}

TEST_CASE("lines from-cycle prints the reduced line of a two-cycle") {
  auto r = cli({"lines", "from-cycle", "-b", "8", "13", "26"});
  REQUIRE(r.rc == 0);
  CHECK(has(r.out, "line: b(t) = 8 + 5 t"));
  CHECK(has(r.out, "pair 0: x = 5 + 3 t, y = 1 + 1 t"));
  CHECK(has(r.out, "pair 1: x = 2 + 1 t, y = 3 + 2 t"));
}

TEST_CASE("lines second solves the transverse direction at a swap point") {
  auto r = cli({"lines", "second", "8", "5", "1", "2", "3"});
  REQUIRE(r.rc == 0);
  CHECK(has(r.out, "second line: b(t) = 8 + 17 t"));
  CHECK(has(r.out, "direction discriminant: 6409"));

  auto bad = cli({"lines", "second", "8", "5", "2", "2", "3"});
  CHECK(bad.rc == 2);
  CHECK(has(bad.err, "point is not on the swap variety"));
}

TEST_CASE("lines fixed-point prints both lines through a fixed point") {
  auto r = cli({"lines", "fixed-point", "-b", "8", "4", "2"});
  REQUIRE(r.rc == 0);
  CHECK(has(r.out, "line through the dual: b(t) = 8 + 13 t"));
  CHECK(has(r.out, "pair 0: x = 4 + 6 t, y = 2 + 4 t"));
  CHECK(has(r.out, "line through the point: b(t) = 8 + 5 t"));
  CHECK(has(r.out, "pair 0: x = 4 + 2 t, y = 2 + 1 t"));
}

TEST_CASE("propagate evaluates the line at the requested parameters") {
  auto r = cli({"propagate", "-b", "8", "13", "26", "--at", "1,2"});
  REQUIRE(r.rc == 0);
  CHECK(has(r.out, "t = 1: base 13, cycle 34 68"));
  CHECK(has(r.out, "t = 2: base 18, cycle 65 130"));
}

TEST_CASE("density reports the group decomposition and the bound") {
  auto r = cli({"density", "-l", "2", "-N", "12"});
  REQUIRE(r.rc == 0);
  CHECK(has(r.out, "cycle length 2, bases 2..12, first lines"));
  CHECK(has(r.out, "propagating cycles: 5, progressions: 5, second-line misses: 0"));
  CHECK(has(r.out, "retained: 3 in 3 groups"));
  CHECK(has(r.out, "density lower bound: 293/1189 ~ 0.246425"));

  auto j = cli({"density", "-l", "2", "-N", "12", "--json"});
  REQUIRE(j.rc == 0);
  auto doc = json::parse(j.out);
  CHECK(doc["collected_pairs"] == 5);
  CHECK(doc["retained"] == 3);
  CHECK(doc["groups"] == 3);
  CHECK(doc["lower_bound"] == "293/1189");
}

TEST_CASE("density require-bound gates the exit code") {
  CHECK(cli({"density", "-l", "2", "-N", "12", "--require-bound", "1/5"}).rc == 0);
  CHECK(cli({"density", "-l", "2", "-N", "12", "--require-bound", "1/3"}).rc == 1);
}

TEST_CASE("search summarizes a campaign in text and json") {
  std::vector<std::string> base = {"search", "-k", "exact-count", "-p", "2",
                                   "--from", "2", "--to", "50", "--no-line-prefilter"};
  auto r = cli(base);
  REQUIRE(r.rc == 0);
  CHECK(has(r.out, "exact-count campaign, parameter 2, bases 2..50"));
  CHECK(has(r.out, "hits (6): 6 10 16 20 26 40"));
  CHECK(has(r.out, "scanned 11 bases, skipped 38 by prefilter, 3487 steps"));

  base.push_back("--json");
  auto j = cli(base);
  REQUIRE(j.rc == 0);
  auto doc = json::parse(j.out);
  CHECK(doc["hits"] == json({6, 10, 16, 20, 26, 40}));
  CHECK(doc["bases_scanned"] == 11);
  CHECK(doc["prefilter_skips"] == 38);
  CHECK(doc["steps"] == 3487);
  CHECK(doc["finished"] == true);
}

TEST_CASE("families five prints the guaranteed base-4k cycles") {
  auto r = cli({"families", "five", "1"});
  REQUIRE(r.rc == 0);
  CHECK(has(r.out, "base 4 (cubes): 5 guaranteed cycles"));
  CHECK(has(r.out, "[1] 1"));
  CHECK(has(r.out, "[1] 35"));
}

TEST_CASE("families bound prints the congruence classes behind the count") {
  auto r = cli({"families", "bound", "-m", "3", "-b", "13"});
  REQUIRE(r.rc == 0);
  CHECK(has(r.out, "base 13, exponent 3"));
  CHECK(has(r.out, "digit congruence modulus: 6"));
  CHECK(has(r.out, "guaranteed distinct cycles: 6"));
  CHECK(has(r.out, "residue 1 mod 6: [1] 1"));
}

TEST_CASE("families instantiate and sweep run the catalog") {
  auto r = cli({"families", "instantiate", "power-double",
                "--param", "c=2", "--param", "m=2"});
  REQUIRE(r.rc == 0);
  CHECK(has(r.out, "power-double at c=2 m=2: base 3 (exponent 2)"));
  CHECK(has(r.out, "[1P] 8"));

  auto s = cli({"families", "sweep", "power-zero", "--limit", "3"});
  REQUIRE(s.rc == 0);
  CHECK(has(s.out, "power-zero at c=2 m=3: base 4 (exponent 3)"));
  CHECK(has(s.out, "6 instances"));

  CHECK(cli({"families", "instantiate", "no-such-family",
             "--param", "c=2"}).rc == 2);
}

TEST_CASE("usage problems exit 2, refusals exit 1, help exits 0") {
  CHECK(cli({}).rc == 2);
  CHECK(cli({"bogus"}).rc == 2);
  CHECK(cli({"cycles"}).rc == 2);  // missing required -b
  CHECK(cli({"cycles", "-b", "8", "--json", "--csv"}).rc == 2);

  auto help = cli({"--help"});
  CHECK(help.rc == 0);
  CHECK(has(help.out, "Subcommands:"));
  CHECK(has(help.out, "orbit"));

  auto bad = cli({"orbit", "-b", "1", "5"});
  CHECK(bad.rc == 2);
  CHECK(has(bad.err, "base must be >= 2"));

  // a census refused for resources is a failed check, not a usage error
  auto budget = cli({"cycles", "-b", "100", "--step-budget", "1000"});
  CHECK(budget.rc == 1);
  CHECK(has(budget.err, "error:"));
}
