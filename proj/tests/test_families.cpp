#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "digitdyn/census.hpp"
#include "digitdyn/families.hpp"

using namespace digitdyn;

namespace {

// Independent walk used to double-check closure of every claimed cycle.
Int naive_step(const Int& n, const Int& base, const DigitMap& map) {
  Int sum = 0, rest = n;
  while (rest > 0) {
    sum += map.apply(Int(rest % base));
    rest /= base;
  }
  return sum;
}

void check_cycle_closed(const Cycle& cyc, const DigitMap& map) {
  REQUIRE(cyc.length() >= 1);
  for (std::size_t i = 0; i < cyc.length(); ++i) {
    const Int& next = cyc.members[(i + 1) % cyc.length()];
    CHECK(naive_step(cyc.members[i], cyc.base, map) == next);
  }
  CHECK(cyc.min_member() == *std::min_element(cyc.members.begin(), cyc.members.end()));
}

bool census_has(u64 base, unsigned exponent, const Cycle& cyc) {
  auto cls = enumerate_cycles(base, exponent);
  REQUIRE(cls.complete);
  return std::find(cls.cycles.begin(), cls.cycles.end(), cyc) != cls.cycles.end();
}

std::map<std::string, Int> P(std::initializer_list<std::pair<const std::string, Int>> kv) {
  return std::map<std::string, Int>(kv);
}

}  // namespace

TEST_CASE("the catalog lists each family once with a sweep parameter") {
  const auto& cat = family_catalog();
  CHECK(cat.size() == 19);
  std::set<std::string> ids;
  for (const auto& info : cat) {
    CHECK(ids.insert(info.id).second);
    CHECK(!info.description.empty());
    REQUIRE(!info.param_names.empty());
  }
}

TEST_CASE("cubic fixed points at base 3k+1") {
  FamilyInstance inst = instantiate_family("cubic-b3k1", P({{"k", Int(1)}}));
  CHECK(inst.base == 4);
  CHECK(inst.exponent == 3);
  REQUIRE(inst.cycles.size() == 3);
  CHECK(inst.cycles[0].members == std::vector<Int>{Int(35)});
  CHECK(inst.cycles[1].members == std::vector<Int>{Int(28)});
  CHECK(inst.cycles[2].members == std::vector<Int>{Int(29)});
  for (const Cycle& c : inst.cycles) CHECK(census_has(4, 3, c));
}

TEST_CASE("three-digit cubic fixed points at the smallest bases") {
  FamilyInstance a = instantiate_family("cubic-b9k3", P({{"k", Int(0)}}));
  CHECK(a.base == 3);
  CHECK(a.cycles[0].members == std::vector<Int>{Int(17)});
  CHECK(census_has(3, 3, a.cycles[0]));

  FamilyInstance b = instantiate_family("cubic-b9k6", P({{"k", Int(0)}}));
  CHECK(b.base == 6);
  CHECK(b.cycles[0].members == std::vector<Int>{Int(190)});
  CHECK(census_has(6, 3, b.cycles[0]));
}

TEST_CASE("cubic 2-cycles on the two plane curves") {
  FamilyInstance c1 = instantiate_family("cubic-curve1", P({{"t", Int(1)}}));
  CHECK(c1.base == 31);
  REQUIRE(c1.cycles.size() == 1);
  CHECK(c1.cycles[0].members == std::vector<Int>{Int(35), Int(65)});
  CHECK(census_has(31, 3, c1.cycles[0]));

  FamilyInstance c2 = instantiate_family("cubic-curve2", P({{"t", Int(1)}}));
  CHECK(c2.base == 43);
  REQUIRE(c2.cycles.size() == 1);
  CHECK(c2.cycles[0].members == std::vector<Int>{Int(91), Int(133)});

  FamilyInstance c0 = instantiate_family("cubic-curve1", P({{"t", Int(0)}}));
  CHECK(c0.base == 7);
  CHECK(c0.cycles[0].members == std::vector<Int>{Int(2), Int(8)});
  CHECK(census_has(7, 3, c0.cycles[0]));
}

TEST_CASE("one-digit-pair fixed points from power identities") {
  FamilyInstance z = instantiate_family("power-zero", P({{"c", Int(2)}, {"m", Int(3)}}));
  CHECK(z.base == 4);
  CHECK(z.cycles[0].members == std::vector<Int>{Int(8)});

  FamilyInstance o = instantiate_family("power-one", P({{"c", Int(2)}, {"m", Int(3)}}));
  CHECK(o.base == 4);
  CHECK(o.cycles[0].members == std::vector<Int>{Int(9)});

  FamilyInstance d = instantiate_family("power-double", P({{"c", Int(2)}, {"m", Int(2)}}));
  CHECK(d.base == 3);
  CHECK(d.cycles[0].members == std::vector<Int>{Int(8)});

  FamilyInstance down = instantiate_family("power-adjacent-down", P({{"c", Int(2)}, {"m", Int(2)}}));
  CHECK(down.base == 3);
  CHECK(down.cycles[0].members == std::vector<Int>{Int(5)});

  FamilyInstance up = instantiate_family("power-adjacent-up", P({{"c", Int(2)}, {"m", Int(3)}}));
  CHECK(up.base == 11);
  CHECK(up.cycles[0].members == std::vector<Int>{Int(35)});
  CHECK(census_has(11, 3, up.cycles[0]));
}

TEST_CASE("the power tower cycle and its order-driven variant") {
  FamilyInstance tower =
      instantiate_family("power-tower", P({{"c", Int(2)}, {"m", Int(2)}, {"l", Int(3)}}));
  CHECK(tower.base == 128);
  REQUIRE(tower.cycles.size() == 1);
  CHECK(tower.cycles[0].members == std::vector<Int>{Int(4), Int(16), Int(256)});
  check_cycle_closed(tower.cycles[0], DigitMap::power(2));

  FamilyInstance ord =
      instantiate_family("power-order", P({{"c", Int(2)}, {"m", Int(2)}, {"p", Int(5)}}));
  CHECK(ord.base == 32);
  REQUIRE(ord.cycles.size() == 1);
  CHECK(ord.cycles[0].members == std::vector<Int>{Int(4), Int(16), Int(256), Int(64)});
  check_cycle_closed(ord.cycles[0], DigitMap::power(2));
}

TEST_CASE("squared-digit tower cycles from a sum of two squares") {
  FamilyInstance t1 =
      instantiate_family("square-coprime-tower", P({{"a", Int(2)}, {"e", Int(1)}, {"l", Int(2)}}));
  CHECK(t1.base == 23);
  CHECK(t1.cycles[0].members == std::vector<Int>{Int(5), Int(25)});
  CHECK(t1.cycles[0].propagating);
  CHECK(census_has(23, 2, t1.cycles[0]));

  FamilyInstance t2 =
      instantiate_family("square-coprime-tower", P({{"a", Int(1)}, {"e", Int(2)}, {"l", Int(2)}}));
  CHECK(t2.base == 12);
  CHECK(t2.cycles[0].members == std::vector<Int>{Int(5), Int(25)});

  CHECK_THROWS_AS(
      instantiate_family("square-coprime-tower", P({{"a", Int(2)}, {"e", Int(3)}, {"l", Int(2)}})),
      precondition_error);
  CHECK_THROWS_AS(
      instantiate_family("square-coprime-tower", P({{"a", Int(2)}, {"e", Int(4)}, {"l", Int(1)}})),
      precondition_error);
}

TEST_CASE("parameter validation rejects malformed requests") {
  CHECK_THROWS_AS(instantiate_family("no-such-family", P({{"k", Int(1)}})), precondition_error);
  CHECK_THROWS_AS(instantiate_family("cubic-b3k1", P({})), precondition_error);
  CHECK_THROWS_AS(instantiate_family("cubic-b3k1", P({{"t", Int(1)}})), precondition_error);
  CHECK_THROWS_AS(instantiate_family("cubic-b3k1", P({{"k", Int(1)}, {"t", Int(1)}})),
                  precondition_error);
  CHECK_THROWS_AS(instantiate_family("cubic-b3k1", P({{"k", Int(0)}})), precondition_error);
  CHECK_THROWS_AS(instantiate_family("power-zero", P({{"c", Int(2)}, {"m", Int(2)}})),
                  precondition_error);
  CHECK_THROWS_AS(instantiate_family("power-adjacent-up", P({{"c", Int(2)}, {"m", Int(4)}})),
                  precondition_error);
  CHECK_THROWS_AS(instantiate_family("power-order", P({{"c", Int(2)}, {"m", Int(2)}, {"p", Int(4)}})),
                  precondition_error);
  CHECK_THROWS_AS(instantiate_family("power-order", P({{"c", Int(2)}, {"m", Int(4)}, {"p", Int(2)}})),
                  precondition_error);
}

TEST_CASE("every family sweeps to verified instances") {
  for (const auto& info : family_catalog()) {
    CAPTURE(info.id);
    auto instances = sweep_family(info.id, Int(6));
    CHECK(!instances.empty());
    for (const FamilyInstance& inst : instances) {
      REQUIRE(inst.base >= 2);
      DigitMap map = DigitMap::power(inst.exponent);
      for (const Cycle& c : inst.cycles) {
        CHECK(c.base == inst.base);
        check_cycle_closed(c, map);
      }
      // Small instances must agree with an exhaustive census of their base.
      bool small = (inst.exponent == 2 && inst.base <= 150) ||
                   (inst.exponent == 3 && inst.base <= 40);
      if (small) {
        u64 b = to_u64(inst.base);
        for (const Cycle& c : inst.cycles) CHECK(census_has(b, inst.exponent, c));
      }
    }
  }
}

TEST_CASE("every digit satisfies the congruence at the certified modulus") {
  for (unsigned m = 2; m <= 8; ++m) {
    for (u64 b = 2; b <= 40; ++b) {
      Int mod = digit_congruence_modulus(m, from_u64(b));
      CAPTURE(m);
      CAPTURE(b);
      CHECK(mod >= 2);
      for (u64 d = 0; d < b; ++d) {
        Int diff = pow_int(from_u64(d), m) - from_u64(d);
        CHECK(mpz_divisible_p(diff.get_mpz_t(), mod.get_mpz_t()));
      }
    }
  }
  CHECK(digit_congruence_modulus(2, Int(10)) == 2);
  CHECK(digit_congruence_modulus(3, Int(3)) == 6);
  CHECK(digit_congruence_modulus(3, Int(4)) == 6);
  CHECK(digit_congruence_modulus(5, Int(11)) == 30);
  CHECK(digit_congruence_modulus(7, Int(3)) == 126);
  CHECK_THROWS_AS(digit_congruence_modulus(1, Int(10)), precondition_error);
  CHECK_THROWS_AS(digit_congruence_modulus(2, Int(1)), precondition_error);
}

TEST_CASE("the residue-class cycle bound is met constructively") {
  CHECK(min_cycle_bound(3, Int(13)) == 6);
  CHECK(min_cycle_bound(5, Int(11)) == 10);
  CHECK(min_cycle_bound(2, Int(10)) == 1);
  CHECK(min_cycle_bound(2, Int(3)) == 2);

  for (unsigned m : {2u, 3u}) {
    for (u64 b = 3; b <= (m == 2 ? 40u : 20u); ++b) {
      Int bound = min_cycle_bound(m, from_u64(b));
      CongruenceCertificate cert =
          congruence_certificate(DigitMap::power(m), from_u64(b), bound);
      CHECK(Int(static_cast<long>(cert.cycles.size())) == bound);
      auto cls = enumerate_cycles(b, m);
      REQUIRE(cls.complete);
      CHECK(from_u64(cls.cycles.size()) >= bound);
    }
  }
}

TEST_CASE("residue classes separate the cubic cycles of base 4") {
  CongruenceCertificate cert = congruence_certificate(DigitMap::power(3), Int(4), Int(3));
  CHECK(cert.modulus == 3);
  REQUIRE(cert.cycles.size() == 3);
  CHECK(cert.cycles[0].members == std::vector<Int>{Int(1)});
  CHECK(cert.cycles[1].members == std::vector<Int>{Int(8)});
  CHECK(cert.cycles[2].members == std::vector<Int>{Int(9)});

  // The same digits given as an explicit table certify identically.
  DigitMap cubes = DigitMap::table({Int(0), Int(1), Int(8), Int(27)});
  CongruenceCertificate tab = congruence_certificate(cubes, Int(4), Int(3));
  CHECK(tab.cycles == cert.cycles);

  CHECK_THROWS_AS(congruence_certificate(DigitMap::power(3), Int(4), Int(2)), precondition_error);
  CHECK_THROWS_AS(congruence_certificate(DigitMap::power(2), Int(5), Int(4)), precondition_error);
  CHECK_THROWS_AS(congruence_certificate(DigitMap::power(3), Int(4), Int(0)), precondition_error);
}

TEST_CASE("five distinct cubic cycles whenever the base is 3k+1") {
  std::vector<Cycle> five = five_cycles(Int(1));
  REQUIRE(five.size() == 5);
  std::vector<Int> mins;
  for (const Cycle& c : five) {
    CHECK(c.base == 4);
    mins.push_back(c.min_member());
  }
  CHECK(mins == std::vector<Int>{Int(1), Int(9), Int(35), Int(28), Int(29)});

  for (long k = 1; k <= 25; ++k) {
    std::vector<Cycle> cs = five_cycles(Int(k));
    REQUIRE(cs.size() == 5);
    DigitMap cubes = DigitMap::power(3);
    for (const Cycle& c : cs) {
      CHECK(c.base == 3 * k + 1);
      check_cycle_closed(c, cubes);
    }
    for (std::size_t i = 0; i < cs.size(); ++i)
      for (std::size_t j = i + 1; j < cs.size(); ++j) CHECK(!(cs[i] == cs[j]));
  }
  CHECK_THROWS_AS(five_cycles(Int(0)), precondition_error);
}
