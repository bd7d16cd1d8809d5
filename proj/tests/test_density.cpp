#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "digitdyn/density.hpp"

using namespace digitdyn;

namespace {

// Recomputes every group's covered fraction by sieving one full period, then
// recombines the groups into the reported bound.
void check_against_window(const ProgressionFamily& fam) {
  Rat miss(1);
  for (const auto& grp : fam.groups) {
    REQUIRE(fits_u64(grp.modulus));
    u64 period = to_u64(grp.modulus);
    if (period <= 1'000'000) {
      u64 covered = 0;
      for (u64 v = 0; v < period; ++v) {
        bool hit = false;
        for (std::size_t idx : grp.members) {
          const auto& ap = fam.progressions[idx];
          if (from_u64(v) % ap.modulus == ap.residue) {
            hit = true;
            break;
          }
        }
        covered += hit;
      }
      CHECK(grp.covered == Rat(from_u64(covered)) / Rat(from_u64(period)));
    }
    miss *= Rat(1) - grp.covered;
  }
  CHECK(fam.lower_bound == Rat(1) - miss);
}

std::size_t count_key(const ProgressionFamily& fam, const Int& modulus, const Int& residue,
                      bool retained_only) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < fam.progressions.size(); ++i) {
    const auto& ap = fam.progressions[i];
    if (ap.modulus != modulus || ap.residue != residue) continue;
    if (retained_only &&
        std::find(fam.retained.begin(), fam.retained.end(), i) == fam.retained.end())
      continue;
    ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("three small swap cycles give the exact window bound") {
  ProgressionFamily fam = collect_progressions(2, 10, LinePolicy::kFirstLines);
  CHECK(fam.collected_pairs == 3);
  REQUIRE(fam.progressions.size() == 3);
  CHECK(fam.progressions[0].modulus == 5);
  CHECK(fam.progressions[0].residue == 3);
  CHECK(fam.progressions[0].source_base == 3);
  // The base-8 cycle (13, 26) rides the same reduced line as (2, 4) of base 3.
  CHECK(fam.progressions[1].modulus == 5);
  CHECK(fam.progressions[1].residue == 3);
  CHECK(fam.progressions[1].source_base == 8);
  CHECK(fam.progressions[2].modulus == 41);
  CHECK(fam.progressions[2].residue == 9);
  CHECK(fam.progressions[2].source_base == 9);

  prune_and_bound(fam);
  CHECK(fam.bounded);
  CHECK(fam.retained.size() == 2);
  // 1 - (4/5)(40/41): the primes 5 and 41 contribute their own groups.
  CHECK(fam.lower_bound == Rat(9) / Rat(41));
  check_against_window(fam);
  for (std::size_t idx : fam.retained)
    CHECK(certify_progression(fam.progressions[idx], 2, {Int(1), Int(2), Int(3)}));

  std::string csv = density_csv(fam);
  CHECK(csv.rfind("modulus,residue,source_base,min_member,cycle_length,second_line,certified,"
                  "retained\n",
                  0) == 0);
  CHECK(csv.find("5,3,3,2,2,0,1,1\n") != std::string::npos);
  CHECK(csv.find("5,3,8,13,2,0,1,0\n") != std::string::npos);
  CHECK(csv.find("41,9,9,68,2,0,1,1\n") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("lifted cycles are deduplicated into their source progression") {
  // Bases 8 and 13 both ride the reduced line of the base-3 cycle (2, 4).
  ProgressionFamily fam = collect_progressions(2, 13, LinePolicy::kFirstLines);
  CHECK(fam.collected_pairs == 7);
  CHECK(count_key(fam, Int(5), Int(3), false) == 3);
  prune_and_bound(fam);
  CHECK(count_key(fam, Int(5), Int(3), true) == 1);
  for (std::size_t idx : fam.retained) {
    if (fam.progressions[idx].modulus == 5) CHECK(fam.progressions[idx].source_base == 3);
  }
}

TEST_CASE("allow values rescue composite moduli the prune would drop") {
  // (125, 145) of base 13 rides a line of slope 34 = 2 * 17, which is kept
  // only when an allow value absorbs it; 34 divides 9826 = 2 * 17^3.
  ProgressionFamily fam = collect_progressions(2, 13, LinePolicy::kFirstLines);
  prune_and_bound(fam);
  CHECK(count_key(fam, Int(34), Int(13), true) == 0);
  CHECK(fam.lower_bound == Rat(293) / Rat(1189));

  prune_and_bound(fam, {Int(9826)});
  CHECK(count_key(fam, Int(34), Int(13), true) == 1);
  CHECK(fam.lower_bound == Rat(5429) / Rat(20213));
  CHECK(Rat(5429) / Rat(20213) > Rat(293) / Rat(1189));
  check_against_window(fam);
}

TEST_CASE("every base keeps the trivial fixed point on a certified line") {
  ProgressionFamily fam = collect_progressions(1, 20, LinePolicy::kFirstLines);
  CHECK(fam.collected_pairs >= 19);
  // The line through the fixed point 1 of base b has slope b^2 + 1.
  bool found = false;
  for (const auto& ap : fam.progressions) {
    if (ap.source_base == 2 && ap.source_cycle.min_member() == 1) {
      CHECK(ap.modulus == 5);
      CHECK(ap.residue == 2);
      found = true;
    }
  }
  CHECK(found);

  prune_and_bound(fam);
  CHECK(fam.bounded);
  CHECK(fam.lower_bound > 0);
  CHECK(fam.lower_bound < 1);
  CHECK(!fam.retained.empty());
  check_against_window(fam);
  for (std::size_t idx : fam.retained)
    CHECK(certify_progression(fam.progressions[idx], 1, {Int(1), Int(2)}));
}

TEST_CASE("an allowed progression already implied by its prime parts changes nothing") {
  ProgressionFamily fam = collect_progressions(1, 4, LinePolicy::kFirstLines);
  CHECK(count_key(fam, Int(10), Int(3), false) == 1);

  prune_and_bound(fam);
  CHECK(count_key(fam, Int(10), Int(3), true) == 0);
  CHECK(fam.lower_bound == Rat(61) / Rat(85));

  // b = 3 (mod 10) is the intersection of progressions already retained, so
  // the exact union of the merged group is unchanged.
  prune_and_bound(fam, {Int(10)});
  CHECK(count_key(fam, Int(10), Int(3), true) == 1);
  CHECK(fam.lower_bound == Rat(61) / Rat(85));
  check_against_window(fam);
}

TEST_CASE("second lines join the pool when requested") {
  ProgressionFamily fam = collect_progressions(2, 25, LinePolicy::kFirstAndSecondLines);
  std::size_t seconds = 0;
  bool base8_second = false;
  for (const auto& ap : fam.progressions) {
    if (!ap.second_line) continue;
    ++seconds;
    if (ap.source_base == 8 && ap.modulus == 17 && ap.residue == 8) {
      base8_second = true;
      CHECK(certify_progression(ap, 2, {Int(1), Int(4)}));
    }
  }
  CHECK(seconds == fam.collected_pairs - fam.second_line_failures);
  CHECK(base8_second);

  prune_and_bound(fam);
  check_against_window(fam);
}

TEST_CASE("tampered progressions fail certification") {
  ProgressionFamily fam = collect_progressions(2, 10, LinePolicy::kFirstLines);
  const ArithmeticProgression& good = fam.progressions.front();
  CHECK(certify_progression(good, 2, {Int(1), Int(2)}));
  CHECK(!certify_progression(good, 1, {Int(1)}));

  ArithmeticProgression off = good;
  off.modulus += 1;
  CHECK(!certify_progression(off, 2, {Int(1)}));

  off = good;
  off.residue += 1;
  CHECK(!certify_progression(off, 2, {Int(1)}));
}

TEST_CASE("the exact union respects window counts as the pool grows") {
  ProgressionFamily small = collect_progressions(2, 10, LinePolicy::kFirstLines);
  prune_and_bound(small);
  ProgressionFamily big = collect_progressions(2, 30, LinePolicy::kFirstLines);
  prune_and_bound(big);
  CHECK(big.collected_pairs > small.collected_pairs);
  CHECK(big.lower_bound >= small.lower_bound);
  check_against_window(big);
}

TEST_CASE("malformed requests are rejected") {
  CHECK_THROWS_AS(collect_progressions(0, 10, LinePolicy::kFirstLines), precondition_error);
  CHECK_THROWS_AS(collect_progressions(3, 10, LinePolicy::kFirstAndSecondLines),
                  precondition_error);

  ProgressionFamily fam = collect_progressions(2, 10, LinePolicy::kFirstLines);
  CHECK_THROWS_AS(prune_and_bound(fam, {Int(4), Int(6)}), precondition_error);
  CHECK_THROWS_AS(prune_and_bound(fam, {Int(1)}), precondition_error);

  CensusProvider broken = [](u64 base) {
    BaseClassification c;
    c.base = base;
    c.complete = false;
    return c;
  };
  CHECK_THROWS_AS(collect_progressions(2, 10, LinePolicy::kFirstLines, broken),
                  verification_error);
}

TEST_CASE("a provider serves each base exactly once") {
  std::size_t calls = 0;
  CensusProvider counting = [&calls](u64 base) {
    ++calls;
    return enumerate_cycles(base, 2, {});
  };
  ProgressionFamily fam = collect_progressions(2, 12, LinePolicy::kFirstLines, counting);
  CHECK(calls == 11);
  CHECK(fam.collected_pairs == 5);
}
