#pragma once

#include <functional>

#include "digitdyn/census.hpp"
#include "digitdyn/lines.hpp"

namespace digitdyn {

// A progression of bases b = residue (mod modulus) all of which carry a cycle
// of the family's length, witnessed by a verified line.
struct ArithmeticProgression {
  Int modulus;
  Int residue;
  Int source_base;
  Cycle source_cycle;
  IntegerLine line;
  bool second_line = false;
  bool certified = false;
};

struct ProgressionGroup {
  Int modulus;                       // lcm of member moduli
  std::vector<std::size_t> members;  // indices into ProgressionFamily::progressions
  Rat covered;                       // exact density of the union within the group
};

enum class LinePolicy { kFirstLines, kFirstAndSecondLines };

struct ProgressionFamily {
  std::size_t cycle_length = 1;
  u64 max_base = 0;
  LinePolicy policy = LinePolicy::kFirstLines;
  std::vector<ArithmeticProgression> progressions;  // one per collected witness
  std::size_t collected_pairs = 0;                  // propagating cycles seen
  std::size_t second_line_failures = 0;             // solver or certificate misses
  std::vector<std::size_t> retained;                // deduped, certified, grouped
  std::vector<ProgressionGroup> groups;
  Rat lower_bound;
  bool bounded = false;
};

using CensusProvider = std::function<BaseClassification(u64)>;

// Walks every base in [2, max_base], extracts its propagating cycles of the
// given length, and records one progression per line witness.  A provider can
// supply cached censuses; by default each base is enumerated on the spot.
ProgressionFamily collect_progressions(std::size_t cycle_length, u64 max_base, LinePolicy policy,
                                       const CensusProvider& provider = {});

// Certifies each progression, deduplicates, keeps prime-power moduli and
// divisors of the allow values, groups them by prime support, and computes
// the exact density lower bound 1 - prod(1 - covered).
void prune_and_bound(ProgressionFamily& family, const std::vector<Int>& allow = {});

// Re-checks one progression from scratch: line identity, slope certificate,
// no degeneration, plus instantiated cycles at the sampled parameters.
bool certify_progression(const ArithmeticProgression& ap, std::size_t cycle_length,
                         const std::vector<Int>& sample_ts);

std::string density_csv(const ProgressionFamily& family);

}  // namespace digitdyn
