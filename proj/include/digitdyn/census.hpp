#pragma once

#include <functional>
#include <optional>

#include "digitdyn/core.hpp"

namespace digitdyn {

enum class ScanAction { kContinue, kStop };

struct BaseClassification {
  u64 base = 0;
  unsigned exponent = 2;
  u64 scan_bound = 0;
  // True when every n in [1, scan ceiling] was classified, so `cycles` is the
  // complete cycle set for this base and exponent.
  bool complete = false;
  u64 steps = 0;
  std::vector<Cycle> cycles;  // sorted by (length, members) once the scan ends

  std::size_t count_of_length(std::size_t len) const;
  std::size_t propagating_count(std::size_t len) const;
  std::size_t max_cycle_length() const;
};

struct CensusOptions {
  // Scan limit override; clamped to the scan ceiling.  Anything below the
  // ceiling makes the result incomplete (complete == false).
  std::optional<u64> scan_bound;
  // Largest classification array, in entries, before falling back to a hash
  // map.  4 bytes per entry when dense.
  u64 dense_cache_threshold = u64{1} << 31;
  // Cycles known before the scan starts (e.g. from a lifting certificate).
  // They are verified, registered first, and deduplicated against finds.
  std::vector<Cycle> seeds;
  // Invoked after each cycle is registered; kStop abandons the scan with
  // complete == false.  Cycles arrive in discovery order during the scan.
  std::function<ScanAction(const BaseClassification&, const Cycle&)> on_cycle;
};

// Classifies every n in [1, scan bound] by the cycle its orbit reaches,
// collecting the full cycle set of the base.  Values above the bound strictly
// decrease, so they are transient; walks passing through them are memoized
// separately.
BaseClassification enumerate_cycles(u64 base, unsigned exponent,
                                    const CensusOptions& opts = {});

}  // namespace digitdyn
