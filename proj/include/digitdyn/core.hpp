#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "digitdyn/digit_map.hpp"

namespace digitdyn {

// Little-endian digit expansion; expand(0) is empty so that
// assemble(expand(n)) == n holds for every n >= 0.
std::vector<Int> expand(const Int& n, const Int& base);
Int assemble(const std::vector<Int>& digits, const Int& base);
std::vector<u64> expand_u64(u64 n, u64 base);

// One application of the digitwise dynamical map: sum of map(digit) over the
// base-b digits of n.
Int step(const Int& n, const Int& base, const DigitMap& map);
// Machine-word variant; the caller guarantees the digit-power sum fits, which
// holds whenever (m + 1) * (base - 1)^m does.
u64 step_u64(u64 n, u64 base, unsigned exponent);

// Every value above this bound strictly decreases under the power-map step, so
// all cycle members lie at or below it.  bound = (m - 1) * b^m - 1.
Int scan_ceiling(unsigned exponent, const Int& base);
std::optional<u64> scan_ceiling_u64(unsigned exponent, u64 base);

struct Cycle {
  Int base;
  // Canonical rotation: the minimum member first, then successive images.
  std::vector<Int> members;
  // All members have at most two digits and none is divisible by the base.
  // Computed for square maps, where it gates lifting to larger bases.
  bool propagating = false;

  std::size_t length() const { return members.size(); }
  const Int& min_member() const { return members.front(); }

  friend bool operator==(const Cycle& a, const Cycle& b) {
    return a.base == b.base && a.members == b.members;
  }
};

// Orders cycles of one base by (length, members lexicographically).
bool cycle_less(const Cycle& a, const Cycle& b);

// Validates closure and distinctness, rotates to canonical form, and fills the
// propagating flag when the map is the square map.
Cycle make_cycle(const Int& base, std::vector<Int> members, const DigitMap& map);

bool is_propagating(const Int& base, const std::vector<Int>& members);

struct Orbit {
  Int start;
  Int base;
  std::vector<Int> tail;  // strictly pre-periodic part, starting at `start`
  Cycle cycle;

  std::size_t distinct_count() const { return tail.size() + cycle.members.size(); }
};

Orbit orbit(const Int& start, const Int& base, const DigitMap& map);

}  // namespace digitdyn
