#pragma once

#include <utility>
#include <vector>

#include "digitdyn/integer.hpp"

namespace digitdyn {

// A map applied digitwise.  Either a pure power d -> d^m (m >= 2, any base) or
// an explicit value table indexed by digit (usable for bases up to the table
// size).  Values must be nonnegative so iterates stay in the nonnegative cone.
class DigitMap {
 public:
  static DigitMap power(unsigned exponent) {
    if (exponent < 2) throw precondition_error("digit map exponent must be >= 2");
    DigitMap m;
    m.exponent_ = exponent;
    return m;
  }

  static DigitMap table(std::vector<Int> values) {
    if (values.size() < 2) throw precondition_error("digit table needs at least two entries");
    for (const Int& v : values)
      if (sgn(v) < 0) throw precondition_error("digit table values must be nonnegative");
    DigitMap m;
    m.table_ = std::move(values);
    return m;
  }

  bool is_power() const { return exponent_ != 0; }

  unsigned exponent() const {
    if (!is_power()) throw precondition_error("digit map is not a power map");
    return exponent_;
  }

  // Largest base this map can serve (digits run in [0, base)).
  // Power maps work for every base; 0 encodes "unbounded".
  u64 max_base() const { return is_power() ? 0 : table_.size(); }

  Int apply(const Int& digit) const {
    if (sgn(digit) < 0) throw precondition_error("digit must be nonnegative");
    if (is_power()) return pow_int(digit, exponent_);
    u64 d = to_u64(digit);
    if (d >= table_.size()) throw precondition_error("digit outside table range");
    return table_[d];
  }

  const std::vector<Int>& table_values() const {
    if (is_power()) throw precondition_error("digit map is not a table map");
    return table_;
  }

 private:
  DigitMap() = default;
  unsigned exponent_ = 0;
  std::vector<Int> table_;
};

}  // namespace digitdyn
