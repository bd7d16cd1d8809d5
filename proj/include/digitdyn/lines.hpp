#pragma once

#include <utility>

#include "digitdyn/core.hpp"
#include "digitdyn/polyq.hpp"

namespace digitdyn {

// A line of bases-with-digit-pairs: at parameter t the base is
// base0 + base_slope * t and pair i is (point[i] + slope[i] * t).
// Every line here satisfies the cyclic square-map equations
//   x_i(t)^2 + y_i(t)^2 = x_{i+1}(t) + b(t) * y_{i+1}(t)
// identically in t, so integer t with valid digits yield genuine cycles.
struct IntegerLine {
  Int base0;
  Int base_slope;
  std::vector<std::pair<Int, Int>> point;
  std::vector<std::pair<Int, Int>> slope;

  std::size_t length() const { return point.size(); }
};

Int line_base_at(const IntegerLine& line, const Int& t);
std::pair<Int, Int> line_pair_at(const IntegerLine& line, std::size_t i, const Int& t);

// Verifies the defining identity symbolically (coefficient by coefficient).
void check_line_identity(const IntegerLine& line);

// The line through a propagating cycle's digit pairs: base slope b0^2 + 1,
// pair slopes (x*b0 - y, x + y*b0).
IntegerLine cycle_line(const Cycle& cycle);

// Divides the base slope and all pair slopes by their common gcd.
IntegerLine reduce_line(const IntegerLine& line);
bool line_is_reduced(const IntegerLine& line);
Int line_slope_gcd(const IntegerLine& line);

// Instantiates the line at integer t >= 0 and verifies the result is a valid
// cycle in its base (digit ranges, closure, distinct members).
Cycle lift_cycle(const IntegerLine& line, const Int& t);

// Lines through a nontrivial fixed point x0 + b0*y0, both reduced.  Their
// base slopes multiply to b0^2 + 1: `through_partner` has slope
// (b0^2+1)/gcd(b0^2+1, n) and `through_self` has slope gcd(b0^2+1, n).
struct FixedPointLines {
  IntegerLine through_partner;  // raw base slope (x0-1)^2 + y0^2
  IntegerLine through_self;     // raw base slope x0^2 + y0^2
};
FixedPointLines fixed_point_lines(const Int& b0, const Int& x0, const Int& y0);

// A point of the swap variety: (x + b*y, u + b*v) exchanged by the
// squared-digit map, i.e. x^2+y^2 = u + b*v and u^2+v^2 = x + b*y.
struct TwoCyclePoint {
  Int b, x, y, u, v;
};
bool on_two_cycle_variety(const TwoCyclePoint& p);

// The cycle line through a variety point (digit validity not required).
IntegerLine two_cycle_line(const TwoCyclePoint& p);

// The other rational line on the variety through the point, as a primitive
// integer direction.  Exact: candidate directions come from certified
// rational root isolation and are verified symbolically.
IntegerLine two_cycle_second_line(const TwoCyclePoint& p);

// Positivity certificate for the second line's denominator at points with
// nonnegative coordinates and (u, v) != (0, 0).
Int second_line_discriminant(const TwoCyclePoint& p);

// True when gcd(modulus, b^2 + 1) == 1 for every base b in the progression
// residue + modulus * t (equivalently gcd(modulus, residue^2 + 1) == 1).
bool coprime_along_progression(const Int& modulus, const Int& residue);

// CRT intersection of two progressions; returns {lcm, canonical residue}.
std::pair<Int, Int> intersect_progressions(const Int& c0, const Int& d0, const Int& c1,
                                           const Int& d1);

}  // namespace digitdyn
