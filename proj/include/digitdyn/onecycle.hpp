#pragma once

#include <vector>

#include "digitdyn/integer.hpp"

namespace digitdyn {

// Fixed points of the squared-digit map.  n = x + b*y with digits x, y < b
// is fixed iff x^2 + y^2 = n; divisor pairs of b^2 + 1 classify them.
struct OneCycle {
  u64 n = 0;
  u64 x = 0, y = 0;
};

u64 count_1cycles(u64 base);
std::vector<OneCycle> enumerate_1cycles(u64 base);  // ascending n, includes n = 1

// Pairs every nontrivial fixed point with its partner; an involution
// satisfying n * dual(n) = (b^2 + 1) * x^2.
OneCycle dual_1cycle(u64 base, const OneCycle& c);

struct OneCycleDecomposition {
  u64 n = 0, dual_n = 0;
  // x = g*g', y = g*h, b - y = g'*h', x - 1 = h*h'
  u64 g = 0, g_prime = 0, h = 0, h_prime = 0;
  u64 d = 0;      // gcd(b^2 + 1, n) = n / g^2
  u64 big_d = 0;  // (b^2 + 1) / d = dual_n / g'^2
};
OneCycleDecomposition decompose_1cycle(u64 base, const OneCycle& c);

}  // namespace digitdyn
