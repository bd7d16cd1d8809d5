#include "digitdyn/onecycle.hpp"

#include <numeric>

#include "digitdyn/primes.hpp"

namespace digitdyn {

namespace {

u64 squared_successor(u64 base) {
  if (base < 2) throw precondition_error("base must be >= 2");
  if (base > 0xFFFFFFFFull) throw precondition_error("base too large for 64-bit b^2 + 1");
  return base * base + 1;
}

}  // namespace

u64 count_1cycles(u64 base) { return divisor_count_u64(squared_successor(base)) - 1; }

std::vector<OneCycle> enumerate_1cycles(u64 base) {
  squared_successor(base);
  std::vector<OneCycle> out;
  for (u64 y = 0; y < base; ++y) {
    u64 disc = 1 + 4 * y * (base - y);
    u64 root;
    if (!is_square_u64(disc, &root)) continue;
    u64 x = (1 + root) / 2;
    if (x >= base) continue;
    out.push_back({x + base * y, x, y});
  }
  // Ascending n: y is the major digit, so the scan order is already sorted.
  return out;
}

OneCycle dual_1cycle(u64 base, const OneCycle& c) {
  squared_successor(base);
  if (c.y == 0) throw precondition_error("dual of the trivial fixed point is undefined");
  if (c.x >= base || c.y >= base || c.x + base * c.y != c.n || c.x * c.x + c.y * c.y != c.n)
    throw precondition_error("not a fixed point of the squared-digit map");
  u64 yd = base - c.y;
  return {c.x + base * yd, c.x, yd};
}

OneCycleDecomposition decompose_1cycle(u64 base, const OneCycle& c) {
  OneCycle partner = dual_1cycle(base, c);
  OneCycleDecomposition d;
  d.n = c.n;
  d.dual_n = partner.n;
  d.g = std::gcd(c.x, c.y);
  d.g_prime = std::gcd(c.x, base - c.y);
  d.h = std::gcd(c.x - 1, c.y);
  d.h_prime = std::gcd(c.x - 1, base - c.y);
  u64 m = squared_successor(base);
  bool ok = c.x == d.g * d.g_prime && c.y == d.g * d.h && base - c.y == d.g_prime * d.h_prime &&
            c.x - 1 == d.h * d.h_prime;
  d.d = c.n / (d.g * d.g);
  d.big_d = d.dual_n / (d.g_prime * d.g_prime);
  ok = ok && c.n % (d.g * d.g) == 0 && d.dual_n % (d.g_prime * d.g_prime) == 0 &&
       d.d * d.big_d == m && std::gcd(m, c.n) == d.d;
  if (!ok) throw verification_error("fixed point failed its divisor decomposition");
  return d;
}

}  // namespace digitdyn
