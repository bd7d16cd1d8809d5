#include "digitdyn/core.hpp"

#include <algorithm>
#include <map>

namespace digitdyn {

std::vector<Int> expand(const Int& n, const Int& base) {
  if (sgn(n) < 0) throw precondition_error("expand: value must be nonnegative");
  if (base < 2) throw precondition_error("expand: base must be >= 2");
  std::vector<Int> digits;
  Int rest = n, d;
  while (sgn(rest) > 0) {
    mpz_fdiv_qr(rest.get_mpz_t(), d.get_mpz_t(), rest.get_mpz_t(), base.get_mpz_t());
    digits.push_back(d);
  }
  return digits;
}

Int assemble(const std::vector<Int>& digits, const Int& base) {
  if (base < 2) throw precondition_error("assemble: base must be >= 2");
  Int n = 0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    if (sgn(*it) < 0 || *it >= base) throw precondition_error("assemble: digit out of range");
    n = n * base + *it;
  }
  return n;
}

std::vector<u64> expand_u64(u64 n, u64 base) {
  std::vector<u64> digits;
  while (n > 0) {
    digits.push_back(n % base);
    n /= base;
  }
  return digits;
}

Int step(const Int& n, const Int& base, const DigitMap& map) {
  if (!map.is_power() && base > Int(map.max_base()))
    throw precondition_error("step: base exceeds digit table");
  Int sum = 0, rest = n, d;
  if (sgn(rest) < 0) throw precondition_error("step: value must be nonnegative");
  if (base < 2) throw precondition_error("step: base must be >= 2");
  while (sgn(rest) > 0) {
    mpz_fdiv_qr(rest.get_mpz_t(), d.get_mpz_t(), rest.get_mpz_t(), base.get_mpz_t());
    sum += map.apply(d);
  }
  return sum;
}

u64 step_u64(u64 n, u64 base, unsigned exponent) {
  u64 sum = 0;
  switch (exponent) {
    case 2:
      while (n > 0) {
        u64 d = n % base;
        n /= base;
        sum += d * d;
      }
      return sum;
    case 3:
      while (n > 0) {
        u64 d = n % base;
        n /= base;
        sum += d * d * d;
      }
      return sum;
    default:
      while (n > 0) {
        u64 d = n % base;
        n /= base;
        u64 p = d;
        for (unsigned i = 1; i < exponent; ++i) p *= d;
        sum += p;
      }
      return sum;
  }
}

Int scan_ceiling(unsigned exponent, const Int& base) {
  if (exponent < 2) throw precondition_error("scan_ceiling: exponent must be >= 2");
  if (base < 2) throw precondition_error("scan_ceiling: base must be >= 2");
  return (exponent - 1) * pow_int(base, exponent) - 1;
}

std::optional<u64> scan_ceiling_u64(unsigned exponent, u64 base) {
  u64 p;
  if (!checked_pow_u64(base, exponent, &p)) return std::nullopt;
  u64 m1 = exponent - 1;
  if (p > UINT64_MAX / m1) return std::nullopt;
  return m1 * p - 1;
}

bool is_propagating(const Int& base, const std::vector<Int>& members) {
  Int sq = base * base;
  for (const Int& m : members) {
    if (m >= sq) return false;
    if (mpz_divisible_p(m.get_mpz_t(), base.get_mpz_t())) return false;
  }
  return true;
}

bool cycle_less(const Cycle& a, const Cycle& b) {
  if (a.length() != b.length()) return a.length() < b.length();
  return a.members < b.members;
}

Cycle make_cycle(const Int& base, std::vector<Int> members, const DigitMap& map) {
  if (members.empty()) throw precondition_error("cycle must be nonempty");
  for (std::size_t i = 0; i < members.size(); ++i) {
    const Int& next = members[(i + 1) % members.size()];
    if (step(members[i], base, map) != next)
      throw verification_error("cycle member " + members[i].get_str() +
                               " does not map to " + next.get_str());
  }
  auto lo = std::min_element(members.begin(), members.end());
  if (std::count(members.begin(), members.end(), *lo) != 1)
    throw verification_error("cycle members are not distinct");
  std::rotate(members.begin(), lo, members.end());
  Cycle c;
  c.base = base;
  c.members = std::move(members);
  if (map.is_power() && map.exponent() == 2) c.propagating = is_propagating(base, c.members);
  return c;
}

Orbit orbit(const Int& start, const Int& base, const DigitMap& map) {
  if (start < 1) throw precondition_error("orbit: start must be >= 1");
  std::map<Int, std::size_t> seen;
  std::vector<Int> path;
  Int cur = start;
  for (;;) {
    auto [it, fresh] = seen.emplace(cur, path.size());
    if (!fresh) {
      std::vector<Int> cyc(path.begin() + static_cast<std::ptrdiff_t>(it->second), path.end());
      Orbit o;
      o.start = start;
      o.base = base;
      o.tail.assign(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(it->second));
      o.cycle = make_cycle(base, std::move(cyc), map);
      return o;
    }
    path.push_back(cur);
    cur = step(cur, base, map);
  }
}

}  // namespace digitdyn
