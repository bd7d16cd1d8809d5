#include "digitdyn/families.hpp"

#include <algorithm>

#include "digitdyn/primes.hpp"

namespace digitdyn {

namespace {

Int param(const std::map<std::string, Int>& params, const std::string& key, long minimum) {
  auto it = params.find(key);
  if (it == params.end()) throw precondition_error("missing family parameter " + key);
  if (it->second < minimum)
    throw precondition_error("family parameter " + key + " must be >= " + std::to_string(minimum));
  return it->second;
}

void require_params(const std::map<std::string, Int>& params,
                    const std::vector<std::string>& names) {
  if (params.size() != names.size())
    throw precondition_error("family takes exactly " + std::to_string(names.size()) +
                             " parameter(s)");
  for (const auto& n : names)
    if (!params.count(n)) throw precondition_error("missing family parameter " + n);
}

// Digit lists are little endian; every claimed cycle is rebuilt by stepping.
FamilyInstance build(const std::string& id, const std::map<std::string, Int>& params, unsigned m,
                     Int base, std::vector<std::vector<Int>> member_lists) {
  if (base < 2) throw precondition_error("family instance has base below 2");
  FamilyInstance inst;
  inst.id = id;
  inst.params = params;
  inst.exponent = m;
  inst.base = base;
  DigitMap map = DigitMap::power(m);
  for (auto& members : member_lists)
    inst.cycles.push_back(make_cycle(inst.base, std::move(members), map));
  for (std::size_t i = 0; i < inst.cycles.size(); ++i)
    for (std::size_t j = i + 1; j < inst.cycles.size(); ++j)
      if (inst.cycles[i] == inst.cycles[j])
        throw verification_error("family instance repeats a cycle");
  return inst;
}

std::vector<Int> digits_to_members(const Int& base, const std::vector<Int>& digits) {
  for (const Int& d : digits)
    if (sgn(d) < 0 || d >= base) throw precondition_error("family digit out of range");
  return {assemble(digits, base)};
}

Int ipow(const Int& b, const Int& e) { return pow_int(b, to_u64(e)); }

}  // namespace

const std::vector<FamilyInfo>& family_catalog() {
  static const std::vector<FamilyInfo> catalog{
      {"cubic-b3k1", "three cubic fixed points at b = 3k+1 (k >= 1)", {"k"}},
      {"cubic-b3k2", "cubic fixed point at b = 3k+2 (k >= 1)", {"k"}},
      {"cubic-b9k3", "three-digit cubic fixed point at b = 9k+3 (k >= 0)", {"k"}},
      {"cubic-b9k6", "three-digit cubic fixed point at b = 9k+6 (k >= 0)", {"k"}},
      {"cubic-quadratic-base", "cubic fixed point 19710k^3 at b = 9(730k^2 - 1) (k >= 1)", {"k"}},
      {"cubic-square-base", "two cubic fixed points at b = k^2 (k >= 2)", {"k"}},
      {"cubic-square-b3k1", "cubic fixed point at b = (3k+1)^2 (k >= 1)", {"k"}},
      {"cubic-square-b3k2", "cubic fixed point at b = (3k+2)^2 (k >= 1)", {"k"}},
      {"cubic-square-b3k", "four cubic fixed points at b = 9k^2 (k >= 1)", {"k"}},
      {"cubic-curve1", "cubic 2-cycle on b = 9t^2+15t+7 (t >= 0)", {"t"}},
      {"cubic-curve2", "cubic 2-cycle on b = 9t^2+21t+13 (t >= 0)", {"t"}},
      {"power-zero", "fixed point c^m at b = c^(m-1) (c >= 2, m >= 3)", {"c", "m"}},
      {"power-one", "fixed point 1 + c^m at b = c^(m-1) (c >= 2, m >= 3)", {"c", "m"}},
      {"power-double", "fixed point 2c^m at b = 2c^(m-1) - 1 (c >= 2, m >= 2)", {"c", "m"}},
      {"power-adjacent-down",
       "fixed point c^m + (c-1)^m with digits (c, c-1) (c >= 2, m >= 2)",
       {"c", "m"}},
      {"power-adjacent-up",
       "fixed point c^m + (c+1)^m with digits (c, c+1) (c >= 1, odd m >= 3)",
       {"c", "m"}},
      {"power-tower",
       "cycle c^m, c^(m^2), ..., c^(m^l) at b = c^(m^l - 1) (c >= 2, m >= 2, l >= 1)",
       {"c", "m", "l"}},
      {"power-order",
       "cycle of prime-power digits at b = c^p, length = order of m mod p (c >= 2, m >= 2, "
       "prime p not dividing m)",
       {"c", "m", "p"}},
      {"square-coprime-tower",
       "squared-digit cycle g, g^2, ..., g^(2^(l-1)) with g = a^2 + e^2 at b = (g^(2^(l-1)) - "
       "a)/e (coprime a, e >= 1, l >= 1)",
       {"a", "e", "l"}},
  };
  return catalog;
}

FamilyInstance instantiate_family(const std::string& id,
                                  const std::map<std::string, Int>& params) {
  auto cat = std::find_if(family_catalog().begin(), family_catalog().end(),
                          [&](const FamilyInfo& f) { return f.id == id; });
  if (cat == family_catalog().end()) throw precondition_error("unknown family " + id);
  require_params(params, cat->param_names);

  if (id == "cubic-b3k1") {
    Int k = param(params, "k", 1), b = 3 * k + 1;
    return build(id, params, 3, b,
                 {digits_to_members(b, {2 * k + 1, Int(0), k + 1}),
                  digits_to_members(b, {Int(0), 2 * k + 1, k}),
                  digits_to_members(b, {Int(1), 2 * k + 1, k})});
  }
  if (id == "cubic-b3k2") {
    Int k = param(params, "k", 1), b = 3 * k + 2;
    return build(id, params, 3, b, {digits_to_members(b, {2 * k + 1, Int(0), k})});
  }
  if (id == "cubic-b9k3") {
    Int k = param(params, "k", 0), b = 9 * k + 3;
    return build(id, params, 3, b, {digits_to_members(b, {6 * k + 2, 4 * k + 2, 5 * k + 1})});
  }
  if (id == "cubic-b9k6") {
    Int k = param(params, "k", 0), b = 9 * k + 6;
    return build(id, params, 3, b, {digits_to_members(b, {6 * k + 4, 2 * k + 1, 7 * k + 5})});
  }
  if (id == "cubic-quadratic-base") {
    Int k = param(params, "k", 1), b = 9 * (730 * k * k - 1);
    return build(id, params, 3, b, {digits_to_members(b, {27 * k, 3 * k})});
  }
  if (id == "cubic-square-base") {
    Int k = param(params, "k", 2), b = k * k;
    return build(id, params, 3, b,
                 {digits_to_members(b, {Int(0), k}), digits_to_members(b, {Int(1), k})});
  }
  if (id == "cubic-square-b3k1") {
    Int k = param(params, "k", 1), b = (3 * k + 1) * (3 * k + 1);
    return build(id, params, 3, b, {digits_to_members(b, {2 * k + 1, k + 1})});
  }
  if (id == "cubic-square-b3k2") {
    Int k = param(params, "k", 1), b = (3 * k + 2) * (3 * k + 2);
    return build(id, params, 3, b, {digits_to_members(b, {2 * k + 1, k})});
  }
  if (id == "cubic-square-b3k") {
    Int k = param(params, "k", 1), b = 9 * k * k;
    Int k2 = k * k;
    return build(id, params, 3, b,
                 {digits_to_members(b, {Int(0), 6 * k2 + k, 3 * k2 + 2 * k}),
                  digits_to_members(b, {Int(1), 6 * k2 + k, 3 * k2 + 2 * k}),
                  digits_to_members(b, {Int(0), 6 * k2 - k, 3 * k2 - 2 * k}),
                  digits_to_members(b, {Int(1), 6 * k2 - k, 3 * k2 - 2 * k})});
  }
  if (id == "cubic-curve1") {
    Int t = param(params, "t", 0), b = 9 * t * t + 15 * t + 7;
    Int n1 = (2 * t + 2) + b * t, n2 = (2 * t + 1) + b * (t + 1);
    return build(id, params, 3, b, {{n1, n2}});
  }
  if (id == "cubic-curve2") {
    Int t = param(params, "t", 0), b = 9 * t * t + 21 * t + 13;
    Int n1 = (2 * t + 3) + b * (t + 1), n2 = (2 * t + 2) + b * (t + 2);
    return build(id, params, 3, b, {{n1, n2}});
  }
  if (id == "power-zero" || id == "power-one") {
    Int c = param(params, "c", 2), m = param(params, "m", 3);
    Int b = ipow(c, m - 1);
    Int n = ipow(c, m) + (id == "power-one" ? 1 : 0);
    return build(id, params, static_cast<unsigned>(to_u64(m)), b, {{n}});
  }
  if (id == "power-double") {
    Int c = param(params, "c", 2), m = param(params, "m", 2);
    Int b = 2 * ipow(c, m - 1) - 1;
    return build(id, params, static_cast<unsigned>(to_u64(m)), b, {{2 * ipow(c, m)}});
  }
  if (id == "power-adjacent-down") {
    Int c = param(params, "c", 2), m = param(params, "m", 2);
    Int b = c * ((ipow(c, m - 1) - 1) / (c - 1)) + ipow(c - 1, m - 1);
    return build(id, params, static_cast<unsigned>(to_u64(m)), b, {{ipow(c, m) + ipow(c - 1, m)}});
  }
  if (id == "power-adjacent-up") {
    Int c = param(params, "c", 1), m = param(params, "m", 3);
    if (mpz_even_p(m.get_mpz_t())) throw precondition_error("exponent must be odd here");
    Int num = ipow(c, m - 1) - 1;
    if (!mpz_divisible_p(num.get_mpz_t(), Int(c + 1).get_mpz_t()))
      throw precondition_error("closed form is not integral");
    Int b = c * (num / (c + 1)) + ipow(c + 1, m - 1);
    return build(id, params, static_cast<unsigned>(to_u64(m)), b, {{ipow(c, m) + ipow(c + 1, m)}});
  }
  if (id == "power-tower") {
    Int c = param(params, "c", 2), m = param(params, "m", 2), l = param(params, "l", 1);
    if (ipow(m, l) < 3) throw precondition_error("tower needs m^l >= 3 so the top digit fits");
    Int b = ipow(c, ipow(m, l) - 1);
    std::vector<Int> members;
    Int e = m;
    for (Int j = 1; j <= l; ++j) {
      members.push_back(ipow(c, e));
      e *= m;
    }
    return build(id, params, static_cast<unsigned>(to_u64(m)), b, {members});
  }
  if (id == "power-order") {
    Int c = param(params, "c", 2), m = param(params, "m", 2), p = param(params, "p", 2);
    if (!is_prime_u64(to_u64(p))) throw precondition_error("p must be prime");
    if (mpz_divisible_p(m.get_mpz_t(), p.get_mpz_t()))
      throw precondition_error("p must not divide m");
    u64 pu = to_u64(p), mu = to_u64(m) % pu;
    u64 order = 1, acc = mu % pu;
    while (acc != 1 % pu) {
      acc = acc * mu % pu;
      ++order;
      if (order > pu) throw verification_error("order computation ran past p");
    }
    Int b = ipow(c, p);
    std::vector<Int> members;
    u64 r = 1;
    for (u64 k = 1; k <= order; ++k) {
      members.push_back(pow_int(c, to_u64(m) * r));
      r = r * mu % pu;
    }
    return build(id, params, static_cast<unsigned>(to_u64(m)), b, {members});
  }
  if (id == "square-coprime-tower") {
    Int a = param(params, "a", 1), e = param(params, "e", 1), l = param(params, "l", 1);
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t());
    if (g != 1) throw precondition_error("a and e must be coprime");
    Int gamma = a * a + e * e;
    Int top = ipow(gamma, ipow(Int(2), l - 1));
    if (!mpz_divisible_p(Int(top - a).get_mpz_t(), e.get_mpz_t()))
      throw precondition_error("closed form is not integral");
    Int b = (top - a) / e;
    // The top member carries digits (a, e); everything below it is one digit.
    if (a >= b || e >= b) throw precondition_error("digit pair does not fit the base");
    if (l >= 2 && ipow(gamma, ipow(Int(2), l - 2)) >= b)
      throw precondition_error("intermediate member does not fit one digit");
    std::vector<Int> members;
    Int v = gamma;
    for (Int j = 0; j < l; ++j) {
      members.push_back(v);
      v = v * v;
    }
    FamilyInstance inst = build(id, params, 2, b, {members});
    if (!inst.cycles.front().propagating)
      throw verification_error("coprime tower cycle failed to be propagating");
    return inst;
  }
  throw precondition_error("unknown family " + id);
}

std::vector<FamilyInstance> sweep_family(const std::string& id, const Int& limit) {
  auto cat = std::find_if(family_catalog().begin(), family_catalog().end(),
                          [&](const FamilyInfo& f) { return f.id == id; });
  if (cat == family_catalog().end()) throw precondition_error("unknown family " + id);

  std::vector<std::map<std::string, Int>> grids;
  u64 lim = to_u64(limit);
  auto push_main = [&](const std::string& key, u64 lo,
                       std::map<std::string, Int> extra = {}) {
    for (u64 v = lo; v <= lim; ++v) {
      extra[key] = from_u64(v);
      grids.push_back(extra);
    }
  };

  if (cat->param_names == std::vector<std::string>{"k"}) {
    push_main("k", 0);
  } else if (cat->param_names == std::vector<std::string>{"t"}) {
    push_main("t", 0);
  } else if (cat->param_names == std::vector<std::string>{"c", "m"}) {
    for (long m : {2, 3, 4, 5}) push_main("c", 1, {{"m", Int(m)}});
  } else if (id == "power-tower") {
    for (long m : {2, 3})
      for (long l : {1, 2, 3}) push_main("c", 2, {{"m", Int(m)}, {"l", Int(l)}});
  } else if (id == "power-order") {
    for (long m : {2, 3, 5})
      for (long p : {2, 3, 5, 7}) push_main("c", 2, {{"m", Int(m)}, {"p", Int(p)}});
  } else if (id == "square-coprime-tower") {
    for (long e = 1; e <= 6; ++e)
      for (long l : {1, 2, 3}) push_main("a", 1, {{"e", Int(e)}, {"l", Int(l)}});
  }

  std::vector<FamilyInstance> out;
  for (const auto& g : grids) {
    try {
      out.push_back(instantiate_family(id, g));
    } catch (const precondition_error&) {
      // Parameter combination outside the family's validity conditions.
    }
  }
  return out;
}

Int digit_congruence_modulus(unsigned exponent, const Int& base) {
  if (exponent < 2) throw precondition_error("exponent must be >= 2");
  if (base < 2) throw precondition_error("base must be >= 2");
  Int n = 1;
  unsigned m1 = exponent - 1;
  for (unsigned p = 2; p <= exponent; ++p) {
    if (!is_prime_u64(p) || m1 % (p - 1) != 0) continue;
    if (Int(p) <= base - 1) {
      n *= p;
    } else {
      unsigned v = 0, rest = m1;
      while (rest % p == 0) {
        rest /= p;
        ++v;
      }
      n *= pow_int(Int(p), v + 1);
    }
  }
  return n;
}

Int min_cycle_bound(unsigned exponent, const Int& base) {
  Int g, b1 = base - 1;
  Int n = digit_congruence_modulus(exponent, base);
  mpz_gcd(g.get_mpz_t(), b1.get_mpz_t(), n.get_mpz_t());
  return g;
}

CongruenceCertificate congruence_certificate(const DigitMap& map, const Int& base, const Int& a) {
  if (a < 1) throw precondition_error("modulus must be >= 1");
  if (!mpz_divisible_p(Int(base - 1).get_mpz_t(), a.get_mpz_t()))
    throw precondition_error("modulus must divide base - 1");
  u64 au = to_u64(a);
  if (map.is_power()) {
    for (u64 r = 0; r < au; ++r) {
      Int lhs = pow_int(from_u64(r), map.exponent()) % a;
      if (lhs != from_u64(r) % a)
        throw precondition_error("digit map is not the identity mod " + a.get_str());
    }
  } else {
    u64 bu = to_u64(base);
    for (u64 d = 0; d < bu; ++d) {
      Int diff = map.apply(from_u64(d)) - from_u64(d);
      if (!mpz_divisible_p(diff.get_mpz_t(), a.get_mpz_t()))
        throw precondition_error("digit map is not the identity mod " + a.get_str());
    }
  }
  CongruenceCertificate cert;
  cert.modulus = a;
  for (u64 i = 1; i <= au; ++i) {
    Orbit o = orbit(from_u64(i), base, map);
    for (const Int& mbr : o.cycle.members)
      if (mbr % a != from_u64(i) % a)
        throw verification_error("cycle left its residue class mod " + a.get_str());
    cert.cycles.push_back(o.cycle);
  }
  for (std::size_t i = 0; i < cert.cycles.size(); ++i)
    for (std::size_t j = i + 1; j < cert.cycles.size(); ++j)
      if (cert.cycles[i] == cert.cycles[j])
        throw verification_error("residue-class cycles are not distinct");
  return cert;
}

std::vector<Cycle> five_cycles(const Int& k) {
  if (k < 1) throw precondition_error("k must be >= 1");
  Int b = 3 * k + 1;
  DigitMap cubes = DigitMap::power(3);
  std::vector<Cycle> out;
  out.push_back(make_cycle(b, {Int(1)}, cubes));
  Orbit three = orbit(Int(3), b, cubes);
  for (const Int& m : three.cycle.members)
    if (m % 3 != 0) throw verification_error("orbit of 3 left the 0 class mod 3");
  out.push_back(three.cycle);
  FamilyInstance fam = instantiate_family("cubic-b3k1", {{"k", k}});
  for (const Cycle& c : fam.cycles) out.push_back(c);
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j)
      if (out[i] == out[j]) throw verification_error("the five cycles are not distinct");
  return out;
}

}  // namespace digitdyn
