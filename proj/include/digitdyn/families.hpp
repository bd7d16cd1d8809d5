#pragma once

#include <map>
#include <string>

#include "digitdyn/core.hpp"

namespace digitdyn {

// A parametric family of bases with known cycles.  Instantiation evaluates
// the closed forms and then verifies every claimed cycle by stepping, so a
// returned instance is always genuine.
struct FamilyInstance {
  std::string id;
  std::map<std::string, Int> params;
  unsigned exponent = 2;
  Int base;
  std::vector<Cycle> cycles;
};

struct FamilyInfo {
  std::string id;
  std::string description;
  std::vector<std::string> param_names;  // the first is the sweep parameter
};

const std::vector<FamilyInfo>& family_catalog();

FamilyInstance instantiate_family(const std::string& id,
                                  const std::map<std::string, Int>& params);

// All instances with the sweep parameter up to `limit` (secondary parameters
// run over small built-in ranges).  Instances whose closed forms leave the
// valid range are skipped; instances that fail verification throw.
std::vector<FamilyInstance> sweep_family(const std::string& id, const Int& limit);

// A modulus M with d^m = d (mod M) for every digit d < b, assembled from the
// primes p <= m with p - 1 dividing m - 1.  A prime at or above b contributes
// p^(v+1) where p^v exactly divides m - 1; smaller primes contribute p.
Int digit_congruence_modulus(unsigned exponent, const Int& base);

// gcd(b - 1, digit congruence modulus): the guaranteed number of distinct
// cycles obtained from the residue-class certificate below.
Int min_cycle_bound(unsigned exponent, const Int& base);

// For a | b - 1 with map(d) = d (mod a) on all digits: the orbits of
// 1, ..., a land in cycles that are pairwise distinct because each cycle sits
// in its own residue class mod a.  Everything is verified before returning.
struct CongruenceCertificate {
  Int modulus;
  std::vector<Cycle> cycles;  // cycle reached from i + 1 at index i
};
CongruenceCertificate congruence_certificate(const DigitMap& map, const Int& base, const Int& a);

// The five pairwise-distinct cubic-map cycles guaranteed for b = 3k + 1:
// the fixed points 1 and the three closed-form ones, plus the cycle reached
// from 3.
std::vector<Cycle> five_cycles(const Int& k);

}  // namespace digitdyn
