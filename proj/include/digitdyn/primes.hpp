#pragma once

#include <utility>
#include <vector>

#include "digitdyn/integer.hpp"

namespace digitdyn {

// Primes below 1,000,000, computed once.
const std::vector<u32>& small_primes();

// Deterministic for all 64-bit inputs (fixed Miller-Rabin witness set).
bool is_prime_u64(u64 n);

struct PrimalityVerdict {
  bool probable_prime = false;
  // True when the answer carries a proof (64-bit range, or small).  Larger
  // inputs fall back to strong probable-prime testing.
  bool deterministic = false;
};
PrimalityVerdict primality(const Int& n);

// Sorted (prime, multiplicity) pairs; n >= 1.  The factorization is verified
// by multiplying back before returning.
std::vector<std::pair<u64, unsigned>> factor_u64(u64 n);
std::vector<std::pair<Int, unsigned>> factorize(const Int& n);

u64 divisor_count_u64(u64 n);
Int divisor_count(const Int& n);

}  // namespace digitdyn
