#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace digitdyn {

using Int = mpz_class;
using Rat = mpq_class;
using u64 = std::uint64_t;
using u32 = std::uint32_t;

// Library-wide error hierarchy.  Callers that violate documented preconditions
// get precondition_error; verification_error means a value that was supposed to
// be certified failed its check; not_certified_error is an honest "cannot
// decide within configured effort" outcome, not a wrong answer.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct precondition_error : error {
  using error::error;
};
struct verification_error : error {
  using error::error;
};
struct not_certified_error : error {
  using error::error;
};
struct resource_error : error {
  using error::error;
};
struct checkpoint_error : error {
  using error::error;
};

inline bool fits_u64(const Int& n) {
  return sgn(n) >= 0 && mpz_sizeinbase(n.get_mpz_t(), 2) <= 64;
}

inline u64 to_u64(const Int& n) {
  if (!fits_u64(n)) throw precondition_error("value does not fit in 64 bits: " + n.get_str());
  u64 lo = mpz_getlimbn(n.get_mpz_t(), 0);
  return mpz_size(n.get_mpz_t()) == 0 ? 0 : lo;
}

inline Int from_u64(u64 v) {
  Int n;
  mpz_import(n.get_mpz_t(), 1, -1, sizeof v, 0, 0, &v);
  return n;
}

inline Int isqrt(const Int& n) {
  if (sgn(n) < 0) throw precondition_error("isqrt of negative value");
  Int r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

inline bool is_square(const Int& n, Int* root = nullptr) {
  if (sgn(n) < 0) return false;
  if (!mpz_perfect_square_p(n.get_mpz_t())) return false;
  if (root) mpz_sqrt(root->get_mpz_t(), n.get_mpz_t());
  return true;
}

inline u64 isqrt_u64(u64 n) {
  if (n == 0) return 0;
  u64 r = static_cast<u64>(__builtin_sqrt(static_cast<double>(n)));
  while (r > 0 && r > n / r) --r;
  while (r + 1 <= n / (r + 1)) ++r;
  return r;
}

inline bool is_square_u64(u64 n, u64* root = nullptr) {
  u64 r = isqrt_u64(n);
  if (r * r != n) return false;
  if (root) *root = r;
  return true;
}

inline Int pow_int(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

// Checked n^e for the scan fast path; nullopt on 64-bit overflow.
inline bool checked_pow_u64(u64 base, unsigned e, u64* out) {
  u64 acc = 1;
  for (unsigned i = 0; i < e; ++i) {
    if (base != 0 && acc > UINT64_MAX / base) return false;
    acc *= base;
  }
  *out = acc;
  return true;
}

inline u64 mulmod_u64(u64 a, u64 b, u64 m) {
  return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % m);
}

inline u64 powmod_u64(u64 a, u64 e, u64 m) {
  u64 r = m > 1 ? 1 % m : 0;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, m);
    a = mulmod_u64(a, a, m);
    e >>= 1;
  }
  return r;
}

// Fixed-precision decimal rendering of a nonnegative rational, truncated
// toward zero ("0.5457" style).  digits == 0 renders the integer part only.
inline std::string decimal_floor(const Rat& q, unsigned digits) {
  if (sgn(q) < 0) throw precondition_error("decimal_floor of negative rational");
  Int num = q.get_num(), den = q.get_den();
  Int whole = num / den, rem = num % den;
  std::string out = whole.get_str();
  if (digits == 0) return out;
  out += '.';
  for (unsigned i = 0; i < digits; ++i) {
    rem *= 10;
    Int d = rem / den;
    rem %= den;
    out += static_cast<char>('0' + d.get_ui());
  }
  return out;
}

}  // namespace digitdyn
