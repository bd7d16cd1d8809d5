#include "digitdyn/density.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "digitdyn/primes.hpp"

namespace digitdyn {

namespace {

// True exactly when every integer t >= 1 instantiates a genuine cycle: digits
// stay in range because slopes sit in [0, lambda] with points in [0, b0), and
// no two pairs ever coincide at an integer parameter.
bool algebraic_certificate(const IntegerLine& line) {
  check_line_identity(line);
  const Int& lam = line.base_slope;
  if (lam < 1) return false;
  for (std::size_t i = 0; i < line.length(); ++i) {
    const auto& [x, y] = line.point[i];
    const auto& [sx, sy] = line.slope[i];
    if (sgn(x) < 0 || x >= line.base0 || sgn(y) < 0 || y >= line.base0) return false;
    if (sgn(sx) < 0 || sx > lam || sgn(sy) < 0 || sy > lam) return false;
  }
  for (std::size_t i = 0; i < line.length(); ++i) {
    for (std::size_t j = i + 1; j < line.length(); ++j) {
      Int dx = line.point[i].first - line.point[j].first;
      Int dy = line.point[i].second - line.point[j].second;
      Int dsx = line.slope[i].first - line.slope[j].first;
      Int dsy = line.slope[i].second - line.slope[j].second;
      if (sgn(dx) == 0 && sgn(dy) == 0) return false;  // pairs equal at t = 0
      std::optional<Int> tx;                           // coincidence parameter, if any
      if (sgn(dsx) == 0) {
        if (sgn(dx) != 0) continue;  // first coordinates never meet
        if (sgn(dsy) == 0) continue;
        if (!mpz_divisible_p(dy.get_mpz_t(), dsy.get_mpz_t())) continue;
        tx = -dy / dsy;
      } else {
        if (!mpz_divisible_p(dx.get_mpz_t(), dsx.get_mpz_t())) continue;
        Int t = -dx / dsx;
        if (dy + t * dsy != 0) continue;
        tx = t;
      }
      if (*tx >= 1) return false;
    }
  }
  return true;
}

std::optional<std::pair<Int, Int>> combine(const Int& m1, const Int& r1, const Int& m2,
                                           const Int& r2) {
  Int g;
  mpz_gcd(g.get_mpz_t(), m1.get_mpz_t(), m2.get_mpz_t());
  if ((r1 - r2) % g != 0) return std::nullopt;
  return intersect_progressions(m1, r1, m2, r2);
}

std::optional<Int> prime_power_base(const Int& m) {
  if (m < 2) return std::nullopt;
  auto f = factorize(m);
  if (f.size() != 1) return std::nullopt;
  return f.front().first;
}

}  // namespace

ProgressionFamily collect_progressions(std::size_t cycle_length, u64 max_base, LinePolicy policy,
                                       const CensusProvider& provider) {
  if (cycle_length < 1) throw precondition_error("cycle length must be >= 1");
  if (policy == LinePolicy::kFirstAndSecondLines && cycle_length != 2)
    throw precondition_error("second lines exist only for 2-cycles");
  ProgressionFamily fam;
  fam.cycle_length = cycle_length;
  fam.max_base = max_base;
  fam.policy = policy;

  for (u64 b0 = 2; b0 <= max_base; ++b0) {
    BaseClassification census = provider ? provider(b0) : enumerate_cycles(b0, 2, {});
    if (!census.complete) throw verification_error("census incomplete during collection");
    Int b = from_u64(b0);
    for (const Cycle& cyc : census.cycles) {
      if (cyc.length() != cycle_length || !cyc.propagating) continue;
      ++fam.collected_pairs;
      ArithmeticProgression ap;
      ap.line = reduce_line(cycle_line(cyc));
      ap.modulus = ap.line.base_slope;
      ap.residue = b % ap.modulus;
      ap.source_base = b;
      ap.source_cycle = cyc;
      fam.progressions.push_back(ap);

      if (policy == LinePolicy::kFirstAndSecondLines) {
        TwoCyclePoint p{b, cyc.members[0] % b, cyc.members[0] / b, cyc.members[1] % b,
                        cyc.members[1] / b};
        try {
          ArithmeticProgression ap2;
          ap2.line = two_cycle_second_line(p);
          ap2.modulus = ap2.line.base_slope;
          ap2.residue = b % ap2.modulus;
          ap2.source_base = b;
          ap2.source_cycle = cyc;
          ap2.second_line = true;
          fam.progressions.push_back(ap2);
        } catch (const not_certified_error&) {
          ++fam.second_line_failures;
        } catch (const verification_error&) {
          ++fam.second_line_failures;
        }
      }
    }
  }
  return fam;
}

void prune_and_bound(ProgressionFamily& fam, const std::vector<Int>& allow) {
  for (std::size_t i = 0; i < allow.size(); ++i) {
    if (allow[i] < 2) throw precondition_error("allow values must be >= 2");
    for (std::size_t j = i + 1; j < allow.size(); ++j) {
      Int g;
      mpz_gcd(g.get_mpz_t(), allow[i].get_mpz_t(), allow[j].get_mpz_t());
      if (g != 1) throw precondition_error("allow values must be pairwise coprime");
    }
  }

  for (ArithmeticProgression& ap : fam.progressions) {
    ap.certified = algebraic_certificate(ap.line);
    if (!ap.certified) {
      if (!ap.second_line)
        throw verification_error("a cycle line failed its lifting certificate");
      ++fam.second_line_failures;
    }
  }

  // Deduplicate certified progressions by (modulus, residue).
  std::map<std::pair<Int, Int>, std::size_t> first_seen;
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < fam.progressions.size(); ++i) {
    const auto& ap = fam.progressions[i];
    if (!ap.certified) continue;
    auto key = std::make_pair(ap.modulus, ap.residue);
    if (first_seen.emplace(key, i).second) candidates.push_back(i);
  }

  // Group keys: unit modulus, one prime, or one allow value.
  struct GroupKey {
    int kind;  // 0 unit, 1 prime, 2 allow
    Int prime;
    std::size_t allow_idx;
    bool operator<(const GroupKey& o) const {
      if (kind != o.kind) return kind < o.kind;
      if (kind == 1) return prime < o.prime;
      if (kind == 2) return allow_idx < o.allow_idx;
      return false;
    }
  };
  std::map<GroupKey, std::vector<std::size_t>> buckets;
  fam.retained.clear();
  for (std::size_t idx : candidates) {
    const Int& m = fam.progressions[idx].modulus;
    if (m == 1) {
      buckets[{0, Int(0), 0}].push_back(idx);
      fam.retained.push_back(idx);
      continue;
    }
    std::optional<Int> p = prime_power_base(m);
    std::optional<std::size_t> shared;
    for (std::size_t a = 0; a < allow.size(); ++a) {
      Int g;
      mpz_gcd(g.get_mpz_t(), m.get_mpz_t(), allow[a].get_mpz_t());
      if (g != 1) {
        shared = a;
        break;
      }
    }
    bool divides_allow =
        shared.has_value() && mpz_divisible_p(allow[*shared].get_mpz_t(), m.get_mpz_t()) != 0;
    if (divides_allow || (p && shared)) {
      buckets[{2, Int(0), *shared}].push_back(idx);
      fam.retained.push_back(idx);
    } else if (p) {
      buckets[{1, *p, 0}].push_back(idx);
      fam.retained.push_back(idx);
    }
  }

  fam.groups.clear();
  Rat miss = 1;
  for (auto& [key, members] : buckets) {
    ProgressionGroup grp;
    grp.members = members;
    grp.modulus = 1;
    for (std::size_t idx : members)
      mpz_lcm(grp.modulus.get_mpz_t(), grp.modulus.get_mpz_t(),
              fam.progressions[idx].modulus.get_mpz_t());

    if (key.kind == 0) {
      grp.covered = 1;
    } else {
      // Laminar fast path: all member moduli powers of one prime.
      std::optional<Int> common;
      bool laminar = true;
      for (std::size_t idx : members) {
        auto p = prime_power_base(fam.progressions[idx].modulus);
        if (!p || (common && *common != *p)) {
          laminar = false;
          break;
        }
        common = *p;
      }
      if (laminar) {
        Rat sum = 0;
        for (std::size_t i = 0; i < members.size(); ++i) {
          const auto& a = fam.progressions[members[i]];
          bool maximal = true;
          for (std::size_t j = 0; j < members.size() && maximal; ++j) {
            if (i == j) continue;
            const auto& b = fam.progressions[members[j]];
            if (b.modulus < a.modulus && (a.residue - b.residue) % b.modulus == 0)
              maximal = false;
          }
          if (maximal) sum += Rat(1) / Rat(a.modulus);
        }
        grp.covered = sum;
      } else if (fits_u64(grp.modulus) && to_u64(grp.modulus) <= 10'000'000) {
        u64 mod = to_u64(grp.modulus);
        std::vector<char> hit(mod, 0);
        for (std::size_t idx : members) {
          u64 m = to_u64(fam.progressions[idx].modulus);
          u64 r = to_u64(fam.progressions[idx].residue);
          for (u64 v = r; v < mod; v += m) hit[v] = 1;
        }
        u64 cnt = 0;
        for (char c : hit) cnt += c;
        grp.covered = Rat(from_u64(cnt)) / Rat(from_u64(mod));
      } else if (members.size() <= 20) {
        Rat total = 0;
        u64 n = members.size();
        for (u64 mask = 1; mask < (u64{1} << n); ++mask) {
          Int m = 1, r = 0;
          bool ok = true;
          for (u64 bit = 0; bit < n && ok; ++bit) {
            if (!(mask >> bit & 1)) continue;
            const auto& ap = fam.progressions[members[bit]];
            auto c = combine(m, r, ap.modulus, ap.residue);
            if (!c) {
              ok = false;
            } else {
              m = c->first;
              r = c->second;
            }
          }
          if (!ok) continue;
          if (__builtin_popcountll(mask) % 2 == 1)
            total += Rat(1) / Rat(m);
          else
            total -= Rat(1) / Rat(m);
        }
        grp.covered = total;
      } else {
        throw resource_error("group too large for exact union density");
      }
    }
    miss *= 1 - grp.covered;
    fam.groups.push_back(std::move(grp));
  }
  std::sort(fam.retained.begin(), fam.retained.end());
  fam.lower_bound = 1 - miss;
  fam.bounded = true;
}

bool certify_progression(const ArithmeticProgression& ap, std::size_t cycle_length,
                         const std::vector<Int>& sample_ts) {
  if (ap.line.length() != cycle_length) return false;
  if (ap.modulus != ap.line.base_slope) return false;
  if ((ap.line.base0 - ap.residue) % ap.modulus != 0) return false;
  if (!algebraic_certificate(ap.line)) return false;
  for (const Int& t : sample_ts) {
    try {
      Cycle c = lift_cycle(ap.line, t);
      if (c.length() != cycle_length) return false;
      if ((c.base - ap.residue) % ap.modulus != 0) return false;
    } catch (const error&) {
      return false;
    }
  }
  return true;
}

std::string density_csv(const ProgressionFamily& fam) {
  std::set<std::size_t> retained(fam.retained.begin(), fam.retained.end());
  std::ostringstream out;
  out << "modulus,residue,source_base,min_member,cycle_length,second_line,certified,retained\n";
  for (std::size_t i = 0; i < fam.progressions.size(); ++i) {
    const auto& ap = fam.progressions[i];
    out << ap.modulus.get_str() << ',' << ap.residue.get_str() << ','
        << ap.source_base.get_str() << ',' << ap.source_cycle.min_member().get_str() << ','
        << ap.source_cycle.length() << ',' << (ap.second_line ? 1 : 0) << ','
        << (ap.certified ? 1 : 0) << ',' << (retained.count(i) ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace digitdyn
