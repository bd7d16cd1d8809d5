#include "digitdyn/census.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace digitdyn {

namespace {

constexpr u32 kUnseen = 0;
constexpr u32 kBusy = 0xFFFFFFFFu;

struct DenseCache {
  std::vector<u32> slots;
  explicit DenseCache(u64 bound) : slots(bound + 1, kUnseen) {}
  u32 get(u64 n) const { return slots[n]; }
  void set(u64 n, u32 id) { slots[n] = id; }
};

struct SparseCache {
  std::unordered_map<u64, u32> slots;
  explicit SparseCache(u64) {}
  u32 get(u64 n) const {
    auto it = slots.find(n);
    return it == slots.end() ? kUnseen : it->second;
  }
  void set(u64 n, u32 id) { slots[n] = id; }
};

// Registers a verified canonical cycle, marks its members, and runs the
// callback.  Returns kStop if the caller should abandon the scan.
template <class Mark>
ScanAction register_cycle(BaseClassification& out, std::vector<Int> members,
                          const DigitMap& map, const Mark& mark,
                          const CensusOptions& opts, u32* id_out) {
  Cycle c = make_cycle(Int(static_cast<unsigned long>(out.base)), std::move(members), map);
  for (std::size_t i = 0; i < out.cycles.size(); ++i) {
    if (out.cycles[i] == c) {
      *id_out = static_cast<u32>(i + 1);
      return ScanAction::kContinue;
    }
  }
  out.cycles.push_back(std::move(c));
  u32 id = static_cast<u32>(out.cycles.size());
  if (id >= kBusy) throw resource_error("cycle id space exhausted");
  *id_out = id;
  for (const Int& m : out.cycles.back().members) mark(m, id);
  if (opts.on_cycle) return opts.on_cycle(out, out.cycles.back());
  return ScanAction::kContinue;
}

template <class Cache>
bool scan_u64(BaseClassification& out, u64 bound, const DigitMap& map,
              const CensusOptions& opts) {
  Cache cache(bound);
  std::unordered_map<u64, u32> overflow;

  auto get = [&](u64 v) -> u32 {
    if (v <= bound) return cache.get(v);
    auto it = overflow.find(v);
    return it == overflow.end() ? kUnseen : it->second;
  };
  auto set = [&](u64 v, u32 id) {
    if (v <= bound)
      cache.set(v, id);
    else
      overflow[v] = id;
  };
  auto mark = [&](const Int& v, u32 id) {
    if (fits_u64(v)) set(to_u64(v), id);
  };

  for (const Cycle& seed : opts.seeds) {
    std::vector<Int> members = seed.members;
    u32 id = 0;
    if (register_cycle(out, std::move(members), map, mark, opts, &id) == ScanAction::kStop)
      return false;
  }

  std::vector<u64> path;
  for (u64 n = 1; n <= bound; ++n) {
    if (cache.get(n) != kUnseen) continue;
    path.clear();
    u64 cur = n;
    u32 resolved = 0;
    for (;;) {
      u32 c = get(cur);
      if (c == kUnseen) {
        set(cur, kBusy);
        path.push_back(cur);
        cur = step_u64(cur, out.base, out.exponent);
        ++out.steps;
      } else if (c == kBusy) {
        std::size_t pos = path.size() - 1;
        while (path[pos] != cur) --pos;
        std::vector<Int> members;
        members.reserve(path.size() - pos);
        for (std::size_t i = pos; i < path.size(); ++i) members.push_back(from_u64(path[i]));
        ScanAction act = register_cycle(out, std::move(members), map, mark, opts, &resolved);
        for (u64 v : path) set(v, resolved);
        if (act == ScanAction::kStop) return false;
        break;
      } else {
        resolved = c;
        for (u64 v : path) set(v, resolved);
        break;
      }
    }
  }
  return true;
}

// Fallback for scans whose walk values may not fit in 64 bits.  Start points
// still do (the explicit bound is a u64); only transients can outgrow it.
bool scan_big(BaseClassification& out, u64 bound, const DigitMap& map,
              const CensusOptions& opts) {
  Int base = from_u64(out.base);
  SparseCache cache(bound);
  std::map<Int, u32> overflow;
  Int bound_z = from_u64(bound);

  auto get = [&](const Int& v) -> u32 {
    if (v <= bound_z) return cache.get(to_u64(v));
    auto it = overflow.find(v);
    return it == overflow.end() ? kUnseen : it->second;
  };
  auto set = [&](const Int& v, u32 id) {
    if (v <= bound_z)
      cache.set(to_u64(v), id);
    else
      overflow[v] = id;
  };

  for (const Cycle& seed : opts.seeds) {
    std::vector<Int> members = seed.members;
    u32 id = 0;
    if (register_cycle(out, std::move(members), map, set, opts, &id) == ScanAction::kStop)
      return false;
  }

  std::vector<Int> path;
  for (u64 n = 1; n <= bound; ++n) {
    if (cache.get(n) != kUnseen) continue;
    path.clear();
    Int cur = from_u64(n);
    u32 resolved = 0;
    for (;;) {
      u32 c = get(cur);
      if (c == kUnseen) {
        set(cur, kBusy);
        path.push_back(cur);
        cur = step(cur, base, map);
        ++out.steps;
      } else if (c == kBusy) {
        std::size_t pos = path.size() - 1;
        while (path[pos] != cur) --pos;
        std::vector<Int> members(path.begin() + static_cast<std::ptrdiff_t>(pos), path.end());
        ScanAction act = register_cycle(out, std::move(members), map, set, opts, &resolved);
        for (const Int& v : path) set(v, resolved);
        if (act == ScanAction::kStop) return false;
        break;
      } else {
        resolved = c;
        for (const Int& v : path) set(v, resolved);
        break;
      }
    }
  }
  return true;
}

}  // namespace

std::size_t BaseClassification::count_of_length(std::size_t len) const {
  std::size_t k = 0;
  for (const Cycle& c : cycles) k += c.length() == len;
  return k;
}

std::size_t BaseClassification::propagating_count(std::size_t len) const {
  std::size_t k = 0;
  for (const Cycle& c : cycles) k += c.length() == len && c.propagating;
  return k;
}

std::size_t BaseClassification::max_cycle_length() const {
  std::size_t k = 0;
  for (const Cycle& c : cycles) k = std::max(k, c.length());
  return k;
}

BaseClassification enumerate_cycles(u64 base, unsigned exponent, const CensusOptions& opts) {
  if (base < 2) throw precondition_error("enumerate_cycles: base must be >= 2");
  DigitMap map = DigitMap::power(exponent);

  BaseClassification out;
  out.base = base;
  out.exponent = exponent;

  std::optional<u64> ceiling = scan_ceiling_u64(exponent, base);
  u64 bound;
  bool reaches_ceiling;
  if (ceiling) {
    bound = opts.scan_bound ? std::min(*opts.scan_bound, *ceiling) : *ceiling;
    reaches_ceiling = bound == *ceiling;
  } else {
    if (!opts.scan_bound)
      throw resource_error("scan ceiling exceeds 64 bits; an explicit scan bound is required");
    bound = *opts.scan_bound;
    reaches_ceiling = false;
  }
  out.scan_bound = bound;

  // Walk values reach (m+1)(b-1)^m, a shade above the ceiling; the machine-word
  // scan is only safe when that, too, fits.
  bool words_ok = false;
  if (ceiling) {
    Int walk_max = pow_int(from_u64(base) - 1, exponent) * (exponent + 1);
    words_ok = fits_u64(walk_max);
  }

  bool ran_out;
  if (!words_ok) {
    ran_out = !scan_big(out, bound, map, opts);
  } else if (bound + 1 <= opts.dense_cache_threshold && bound != UINT64_MAX) {
    ran_out = !scan_u64<DenseCache>(out, bound, map, opts);
  } else {
    ran_out = !scan_u64<SparseCache>(out, bound, map, opts);
  }
  out.complete = reaches_ceiling && !ran_out;
  std::sort(out.cycles.begin(), out.cycles.end(), cycle_less);
  return out;
}

}  // namespace digitdyn
