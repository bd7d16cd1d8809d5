#include "digitdyn/search.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "digitdyn/density.hpp"
#include "digitdyn/primes.hpp"

namespace digitdyn {

namespace {

using nlohmann::ordered_json;

constexpr u64 kFnvOffset = 14695981039346656037ull;
constexpr u64 kFnvPrime = 1099511628211ull;

u64 fnv1a_feed(u64 h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

u64 fnv1a(const std::string& s) { return fnv1a_feed(kFnvOffset, s.data(), s.size()); }

// Chain value for a block: hash of the previous chain value (little endian)
// followed by the block bytes.  Any edit to a committed block, or any
// reordering, breaks every later link.
u64 chain_hash(u64 prev, const std::string& block) {
  unsigned char le[8];
  for (int i = 0; i < 8; ++i) le[i] = static_cast<unsigned char>(prev >> (8 * i));
  return fnv1a_feed(fnv1a_feed(kFnvOffset, le, 8), block.data(), block.size());
}

std::string hex16(u64 v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

const char* kind_name(CampaignKind k) {
  switch (k) {
    case CampaignKind::kExactCycleCount: return "exact-count";
    case CampaignKind::kMaxCycleLength: return "max-length";
    case CampaignKind::kPropagatingExists: return "propagating";
  }
  return "?";
}

const char kMagic[] = "digitdyn-campaign-v1";

// Everything that determines result bytes goes into this line; a checkpoint
// whose line differs was written by a different campaign and is rejected.
std::string params_line(const CampaignSpec& s, bool primality_on, bool lines_on) {
  std::ostringstream os;
  os << "kind=" << kind_name(s.kind) << " exponent=" << s.exponent
     << " parameter=" << s.parameter << " from=" << s.from << " to=" << s.to
     << " shard_size=" << s.shard_size << " prefilter_primality=" << (primality_on ? 1 : 0)
     << " prefilter_lines=" << (lines_on ? 1 : 0);
  if (lines_on) os << " line_library_max_base0=" << s.line_library_max_base0;
  return os.str();
}

struct BaseRecord {
  std::string line;  // one JSON record, newline terminated
  bool hit = false;
  u64 steps = 0;
  bool censused = false;
};

BaseRecord classify_base(const CampaignSpec& spec, u64 base, bool primality_on,
                         bool lines_on, const LineLibrary& lib) {
  ordered_json rec;
  rec["base"] = base;
  BaseRecord out;

  if (primality_on) {
    Int succ = from_u64(base);
    succ = succ * succ + 1;
    auto pr = primality(succ);
    // Only a certified composite may skip the census: b^2 + 1 is never a
    // square, so compositeness forces at least four divisors and hence at
    // least three nontrivial fixed points.
    if (!pr.probable_prime) {
      rec["prefilter"] = "composite-square-successor";
      rec["cycles_min"] = 3;
      rec["hit"] = false;
      out.line = rec.dump() + "\n";
      return out;
    }
  }

  std::vector<Cycle> seeds;
  if (lines_on) {
    seeds = known_line_cycles(base, lib);
    if (1 + seeds.size() > spec.parameter) {
      rec["prefilter"] = "known-cycles";
      rec["cycles_min"] = 1 + seeds.size();
      rec["hit"] = false;
      out.line = rec.dump() + "\n";
      return out;
    }
  }

  CensusOptions opts;
  opts.dense_cache_threshold = spec.dense_cache_threshold;
  opts.seeds = std::move(seeds);
  const u64 target = spec.parameter;
  switch (spec.kind) {
    case CampaignKind::kExactCycleCount:
      opts.on_cycle = [target](const BaseClassification& c, const Cycle&) {
        return c.cycles.size() > target ? ScanAction::kStop : ScanAction::kContinue;
      };
      break;
    case CampaignKind::kMaxCycleLength:
      opts.on_cycle = [target](const BaseClassification&, const Cycle& c) {
        return c.length() > target ? ScanAction::kStop : ScanAction::kContinue;
      };
      break;
    case CampaignKind::kPropagatingExists:
      opts.on_cycle = [target](const BaseClassification&, const Cycle& c) {
        return c.propagating && c.length() == target ? ScanAction::kStop
                                                     : ScanAction::kContinue;
      };
      break;
  }

  BaseClassification census = enumerate_cycles(base, spec.exponent, opts);
  out.censused = true;
  out.steps = census.steps;
  rec["complete"] = census.complete;

  switch (spec.kind) {
    case CampaignKind::kExactCycleCount:
      rec["cycles"] = census.cycles.size();
      out.hit = census.complete && census.cycles.size() == target;
      if (out.hit) {
        std::vector<std::size_t> lengths;
        for (const auto& c : census.cycles) lengths.push_back(c.length());
        rec["lengths"] = lengths;
      }
      break;
    case CampaignKind::kMaxCycleLength:
      rec["max_length"] = census.max_cycle_length();
      out.hit = census.complete && census.max_cycle_length() <= target;
      break;
    case CampaignKind::kPropagatingExists: {
      const Cycle* found = nullptr;
      for (const auto& c : census.cycles)
        if (c.propagating && c.length() == target) found = &c;
      rec["found"] = found != nullptr;
      out.hit = found != nullptr;
      if (found) {
        std::vector<std::string> members;
        for (const auto& m : found->members) members.push_back(m.get_str());
        rec["cycle"] = members;
      }
      break;
    }
  }
  rec["hit"] = out.hit;
  rec["steps"] = census.steps;
  out.line = rec.dump() + "\n";
  return out;
}

struct ResumeState {
  u64 committed_shards = 0;
  u64 chain = 0;
  std::string results;
  std::vector<u64> hits;
  u64 steps = 0;
  u64 scanned = 0;
  u64 skips = 0;
};

// Rebuilds the outcome counters from committed result records.
void absorb_records(ResumeState& st, const std::string& block) {
  std::istringstream in(block);
  std::string line;
  while (std::getline(in, line)) {
    auto rec = nlohmann::json::parse(line);
    if (rec.value("hit", false)) st.hits.push_back(rec.at("base").get<u64>());
    if (rec.contains("complete")) {
      ++st.scanned;
      st.steps += rec.value("steps", u64{0});
    } else {
      ++st.skips;
    }
  }
}

ResumeState load_checkpoint(const std::string& ckpt_path, const std::string& results_path,
                            const std::string& params) {
  ResumeState st;
  st.chain = fnv1a(params);

  std::ifstream in(ckpt_path);
  if (!in) {
    // Fresh start: lay down the header and empty the results file.
    std::ofstream ck(ckpt_path, std::ios::trunc);
    if (!ck) throw checkpoint_error("cannot create checkpoint at " + ckpt_path);
    ck << kMagic << "\n" << params << "\n";
    std::ofstream(results_path, std::ios::trunc);
    return st;
  }

  std::string magic, line;
  if (!std::getline(in, magic) || magic != kMagic)
    throw checkpoint_error("unrecognized checkpoint header in " + ckpt_path);
  if (!std::getline(in, line) || line != params)
    throw checkpoint_error("checkpoint at " + ckpt_path + " belongs to a different campaign");

  struct Record {
    u64 idx, bytes, hash, chain;
  };
  std::vector<Record> records;
  std::vector<std::string> raw;
  bool dropped_tail = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Record r{};
    unsigned long long idx = 0, bytes = 0, hash = 0, chain = 0;
    int got = std::sscanf(line.c_str(), "shard %llu bytes=%llu hash=%llx chain=%llx",
                          &idx, &bytes, &hash, &chain);
    if (got != 4) {
      // A torn final line is the footprint of a crash mid-append; anything
      // malformed earlier means the file was edited.
      if (in.peek() == EOF) {
        dropped_tail = true;
        break;
      }
      throw checkpoint_error("malformed checkpoint record: " + line);
    }
    r.idx = idx;
    r.bytes = bytes;
    r.hash = hash;
    r.chain = chain;
    if (r.idx != records.size())
      throw checkpoint_error("checkpoint records are not consecutive shards");
    records.push_back(r);
    raw.push_back(line);
  }

  std::string results;
  {
    std::ifstream res(results_path, std::ios::binary);
    if (res) {
      std::ostringstream buf;
      buf << res.rdbuf();
      results = buf.str();
    }
  }

  u64 offset = 0;
  for (const auto& r : records) {
    if (offset + r.bytes > results.size())
      throw checkpoint_error("results file is shorter than the checkpoint claims");
    std::string block = results.substr(offset, r.bytes);
    if (fnv1a(block) != r.hash)
      throw checkpoint_error("results block for shard " + std::to_string(r.idx) +
                             " does not match its recorded hash");
    st.chain = chain_hash(st.chain, block);
    if (st.chain != r.chain)
      throw checkpoint_error("checkpoint hash chain breaks at shard " + std::to_string(r.idx));
    absorb_records(st, block);
    offset += r.bytes;
  }
  st.committed_shards = records.size();
  st.results = results.substr(0, offset);

  if (offset < results.size())
    std::filesystem::resize_file(results_path, offset);
  if (dropped_tail) {
    std::ofstream ck(ckpt_path, std::ios::trunc);
    ck << kMagic << "\n" << params << "\n";
    for (const auto& l : raw) ck << l << "\n";
  }
  return st;
}

u64 saturating_add(u64 a, u64 b) { return a > UINT64_MAX - b ? UINT64_MAX : a + b; }

}  // namespace

LineLibrary build_line_library(u64 max_base0) {
  LineLibrary lib;
  for (u64 b0 = 2; b0 <= max_base0; ++b0) {
    BaseClassification census = enumerate_cycles(b0, 2);
    Int base = from_u64(b0);
    for (const Cycle& cyc : census.cycles) {
      if (cyc.length() != 2 || !cyc.propagating) continue;
      auto digits0 = expand(cyc.members[0], base);
      auto digits1 = expand(cyc.members[1], base);
      TwoCyclePoint p;
      p.b = base;
      p.x = digits0[0];
      p.y = digits0.size() > 1 ? digits0[1] : Int(0);
      p.u = digits1[0];
      p.v = digits1.size() > 1 ? digits1[1] : Int(0);
      IntegerLine second;
      try {
        second = two_cycle_second_line(p);
      } catch (const error&) {
        continue;  // no isolated integer direction at this point
      }
      if (gcd(Int(base * base + 1), second.base_slope) != 1) continue;

      ArithmeticProgression ap;
      ap.modulus = second.base_slope;
      ap.residue = second.base0 % second.base_slope;
      ap.source_base = base;
      ap.source_cycle = cyc;
      ap.line = second;
      ap.second_line = true;
      if (!certify_progression(ap, 2, {Int(1), Int(2), Int(3)})) continue;
      lib.entries.push_back({second});
    }
  }
  return lib;
}

std::vector<Cycle> known_line_cycles(u64 base, const LineLibrary& lib) {
  std::vector<Cycle> out;
  Int b = from_u64(base);
  for (const auto& entry : lib.entries) {
    if (b <= entry.line.base0) continue;
    Int diff = b - entry.line.base0;
    if (diff % entry.line.base_slope != 0) continue;
    Cycle cyc = lift_cycle(entry.line, Int(diff / entry.line.base_slope));
    if (std::find(out.begin(), out.end(), cyc) == out.end()) out.push_back(cyc);
  }
  return out;
}

CampaignOutcome run_campaign(const CampaignSpec& spec) {
  if (spec.exponent < 2) throw precondition_error("digit maps need exponent at least 2");
  if (spec.from < 2) throw precondition_error("bases start at 2");
  if (spec.to < spec.from) throw precondition_error("empty base range");
  if (spec.parameter < 1) throw precondition_error("campaign parameter must be positive");
  if (spec.shard_size < 1) throw precondition_error("shard size must be positive");
  if (spec.kind == CampaignKind::kPropagatingExists && spec.exponent != 2)
    throw precondition_error("propagating cycles are defined for the squared-digit map");

  const bool primality_on = spec.primality_prefilter &&
                            spec.kind == CampaignKind::kExactCycleCount &&
                            spec.exponent == 2 && spec.parameter <= 2;
  const bool lines_on = spec.line_prefilter &&
                        spec.kind == CampaignKind::kExactCycleCount && spec.exponent == 2;

  // Budget the run by the sum of scan ceilings; prefilters only ever lower
  // the true cost, so an estimate within budget is safe to start.
  u64 estimate = 0;
  for (u64 b = spec.from;; ++b) {
    auto ceiling = scan_ceiling_u64(spec.exponent, b);
    estimate = ceiling ? saturating_add(estimate, *ceiling) : UINT64_MAX;
    if (estimate > spec.step_budget && !spec.force) {
      std::ostringstream os;
      os << "campaign would cost at least " << estimate
         << " step evaluations, over the budget of " << spec.step_budget
         << "; narrow the range or force";
      throw resource_error(os.str());
    }
    if (b == spec.to) break;
  }

  LineLibrary lib;
  if (lines_on) lib = build_line_library(spec.line_library_max_base0);

  const std::string params = params_line(spec, primality_on, lines_on);
  const u64 total_bases = spec.to - spec.from + 1;
  const u64 total_shards = (total_bases + spec.shard_size - 1) / spec.shard_size;

  const bool checkpointing = !spec.checkpoint_path.empty();
  const std::string results_path = spec.checkpoint_path + ".results.jsonl";
  ResumeState st;
  if (checkpointing) {
    st = load_checkpoint(spec.checkpoint_path, results_path, params);
    if (st.committed_shards > total_shards)
      throw checkpoint_error("checkpoint has more shards than the campaign");
  } else {
    st.chain = fnv1a(params);
  }

  CampaignOutcome out;
  out.hits = std::move(st.hits);
  out.results_jsonl = std::move(st.results);
  out.steps = st.steps;
  out.bases_scanned = st.scanned;
  out.prefilter_skips = st.skips;

  std::ofstream results_out;
  std::ofstream ckpt_out;
  if (checkpointing && st.committed_shards < total_shards) {
    results_out.open(results_path, std::ios::app | std::ios::binary);
    ckpt_out.open(spec.checkpoint_path, std::ios::app);
    if (!results_out || !ckpt_out)
      throw checkpoint_error("cannot append to checkpoint files at " + spec.checkpoint_path);
  }

  struct Block {
    std::string bytes;
    std::vector<u64> hits;
    u64 steps = 0;
    u64 scanned = 0;
    u64 skips = 0;
  };
  std::vector<std::unique_ptr<Block>> slots(total_shards);
  std::mutex mu;
  u64 commit_idx = st.committed_shards;
  u64 chain = st.chain;
  std::exception_ptr failure;
  std::atomic<bool> abort{false};
  std::atomic<u64> next_shard{st.committed_shards};
  std::atomic<u64> claims_this_run{0};

  // Commits are strictly in shard order, so the results stream and the hash
  // chain are byte-identical however many workers ran.
  auto commit_ready = [&]() {
    while (commit_idx < total_shards && slots[commit_idx]) {
      Block& blk = *slots[commit_idx];
      chain = chain_hash(chain, blk.bytes);
      if (checkpointing) {
        results_out << blk.bytes << std::flush;
        ckpt_out << "shard " << commit_idx << " bytes=" << blk.bytes.size()
                 << " hash=" << hex16(fnv1a(blk.bytes)) << " chain=" << hex16(chain)
                 << "\n"
                 << std::flush;
        if (!results_out || !ckpt_out) throw checkpoint_error("checkpoint write failed");
      }
      out.results_jsonl += blk.bytes;
      out.hits.insert(out.hits.end(), blk.hits.begin(), blk.hits.end());
      out.steps += blk.steps;
      out.bases_scanned += blk.scanned;
      out.prefilter_skips += blk.skips;
      slots[commit_idx].reset();
      ++commit_idx;
    }
  };

  auto worker = [&]() {
    for (;;) {
      if (abort.load(std::memory_order_relaxed)) return;
      if (spec.max_shards_this_run &&
          claims_this_run.fetch_add(1) >= spec.max_shards_this_run)
        return;
      u64 idx = next_shard.fetch_add(1);
      if (idx >= total_shards) return;
      auto blk = std::make_unique<Block>();
      u64 lo = spec.from + idx * spec.shard_size;
      u64 hi = std::min(spec.to, lo + (spec.shard_size - 1));
      try {
        for (u64 b = lo; b <= hi; ++b) {
          BaseRecord r = classify_base(spec, b, primality_on, lines_on, lib);
          blk->bytes += r.line;
          if (r.hit) blk->hits.push_back(b);
          blk->steps += r.steps;
          r.censused ? ++blk->scanned : ++blk->skips;
        }
        std::lock_guard<std::mutex> lock(mu);
        slots[idx] = std::move(blk);
        commit_ready();
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        abort.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  unsigned jobs = std::max(1u, spec.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  out.finished = commit_idx == total_shards;
  std::sort(out.hits.begin(), out.hits.end());
  return out;
}

CensusSummary census_summary(const SummaryOptions& opts) {
  if (opts.base < 2) throw precondition_error("bases start at 2");
  if (opts.exponent < 2) throw precondition_error("digit maps need exponent at least 2");

  auto ceiling = scan_ceiling_u64(opts.exponent, opts.base);
  u64 bound;
  if (opts.scan_bound)
    bound = ceiling ? std::min(*opts.scan_bound, *ceiling) : *opts.scan_bound;
  else if (ceiling)
    bound = *ceiling;
  else
    throw resource_error("scan ceiling exceeds 64 bits; pass an explicit scan bound");

  CensusSummary s;
  s.planned_bound = bound;
  u64 entries = saturating_add(bound, 1);
  s.dense = entries <= opts.dense_cache_threshold && bound != UINT64_MAX;
  // Dense storage is one 32-bit id per integer; the hash fallback costs
  // around 48 bytes per occupied slot.
  u64 per_entry = s.dense ? 4 : 48;
  s.estimated_bytes =
      entries > UINT64_MAX / per_entry ? UINT64_MAX : entries * per_entry;

  if (!opts.force) {
    if (bound > opts.step_budget) {
      std::ostringstream os;
      os << "census to " << bound << " exceeds the step budget of " << opts.step_budget
         << "; lower the bound or force";
      throw resource_error(os.str());
    }
    if (s.estimated_bytes > opts.memory_limit_bytes) {
      std::ostringstream os;
      os << "census to " << bound << " needs about " << s.estimated_bytes
         << " bytes, over the limit of " << opts.memory_limit_bytes
         << "; lower the bound, raise the limit, or force";
      throw resource_error(os.str());
    }
  }

  CensusOptions copts;
  copts.scan_bound = opts.scan_bound;
  copts.dense_cache_threshold = opts.dense_cache_threshold;
  s.census = enumerate_cycles(opts.base, opts.exponent, copts);

  if (opts.exponent == 2 && opts.base <= 0xFFFFFFFFull) {
    u64 succ = opts.base * opts.base + 1;
    u64 predicted = divisor_count_u64(succ) - 1;
    s.fixed_point_prediction = predicted;
    if (s.census.complete && s.census.count_of_length(1) != predicted)
      throw verification_error("fixed-point census disagrees with the divisor count");
  }
  return s;
}

}  // namespace digitdyn
