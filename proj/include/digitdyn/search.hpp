#pragma once

#include <optional>
#include <string>

#include "digitdyn/census.hpp"
#include "digitdyn/lines.hpp"

namespace digitdyn {

// Certified second-line witnesses reusable across bases: lifting one gives a
// known 2-cycle in any base on the line, which seeds or short-circuits scans.
struct LineLibrary {
  struct Entry {
    IntegerLine line;
  };
  std::vector<Entry> entries;
};

// Scans bases up to max_base0 for propagating 2-cycles whose second line is
// certified and whose base slope is coprime to b0^2 + 1.
LineLibrary build_line_library(u64 max_base0);

// Distinct cycles obtained by evaluating library lines at the given base.
std::vector<Cycle> known_line_cycles(u64 base, const LineLibrary& lib);

enum class CampaignKind {
  kExactCycleCount,   // bases whose complete cycle count equals `parameter`
  kMaxCycleLength,    // bases all of whose cycles have length <= `parameter`
  kPropagatingExists  // bases with a propagating cycle of length `parameter`
};

struct CampaignSpec {
  CampaignKind kind = CampaignKind::kExactCycleCount;
  unsigned exponent = 2;
  u64 parameter = 2;
  u64 from = 2;
  u64 to = 2;
  // Skip bases where b^2 + 1 is composite (then at least three fixed points
  // exist).  Sound only for exact-count targets below 3 with the square map;
  // ignored elsewhere.
  bool primality_prefilter = true;
  // Seed censuses with known cycles from certified second lines; an instant
  // miss when the seeds alone already exceed the target count.  Square-map
  // exact-count campaigns only; ignored elsewhere.
  bool line_prefilter = true;
  u64 line_library_max_base0 = 200;
  unsigned jobs = 1;
  u64 shard_size = 64;
  std::string checkpoint_path;  // empty disables checkpointing
  u64 step_budget = 10'000'000'000ull;
  bool force = false;  // override the budget refusal
  u64 dense_cache_threshold = u64{1} << 31;
  u64 max_shards_this_run = 0;  // 0 = unlimited; used to exercise resume
};

struct CampaignOutcome {
  std::vector<u64> hits;        // ascending
  std::string results_jsonl;    // one record per base, byte-deterministic
  u64 bases_scanned = 0;        // censuses actually run
  u64 prefilter_skips = 0;      // bases settled without a census
  u64 steps = 0;                // step evaluations across censuses
  bool finished = true;
};

CampaignOutcome run_campaign(const CampaignSpec& spec);

struct SummaryOptions {
  u64 base = 10;
  unsigned exponent = 2;
  std::optional<u64> scan_bound;
  u64 dense_cache_threshold = u64{1} << 31;
  u64 step_budget = 10'000'000'000ull;
  u64 memory_limit_bytes = u64{4} << 30;
  bool force = false;
};

struct CensusSummary {
  BaseClassification census;
  u64 planned_bound = 0;
  u64 estimated_bytes = 0;
  bool dense = false;
  // For the square map: the fixed-point count predicted by the divisor count
  // of b^2 + 1, cross-checked against the census when it is complete.
  std::optional<u64> fixed_point_prediction;
};

// Plans a census, refuses when the plan exceeds the step budget or the memory
// limit (unless forced), then runs it and cross-checks what can be predicted.
CensusSummary census_summary(const SummaryOptions& opts);

}  // namespace digitdyn
