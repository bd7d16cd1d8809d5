#include "digitdyn/cli.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "digitdyn/census.hpp"
#include "digitdyn/core.hpp"
#include "digitdyn/density.hpp"
#include "digitdyn/families.hpp"
#include "digitdyn/lines.hpp"
#include "digitdyn/onecycle.hpp"
#include "digitdyn/search.hpp"

namespace digitdyn {

namespace {

using nlohmann::ordered_json;

ordered_json json_int(const Int& v) {
  if (v.fits_slong_p()) return v.get_si();
  return v.get_str();
}

ordered_json json_members(const std::vector<Int>& members) {
  ordered_json arr = ordered_json::array();
  for (const auto& m : members) arr.push_back(json_int(m));
  return arr;
}

std::string join_members(const std::vector<Int>& members, const char* sep = " ") {
  std::string s;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i) s += sep;
    s += members[i].get_str();
  }
  return s;
}

ordered_json json_cycle(const Cycle& c) {
  ordered_json j;
  j["length"] = c.members.size();
  j["members"] = json_members(c.members);
  j["propagating"] = c.propagating;
  return j;
}

ordered_json json_line(const IntegerLine& line) {
  ordered_json j;
  j["base0"] = json_int(line.base0);
  j["base_slope"] = json_int(line.base_slope);
  ordered_json pairs = ordered_json::array();
  for (std::size_t i = 0; i < line.length(); ++i) {
    ordered_json p;
    p["x0"] = json_int(line.point[i].first);
    p["y0"] = json_int(line.point[i].second);
    p["sx"] = json_int(line.slope[i].first);
    p["sy"] = json_int(line.slope[i].second);
    pairs.push_back(p);
  }
  j["pairs"] = pairs;
  return j;
}

void print_line(std::ostream& out, const IntegerLine& line, const char* label) {
  out << label << ": b(t) = " << line.base0.get_str() << " + " << line.base_slope.get_str()
      << " t\n";
  for (std::size_t i = 0; i < line.length(); ++i) {
    out << "  pair " << i << ": x = " << line.point[i].first.get_str() << " + "
        << line.slope[i].first.get_str() << " t, y = " << line.point[i].second.get_str()
        << " + " << line.slope[i].second.get_str() << " t\n";
  }
}

DigitMap map_for(unsigned exponent) { return DigitMap::power(exponent); }

u64 to_u64_arg(const Int& v, const char* what) {
  if (sgn(v) < 0 || !fits_u64(v))
    throw precondition_error(std::string(what) + " is out of range");
  return to_u64(v);
}

std::vector<Int> parse_member_list(const std::vector<std::string>& raw) {
  std::vector<Int> members;
  for (const auto& s : raw) members.push_back(parse_integer_arg(s));
  return members;
}

// Shared flags for every subcommand that prints structured output.
struct OutputMode {
  bool json = false;
  bool csv = false;
};

void add_json_flag(CLI::App* cmd, OutputMode& mode) {
  cmd->add_flag("--json", mode.json, "emit a JSON document instead of text");
}

void add_csv_flag(CLI::App* cmd, OutputMode& mode) {
  auto* csv = cmd->add_flag("--csv", mode.csv, "emit CSV instead of text");
  csv->excludes("--json");
}

int run_orbit(std::ostream& out, const std::string& start_text, const Int& base,
              unsigned exponent, const OutputMode& mode) {
  Int start = parse_integer_arg(start_text);
  Orbit o = orbit(start, base, map_for(exponent));
  if (mode.json) {
    ordered_json j;
    j["start"] = json_int(start);
    j["base"] = json_int(base);
    j["exponent"] = exponent;
    j["tail"] = json_members(o.tail);
    j["cycle"] = json_cycle(o.cycle);
    j["distinct"] = o.distinct_count();
    out << j.dump(2) << "\n";
    return 0;
  }
  out << "orbit of " << start.get_str() << " in base " << base.get_str() << " (exponent "
      << exponent << ")\n";
  out << "tail (" << o.tail.size() << "): " << join_members(o.tail) << "\n";
  out << "cycle (" << o.cycle.members.size() << "): " << join_members(o.cycle.members)
      << "\n";
  out << "distinct values: " << o.distinct_count() << "\n";
  return 0;
}

int run_cycles(std::ostream& out, const SummaryOptions& opts, const OutputMode& mode) {
  CensusSummary s = census_summary(opts);
  if (mode.json) {
    ordered_json j;
    j["base"] = opts.base;
    j["exponent"] = opts.exponent;
    j["bound"] = s.planned_bound;
    j["complete"] = s.census.complete;
    j["steps"] = s.census.steps;
    ordered_json cycles = ordered_json::array();
    for (const auto& c : s.census.cycles) cycles.push_back(json_cycle(c));
    j["cycles"] = cycles;
    if (s.fixed_point_prediction) j["fixed_point_prediction"] = *s.fixed_point_prediction;
    out << j.dump(2) << "\n";
    return 0;
  }
  if (mode.csv) {
    out << "length,propagating,min_member,members\n";
    for (const auto& c : s.census.cycles)
      out << c.members.size() << "," << (c.propagating ? 1 : 0) << ","
          << c.min_member().get_str() << "," << join_members(c.members, ";") << "\n";
    return 0;
  }
  out << "base " << opts.base << ", exponent " << opts.exponent << ", scanned to "
      << s.planned_bound << (s.census.complete ? " (complete)" : " (partial)") << ", "
      << s.census.steps << " steps\n";
  out << s.census.cycles.size() << " cycles:\n";
  for (const auto& c : s.census.cycles)
    out << "  [" << c.members.size() << (c.propagating ? "P" : " ") << "] "
        << join_members(c.members) << "\n";
  if (s.fixed_point_prediction)
    out << "fixed points predicted by the divisor count: " << *s.fixed_point_prediction
        << "\n";
  return 0;
}

int run_onecycles(std::ostream& out, u64 base, bool count_only, const OutputMode& mode) {
  u64 count = count_1cycles(base);
  std::vector<OneCycle> points;
  if (!count_only) points = enumerate_1cycles(base);
  if (mode.json) {
    ordered_json j;
    j["base"] = base;
    j["count"] = count;
    if (!count_only) {
      ordered_json arr = ordered_json::array();
      for (const auto& p : points) {
        ordered_json item;
        item["n"] = p.n;
        item["x"] = p.x;
        item["y"] = p.y;
        if (p.n != 1) {
          auto d = decompose_1cycle(base, p);
          item["g"] = d.g;
          item["g_prime"] = d.g_prime;
          item["h"] = d.h;
          item["h_prime"] = d.h_prime;
          item["d"] = d.d;
          item["D"] = d.big_d;
          item["dual"] = d.dual_n;
        }
        arr.push_back(item);
      }
      j["fixed_points"] = arr;
    }
    out << j.dump(2) << "\n";
    return 0;
  }
  out << "base " << base << ": " << count << " positive fixed points\n";
  if (!count_only) {
    for (const auto& p : points) {
      out << "  n = " << p.n << " = [" << p.y << "," << p.x << "]";
      if (p.n != 1) {
        auto d = decompose_1cycle(base, p);
        out << "  g=" << d.g << " g'=" << d.g_prime << " h=" << d.h << " h'=" << d.h_prime
            << " d=" << d.d << " D=" << d.big_d << "  dual n = " << d.dual_n;
      }
      out << "\n";
    }
  }
  return 0;
}

void print_lifts(std::ostream& out, const IntegerLine& line, const std::vector<Int>& ts) {
  for (const auto& t : ts) {
    Cycle c = lift_cycle(line, t);
    out << "  t = " << t.get_str() << ": base " << c.base.get_str() << ", cycle "
        << join_members(c.members) << "\n";
  }
}

ordered_json json_lifts(const IntegerLine& line, const std::vector<Int>& ts) {
  ordered_json arr = ordered_json::array();
  for (const auto& t : ts) {
    Cycle c = lift_cycle(line, t);
    ordered_json item;
    item["t"] = json_int(t);
    item["base"] = json_int(c.base);
    item["cycle"] = json_cycle(c);
    arr.push_back(item);
  }
  return arr;
}

int run_line_from_cycle(std::ostream& out, const std::vector<std::string>& member_args,
                        const Int& base, bool keep_raw, const std::vector<std::string>& at,
                        const OutputMode& mode) {
  Cycle cyc = make_cycle(base, parse_member_list(member_args), DigitMap::power(2));
  IntegerLine raw = cycle_line(cyc);
  IntegerLine reduced = reduce_line(raw);
  std::vector<Int> ts;
  for (const auto& s : at) ts.push_back(parse_integer_arg(s));
  if (mode.json) {
    ordered_json j;
    j["cycle"] = json_cycle(cyc);
    if (keep_raw) j["raw_line"] = json_line(raw);
    j["line"] = json_line(reduced);
    j["slope_gcd"] = json_int(line_slope_gcd(raw));
    if (!ts.empty()) j["lifts"] = json_lifts(reduced, ts);
    out << j.dump(2) << "\n";
    return 0;
  }
  if (keep_raw) print_line(out, raw, "raw line");
  print_line(out, reduced, "line");
  if (!ts.empty()) print_lifts(out, reduced, ts);
  return 0;
}

int run_line_fixed_point(std::ostream& out, const Int& base, const Int& x0, const Int& y0,
                         const std::vector<std::string>& at, const OutputMode& mode) {
  FixedPointLines fp = fixed_point_lines(base, x0, y0);
  std::vector<Int> ts;
  for (const auto& s : at) ts.push_back(parse_integer_arg(s));
  if (mode.json) {
    ordered_json j;
    j["through_partner"] = json_line(fp.through_partner);
    j["through_self"] = json_line(fp.through_self);
    if (!ts.empty()) {
      j["partner_lifts"] = json_lifts(fp.through_partner, ts);
      j["self_lifts"] = json_lifts(fp.through_self, ts);
    }
    out << j.dump(2) << "\n";
    return 0;
  }
  print_line(out, fp.through_partner, "line through the dual");
  if (!ts.empty()) print_lifts(out, fp.through_partner, ts);
  print_line(out, fp.through_self, "line through the point");
  if (!ts.empty()) print_lifts(out, fp.through_self, ts);
  return 0;
}

int run_line_second(std::ostream& out, const TwoCyclePoint& p, const OutputMode& mode) {
  IntegerLine second = two_cycle_second_line(p);
  Int disc = second_line_discriminant(p);
  if (mode.json) {
    ordered_json j;
    j["line"] = json_line(second);
    j["discriminant"] = json_int(disc);
    out << j.dump(2) << "\n";
    return 0;
  }
  print_line(out, second, "second line");
  out << "direction discriminant: " << disc.get_str() << "\n";
  return 0;
}

int run_propagate(std::ostream& out, const std::vector<std::string>& member_args,
                  const Int& base, const std::vector<std::string>& at,
                  const OutputMode& mode) {
  Cycle cyc = make_cycle(base, parse_member_list(member_args), DigitMap::power(2));
  if (!cyc.propagating)
    throw precondition_error("cycle does not propagate (members must stay below base^2 "
                             "and off multiples of the base)");
  IntegerLine line = reduce_line(cycle_line(cyc));
  std::vector<Int> ts;
  for (const auto& s : at) ts.push_back(parse_integer_arg(s));
  if (ts.empty()) ts = {Int(1)};
  if (mode.json) {
    ordered_json j;
    j["cycle"] = json_cycle(cyc);
    j["line"] = json_line(line);
    j["lifts"] = json_lifts(line, ts);
    out << j.dump(2) << "\n";
    return 0;
  }
  print_line(out, line, "line");
  print_lifts(out, line, ts);
  return 0;
}

int run_density(std::ostream& out, std::size_t length, u64 max_base, bool second_lines,
                const std::vector<std::string>& allow_args,
                const std::vector<std::string>& sample_args,
                const std::string& require_bound, const OutputMode& mode) {
  LinePolicy policy = second_lines ? LinePolicy::kFirstAndSecondLines
                                   : LinePolicy::kFirstLines;
  ProgressionFamily family = collect_progressions(length, max_base, policy);
  std::vector<Int> allow;
  for (const auto& s : allow_args) allow.push_back(parse_integer_arg(s));
  prune_and_bound(family, allow);

  std::vector<Int> samples;
  for (const auto& s : sample_args) samples.push_back(parse_integer_arg(s));
  std::size_t certified = 0;
  if (!samples.empty()) {
    for (std::size_t idx : family.retained)
      if (certify_progression(family.progressions[idx], length, samples)) ++certified;
  }

  int rc = 0;
  bool met = true;
  if (!require_bound.empty()) {
    Rat threshold = parse_rational_arg(require_bound);
    met = family.bounded && family.lower_bound >= threshold;
    rc = met ? 0 : 1;
  }

  if (mode.csv) {
    out << density_csv(family);
    return rc;
  }
  if (mode.json) {
    ordered_json j;
    j["cycle_length"] = length;
    j["max_base"] = max_base;
    j["second_lines"] = second_lines;
    j["collected_pairs"] = family.collected_pairs;
    j["progressions"] = family.progressions.size();
    j["second_line_failures"] = family.second_line_failures;
    j["retained"] = family.retained.size();
    j["groups"] = family.groups.size();
    j["bounded"] = family.bounded;
    if (family.bounded) {
      j["lower_bound"] = Rat(family.lower_bound).get_str();
      j["lower_bound_decimal"] = decimal_floor(family.lower_bound, 6);
    }
    if (!samples.empty()) j["sampled_certified"] = certified;
    if (!require_bound.empty()) j["met_required_bound"] = met;
    out << j.dump(2) << "\n";
    return rc;
  }
  out << "cycle length " << length << ", bases 2.." << max_base << ", "
      << (second_lines ? "first and second lines" : "first lines") << "\n";
  out << "propagating cycles: " << family.collected_pairs << ", progressions: "
      << family.progressions.size() << ", second-line misses: "
      << family.second_line_failures << "\n";
  out << "retained: " << family.retained.size() << " in " << family.groups.size()
      << " groups\n";
  for (const auto& g : family.groups)
    out << "  modulus " << g.modulus.get_str() << ": " << g.members.size()
        << " progressions, covered " << g.covered.get_str() << "\n";
  if (family.bounded)
    out << "density lower bound: " << family.lower_bound.get_str() << " ~ "
        << decimal_floor(family.lower_bound, 6) << "\n";
  if (!samples.empty())
    out << "certified at sampled parameters: " << certified << "/"
        << family.retained.size() << "\n";
  if (!require_bound.empty())
    out << (met ? "required bound met\n" : "required bound NOT met\n");
  return rc;
}

const char* kind_label(CampaignKind k) {
  switch (k) {
    case CampaignKind::kExactCycleCount: return "exact-count";
    case CampaignKind::kMaxCycleLength: return "max-length";
    case CampaignKind::kPropagatingExists: return "propagating";
  }
  return "?";
}

int run_search(std::ostream& out, const CampaignSpec& spec, const OutputMode& mode) {
  CampaignOutcome result = run_campaign(spec);
  if (mode.json) {
    ordered_json j;
    j["kind"] = kind_label(spec.kind);
    j["exponent"] = spec.exponent;
    j["parameter"] = spec.parameter;
    j["from"] = spec.from;
    j["to"] = spec.to;
    j["hits"] = result.hits;
    j["bases_scanned"] = result.bases_scanned;
    j["prefilter_skips"] = result.prefilter_skips;
    j["steps"] = result.steps;
    j["finished"] = result.finished;
    out << j.dump(2) << "\n";
  } else {
    out << kind_label(spec.kind) << " campaign, parameter " << spec.parameter
        << ", bases " << spec.from << ".." << spec.to << "\n";
    out << "hits (" << result.hits.size() << "):";
    for (u64 h : result.hits) out << " " << h;
    out << "\n";
    out << "scanned " << result.bases_scanned << " bases, skipped "
        << result.prefilter_skips << " by prefilter, " << result.steps << " steps"
        << (result.finished ? "" : " (stopped early)") << "\n";
    if (!spec.checkpoint_path.empty())
      out << "results: " << spec.checkpoint_path << ".results.jsonl\n";
  }
  return result.finished ? 0 : 1;
}

int run_families_list(std::ostream& out, const OutputMode& mode) {
  const auto& catalog = family_catalog();
  if (mode.json) {
    ordered_json arr = ordered_json::array();
    for (const auto& f : catalog) {
      ordered_json j;
      j["id"] = f.id;
      j["params"] = f.param_names;
      j["description"] = f.description;
      arr.push_back(j);
    }
    out << arr.dump(2) << "\n";
    return 0;
  }
  for (const auto& f : catalog) {
    out << f.id << " (";
    for (std::size_t i = 0; i < f.param_names.size(); ++i)
      out << (i ? "," : "") << f.param_names[i];
    out << "): " << f.description << "\n";
  }
  return 0;
}

ordered_json json_instance(const FamilyInstance& inst) {
  ordered_json j;
  j["id"] = inst.id;
  ordered_json params;
  for (const auto& [k, v] : inst.params) params[k] = json_int(v);
  j["params"] = params;
  j["exponent"] = inst.exponent;
  j["base"] = json_int(inst.base);
  ordered_json cycles = ordered_json::array();
  for (const auto& c : inst.cycles) cycles.push_back(json_cycle(c));
  j["cycles"] = cycles;
  return j;
}

void print_instance(std::ostream& out, const FamilyInstance& inst) {
  out << inst.id << " at";
  for (const auto& [k, v] : inst.params) out << " " << k << "=" << v.get_str();
  out << ": base " << inst.base.get_str() << " (exponent " << inst.exponent << ")\n";
  for (const auto& c : inst.cycles)
    out << "  [" << c.members.size() << (c.propagating ? "P" : " ") << "] "
        << join_members(c.members) << "\n";
}

std::map<std::string, Int> parse_params(const std::vector<std::string>& raw) {
  std::map<std::string, Int> params;
  for (const auto& item : raw) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw precondition_error("family parameters use name=value");
    params[item.substr(0, eq)] = parse_integer_arg(item.substr(eq + 1));
  }
  return params;
}

int run_families_instantiate(std::ostream& out, const std::string& id,
                             const std::vector<std::string>& raw,
                             const OutputMode& mode) {
  FamilyInstance inst = instantiate_family(id, parse_params(raw));
  if (mode.json)
    out << json_instance(inst).dump(2) << "\n";
  else
    print_instance(out, inst);
  return 0;
}

int run_families_sweep(std::ostream& out, const std::string& id, const Int& limit,
                       const OutputMode& mode) {
  auto instances = sweep_family(id, limit);
  if (mode.json) {
    ordered_json arr = ordered_json::array();
    for (const auto& inst : instances) arr.push_back(json_instance(inst));
    out << arr.dump(2) << "\n";
    return 0;
  }
  for (const auto& inst : instances) print_instance(out, inst);
  out << instances.size() << " instances\n";
  return 0;
}

int run_families_bound(std::ostream& out, unsigned exponent, const Int& base,
                       const OutputMode& mode) {
  Int modulus = digit_congruence_modulus(exponent, base);
  Int bound = min_cycle_bound(exponent, base);
  CongruenceCertificate cert =
      congruence_certificate(DigitMap::power(exponent), base, bound);
  if (mode.json) {
    ordered_json j;
    j["base"] = json_int(base);
    j["exponent"] = exponent;
    j["digit_congruence_modulus"] = json_int(modulus);
    j["min_cycles"] = json_int(bound);
    ordered_json cycles = ordered_json::array();
    for (const auto& c : cert.cycles) cycles.push_back(json_cycle(c));
    j["witness_cycles"] = cycles;
    out << j.dump(2) << "\n";
    return 0;
  }
  out << "base " << base.get_str() << ", exponent " << exponent << "\n";
  out << "digit congruence modulus: " << modulus.get_str() << "\n";
  out << "guaranteed distinct cycles: " << bound.get_str() << "\n";
  for (std::size_t i = 0; i < cert.cycles.size(); ++i)
    out << "  residue " << (i + 1) << " mod " << cert.modulus.get_str() << ": ["
        << cert.cycles[i].members.size() << "] " << join_members(cert.cycles[i].members)
        << "\n";
  return 0;
}

int run_families_five(std::ostream& out, const Int& k, const OutputMode& mode) {
  auto cycles = five_cycles(k);
  if (mode.json) {
    ordered_json j;
    j["k"] = json_int(k);
    j["base"] = json_int(Int(3 * k + 1));
    ordered_json arr = ordered_json::array();
    for (const auto& c : cycles) arr.push_back(json_cycle(c));
    j["cycles"] = arr;
    out << j.dump(2) << "\n";
    return 0;
  }
  out << "base " << Int(3 * k + 1).get_str() << " (cubes): " << cycles.size()
      << " guaranteed cycles\n";
  for (const auto& c : cycles)
    out << "  [" << c.members.size() << "] " << join_members(c.members) << "\n";
  return 0;
}

}  // namespace

Int parse_integer_arg(const std::string& text) {
  if (text.empty()) throw precondition_error("empty integer argument");
  if (text[0] == '[') {
    auto close = text.find("]@");
    if (close == std::string::npos)
      throw precondition_error("digit vector syntax is [d_k,...,d_0]@base");
    Int base;
    try {
      base = Int(text.substr(close + 2));
    } catch (const std::invalid_argument&) {
      throw precondition_error("bad base in digit vector: " + text);
    }
    std::vector<Int> digits;  // little-endian for assemble
    std::string body = text.substr(1, close - 1);
    if (!body.empty()) {
      std::istringstream in(body);
      std::string piece;
      while (std::getline(in, piece, ',')) {
        try {
          digits.insert(digits.begin(), Int(piece));
        } catch (const std::invalid_argument&) {
          throw precondition_error("bad digit in digit vector: " + piece);
        }
      }
    }
    return assemble(digits, base);
  }
  try {
    return Int(text);
  } catch (const std::invalid_argument&) {
    throw precondition_error("not an integer: " + text);
  }
}

Rat parse_rational_arg(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(text));
    Int num(text.substr(0, slash));
    Int den(text.substr(slash + 1));
    if (sgn(den) <= 0) throw precondition_error("denominator must be positive: " + text);
    Rat q(num, den);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw precondition_error("not a rational: " + text);
  }
}

int cli_dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"cycles of digit power sums"};
  app.require_subcommand(1);

  // orbit
  auto* orbit_cmd = app.add_subcommand("orbit", "walk an orbit to its cycle");
  std::string orbit_start;
  std::string orbit_base = "10";
  unsigned orbit_exp = 2;
  OutputMode orbit_mode;
  orbit_cmd->add_option("start", orbit_start, "starting value, decimal or [d,...]@base")
      ->required();
  orbit_cmd->add_option("-b,--base", orbit_base, "base (default 10)");
  orbit_cmd->add_option("-m,--exponent", orbit_exp, "digit exponent (default 2)");
  add_json_flag(orbit_cmd, orbit_mode);

  // cycles
  auto* cycles_cmd = app.add_subcommand("cycles", "census of all cycles of a base");
  SummaryOptions summary;
  OutputMode cycles_mode;
  cycles_cmd->add_option("-b,--base", summary.base, "base")->required();
  cycles_cmd->add_option("-m,--exponent", summary.exponent, "digit exponent (default 2)");
  std::optional<u64> cycles_bound;
  cycles_cmd->add_option("--bound", cycles_bound, "scan bound override");
  cycles_cmd->add_option("--dense-threshold", summary.dense_cache_threshold,
                         "densest classification array, in entries");
  cycles_cmd->add_option("--step-budget", summary.step_budget,
                         "refuse plans beyond this many steps");
  cycles_cmd->add_option("--mem-limit", summary.memory_limit_bytes,
                         "refuse plans beyond this many bytes");
  cycles_cmd->add_flag("--force", summary.force, "run even past the budget or limit");
  add_json_flag(cycles_cmd, cycles_mode);
  add_csv_flag(cycles_cmd, cycles_mode);

  // onecycles
  auto* one_cmd = app.add_subcommand("onecycles", "fixed points of the squared-digit map");
  u64 one_base = 10;
  bool one_count_only = false;
  OutputMode one_mode;
  one_cmd->add_option("-b,--base", one_base, "base")->required();
  one_cmd->add_flag("--count-only", one_count_only, "print only the divisor-count total");
  add_json_flag(one_cmd, one_mode);

  // lines
  auto* lines_cmd = app.add_subcommand("lines", "integer lines carrying cycles");
  lines_cmd->require_subcommand(1);

  auto* from_cycle = lines_cmd->add_subcommand("from-cycle", "line through a cycle");
  std::vector<std::string> fc_members;
  std::string fc_base;
  bool fc_raw = false;
  std::vector<std::string> fc_at;
  OutputMode fc_mode;
  from_cycle->add_option("members", fc_members, "cycle members in cycle order")
      ->required()
      ->expected(-1);
  from_cycle->add_option("-b,--base", fc_base, "base")->required();
  from_cycle->add_flag("--raw", fc_raw, "also print the unreduced line");
  from_cycle->add_option("--at", fc_at, "evaluate the line at these parameters")->delimiter(',');
  add_json_flag(from_cycle, fc_mode);

  auto* fixed = lines_cmd->add_subcommand("fixed-point", "both lines through a fixed point");
  std::string fp_base, fp_x, fp_y;
  std::vector<std::string> fp_at;
  OutputMode fp_mode;
  fixed->add_option("x0", fp_x, "low digit")->required();
  fixed->add_option("y0", fp_y, "high digit")->required();
  fixed->add_option("-b,--base", fp_base, "base")->required();
  fixed->add_option("--at", fp_at, "evaluate the lines at these parameters")->delimiter(',');
  add_json_flag(fixed, fp_mode);

  auto* second = lines_cmd->add_subcommand("second", "isolated second line through a swap point");
  std::string sc_b, sc_x, sc_y, sc_u, sc_v;
  OutputMode sc_mode;
  second->add_option("base", sc_b, "base")->required();
  second->add_option("x", sc_x, "low digit of the first member")->required();
  second->add_option("y", sc_y, "high digit of the first member")->required();
  second->add_option("u", sc_u, "low digit of the second member")->required();
  second->add_option("v", sc_v, "high digit of the second member")->required();
  add_json_flag(second, sc_mode);

  // propagate
  auto* prop_cmd = app.add_subcommand("propagate", "lift a propagating cycle to larger bases");
  std::vector<std::string> pr_members;
  std::string pr_base;
  std::vector<std::string> pr_at;
  OutputMode pr_mode;
  prop_cmd->add_option("members", pr_members, "cycle members in cycle order")
      ->required()
      ->expected(-1);
  prop_cmd->add_option("-b,--base", pr_base, "base")->required();
  prop_cmd->add_option("--at", pr_at, "parameters to lift at (default 1)")->delimiter(',');
  add_json_flag(prop_cmd, pr_mode);

  // density
  auto* dens_cmd = app.add_subcommand("density", "lower bound on bases carrying a cycle length");
  std::size_t dn_length = 1;
  u64 dn_max_base = 100;
  bool dn_second = false;
  std::vector<std::string> dn_allow, dn_samples;
  std::string dn_require;
  OutputMode dn_mode;
  dens_cmd->add_option("-l,--length", dn_length, "cycle length")->required();
  dens_cmd->add_option("-N,--max-base", dn_max_base, "largest base to harvest lines from")
      ->required();
  dens_cmd->add_flag("--second-lines", dn_second,
                     "also use certified second lines (length 2 only)");
  dens_cmd->add_option("--allow", dn_allow,
                       "composite moduli to admit (pairwise coprime)")->delimiter(',');
  dens_cmd->add_option("--certify-at", dn_samples,
                       "re-certify retained progressions at these parameters")->delimiter(',');
  dens_cmd->add_option("--require-bound", dn_require,
                       "exit 1 unless the bound reaches this rational");
  add_json_flag(dens_cmd, dn_mode);
  add_csv_flag(dens_cmd, dn_mode);

  // search
  auto* search_cmd = app.add_subcommand("search", "scan a base range for a cycle property");
  CampaignSpec spec;
  std::string search_kind = "exact-count";
  bool no_primality = false, no_lines = false;
  OutputMode search_mode;
  search_cmd
      ->add_option("-k,--kind", search_kind,
                   "exact-count, max-length, or propagating")
      ->check(CLI::IsMember({"exact-count", "max-length", "propagating"}));
  search_cmd->add_option("-m,--exponent", spec.exponent, "digit exponent (default 2)");
  search_cmd->add_option("-p,--parameter", spec.parameter, "target count or length")
      ->required();
  search_cmd->add_option("--from", spec.from, "first base")->required();
  search_cmd->add_option("--to", spec.to, "last base")->required();
  search_cmd->add_flag("--no-primality-prefilter", no_primality,
                       "censor every base even when b^2+1 is composite");
  search_cmd->add_flag("--no-line-prefilter", no_lines,
                       "do not seed scans with known line cycles");
  search_cmd->add_option("--line-library-max", spec.line_library_max_base0,
                         "largest base mined for second lines");
  search_cmd->add_option("-j,--jobs", spec.jobs, "worker threads");
  search_cmd->add_option("--shard-size", spec.shard_size, "bases per commit shard");
  search_cmd->add_option("--checkpoint", spec.checkpoint_path,
                         "checkpoint file; reuse to resume");
  search_cmd->add_option("--step-budget", spec.step_budget,
                         "refuse campaigns beyond this many steps");
  search_cmd->add_flag("--force", spec.force, "run even past the step budget");
  search_cmd->add_option("--max-shards", spec.max_shards_this_run,
                         "stop after this many shards (0 = run to the end)");
  search_cmd->add_option("--dense-threshold", spec.dense_cache_threshold,
                         "densest per-base classification array, in entries");
  add_json_flag(search_cmd, search_mode);

  // families
  auto* fam_cmd = app.add_subcommand("families", "closed-form cycle families");
  fam_cmd->require_subcommand(1);
  OutputMode fam_mode;

  auto* fam_list = fam_cmd->add_subcommand("list", "catalog of families");
  add_json_flag(fam_list, fam_mode);

  auto* fam_inst = fam_cmd->add_subcommand("instantiate", "evaluate one family");
  std::string fi_id;
  std::vector<std::string> fi_params;
  fam_inst->add_option("id", fi_id, "family id")->required();
  fam_inst->add_option("--param", fi_params, "parameter assignments name=value");
  add_json_flag(fam_inst, fam_mode);

  auto* fam_sweep = fam_cmd->add_subcommand("sweep", "instances up to a parameter limit");
  std::string fs_id, fs_limit = "10";
  fam_sweep->add_option("id", fs_id, "family id")->required();
  fam_sweep->add_option("--limit", fs_limit, "sweep parameter limit (default 10)");
  add_json_flag(fam_sweep, fam_mode);

  auto* fam_bound = fam_cmd->add_subcommand("bound", "guaranteed cycle count of a base");
  std::string fb_base;
  unsigned fb_exp = 2;
  fam_bound->add_option("-b,--base", fb_base, "base")->required();
  fam_bound->add_option("-m,--exponent", fb_exp, "digit exponent (default 2)");
  add_json_flag(fam_bound, fam_mode);

  auto* fam_five = fam_cmd->add_subcommand("five", "five cubic-map cycles at b = 3k+1");
  std::string ff_k;
  fam_five->add_option("k", ff_k, "parameter k >= 1")->required();
  add_json_flag(fam_five, fam_mode);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*orbit_cmd)
      return run_orbit(out, orbit_start, parse_integer_arg(orbit_base), orbit_exp,
                       orbit_mode);
    if (*cycles_cmd) {
      summary.scan_bound = cycles_bound;
      return run_cycles(out, summary, cycles_mode);
    }
    if (*one_cmd) return run_onecycles(out, one_base, one_count_only, one_mode);
    if (*from_cycle)
      return run_line_from_cycle(out, fc_members, parse_integer_arg(fc_base), fc_raw,
                                 fc_at, fc_mode);
    if (*fixed)
      return run_line_fixed_point(out, parse_integer_arg(fp_base),
                                  parse_integer_arg(fp_x), parse_integer_arg(fp_y),
                                  fp_at, fp_mode);
    if (*second) {
      TwoCyclePoint p;
      p.b = parse_integer_arg(sc_b);
      p.x = parse_integer_arg(sc_x);
      p.y = parse_integer_arg(sc_y);
      p.u = parse_integer_arg(sc_u);
      p.v = parse_integer_arg(sc_v);
      return run_line_second(out, p, sc_mode);
    }
    if (*prop_cmd)
      return run_propagate(out, pr_members, parse_integer_arg(pr_base), pr_at, pr_mode);
    if (*dens_cmd)
      return run_density(out, dn_length, dn_max_base, dn_second, dn_allow, dn_samples,
                         dn_require, dn_mode);
    if (*search_cmd) {
      if (search_kind == "exact-count") spec.kind = CampaignKind::kExactCycleCount;
      else if (search_kind == "max-length") spec.kind = CampaignKind::kMaxCycleLength;
      else spec.kind = CampaignKind::kPropagatingExists;
      spec.primality_prefilter = !no_primality;
      spec.line_prefilter = !no_lines;
      return run_search(out, spec, search_mode);
    }
    if (*fam_list) return run_families_list(out, fam_mode);
    if (*fam_inst) return run_families_instantiate(out, fi_id, fi_params, fam_mode);
    if (*fam_sweep)
      return run_families_sweep(out, fs_id, parse_integer_arg(fs_limit), fam_mode);
    if (*fam_bound)
      return run_families_bound(out, fb_exp, parse_integer_arg(fb_base), fam_mode);
    if (*fam_five) return run_families_five(out, parse_integer_arg(ff_k), fam_mode);
  } catch (const precondition_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "error: no command selected\n";
  return 2;
}

}  // namespace digitdyn
