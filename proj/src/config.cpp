#include "rhsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "rhsim/error.hpp"

namespace rhsim {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

const std::vector<std::string> kSimKeys{
    "trefw_ns",       "trefi_ns",         "trfc_ns",          "trc_ns",
    "refs_per_trefw", "mitigations_per_trefi", "blast_radius", "num_rows",
    "policy",         "eviction",         "sampling_p",       "p_floor",
    "hot_capacity",   "cold_capacity",    "promote_p",        "mitigate_p",
    "trh",            "graphene_entries", "tracker_capacity", "master_seed",
    "seed_index",     "pattern_index",    "pattern",          "aligned",
    "avg_mode"};

const std::vector<std::string> kSweepKeys{"axis", "axis_values", "seeds", "patterns"};

bool is_sweep_key(std::string_view k) {
  return std::find(kSweepKeys.begin(), kSweepKeys.end(), k) != kSweepKeys.end();
}

}  // namespace

std::uint64_t parse_count(std::string_view text, const std::string& key) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || ptr != end)
    throw ConfigError(key, "expected a non-negative integer, got '" + std::string(text) + "'");
  return v;
}

double parse_real(std::string_view text, const std::string& key) {
  text = trim(text);
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || ptr != end)
    throw ConfigError(key, "expected a number, got '" + std::string(text) + "'");
  return v;
}

bool parse_flag(std::string_view text, const std::string& key) {
  text = trim(text);
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw ConfigError(key, "expected true or false, got '" + std::string(text) + "'");
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  while (true) {
    const auto c = text.find(',');
    const auto item = trim(text.substr(0, c));
    if (!item.empty()) out.emplace_back(item);
    if (c == std::string_view::npos) break;
    text.remove_prefix(c + 1);
  }
  return out;
}

Settings parse_settings(std::string_view text, const std::string& origin) {
  Settings out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(line_no);
    if (eq == std::string_view::npos) throw ConfigError(where, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError(where, "missing key");
    if (!out.emplace(key, std::string(trim(line.substr(eq + 1)))).second)
      throw ConfigError(key, "set twice in " + origin);
  }
  return out;
}

Settings load_settings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_settings(buf.str(), path);
}

Settings merge_settings(const Settings& base, const Settings& over) {
  Settings out = base;
  for (const auto& [k, v] : over) out[k] = v;
  return out;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> all = [] {
    std::vector<std::string> v = kSimKeys;
    v.insert(v.end(), kSweepKeys.begin(), kSweepKeys.end());
    return v;
  }();
  return all;
}

void apply_settings(SimConfig& c, const Settings& s) {
  for (const auto& [k, v] : s) {
    if (std::find(kSimKeys.begin(), kSimKeys.end(), k) == kSimKeys.end() && !is_sweep_key(k))
      throw ConfigError(k, "unknown configuration key");
  }
  auto get = [&](const char* key) -> const std::string* {
    const auto it = s.find(key);
    return it == s.end() ? nullptr : &it->second;
  };

  if (auto v = get("policy")) {
    const Scheme scheme = parse_scheme(*v);
    PolicySpec fresh;
    switch (scheme) {
      case Scheme::Baseline: fresh = PolicySpec::baseline(); break;
      case Scheme::Proteas: fresh = PolicySpec::proteas(c.policy.sampling_p); break;
      case Scheme::Pmss: fresh = PolicySpec::pmss(c.policy.sampling_p); break;
      case Scheme::Dsac: fresh = PolicySpec::dsac(c.policy.p_floor); break;
      case Scheme::Prohit:
        fresh = PolicySpec::prohit(c.policy.hot_capacity, c.policy.cold_capacity, c.policy.promote_p);
        break;
      case Scheme::Para: fresh = PolicySpec::para(c.policy.mitigate_p); break;
      case Scheme::Graphene: fresh = PolicySpec::graphene(c.policy.trh, c.policy.graphene_entries); break;
    }
    fresh.sampling_p = c.policy.sampling_p;
    fresh.p_floor = c.policy.p_floor;
    fresh.mitigate_p = c.policy.mitigate_p;
    c.policy = fresh;
  }
  auto count = [&](const char* key, std::uint64_t& field) {
    if (auto v = get(key)) field = parse_count(*v, key);
  };
  auto real = [&](const char* key, double& field) {
    if (auto v = get(key)) field = parse_real(*v, key);
  };
  auto& t = c.timings;
  count("trefw_ns", t.trefw_ns);
  count("trefi_ns", t.trefi_ns);
  count("trfc_ns", t.trfc_ns);
  count("trc_ns", t.trc_ns);
  count("refs_per_trefw", t.refs_per_trefw);
  count("mitigations_per_trefi", c.mitigations_per_trefi);
  count("blast_radius", c.blast_radius);
  count("num_rows", c.num_rows);
  if (auto v = get("eviction")) c.policy.eviction = parse_eviction(*v);
  real("sampling_p", c.policy.sampling_p);
  real("p_floor", c.policy.p_floor);
  count("hot_capacity", c.policy.hot_capacity);
  count("cold_capacity", c.policy.cold_capacity);
  real("promote_p", c.policy.promote_p);
  real("mitigate_p", c.policy.mitigate_p);
  count("trh", c.policy.trh);
  count("graphene_entries", c.policy.graphene_entries);
  count("tracker_capacity", c.tracker_capacity);
  count("master_seed", c.master_seed);
  count("seed_index", c.seed_index);
  count("pattern_index", c.pattern_index);
  if (auto v = get("avg_mode")) {
    if (*v == "row_max")
      c.avg_mode = AvgMode::RowMax;
    else if (*v == "reset_event")
      c.avg_mode = AvgMode::ResetEvent;
    else
      throw ConfigError("avg_mode", "expected row_max or reset_event, got '" + *v + "'");
  }
  const bool aligned = get("aligned") ? parse_flag(*get("aligned"), "aligned") : c.pattern.aligned;
  if (auto v = get("pattern"))
    c.pattern = parse_pattern(*v, aligned);
  else if (get("aligned") && c.pattern.aligned != aligned)
    c.pattern.aligned = aligned;
}

std::vector<AttackPattern> patterns_from_settings(const Settings& s) {
  const auto it = s.find("patterns");
  const std::string spec = it == s.end() ? "suite" : it->second;
  const auto al = s.find("aligned");
  const bool aligned = al != s.end() && parse_flag(al->second, "aligned");
  auto suite = standard_suite();
  if (spec == "suite") return suite;
  if (spec == "suite:unaligned" || spec == "suite:aligned") {
    const bool want = spec == "suite:aligned";
    std::vector<AttackPattern> out;
    for (auto& p : suite)
      if (p.aligned == want) out.push_back(std::move(p));
    return out;
  }
  std::vector<AttackPattern> out;
  std::string_view rest = spec;
  while (true) {
    const auto semi = rest.find(';');
    const auto item = trim(rest.substr(0, semi));
    if (!item.empty()) out.push_back(parse_pattern(item, aligned));
    if (semi == std::string_view::npos) break;
    rest.remove_prefix(semi + 1);
  }
  if (out.empty()) throw ConfigError("patterns", "no patterns given");
  return out;
}

SweepSpec sweep_from_settings(const Settings& s) {
  SweepSpec spec;
  Settings sim;
  for (const auto& [k, v] : s)
    if (!is_sweep_key(k) && k != "pattern") sim.emplace(k, v);
  apply_settings(spec.fixed, sim);
  if (auto it = s.find("axis"); it != s.end()) spec.axis = parse_axis(it->second);
  if (auto it = s.find("axis_values"); it != s.end()) {
    spec.axis_values = split_list(it->second);
  } else if (spec.axis == Axis::SamplingP) {
    for (double p : default_p_grid()) {
      std::ostringstream o;
      o << p;
      spec.axis_values.push_back(o.str());
    }
  }
  if (auto it = s.find("seeds"); it != s.end()) spec.seeds = parse_count(it->second, "seeds");
  spec.patterns = patterns_from_settings(s);
  return spec;
}

}  // namespace rhsim
