#include "rhsim/attack.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_map>

#include "rhsim/config.hpp"
#include "rhsim/error.hpp"

namespace rhsim {
namespace {

constexpr std::uint64_t kSuiteJ[] = {2, 4, 8, 16, 20, 32, 40, 80, 120, 140};
constexpr std::uint64_t kSuiteX[] = {2, 3, 4, 5};
constexpr std::uint64_t kSuiteK[] = {5, 10, 20, 32, 40, 80};

std::vector<RowId> spaced_rows(std::uint64_t n, RowId first, RowId stride) {
  std::vector<RowId> rows(n);
  for (std::uint64_t i = 0; i < n; ++i) rows[i] = static_cast<RowId>(first + i * stride);
  return rows;
}

}  // namespace

std::uint64_t AttackPattern::period() const {
  switch (kind) {
    case PatternKind::Uniform: return j;
    case PatternKind::NonUniform: return j * x + k;
    case PatternKind::Custom: return custom_sequence.size();
  }
  return 0;
}

RowId AttackPattern::element(std::uint64_t phase) const {
  const std::uint64_t pos = phase % period();
  switch (kind) {
    case PatternKind::Uniform: return target_rows[pos];
    case PatternKind::NonUniform:
      return pos < j * x ? target_rows[pos % j] : decoy_rows[pos - j * x];
    case PatternKind::Custom: return custom_sequence[pos];
  }
  return 0;
}

std::vector<RowId> AttackPattern::footprint_rows() const {
  if (kind != PatternKind::Custom) {
    std::vector<RowId> rows = target_rows;
    rows.insert(rows.end(), decoy_rows.begin(), decoy_rows.end());
    return rows;
  }
  std::vector<RowId> rows;
  std::unordered_map<RowId, bool> seen;
  for (RowId r : custom_sequence)
    if (seen.emplace(r, true).second) rows.push_back(r);
  return rows;
}

std::string AttackPattern::id() const {
  std::string s;
  switch (kind) {
    case PatternKind::Uniform: s = "u_j" + std::to_string(j); break;
    case PatternKind::NonUniform:
      s = "nu_j" + std::to_string(j) + "_x" + std::to_string(x) + "_k" + std::to_string(k);
      break;
    case PatternKind::Custom: s = "trace_n" + std::to_string(custom_sequence.size()); break;
  }
  return s + (aligned ? "_a" : "_u");
}

void AttackPattern::validate() const {
  switch (kind) {
    case PatternKind::Uniform:
      if (j == 0) throw ConfigError("pattern.j", "must be at least 1");
      if (target_rows.size() != j) throw ConfigError("pattern.j", "target row count mismatch");
      break;
    case PatternKind::NonUniform:
      if (j == 0) throw ConfigError("pattern.j", "must be at least 1");
      if (x == 0) throw ConfigError("pattern.x", "must be at least 1");
      if (target_rows.size() != j || decoy_rows.size() != k)
        throw ConfigError("pattern.k", "row count mismatch");
      break;
    case PatternKind::Custom:
      if (custom_sequence.empty()) throw ConfigError("pattern", "trace is empty");
      return;
  }
  std::vector<RowId> rows = footprint_rows();
  std::sort(rows.begin(), rows.end());
  if (std::adjacent_find(rows.begin(), rows.end()) != rows.end())
    throw ConfigError("pattern", "target and decoy rows must be distinct");
}

AttackPattern make_uniform(std::uint64_t j, bool aligned, RowId base, RowId stride) {
  AttackPattern p;
  p.kind = PatternKind::Uniform;
  p.j = j;
  p.aligned = aligned;
  p.target_rows = spaced_rows(j, base, stride);
  p.validate();
  return p;
}

AttackPattern make_nonuniform(std::uint64_t j, std::uint64_t x, std::uint64_t k, bool aligned,
                              RowId base, RowId stride) {
  AttackPattern p;
  p.kind = PatternKind::NonUniform;
  p.j = j;
  p.x = x;
  p.k = k;
  p.aligned = aligned;
  p.target_rows = spaced_rows(j, base, stride);
  p.decoy_rows = spaced_rows(k, static_cast<RowId>(base + j * stride), stride);
  p.validate();
  return p;
}

AttackPattern make_custom(std::vector<RowId> sequence, bool aligned) {
  AttackPattern p;
  p.kind = PatternKind::Custom;
  p.aligned = aligned;
  p.custom_sequence = std::move(sequence);
  p.j = p.footprint();
  p.validate();
  return p;
}

AttackPattern load_trace(const std::string& path, bool aligned) {
  std::ifstream in(path);
  if (!in) throw ConfigError("pattern", "cannot open trace file '" + path + "'");
  std::vector<RowId> seq;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    const auto v = parse_count(std::string_view(line).substr(first, last - first + 1), "pattern");
    seq.push_back(static_cast<RowId>(v));
  }
  return make_custom(std::move(seq), aligned);
}

AttackPattern parse_pattern(std::string_view text, bool aligned) {
  const auto colon = text.find(':');
  const std::string_view kind = text.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? "" : text.substr(colon + 1);
  if (kind == "trace") return load_trace(std::string(rest), aligned);

  std::map<std::string, std::uint64_t, std::less<>> params;
  std::string_view remaining = rest;
  while (!remaining.empty()) {
    const auto comma = remaining.find(',');
    const std::string_view item = remaining.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("pattern", "expected key=value in '" + std::string(item) + "'");
    const std::string key(item.substr(0, eq));
    params[key] = parse_count(item.substr(eq + 1), "pattern." + key);
    remaining = comma == std::string_view::npos ? "" : remaining.substr(comma + 1);
  }
  auto get = [&](const char* key, std::uint64_t fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  if (kind == "uniform") return make_uniform(get("j", 0), aligned);
  if (kind == "nonuniform") return make_nonuniform(get("j", 0), get("x", 1), get("k", 0), aligned);
  throw ConfigError("pattern", "unknown pattern kind '" + std::string(kind) +
                                   "' (expected uniform, nonuniform, trace)");
}

std::vector<AttackPattern> standard_suite() {
  std::vector<AttackPattern> suite;
  suite.reserve(500);
  for (bool aligned : {false, true}) {
    for (auto j : kSuiteJ) suite.push_back(make_uniform(j, aligned));
    for (auto j : kSuiteJ)
      for (auto x : kSuiteX)
        for (auto k : kSuiteK) suite.push_back(make_nonuniform(j, x, k, aligned));
  }
  return suite;
}

RowId next_activation(const AttackPattern& pattern, std::uint64_t global_act_index,
                      std::uint64_t trefi_position) {
  return pattern.element(pattern.aligned ? trefi_position : global_act_index);
}

ActivationStream::ActivationStream(const AttackPattern& pattern, std::uint64_t acts_per_trefi) {
  pattern.validate();
  rows_ = pattern.footprint_rows();
  std::unordered_map<RowId, std::uint32_t> dense;
  for (std::uint32_t i = 0; i < rows_.size(); ++i) dense.emplace(rows_[i], i);

  const std::uint64_t len = pattern.aligned ? acts_per_trefi : pattern.period();
  seq_.resize(len);
  positions_.resize(rows_.size());
  for (std::uint64_t t = 0; t < len; ++t) {
    const std::uint32_t id = dense.at(pattern.element(t));
    seq_[t] = id;
    positions_[id].push_back(static_cast<std::uint32_t>(t));
  }
}

std::uint64_t ActivationStream::prefix(std::uint32_t id, std::uint64_t t) const {
  const auto& pos = positions_[id];
  const std::uint64_t p = seq_.size();
  const auto partial = static_cast<std::uint32_t>(t % p);
  const auto within = std::lower_bound(pos.begin(), pos.end(), partial) - pos.begin();
  return (t / p) * pos.size() + static_cast<std::uint64_t>(within);
}

}  // namespace rhsim
