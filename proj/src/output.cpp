#include "rhsim/output.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace rhsim {
namespace {

std::string kind_name(PatternKind k) {
  switch (k) {
    case PatternKind::Uniform: return "uniform";
    case PatternKind::NonUniform: return "nonuniform";
    case PatternKind::Custom: return "custom";
  }
  return "unknown";
}

void append_row(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  out += '\n';
}

std::string u(std::uint64_t v) { return std::to_string(v); }

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string sampled_p_text(const PolicySpec& p) {
  switch (p.scheme) {
    case Scheme::Baseline: return "1";
    case Scheme::Proteas:
    case Scheme::Pmss: return format_number(p.sampling_p);
    case Scheme::Para: return format_number(p.mitigate_p);
    default: return "";
  }
}

const std::vector<std::string>& sweep_csv_columns() {
  static const std::vector<std::string> cols{
      "pattern_id",     "kind",          "j",                "x",
      "k_decoys",       "aligned",       "policy",           "eviction",
      "sampling_p",     "tracker_size",  "mitigs_per_trefi", "blast_radius",
      "seeds",          "max_dist_mean", "max_dist_ci95",    "avg_dist_mean",
      "avg_dist_ci95",  "mitigations_mean", "occupancy_mean", "extra_act_fraction",
      "master_seed"};
  return cols;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out;
  append_row(out, sweep_csv_columns());
  for (const auto& row : rows) {
    const SimConfig& c = row.config;
    const std::vector<std::string> common{std::string(scheme_name(c.policy.scheme)),
                                          eviction_name(c.policy.eviction),
                                          sampled_p_text(c.policy),
                                          u(c.tracker_capacity),
                                          u(c.mitigations_per_trefi),
                                          u(c.blast_radius)};
    for (const auto& pr : row.patterns) {
      const AttackPattern& p = pr.pattern;
      const bool nu = p.kind == PatternKind::NonUniform;
      std::vector<std::string> f{p.id(), kind_name(p.kind),
                                 u(p.kind == PatternKind::Custom ? p.footprint() : p.j),
                                 nu ? u(p.x) : "", nu ? u(p.k) : "", p.aligned ? "1" : "0"};
      f.insert(f.end(), common.begin(), common.end());
      const ResultStats& s = pr.stats;
      f.insert(f.end(), {u(pr.seeds), format_number(s.max_disturbance.mean),
                         format_number(s.max_disturbance.ci95), format_number(s.avg_disturbance.mean),
                         format_number(s.avg_disturbance.ci95), format_number(s.mitigations_issued.mean),
                         format_number(s.mean_tracker_occupancy.mean),
                         format_number(s.extra_activation_fraction.mean), u(c.master_seed)});
      append_row(out, f);
    }
  }
  for (const auto& row : rows) {
    const SimConfig& c = row.config;
    const std::uint64_t seeds = row.patterns.empty() ? 0 : row.patterns.front().seeds;
    std::vector<std::string> f{"suite", "summary", "", "", "", "",
                               std::string(scheme_name(c.policy.scheme)), eviction_name(c.policy.eviction),
                               sampled_p_text(c.policy), u(c.tracker_capacity), u(c.mitigations_per_trefi),
                               u(c.blast_radius), u(seeds), format_number(row.suite_max),
                               format_number(row.suite_max_ci), format_number(row.suite_avg), "",
                               format_number(row.mitigations_mean), format_number(row.occupancy_mean),
                               format_number(row.extra_act_fraction), u(c.master_seed)};
    append_row(out, f);
  }
  return out;
}

nlohmann::json config_json(const SimConfig& c) {
  const auto& t = c.timings;
  const auto& p = c.policy;
  nlohmann::json j;
  j["timings"] = {{"trefw_ns", t.trefw_ns},
                  {"trefi_ns", t.trefi_ns},
                  {"trfc_ns", t.trfc_ns},
                  {"trc_ns", t.trc_ns},
                  {"refs_per_trefw", t.refs_per_trefw}};
  const MitigationSchedule s = c.schedule();
  j["schedule"] = {{"mitigations_per_trefi", s.mitigations_per_trefi},
                   {"rfm_threshold", s.rfm_threshold},
                   {"blast_radius", s.blast_radius}};
  j["policy"] = {{"scheme", scheme_name(p.scheme)},
                 {"eviction", eviction_name(p.eviction)},
                 {"sampling_p", p.sampling_p},
                 {"p_floor", p.p_floor},
                 {"hot_capacity", p.hot_capacity},
                 {"cold_capacity", p.cold_capacity},
                 {"promote_p", p.promote_p},
                 {"mitigate_p", p.mitigate_p},
                 {"trh", p.trh},
                 {"graphene_entries", p.graphene_entries}};
  j["num_rows"] = c.num_rows;
  j["tracker_capacity"] = c.tracker_capacity;
  j["master_seed"] = c.master_seed;
  j["avg_mode"] = c.avg_mode == AvgMode::RowMax ? "row_max" : "reset_event";
  return j;
}

nlohmann::json sweep_summary_json(const std::vector<SweepRow>& rows, const std::string& manifest_name) {
  nlohmann::json j;
  j["manifest"] = manifest_name;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"axis_value", r.axis_value},
                         {"policy", scheme_name(r.config.policy.scheme)},
                         {"suite_max", format_number(r.suite_max)},
                         {"suite_max_ci95", format_number(r.suite_max_ci)},
                         {"suite_max_pattern", r.suite_max_pattern},
                         {"suite_avg", format_number(r.suite_avg)},
                         {"mitigations_mean", format_number(r.mitigations_mean)},
                         {"occupancy_mean", format_number(r.occupancy_mean)},
                         {"extra_act_fraction", format_number(r.extra_act_fraction)},
                         {"patterns", r.patterns.size()}});
  }
  return j;
}

nlohmann::json make_manifest(const std::string& command, const nlohmann::json& resolved,
                             const std::vector<std::string>& outputs, double wall_seconds) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return {{"tool", "rhsim"},
          {"version", kToolVersion},
          {"command", command},
          {"config", resolved},
          {"outputs", outputs},
          {"finished_utc", stamp},
          {"wall_seconds", wall_seconds}};
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace rhsim
