#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rhsim/config.hpp"
#include "rhsim/error.hpp"
#include "rhsim/experiments.hpp"
#include "rhsim/output.hpp"
#include "rhsim/studies.hpp"

using namespace rhsim;

namespace {

struct SimFlags {
  std::string config;
  std::string policy, eviction, pattern;
  std::string p, mitigate_p, k, seed, seed_index, tracker_size, blast_radius;
  bool aligned = false;
  std::vector<std::string> sets;
};

void add_sim_flags(CLI::App* app, SimFlags& f) {
  app->add_option("--config", f.config, "key = value configuration file");
  app->add_option("--policy", f.policy, "baseline, proteas, pmss, dsac, prohit, para or graphene");
  app->add_option("--eviction", f.eviction, "lfu, lru, random, bip or bip:<epsilon>");
  app->add_option("--pattern", f.pattern,
                  "uniform:j=N, nonuniform:j=N,x=X,k=K or trace:<file> (one row id per line, repeated "
                  "cyclically)");
  app->add_flag("--aligned", f.aligned, "restart the pattern at every tREFI boundary");
  app->add_option("--p,--sampling-p", f.p, "sampling probability (sampling_p)");
  app->add_option("--mitigate-p", f.mitigate_p, "PARA mitigation probability (mitigate_p)");
  app->add_option("--k,--mitigations-per-trefi", f.k, "mitigations per tREFI");
  app->add_option("--seed,--master-seed", f.seed, "master seed");
  app->add_option("--seed-index", f.seed_index, "seed index");
  app->add_option("--tracker-size", f.tracker_size, "tracker entries");
  app->add_option("--blast-radius", f.blast_radius, "1, 2 or 4");
  app->add_option("--set", f.sets, "extra key=value override (repeatable)");
}

// Built-in defaults < config file < flags.
Settings resolve(const SimFlags& f) {
  Settings file = f.config.empty() ? Settings{} : load_settings(f.config);
  Settings flags;
  auto put = [&](const char* key, const std::string& v) {
    if (!v.empty()) flags[key] = v;
  };
  put("policy", f.policy);
  put("eviction", f.eviction);
  put("pattern", f.pattern);
  put("sampling_p", f.p);
  put("mitigate_p", f.mitigate_p);
  put("mitigations_per_trefi", f.k);
  put("master_seed", f.seed);
  put("seed_index", f.seed_index);
  put("tracker_capacity", f.tracker_size);
  put("blast_radius", f.blast_radius);
  if (f.aligned) flags["aligned"] = "true";
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("set", "expected key=value, got '" + kv + "'");
    flags[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return merge_settings(file, flags);
}

unsigned workers_default() {
  if (const char* env = std::getenv("RHSIM_WORKERS")) return static_cast<unsigned>(parse_count(env, "RHSIM_WORKERS"));
  return 0;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void print_result(const SimConfig& c, const SimResult& r) {
  std::printf("pattern            %s (footprint %llu)\n", c.pattern.id().c_str(),
              static_cast<unsigned long long>(c.pattern.footprint()));
  std::printf("policy             %s, eviction %s, p %s\n", std::string(scheme_name(c.policy.scheme)).c_str(),
              eviction_name(c.policy.eviction).c_str(), sampled_p_text(c.policy).c_str());
  std::printf("schedule           k=%llu, rfm_threshold=%llu, blast_radius=%llu, tracker=%llu\n",
              static_cast<unsigned long long>(c.mitigations_per_trefi),
              static_cast<unsigned long long>(c.schedule().rfm_threshold),
              static_cast<unsigned long long>(c.blast_radius),
              static_cast<unsigned long long>(c.tracker_capacity));
  std::printf("max_disturbance    %llu\n", static_cast<unsigned long long>(r.max_disturbance));
  std::printf("avg_disturbance    %s\n", format_number(r.avg_disturbance).c_str());
  std::printf("mitigations        %llu issued, %llu of %llu scheduled slots empty\n",
              static_cast<unsigned long long>(r.mitigations_issued),
              static_cast<unsigned long long>(r.empty_mitigation_slots),
              static_cast<unsigned long long>(r.scheduled_slots));
  std::printf("tracker occupancy  %s\n", format_number(r.mean_tracker_occupancy).c_str());
  std::printf("extra activations  %s\n", format_number(r.extra_activation_fraction).c_str());
}

int cmd_run(const SimFlags& f, const std::string& json_out) {
  const Settings s = resolve(f);
  SimConfig c;
  if (!s.count("pattern")) c.pattern = make_uniform(20, s.count("aligned") && parse_flag(s.at("aligned"), "aligned"));
  apply_settings(c, s);
  const SimResult r = simulate(c);
  print_result(c, r);
  if (!json_out.empty()) {
    nlohmann::json j = config_json(c);
    j["pattern"] = c.pattern.id();
    j["result"] = {{"max_disturbance", r.max_disturbance},
                   {"avg_disturbance", r.avg_disturbance},
                   {"mitigations_issued", r.mitigations_issued},
                   {"scheduled_slots", r.scheduled_slots},
                   {"empty_mitigation_slots", r.empty_mitigation_slots},
                   {"mean_tracker_occupancy", r.mean_tracker_occupancy},
                   {"extra_activation_fraction", r.extra_activation_fraction},
                   {"total_activations", r.total_activations}};
    write_atomic(json_out, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_sweep(const std::string& spec_file, const SimFlags& f, bool quick, const std::string& seeds,
              const std::string& out, unsigned workers) {
  SimFlags g = f;
  if (!spec_file.empty()) {
    if (!g.config.empty()) throw ConfigError("config", "give the sweep spec either positionally or with --config");
    g.config = spec_file;
  }
  Settings s = resolve(g);
  if (!seeds.empty()) s["seeds"] = seeds;
  if (quick) s["seeds"] = "10";
  const SweepSpec spec = sweep_from_settings(s);
  const auto t0 = std::chrono::steady_clock::now();
  RunOptions opt;
  opt.workers = workers;
  const auto rows = run_sweep(spec, opt);
  const std::string csv_path = out + ".csv", json_path = out + ".json", manifest_path = out + ".manifest.json";
  nlohmann::json resolved = config_json(spec.fixed);
  resolved["axis"] = axis_name(spec.axis);
  resolved["axis_values"] = spec.axis_values;
  resolved["seeds"] = spec.seeds;
  resolved["patterns"] = nlohmann::json::array();
  for (const auto& p : spec.patterns) resolved["patterns"].push_back(p.id());
  resolved["settings"] = s;
  const auto manifest_name = std::filesystem::path(manifest_path).filename().string();
  nlohmann::json summary = sweep_summary_json(rows, manifest_name);
  summary["axis"] = axis_name(spec.axis);
  summary["seeds"] = spec.seeds;
  write_atomic(csv_path, sweep_csv(rows));
  write_atomic(json_path, summary.dump(2) + "\n");
  write_atomic(manifest_path,
               make_manifest("sweep", resolved, {csv_path, json_path}, seconds_since(t0)).dump(2) + "\n");
  for (const auto& r : rows)
    std::printf("%s=%s suite_max=%s (%s) suite_avg=%s\n", std::string(axis_name(spec.axis)).c_str(),
                r.axis_value.c_str(), format_number(r.suite_max).c_str(), r.suite_max_pattern.c_str(),
                format_number(r.suite_avg).c_str());
  std::printf("wrote %s %s %s\n", csv_path.c_str(), json_path.c_str(), manifest_path.c_str());
  return 0;
}

std::vector<std::uint64_t> parse_k_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& v : split_list(text)) out.push_back(parse_count(v, "k"));
  if (out.empty()) throw ConfigError("k", "empty list");
  return out;
}

int cmd_compare(const SimFlags& f, const std::string& ks, std::uint64_t seeds, const std::string& out,
                unsigned workers) {
  Settings s = resolve(f);
  SimConfig base;
  Settings sim;
  for (const auto& [k, v] : s)
    if (k != "patterns") sim.emplace(k, v);
  apply_settings(base, sim);
  if (seeds == 0) throw ConfigError("seeds", "must be at least 1");
  const auto patterns = patterns_from_settings(s);
  RunOptions opt;
  opt.workers = workers;
  SuiteCache cache(patterns, seeds, opt);
  Studies studies(cache, base);
  StudyTable t;
  t.name = "compare";
  for (const auto& series : default_comparison()) {
    for (std::uint64_t k : parse_k_list(ks)) {
      PolicySpec pol = series.policy;
      if (auto it = series.per_k_p.find(k); it != series.per_k_p.end()) {
        if (pol.scheme == Scheme::Para)
          pol.mitigate_p = it->second;
        else
          pol.sampling_p = it->second;
      }
      const SweepRow& row = studies.scheme(pol, k, base.tracker_capacity);
      t.lines.push_back({series.label, &row});
      std::printf("%-9s k=%llu suite_max=%s suite_avg=%s\n", series.label.c_str(),
                  static_cast<unsigned long long>(k), format_number(row.suite_max).c_str(),
                  format_number(row.suite_avg).c_str());
    }
  }
  if (!out.empty()) {
    write_atomic(out, studies.table_csv(t));
    std::printf("wrote %s\n", out.c_str());
  }
  return 0;
}

int cmd_analytic(const std::string& m_text, const std::string& k_text, double miss_rate) {
  double m = 0.0;
  if (!m_text.empty()) {
    m = parse_real(m_text, "mitigations_per_act");
  } else {
    const std::string k = k_text.empty() ? "1" : k_text;
    m = static_cast<double>(parse_count(k, "k")) / 166.0;
  }
  const double s = analytic_sampling_rate(m, miss_rate);
  std::printf("M=%s miss_rate=%s S=%s (%s%%)\n", format_number(m).c_str(), format_number(miss_rate).c_str(),
              format_number(s).c_str(), format_number(100.0 * s).c_str());
  return 0;
}

int cmd_tables(std::uint64_t seeds, const std::vector<std::string>& only, const std::string& out_dir,
               unsigned workers, std::uint64_t master_seed) {
  if (seeds == 0) throw ConfigError("seeds", "must be at least 1");
  std::vector<std::string> names = only.empty() ? table_names() : only;
  for (const auto& n : names)
    if (std::find(table_names().begin(), table_names().end(), n) == table_names().end())
      throw ConfigError("only", "unknown table '" + n + "'");
  const auto t0 = std::chrono::steady_clock::now();
  RunOptions opt;
  opt.workers = workers;
  SuiteCache cache(standard_suite(), seeds, opt);
  cache.on_computed = [&](const SweepRow& r) {
    std::fprintf(stderr, "[%7.1fs] %s k=%llu cap=%llu ev=%s p=%s suite_max=%s\n", seconds_since(t0),
                 std::string(scheme_name(r.config.policy.scheme)).c_str(),
                 static_cast<unsigned long long>(r.config.mitigations_per_trefi),
                 static_cast<unsigned long long>(r.config.tracker_capacity),
                 eviction_name(r.config.policy.eviction).c_str(), sampled_p_text(r.config.policy).c_str(),
                 format_number(r.suite_max).c_str());
  };
  SimConfig base;
  base.master_seed = master_seed;
  Studies studies(cache, base);
  std::vector<std::string> outputs;
  std::vector<int> ids;
  for (const auto& n : names) {
    const std::string path = (std::filesystem::path(out_dir) / (n + ".csv")).string();
    write_atomic(path, n == "analytic" ? studies.analytic_csv() : studies.table_csv(studies.table(n)));
    outputs.push_back(path);
    for (int id : criteria_for_table(n)) ids.push_back(id);
  }
  if (only.empty()) {
    ids.clear();
  } else {
    for (int id : {10, 12, 14, 16}) ids.push_back(id);
  }
  const auto results = studies.evaluate(ids);
  const std::string report = format_report(results);
  const std::string report_path = (std::filesystem::path(out_dir) / "report.txt").string();
  write_atomic(report_path, report);
  outputs.push_back(report_path);
  nlohmann::json resolved = config_json(base);
  resolved["seeds"] = seeds;
  resolved["tables"] = names;
  write_atomic((std::filesystem::path(out_dir) / "manifest.json").string(),
               make_manifest("tables", resolved, outputs, seconds_since(t0)).dump(2) + "\n");
  std::fputs(report.c_str(), stdout);
  bool ok = true;
  for (const auto& c : results) ok = ok && c.verdict != Verdict::Fail;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rhsim: Rowhammer aggressor-tracker simulator"};
  app.require_subcommand(1);
  unsigned workers = 0;
  app.add_option("--workers", workers, "parallel workers (default: RHSIM_WORKERS or all cores)");

  SimFlags run_flags;
  std::string run_json;
  auto* run = app.add_subcommand("run", "simulate one pattern for one tREFW window");
  add_sim_flags(run, run_flags);
  run->add_option("--json", run_json, "also write the result as JSON");

  SimFlags sweep_flags;
  std::string sweep_file, sweep_out = "sweep", sweep_seeds;
  bool quick = false;
  auto* sweep = app.add_subcommand("sweep", "sweep one axis over a pattern suite");
  sweep->add_option("spec", sweep_file, "sweep spec file (config keys plus axis, axis_values, seeds, patterns)");
  add_sim_flags(sweep, sweep_flags);
  sweep->add_flag("--quick", quick, "10 seeds");
  sweep->add_option("--seeds", sweep_seeds, "seeds per pattern");
  sweep->add_option("--out", sweep_out, "output prefix for .csv, .json and .manifest.json");

  SimFlags cmp_flags;
  std::string cmp_k = "1,2,4,8", cmp_out;
  std::uint64_t cmp_seeds = 10;
  auto* cmp = app.add_subcommand("compare", "suite max and average per scheme and k");
  add_sim_flags(cmp, cmp_flags);
  cmp->add_option("--ks", cmp_k, "comma-separated mitigations per tREFI");
  cmp->add_option("--seeds", cmp_seeds, "seeds per pattern");
  cmp->add_option("--out", cmp_out, "CSV output path");

  std::string an_m, an_k;
  double an_miss = 0.5;
  auto* an = app.add_subcommand("analytic", "optimal sampling rate S = M / miss_rate");
  an->add_option("--m", an_m, "mitigations per activation");
  an->add_option("--k", an_k, "mitigations per tREFI (M = k / 166)");
  an->add_option("--miss-rate", an_miss, "fraction of sampled activations that miss");

  std::uint64_t tb_seeds = 10, tb_seed = 1;
  std::vector<std::string> tb_only;
  std::string tb_out = "tables";
  auto* tb = app.add_subcommand("tables", "every headline table plus the criteria report");
  tb->add_option("--seeds", tb_seeds, "seeds per pattern (100 for full fidelity)");
  tb->add_option("--only", tb_only, "restrict to these tables (repeatable)");
  tb->add_option("--out", tb_out, "output directory");
  tb->add_option("--master-seed", tb_seed, "master seed");

  CLI11_PARSE(app, argc, argv);
  if (workers == 0) {
    try {
      workers = workers_default();
    } catch (const ConfigError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }

  try {
    if (*run) return cmd_run(run_flags, run_json);
    if (*sweep) return cmd_sweep(sweep_file, sweep_flags, quick, sweep_seeds, sweep_out, workers);
    if (*cmp) return cmd_compare(cmp_flags, cmp_k, cmp_seeds, cmp_out, workers);
    if (*an) return cmd_analytic(an_m, an_k, an_miss);
    if (*tb) return cmd_tables(tb_seeds, tb_only, tb_out, workers, tb_seed);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
