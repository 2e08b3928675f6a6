#pragma once

#include <string>
#include <vector>

#include "rhsim/experiments.hpp"

namespace rhsim {

struct TableLine {
  std::string series;
  const SweepRow* row = nullptr;  // owned by the SuiteCache
};

struct StudyTable {
  std::string name;
  std::vector<TableLine> lines;
};

enum class Verdict : std::uint8_t { Pass, Fail, Skipped };

struct Criterion {
  int id = 0;
  std::string title;
  Verdict verdict = Verdict::Skipped;
  std::string detail;
};

std::string_view verdict_name(Verdict v);

/// bathtub, prss_lfu_rand, tracker_size, num_mitig, max_dist, avg_dist,
/// repl_sens, analytic.
const std::vector<std::string>& table_names();

/// Criteria whose data comes from the given table.
std::vector<int> criteria_for_table(const std::string& name);

/// The headline studies over one pattern suite. Every point goes through the
/// cache, so overlapping studies and criteria share runs.
class Studies {
 public:
  explicit Studies(SuiteCache& cache, SimConfig base = {});

  StudyTable table(const std::string& name);
  std::string table_csv(const StudyTable& t) const;
  /// Analytic vs empirical sampling rates; runs the num_mitig sweeps.
  std::string analytic_csv();

  /// Criteria 1..17 except 15, which needs an independent oracle and is
  /// reported as skipped. An empty list evaluates all of them.
  std::vector<Criterion> evaluate(std::vector<int> ids = {});
  Criterion evaluate_one(int id);

  const SweepRow& proteas(double p, std::uint64_t k, EvictionRule e = EvictionRule::random(),
                          std::uint64_t capacity = 16);
  const SweepRow& pmss(double p, std::uint64_t k = 1);
  const SweepRow& baseline(std::uint64_t k, EvictionRule e = EvictionRule::lfu());
  const SweepRow& para(double p, std::uint64_t k);
  const SweepRow& scheme(const PolicySpec& policy, std::uint64_t k, std::uint64_t capacity = 16);

  /// Grid index of the smallest suite_max of PROTEAS (RANDOM) at k.
  std::size_t proteas_argmin(std::uint64_t k);

 private:
  SuiteCache& cache_;
  SimConfig base_;
};

/// "criterion NN VERDICT title: detail" lines.
std::string format_report(const std::vector<Criterion>& results);

}  // namespace rhsim
