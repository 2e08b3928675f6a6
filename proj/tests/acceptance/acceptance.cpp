// Full acceptance run over the 500-pattern suite. One line per criterion;
// exit status 1 when any criterion fails.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "oracle/instances.hpp"
#include "rhsim/config.hpp"
#include "rhsim/output.hpp"
#include "rhsim/studies.hpp"

using namespace rhsim;

namespace {

std::uint64_t env_count(const char* name, std::uint64_t fallback) {
  const char* v = std::getenv(name);
  return v && *v ? parse_count(v, name) : fallback;
}

Criterion oracle_criterion() {
  Criterion c{15, "oracle equivalence", Verdict::Fail, ""};
  const auto a = oracle::check_instances(200, 15);
  std::uint64_t violations = 0, worst = 0;
  for (std::uint64_t entries : {1, 4, 8}) {
    const auto g = oracle::check_graphene(entries, 50, 20000, 100 + entries);
    violations += g.violations;
    worst = std::max(worst, g.worst_gap);
  }
  c.verdict = a.mismatches == 0 && violations == 0 ? Verdict::Pass : Verdict::Fail;
  c.detail = std::to_string(a.instances) + " random instances, " + std::to_string(a.mismatches) +
             " mismatches" + (a.first_mismatch.empty() ? "" : " (first " + a.first_mismatch + ")") +
             "; graphene undercount bound violations " + std::to_string(violations) +
             " (largest gap " + std::to_string(worst) + ")";
  return c;
}

}  // namespace

int main() {
  try {
    const std::uint64_t seeds = env_count("RHSIM_ACCEPTANCE_SEEDS", 10);
    RunOptions opts;
    opts.workers = static_cast<unsigned>(env_count("RHSIM_WORKERS", 0));
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    std::cerr << "acceptance: 500 patterns, " << seeds << " seeds, " << resolve_workers(opts.workers)
              << " workers\n";

    SuiteCache cache(standard_suite(), seeds, opts);
    cache.on_computed = [&](const SweepRow& row) {
      std::fprintf(stderr, "  [%7.1fs] point %zu %s p=%s k=%llu cap=%llu %s -> %s\n", elapsed(), cache.size(),
                   std::string(scheme_name(row.config.policy.scheme)).c_str(),
                   sampled_p_text(row.config.policy).c_str(),
                   static_cast<unsigned long long>(row.config.mitigations_per_trefi),
                   static_cast<unsigned long long>(row.config.tracker_capacity),
                   eviction_name(row.config.policy.eviction).c_str(), format_number(row.suite_max).c_str());
    };
    Studies studies(cache);
    std::vector<Criterion> results;
    for (int id = 1; id <= 17; ++id) {
      Criterion c = id == 15 ? oracle_criterion() : studies.evaluate_one(id);
      std::cout << format_report({c}) << std::flush;
      results.push_back(std::move(c));
    }
    int failed = 0;
    for (const auto& c : results) failed += c.verdict != Verdict::Pass;
    std::printf("acceptance: %zu criteria, %d not passing, %zu suite points, %.0f s\n", results.size(), failed,
                cache.size(), elapsed());
    return failed ? 1 : 0;
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << "\n";
    return 2;
  }
}
