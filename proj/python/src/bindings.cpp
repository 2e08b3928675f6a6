#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rhsim/config.hpp"
#include "rhsim/error.hpp"
#include "rhsim/experiments.hpp"
#include "rhsim/output.hpp"

namespace py = pybind11;
using namespace rhsim;

namespace {

SimConfig config_from(const Settings& s) {
  SimConfig c;
  c.pattern = make_uniform(20, false);
  apply_settings(c, s);
  return c;
}

py::dict result_dict(const SimResult& r, const SimConfig& c) {
  py::dict d;
  d["pattern_id"] = c.pattern.id();
  d["policy"] = std::string(scheme_name(c.policy.scheme));
  d["max_disturbance"] = r.max_disturbance;
  d["avg_disturbance"] = r.avg_disturbance;
  d["mitigations_issued"] = r.mitigations_issued;
  d["scheduled_slots"] = r.scheduled_slots;
  d["empty_mitigation_slots"] = r.empty_mitigation_slots;
  d["mean_tracker_occupancy"] = r.mean_tracker_occupancy;
  d["extra_activation_fraction"] = r.extra_activation_fraction;
  d["total_activations"] = r.total_activations;
  d["victim_refreshes"] = r.victim_refreshes;
  d["ledger_total"] = r.ledger_total;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rowhammer tracker simulator bindings";
  m.attr("__version__") = kToolVersion;
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("known_keys", &known_keys, "Configuration keys accepted by simulate() and sweep_csv().");

  m.def(
      "simulate",
      [](const Settings& s) {
        const SimConfig c = config_from(s);
        SimResult r;
        {
          py::gil_scoped_release unlocked;
          r = simulate(c);
        }
        return result_dict(r, c);
      },
      py::arg("settings"), "One tREFW window; settings use the config-file keys.");

  m.def(
      "budgets",
      [](const Settings& s) {
        const SimConfig c = config_from(s);
        const DerivedBudgets b = derive_budgets(c.timings);
        py::dict d;
        d["acts_per_trefi"] = b.acts_per_trefi;
        d["acts_per_trefw"] = b.acts_per_trefw;
        d["rfm_threshold"] = c.schedule().rfm_threshold;
        return d;
      },
      py::arg("settings"));

  m.def(
      "sweep_csv",
      [](const Settings& s, unsigned workers) {
        const SweepSpec spec = sweep_from_settings(s);
        RunOptions opts;
        opts.workers = workers;
        py::gil_scoped_release unlocked;
        return sweep_csv(run_sweep(spec, opts));
      },
      py::arg("settings"), py::arg("workers") = 1, "Sweep CSV text, identical to the command-line output.");

  m.def("analytic_sampling_rate", &analytic_sampling_rate, py::arg("mitigations_per_act"),
        py::arg("miss_rate") = 0.5);

  m.def("standard_suite", [] {
    std::vector<std::string> ids;
    for (const auto& p : standard_suite()) ids.push_back(p.id());
    return ids;
  });

  m.def("graphene_capacity", [](const Settings& s, std::uint64_t trh) {
    return graphene_capacity(derive_budgets(config_from(s).timings), trh);
  }, py::arg("settings"), py::arg("trh"));

  m.def("storage_bytes", &storage_bytes, py::arg("entries_per_bank"), py::arg("bits_per_entry"),
        py::arg("banks"));
}
