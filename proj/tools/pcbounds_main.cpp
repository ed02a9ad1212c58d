// pcbounds: bounds on the probability of causation from observed tables.
//
// Exit codes: 0 success, 2 input error, 3 undefined PC, 4 oracle containment
// violation, 5 worked-example mismatch.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "pcbounds/bounds.hpp"
#include "pcbounds/oracle.hpp"
#include "pcbounds/scenario_io.hpp"
#include "pcbounds/simulator.hpp"
#include "pcbounds/worked_examples.hpp"

namespace {

using namespace pcbounds;
using nlohmann::json;

enum ExitCode {
  kOk = 0,
  kInputError = 2,
  kUndefinedPc = 3,
  kContainmentViolation = 4,
  kExampleMismatch = 5,
};

constexpr double kContainmentTolerance = 1e-9;

std::string full(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

void print_interval(const std::string& title, const BoundInterval& b) {
  std::cout << title << " [" << to_string(b.formula) << "]\n"
            << "  lower = " << full(b.lower) << "\n"
            << "  upper = " << full(b.upper) << "\n"
            << "  " << display_interval(b.lower, b.upper) << "\n";
  if (b.terms) {
    const auto& t = *b.terms;
    std::cout << "  terms: mediator_switch_cap=" << full(t.mediator_switch_cap)
              << " mediator_shift=" << full(t.mediator_shift)
              << " outcome_switch_cap=" << full(t.outcome_switch_cap)
              << " outcome_shift=" << full(t.outcome_shift)
              << " improved_mass=" << full(t.improved_mass) << "\n";
  }
}

// Binary inputs use the binary formulas for reporting; the dominance
// comparison always goes through the ordinal ones.
BoundInterval simple_bounds_for(const SimpleScenario& s) {
  return s.scale.is_binary() ? bounds_simple_binary(s.y_given_d) : bounds_simple_ordinal(s);
}

BoundInterval mediator_bounds_for(const MediatorScenario& s) {
  return s.scale.is_binary() ? bounds_mediator_binary(s) : bounds_mediator_ordinal(s);
}

// --- bounds ---------------------------------------------------------------

int cmd_bounds(const std::string& input, bool as_json) {
  const Scenario scenario = load_scenario_document(input);
  json report = {{"scenario", to_document(scenario)}};
  if (const auto* s = std::get_if<SimpleScenario>(&scenario)) {
    const BoundInterval simple = simple_bounds_for(*s);
    report["simple_bounds"] = to_json(simple);
    if (!as_json) {
      std::cout << "scenario: simple (T=" << s->scale.levels() << ", t=" << s->scale.threshold()
                << ")\n";
      print_interval("simple bounds", simple);
    }
  } else {
    const auto& m = std::get<MediatorScenario>(scenario);
    const BoundInterval mediator = mediator_bounds_for(m);
    const BoundInterval simple = simple_bounds_for(collapse_mediator(m));
    const DominanceReport dominance = dominance_report(m);
    report["mediator_bounds"] = to_json(mediator);
    report["simple_bounds"] = to_json(simple);
    report["dominance"] = to_json(dominance);
    if (!as_json) {
      std::cout << "scenario: mediator (T=" << m.scale.levels() << ", t=" << m.scale.threshold()
                << ")\n";
      print_interval("mediator bounds", mediator);
      print_interval("simple bounds (mediator ignored)", simple);
      std::cout << "dominance: lower_equal=" << (dominance.lower_equal ? "true" : "false")
                << " upper_improvement=" << full(dominance.upper_improvement) << "\n";
    }
  }
  if (as_json) std::cout << report.dump(2) << "\n";
  return kOk;
}

// --- oracle ---------------------------------------------------------------

struct ContainmentLine {
  std::string label;
  double env_min, env_max, lower, upper;
  bool ok() const {
    return env_min >= lower - kContainmentTolerance && env_max <= upper + kContainmentTolerance;
  }
};

void print_joint(const std::string& label, const CounterfactualJoint& joint) {
  std::cout << "    " << label << ":";
  for (Eigen::Index r = 0; r < joint.entries.rows(); ++r) {
    std::cout << (r == 0 ? " [" : "; ");
    for (Eigen::Index c = 0; c < joint.entries.cols(); ++c) {
      std::cout << (c ? " " : "") << std::setprecision(6) << joint.entries(r, c);
    }
  }
  std::cout << "]\n";
}

void print_witness(const std::string& label, const EnvelopeWitness& w) {
  std::cout << "  witness " << label << "\n";
  if (w.mediator) print_joint("mediator pairs", *w.mediator);
  if (w.star) print_joint("mediator-indexed outcome pairs", *w.star);
  print_joint("outcome pairs", w.outcome);
}

int cmd_oracle(const std::string& input, double resolution, std::uint64_t samples,
               std::uint64_t seed, double corrupt, bool as_json) {
  const Scenario scenario = load_scenario_document(input);
  std::vector<ContainmentLine> lines;
  json report = {{"scenario", to_document(scenario)}};

  auto corrupted = [corrupt](BoundInterval b) {
    b.lower += corrupt;
    b.upper -= corrupt;
    return b;
  };

  const SimpleScenario simple =
      std::holds_alternative<SimpleScenario>(scenario)
          ? std::get<SimpleScenario>(scenario)
          : collapse_mediator(std::get<MediatorScenario>(scenario));
  const BoundInterval simple_bounds = corrupted(bounds_simple_ordinal(simple));
  const Envelope simple_env = envelope_simple(simple.y_given_d, simple.scale);
  const SamplingCheck simple_sampled = sampling_check_simple(
      simple.y_given_d, simple.scale, simple_bounds.lower, simple_bounds.upper, samples, seed);
  lines.push_back({"simple envelope", simple_env.min_pc, simple_env.max_pc, simple_bounds.lower,
                   simple_bounds.upper});
  lines.push_back({"simple sampled", simple_sampled.min_pc, simple_sampled.max_pc,
                   simple_bounds.lower, simple_bounds.upper});
  report["simple"] = {{"bounds", to_json(simple_bounds)},
                      {"envelope", to_json(simple_env)},
                      {"sampled", {{"samples", simple_sampled.samples},
                                   {"min_pc", simple_sampled.min_pc},
                                   {"max_pc", simple_sampled.max_pc},
                                   {"violations", simple_sampled.violations}}}};

  std::optional<Envelope> mediator_env;
  std::optional<BoundInterval> mediator_bounds;
  if (const auto* m = std::get_if<MediatorScenario>(&scenario)) {
    mediator_bounds = corrupted(bounds_mediator_ordinal(*m));
    GridOptions options;
    options.resolution = resolution;
    mediator_env = envelope_mediator(*m, options);
    const SamplingCheck sampled = sampling_check_mediator(
        *m, mediator_bounds->lower, mediator_bounds->upper, samples, seed);
    lines.push_back({"mediator grid envelope", mediator_env->min_pc, mediator_env->max_pc,
                     mediator_bounds->lower, mediator_bounds->upper});
    lines.push_back({"mediator sampled", sampled.min_pc, sampled.max_pc, mediator_bounds->lower,
                     mediator_bounds->upper});
    report["mediator"] = {{"bounds", to_json(*mediator_bounds)},
                          {"envelope", to_json(*mediator_env)},
                          {"sampled", {{"samples", sampled.samples},
                                       {"min_pc", sampled.min_pc},
                                       {"max_pc", sampled.max_pc},
                                       {"violations", sampled.violations}}}};
  }

  bool ok = true;
  json containment = json::array();
  for (const auto& l : lines) {
    ok = ok && l.ok();
    containment.push_back({{"check", l.label},
                           {"ok", l.ok()},
                           {"lower_slack", l.env_min - l.lower},
                           {"upper_slack", l.upper - l.env_max}});
  }
  report["containment"] = containment;
  report["ok"] = ok;

  if (as_json) {
    std::cout << report.dump(2) << "\n";
  } else {
    for (const auto& l : lines) {
      std::cout << (l.ok() ? "OK   " : "FAIL ") << l.label << ": [" << full(l.env_min) << ", "
                << full(l.env_max) << "] within [" << full(l.lower) << ", " << full(l.upper)
                << "]  slack lower=" << std::setprecision(3) << std::scientific
                << (l.env_min - l.lower) << " upper=" << (l.upper - l.env_max)
                << std::defaultfloat << "\n";
    }
    std::cout << "simple envelope (" << to_string(simple_env.method) << ")\n";
    print_witness("min", simple_env.argmin);
    print_witness("max", simple_env.argmax);
    if (mediator_env) {
      std::cout << "mediator envelope (" << to_string(mediator_env->method)
                << ", resolution=" << mediator_env->resolution
                << ", effective=" << mediator_env->effective_resolution
                << ", evaluations=" << mediator_env->evaluations << ")\n";
      print_witness("min", mediator_env->argmin);
      print_witness("max", mediator_env->argmax);
    }
  }
  return ok ? kOk : kContainmentViolation;
}

// --- simulate -------------------------------------------------------------

int cmd_simulate(std::size_t samples, int levels, int threshold, std::uint64_t seed,
                 const std::string& out_path, bool target_pc, bool as_json) {
  ExperimentOptions options;
  options.n_samples = samples;
  options.scale = OutcomeScale::make(levels, threshold);
  options.seed = seed;
  options.target_pc = target_pc;
  const Experiment experiment = run_bounds_experiment(options);

  std::ostream* summary_out = &std::cout;
  if (out_path.empty()) {
    export_figure_data(experiment.records, std::cout);
    summary_out = &std::cerr;
  } else {
    std::ofstream file(out_path, std::ios::binary);
    if (!file) throw Error(ErrorCode::SchemaError, "cannot write " + out_path);
    export_figure_data(experiment.records, file);
  }

  const ExperimentSummary& s = experiment.summary;
  if (as_json) {
    *summary_out << json{{"n_samples", s.n_samples},
                         {"mean_simple_gap", s.mean_simple_gap},
                         {"mean_mediator_gap", s.mean_mediator_gap},
                         {"mean_abs_midpoint_error_simple", s.mean_abs_midpoint_error_simple},
                         {"mean_abs_midpoint_error_mediator", s.mean_abs_midpoint_error_mediator},
                         {"simple_gap_offset_from_reference", s.simple_gap_offset()},
                         {"mediator_gap_offset_from_reference", s.mediator_gap_offset()}}
                        .dump(2)
                 << "\n";
  } else {
    *summary_out << "samples: " << s.n_samples << "\n"
                 << "mean simple gap:   " << full(s.mean_simple_gap) << " (reference "
                 << kReferenceSimpleGap << ", offset " << s.simple_gap_offset() << ")\n"
                 << "mean mediator gap: " << full(s.mean_mediator_gap) << " (reference "
                 << kReferenceMediatorGap << ", offset " << s.mediator_gap_offset() << ")\n"
                 << "mean |midpoint - true PC|, simple:   "
                 << full(s.mean_abs_midpoint_error_simple) << "\n"
                 << "mean |midpoint - true PC|, mediator: "
                 << full(s.mean_abs_midpoint_error_mediator) << "\n";
  }
  return kOk;
}

// --- example --------------------------------------------------------------

std::optional<Perturbation> parse_perturbation(const std::string& text) {
  if (text.empty()) return std::nullopt;
  // <m|y>:<row>:<col>:<delta>
  char which = 0;
  int row = 0, col = 0;
  double delta = 0.0;
  if (std::sscanf(text.c_str(), "%c:%d:%d:%lf", &which, &row, &col, &delta) != 4 ||
      (which != 'm' && which != 'y')) {
    throw Error(ErrorCode::SchemaError, "perturbation must look like m:ROW:COL:DELTA or y:ROW:COL:DELTA");
  }
  return Perturbation{which == 'm' ? Perturbation::Target::MediatorGivenExposure
                                   : Perturbation::Target::OutcomeGivenMediator,
                      row, col, delta};
}

int cmd_example(int id, const std::string& perturb, bool as_json) {
  const ExampleCheck check = check_worked_example(id, parse_perturbation(perturb));
  if (as_json) {
    json values = json::array();
    for (const auto& v : check.values) {
      values.push_back({{"label", v.label},
                        {"computed", v.computed},
                        {"reported", v.reported},
                        {"exact", v.exact},
                        {"matches", v.matches}});
    }
    std::cout << json{{"id", id}, {"pass", check.pass}, {"values", values}}.dump(2) << "\n";
  } else {
    std::cout << "worked example " << id << "\n";
    for (const auto& v : check.values) {
      char line[200];
      std::snprintf(line, sizeof line, "  %-15s computed %.6f  exact %.6f  reported %.2f  %s\n",
                    v.label.c_str(), v.computed, v.exact, v.reported,
                    v.matches ? "ok" : "MISMATCH");
      std::cout << line;
    }
    const auto& d = check.dominance;
    std::cout << "  mediator: " << display_interval(check.values[0].computed, check.values[1].computed)
              << "\n  simple:   "
              << display_interval(check.values[2].computed, check.values[3].computed) << "\n"
              << "  upper improvement from mediator: " << full(d.upper_improvement) << "\n"
              << (check.pass ? "PASS" : "FAIL") << "\n";
  }
  return check.pass ? kOk : kExampleMismatch;
}

int report_error(const Error& e) {
  std::cerr << error_json(e).dump() << "\n";
  if (e.code() == ErrorCode::UndefinedPC) return kUndefinedPc;
  return kInputError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounds on the probability of causation for binary exposures"};
  app.require_subcommand(1);

  bool as_json = false;
  app.add_flag("--json", as_json, "Machine-readable output");

  std::string input;
  double resolution = 0.01;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 42;
  int levels = 2, threshold = 1;
  std::string out_path;
  bool target_pc = false;
  int example_id = 0;
  std::string perturb;
  double corrupt = 0.0;

  auto* bounds = app.add_subcommand("bounds", "Closed-form bounds for a scenario document");
  bounds->add_option("--input,input", input, "Scenario JSON file")->required();
  bounds->add_flag("--json", as_json, "Machine-readable output");

  auto* oracle = app.add_subcommand("oracle", "Check closed-form bounds against the oracle");
  oracle->add_option("--input,input", input, "Scenario JSON file")->required();
  oracle->add_option("--resolution", resolution, "Grid step for the mediator search")
      ->check(CLI::Range(1e-6, 0.1));
  oracle->add_option("--samples", samples, "Random compatible joints to sample");
  oracle->add_option("--seed", seed, "Sampling seed");
  oracle->add_option("--corrupt-bounds", corrupt)->group("");  // test hook
  oracle->add_flag("--json", as_json, "Machine-readable output");

  std::size_t sim_samples = 100;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo study of bound widths");
  simulate->add_option("--samples", sim_samples, "Number of samples")->check(CLI::PositiveNumber);
  simulate->add_option("--T", levels, "Highest outcome level");
  simulate->add_option("--t", threshold, "Improvement threshold (event is Y > t)");
  simulate->add_option("--seed", seed, "Base seed");
  simulate->add_option("--out", out_path, "CSV output path (stdout when omitted)");
  simulate->add_flag("--target-pc", target_pc, "Spread true PC values over 100 bins");
  simulate->add_flag("--json", as_json, "Machine-readable summary");

  auto* example = app.add_subcommand("example", "Recompute a built-in worked example");
  example->add_option("--id", example_id, "1 or 2")->required()->check(CLI::IsMember({1, 2}));
  example->add_option("--perturb", perturb)->group("");  // test hook
  example->add_flag("--json", as_json, "Machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*bounds) return cmd_bounds(input, as_json);
    if (*oracle) return cmd_oracle(input, resolution, samples, seed, corrupt, as_json);
    if (*simulate) {
      return cmd_simulate(sim_samples, levels, threshold, seed, out_path, target_pc, as_json);
    }
    if (*example) return cmd_example(example_id, perturb, as_json);
  } catch (const Error& e) {
    return report_error(e);
  }
  return kInputError;
}
