#include "pcbounds/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "pcbounds/oracle.hpp"
#include "pcbounds/random.hpp"

namespace pcbounds {

namespace {

// Normalised Exp(1)^power cells: power 1 is the flat Dirichlet, larger
// powers put the mass on fewer cells.
Table<double> dirichlet_cells(Engine& engine, int n, int power) {
  Table<double> cells(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) cells(i, j) = std::pow(standard_exponential(engine), power);
  }
  return cells / cells.sum();
}

// One candidate draw; nullopt when the conditioning mass is below the floor.
std::optional<MediatorSample> draw_candidate(Engine& engine, const OutcomeScale& scale,
                                             int power = 1) {
  CounterfactualJoint m{JointKind::MediatorPairs, dirichlet_cells(engine, 2, power)};
  CounterfactualJoint star{JointKind::StarPairs,
                           dirichlet_cells(engine, scale.support_size(), power)};
  const double treated_improved = m.treated_margin()(0) * improved_mass(star.untreated_margin(), scale) +
                                  m.treated_margin()(1) * improved_mass(star.treated_margin(), scale);
  if (treated_improved < kMinConditioningMass) return std::nullopt;
  return make_mediator_sample(m, star, scale);
}

[[noreturn]] void give_up(std::uint64_t seed) {
  throw Error(ErrorCode::DegenerateGeneration,
              "no acceptable draw after " + std::to_string(kMaxRejections) +
                  " attempts (seed " + std::to_string(seed) + ")");
}

}  // namespace

MediatorSample make_mediator_sample(const CounterfactualJoint& m_joint,
                                    const CounterfactualJoint& star_joint,
                                    const OutcomeScale& scale) {
  MediatorSample sample;
  sample.m_joint = m_joint;
  sample.star_joint = star_joint;
  MediatorScenario raw{scale, margins_of(m_joint, "D", "M"), margins_of(star_joint, "M", "Y")};
  sample.scenario = validate_scenario(raw);
  sample.true_pc = true_pc_mediator(m_joint, star_joint, scale);
  return sample;
}

MediatorSample sample_mediator_scenario(std::uint64_t seed, const OutcomeScale& scale) {
  Engine engine(seed);
  for (std::uint64_t attempt = 0; attempt < kMaxRejections; ++attempt) {
    if (auto sample = draw_candidate(engine, scale)) return *std::move(sample);
  }
  give_up(seed);
}

MediatorSample sample_mediator_scenario_in_bin(std::uint64_t seed, const OutcomeScale& scale,
                                               int bin, int bins) {
  if (bins < 1 || bin < 0 || bin >= bins) {
    throw Error(ErrorCode::SchemaError, "PC bin out of range");
  }
  const double lo = static_cast<double>(bin) / bins;
  const double hi = static_cast<double>(bin + 1) / bins;
  Engine engine(seed);
  for (std::uint64_t attempt = 0; attempt < kMaxRejections; ++attempt) {
    // Cycling the power keeps the extreme bins reachable.
    auto sample = draw_candidate(engine, scale, 1 << (attempt % 4));
    if (!sample) continue;
    const double pc = sample->true_pc;
    if (pc >= lo && (pc < hi || (bin == bins - 1 && pc <= 1.0))) return *std::move(sample);
  }
  give_up(seed);
}

ExperimentRecord evaluate_sample(std::uint64_t sample_id, const MediatorSample& sample) {
  ExperimentRecord r;
  r.sample_id = sample_id;
  r.true_pc = sample.true_pc;
  const DominanceReport dominance = dominance_report(sample.scenario);
  r.simple_bounds = dominance.simple_bounds;
  r.mediator_bounds = dominance.mediator_bounds;
  r.simple_midpoint = r.simple_bounds.midpoint();
  r.mediator_midpoint = r.mediator_bounds.midpoint();
  r.simple_gap = r.simple_bounds.width();
  r.mediator_gap = r.mediator_bounds.width();
  return r;
}

ExperimentSummary summarize(const std::vector<ExperimentRecord>& records) {
  ExperimentSummary s;
  s.n_samples = records.size();
  if (records.empty()) return s;
  for (const auto& r : records) {
    s.mean_simple_gap += r.simple_gap;
    s.mean_mediator_gap += r.mediator_gap;
    s.mean_abs_midpoint_error_simple += std::abs(r.simple_midpoint - r.true_pc);
    s.mean_abs_midpoint_error_mediator += std::abs(r.mediator_midpoint - r.true_pc);
  }
  const double n = static_cast<double>(records.size());
  s.mean_simple_gap /= n;
  s.mean_mediator_gap /= n;
  s.mean_abs_midpoint_error_simple /= n;
  s.mean_abs_midpoint_error_mediator /= n;
  return s;
}

Experiment run_bounds_experiment(const ExperimentOptions& options) {
  if (options.n_samples < 1) {
    throw Error(ErrorCode::EmptyExperiment, "experiment needs at least one sample");
  }
  constexpr int kBins = 100;
  Experiment experiment;
  experiment.records.reserve(options.n_samples);
  for (std::size_t i = 0; i < options.n_samples; ++i) {
    const std::uint64_t seed = sample_seed(options.seed, i);
    MediatorSample sample;
    if (options.generator) {
      sample = options.generator(seed, i);
    } else if (options.target_pc) {
      sample = sample_mediator_scenario_in_bin(seed, options.scale, static_cast<int>(i % kBins),
                                               kBins);
    } else {
      sample = sample_mediator_scenario(seed, options.scale);
    }
    experiment.records.push_back(evaluate_sample(i, sample));
  }
  std::sort(experiment.records.begin(), experiment.records.end(),
            [](const ExperimentRecord& a, const ExperimentRecord& b) {
              if (a.true_pc != b.true_pc) return a.true_pc < b.true_pc;
              return a.sample_id < b.sample_id;
            });
  experiment.summary = summarize(experiment.records);
  return experiment;
}

void export_figure_data(const std::vector<ExperimentRecord>& records, std::ostream& out) {
  if (records.empty()) {
    throw Error(ErrorCode::EmptyExperiment, "no records to export");
  }
  out << kFigureCsvHeader << '\n';
  char line[256];
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    std::snprintf(line, sizeof line, "%zu,%.6f,%.6f,%.6f,%.6f,%.6f\n", i, r.true_pc,
                  r.mediator_bounds.lower, r.mediator_bounds.upper, r.simple_midpoint,
                  r.mediator_midpoint);
    out << line;
  }
}

std::string export_figure_data(const std::vector<ExperimentRecord>& records) {
  std::ostringstream out;
  export_figure_data(records, out);
  return out.str();
}

}  // namespace pcbounds
