#ifndef PCBOUNDS_SIMULATOR_HPP
#define PCBOUNDS_SIMULATOR_HPP

// Monte Carlo study of the bounds: draw full counterfactual specifications,
// compute the true PC and both closed-form intervals, and summarise the
// widths and midpoint errors.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pcbounds/bounds.hpp"
#include "pcbounds/core_model.hpp"

namespace pcbounds {

/// One fully specified mediator model together with what it implies.
struct MediatorSample {
  MediatorScenario scenario;
  CounterfactualJoint m_joint;
  CounterfactualJoint star_joint;
  double true_pc = 0.0;
};

/// Minimum Pr(Y > t | D = 1) accepted by the generator.
inline constexpr double kMinConditioningMass = 0.05;
/// Generator gives up after this many consecutive rejections.
inline constexpr std::uint64_t kMaxRejections = 100'000;

/// Draws both joints from the flat Dirichlet over their cells, keeps the
/// first draw whose conditioning mass reaches kMinConditioningMass, and
/// returns it with the observable scenario it induces.
MediatorSample sample_mediator_scenario(std::uint64_t seed, const OutcomeScale& scale);

/// Keeps redrawing until the true PC falls in [bin / bins, (bin + 1) / bins)
/// (last bin closed). Draws cycle through cell weights Exp(1)^k for
/// k = 1, 2, 4, 8 so that near-deterministic joints, and with them PC values
/// close to 0 and 1, come up often enough.
MediatorSample sample_mediator_scenario_in_bin(std::uint64_t seed, const OutcomeScale& scale,
                                               int bin, int bins);

/// Builds a sample from explicit joints (e.g. degenerate test cases).
MediatorSample make_mediator_sample(const CounterfactualJoint& m_joint,
                                    const CounterfactualJoint& star_joint,
                                    const OutcomeScale& scale);

struct ExperimentRecord {
  std::uint64_t sample_id = 0;
  double true_pc = 0.0;
  BoundInterval simple_bounds;
  BoundInterval mediator_bounds;
  double simple_midpoint = 0.0;
  double mediator_midpoint = 0.0;
  double simple_gap = 0.0;
  double mediator_gap = 0.0;
};

/// Mean widths reported for the original three-level study.
inline constexpr double kReferenceSimpleGap = 0.58;
inline constexpr double kReferenceMediatorGap = 0.28;

struct ExperimentSummary {
  std::size_t n_samples = 0;
  double mean_simple_gap = 0.0;
  double mean_mediator_gap = 0.0;
  double mean_abs_midpoint_error_simple = 0.0;
  double mean_abs_midpoint_error_mediator = 0.0;

  double simple_gap_offset() const { return mean_simple_gap - kReferenceSimpleGap; }
  double mediator_gap_offset() const { return mean_mediator_gap - kReferenceMediatorGap; }
};

struct Experiment {
  /// Sorted by true_pc ascending (ties by sample_id).
  std::vector<ExperimentRecord> records;
  ExperimentSummary summary;
};

/// Generator hook: (per-sample seed, sample index) -> sample.
using SampleGenerator = std::function<MediatorSample(std::uint64_t, std::uint64_t)>;

struct ExperimentOptions {
  std::size_t n_samples = 100;
  OutcomeScale scale = OutcomeScale::make(2, 1);
  std::uint64_t seed = 42;
  /// Spread true PC values over 100 equal-width bins.
  bool target_pc = false;
  /// Overrides the Dirichlet generator when set.
  SampleGenerator generator;
};

/// Seed for sample `index` of a run seeded with `seed`.
constexpr std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) {
  return seed ^ index;
}

ExperimentRecord evaluate_sample(std::uint64_t sample_id, const MediatorSample& sample);

ExperimentSummary summarize(const std::vector<ExperimentRecord>& records);

Experiment run_bounds_experiment(const ExperimentOptions& options);

/// CSV with header
///   sample_index,true_pc,med_lower,med_upper,simple_mid,med_mid
/// and six fractional digits per value; sample_index is the position after
/// sorting.
void export_figure_data(const std::vector<ExperimentRecord>& records, std::ostream& out);
std::string export_figure_data(const std::vector<ExperimentRecord>& records);

inline constexpr const char* kFigureCsvHeader =
    "sample_index,true_pc,med_lower,med_upper,simple_mid,med_mid";

}  // namespace pcbounds

#endif  // PCBOUNDS_SIMULATOR_HPP
