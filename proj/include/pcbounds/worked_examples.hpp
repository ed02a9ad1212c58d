#ifndef PCBOUNDS_WORKED_EXAMPLES_HPP
#define PCBOUNDS_WORKED_EXAMPLES_HPP

// The two published worked examples and the check that recomputes them.

#include <optional>
#include <string>
#include <vector>

#include "pcbounds/bounds.hpp"
#include "pcbounds/core_model.hpp"

namespace pcbounds {

struct ReportedInterval {
  double lower;
  double upper;
};

struct WorkedExample {
  int id = 0;
  MediatorScenario scenario;
  /// Two-decimal values as published.
  ReportedInterval mediator;
  ReportedInterval simple;
  /// Hand-derived exact values of the same intervals.
  ReportedInterval exact_mediator;
  ReportedInterval exact_simple;
};

/// A recomputed value must lie this close to its exact reference.
inline constexpr double kExampleTolerance = 1e-3;

/// id 1: binary outcome; id 2: three-level outcome, t = 1.
/// Throws SchemaError for any other id.
WorkedExample worked_example(int id);

/// Shifts one table entry by delta and takes the same amount from an entry
/// of the same row on the other side of the threshold, so the row stays
/// stochastic.
struct Perturbation {
  enum class Target { MediatorGivenExposure, OutcomeGivenMediator } target;
  int row = 0;
  int col = 0;
  double delta = 0.0;
};

MediatorScenario apply_perturbation(const MediatorScenario& scenario, const Perturbation& p);

double round_half_up(double value, int digits);
double truncate_to(double value, int digits);

/// The published examples are not rounded consistently (some values are
/// rounded half-up, some truncated), so a two-decimal figure is accepted
/// when it equals either reduction of the computed value.
bool matches_reported(double computed, double reported);

/// "0.57 ≤ PC ≤ 0.78", half-up rounding.
std::string display_interval(double lower, double upper);

struct ReportedValueCheck {
  std::string label;
  double computed = 0.0;
  double reported = 0.0;
  double exact = 0.0;
  /// Published figure reproduced and exact reference met.
  bool matches = false;
};

struct ExampleCheck {
  int id = 0;
  DominanceReport dominance;
  std::vector<ReportedValueCheck> values;
  bool pass = false;
};

ExampleCheck check_worked_example(int id, const std::optional<Perturbation>& perturbation = {});

}  // namespace pcbounds

#endif  // PCBOUNDS_WORKED_EXAMPLES_HPP
