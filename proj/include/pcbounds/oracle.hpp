#ifndef PCBOUNDS_ORACLE_HPP
#define PCBOUNDS_ORACLE_HPP

// Brute-force reference for the closed-form bounds. Everything here works
// directly on counterfactual joints and never calls into bounds.hpp, so the
// two can be checked against each other.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "pcbounds/core_model.hpp"

namespace pcbounds {

/// Pr(Y(0) <= t | Y(1) > t) for a fully specified outcome-pair joint.
double true_pc_simple(const CounterfactualJoint& joint, const OutcomeScale& scale);

/// The same quantity when Y(d) = Y*(M(d)) with the mediator pairs and the
/// mediator-indexed outcome pairs independent. Only switching mediators
/// (M(0) != M(1)) contribute to the numerator.
double true_pc_mediator(const CounterfactualJoint& m_joint, const CounterfactualJoint& star_joint,
                        const OutcomeScale& scale);

/// Number of free cells of an n x n joint with both margins fixed.
constexpr int coupling_free_parameters(int n) { return (n - 1) * (n - 1); }

/// Maps a point of the unit cube onto the set of joints with the given
/// margins. Free cells are filled in raster order; each fraction picks a
/// value inside the interval that keeps the remaining margins satisfiable,
/// so every point of the cube lands on a feasible joint and every vertex of
/// the cube lands on a feasible extreme configuration.
CounterfactualJoint fill_coupling(const Distribution<double>& untreated,
                                  const Distribution<double>& treated,
                                  std::span<const double> fractions, JointKind kind);

enum class EnvelopeMethod { FrechetExact, GridSearch };

constexpr std::string_view to_string(EnvelopeMethod m) {
  return m == EnvelopeMethod::FrechetExact ? "frechet-exact" : "grid-search";
}

struct EnvelopeWitness {
  /// Always present; for mediator witnesses this is the induced joint.
  CounterfactualJoint outcome;
  std::optional<CounterfactualJoint> mediator;
  std::optional<CounterfactualJoint> star;
};

struct Envelope {
  double min_pc = 0.0;
  double max_pc = 0.0;
  EnvelopeWitness argmin;
  EnvelopeWitness argmax;
  EnvelopeMethod method = EnvelopeMethod::FrechetExact;
  /// Requested grid step (grid search only).
  double resolution = 0.0;
  /// Step actually used on the outcome-pair axes after applying the budget.
  double effective_resolution = 0.0;
  std::uint64_t evaluations = 0;
};

/// Exact range of PC over all outcome-pair joints with the margins of
/// y_given_d. PC depends on the joint only through A = Pr(Y(0)<=t, Y(1)>t),
/// whose range given its two margins is the Frechet interval; both ends are
/// realised by explicit block couplings.
Envelope envelope_simple(const ConditionalTable& y_given_d, const OutcomeScale& scale);

struct GridOptions {
  double resolution = 0.01;
  /// Cap on objective evaluations; above it the outcome-pair axes are coarsened.
  std::uint64_t max_evaluations = 400'000'000;
  int refine_sweeps = 40;
  int line_points = 201;
};

/// Inner approximation of the range of PC over mediator-pair joints times
/// mediator-indexed outcome-pair joints compatible with the scenario:
/// exhaustive grid over the free parameters, then coordinate-descent
/// refinement from the best grid point in each direction. Reported extremes
/// are attained by the returned witnesses.
Envelope envelope_mediator(const MediatorScenario& scenario, const GridOptions& options = {});

struct SamplingCheck {
  std::uint64_t samples = 0;
  double min_pc = 1.0;
  double max_pc = 0.0;
  /// Samples whose PC falls outside [lower - tol, upper + tol].
  std::uint64_t violations = 0;
};

/// Draws random compatible outcome-pair joints and checks each PC against
/// the interval.
SamplingCheck sampling_check_simple(const ConditionalTable& y_given_d, const OutcomeScale& scale,
                                    double lower, double upper, std::uint64_t samples,
                                    std::uint64_t seed, double tolerance = 1e-9);

/// Same for random compatible (mediator pairs, mediator-indexed pairs).
SamplingCheck sampling_check_mediator(const MediatorScenario& scenario, double lower,
                                      double upper, std::uint64_t samples, std::uint64_t seed,
                                      double tolerance = 1e-9);

}  // namespace pcbounds

#endif  // PCBOUNDS_ORACLE_HPP
