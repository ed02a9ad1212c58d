#ifndef PCBOUNDS_CORE_MODEL_HPP
#define PCBOUNDS_CORE_MODEL_HPP

// Probability objects for binary-exposure causation bounds.
//
// Notation used throughout the library (rows of a table are indexed by the
// conditioning variable, columns by the outcome variable):
//
//   P(Y | D) row 0 = Pr(Y = . | D = 0)   ("untreated" outcome margin)
//   P(Y | D) row 1 = Pr(Y = . | D = 1)   ("treated" outcome margin)
//   P(M | D) row d = Pr(M = . | D = d)
//   P(Y | M) row m = Pr(Y = . | M = m)
//
// A counterfactual joint J over a variable V has J(p, q) = Pr(V(0) = p, V(1) = q),
// so its row sums are the do(0) margin and its column sums the do(1) margin.
// For the mediator-indexed outcome V = Y*, V(m) is the outcome with the
// mediator set to m, and Y*(M(d)) = Y(d).
//
// The population-level quantities computed here stand in for an individual's
// probability of causation only under the usual no-confounding and
// exchangeability premises; those are preconditions, not checked properties.

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "pcbounds/errors.hpp"

namespace pcbounds {

/// Absolute tolerance on row sums and margin agreement.
inline constexpr double kProbabilityTolerance = 1e-9;

template <typename Scalar>
using Table = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Distribution = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// Ordinal outcome support {0..levels} and the improvement threshold; the
/// event of interest is Y > threshold.
class OutcomeScale {
 public:
  OutcomeScale() = default;

  static OutcomeScale make(int levels, int threshold) {
    if (levels < 1) {
      throw Error(ErrorCode::ThresholdOutOfRange,
                  "outcome needs at least two levels, got T=" + std::to_string(levels));
    }
    if (threshold < 0 || threshold >= levels) {
      throw Error(ErrorCode::ThresholdOutOfRange,
                  "threshold must satisfy 0 <= t < T, got t=" + std::to_string(threshold) +
                      " with T=" + std::to_string(levels));
    }
    return OutcomeScale(levels, threshold);
  }

  static OutcomeScale binary() { return OutcomeScale(1, 0); }

  int levels() const noexcept { return levels_; }
  int threshold() const noexcept { return threshold_; }
  /// Number of distinct outcome values, T + 1.
  int support_size() const noexcept { return levels_ + 1; }
  /// Number of values strictly above the threshold.
  int improved_count() const noexcept { return levels_ - threshold_; }
  bool is_binary() const noexcept { return levels_ == 1; }
  bool improved(int value) const noexcept { return value > threshold_; }

  friend bool operator==(const OutcomeScale&, const OutcomeScale&) = default;

 private:
  OutcomeScale(int levels, int threshold) : levels_(levels), threshold_(threshold) {}

  int levels_ = 1;
  int threshold_ = 0;
};

/// Pr(Y > t) for a distribution over {0..T}.
template <typename Derived>
typename Derived::Scalar improved_mass(const Eigen::MatrixBase<Derived>& dist,
                                       const OutcomeScale& scale) {
  return dist.tail(scale.improved_count()).sum();
}

/// Pr(Y <= t) for a distribution over {0..T}.
template <typename Derived>
typename Derived::Scalar unimproved_mass(const Eigen::MatrixBase<Derived>& dist,
                                         const OutcomeScale& scale) {
  return dist.head(scale.threshold() + 1).sum();
}

/// Row-stochastic table, entries(r, c) = P(col = c | row = r).
template <typename Scalar>
struct BasicConditionalTable {
  std::string row_variable;
  std::string col_variable;
  Table<Scalar> entries;

  BasicConditionalTable() = default;
  BasicConditionalTable(std::string row_var, std::string col_var, Table<Scalar> values)
      : row_variable(std::move(row_var)), col_variable(std::move(col_var)),
        entries(std::move(values)) {}

  Eigen::Index rows() const { return entries.rows(); }
  Eigen::Index cols() const { return entries.cols(); }
  Scalar operator()(Eigen::Index r, Eigen::Index c) const { return entries(r, c); }
  auto row(Eigen::Index r) const { return entries.row(r); }
};

using ConditionalTable = BasicConditionalTable<double>;

namespace detail {

inline std::string describe(const std::string& row_var, const std::string& col_var) {
  return "P(" + col_var + "|" + row_var + ")";
}

}  // namespace detail

/// Checks shape, nonnegativity, and row sums. Rows within tolerance of one
/// are renormalized; larger deviations are rejected, never rescaled.
template <typename Scalar>
BasicConditionalTable<Scalar> validate_table(const BasicConditionalTable<Scalar>& raw,
                                             Eigen::Index expected_rows,
                                             Eigen::Index expected_cols) {
  const std::string name = detail::describe(raw.row_variable, raw.col_variable);
  if (raw.rows() != expected_rows || raw.cols() != expected_cols) {
    std::ostringstream msg;
    msg << name << " has shape " << raw.rows() << "x" << raw.cols() << ", expected "
        << expected_rows << "x" << expected_cols;
    throw Error(ErrorCode::ArityMismatch, msg.str());
  }
  BasicConditionalTable<Scalar> out = raw;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      const Scalar v = out.entries(r, c);
      if (!std::isfinite(static_cast<double>(v))) {
        std::ostringstream msg;
        msg << name << " entry (" << r << ", " << c << ") is not finite";
        throw Error(ErrorCode::NonFiniteProbability, msg.str());
      }
      if (v < Scalar(0)) {
        std::ostringstream msg;
        msg << name << " entry (" << r << ", " << c << ") = " << v << " is negative";
        throw Error(ErrorCode::NegativeProbability, msg.str());
      }
    }
    const Scalar sum = out.entries.row(r).sum();
    const double deviation = static_cast<double>(sum) - 1.0;
    if (std::abs(deviation) > kProbabilityTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << name << " row " << r << " sums to " << sum << " (deviation " << deviation << ")";
      throw Error(ErrorCode::RowSumViolation, msg.str());
    }
    out.entries.row(r) /= sum;
  }
  return out;
}

/// Observable input with only exposure and outcome.
template <typename Scalar>
struct BasicSimpleScenario {
  OutcomeScale scale;
  BasicConditionalTable<Scalar> y_given_d;
};

/// Observable input where the exposure acts on the outcome only through a
/// binary mediator.
template <typename Scalar>
struct BasicMediatorScenario {
  OutcomeScale scale;
  BasicConditionalTable<Scalar> m_given_d;
  BasicConditionalTable<Scalar> y_given_m;
};

using SimpleScenario = BasicSimpleScenario<double>;
using MediatorScenario = BasicMediatorScenario<double>;
using Scenario = std::variant<SimpleScenario, MediatorScenario>;

template <typename Scalar>
BasicSimpleScenario<Scalar> validate_scenario(const BasicSimpleScenario<Scalar>& raw) {
  const OutcomeScale scale = OutcomeScale::make(raw.scale.levels(), raw.scale.threshold());
  return {scale, validate_table(raw.y_given_d, 2, scale.support_size())};
}

template <typename Scalar>
BasicMediatorScenario<Scalar> validate_scenario(const BasicMediatorScenario<Scalar>& raw) {
  const OutcomeScale scale = OutcomeScale::make(raw.scale.levels(), raw.scale.threshold());
  return {scale, validate_table(raw.m_given_d, 2, 2),
          validate_table(raw.y_given_m, 2, scale.support_size())};
}

inline Scenario validate_scenario(const Scenario& raw) {
  return std::visit([](const auto& s) -> Scenario { return validate_scenario(s); }, raw);
}

/// P(Y | D) implied by P(M | D) and P(Y | M) under complete mediation
/// (law of total probability over M).
template <typename Scalar>
BasicConditionalTable<Scalar> derive_outcome_given_exposure(
    const BasicConditionalTable<Scalar>& m_given_d,
    const BasicConditionalTable<Scalar>& y_given_m) {
  if (m_given_d.rows() != 2 || m_given_d.cols() != 2 || y_given_m.rows() != 2 ||
      y_given_m.cols() < 2) {
    throw Error(ErrorCode::ArityMismatch,
                "mediator derivation needs a 2x2 P(M|D) and a 2x(T+1) P(Y|M)");
  }
  return {m_given_d.row_variable, y_given_m.col_variable,
          m_given_d.entries * y_given_m.entries};
}

template <typename Scalar>
BasicConditionalTable<Scalar> derive_outcome_given_exposure(
    const BasicMediatorScenario<Scalar>& scenario) {
  return derive_outcome_given_exposure(scenario.m_given_d, scenario.y_given_m);
}

template <typename Scalar>
BasicSimpleScenario<Scalar> collapse_mediator(const BasicMediatorScenario<Scalar>& scenario) {
  return {scenario.scale, derive_outcome_given_exposure(scenario)};
}

enum class JointKind { OutcomePairs, MediatorPairs, StarPairs };

/// Distribution of a potential-outcome pair, entries(p, q) = Pr(V(0)=p, V(1)=q).
template <typename Scalar>
struct BasicCounterfactualJoint {
  JointKind kind = JointKind::OutcomePairs;
  Table<Scalar> entries;

  Distribution<Scalar> untreated_margin() const { return entries.rowwise().sum().transpose(); }
  Distribution<Scalar> treated_margin() const { return entries.colwise().sum(); }
};

using CounterfactualJoint = BasicCounterfactualJoint<double>;

template <typename Scalar>
void validate_joint(const BasicCounterfactualJoint<Scalar>& joint) {
  if (joint.entries.rows() != joint.entries.cols() || joint.entries.rows() < 2) {
    throw Error(ErrorCode::ArityMismatch, "counterfactual joint must be square with arity >= 2");
  }
  if (!joint.entries.allFinite()) {
    throw Error(ErrorCode::NonFiniteProbability, "counterfactual joint has non-finite cells");
  }
  if ((joint.entries.array() < Scalar(0)).any()) {
    throw Error(ErrorCode::NegativeProbability, "counterfactual joint has negative cells");
  }
  const double deviation = static_cast<double>(joint.entries.sum()) - 1.0;
  if (std::abs(deviation) > kProbabilityTolerance) {
    throw Error(ErrorCode::RowSumViolation,
                "counterfactual joint total mass deviates from 1 by " + std::to_string(deviation));
  }
}

struct MarginViolation {
  enum class Axis { Untreated, Treated } axis;
  Eigen::Index index;
  double expected;
  double actual;
};

struct CompatibilityReport {
  bool compatible = true;
  std::vector<MarginViolation> violations;

  explicit operator bool() const { return compatible; }
  std::string to_string() const;
};

inline std::string CompatibilityReport::to_string() const {
  if (compatible) return "compatible";
  std::ostringstream out;
  out.precision(12);
  for (const auto& v : violations) {
    out << (v.axis == MarginViolation::Axis::Untreated ? "row sum " : "column sum ") << v.index
        << ": expected " << v.expected << ", got " << v.actual << "\n";
  }
  return out.str();
}

/// Row sums of the joint must reproduce row 0 of the margins table (the do(0)
/// distribution) and column sums must reproduce row 1 (the do(1) distribution).
template <typename Scalar>
CompatibilityReport compatibility_check(const BasicCounterfactualJoint<Scalar>& joint,
                                        const BasicConditionalTable<Scalar>& margins) {
  const Eigen::Index n = joint.entries.rows();
  if (joint.entries.cols() != n || margins.rows() != 2 || margins.cols() != n) {
    throw Error(ErrorCode::ArityMismatch, "joint and margins arities differ");
  }
  CompatibilityReport report;
  const Distribution<Scalar> untreated = joint.untreated_margin();
  const Distribution<Scalar> treated = joint.treated_margin();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double want0 = static_cast<double>(margins(0, i));
    const double got0 = static_cast<double>(untreated(i));
    if (!(std::abs(want0 - got0) <= kProbabilityTolerance)) {
      report.violations.push_back({MarginViolation::Axis::Untreated, i, want0, got0});
    }
    const double want1 = static_cast<double>(margins(1, i));
    const double got1 = static_cast<double>(treated(i));
    if (!(std::abs(want1 - got1) <= kProbabilityTolerance)) {
      report.violations.push_back({MarginViolation::Axis::Treated, i, want1, got1});
    }
  }
  report.compatible = report.violations.empty();
  return report;
}

/// Independent coupling of the two margins of a table.
template <typename Scalar>
BasicCounterfactualJoint<Scalar> product_coupling(const BasicConditionalTable<Scalar>& margins,
                                                  JointKind kind = JointKind::OutcomePairs) {
  return {kind, margins.row(0).transpose() * margins.row(1)};
}

/// Margins table (row 0 = do(0), row 1 = do(1)) carried by a joint.
template <typename Scalar>
BasicConditionalTable<Scalar> margins_of(const BasicCounterfactualJoint<Scalar>& joint,
                                         std::string row_var, std::string col_var) {
  Table<Scalar> m(2, joint.entries.cols());
  m.row(0) = joint.untreated_margin();
  m.row(1) = joint.treated_margin();
  return {std::move(row_var), std::move(col_var), std::move(m)};
}

/// Outcome-pair joint induced by a mediator-pair joint and an independent
/// mediator-indexed outcome-pair joint, using Y(d) = Y*(M(d)).
template <typename Scalar>
BasicCounterfactualJoint<Scalar> compose_outcome_joint(
    const BasicCounterfactualJoint<Scalar>& m_joint,
    const BasicCounterfactualJoint<Scalar>& star_joint) {
  const auto& m = m_joint.entries;
  const auto& s = star_joint.entries;
  Table<Scalar> y = m(0, 1) * s + m(1, 0) * s.transpose();
  y.diagonal() += m(0, 0) * s.rowwise().sum() + m(1, 1) * s.colwise().sum().transpose();
  return {JointKind::OutcomePairs, std::move(y)};
}

}  // namespace pcbounds

#endif  // PCBOUNDS_CORE_MODEL_HPP
