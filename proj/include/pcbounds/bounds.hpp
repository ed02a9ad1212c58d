#ifndef PCBOUNDS_BOUNDS_HPP
#define PCBOUNDS_BOUNDS_HPP

// Closed-form bounds on the probability of causation
//
//   PC = Pr(Y(0) <= t | Y(1) > t)
//
// for a binary exposure, with and without a binary complete mediator.
// All functions take validated inputs and are pure.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>

#include "pcbounds/core_model.hpp"

namespace pcbounds {

enum class BoundFormula {
  BinarySimple,     // risk-ratio form, binary outcome
  BinaryMediator,   // binary outcome, complete mediator
  OrdinalSimple,    // ordinal outcome
  OrdinalMediator,  // ordinal outcome, complete mediator
  OracleEnvelope,
};

constexpr std::string_view to_string(BoundFormula f) {
  switch (f) {
    case BoundFormula::BinarySimple: return "binary-simple";
    case BoundFormula::BinaryMediator: return "binary-mediator";
    case BoundFormula::OrdinalSimple: return "ordinal-simple";
    case BoundFormula::OrdinalMediator: return "ordinal-mediator";
    case BoundFormula::OracleEnvelope: return "oracle-envelope";
  }
  return "unknown";
}

/// Intermediate quantities of the mediator upper bound. The binary and
/// ordinal formulas compute these from different expressions; at T=1, t=0
/// they must coincide.
template <typename Scalar>
struct BasicMediatorBoundTerms {
  /// min(Pr(M=0|D=0), Pr(M=1|D=1)): largest feasible Pr(M(0)=0, M(1)=1).
  Scalar mediator_switch_cap{};
  /// Pr(M=0|D=1) - Pr(M=0|D=0) = Pr(M(0)=1, M(1)=0) - Pr(M(0)=0, M(1)=1).
  Scalar mediator_shift{};
  /// min(Pr(Y>t|M=1), Pr(Y<=t|M=0)): largest feasible Pr(Y*(0)<=t, Y*(1)>t).
  Scalar outcome_switch_cap{};
  /// Pr(Y>t|M=0) - Pr(Y>t|M=1).
  Scalar outcome_shift{};
  /// Pr(Y>t|D=1), the conditioning mass.
  Scalar improved_mass{};
};

using MediatorBoundTerms = BasicMediatorBoundTerms<double>;

template <typename Scalar>
struct BasicBoundInterval {
  Scalar lower{};
  Scalar upper{};
  BoundFormula formula = BoundFormula::OrdinalSimple;
  std::optional<BasicMediatorBoundTerms<Scalar>> terms;

  Scalar width() const { return upper - lower; }
  Scalar midpoint() const { return (lower + upper) / Scalar(2); }
};

using BoundInterval = BasicBoundInterval<double>;

namespace detail {

/// Slack allowed before a clamp is treated as a logic error.
inline constexpr double kTheoremTolerance = 1e-12;

template <typename Scalar>
Scalar require_conditioning_mass(Scalar mass) {
  if (!(mass > Scalar(0))) {
    throw Error(ErrorCode::UndefinedPC, "Pr(Y > t | D = 1) is zero; PC conditions on a null event");
  }
  return mass;
}

template <typename Scalar>
void require_binary(const OutcomeScale& scale) {
  if (!scale.is_binary()) {
    throw Error(ErrorCode::ArityMismatch, "binary formula called with T=" +
                                              std::to_string(scale.levels()));
  }
}

template <typename Scalar>
Scalar clamp_mediator_upper(Scalar raw, Scalar lower) {
  if (static_cast<double>(raw) > 1.0 + kTheoremTolerance ||
      static_cast<double>(raw) < static_cast<double>(lower) - kTheoremTolerance) {
    throw Error(ErrorCode::TheoremViolation,
                "mediator upper bound " + std::to_string(static_cast<double>(raw)) +
                    " outside [lower, 1]");
  }
  return std::clamp(raw, lower, Scalar(1));
}

}  // namespace detail

/// Pr(Y=1|D=1) / Pr(Y=1|D=0).
template <typename Scalar>
Scalar risk_ratio(const BasicConditionalTable<Scalar>& y_given_d) {
  if (y_given_d.rows() != 2 || y_given_d.cols() != 2) {
    throw Error(ErrorCode::ArityMismatch, "risk ratio needs a binary 2x2 P(Y|D)");
  }
  const Scalar untreated = y_given_d(0, 1);
  if (!(untreated > Scalar(0))) {
    throw Error(ErrorCode::UndefinedRiskRatio, "Pr(Y=1|D=0) is zero");
  }
  return y_given_d(1, 1) / untreated;
}

/// Binary outcome without mediator: [1 - 1/RR, Pr(Y=0|D=0) / Pr(Y=1|D=1)],
/// clamped to [0, 1]. When Pr(Y=1|D=0) = 0 the lower bound takes its
/// division-free form (Pr(Y=1|D=1) - Pr(Y=1|D=0)) / Pr(Y=1|D=1).
template <typename Scalar>
BasicBoundInterval<Scalar> bounds_simple_binary(const BasicConditionalTable<Scalar>& y_given_d) {
  if (y_given_d.rows() != 2 || y_given_d.cols() != 2) {
    throw Error(ErrorCode::ArityMismatch, "binary formula needs a 2x2 P(Y|D)");
  }
  const Scalar treated = detail::require_conditioning_mass(y_given_d(1, 1));
  Scalar lower;
  if (y_given_d(0, 1) > Scalar(0)) {
    lower = Scalar(1) - Scalar(1) / risk_ratio(y_given_d);
  } else {
    lower = (treated - y_given_d(0, 1)) / treated;
  }
  BasicBoundInterval<Scalar> out;
  out.lower = std::max(Scalar(0), lower);
  out.upper = std::min(Scalar(1), y_given_d(0, 0) / treated);
  // The two coincide when Pr(Y=1|D=1) = 1; keep rounding from crossing them.
  out.upper = std::max(out.upper, out.lower);
  out.formula = BoundFormula::BinarySimple;
  return out;
}

/// Ordinal outcome without mediator.
///   lower = max(0, (Pr(Y>t|D=1) - Pr(Y>t|D=0)) / Pr(Y>t|D=1))
///   upper = min(1, Pr(Y<=t|D=0) / Pr(Y>t|D=1))
/// These are the Frechet limits of Pr(Y(0)<=t, Y(1)>t) divided by the
/// conditioning mass.
template <typename Scalar>
BasicBoundInterval<Scalar> bounds_simple_ordinal(const BasicConditionalTable<Scalar>& y_given_d,
                                                 const OutcomeScale& scale) {
  if (y_given_d.rows() != 2 || y_given_d.cols() != scale.support_size()) {
    throw Error(ErrorCode::ArityMismatch, "P(Y|D) arity does not match the outcome scale");
  }
  const Scalar treated_improved =
      detail::require_conditioning_mass(improved_mass(y_given_d.row(1), scale));
  const Scalar untreated_improved = improved_mass(y_given_d.row(0), scale);
  const Scalar untreated_unimproved = unimproved_mass(y_given_d.row(0), scale);

  BasicBoundInterval<Scalar> out;
  out.lower = std::max(Scalar(0), (treated_improved - untreated_improved) / treated_improved);
  out.upper = std::min(Scalar(1), untreated_unimproved / treated_improved);
  out.upper = std::max(out.upper, out.lower);
  out.formula = BoundFormula::OrdinalSimple;
  return out;
}

template <typename Scalar>
BasicBoundInterval<Scalar> bounds_simple_ordinal(const BasicSimpleScenario<Scalar>& scenario) {
  return bounds_simple_ordinal(scenario.y_given_d, scenario.scale);
}

/// Binary outcome with complete mediator. The lower bound is the risk-ratio
/// lower bound on the derived P(Y|D); the upper bound is
///   (a1*a2 + (a1+b1)(a2+b2)) / Pr(Y=1|D=1)
/// with a1 = min(m0+, m+1), a2 = min(y*0+, y*+1), b1 = m+0 - m0+,
/// b2 = y*+0 - y*0+.
template <typename Scalar>
BasicBoundInterval<Scalar> bounds_mediator_binary(const BasicMediatorScenario<Scalar>& scenario) {
  detail::require_binary<Scalar>(scenario.scale);
  const auto& m = scenario.m_given_d;
  const auto& ys = scenario.y_given_m;
  const auto y_given_d = derive_outcome_given_exposure(m, ys);

  BasicMediatorBoundTerms<Scalar> terms;
  terms.improved_mass = detail::require_conditioning_mass(y_given_d(1, 1));
  terms.mediator_switch_cap = std::min(m(0, 0), m(1, 1));
  terms.outcome_switch_cap = std::min(ys(0, 0), ys(1, 1));
  terms.mediator_shift = m(1, 0) - m(0, 0);
  terms.outcome_shift = ys(1, 0) - ys(0, 0);

  const Scalar a1 = terms.mediator_switch_cap;
  const Scalar a2 = terms.outcome_switch_cap;
  const Scalar numerator =
      a1 * a2 + (a1 + terms.mediator_shift) * (a2 + terms.outcome_shift);

  BasicBoundInterval<Scalar> out;
  out.lower = bounds_simple_binary(y_given_d).lower;
  out.upper = detail::clamp_mediator_upper(numerator / terms.improved_mass, out.lower);
  out.formula = BoundFormula::BinaryMediator;
  out.terms = terms;
  return out;
}

/// Ordinal outcome with complete mediator.
///   lower = max(0, shift_M * shift_Y / Pr(Y>t|D=1))
///   upper = (cap_M*cap_Y + (cap_M + shift_M)(cap_Y + shift_Y)) / Pr(Y>t|D=1)
/// where the caps and shifts are the fields of MediatorBoundTerms.
template <typename Scalar>
BasicBoundInterval<Scalar> bounds_mediator_ordinal(const BasicMediatorScenario<Scalar>& scenario) {
  const OutcomeScale& scale = scenario.scale;
  const auto& m = scenario.m_given_d;
  const auto& ys = scenario.y_given_m;
  if (m.rows() != 2 || m.cols() != 2 || ys.rows() != 2 || ys.cols() != scale.support_size()) {
    throw Error(ErrorCode::ArityMismatch, "mediator tables do not match the outcome scale");
  }
  const auto y_given_d = derive_outcome_given_exposure(m, ys);

  BasicMediatorBoundTerms<Scalar> terms;
  terms.improved_mass =
      detail::require_conditioning_mass(improved_mass(y_given_d.row(1), scale));
  terms.mediator_switch_cap = std::min(m(0, 0), m(1, 1));
  terms.mediator_shift = m(1, 0) - m(0, 0);
  terms.outcome_switch_cap =
      std::min(improved_mass(ys.row(1), scale), unimproved_mass(ys.row(0), scale));
  terms.outcome_shift = improved_mass(ys.row(0), scale) - improved_mass(ys.row(1), scale);

  const Scalar cap_m = terms.mediator_switch_cap;
  const Scalar cap_y = terms.outcome_switch_cap;
  const Scalar numerator =
      cap_m * cap_y + (cap_m + terms.mediator_shift) * (cap_y + terms.outcome_shift);

  BasicBoundInterval<Scalar> out;
  out.lower = std::max(Scalar(0), terms.mediator_shift * terms.outcome_shift / terms.improved_mass);
  out.upper = detail::clamp_mediator_upper(numerator / terms.improved_mass, out.lower);
  out.formula = BoundFormula::OrdinalMediator;
  out.terms = terms;
  return out;
}

template <typename Scalar>
struct BasicDominanceReport {
  BasicBoundInterval<Scalar> simple_bounds;
  BasicBoundInterval<Scalar> mediator_bounds;
  bool lower_equal = false;
  /// simple upper minus mediator upper.
  Scalar upper_improvement{};
};

using DominanceReport = BasicDominanceReport<double>;

/// Compares the bounds that ignore the mediator (on the derived P(Y|D)) with
/// the mediator bounds. Lower bounds must coincide and the mediator upper
/// bound may not exceed the simple one; anything else is a TheoremViolation.
template <typename Scalar>
BasicDominanceReport<Scalar> dominance_report(const BasicMediatorScenario<Scalar>& scenario) {
  BasicDominanceReport<Scalar> report;
  report.simple_bounds = bounds_simple_ordinal(derive_outcome_given_exposure(scenario),
                                               scenario.scale);
  report.mediator_bounds = bounds_mediator_ordinal(scenario);
  const double lower_gap = std::abs(static_cast<double>(report.simple_bounds.lower) -
                                    static_cast<double>(report.mediator_bounds.lower));
  report.lower_equal = lower_gap <= detail::kTheoremTolerance;
  report.upper_improvement = report.simple_bounds.upper - report.mediator_bounds.upper;
  if (!report.lower_equal) {
    throw Error(ErrorCode::TheoremViolation,
                "lower bounds differ by " + std::to_string(lower_gap));
  }
  if (static_cast<double>(report.upper_improvement) < -detail::kTheoremTolerance) {
    throw Error(ErrorCode::TheoremViolation,
                "mediator upper bound exceeds simple upper bound by " +
                    std::to_string(-static_cast<double>(report.upper_improvement)));
  }
  return report;
}

}  // namespace pcbounds

#endif  // PCBOUNDS_BOUNDS_HPP
