#include "pcbounds/worked_examples.hpp"

#include <cmath>
#include <cstdio>

namespace pcbounds {

namespace {

MediatorScenario make_mediator(int levels, int threshold, Table<double> m, Table<double> y) {
  return validate_scenario(MediatorScenario{OutcomeScale::make(levels, threshold),
                                            {"D", "M", std::move(m)},
                                            {"M", "Y", std::move(y)}});
}

}  // namespace

WorkedExample worked_example(int id) {
  WorkedExample ex;
  ex.id = id;
  Table<double> m(2, 2);
  if (id == 1) {
    m << 0.85, 0.15,
         0.30, 0.70;
    Table<double> y(2, 2);
    y << 0.80, 0.20,
         0.05, 0.95;
    ex.scenario = make_mediator(1, 0, m, y);
    ex.mediator = {0.57, 0.78};
    ex.simple = {0.57, 0.95};
    ex.exact_mediator = {33.0 / 58.0, 227.0 / 290.0};
    ex.exact_simple = {33.0 / 58.0, 55.0 / 58.0};
  } else if (id == 2) {
    m << 0.85, 0.15,
         0.05, 0.95;
    Table<double> y(2, 3);
    y << 0.80, 0.10, 0.10,
         0.25, 0.05, 0.70;
    ex.scenario = make_mediator(2, 1, m, y);
    ex.mediator = {0.71, 0.89};
    ex.simple = {0.71, 1.00};
    ex.exact_mediator = {48.0 / 67.0, 60.0 / 67.0};
    ex.exact_simple = {48.0 / 67.0, 1.0};
  } else {
    throw Error(ErrorCode::SchemaError, "worked example id must be 1 or 2");
  }
  return ex;
}

MediatorScenario apply_perturbation(const MediatorScenario& scenario, const Perturbation& p) {
  MediatorScenario out = scenario;
  ConditionalTable& table = p.target == Perturbation::Target::MediatorGivenExposure
                                ? out.m_given_d
                                : out.y_given_m;
  if (p.row < 0 || p.row >= table.rows() || p.col < 0 || p.col >= table.cols()) {
    throw Error(ErrorCode::ArityMismatch, "perturbation index outside the table");
  }
  // The compensating entry sits on the other side of the threshold so the
  // shift always changes the improved mass of the row.
  Eigen::Index partner;
  if (p.target == Perturbation::Target::MediatorGivenExposure) {
    partner = 1 - p.col;
  } else {
    partner = scenario.scale.improved(p.col) ? 0 : table.cols() - 1;
  }
  table.entries(p.row, p.col) += p.delta;
  table.entries(p.row, partner) -= p.delta;
  return validate_scenario(out);
}

double round_half_up(double value, int digits) {
  const double scale = std::pow(10.0, digits);
  // The nudge keeps values such as 0.285 (stored as 0.28499...) rounding up.
  return std::floor(value * scale + 0.5 + 1e-9) / scale;
}

double truncate_to(double value, int digits) {
  const double scale = std::pow(10.0, digits);
  return std::floor(value * scale + 1e-9) / scale;
}

bool matches_reported(double computed, double reported) {
  return std::abs(round_half_up(computed, 2) - reported) < 1e-9 ||
         std::abs(truncate_to(computed, 2) - reported) < 1e-9;
}

std::string display_interval(double lower, double upper) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f ≤ PC ≤ %.2f", round_half_up(lower, 2),
                round_half_up(upper, 2));
  return buf;
}

ExampleCheck check_worked_example(int id, const std::optional<Perturbation>& perturbation) {
  const WorkedExample ex = worked_example(id);
  const MediatorScenario scenario =
      perturbation ? apply_perturbation(ex.scenario, *perturbation) : ex.scenario;

  ExampleCheck check;
  check.id = id;
  check.dominance = dominance_report(scenario);
  const BoundInterval mediator = scenario.scale.is_binary() ? bounds_mediator_binary(scenario)
                                                            : check.dominance.mediator_bounds;
  const BoundInterval simple = scenario.scale.is_binary()
                                   ? bounds_simple_binary(derive_outcome_given_exposure(scenario))
                                   : check.dominance.simple_bounds;
  auto add = [&](std::string label, double computed, double reported, double exact) {
    const bool ok = matches_reported(computed, reported) &&
                    std::abs(computed - exact) <= kExampleTolerance;
    check.values.push_back({std::move(label), computed, reported, exact, ok});
  };
  add("mediator lower", mediator.lower, ex.mediator.lower, ex.exact_mediator.lower);
  add("mediator upper", mediator.upper, ex.mediator.upper, ex.exact_mediator.upper);
  add("simple lower", simple.lower, ex.simple.lower, ex.exact_simple.lower);
  add("simple upper", simple.upper, ex.simple.upper, ex.exact_simple.upper);
  check.pass = true;
  for (const auto& v : check.values) check.pass = check.pass && v.matches;
  return check;
}

}  // namespace pcbounds
