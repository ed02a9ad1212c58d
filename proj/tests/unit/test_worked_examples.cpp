#include "doctest.h"

#include "pcbounds/worked_examples.hpp"

using namespace pcbounds;

TEST_CASE("worked examples reproduce their published values") {
  for (int id : {1, 2}) {
    CAPTURE(id);
    const auto check = check_worked_example(id);
    CHECK(check.pass);
    REQUIRE(check.values.size() == 4);
    for (const auto& v : check.values) {
      CAPTURE(v.label);
      CHECK(v.matches);
      CHECK(std::abs(v.computed - v.exact) <= 1e-12);
    }
    CHECK(check.dominance.lower_equal);
  }
  const auto one = check_worked_example(1);
  CHECK(one.dominance.mediator_bounds.lower == doctest::Approx(0.5689655172413793).epsilon(1e-12));
  CHECK(one.dominance.mediator_bounds.upper == doctest::Approx(0.7827586206896552).epsilon(1e-12));
  CHECK(one.dominance.simple_bounds.upper == doctest::Approx(0.9482758620689655).epsilon(1e-12));

  const auto two = check_worked_example(2);
  CHECK(two.dominance.mediator_bounds.lower == doctest::Approx(48.0 / 67.0).epsilon(1e-12));
  CHECK(two.dominance.mediator_bounds.upper == doctest::Approx(60.0 / 67.0).epsilon(1e-12));
  CHECK(two.dominance.simple_bounds.upper == 1.0);
}

TEST_CASE("unknown example id") {
  try {
    worked_example(3);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaError);
  }
}

TEST_CASE("rounding helpers") {
  CHECK(round_half_up(0.785, 2) == doctest::Approx(0.79));
  CHECK(round_half_up(0.7827, 2) == doctest::Approx(0.78));
  CHECK(round_half_up(0.125, 2) == doctest::Approx(0.13));
  CHECK(truncate_to(0.8955, 2) == doctest::Approx(0.89));
  CHECK(truncate_to(0.29999999999, 2) == doctest::Approx(0.30));
  CHECK(matches_reported(0.8955, 0.89));
  CHECK(matches_reported(0.8955, 0.90));
  CHECK(matches_reported(0.5690, 0.57));
  CHECK_FALSE(matches_reported(0.5690, 0.55));
  CHECK_FALSE(matches_reported(0.5690, 0.58));
  CHECK_FALSE(matches_reported(0.8955, 0.88));
}

TEST_CASE("display_interval") {
  CHECK(display_interval(0.5689655, 0.7827586) == "0.57 ≤ PC ≤ 0.78");
  CHECK(display_interval(0.5689655, 0.9482758) == "0.57 ≤ PC ≤ 0.95");
  CHECK(display_interval(0.0, 1.0) == "0.00 ≤ PC ≤ 1.00");
}

TEST_CASE("apply_perturbation keeps rows stochastic") {
  const auto ex = worked_example(2);
  const Perturbation p{Perturbation::Target::OutcomeGivenMediator, 1, 2, -0.02};
  const auto s = apply_perturbation(ex.scenario, p);
  CHECK(s.y_given_m(1, 2) == doctest::Approx(0.68));
  CHECK(s.y_given_m(1, 0) == doctest::Approx(0.27));
  CHECK(s.y_given_m(1, 1) == doctest::Approx(0.05));

  const Perturbation low{Perturbation::Target::OutcomeGivenMediator, 0, 1, 0.02};
  const auto l = apply_perturbation(ex.scenario, low);
  CHECK(l.y_given_m(0, 1) == doctest::Approx(0.12));
  CHECK(l.y_given_m(0, 2) == doctest::Approx(0.08));
  CHECK(s.y_given_m.row(1).sum() == doctest::Approx(1.0).epsilon(1e-12));

  const Perturbation too_far{Perturbation::Target::MediatorGivenExposure, 1, 1, 0.06};
  CHECK_THROWS_AS(apply_perturbation(ex.scenario, too_far), Error);
}

TEST_CASE("a 0.02 perturbation of any entry breaks the check") {
  for (int id : {1, 2}) {
    const auto ex = worked_example(id);
    for (auto target : {Perturbation::Target::MediatorGivenExposure,
                        Perturbation::Target::OutcomeGivenMediator}) {
      const auto& t = target == Perturbation::Target::MediatorGivenExposure
                          ? ex.scenario.m_given_d
                          : ex.scenario.y_given_m;
      for (int r = 0; r < t.rows(); ++r)
        for (int c = 0; c < t.cols(); ++c)
          for (double delta : {0.02, -0.02}) {
            CAPTURE(id);
            CAPTURE(r);
            CAPTURE(c);
            CAPTURE(delta);
            const Perturbation p{target, r, c, delta};
            try {
              CHECK_FALSE(check_worked_example(id, p).pass);
            } catch (const Error& e) {
              // Pushing a zero-adjacent cell negative is itself a failure.
              CHECK(e.is_input_error());
            }
          }
    }
  }
}
