#include "doctest.h"

#include <sstream>

#include "pcbounds/simulator.hpp"
#include "support/reference.hpp"

using namespace pcbounds;

namespace {

struct CsvRow {
  std::size_t index;
  double true_pc, med_lower, med_upper, simple_mid, med_mid;
};

std::vector<CsvRow> parse_csv(const std::string& text, std::string& header) {
  std::istringstream in(text);
  std::getline(in, header);
  std::vector<CsvRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    CsvRow r{};
    char c;
    std::istringstream ls(line);
    ls >> r.index >> c >> r.true_pc >> c >> r.med_lower >> c >> r.med_upper >> c >>
        r.simple_mid >> c >> r.med_mid;
    REQUIRE(ls);
    rows.push_back(r);
  }
  return rows;
}

MediatorSample chain_sample(std::uint64_t, std::uint64_t) {
  Table<double> m(2, 2), s(3, 3);
  m << 0, 1, 0, 0;
  s << 0, 0, 1, 0, 0, 0, 0, 0, 0;
  return make_mediator_sample({JointKind::MediatorPairs, m}, {JointKind::StarPairs, s},
                              OutcomeScale::make(2, 1));
}

}  // namespace

TEST_CASE("sample_mediator_scenario") {
  const auto scale = OutcomeScale::make(2, 1);
  SUBCASE("deterministic per seed") {
    const auto a = sample_mediator_scenario(123, scale);
    const auto b = sample_mediator_scenario(123, scale);
    CHECK(a.true_pc == b.true_pc);
    CHECK(a.m_joint.entries == b.m_joint.entries);
    CHECK(a.star_joint.entries == b.star_joint.entries);
    CHECK(sample_mediator_scenario(124, scale).true_pc != a.true_pc);
  }
  SUBCASE("true PC matches the three-level closed expression") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto s = sample_mediator_scenario(seed, scale);
      const auto& y = s.star_joint.entries;
      const auto& m = s.m_joint.entries;
      const double m_plus0 = m(0, 0) + m(1, 0);
      const double m_plus1 = m(0, 1) + m(1, 1);
      const double y_plus2 = y.col(2).sum();
      const double y_2plus = y.row(2).sum();
      const double expected = ((y(0, 2) + y(1, 2)) * m(0, 1) + (y(2, 0) + y(2, 1)) * m(1, 0)) /
                              (y_plus2 * m_plus1 + y_2plus * m_plus0);
      CHECK(s.true_pc == doctest::Approx(expected).epsilon(1e-12));
      CHECK(y_plus2 * m_plus1 + y_2plus * m_plus0 >= kMinConditioningMass);
    }
  }
  SUBCASE("scenario carries the joints' margins and contains the true PC") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto s = sample_mediator_scenario(seed, OutcomeScale::make(1 + seed % 3, 0));
      CHECK(compatibility_check(s.m_joint, s.scenario.m_given_d).compatible);
      CHECK(compatibility_check(s.star_joint, s.scenario.y_given_m).compatible);
      const auto r = evaluate_sample(seed, s);
      CHECK(r.true_pc >= r.mediator_bounds.lower - 1e-9);
      CHECK(r.true_pc <= r.mediator_bounds.upper + 1e-9);
      CHECK(r.true_pc >= r.simple_bounds.lower - 1e-9);
      CHECK(r.true_pc <= r.simple_bounds.upper + 1e-9);
    }
  }
  SUBCASE("binned draws land in their bin") {
    for (int bin : {0, 37, 50, 99}) {
      const auto s = sample_mediator_scenario_in_bin(7, scale, bin, 100);
      CHECK(s.true_pc >= bin / 100.0);
      CHECK(s.true_pc <= (bin + 1) / 100.0);
    }
  }
  SUBCASE("unreachable bin gives up") {
    try {
      sample_mediator_scenario_in_bin(1, scale, 12345, 1'000'000'000);
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DegenerateGeneration);
    }
  }
}

TEST_CASE("run_bounds_experiment") {
  ExperimentOptions opts;
  opts.n_samples = 100;
  opts.scale = OutcomeScale::make(2, 1);
  opts.seed = 42;
  const auto ex = run_bounds_experiment(opts);
  REQUIRE(ex.records.size() == 100);

  double simple_sum = 0.0, mediator_sum = 0.0, simple_err = 0.0, mediator_err = 0.0;
  for (std::size_t i = 0; i < ex.records.size(); ++i) {
    const auto& r = ex.records[i];
    if (i > 0) CHECK(ex.records[i - 1].true_pc <= r.true_pc);
    CHECK(r.true_pc >= r.mediator_bounds.lower - 1e-9);
    CHECK(r.true_pc <= r.mediator_bounds.upper + 1e-9);
    CHECK(r.true_pc >= r.simple_bounds.lower - 1e-9);
    CHECK(r.true_pc <= r.simple_bounds.upper + 1e-9);
    CHECK(r.mediator_gap <= r.simple_gap + 1e-12);
    CHECK(r.simple_gap == r.simple_bounds.upper - r.simple_bounds.lower);
    simple_sum += r.simple_gap;
    mediator_sum += r.mediator_gap;
    simple_err += std::abs(r.simple_midpoint - r.true_pc);
    mediator_err += std::abs(r.mediator_midpoint - r.true_pc);
  }
  CHECK(std::abs(ex.summary.mean_simple_gap - simple_sum / 100) <= 1e-12);
  CHECK(std::abs(ex.summary.mean_mediator_gap - mediator_sum / 100) <= 1e-12);
  CHECK(std::abs(ex.summary.mean_abs_midpoint_error_simple - simple_err / 100) <= 1e-12);
  CHECK(std::abs(ex.summary.mean_abs_midpoint_error_mediator - mediator_err / 100) <= 1e-12);
  CHECK(ex.summary.mean_mediator_gap < ex.summary.mean_simple_gap);

  const auto again = run_bounds_experiment(opts);
  CHECK(export_figure_data(again.records) == export_figure_data(ex.records));
}

TEST_CASE("target-pc mode spreads samples across bins") {
  ExperimentOptions opts;
  opts.n_samples = 100;
  opts.target_pc = true;
  const auto ex = run_bounds_experiment(opts);
  for (std::size_t i = 0; i < ex.records.size(); ++i) {
    CHECK(ex.records[i].true_pc >= i / 100.0);
    CHECK(ex.records[i].true_pc <= (i + 1) / 100.0);
  }
}

TEST_CASE("deterministic-chain override") {
  ExperimentOptions opts;
  opts.n_samples = 1;
  opts.generator = chain_sample;
  const auto ex = run_bounds_experiment(opts);
  REQUIRE(ex.records.size() == 1);
  const auto& r = ex.records.front();
  CHECK(r.true_pc == 1.0);
  CHECK(r.simple_gap == 0.0);
  CHECK(r.mediator_gap == 0.0);
  CHECK(r.simple_midpoint == 1.0);
  CHECK(r.mediator_midpoint == 1.0);
}

TEST_CASE("export_figure_data") {
  ExperimentOptions opts;
  opts.n_samples = 100;
  const auto ex = run_bounds_experiment(opts);
  const std::string csv = export_figure_data(ex.records);
  std::string header;
  const auto rows = parse_csv(csv, header);
  CHECK(header == "sample_index,true_pc,med_lower,med_upper,simple_mid,med_mid");
  REQUIRE(rows.size() == 100);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = ex.records[i];
    CHECK(rows[i].index == i);
    CHECK(std::abs(rows[i].true_pc - r.true_pc) <= 1e-6);
    CHECK(std::abs(rows[i].med_lower - r.mediator_bounds.lower) <= 1e-6);
    CHECK(std::abs(rows[i].med_upper - r.mediator_bounds.upper) <= 1e-6);
    CHECK(std::abs(rows[i].simple_mid - r.simple_midpoint) <= 1e-6);
    CHECK(std::abs(rows[i].med_mid - r.mediator_midpoint) <= 1e-6);
  }
  // Six fractional digits on every value.
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  const auto comma = line.find(',');
  const auto dot = line.find('.', comma);
  CHECK(line.find(',', dot) - dot - 1 == 6);

  try {
    export_figure_data({});
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyExperiment);
  }
}
