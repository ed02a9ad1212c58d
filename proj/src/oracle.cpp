#include "pcbounds/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "pcbounds/random.hpp"

namespace pcbounds {

namespace {

void require_positive_mass(double mass) {
  if (!(mass > 0.0)) {
    throw Error(ErrorCode::UndefinedPC, "Pr(Y(1) > t) is zero; PC conditions on a null event");
  }
}

// Raster-order fill of an n x n row-major buffer. column_budget is scratch of
// size n.
void fill_into(const double* untreated, const double* treated, int n, const double* fractions,
               double* out, double* column_budget) {
  std::copy(treated, treated + n, column_budget);
  int f = 0;
  for (int i = 0; i + 1 < n; ++i) {
    double row_budget = untreated[i];
    for (int j = 0; j + 1 < n; ++j) {
      double tail = 0.0;
      for (int k = j + 1; k < n; ++k) tail += column_budget[k];
      const double lo = std::max(0.0, row_budget - tail);
      const double hi = std::max(lo, std::min(row_budget, column_budget[j]));
      const double x = lo + fractions[f++] * (hi - lo);
      out[i * n + j] = x;
      row_budget = std::max(0.0, row_budget - x);
      column_budget[j] = std::max(0.0, column_budget[j] - x);
    }
    out[i * n + n - 1] = row_budget;
    column_budget[n - 1] = std::max(0.0, column_budget[n - 1] - row_budget);
  }
  for (int j = 0; j < n; ++j) out[(n - 1) * n + j] = column_budget[j];
}

// Masses of the two cells of the outcome-pair joint that make a switching
// mediator produce a causal outcome: Pr(Y*(0)<=t, Y*(1)>t) and
// Pr(Y*(0)>t, Y*(1)<=t).
struct SwitchMasses {
  double up = 0.0;
  double down = 0.0;
};

SwitchMasses switch_masses(const double* star, int n, int threshold) {
  SwitchMasses s;
  for (int l = 0; l <= threshold; ++l) {
    for (int k = threshold + 1; k < n; ++k) {
      s.up += star[l * n + k];
      s.down += star[k * n + l];
    }
  }
  return s;
}

// Bilinear objective of the mediator grid search, parameterised by a point
// of the unit cube: coordinate 0 places Pr(M(0)=0, M(1)=0) inside its
// feasible interval, the rest go to fill_into for the outcome pairs.
class MediatorObjective {
 public:
  MediatorObjective(const MediatorScenario& scenario)
      : n_(scenario.scale.support_size()), threshold_(scenario.scale.threshold()),
        m_untreated_(scenario.m_given_d.row(0)), m_treated_(scenario.m_given_d.row(1)),
        star_untreated_(scenario.y_given_m.row(0)), star_treated_(scenario.y_given_m.row(1)),
        star_(static_cast<std::size_t>(n_ * n_)), scratch_(static_cast<std::size_t>(n_)) {
    stay_lo_ = std::max(0.0, m_untreated_(0) - m_treated_(1));
    stay_hi_ = std::max(stay_lo_, std::min(m_untreated_(0), m_treated_(0)));
    double mass = 0.0;
    for (int k = threshold_ + 1; k < n_; ++k) {
      mass += m_treated_(0) * star_untreated_(k) + m_treated_(1) * star_treated_(k);
    }
    require_positive_mass(mass);
    denominator_ = mass;
  }

  int dimension() const { return 1 + coupling_free_parameters(n_); }
  int star_dimension() const { return coupling_free_parameters(n_); }
  double denominator() const { return denominator_; }

  // Pr(M(0)=0, M(1)=1) and Pr(M(0)=1, M(1)=0) for a given fraction.
  std::array<double, 2> switching(double fraction) const {
    const double stay = stay_lo_ + fraction * (stay_hi_ - stay_lo_);
    return {std::max(0.0, m_untreated_(0) - stay), std::max(0.0, m_treated_(0) - stay)};
  }

  SwitchMasses star_masses(const double* fractions) {
    fill_into(star_untreated_.data(), star_treated_.data(), n_, fractions, star_.data(),
              scratch_.data());
    return switch_masses(star_.data(), n_, threshold_);
  }

  double pc(const std::vector<double>& point) {
    const auto [up, down] = switching(point[0]);
    const SwitchMasses s = star_masses(point.data() + 1);
    return (up * s.up + down * s.down) / denominator_;
  }

  CounterfactualJoint mediator_joint(double fraction) const {
    const std::array<double, 1> f{fraction};
    return fill_coupling(m_untreated_, m_treated_, f, JointKind::MediatorPairs);
  }

  CounterfactualJoint star_joint(std::span<const double> fractions) const {
    return fill_coupling(star_untreated_, star_treated_, fractions, JointKind::StarPairs);
  }

 private:
  int n_;
  int threshold_;
  Distribution<double> m_untreated_, m_treated_;
  Distribution<double> star_untreated_, star_treated_;
  std::vector<double> star_;
  std::vector<double> scratch_;
  double stay_lo_ = 0.0;
  double stay_hi_ = 0.0;
  double denominator_ = 0.0;
};

// Coordinate descent on the unit cube; sign = +1 maximises, -1 minimises.
void refine(MediatorObjective& objective, std::vector<double>& point, double sign,
            const GridOptions& options, std::uint64_t& evaluations) {
  double best = sign * objective.pc(point);
  const int dim = static_cast<int>(point.size());
  const int coarse = std::max(2, options.line_points);
  for (int sweep = 0; sweep < options.refine_sweeps; ++sweep) {
    bool improved = false;
    for (int axis = 0; axis < dim; ++axis) {
      const double start = point[axis];
      double best_x = start;
      auto probe = [&](double x) {
        x = std::clamp(x, 0.0, 1.0);
        point[axis] = x;
        const double v = sign * objective.pc(point);
        ++evaluations;
        if (v > best + 1e-15) {
          best = v;
          best_x = x;
        }
      };
      for (int i = 0; i < coarse; ++i) probe(static_cast<double>(i) / (coarse - 1));
      const double centre = best_x;
      const double half_width = 1.0 / (coarse - 1);
      for (int i = 0; i < coarse; ++i) {
        probe(centre - half_width + 2.0 * half_width * i / (coarse - 1));
      }
      point[axis] = best_x;
      if (best_x != start) improved = true;
    }
    if (!improved) break;
  }
}

EnvelopeWitness mediator_witness(const MediatorObjective& objective,
                                 const std::vector<double>& point) {
  EnvelopeWitness w;
  w.mediator = objective.mediator_joint(point[0]);
  w.star = objective.star_joint(std::span<const double>(point).subspan(1));
  w.outcome = compose_outcome_joint(*w.mediator, *w.star);
  return w;
}

// Joint with the given margins whose aggregated (Y(0) <= t, Y(1) > t) mass
// equals causal_mass; cells inside each aggregated block are independent.
CounterfactualJoint block_coupling(const Distribution<double>& untreated,
                                   const Distribution<double>& treated, const OutcomeScale& scale,
                                   double causal_mass) {
  const int n = scale.support_size();
  const int t = scale.threshold();
  const std::array<double, 2> row_mass{unimproved_mass(untreated, scale),
                                       improved_mass(untreated, scale)};
  const std::array<double, 2> col_mass{unimproved_mass(treated, scale),
                                       improved_mass(treated, scale)};
  std::array<std::array<double, 2>, 2> block{};
  block[0][1] = causal_mass;
  block[0][0] = std::max(0.0, row_mass[0] - causal_mass);
  block[1][1] = std::max(0.0, col_mass[1] - causal_mass);
  block[1][0] = std::max(0.0, row_mass[1] - block[1][1]);

  CounterfactualJoint joint{JointKind::OutcomePairs, Table<double>::Zero(n, n)};
  for (int l = 0; l < n; ++l) {
    const int bi = l > t ? 1 : 0;
    if (row_mass[bi] <= 0.0) continue;
    for (int k = 0; k < n; ++k) {
      const int bj = k > t ? 1 : 0;
      if (col_mass[bj] <= 0.0) continue;
      joint.entries(l, k) =
          block[bi][bj] * (untreated(l) / row_mass[bi]) * (treated(k) / col_mass[bj]);
    }
  }
  return joint;
}

double draw_fraction(Engine& engine) {
  // A fifth of the draws sit on a face of the cube so extreme joints get
  // sampled too.
  const double u = uniform01(engine);
  if (u < 0.1) return 0.0;
  if (u < 0.2) return 1.0;
  return uniform01(engine);
}

}  // namespace

double true_pc_simple(const CounterfactualJoint& joint, const OutcomeScale& scale) {
  validate_joint(joint);
  const int n = scale.support_size();
  if (joint.entries.rows() != n) {
    throw Error(ErrorCode::ArityMismatch, "outcome joint arity does not match the scale");
  }
  const int t = scale.threshold();
  double numerator = 0.0;
  double denominator = 0.0;
  for (int k = t + 1; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      denominator += joint.entries(l, k);
      if (l <= t) numerator += joint.entries(l, k);
    }
  }
  require_positive_mass(denominator);
  return numerator / denominator;
}

double true_pc_mediator(const CounterfactualJoint& m_joint, const CounterfactualJoint& star_joint,
                        const OutcomeScale& scale) {
  validate_joint(m_joint);
  validate_joint(star_joint);
  if (m_joint.entries.rows() != 2) {
    throw Error(ErrorCode::ArityMismatch, "mediator joint must be 2x2");
  }
  const int n = scale.support_size();
  if (star_joint.entries.rows() != n) {
    throw Error(ErrorCode::ArityMismatch, "outcome joint arity does not match the scale");
  }
  const int t = scale.threshold();
  const auto& m = m_joint.entries;
  const auto& s = star_joint.entries;
  const double m_treated0 = m(0, 0) + m(1, 0);
  const double m_treated1 = m(0, 1) + m(1, 1);

  double numerator = 0.0;
  double denominator = 0.0;
  for (int k = t + 1; k < n; ++k) {
    denominator += m_treated0 * s.row(k).sum() + m_treated1 * s.col(k).sum();
    for (int l = 0; l <= t; ++l) {
      numerator += s(l, k) * m(0, 1) + s(k, l) * m(1, 0);
    }
  }
  require_positive_mass(denominator);
  return numerator / denominator;
}

CounterfactualJoint fill_coupling(const Distribution<double>& untreated,
                                  const Distribution<double>& treated,
                                  std::span<const double> fractions, JointKind kind) {
  const int n = static_cast<int>(untreated.size());
  if (treated.size() != n || n < 2 ||
      static_cast<int>(fractions.size()) != coupling_free_parameters(n)) {
    throw Error(ErrorCode::ArityMismatch, "fill_coupling: margin or parameter count mismatch");
  }
  std::vector<double> cells(static_cast<std::size_t>(n * n));
  std::vector<double> scratch(static_cast<std::size_t>(n));
  fill_into(untreated.data(), treated.data(), n, fractions.data(), cells.data(), scratch.data());
  CounterfactualJoint joint{kind, Table<double>(n, n)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) joint.entries(i, j) = cells[static_cast<std::size_t>(i * n + j)];
  }
  return joint;
}

Envelope envelope_simple(const ConditionalTable& y_given_d, const OutcomeScale& scale) {
  const ConditionalTable margins = validate_table(y_given_d, 2, scale.support_size());
  const Distribution<double> untreated = margins.row(0);
  const Distribution<double> treated = margins.row(1);
  const double r = unimproved_mass(untreated, scale);
  const double s = improved_mass(treated, scale);
  require_positive_mass(s);

  const double lo = std::max(0.0, r + s - 1.0);
  const double hi = std::min(r, s);

  Envelope env;
  env.method = EnvelopeMethod::FrechetExact;
  env.argmin.outcome = block_coupling(untreated, treated, scale, lo);
  env.argmax.outcome = block_coupling(untreated, treated, scale, hi);
  env.min_pc = true_pc_simple(env.argmin.outcome, scale);
  env.max_pc = true_pc_simple(env.argmax.outcome, scale);
  env.evaluations = 2;
  return env;
}

Envelope envelope_mediator(const MediatorScenario& raw, const GridOptions& options) {
  if (!(options.resolution > 0.0) || options.resolution > 0.1) {
    throw Error(ErrorCode::InfeasibleResolution, "resolution must lie in (0, 0.1]");
  }
  const MediatorScenario scenario = validate_scenario(raw);
  MediatorObjective objective(scenario);

  const int steps = std::max(1, static_cast<int>(std::ceil(1.0 / options.resolution - 1e-9)));
  const int m_points = steps + 1;
  const int star_dim = objective.star_dimension();

  // Points per outcome-pair axis, coarsened to respect the evaluation budget.
  int star_points = m_points;
  {
    const double allowed = static_cast<double>(options.max_evaluations) / m_points;
    if (std::pow(static_cast<double>(star_points), star_dim) > allowed) {
      star_points = std::max(2, static_cast<int>(std::floor(std::pow(allowed, 1.0 / star_dim))));
      while (star_points > 2 && std::pow(static_cast<double>(star_points), star_dim) > allowed) {
        --star_points;
      }
    }
  }

  Eigen::ArrayXd up(m_points), down(m_points), values(m_points);
  for (int k = 0; k < m_points; ++k) {
    const auto sw = objective.switching(static_cast<double>(k) / steps);
    up(k) = sw[0];
    down(k) = sw[1];
  }

  // Odometer over the outcome-pair axes in lexicographic order; the mediator
  // axis is scanned innermost. Ties keep the lexicographically smallest
  // (mediator index, outcome indices) key.
  std::vector<int> index(static_cast<std::size_t>(star_dim), 0);
  std::vector<double> fractions(static_cast<std::size_t>(star_dim), 0.0);
  double best_max = -1.0, best_min = 2.0;
  int max_m = -1, min_m = -1;
  std::vector<int> max_star, min_star;
  std::uint64_t evaluations = 0;
  bool feasible = false;

  for (;;) {
    for (int a = 0; a < star_dim; ++a) {
      fractions[static_cast<std::size_t>(a)] =
          static_cast<double>(index[static_cast<std::size_t>(a)]) / (star_points - 1);
    }
    const SwitchMasses s = objective.star_masses(fractions.data());
    if (std::isfinite(s.up) && std::isfinite(s.down)) {
      feasible = true;
      values = up * s.up + down * s.down;
      // Only rescan for the index when the batch can change the incumbent.
      if (values.maxCoeff() >= best_max) {
        for (int k = 0; k < m_points; ++k) {
          const double v = values(k);
          if (v > best_max || (v == best_max && k < max_m)) {
            best_max = v;
            max_m = k;
            max_star = index;
          }
        }
      }
      if (values.minCoeff() <= best_min) {
        for (int k = 0; k < m_points; ++k) {
          const double v = values(k);
          if (v < best_min || (v == best_min && k < min_m)) {
            best_min = v;
            min_m = k;
            min_star = index;
          }
        }
      }
      evaluations += static_cast<std::uint64_t>(m_points);
    }
    int a = star_dim - 1;
    while (a >= 0 && ++index[static_cast<std::size_t>(a)] == star_points) {
      index[static_cast<std::size_t>(a)] = 0;
      --a;
    }
    if (a < 0) break;
  }
  if (!feasible) {
    throw Error(ErrorCode::InfeasibleResolution, "grid produced no feasible point");
  }

  auto to_point = [&](int m_index, const std::vector<int>& star_index) {
    std::vector<double> p(static_cast<std::size_t>(1 + star_dim));
    p[0] = static_cast<double>(m_index) / steps;
    for (int a = 0; a < star_dim; ++a) {
      p[static_cast<std::size_t>(a + 1)] =
          static_cast<double>(star_index[static_cast<std::size_t>(a)]) / (star_points - 1);
    }
    return p;
  };
  std::vector<double> max_point = to_point(max_m, max_star);
  std::vector<double> min_point = to_point(min_m, min_star);
  refine(objective, max_point, +1.0, options, evaluations);
  refine(objective, min_point, -1.0, options, evaluations);

  Envelope env;
  env.method = EnvelopeMethod::GridSearch;
  env.resolution = options.resolution;
  env.effective_resolution = 1.0 / (star_points - 1);
  env.evaluations = evaluations;
  env.argmax = mediator_witness(objective, max_point);
  env.argmin = mediator_witness(objective, min_point);
  env.max_pc = true_pc_mediator(*env.argmax.mediator, *env.argmax.star, scenario.scale);
  env.min_pc = true_pc_mediator(*env.argmin.mediator, *env.argmin.star, scenario.scale);
  return env;
}

SamplingCheck sampling_check_simple(const ConditionalTable& y_given_d, const OutcomeScale& scale,
                                    double lower, double upper, std::uint64_t samples,
                                    std::uint64_t seed, double tolerance) {
  const ConditionalTable margins = validate_table(y_given_d, 2, scale.support_size());
  require_positive_mass(improved_mass(margins.row(1), scale));
  const Distribution<double> untreated = margins.row(0);
  const Distribution<double> treated = margins.row(1);
  Engine engine(seed);
  std::vector<double> fractions(
      static_cast<std::size_t>(coupling_free_parameters(scale.support_size())));
  SamplingCheck check;
  for (std::uint64_t i = 0; i < samples; ++i) {
    for (double& f : fractions) f = draw_fraction(engine);
    const double pc =
        true_pc_simple(fill_coupling(untreated, treated, fractions, JointKind::OutcomePairs), scale);
    check.min_pc = std::min(check.min_pc, pc);
    check.max_pc = std::max(check.max_pc, pc);
    if (pc < lower - tolerance || pc > upper + tolerance) ++check.violations;
    ++check.samples;
  }
  return check;
}

SamplingCheck sampling_check_mediator(const MediatorScenario& raw, double lower, double upper,
                                      std::uint64_t samples, std::uint64_t seed,
                                      double tolerance) {
  const MediatorScenario scenario = validate_scenario(raw);
  MediatorObjective objective(scenario);
  Engine engine(seed);
  std::vector<double> point(static_cast<std::size_t>(objective.dimension()));
  SamplingCheck check;
  for (std::uint64_t i = 0; i < samples; ++i) {
    for (double& f : point) f = draw_fraction(engine);
    const CounterfactualJoint m = objective.mediator_joint(point[0]);
    const CounterfactualJoint s = objective.star_joint(std::span<const double>(point).subspan(1));
    const double pc = true_pc_mediator(m, s, scenario.scale);
    check.min_pc = std::min(check.min_pc, pc);
    check.max_pc = std::max(check.max_pc, pc);
    if (pc < lower - tolerance || pc > upper + tolerance) ++check.violations;
    ++check.samples;
  }
  return check;
}

}  // namespace pcbounds
