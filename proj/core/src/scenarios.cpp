#include "heatsum/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace heatsum::validate {

namespace {

using estimator::EstimateValue;
using estimator::TheoremCase;
using geometry::EndSpec;
using geometry::kOffsetE;
using geometry::Point;
using geometry::SumSpec;
using oracle::StarGrid;

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return out;
}

// One theorem-case experiment: which points to probe at which times.
struct CasePlan {
  std::string case_name;
  TheoremCase expected = TheoremCase::OnDiagonal;
  enum class Kind { OnDiag, FixedPair, Proportional, Medium } kind = Kind::OnDiag;
  int end_x = 0;
  int end_y = 0;
  double abs_x = 0.0;                // FixedPair
  std::vector<double> abs_y_list;    // FixedPair
  double scale_x = 0.0;              // Proportional / Medium
  std::vector<double> scale_y_list;  // Proportional
  std::vector<double> t_values;
  std::optional<double> slope_target;
  double max_gauss = 8.0;  // FixedPair samples beyond this payload are not planned
};

std::vector<CasePlan> make_plans(const ScenarioConfig& config) {
  const SumSpec& sum = config.sum;
  std::vector<int> crit, sub;
  for (int i = 0; i < sum.k(); ++i)
    (sum.ends[i].is_critical() ? crit : sub).push_back(i);

  const int t_count = std::max(config.times.count, 21);
  auto base_times = logspace(config.times.lo, config.times.hi, t_count);
  std::vector<CasePlan> plans;

  // Proportional points |x| = scale*sqrt(t) must clear the center-snap pad;
  // a branch whose admissible t-span falls under 1.5 decades is not planned.
  auto proportional_times = [&](double min_scale, double t_hi) {
    double t_lo = std::max(config.times.lo,
                           std::pow((kOffsetE + 1.8) / min_scale, 2.0));
    if (!(t_hi > t_lo) || std::log10(t_hi / t_lo) < 1.5) return std::vector<double>{};
    return logspace(t_lo, t_hi, t_count);
  };

  {
    CasePlan p;
    p.case_name = "on_diagonal";
    p.expected = TheoremCase::OnDiagonal;
    p.kind = CasePlan::Kind::OnDiag;
    p.t_values = base_times;
    bool all_power = std::all_of(sum.ends.begin(), sum.ends.end(),
                                 [](const EndSpec& e) { return e.is_power_law(); });
    if (all_power) {
      double alpha = 0.0;
      for (const auto& e : sum.ends) alpha = std::max(alpha, e.alpha());
      p.slope_target = -0.5 * alpha;
    }
    plans.push_back(std::move(p));
  }

  auto fixed_pair = [&](std::string name, TheoremCase expected, int ei, int ej) {
    CasePlan p;
    p.case_name = std::move(name);
    p.expected = expected;
    p.kind = CasePlan::Kind::FixedPair;
    p.end_x = ei;
    p.end_y = ej;
    p.abs_x = 8.0;
    p.abs_y_list = {5.0, 12.0, 30.0, 80.0};
    p.t_values = base_times;
    return p;
  };

  // different-end branches
  if (crit.empty()) {
    plans.push_back(fixed_pair("t1_i", TheoremCase::T1_i, 0, 1));
  } else {
    if (sub.size() >= 2)
      plans.push_back(fixed_pair("t1_ii1", TheoremCase::T1_ii1, sub[0], sub[1]));
    if (crit.size() >= 2)
      plans.push_back(fixed_pair("t1_ii2", TheoremCase::T1_ii2, crit[0], crit[1]));
    if (!sub.empty())
      plans.push_back(fixed_pair("t1_ii3", TheoremCase::T1_ii3, sub[0], crit[0]));
  }

  // same-end, sqrt(t) below both coordinates; points ride the diffusion
  // scale so the off-center-volume comparison stays scale-free
  {
    CasePlan p;
    p.case_name = "t2_a";
    p.expected = TheoremCase::T2_a;
    p.kind = CasePlan::Kind::Proportional;
    p.end_x = 0;
    p.end_y = 0;
    p.scale_x = 1.5;
    p.scale_y_list = {1.8, 2.2, 3.0};
    double t_cap = std::pow(0.3 * config.grid.r_max, 2.0);
    p.t_values = proportional_times(1.5, std::min(config.times.hi, t_cap));
    if (!p.t_values.empty()) plans.push_back(std::move(p));
  }

  // T2(b): the estimate extends below sqrt(t) on a maximal-volume end
  {
    int target = crit.empty() ? 0 : crit[0];
    if (crit.empty()) {
      double best = 0.0;
      for (int i = 0; i < sum.k(); ++i) {
        double v = geometry::volume_ball(sum.ends[i], 1e3);
        if (v > best) {
          best = v;
          target = i;
        }
      }
    }
    CasePlan p;
    p.case_name = "t2_b";
    p.expected = TheoremCase::T2_b;
    p.kind = CasePlan::Kind::Proportional;
    p.end_x = target;
    p.end_y = target;
    p.scale_x = 0.45;
    p.scale_y_list = {0.7, 1.0, 1.3};
    p.t_values = proportional_times(0.45, config.times.hi);
    if (!p.t_values.empty()) plans.push_back(std::move(p));
  }

  // T3 needs a subcritical end whose volume is not comparable to V_max
  {
    int pick = -1;
    for (int i : sub) {
      double ratio = sum.v_max(1e4) / geometry::volume_ball(sum.ends[i], 1e4);
      if (ratio > 4.0) {
        pick = i;
        break;
      }
    }
    if (pick >= 0) {
      CasePlan p;
      p.case_name = crit.empty() ? "t3_i" : "t3_ii";
      p.expected = crit.empty() ? TheoremCase::T3_i : TheoremCase::T3_ii;
      p.kind = CasePlan::Kind::FixedPair;
      p.end_x = pick;
      p.end_y = pick;
      p.abs_x = 8.0;
      p.abs_y_list = {10.0, 20.0, 40.0};
      // the branch needs sqrt(t) >= min(|x|, |y|)
      double t_lo = std::max(config.times.lo, 1.05 * p.abs_x * p.abs_x);
      if (config.times.hi > t_lo && std::log10(config.times.hi / t_lo) >= 1.5) {
        p.t_values = logspace(t_lo, config.times.hi, t_count);
        plans.push_back(std::move(p));
      }
    }
  }

  // medium regime |x| = |y| = sqrt(t) where it differs from the long-time
  // value: bottleneck on two critical ends, anti-bottleneck on two
  // subcritical ends next to a critical one
  auto medium = [&](std::string name, TheoremCase expected, int ei, int ej) {
    CasePlan p;
    p.case_name = std::move(name);
    p.expected = expected;
    p.kind = CasePlan::Kind::Medium;
    p.end_x = ei;
    p.end_y = ej;
    p.scale_x = 1.0;
    p.t_values = proportional_times(1.0, config.times.hi);
    return p;
  };
  if (crit.size() >= 2) {
    auto p = medium("t1_ii2_medium", TheoremCase::T1_ii2, crit[0], crit[1]);
    if (!p.t_values.empty()) plans.push_back(std::move(p));
  }
  if (!crit.empty() && sub.size() >= 2) {
    auto p = medium("t1_ii1_medium", TheoremCase::T1_ii1, sub[0], sub[1]);
    if (!p.t_values.empty()) plans.push_back(std::move(p));
  }

  return plans;
}

// Oracle samples grouped by source cell so each distinct source is one solve.
struct SampleRequest {
  int source = 0;
  double t = 0.0;
  int target = 0;
  Point x;
  Point y;
};

std::vector<Sample> run_plan(const ScenarioConfig& config, const StarGrid& grid,
                             const CasePlan& plan) {
  const SumSpec& sum = config.sum;
  std::vector<SampleRequest> requests;

  auto snapped_point = [&](int end, double abs) {
    int cell = grid.cell_at(end, abs - kOffsetE);
    return std::make_pair(cell, Point::on_end(end, grid.abs_coordinate(cell)));
  };

  switch (plan.kind) {
    case CasePlan::Kind::OnDiag: {
      for (double t : plan.t_values)
        requests.push_back({grid.center_index(), t, grid.center_index(), Point::center(),
                            Point::center()});
      break;
    }
    case CasePlan::Kind::FixedPair: {
      auto [sx, px] = snapped_point(plan.end_x, plan.abs_x);
      for (double t : plan.t_values) {
        for (double ay : plan.abs_y_list) {
          auto [sy, py] = snapped_point(plan.end_y, ay);
          double d = geometry::distance(sum, px, py);
          if (d * d / t > plan.max_gauss) continue;
          requests.push_back({sx, t, sy, px, py});
        }
      }
      break;
    }
    case CasePlan::Kind::Proportional: {
      for (double t : plan.t_values) {
        double root_t = std::sqrt(t);
        auto [sx, px] = snapped_point(plan.end_x, plan.scale_x * root_t);
        for (double sy_scale : plan.scale_y_list) {
          auto [sy, py] = snapped_point(plan.end_y, sy_scale * root_t);
          requests.push_back({sx, t, sy, px, py});
        }
      }
      break;
    }
    case CasePlan::Kind::Medium: {
      for (double t : plan.t_values) {
        double root_t = std::sqrt(t);
        auto [sx, px] = snapped_point(plan.end_x, root_t);
        auto [sy, py] = snapped_point(plan.end_y, root_t);
        requests.push_back({sx, t, sy, px, py});
      }
      break;
    }
  }

  // group by source, one heat-kernel run each
  std::map<int, std::vector<double>> times_by_source;
  for (const auto& r : requests) times_by_source[r.source].push_back(r.t);
  std::map<int, oracle::KernelSeries> runs;
  for (auto& [source, ts] : times_by_source) {
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    runs.emplace(source, oracle::heat_kernel(grid, source, ts, config.stepping));
  }

  std::vector<Sample> samples;
  for (const auto& r : requests) {
    const auto& run = runs.at(r.source);
    auto it = std::lower_bound(run.times.begin(), run.times.end(), r.t * (1.0 - 1e-9));
    std::size_t idx = static_cast<std::size_t>(it - run.times.begin());
    Sample s;
    s.t = r.t;
    if (!r.x.is_center()) s.abs_x = r.x.abs;
    if (!r.y.is_center()) s.abs_y = r.y.abs;
    s.oracle_p = run.density[idx][r.target];
    if (plan.kind == CasePlan::Kind::OnDiag) {
      s.estimate = estimator::on_diagonal(sum, r.t);
    } else {
      s.estimate = estimator::kernel_estimate(sum, r.x, r.y, r.t);
    }
    if (s.estimate.regime.theorem != plan.expected)
      throw Error("dispatcher returned " +
                  std::string(estimator::to_string(s.estimate.regime.theorem)) +
                  " where the plan expected " + plan.case_name);
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace

std::vector<double> RangeSpec::values() const {
  if (count < 2 || !(lo > 0.0) || !(hi > lo)) throw ConfigError("bad range spec");
  return logspace(lo, hi, count);
}

ScenarioConfig ScenarioConfig::bundled(const std::string& name) {
  ScenarioConfig config;
  config.name = name;
  if (name == "r1r2") {
    config.sum = SumSpec::make({EndSpec::power_law(0, 1.0), EndSpec::power_law(1, 2.0)});
  } else if (name == "r2r2") {
    config.sum = SumSpec::make({EndSpec::power_law(0, 2.0), EndSpec::power_law(1, 2.0)});
    config.grid = {1300.0, 2600, 1.004, 1e5};
    config.times = {1e2, 1e5, 13};
  } else if (name == "ra1ra2") {
    config.sum = SumSpec::make({EndSpec::power_law(0, 1.0), EndSpec::power_law(1, 1.5)});
  } else if (name == "r1r1r2") {
    config.sum = SumSpec::make({EndSpec::power_law(0, 1.0), EndSpec::power_law(1, 1.0),
                                EndSpec::power_law(2, 2.0)});
    config.grid = {1300.0, 2600, 1.004, 1e5};
    config.times = {1e2, 1e5, 13};
  } else {
    throw ConfigError("unknown scenario: " + name);
  }
  config.lambdas = RangeSpec{1e-4, 1e-2, 9};
  config.points = {PointSpec::fixed(0, 8.0), PointSpec::sqrt_t(config.sum.k() - 1, 1.0)};
  return config;
}

const std::vector<std::string>& ScenarioConfig::bundled_names() {
  static const std::vector<std::string> names = {"r1r2", "r2r2", "ra1ra2", "r1r1r2"};
  return names;
}

void ScenarioConfig::check(bool needs_grid) const {
  if (sum.k() < 2) throw ConfigError("scenario needs k >= 2 ends");
  if (!(times.lo > 4.0))
    throw ConfigError("small-time: times.lo must exceed t_min = 4 (Li-Yau regime below)");
  if (!(times.hi > times.lo) || times.count < 2) throw ConfigError("bad times range");
  if (!(bands.band_limit > 1.0)) throw ConfigError("band_limit must exceed 1");
  if (!(bands.slope_tol > 0.0)) throw ConfigError("slope_tol must be positive");
  constants.check();
  for (const auto& p : points) {
    if (p.kind == PointSpec::Kind::Fixed && !(p.value >= kOffsetE))
      throw ConfigError("fixed points need |x| >= e");
    if (p.kind == PointSpec::Kind::SqrtT && !(p.value > 0.0))
      throw ConfigError("sqrt_t points need a positive scale");
    if (p.kind != PointSpec::Kind::Center && (p.end < 0 || p.end >= sum.k()))
      throw ConfigError("point end index out of range");
  }
  if (!needs_grid) return;
  if (grid.n_cells_per_end < 1000)
    throw ConfigError("grid needs at least 1000 cells per end");
  if (!(grid.spacing_ratio >= 1.0) || grid.spacing_ratio > 1.05)
    throw ConfigError("grid spacing ratio must lie in [1, 1.05]");
  if (grid.r_max < 4.0 * std::sqrt(times.hi))
    throw ConfigError("boundary contamination: grid r_max must be >= 4*sqrt(times.hi)");
  if (!(r_probe > 0.0) || r_probe >= grid.r_max / 4.0)
    throw ConfigError("r_probe must lie well inside the grid");
  if (lambdas) {
    if (!(lambdas->lo > 0.0) || !(lambdas->hi > lambdas->lo) || lambdas->count < 2)
      throw ConfigError("bad lambda range");
    if (lambdas->lo * grid.r_max * grid.r_max < 10.0)
      throw ConfigError("lambda range extends below the truncation floor");
  }
  if (!(stepping.dt0 > 0.0) || !(stepping.growth >= 1.0) || stepping.growth > 1.2)
    throw ConfigError("bad stepping parameters");
}

std::vector<FitReport> scenario_suite(const ScenarioConfig& config) {
  config.check(true);
  oracle::GridSpec spec = config.grid;
  spec.t_max = config.times.hi;
  StarGrid grid = oracle::build_grid(config.sum, spec);
  std::vector<FitReport> reports;
  for (const auto& plan : make_plans(config)) {
    auto samples = run_plan(config, grid, plan);
    reports.push_back(fit_and_band(config.name, plan.case_name, std::move(samples),
                                   config.bands, plan.slope_target));
  }
  return reports;
}

std::vector<FitReport> scenario_suite(const std::string& bundled_name) {
  return scenario_suite(ScenarioConfig::bundled(bundled_name));
}

}  // namespace heatsum::validate
