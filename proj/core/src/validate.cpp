#include "heatsum/validate.hpp"

#include <algorithm>
#include <cmath>

namespace heatsum::validate {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

FitReport fit_and_band(std::string scenario, std::string theorem_case,
                       std::vector<Sample> samples, const FitBands& bands,
                       std::optional<double> slope_target) {
  if (samples.size() < 20) throw FitError("fit needs at least 20 samples");
  double t_min = samples[0].t, t_max = samples[0].t;
  for (const auto& s : samples) {
    t_min = std::min(t_min, s.t);
    t_max = std::max(t_max, s.t);
    if (!(s.oracle_p > 0.0)) throw FitError("fit needs strictly positive oracle values");
    if (!(s.estimate.structural > 0.0)) throw FitError("fit needs positive structural values");
  }
  if (t_max == t_min) throw FitError("degenerate sample: all times equal");
  if (std::log10(t_max / t_min) < 1.5)
    throw FitError("fit needs samples spanning at least 1.5 decades of t");

  FitReport report;
  report.scenario = std::move(scenario);
  report.theorem_case = std::move(theorem_case);
  report.slope_target = slope_target;

  const std::size_t n = samples.size();
  double g_min = samples[0].estimate.gauss_exponent, g_max = g_min;
  for (const auto& s : samples) {
    g_min = std::min(g_min, s.estimate.gauss_exponent);
    g_max = std::max(g_max, s.estimate.gauss_exponent);
  }

  // b only when the Gaussian payload has enough spread to identify it
  double b = 0.0;
  if (g_max - g_min > 0.5) {
    double mg = 0.0, mr = 0.0;
    for (const auto& s : samples) {
      mg += s.estimate.gauss_exponent;
      mr += std::log(s.oracle_p / s.estimate.structural);
    }
    mg /= n;
    mr /= n;
    double cov = 0.0, var = 0.0;
    for (const auto& s : samples) {
      double dg = s.estimate.gauss_exponent - mg;
      cov += dg * (std::log(s.oracle_p / s.estimate.structural) - mr);
      var += dg * dg;
    }
    b = -cov / var;
  }
  report.fitted_b = b;

  std::vector<double> adjusted(n);
  for (std::size_t i = 0; i < n; ++i)
    adjusted[i] = samples[i].oracle_p /
                  (samples[i].estimate.structural *
                   std::exp(-b * samples[i].estimate.gauss_exponent));
  double c = median(adjusted);
  report.fitted_c = c;

  report.ratio_min = adjusted[0] / c;
  report.ratio_max = report.ratio_min;
  for (std::size_t i = 0; i < n; ++i) {
    double r = adjusted[i] / c;
    report.ratio_min = std::min(report.ratio_min, r);
    report.ratio_max = std::max(report.ratio_max, r);
    if (r > bands.band_limit || r < 1.0 / bands.band_limit) {
      samples[i].outlier = true;
      ++report.outlier_count;
    }
  }

  // log-log slope in t with its standard error
  {
    double mx = 0.0, my = 0.0;
    for (const auto& s : samples) {
      mx += std::log(s.t);
      my += std::log(s.oracle_p);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& s : samples) {
      double dx = std::log(s.t) - mx;
      sxx += dx * dx;
      sxy += dx * (std::log(s.oracle_p) - my);
    }
    double slope = sxy / sxx;
    double ssr = 0.0;
    for (const auto& s : samples) {
      double resid = (std::log(s.oracle_p) - my) - slope * (std::log(s.t) - mx);
      ssr += resid * resid;
    }
    report.slope = slope;
    if (n > 2) report.slope_stderr = std::sqrt(ssr / double(n - 2) / sxx);
  }

  bool band_ok = report.band_ratio() <= bands.band_limit;
  bool slope_ok = true;
  if (slope_target) slope_ok = std::abs(*report.slope - *slope_target) <= bands.slope_tol;
  report.pass = band_ok && slope_ok;
  report.samples = std::move(samples);
  return report;
}

bool ResolventReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const BoundCheck& c) { return c.pass || c.skipped; });
}

namespace {

BoundCheck make_check(std::string name, std::string direction,
                      std::vector<std::pair<double, double>> values, double band_limit) {
  BoundCheck check;
  check.name = std::move(name);
  check.direction = std::move(direction);
  check.values = std::move(values);
  if (check.values.empty()) {
    check.skipped = true;
    check.note = "no lambda within the safe range";
    return check;
  }
  std::vector<double> vals;
  check.min = check.values[0].second;
  check.max = check.min;
  for (const auto& [lambda, v] : check.values) {
    check.min = std::min(check.min, v);
    check.max = std::max(check.max, v);
    vals.push_back(v);
  }
  // the one-sided checks compare the extreme against the median, so a
  // quantity that is only capped from one side may still decay across the range
  double ref = median(std::move(vals));
  if (check.direction == "two-sided") {
    check.pass = check.min > 0.0 && check.max / check.min <= band_limit;
  } else if (check.direction == "below") {
    check.pass = ref > 0.0 && check.min >= ref / band_limit;
  } else {
    check.pass = ref > 0.0 && check.max <= ref * band_limit;
  }
  return check;
}

}  // namespace

ResolventReport check_resolvent_bounds(const oracle::StarGrid& grid,
                                       const std::vector<double>& lambdas, double r_probe,
                                       double band_limit) {
  ResolventReport report;
  report.r_probe = r_probe;
  const double floor = 10.0 / (grid.spec.r_max * grid.spec.r_max);
  std::vector<double> safe, skipped;
  for (double l : lambdas) (l >= floor ? safe : skipped).push_back(l);
  std::sort(safe.begin(), safe.end());

  auto samples = oracle::resolvent(grid, safe, r_probe);
  const auto& sum = grid.sum;
  bool any_crit = sum.any_critical();

  auto collect = [&](auto&& f) {
    std::vector<std::pair<double, double>> out;
    for (const auto& s : samples) out.emplace_back(s.lambda, f(s));
    return out;
  };

  if (!any_crit) {
    report.checks.push_back(make_check(
        "lambda*gamma*Vmax(1/sqrt(lambda))", "two-sided",
        collect([&](const oracle::ResolventSample& s) {
          return s.lambda * s.gamma * sum.v_max(1.0 / std::sqrt(s.lambda));
        }),
        band_limit));
  } else {
    report.checks.push_back(make_check(
        "gamma/log(1/lambda)", "two-sided", collect([&](const oracle::ResolventSample& s) {
          return s.gamma / std::log(1.0 / s.lambda);
        }),
        band_limit));
    report.checks.push_back(make_check(
        "lambda*gamma_dot", "two-sided", collect([&](const oracle::ResolventSample& s) {
          return s.lambda * s.gamma_dot;
        }),
        band_limit));
  }

  for (int i = 0; i < sum.k(); ++i) {
    const auto& end = sum.ends[i];
    std::string tag = "end" + std::to_string(i);
    if (end.is_subcritical()) {
      report.checks.push_back(make_check(
          "phi[" + tag + "]/(lambda*V(1/sqrt(lambda)))", "below",
          collect([&](const oracle::ResolventSample& s) {
            return s.phi[i] /
                   (s.lambda * geometry::volume_ball(end, 1.0 / std::sqrt(s.lambda)));
          }),
          band_limit));
    } else if (end.is_critical()) {
      report.checks.push_back(make_check(
          "phi[" + tag + "]*log(1/lambda)", "below",
          collect([&](const oracle::ResolventSample& s) {
            return s.phi[i] * std::log(1.0 / s.lambda);
          }),
          band_limit));
    }
    report.checks.push_back(make_check(
        "lambda*log^2(1/lambda)*psi[" + tag + "]", "above",
        collect([&](const oracle::ResolventSample& s) {
          double ll = std::log(1.0 / s.lambda);
          return s.lambda * ll * ll * s.psi_big[i];
        }),
        band_limit));
  }

  if (!skipped.empty()) {
    BoundCheck note;
    note.name = "lambda floor";
    note.direction = "two-sided";
    note.skipped = true;
    note.note = std::to_string(skipped.size()) +
                " lambda(s) below the truncation floor were skipped";
    report.checks.push_back(note);
  }
  return report;
}

GluingReport check_gluing_inequality(const oracle::StarGrid& grid,
                                     const std::vector<double>& lambdas, double r_probe) {
  const double floor = 10.0 / (grid.spec.r_max * grid.spec.r_max);
  std::vector<double> safe;
  for (double l : lambdas)
    if (l >= floor) safe.push_back(l);
  std::sort(safe.begin(), safe.end());
  GluingReport report;
  auto samples = oracle::resolvent(grid, safe, r_probe);
  for (const auto& s : samples) {
    double phi_sum = 0.0;
    for (double phi : s.phi) phi_sum += phi;
    report.ratios.emplace_back(s.lambda, s.gamma * phi_sum / s.gamma_ball);
  }
  if (!report.ratios.empty()) {
    report.min_ratio = report.ratios[0].second;
    report.max_ratio = report.min_ratio;
    for (const auto& [l, r] : report.ratios) {
      report.min_ratio = std::min(report.min_ratio, r);
      report.max_ratio = std::max(report.max_ratio, r);
    }
    report.bounded = report.max_ratio / report.min_ratio <= 100.0;
  }
  return report;
}

std::vector<CoverageEntry> coverage_matrix(const std::vector<FitReport>& reports) {
  using estimator::TheoremCase;
  std::vector<CoverageEntry> entries;
  for (TheoremCase c :
       {TheoremCase::OnDiagonal, TheoremCase::T1_i, TheoremCase::T1_ii1, TheoremCase::T1_ii2,
        TheoremCase::T1_ii3, TheoremCase::T2_a, TheoremCase::T2_b, TheoremCase::T3_i,
        TheoremCase::T3_ii})
    entries.push_back({estimator::to_string(c), 0});
  for (const auto& r : reports)
    for (auto& e : entries)
      if (r.theorem_case == e.branch || r.theorem_case == e.branch + "_medium") ++e.count;
  return entries;
}

}  // namespace heatsum::validate
