// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Everything runs on the primary component alone; total runtime is
// well under the 15-minute budget.

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "heatsum/estimator.hpp"
#include "heatsum/geometry.hpp"
#include "heatsum/oracle.hpp"
#include "heatsum/validate.hpp"
#include "spectral_oracle.hpp"

using namespace heatsum;
using geometry::EndSpec;
using geometry::kOffsetE;
using geometry::Point;
using geometry::SumSpec;
using oracle::build_grid;
using oracle::Omega;
using oracle::StarGrid;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
};

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return out;
}

struct SlopeFit {
  double slope = 0.0;
  double stderr_ = 0.0;
};

SlopeFit fit_loglog(const std::vector<double>& t, const std::vector<double>& p) {
  std::size_t n = t.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(t[i]);
    my += std::log(p[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = std::log(t[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(p[i]) - my);
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double resid = (std::log(p[i]) - my) - fit.slope * (std::log(t[i]) - mx);
    ssr += resid * resid;
  }
  fit.stderr_ = std::sqrt(ssr / double(n - 2) / sxx);
  return fit;
}

struct Band {
  double lo = 1e300;
  double hi = 0.0;
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double ratio() const { return hi / lo; }
};

SlopeFit on_diagonal_slope(const SumSpec& sum) {
  auto grid = build_grid(sum, {450.0, 1600, 1.004, 1e4});
  auto times = logspace(1e2, 1e4, 21);
  auto run = oracle::heat_kernel(grid, grid.center_index(), times);
  std::vector<double> p;
  for (const auto& d : run.density) p.push_back(d[grid.center_index()]);
  return fit_loglog(times, p);
}

// criterion 1: on-diagonal slope of the alpha = (1, 2) sum over [1e2, 1e4]
Outcome criterion1() {
  Outcome out;
  auto fit = on_diagonal_slope(
      SumSpec::make({EndSpec::power_law(0, 1.0), EndSpec::power_law(1, 2.0)}));
  out.pass = std::abs(fit.slope - (-1.0)) <= 0.10;
  out.detail << "slope=" << fit.slope << " target -1.00 +/- 0.10";
  return out;
}

// criterion 2: alpha = (1, 1.5) slope -0.75 +/- 0.08 and rejection of the
// non-parabolic V_min prediction -0.5 by >= 5 standard errors
Outcome criterion2() {
  Outcome out;
  auto fit = on_diagonal_slope(
      SumSpec::make({EndSpec::power_law(0, 1.0), EndSpec::power_law(1, 1.5)}));
  bool target_ok = std::abs(fit.slope - (-0.75)) <= 0.08;
  double rejection = std::abs(fit.slope - (-0.5)) / fit.stderr_;
  bool reject_ok = rejection >= 5.0;
  out.pass = target_ok && reject_ok;
  out.detail << "slope=" << fit.slope << " (target -0.75 +/- 0.08), V_min prediction off by "
             << rejection << " standard errors (need >= 5)";
  return out;
}

struct MediumProbe {
  Band compensated;
  std::vector<double> med_over_long;
};

MediumProbe medium_probe(const SumSpec& sum, double comp(double t, double p)) {
  auto grid = build_grid(sum, {1300.0, 2600, 1.004, 1e5});
  auto times = logspace(1e2, 1e5, 13);
  MediumProbe probe;
  auto center_run = oracle::heat_kernel(grid, grid.center_index(), times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    double t = times[i];
    double rho = std::sqrt(t) - kOffsetE;
    int x = grid.cell_at(0, rho);
    int y = grid.cell_at(1, rho);
    auto run = oracle::heat_kernel(grid, x, {t});
    double p = run.density[0][y];
    probe.compensated.add(comp(t, p));
    // probed decades only
    double l10 = std::log10(t);
    if (std::abs(l10 - std::round(l10)) < 1e-9) {
      double p_od = center_run.density[i][grid.center_index()];
      probe.med_over_long.push_back(p / p_od);
    }
  }
  return probe;
}

// criterion 3: bottleneck on R2#R2; t log t p banded, medium/long decreasing
Outcome criterion3() {
  Outcome out;
  auto probe = medium_probe(
      SumSpec::make({EndSpec::power_law(0, 2.0), EndSpec::power_law(1, 2.0)}),
      [](double t, double p) { return t * std::log(t) * p; });
  bool monotone = true;
  for (std::size_t i = 1; i < probe.med_over_long.size(); ++i)
    monotone = monotone && probe.med_over_long[i] < probe.med_over_long[i - 1];
  out.pass = probe.compensated.ratio() <= 8.0 && monotone;
  out.detail << "t*log(t)*p band=" << probe.compensated.ratio()
             << " (need <= 8), medium/long decreasing=" << (monotone ? "yes" : "no");
  return out;
}

// criterion 4: anti-bottleneck on R1#R1#R2; t p / log t banded, ratio rising
Outcome criterion4() {
  Outcome out;
  auto probe = medium_probe(
      SumSpec::make({EndSpec::power_law(0, 1.0), EndSpec::power_law(1, 1.0),
                     EndSpec::power_law(2, 2.0)}),
      [](double t, double p) { return t * p / std::log(t); });
  bool monotone = true;
  for (std::size_t i = 1; i < probe.med_over_long.size(); ++i)
    monotone = monotone && probe.med_over_long[i] > probe.med_over_long[i - 1];
  out.pass = probe.compensated.ratio() <= 8.0 && monotone;
  out.detail << "t*p/log(t) band=" << probe.compensated.ratio()
             << " (need <= 8), medium/long increasing=" << (monotone ? "yes" : "no");
  return out;
}

// criterion 5: R1#R2 off-diagonal middle branch, x fixed on the cylinder
// end, y swept over the plane end below sqrt(t)
Outcome criterion5() {
  Outcome out;
  auto sum = SumSpec::make({EndSpec::power_law(0, 1.0), EndSpec::power_law(1, 2.0)});
  auto grid = build_grid(sum, {700.0, 1800, 1.004, 25600.0});
  double ax_target = 10.0;
  int x = grid.cell_at(0, ax_target - kOffsetE);
  double ax = grid.abs_coordinate(x);
  std::vector<double> times = {400.0, 1600.0, 6400.0, 25600.0};
  auto run = oracle::heat_kernel(grid, x, times);
  Band band;
  int count = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    double t = times[i];
    double root_t = std::sqrt(t);
    for (double ay_target : logspace(4.2, 0.95 * root_t, 8)) {
      int y = grid.cell_at(1, ay_target - kOffsetE);
      double ay = grid.abs_coordinate(y);
      if (ay > root_t) continue;
      double structural = (1.0 + ax / root_t * std::log(kOffsetE * root_t / ay)) / t;
      band.add(run.density[i][y] / structural);
      ++count;
    }
  }
  out.pass = band.ratio() <= 8.0 && count >= 30;
  out.detail << "oracle/structural band=" << band.ratio() << " over " << count
             << " samples (need <= 8 over >= 30)";
  return out;
}

// criterion 6: exit probability on the critical end; psi/U and the
// compensated rate banded over four decades for |x| in {10, 30}
Outcome criterion6() {
  Outcome out;
  auto sum = SumSpec::make({EndSpec::power_law(0, 1.0), EndSpec::power_law(1, 2.0)});
  auto grid = build_grid(sum, {12200.0, 2200, 1.004, 9.2e6});
  out.pass = true;
  for (double ax_target : {10.0, 30.0}) {
    int x = grid.cell_at(1, ax_target - kOffsetE);
    double ax = grid.abs_coordinate(x);
    auto times = logspace(ax * ax, 1e4 * ax * ax, 17);
    auto exit = oracle::exit_probability(grid, Omega::end_only(1), x, times);
    Band psi_band, rate_band;
    for (std::size_t i = 0; i < times.size(); ++i) {
      double t = times[i];
      double u = estimator::u_func(Point::on_end(1, ax), t);
      psi_band.add(exit.psi[i] / u);
      double lt = std::log(t);
      rate_band.add(t * lt * lt * exit.dpsi[i] / std::log(ax));
    }
    bool ok = psi_band.ratio() <= 8.0 && rate_band.ratio() <= 8.0;
    out.pass = out.pass && ok;
    out.detail << "|x|=" << ax_target << ": psi/U band=" << psi_band.ratio()
               << ", t*log^2(t)*dpsi/log|x| band=" << rate_band.ratio() << "; ";
  }
  out.detail << "(need <= 8)";
  return out;
}

// criterion 7: integrated-resolvent bounds over lambda in [1e-4, 1e-2]
Outcome criterion7() {
  Outcome out;
  auto lambdas = logspace(1e-4, 1e-2, 9);

  auto mixed = SumSpec::make({EndSpec::power_law(0, 1.0), EndSpec::power_law(1, 2.0)});
  auto grid = build_grid(mixed, {450.0, 1600, 1.004, 1e4});
  auto samples = oracle::resolvent(grid, lambdas, 10.0);
  Band log_band, dot_band;
  for (const auto& s : samples) {
    log_band.add(s.gamma / std::log(1.0 / s.lambda));
    dot_band.add(s.lambda * s.gamma_dot);
  }

  auto subs = SumSpec::make({EndSpec::power_law(0, 1.0), EndSpec::power_law(1, 1.5)});
  auto sub_grid = build_grid(subs, {450.0, 1600, 1.004, 1e4});
  Band sub_band;
  for (const auto& s : oracle::resolvent(sub_grid, lambdas, 10.0))
    sub_band.add(s.lambda * s.gamma * subs.v_max(1.0 / std::sqrt(s.lambda)));

  out.pass = log_band.ratio() <= 8.0 && dot_band.ratio() <= 8.0 && sub_band.ratio() <= 8.0;
  out.detail << "gamma/log(1/lambda) band=" << log_band.ratio()
             << ", lambda*gamma_dot band=" << dot_band.ratio()
             << ", lambda*gamma*Vmax band=" << sub_band.ratio() << " (need <= 8)";
  return out;
}

// criterion 8: the exact property suite
Outcome criterion8() {
  Outcome out;
  out.pass = true;
  auto fail = [&](const std::string& what) {
    out.pass = false;
    out.detail << "FAILED " << what << "; ";
  };

  auto sum = SumSpec::make({EndSpec::power_law(0, 1.0), EndSpec::power_law(1, 2.0)});
  auto grid = build_grid(sum, {140.0, 1100, 1.004, 1e3});
  auto times = logspace(10.0, 1e3, 7);

  {  // conservation and symmetry
    int x = grid.cell_at(0, 20.0);
    int y = grid.cell_at(1, 35.0);
    auto from_x = oracle::heat_kernel(grid, x, times);
    auto from_y = oracle::heat_kernel(grid, y, times);
    double worst_mass = 0.0, worst_sym = 0.0;
    for (std::size_t s = 0; s < times.size(); ++s) {
      worst_mass = std::max(worst_mass, std::abs(from_x.total_mass[s] - 1.0));
      double pxy = from_x.density[s][y], pyx = from_y.density[s][x];
      worst_sym = std::max(worst_sym, std::abs(pxy - pyx) / std::max(pxy, pyx));
    }
    out.detail << "mass_defect=" << worst_mass << " sym=" << worst_sym << " ";
    if (worst_mass > 1e-6) fail("conservation <= 1e-6");
    if (worst_sym > 1e-8) fail("symmetry <= 1e-8");
  }

  {  // semigroup at tight stepping
    oracle::SteppingConfig tight;
    tight.growth = 1.02;
    int x = grid.cell_at(0, 10.0);
    auto series = oracle::heat_kernel(grid, x, {40.0, 80.0}, tight);
    double composed = 0.0;
    for (int c = 0; c < grid.size(); ++c)
      composed += series.density[0][c] * series.density[0][c] * grid.mass[c];
    double rel = std::abs(series.density[1][x] - composed) / series.density[1][x];
    out.detail << "semigroup=" << rel << " ";
    if (rel > 1e-4) fail("semigroup <= 1e-4");
  }

  {  // domain monotonicity
    int x = grid.cell_at(1, 25.0);
    auto free_run = oracle::heat_kernel(grid, x, times);
    auto dir = oracle::dirichlet_kernel(grid, Omega::end_only(1), x, times);
    bool ok = true;
    for (std::size_t s = 0; s < times.size(); ++s)
      for (int c = 0; c < grid.size(); ++c)
        ok = ok && dir.density[s][c] <= free_run.density[s][c] * (1.0 + 1e-9) + 1e-300;
    if (!ok) fail("p_Omega <= p pointwise");
  }

  {  // tiny-grid spectral oracle
    auto tiny_sum = SumSpec::make({EndSpec::power_law(0, 1.0), EndSpec::power_law(1, 1.5),
                                   EndSpec::power_law(2, 2.0)});
    auto tiny = build_grid(tiny_sum, {10.0, 5, 1.0, 4.0});
    heatsum_tests::SpectralPropagator spectral(tiny, Omega::whole());
    oracle::SteppingConfig fine;
    fine.dt0 = 2e-4;
    fine.growth = 1.0;
    fine.smoothing_steps = 8;
    int x = tiny.index(0, 1);
    auto series = oracle::heat_kernel(tiny, x, {2.0, 4.0}, fine);
    double worst = 0.0;
    for (std::size_t s = 0; s < 2; ++s)
      for (int c = 0; c < tiny.size(); ++c) {
        double ref = spectral.kernel(tiny, s == 0 ? 2.0 : 4.0, x, c);
        if (ref < 1e-9) continue;
        worst = std::max(worst, std::abs(series.density[s][c] - ref) / ref);
      }
    out.detail << "spectral=" << worst << " ";
    if (worst > 1e-6) fail("tiny-grid spectral match <= 1e-6");
  }

  {  // Psi identity: linear solve against the time quadrature
    double lambda = 2e-2;
    auto sample = oracle::resolvent(grid, {lambda}, 10.0)[0];
    int probe = grid.cell_at(0, 10.0);
    oracle::SteppingConfig cfg;
    cfg.dt0 = 5e-4;
    cfg.growth = 1.02;
    auto exit =
        oracle::exit_probability(grid, Omega::end_only(0), probe, {900.0}, cfg, true);
    double integral = 0.0;
    for (std::size_t i = 1; i < exit.times.size(); ++i) {
      double f0 = exit.times[i - 1] * std::exp(-lambda * exit.times[i - 1]) * exit.dpsi[i - 1];
      double f1 = exit.times[i] * std::exp(-lambda * exit.times[i]) * exit.dpsi[i];
      integral += 0.5 * (f0 + f1) * (exit.times[i] - exit.times[i - 1]);
    }
    double rel = std::abs(integral - sample.psi_big[0]) / sample.psi_big[0];
    out.detail << "psi_identity=" << rel << " ";
    if (rel > 0.02) fail("Psi identity quadrature <= 2%");
  }

  {  // U + W in [1, 2] on a 1e4-point sweep
    int violations = 0;
    for (int i = 0; i < 100; ++i) {
      double abs = kOffsetE * std::pow(1.15, i);
      for (int j = 0; j < 100; ++j) {
        double t = 4.001 * std::pow(1.25, j);
        auto p = Point::on_end(0, abs);
        double uw = estimator::u_func(p, t) + estimator::w_func(p, t);
        if (!(uw >= 1.0 - 1e-12 && uw <= 2.0 + 1e-12)) ++violations;
      }
    }
    if (violations != 0) fail("1 <= U+W <= 2 sweep");
  }

  {  // branch continuity at |x| = sqrt(t) to 1e-12 relative
    bool ok = true;
    for (double t : {1e2, 1e4, 1e8}) {
      double root_t = std::sqrt(t);
      auto at = Point::on_end(0, root_t);
      auto below = Point::on_end(0, root_t * (1.0 - 1e-13));
      ok = ok && std::abs(estimator::d_func(sum, at, t) - 1.0) < 1e-12;
      ok = ok && std::abs(estimator::u_func(below, t) - estimator::u_func(at, t)) <
                     1e-12 * estimator::u_func(at, t) + 1e-12;
      ok = ok && std::abs(estimator::w_func(at, t) - 1.0) < 1e-12;
    }
    if (!ok) fail("D/U/W branch continuity at 1e-12");
  }

  {  // glue against the dispatcher across >= 1e3 samples; the sweep stays in
     // the |x|, |y| <= sqrt(t) region where both Gaussian payloads are O(1)
    Band band;
    int samples = 0;
    std::vector<SumSpec> sums = {
        SumSpec::make({EndSpec::power_law(0, 1.0), EndSpec::power_law(1, 2.0)}),
        SumSpec::make({EndSpec::power_law(0, 2.0), EndSpec::power_law(1, 2.0)}),
        SumSpec::make({EndSpec::power_law(0, 1.0), EndSpec::power_law(1, 1.5)}),
        SumSpec::make({EndSpec::power_law(0, 1.0), EndSpec::power_law(1, 1.0),
                       EndSpec::power_law(2, 2.0)}),
    };
    for (const auto& s : sums) {
      bool any_crit = s.any_critical();
      for (double t : logspace(1e4, 1e6, 7)) {
        double root_t = std::sqrt(t);
        std::vector<double> coords;
        for (double scale : {0.42, 0.47, 0.53, 0.58, 0.64})
          coords.push_back(scale * root_t);
        auto central = estimator::on_diagonal(s, t);
        double g_int = any_crit ? std::log(t) : t / s.v_max(root_t);
        for (double ax : coords) {
          for (double ay : coords) {
            int ei = 0, ej = s.k() - 1;
            // different ends
            {
              auto x = Point::on_end(ei, ax);
              auto y = Point::on_end(ej, ay);
              auto composed = estimator::glue(
                  std::nullopt, central, g_int,
                  estimator::exit_prob_simplified(s.ends[ei], ax, t),
                  estimator::exit_prob_simplified(s.ends[ej], ay, t),
                  estimator::exit_prob_rate_simplified(s.ends[ei], ax, t),
                  estimator::exit_prob_rate_simplified(s.ends[ej], ay, t));
              double dispatcher = estimator::kernel_estimate(s, x, y, t).at_unit_constants();
              band.add(composed.structural / dispatcher);
              ++samples;
            }
            // same end through the Dirichlet term
            {
              auto x = Point::on_end(ei, ax);
              auto y = Point::on_end(ei, ay);
              auto p_a = estimator::dirichlet_estimate(s.ends[ei], ax, ay, t);
              auto composed = estimator::glue(
                  p_a, central, g_int, estimator::exit_prob_simplified(s.ends[ei], ax, t),
                  estimator::exit_prob_simplified(s.ends[ei], ay, t),
                  estimator::exit_prob_rate_simplified(s.ends[ei], ax, t),
                  estimator::exit_prob_rate_simplified(s.ends[ei], ay, t));
              double dispatcher = estimator::kernel_estimate(s, x, y, t).at_unit_constants();
              band.add(composed.structural / dispatcher);
              ++samples;
            }
          }
        }
      }
    }
    out.detail << "glue_band=" << band.ratio() << " over " << samples << " samples";
    if (band.ratio() > 8.0) fail("glue/dispatcher band <= 8");
    if (samples < 1000) fail("glue sweep needs >= 1e3 samples");
  }

  return out;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Outcome (*fn)();
  };
  const Entry entries[] = {
      {"criterion 1: on-diagonal slope, alpha=(1,2)", criterion1},
      {"criterion 2: on-diagonal slope, alpha=(1,1.5), max-not-min", criterion2},
      {"criterion 3: bottleneck on R2#R2", criterion3},
      {"criterion 4: anti-bottleneck on R1#R1#R2", criterion4},
      {"criterion 5: off-diagonal branch fidelity on R1#R2", criterion5},
      {"criterion 6: exit probability on the critical end", criterion6},
      {"criterion 7: resolvent bounds", criterion7},
      {"criterion 8: property suite", criterion8},
  };
  int failures = 0;
  for (const auto& entry : entries) {
    Outcome out = entry.fn();
    std::printf("[%s] %s: %s\n", out.pass ? "PASS" : "FAIL", entry.name,
                out.detail.str().c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  std::printf("%d/8 acceptance criteria passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
