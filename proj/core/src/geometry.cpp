#include "heatsum/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace heatsum::geometry {

namespace {

double power_volume(const PowerLawProfile& p, double r) {
  if (r < 1.0) return p.alpha * r;
  return std::pow(r, p.alpha) + (p.alpha - 1.0);
}

double tabulated_weight(const TabulatedProfile& p, double s) {
  if (s <= p.radii.front()) return p.weight.front();
  if (s > p.radii.back()) {
    if (s <= p.radii.back() * (1.0 + 1e-12)) return p.weight.back();
    throw DomainError("tabulated weight evaluated beyond its last knot");
  }
  auto it = std::upper_bound(p.radii.begin(), p.radii.end(), s);
  std::size_t hi = static_cast<std::size_t>(it - p.radii.begin());
  std::size_t lo = hi - 1;
  double f = (s - p.radii[lo]) / (p.radii[hi] - p.radii[lo]);
  return p.weight[lo] + f * (p.weight[hi] - p.weight[lo]);
}

double tabulated_volume(const TabulatedProfile& p, double r) {
  if (r > p.radii.back()) {
    if (r > p.radii.back() * (1.0 + 1e-12))
      throw DomainError("tabulated volume evaluated beyond the last knot");
    r = p.radii.back();
  }
  double acc = 0.0;
  double prev_r = 0.0;
  double prev_w = p.weight.front();
  for (std::size_t i = 0; i < p.radii.size(); ++i) {
    if (r <= p.radii[i]) {
      double w = tabulated_weight(p, r);
      acc += 0.5 * (prev_w + w) * (r - prev_r);
      return acc;
    }
    acc += 0.5 * (prev_w + p.weight[i]) * (p.radii[i] - prev_r);
    prev_r = p.radii[i];
    prev_w = p.weight[i];
  }
  return acc;
}

double profile_volume(const Profile& profile, double r) {
  if (r <= 0.0) throw DomainError("volume_ball needs r > 0");
  if (const auto* p = std::get_if<PowerLawProfile>(&profile)) return power_volume(*p, r);
  return tabulated_volume(std::get<TabulatedProfile>(profile), r);
}

double simpson_recurse(const std::function<double(double)>& f, double a, double b, double fa,
                       double fm, double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = f(lm);
  double frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol) {
  if (b <= a) return 0.0;
  double fa = f(a);
  double fb = f(b);
  double fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double tol = rel_tol * std::max(std::abs(whole), 1e-12);
  return simpson_recurse(f, a, b, fa, fm, fb, whole, tol, 28);
}

// int_lo^hi s/V(s) ds on the log axis; the integrand e^{2u}/V(e^u) stays
// tame over many decades.
double radial_h_integral(const Profile& profile, double lo, double hi, double rel_tol) {
  if (hi <= lo) return 0.0;
  auto g = [&](double u) {
    double s = std::exp(u);
    return s * s / profile_volume(profile, s);
  };
  return adaptive_simpson(g, std::log(lo), std::log(hi), rel_tol);
}

double quad_tolerance(const Profile& profile) {
  return std::holds_alternative<PowerLawProfile>(profile) ? 1e-10 : 1e-7;
}

}  // namespace

double EndSpec::alpha() const {
  if (const auto* p = std::get_if<PowerLawProfile>(&profile)) return p->alpha;
  throw UnsupportedProfileError("operation requires a power-law end");
}

EndSpec EndSpec::power_law(int id, double alpha, const ClassifyBands& bands) {
  if (!(alpha > 0.0) || alpha > 2.0)
    throw DomainError("power-law exponent must satisfy 0 < alpha <= 2");
  EndSpec end;
  end.id = id;
  end.profile = PowerLawProfile{alpha};
  end.cached_class = classify_end(end.profile, 1e2, 1e6, bands);
  return end;
}

EndSpec EndSpec::tabulated(int id, std::vector<double> radii, std::vector<double> weight,
                           const ClassifyBands& bands) {
  if (radii.size() != weight.size() || radii.size() < 2)
    throw DomainError("tabulated profile needs matching radii/weight arrays of size >= 2");
  if (!(radii.front() < 1.0))
    throw DomainError("tabulated radii must start below 1");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(weight[i] > 0.0)) throw DomainError("tabulated weight must be strictly positive");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw DomainError("tabulated radii must be strictly increasing");
  }
  EndSpec end;
  end.id = id;
  end.profile = TabulatedProfile{std::move(radii), std::move(weight)};
  const auto& tab = std::get<TabulatedProfile>(end.profile);
  double lo = std::max(1.0, tab.radii.front());
  double hi = tab.radii.back();
  if (hi / lo < 1e2)
    throw DomainError("tabulated profile must span two decades above r = 1 to classify");
  end.cached_class = classify_end(end.profile, lo, hi, bands);
  return end;
}

SumSpec SumSpec::make(std::vector<EndSpec> ends, double center_mass) {
  if (ends.size() < 2) throw DomainError("a connected sum needs k >= 2 ends");
  if (!(center_mass > 0.0)) throw DomainError("center mass must be positive");
  for (std::size_t i = 0; i < ends.size(); ++i)
    for (std::size_t j = i + 1; j < ends.size(); ++j)
      if (ends[i].id == ends[j].id) throw DomainError("end ids must be distinct");
  SumSpec sum;
  sum.ends = std::move(ends);
  sum.center_mass = center_mass;
  return sum;
}

double SumSpec::v_max(double r) const {
  double best = 0.0;
  for (const auto& end : ends) best = std::max(best, volume_ball(end, r));
  return best;
}

bool SumSpec::any_critical() const {
  return std::any_of(ends.begin(), ends.end(),
                     [](const EndSpec& e) { return e.is_critical(); });
}

bool SumSpec::all_classified() const {
  return std::all_of(ends.begin(), ends.end(), [](const EndSpec& e) {
    return e.cached_class.kind != EndClassKind::Neither;
  });
}

Point Point::on_end(int end, double abs) {
  if (end < 0) throw DomainError("end index must be nonnegative");
  if (!(abs >= kOffsetE)) throw DomainError("point coordinate |x| must be >= e");
  Point p;
  p.end = end;
  p.abs = abs;
  return p;
}

double volume_ball(const EndSpec& end, double r) { return profile_volume(end.profile, r); }

double weight_density(const EndSpec& end, double s) {
  if (const auto* p = std::get_if<PowerLawProfile>(&end.profile)) {
    if (s < 1.0) return p->alpha;
    return p->alpha * std::pow(s, p->alpha - 1.0);
  }
  return tabulated_weight(std::get<TabulatedProfile>(end.profile), s);
}

double off_center_volume(const EndSpec& end, double abs_x, double r) {
  if (!(r > 0.0)) throw DomainError("off_center_volume needs r > 0");
  if (!(abs_x >= kOffsetE)) throw DomainError("off_center_volume needs |x| >= e");
  if (!end.is_power_law())
    throw UnsupportedProfileError("off_center_volume is stated for power-law ends only");
  double alpha = end.alpha();
  return r * r / (1.0 + r * std::pow(abs_x + r, 1.0 - alpha));
}

EndClass classify_end(const Profile& profile, double r_lo, double r_hi,
                      const ClassifyBands& bands) {
  if (!(r_lo >= 1.0)) throw DomainError("classify_end needs r_lo >= 1");
  if (!(r_hi / r_lo >= 1e2)) throw DomainError("classify_end needs r_hi/r_lo >= 1e2");

  constexpr int kGridPoints = 65;
  std::vector<double> rs(kGridPoints), vs(kGridPoints);
  double step = std::log(r_hi / r_lo) / (kGridPoints - 1);
  for (int g = 0; g < kGridPoints; ++g) {
    rs[g] = r_lo * std::exp(step * g);
    vs[g] = profile_volume(profile, rs[g]);
  }

  double crit_min = vs[0] / (rs[0] * rs[0]);
  double crit_max = crit_min;
  for (int g = 1; g < kGridPoints; ++g) {
    double q = vs[g] / (rs[g] * rs[g]);
    crit_min = std::min(crit_min, q);
    crit_max = std::max(crit_max, q);
  }
  if (crit_max / crit_min <= bands.band_crit)
    return {EndClassKind::Critical, crit_max / crit_min};

  double tol = quad_tolerance(profile);
  double integral = radial_h_integral(profile, 1.0, rs[0], tol);
  double sup = integral * vs[0] / (rs[0] * rs[0]);
  for (int g = 1; g < kGridPoints; ++g) {
    integral += radial_h_integral(profile, rs[g - 1], rs[g], tol);
    sup = std::max(sup, integral * vs[g] / (rs[g] * rs[g]));
  }
  if (sup <= bands.band_sub) return {EndClassKind::Subcritical, sup};
  return {EndClassKind::Neither, sup};
}

double h_func(const EndSpec& end, double r) {
  if (!(r >= 1.0)) throw DomainError("h_func needs r >= 1");
  double integral = radial_h_integral(end.profile, 1.0, r, quad_tolerance(end.profile));
  return 1.0 + std::max(0.0, integral);
}

double distance(const SumSpec& sum, const Point& x, const Point& y) {
  auto check = [&](const Point& p) {
    if (!p.is_center() && *p.end >= sum.k())
      throw DomainError("point refers to an end outside the sum");
  };
  check(x);
  check(y);
  if (x.is_center() && y.is_center()) return 0.0;
  if (x.is_center()) return y.abs - kOffsetE;
  if (y.is_center()) return x.abs - kOffsetE;
  if (*x.end == *y.end) return std::abs(x.abs - y.abs);
  return (x.abs - kOffsetE) + (y.abs - kOffsetE);
}

}  // namespace heatsum::geometry
