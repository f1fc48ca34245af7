#include "heatsum/estimator.hpp"

#include <algorithm>
#include <cmath>

namespace heatsum::estimator {

namespace {

using geometry::EndClassKind;
using geometry::kOffsetE;
using geometry::volume_ball;

void require_classified(const SumSpec& sum) {
  if (!sum.all_classified())
    throw UnsupportedClassError("sum contains an end that is neither critical nor subcritical");
}

void require_valid_point(const SumSpec& sum, const Point& p) {
  if (!p.is_center() && *p.end >= sum.k())
    throw DomainError("point refers to an end outside the sum");
}

// D, U, W on raw coordinates. The piecewise branches agree at |x| = sqrt(t);
// ties resolve to the |x| <= sqrt(t) branch.
double d_value(const EndSpec& end, double abs, double t) {
  double root_t = std::sqrt(t);
  if (abs > root_t) return 1.0;
  return abs * abs * volume_ball(end, root_t) / (t * volume_ball(end, abs));
}

double u_value(double abs, double t) {
  double log_root_t = 0.5 * std::log(t);
  double log_abs = std::log(abs);
  if (abs > std::sqrt(t)) return 1.0 / log_abs;
  return (1.0 + log_root_t - log_abs) / log_root_t;
}

double w_value(double abs, double t) {
  if (abs > std::sqrt(t)) return 1.0;
  return std::log(abs) / (0.5 * std::log(t));
}

double center_snapped_abs(const Point& p) { return p.is_center() ? kOffsetE : p.abs; }

TimeRegime classify_time_regime(const Point& x, const Point& y, double t) {
  double root_t = std::sqrt(t);
  double ax = center_snapped_abs(x);
  double ay = center_snapped_abs(y);
  if (std::max(ax, ay) <= 0.5 * root_t) return TimeRegime::Long;
  bool both_mid = ax >= 0.5 * root_t && ax <= 2.0 * root_t && ay >= 0.5 * root_t &&
                  ay <= 2.0 * root_t;
  if (both_mid && !x.is_center() && !y.is_center() && *x.end != *y.end)
    return TimeRegime::Medium;
  return TimeRegime::Other;
}

bool comparable_to_vmax(const SumSpec& sum, int end, double band) {
  for (double r : {10.0, 1e2, 1e3, 1e4}) {
    double vi;
    try {
      vi = volume_ball(sum.ends[end], r);
    } catch (const DomainError&) {
      break;  // tabulated range exhausted; judge on what was probed
    }
    if (sum.v_max(r) / vi > band) return false;
  }
  return true;
}

}  // namespace

const char* to_string(TheoremCase c) {
  switch (c) {
    case TheoremCase::T1_i: return "t1_i";
    case TheoremCase::T1_ii1: return "t1_ii1";
    case TheoremCase::T1_ii2: return "t1_ii2";
    case TheoremCase::T1_ii3: return "t1_ii3";
    case TheoremCase::T2_a: return "t2_a";
    case TheoremCase::T2_b: return "t2_b";
    case TheoremCase::T3_i: return "t3_i";
    case TheoremCase::T3_ii: return "t3_ii";
    case TheoremCase::OnDiagonal: return "on_diagonal";
  }
  return "unknown";
}

double EstimateValue::lower(double c_low, double b_low) const {
  return c_low * structural * std::exp(-b_low * gauss_exponent);
}

double EstimateValue::upper(double c_up, double b_up) const {
  return c_up * structural * std::exp(-b_up * gauss_exponent);
}

double EstimateValue::at_unit_constants() const {
  return structural * std::exp(-gauss_exponent);
}

void ConstantProfile::check() const {
  if (!(c_low > 0.0) || !(c_up > 0.0) || !(b_low > 0.0) || !(b_up > 0.0))
    throw DomainError("constant profile entries must be positive");
  if (c_low > c_up || b_low < b_up)
    throw DomainError("constant profile needs c_low <= c_up and b_low >= b_up");
}

double d_func(const SumSpec& sum, const Point& x, double t) {
  if (!(t > 2.0)) throw DomainError("d_func needs t > 2");
  require_valid_point(sum, x);
  if (x.is_center()) return 0.0;
  const EndSpec& end = sum.ends[*x.end];
  if (end.cached_class.kind == EndClassKind::Neither)
    throw UnsupportedClassError("D is unbounded on ends outside the dichotomy");
  return d_value(end, x.abs, t);
}

double u_func(const Point& x, double t) {
  if (!(t > 2.0)) throw DomainError("u_func needs t > 2");
  double abs = center_snapped_abs(x);
  if (!(abs >= kOffsetE)) throw DomainError("u_func needs |x| >= e");
  return u_value(abs, t);
}

double w_func(const Point& x, double t) {
  if (!(t > 2.0)) throw DomainError("w_func needs t > 2");
  double abs = center_snapped_abs(x);
  if (!(abs >= kOffsetE)) throw DomainError("w_func needs |x| >= e");
  return w_value(abs, t);
}

EstimateValue on_diagonal(const SumSpec& sum, double t) {
  if (!(t > 2.0)) throw SmallTimeError("on_diagonal needs t > 2");
  require_classified(sum);
  EstimateValue v;
  v.structural = 1.0 / sum.v_max(std::sqrt(t));
  v.gauss_exponent = 0.0;
  v.regime = {TheoremCase::OnDiagonal, TimeRegime::Long};
  return v;
}

EstimateValue kernel_estimate(const SumSpec& sum, Point x, Point y, double t,
                              const EstimatorConfig& config) {
  if (!(t > config.t_min))
    throw SmallTimeError("kernel_estimate needs t > t_min; small times follow Li-Yau");
  require_classified(sum);
  require_valid_point(sum, x);
  require_valid_point(sum, y);
  if (x.is_center() && y.is_center())
    throw DomainError("both points at the center: use on_diagonal");

  auto snap = [&](const Point& p) {
    if (!p.is_center() && p.abs <= kOffsetE + config.boundary_pad) return Point::center();
    return p;
  };
  x = snap(x);
  y = snap(y);
  if (x.is_center() && y.is_center()) {
    EstimateValue v = on_diagonal(sum, t);
    v.regime.time_regime = classify_time_regime(x, y, t);
    return v;
  }

  const double root_t = std::sqrt(t);
  const double log_t = std::log(t);
  const double d = geometry::distance(sum, x, y);
  const double gauss = d * d / t;
  const bool any_crit = sum.any_critical();
  const TimeRegime time_regime = classify_time_regime(x, y, t);

  // A center point enters the different-end formulas as a subcritical side
  // with D = 0 and U = 1 (exact at |x| = e); all branches then collapse to
  // the extension of the estimates to the center.
  bool same_end = !x.is_center() && !y.is_center() && *x.end == *y.end;

  EstimateValue v;
  v.gauss_exponent = gauss;

  if (!same_end) {
    auto side_critical = [&](const Point& p) {
      return !p.is_center() && sum.ends[*p.end].is_critical();
    };
    auto side_d = [&](const Point& p) {
      return p.is_center() ? 0.0 : d_value(sum.ends[*p.end], p.abs, t);
    };
    bool cx = side_critical(x);
    bool cy = side_critical(y);
    if (!any_crit) {
      v.structural = 1.0 / sum.v_max(root_t);
      v.regime = {TheoremCase::T1_i, time_regime};
    } else if (!cx && !cy) {
      v.structural = (1.0 + (side_d(x) + side_d(y)) * log_t) / t;
      v.regime = {TheoremCase::T1_ii1, time_regime};
    } else if (cx && cy) {
      double ux = u_value(center_snapped_abs(x), t);
      double uy = u_value(center_snapped_abs(y), t);
      double wx = w_value(center_snapped_abs(x), t);
      double wy = w_value(center_snapped_abs(y), t);
      v.structural = (ux * uy + wx * uy + ux * wy) / t;
      v.regime = {TheoremCase::T1_ii2, time_regime};
    } else {
      const Point& sub = cx ? y : x;
      const Point& crit = cx ? x : y;
      v.structural = (1.0 + side_d(sub) * u_value(center_snapped_abs(crit), t) * log_t) / t;
      v.regime = {TheoremCase::T1_ii3, time_regime};
    }
    return v;
  }

  const EndSpec& end = sum.ends[*x.end];
  double min_abs = std::min(x.abs, y.abs);
  if (min_abs > root_t) {
    v.structural = 1.0 / geometry::off_center_volume(end, x.abs, root_t);
    v.regime = {TheoremCase::T2_a, time_regime};
    return v;
  }
  if (end.is_critical() || comparable_to_vmax(sum, *x.end, config.t2b_band)) {
    v.structural = 1.0 / geometry::off_center_volume(end, x.abs, root_t);
    v.regime = {TheoremCase::T2_b, time_regime};
    return v;
  }
  double dx = d_value(end, x.abs, t);
  double dy = d_value(end, y.abs, t);
  double vi = volume_ball(end, root_t);
  if (!any_crit) {
    v.structural = dx * dy / vi + 1.0 / sum.v_max(root_t);
    v.regime = {TheoremCase::T3_i, time_regime};
  } else {
    v.structural = dx * dy / vi + (1.0 + (dx + dy) * log_t) / t;
    v.regime = {TheoremCase::T3_ii, time_regime};
  }
  return v;
}

EstimateValue power_estimate(const SumSpec& sum, const Point& x, const Point& y, double t,
                             const EstimatorConfig& config) {
  (void)config;
  if (!(t > 2.0)) throw SmallTimeError("power_estimate needs t > 2");
  require_classified(sum);
  require_valid_point(sum, x);
  require_valid_point(sum, y);
  for (const auto& end : sum.ends)
    if (!end.is_power_law())
      throw UnsupportedProfileError("power_estimate needs power-law ends");
  if (x.is_center() || y.is_center())
    throw DomainError("power_estimate is stated for points on the ends");
  if (*x.end == *y.end)
    throw DomainError("power_estimate covers different ends; use kernel_estimate");

  const double root_t = std::sqrt(t);
  const double log_t = std::log(t);
  const double d = geometry::distance(sum, x, y);
  const double gauss = d * d / t;
  const double ai = sum.ends[*x.end].alpha();
  const double aj = sum.ends[*y.end].alpha();
  const TimeRegime time_regime = classify_time_regime(x, y, t);
  const bool crit_i = sum.ends[*x.end].is_critical();
  const bool crit_j = sum.ends[*y.end].is_critical();

  EstimateValue v;
  if (!sum.any_critical()) {
    double alpha = 0.0;
    for (const auto& end : sum.ends) alpha = std::max(alpha, end.alpha());
    v.structural = std::pow(t, -0.5 * alpha);
    v.gauss_exponent = gauss;
    v.regime = {TheoremCase::T1_i, time_regime};
    return v;
  }

  // D in its pure power form, capped at 1 past sqrt(t) as in (function D).
  auto d_pow = [&](double abs, double alpha) {
    return abs > root_t ? 1.0 : std::pow(abs / root_t, 2.0 - alpha);
  };

  if (!crit_i && !crit_j) {
    if (std::min(x.abs, y.abs) > root_t) {
      v.structural = log_t / t;
      v.gauss_exponent = gauss;
    } else {
      v.structural = (1.0 + log_t * (d_pow(x.abs, ai) + d_pow(y.abs, aj))) / t;
      v.gauss_exponent = 0.0;
    }
    v.regime = {TheoremCase::T1_ii1, time_regime};
    return v;
  }
  if (crit_i && crit_j) {
    v.regime = {TheoremCase::T1_ii2, time_regime};
    double log_root_t = 0.5 * log_t;
    if (x.abs <= root_t && y.abs <= root_t) {
      v.structural =
          (log_t + log_root_t * log_root_t - std::log(x.abs) * std::log(y.abs)) /
          (t * log_t * log_t);
      v.gauss_exponent = 0.0;
    } else if (x.abs > root_t && y.abs > root_t) {
      v.structural = (1.0 / std::log(x.abs) + 1.0 / std::log(y.abs)) / t;
      v.gauss_exponent = gauss;
    } else {
      double abs_low = x.abs > root_t ? y.abs : x.abs;  // the side below sqrt(t)
      v.structural = std::log(kOffsetE * root_t / abs_low) / (t * log_t);
      v.gauss_exponent = gauss;
    }
    return v;
  }
  const Point& sub = crit_i ? y : x;
  const Point& crit = crit_i ? x : y;
  double a_sub = sum.ends[*sub.end].alpha();
  v.structural =
      (1.0 + std::pow(sub.abs / (sub.abs + root_t), 2.0 - a_sub) * u_value(crit.abs, t) * log_t) /
      t;
  v.gauss_exponent = gauss;
  v.regime = {TheoremCase::T1_ii3, time_regime};
  return v;
}

EstimateValue regime_estimate(const SumSpec& sum, RegimeCase regime_case, double t) {
  if (!(t > 4.0)) throw SmallTimeError("regime_estimate needs t > t_min");
  require_classified(sum);
  if (regime_case == RegimeCase::Long) {
    EstimateValue v = on_diagonal(sum, t);
    v.regime.time_regime = TimeRegime::Long;
    return v;
  }
  int n_crit = 0, n_sub = 0;
  for (const auto& end : sum.ends) end.is_critical() ? ++n_crit : ++n_sub;
  EstimateValue v;
  v.gauss_exponent = 0.0;
  if (n_crit == 0) {
    v.structural = 1.0 / sum.v_max(std::sqrt(t));
    v.regime = {TheoremCase::T1_i, TimeRegime::Medium};
  } else if (n_sub >= 2) {
    v.structural = std::log(t) / t;  // anti-bottleneck
    v.regime = {TheoremCase::T1_ii1, TimeRegime::Medium};
  } else if (n_crit >= 2) {
    v.structural = 1.0 / (t * std::log(t));  // bottleneck
    v.regime = {TheoremCase::T1_ii2, TimeRegime::Medium};
  } else if (n_crit == 1 && n_sub == 1) {
    v.structural = 1.0 / sum.v_max(std::sqrt(t));
    v.regime = {TheoremCase::T1_ii3, TimeRegime::Medium};
  } else {
    throw CaseMismatchError("no medium-regime case exists for this sum");
  }
  return v;
}

double exit_prob_estimate(const EndSpec& end, double abs_x, double t) {
  if (!(abs_x >= kOffsetE)) throw DomainError("exit_prob_estimate needs |x| >= e");
  if (!(t > 0.0)) throw DomainError("exit_prob_estimate needs t > 0");
  if (end.cached_class.kind == EndClassKind::Neither)
    throw UnsupportedClassError("hitting estimates need a classified end");
  if (t < 2.0 * abs_x * abs_x) {
    return abs_x * abs_x * std::exp(-abs_x * abs_x / t) /
           (volume_ball(end, abs_x) * geometry::h_func(end, abs_x));
  }
  double root_t = std::sqrt(t);
  return (geometry::h_func(end, root_t) - geometry::h_func(end, abs_x)) /
         geometry::h_func(end, root_t);
}

double exit_prob_rate_estimate(const EndSpec& end, double abs_x, double t) {
  if (!(abs_x >= kOffsetE)) throw DomainError("exit_prob_rate_estimate needs |x| >= e");
  if (!(t > 0.0)) throw DomainError("exit_prob_rate_estimate needs t > 0");
  if (end.cached_class.kind == EndClassKind::Neither)
    throw UnsupportedClassError("hitting estimates need a classified end");
  double root_t = std::sqrt(t);
  double hx = geometry::h_func(end, abs_x);
  double ht = geometry::h_func(end, root_t);
  return hx * std::exp(-abs_x * abs_x / t) / (volume_ball(end, root_t) * (hx + ht) * ht);
}

double exit_prob_simplified(const EndSpec& end, double abs_x, double t) {
  double gauss = std::exp(-abs_x * abs_x / t);
  if (end.is_critical()) return u_value(abs_x, t) * gauss;
  if (end.is_subcritical()) return gauss;
  throw UnsupportedClassError("hitting estimates need a classified end");
}

double exit_prob_rate_simplified(const EndSpec& end, double abs_x, double t) {
  double gauss = std::exp(-abs_x * abs_x / t);
  if (end.is_critical()) return w_value(abs_x, t) / (t * std::log(t)) * gauss;
  if (end.is_subcritical()) return d_value(end, abs_x, t) / t * gauss;
  throw UnsupportedClassError("hitting estimates need a classified end");
}

EstimateValue dirichlet_estimate(const EndSpec& end, double abs_x, double abs_y, double t) {
  if (!(abs_x >= kOffsetE) || !(abs_y >= kOffsetE))
    throw DomainError("dirichlet_estimate needs |x|, |y| >= e");
  if (!(t > 0.0)) throw DomainError("dirichlet_estimate needs t > 0");
  double root_t = std::sqrt(t);
  double vx = geometry::off_center_volume(end, abs_x, root_t);
  double diff = abs_x - abs_y;
  EstimateValue v;
  v.gauss_exponent = diff * diff / t;
  v.regime = {TheoremCase::T2_a, TimeRegime::Other};
  if (end.is_critical()) {
    v.structural = w_value(abs_x, t) * w_value(abs_y, t) / vx;
  } else if (end.is_subcritical()) {
    v.structural = d_value(end, abs_x, t) * d_value(end, abs_y, t) / vx;
  } else {
    throw UnsupportedClassError("dirichlet_estimate needs a classified end");
  }
  return v;
}

EstimateValue glue(const std::optional<EstimateValue>& p_a, const EstimateValue& central,
                   double g_integral, double psi_x, double psi_y, double dpsi_x,
                   double dpsi_y) {
  for (double v : {g_integral, psi_x, psi_y, dpsi_x, dpsi_y})
    if (v < 0.0) throw DomainError("glue inputs must be nonnegative");
  double base = p_a ? p_a->at_unit_constants() : 0.0;
  if (base < 0.0 || central.at_unit_constants() < 0.0)
    throw DomainError("glue inputs must be nonnegative");
  EstimateValue v;
  v.structural = base + central.at_unit_constants() * psi_x * psi_y +
                 g_integral * (dpsi_x * psi_y + dpsi_y * psi_x);
  v.gauss_exponent = 0.0;
  v.regime = {TheoremCase::OnDiagonal, TimeRegime::Other};
  return v;
}

}  // namespace heatsum::estimator
