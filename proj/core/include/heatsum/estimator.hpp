#pragma once

#include <optional>

#include "heatsum/geometry.hpp"

namespace heatsum::estimator {

using geometry::EndSpec;
using geometry::Point;
using geometry::SumSpec;

enum class TheoremCase {
  T1_i,
  T1_ii1,
  T1_ii2,
  T1_ii3,
  T2_a,
  T2_b,
  T3_i,
  T3_ii,
  OnDiagonal,
};

enum class TimeRegime { Long, Medium, Other };

struct RegimeTag {
  TheoremCase theorem = TheoremCase::OnDiagonal;
  TimeRegime time_regime = TimeRegime::Other;
};

const char* to_string(TheoremCase c);

// One two-sided estimate: the structural representative of the ~ class
// (constants C = b = 1) plus the Gaussian payload d^2(x,y)/t, carried
// separately so a ConstantProfile can be applied at comparison time.
// gauss_exponent is zero for the branches stated without the Gaussian factor.
struct EstimateValue {
  double structural = 0.0;
  double gauss_exponent = 0.0;
  RegimeTag regime;

  double lower(double c_low, double b_low) const;
  double upper(double c_up, double b_up) const;
  double at_unit_constants() const;  // structural * exp(-gauss_exponent)
};

struct ConstantProfile {
  double c_low = 1.0;
  double c_up = 1.0;
  double b_low = 1.0;
  double b_up = 1.0;

  void check() const;  // c_low <= c_up and b_low >= b_up
};

struct EstimatorConfig {
  double t_min = 4.0;        // below this the small-time regime applies
  double boundary_pad = 1.0; // |x| <= e + pad is treated as the center
  double t2b_band = 4.0;     // V_max/V_i comparability band for the T2(b) extension
};

// The regime functions D, U, W, defined for t > 2 and |x| >= e.
double d_func(const SumSpec& sum, const Point& x, double t);
double u_func(const Point& x, double t);
double w_func(const Point& x, double t);

// p(t,o,o): structural 1/V_max(sqrt t). All ends must classify.
EstimateValue on_diagonal(const SumSpec& sum, double t);

// Full off-diagonal dispatch across the same-end / different-end and
// critical / subcritical cases. Points within boundary_pad of the center are
// treated as center points (both snapping to the center falls back to
// on_diagonal).
EstimateValue kernel_estimate(const SumSpec& sum, Point x, Point y, double t,
                              const EstimatorConfig& config = {});

// Closed power-law forms of the different-end corollary; agrees with
// kernel_estimate within a bounded factor everywhere.
EstimateValue power_estimate(const SumSpec& sum, const Point& x, const Point& y, double t,
                             const EstimatorConfig& config = {});

enum class RegimeCase { Long, Medium };

// Long: 1/V_max(sqrt t). Medium (|x| ~ |y| ~ sqrt t on different ends):
// log t / t with >= 2 subcritical ends next to a critical one
// (anti-bottleneck), 1/(t log t) with >= 2 critical ends (bottleneck),
// 1/V_max(sqrt t) otherwise.
EstimateValue regime_estimate(const SumSpec& sum, RegimeCase regime_case, double t);

// Exit probability of the end and its time derivative, per the two-branch
// hitting formula (t < 2|x|^2 against t >= 2|x|^2) built from H and V.
double exit_prob_estimate(const EndSpec& end, double abs_x, double t);
double exit_prob_rate_estimate(const EndSpec& end, double abs_x, double t);

// Per-class simplifications of the hitting estimates (subcritical:
// exp(-|x|^2/t) and D/t; critical: U and W/(t log t)).
double exit_prob_simplified(const EndSpec& end, double abs_x, double t);
double exit_prob_rate_simplified(const EndSpec& end, double abs_x, double t);

// Dirichlet heat kernel on one end: D(x)D(y)/V_i(x, sqrt t) subcritically,
// W(x)W(y)/V_i(x, sqrt t) critically.
EstimateValue dirichlet_estimate(const EndSpec& end, double abs_x, double abs_y, double t);

// Abstract gluing composition p_A + P psi psi + G [dpsi psi + dpsi psi],
// evaluated at unit constants. The theorem dispatcher equals this composition
// up to a bounded factor.
EstimateValue glue(const std::optional<EstimateValue>& p_a, const EstimateValue& central,
                   double g_integral, double psi_x, double psi_y, double dpsi_x,
                   double dpsi_y);

}  // namespace heatsum::estimator
