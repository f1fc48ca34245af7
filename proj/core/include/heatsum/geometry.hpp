#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "heatsum/errors.hpp"

namespace heatsum::geometry {

// Every point carries the shifted radial coordinate |x| = d(x,K) + e, which
// keeps log|x| >= 1 on the whole sum.
inline constexpr double kOffsetE = 2.71828182845904523536;

// Rotationally symmetric end with V(r) ~ r^alpha. The radial weight density
// is sigma(s) = alpha * s^(alpha-1) for s >= 1, capped at the constant alpha
// below s = 1 so the volume stays finite: V(r) = r^alpha + (alpha - 1) for
// r >= 1.
struct PowerLawProfile {
  double alpha = 1.0;  // 0 < alpha <= 2
};

// Piecewise-linear radial weight through the knots (radii[i], weight[i]).
// Radii are strictly increasing and start below 1. The weight is held
// constant below the first knot; evaluation past the last knot is a domain
// error.
struct TabulatedProfile {
  std::vector<double> radii;
  std::vector<double> weight;
};

using Profile = std::variant<PowerLawProfile, TabulatedProfile>;

enum class EndClassKind { Critical, Subcritical, Neither };

// Witness of the classification over the tested range: the max/min band of
// V(r)/r^2 for Critical, and sup_r [int_1^r s ds/V(s)] / [r^2/V(r)] for
// Subcritical (and for Neither, where it exceeded the band).
struct EndClass {
  EndClassKind kind = EndClassKind::Neither;
  double witness = 0.0;
};

struct ClassifyBands {
  double band_crit = 4.0;
  double band_sub = 10.0;
};

struct EndSpec {
  int id = 0;
  Profile profile;
  EndClass cached_class;

  bool is_power_law() const { return std::holds_alternative<PowerLawProfile>(profile); }
  bool is_critical() const { return cached_class.kind == EndClassKind::Critical; }
  bool is_subcritical() const { return cached_class.kind == EndClassKind::Subcritical; }

  // Power-law exponent; throws UnsupportedProfileError for tabulated ends.
  double alpha() const;

  // Factories keep cached_class consistent with classify_end: power laws are
  // classified over [1e2, 1e6], tabulated profiles over the widest available
  // range [max(1, radii.front()), radii.back()] (at least two decades).
  static EndSpec power_law(int id, double alpha, const ClassifyBands& bands = {});
  static EndSpec tabulated(int id, std::vector<double> radii, std::vector<double> weight,
                           const ClassifyBands& bands = {});
};

// Connected sum of k >= 2 model ends glued at a central part K, collapsed to
// a single point of mass center_mass.
struct SumSpec {
  std::vector<EndSpec> ends;
  double center_mass = 1.0;

  static SumSpec make(std::vector<EndSpec> ends, double center_mass = 1.0);

  int k() const { return static_cast<int>(ends.size()); }
  double v_max(double r) const;  // max_i V_i(r), pointwise
  bool any_critical() const;
  bool all_classified() const;  // no Neither end
};

// Location on the sum: the center K, or a point on one end at coordinate
// |x| >= e.
struct Point {
  std::optional<int> end;
  double abs = kOffsetE;

  bool is_center() const { return !end.has_value(); }
  static Point center() { return {}; }
  static Point on_end(int end, double abs);
};

// V_i(r) = int_0^r sigma_i(s) ds. Strictly increasing; exact for power laws,
// trapezoidal (exact on the piecewise-linear weight) for tabulated ends.
double volume_ball(const EndSpec& end, double r);

// sigma_i(s), the radial weight density. Used by the finite-volume grid.
double weight_density(const EndSpec& end, double s);

// Structural off-center volume r^2 / (1 + r/(|x|+r)^(alpha-1)) of the model
// end. Power-law profiles only.
double off_center_volume(const EndSpec& end, double abs_x, double r);

// Critical / Subcritical / Neither over [r_lo, r_hi] (ratio >= 1e2, r_lo >= 1).
EndClass classify_end(const Profile& profile, double r_lo, double r_hi,
                      const ClassifyBands& bands = {});

// H(r) = 1 + (int_1^r s/V_i(s) ds)_+ by adaptive quadrature; H(1) = 1.
double h_func(const EndSpec& end, double r);

// Radial-model distance: same end | |x|-|y| |; different ends
// (|x|-e) + (|y|-e); center to a point |y| - e.
double distance(const SumSpec& sum, const Point& x, const Point& y);

}  // namespace heatsum::geometry
