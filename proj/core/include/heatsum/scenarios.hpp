#pragma once

#include <optional>
#include <string>
#include <vector>

#include "heatsum/validate.hpp"

namespace heatsum::validate {

struct RangeSpec {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;

  std::vector<double> values() const;  // log-spaced
};

// A probe location in a scenario: the center, a fixed coordinate on an end,
// or an end coordinate tied to the diffusion scale, |x| = scale * sqrt(t).
struct PointSpec {
  enum class Kind { Center, Fixed, SqrtT };
  Kind kind = Kind::Center;
  int end = 0;
  double value = 0.0;  // abs for Fixed, scale for SqrtT

  static PointSpec center() { return {}; }
  static PointSpec fixed(int end, double abs) { return {Kind::Fixed, end, abs}; }
  static PointSpec sqrt_t(int end, double scale = 1.0) { return {Kind::SqrtT, end, scale}; }
};

// Everything one deterministic run needs. No randomness anywhere; identical
// configs produce bit-identical outputs.
struct ScenarioConfig {
  std::string name = "custom";
  geometry::SumSpec sum;
  oracle::GridSpec grid{450.0, 1600, 1.004, 1e4};
  RangeSpec times{1e2, 1e4, 17};
  std::optional<RangeSpec> lambdas;
  std::vector<PointSpec> points;
  estimator::ConstantProfile constants;
  FitBands bands;
  oracle::SteppingConfig stepping;
  double r_probe = 10.0;

  // Bundled examples: r1r2, r2r2, ra1ra2, r1r1r2.
  static ScenarioConfig bundled(const std::string& name);
  static const std::vector<std::string>& bundled_names();

  // Geometry/oracle preconditions, checked before any solve.
  void check(bool needs_grid) const;
};

// Full pipeline for one scenario: grid build, oracle solves, estimator sweep
// and fits, one FitReport per reachable theorem case.
std::vector<FitReport> scenario_suite(const ScenarioConfig& config);
std::vector<FitReport> scenario_suite(const std::string& bundled_name);

}  // namespace heatsum::validate
