#pragma once

#include <optional>
#include <string>
#include <vector>

#include "heatsum/estimator.hpp"
#include "heatsum/oracle.hpp"

namespace heatsum::validate {

struct Sample {
  double t = 0.0;
  std::optional<double> abs_x;  // empty at the center
  std::optional<double> abs_y;
  double oracle_p = 0.0;
  estimator::EstimateValue estimate;
  bool outlier = false;  // flagged by the fit, never dropped
};

struct FitBands {
  double band_limit = 8.0;
  double slope_tol = 0.1;
};

// Deterministic per-case calibration: b from least squares of
// log(oracle/structural) against the Gaussian payload (zero when the payload
// has no spread), then C as the median of the b-adjusted ratios, so the
// final ratio band always straddles 1.
struct FitReport {
  std::string scenario;
  std::string theorem_case;
  double fitted_c = 1.0;
  double fitted_b = 0.0;
  double ratio_min = 1.0;
  double ratio_max = 1.0;
  std::optional<double> slope;        // d log p / d log t
  std::optional<double> slope_stderr;
  std::optional<double> slope_target;
  int outlier_count = 0;
  bool pass = false;
  std::vector<Sample> samples;

  double band_ratio() const { return ratio_max / ratio_min; }
};

FitReport fit_and_band(std::string scenario, std::string theorem_case,
                       std::vector<Sample> samples, const FitBands& bands,
                       std::optional<double> slope_target);

// One compensated resolvent quantity over the lambda grid. Two-sided checks
// require max/min <= band_limit; one-sided checks ("below"/"above") compare
// the extreme against the value at the largest lambda, so a quantity that
// only capped from one side may still decay.
struct BoundCheck {
  std::string name;
  std::string direction;  // "two-sided" | "below" | "above"
  std::vector<std::pair<double, double>> values;  // (lambda, compensated)
  double min = 0.0;
  double max = 0.0;
  bool pass = false;
  bool skipped = false;
  std::string note;
};

struct ResolventReport {
  double r_probe = 0.0;
  std::vector<BoundCheck> checks;
  bool all_pass() const;
};

// Numerical shadow of the integrated-resolvent lemmas: gamma against
// log(1/lambda) or 1/(lambda V_max(1/sqrt(lambda))), lambda*gamma_dot, the
// per-end Phi lower bounds and the Psi upper bound. Out-of-floor lambdas are
// skipped with a note, never passed silently.
ResolventReport check_resolvent_bounds(const oracle::StarGrid& grid,
                                       const std::vector<double>& lambdas, double r_probe,
                                       double band_limit);

// Ratio gamma(o) * sum_i Phi^{E_i}(r_probe) / gamma^A(o) over lambda;
// informational unless wildly divergent.
struct GluingReport {
  std::vector<std::pair<double, double>> ratios;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  bool bounded = false;
};

GluingReport check_gluing_inequality(const oracle::StarGrid& grid,
                                     const std::vector<double>& lambdas, double r_probe);

struct CoverageEntry {
  std::string branch;
  int count = 0;
};

// How often each theorem branch is exercised across a set of reports; every
// branch reachable with k <= 3 power ends appears, covered or not.
std::vector<CoverageEntry> coverage_matrix(const std::vector<FitReport>& reports);

}  // namespace heatsum::validate
