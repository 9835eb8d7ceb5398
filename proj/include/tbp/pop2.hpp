#pragma once

#include <optional>

#include "tbp/metrics.hpp"

namespace tbp {

// Continuous-outcome population: X1, X2, Z iid uniform on [0,1], propensity
// e(x,z) = z, base response max(z, x2) + 0.1 x1, tau_s(x) = max(x1, x2),
// predictor h(x) = x1 + x2, Gaussian outcome noise with scale sigma.
struct Pop2Spec {
  double sigma = 0.1;
};

// Density and CDF of H = X1 + X2 (triangular on [0, 2] with mode 1).
struct Pop2Density {
  double pdf = 0;
  double cdf = 0;
};

Pop2Density pop2_distribution(double h);

// Calibration curve E[B | H = h] on (0, 2). adjusted = false gives the curve
// obtained when Z is ignored, which adds the conditional confounding bias.
// Throws std::domain_error outside (0, 2).
double pop2_calibration(double h, bool adjusted);

// Deviation step separating the unadjusted calibration curve from the
// adjusted one: 1/(6h) below the mode, 1/(6(2-h)) above. Throws outside
// (0, 2).
double pop2_calibration_deviation(double h);

// bias(x) = 1/3 - x2^2 + (2/3) x2^3 for x2 in [0, 1].
double pop2_bias(double x2);

// Closed-form ingredients for the concentration-index deviation identity.
struct Pop2DeviationTerms {
  double tau_star = 0;    // E[B]
  double e_bias = 0;      // E[bias(X)]
  double e_b_eta = 0;     // E[B eta(H)] = 2 E[B F_H(H)]
  double e_bias_eta = 0;  // E[bias(X) eta(H)]
};

Pop2DeviationTerms pop2_deviation_terms();

// Exact metric reports from the closed forms. h is the report for the
// predictor x1 + x2; tau_s (adjusted only) is the report for the best
// possible predictor tau_s(x) itself.
struct Pop2Metrics {
  MetricReport h;
  std::optional<MetricReport> tau_s;
};

Pop2Metrics pop2_metrics(bool adjusted);

// Closed-form calibration curve sampled on an even grid inside (0, 2).
CurvePoints pop2_calibration_curve(bool adjusted, int points = 199);

// Closed-form relative concentration curve (cumulative benefit share against
// cumulative population share), sampled at `points` parameter values of h.
CurvePoints pop2_rcc(bool adjusted, int points = 401);

}  // namespace tbp
