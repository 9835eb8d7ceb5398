#pragma once

#include <span>
#include <string>
#include <vector>

#include "tbp/sample.hpp"

namespace tbp {

// Per-record benefit estimates plus diagnostics from the producing method.
struct TauEstimate {
  enum class Method { outcome_regression, ipw, provided };

  std::vector<double> tau_hat;
  Method method = Method::provided;
  std::size_t clip_count = 0;
  std::size_t cells_used = 0;
  std::vector<std::string> flags;
};

// Per-record propensity estimates clipped into [epsilon, 1 - epsilon].
struct PropensityEstimate {
  enum class Method { saturated, known };

  std::vector<double> e_hat;
  Method method = Method::saturated;
  std::size_t clip_count = 0;  // records whose value was clipped
  double epsilon = 0.01;
};

// Saturated cell means of the treatment indicator over the discrete (x, z)
// cells (x only when include_z is false), clipped.
PropensityEstimate estimate_propensity(const Sample& sample, double epsilon = 0.01,
                                       bool include_z = true);

// Wraps externally known per-record propensities, applying the same clipping.
PropensityEstimate known_propensity(std::vector<double> e, double epsilon = 0.01);

// Saturated outcome regression: per-cell outcome means by arm, benefit = the
// difference at the record's cell. Throws SingleArmCellError when an occupied
// cell has records from only one arm. include_z = false gives the unadjusted
// contrast by X alone.
TauEstimate outcome_regression_tau(const Sample& sample, bool include_z = true);

// Inverse-probability-weighted pseudo-outcomes
//   phi_i = y_i (a_i - e_i) / (e_i (1 - e_i))
// pooled by exact (x, z) cell; cells that are singletons leave phi at the
// record level. Flags when more than 10% of records were clipped.
TauEstimate ipw_tau(const Sample& sample, const PropensityEstimate& propensity,
                    double clip_epsilon = 0.01);

// Pass-through of a caller-supplied benefit column, with finiteness checks.
TauEstimate provided_tau(std::span<const double> tau);

}  // namespace tbp
