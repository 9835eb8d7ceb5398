#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tbp/metrics.hpp"
#include "tbp/pop1.hpp"

namespace tbp {

// Per-x confounding bias for the binary population: the naive contrast
// D(x) = E[Y | A=1, X=x] - E[Y | A=0, X=x] minus tau_s(x).
struct BiasTable {
  std::array<double, 4> bias{};        // index = JointTable::x_index
  std::array<double, 4> naive_diff{};  // D(x)
};

// Exact summation over the conditional law of Z given (X, A). Throws
// OverlapError when P(A=a | X=x) = 0 for some occupied cell.
BiasTable pop1_bias(const JointTable& table);

struct DeviationPoint {
  double h = 0;
  double value = 0;
};

// E[bias(X) | H = h] at each prediction level of the given predictor.
std::vector<DeviationPoint> pop1_calibration_deviation(const BiasTable& bias,
                                                       const Pop1Tbp& tbp,
                                                       const JointTable& table);

// Concentration-index deviation in factored form:
//   (tau* E[bias eta] - E[B eta] E[bias]) / (E[B eta] (E[B eta] + E[bias eta])).
// Must equal the direct difference naive_cb - adjusted_cb.
double cb_deviation(double tau_star, double e_bias, double e_bias_eta, double e_b_eta);

// Adjusted and naive evaluation of one predictor by exact enumeration over
// the 8 cells: metric reports, by-level calibration curves, RCCs, and the
// per-level calibration deviation. RCCs are absent when the corresponding
// mean benefit is not positive (the share normalization does not exist).
struct Pop1Evaluation {
  MetricReport adjusted;
  MetricReport naive;
  CurvePoints adjusted_calibration, naive_calibration;
  std::optional<CurvePoints> adjusted_rcc, naive_rcc;
  std::vector<DeviationPoint> calib_dev;
  double cb_dev = 0;           // naive.cb - adjusted.cb
  double cb_dev_factored = 0;  // same quantity through the factored identity
};

Pop1Evaluation evaluate_pop1_exact(const JointTable& table, const Pop1Tbp& tbp);

// Confounding-strength sweep over (beta1, alpha13). Each grid point re-runs
// validation; invalid points are kept as skipped rows. abs_bias is ordered
// x = (1,1), (1,0), (0,1), (0,0) to match the emitted CSV columns.
struct SweepRow {
  double beta1 = 0;
  double a13_minus_a03 = 0;
  std::array<double, 4> abs_bias{};
  std::string region;  // ">0.1", ">0.05", ">0.01", "<=0.01", or "invalid"
  bool valid = false;
};

struct SweepTable {
  std::vector<SweepRow> rows;
};

SweepTable sweep_bias(const Pop1Spec& base, std::span<const double> beta1_grid,
                      std::span<const double> alpha13_grid);
SweepTable sweep_bias_serial(const Pop1Spec& base, std::span<const double> beta1_grid,
                             std::span<const double> alpha13_grid);

// Interval of alpha13 values keeping every treated-arm Bernoulli mean inside
// [0, 1], holding the rest of the population fixed.
std::pair<double, double> pop1_alpha13_interval(const Pop1Spec& base);

// Default sweep axes: beta1 uniform on [0, 1 - beta0 - 1e-6] and alpha13
// uniform on its validity interval, each with the given number of steps.
std::vector<double> default_beta1_grid(const Pop1Spec& base, int steps);
std::vector<double> default_alpha13_grid(const Pop1Spec& base, int steps);

}  // namespace tbp
