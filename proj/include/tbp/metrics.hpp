#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tbp/distribution.hpp"

namespace tbp {

// Discrimination summary for one predictor: tau_star = E[B] is the expected
// benefit under "treat at random", maxlike the expected benefit under "treat
// the greater prediction" among random pairs, and cb / gini_b the
// concentration index and Gini-like coefficient derived from the two.
struct MetricReport {
  double tau_star = 0;
  double maxlike = 0;
  double cb = 0;
  double gini_b = 0;
  std::size_t n = 0;  // records behind a plug-in report; 0 for exact inputs
  std::vector<std::string> flags;
};

// One prediction level: value, population share, and mean benefit within the
// level. Exact enumeration produces these directly; the plug-in path reduces
// records to the same shape by pooling equal predictions.
struct BenefitGroup {
  double h = 0;
  double mass = 0;
  double mean_b = 0;
};

class GroupedBenefit {
public:
  // Validates and sorts by h; equal h values are pooled (mass-weighted mean).
  static GroupedBenefit from_groups(std::vector<BenefitGroup> groups);
  // Pools records with exactly equal h; mass = relative frequency.
  static GroupedBenefit from_records(std::span<const double> b, std::span<const double> h);

  const std::vector<BenefitGroup>& groups() const { return groups_; }
  double tau_star() const;
  EmpiricalDistribution distribution() const;

private:
  std::vector<BenefitGroup> groups_;
};

// C_b and Gini_b by exact summation: maxlike = sum of mass * mean_b * eta(h)
// with eta = 2F - f from the group distribution. Throws CbUndefinedError when
// tau_star or maxlike is exactly 0; flags the report when tau_star < 0.
MetricReport cb_exact(const GroupedBenefit& groups);

// Plug-in estimate from per-record benefit estimates and predictions.
MetricReport cb_plug_in(std::span<const double> tau_hat, std::span<const double> h);

// Exhaustive O(n^2) evaluation of the pairwise treat-greater-H expectation,
// treating the sample as the population. Ties contribute (b_i + b_j) / 2,
// the expectation of assigning treatment at random within the tied pair.
double pairwise_maxlike_oracle(std::span<const double> b, std::span<const double> h);
double pairwise_maxlike_oracle_serial(std::span<const double> b, std::span<const double> h);

enum class CurveKind { calibration, rcc };

struct CurvePoints {
  CurveKind kind = CurveKind::calibration;
  std::vector<std::pair<double, double>> points;
};

// Relative concentration curve: cumulative benefit share against cumulative
// population share in ascending-h order; tie groups appear as single straight
// segments. Requires mean(tau_hat) > 0.
CurvePoints rcc(std::span<const double> tau_hat, std::span<const double> h);
CurvePoints rcc_from_groups(const GroupedBenefit& groups);

// Twice the area between the diagonal and the curve, by the trapezoid rule
// on the polyline (exact for the discrete triangle + trapezoid shape).
double gini_from_rcc(const CurvePoints& curve);

struct Binning {
  enum class Mode { by_level, equal_frequency };
  Mode mode = Mode::by_level;
  int bins = 10;

  static Binning by_level() { return {Mode::by_level, 0}; }
  static Binning equal_frequency(int k) { return {Mode::equal_frequency, k}; }
};

// Calibration curve points. by_level: one point per distinct prediction,
// y = mean tau_hat within the level. equal_frequency(k): k quantile bins by
// h, x = bin mean of h, y = bin mean of tau_hat; tied predictions are never
// split across bins.
CurvePoints calibration_curve(std::span<const double> tau_hat, std::span<const double> h,
                              const Binning& binning);

}  // namespace tbp
