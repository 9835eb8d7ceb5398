#include "tbp/pop2.hpp"

#include <cmath>
#include <stdexcept>

namespace tbp {

namespace {

void check_h_domain(double h) {
  if (!(h > 0.0 && h < 2.0))
    throw std::domain_error("calibration curve undefined outside (0, 2)");
}

MetricReport make_report(double tau_star, double maxlike) {
  MetricReport r;
  r.tau_star = tau_star;
  r.maxlike = maxlike;
  r.cb = 1.0 - tau_star / maxlike;
  r.gini_b = (maxlike - tau_star) / tau_star;
  return r;
}

}  // namespace

Pop2Density pop2_distribution(double h) {
  Pop2Density d;
  if (h < 0.0) {
    d.pdf = 0.0;
    d.cdf = 0.0;
  } else if (h < 1.0) {
    d.pdf = h;
    d.cdf = 0.5 * h * h;
  } else if (h <= 2.0) {
    d.pdf = 2.0 - h;
    d.cdf = 1.0 - 0.5 * (2.0 - h) * (2.0 - h);
  } else {
    d.pdf = 0.0;
    d.cdf = 1.0;
  }
  return d;
}

double pop2_calibration(double h, bool adjusted) {
  check_h_domain(h);
  const double base = h <= 1.0 ? 0.75 * h : (1.0 - 0.25 * h * h) / (2.0 - h);
  if (adjusted) return base;
  return base + pop2_calibration_deviation(h);
}

double pop2_calibration_deviation(double h) {
  check_h_domain(h);
  return h <= 1.0 ? 1.0 / (6.0 * h) : 1.0 / (6.0 * (2.0 - h));
}

double pop2_bias(double x2) {
  if (!(x2 >= 0.0 && x2 <= 1.0))
    throw std::domain_error("bias(x) defined for x2 in [0, 1]");
  return 1.0 / 3.0 - x2 * x2 + (2.0 / 3.0) * x2 * x2 * x2;
}

Pop2DeviationTerms pop2_deviation_terms() {
  Pop2DeviationTerms t;
  t.tau_star = 2.0 / 3.0;
  t.e_bias = 1.0 / 6.0;
  // E[B F_H(H)] = 2 (3/80 + 19/120); eta = 2 F for a continuous predictor.
  t.e_b_eta = 4.0 * (3.0 / 80.0 + 19.0 / 120.0);
  t.e_bias_eta = 2.0 * (13.0 / 504.0 + 43.0 / 1260.0);
  return t;
}

Pop2Metrics pop2_metrics(bool adjusted) {
  Pop2Metrics out;
  const Pop2DeviationTerms t = pop2_deviation_terms();
  if (adjusted) {
    out.h = make_report(t.tau_star, t.e_b_eta);
    // E[B F(B)] = 2/5 when ranking by tau_s(x) itself (Beta(2,1) benefit).
    out.tau_s = make_report(t.tau_star, 2.0 * (2.0 / 5.0));
  } else {
    out.h = make_report(t.tau_star + t.e_bias, t.e_b_eta + t.e_bias_eta);
  }
  return out;
}

CurvePoints pop2_calibration_curve(bool adjusted, int points) {
  if (points < 2) throw std::invalid_argument("need at least 2 curve points");
  CurvePoints curve;
  curve.kind = CurveKind::calibration;
  curve.points.reserve(static_cast<std::size_t>(points));
  for (int k = 1; k <= points; ++k) {
    const double h = 2.0 * k / static_cast<double>(points + 1);
    curve.points.emplace_back(h, pop2_calibration(h, adjusted));
  }
  return curve;
}

namespace {

// E[B I(H <= h)]: cumulative benefit captured below prediction level h.
double benefit_below(double h) {
  if (h <= 0.0) return 0.0;
  if (h <= 1.0) return 0.25 * h * h * h;
  if (h < 2.0) return h - h * h * h / 12.0 - 2.0 / 3.0;
  return 2.0 / 3.0;
}

// E[bias(X) I(H <= h)], accumulated over the joint law of (X2, H).
double bias_below(double h) {
  if (h <= 0.0) return 0.0;
  if (h <= 1.0) return h * h / 6.0 - h * h * h * h / 12.0 + std::pow(h, 5) / 30.0;
  if (h < 2.0) {
    const double u = h - 1.0;
    return 7.0 / 60.0 + u / 6.0 - u * u / 6.0 + std::pow(u, 4) / 12.0 - std::pow(u, 5) / 30.0;
  }
  return 1.0 / 6.0;
}

}  // namespace

CurvePoints pop2_rcc(bool adjusted, int points) {
  if (points < 2) throw std::invalid_argument("need at least 2 curve points");
  const double total = adjusted ? 2.0 / 3.0 : 2.0 / 3.0 + 1.0 / 6.0;
  CurvePoints curve;
  curve.kind = CurveKind::rcc;
  curve.points.reserve(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    const double h = 2.0 * k / static_cast<double>(points - 1);
    const double share = benefit_below(h) + (adjusted ? 0.0 : bias_below(h));
    curve.points.emplace_back(pop2_distribution(h).cdf, share / total);
  }
  curve.points.back() = {1.0, 1.0};
  return curve;
}

}  // namespace tbp
