#include "tbp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tbp/errors.hpp"
#include "tbp/threads.hpp"

namespace tbp {

namespace {

constexpr double kMassTolerance = 1e-12;

void check_equal_lengths(std::size_t nb, std::size_t nh) {
  if (nb != nh)
    throw std::invalid_argument("benefit and prediction lists differ in length");
}

std::vector<std::size_t> order_by(std::span<const double> h) {
  std::vector<std::size_t> idx(h.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return h[a] < h[b]; });
  return idx;
}

}  // namespace

GroupedBenefit GroupedBenefit::from_groups(std::vector<BenefitGroup> groups) {
  if (groups.empty()) throw std::invalid_argument("empty sample");
  std::sort(groups.begin(), groups.end(),
            [](const BenefitGroup& a, const BenefitGroup& b) { return a.h < b.h; });

  GroupedBenefit out;
  double total = 0.0;
  for (const auto& g : groups) {
    if (!std::isfinite(g.h) || !std::isfinite(g.mean_b))
      throw std::invalid_argument("non-finite group entry");
    if (!(g.mass > 0.0)) throw ValidationError("group mass must be positive");
    total += g.mass;
    if (!out.groups_.empty() && out.groups_.back().h == g.h) {
      auto& back = out.groups_.back();
      back.mean_b = (back.mean_b * back.mass + g.mean_b * g.mass) / (back.mass + g.mass);
      back.mass += g.mass;
    } else {
      out.groups_.push_back(g);
    }
  }
  if (std::abs(total - 1.0) > kMassTolerance)
    throw ValidationError("masses must sum to 1 (got " + std::to_string(total) + ")");
  return out;
}

GroupedBenefit GroupedBenefit::from_records(std::span<const double> b,
                                            std::span<const double> h) {
  check_equal_lengths(b.size(), h.size());
  if (b.empty()) throw std::invalid_argument("empty sample");

  const auto idx = order_by(h);
  const double n = static_cast<double>(b.size());

  GroupedBenefit out;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < idx.size() && h[idx[j]] == h[idx[i]]) sum += b[idx[j++]];
    const double count = static_cast<double>(j - i);
    out.groups_.push_back({h[idx[i]], count / n, sum / count});
    i = j;
  }
  return out;
}

double GroupedBenefit::tau_star() const {
  double t = 0.0;
  for (const auto& g : groups_) t += g.mass * g.mean_b;
  return t;
}

EmpiricalDistribution GroupedBenefit::distribution() const {
  std::vector<Atom> atoms;
  atoms.reserve(groups_.size());
  for (const auto& g : groups_) atoms.push_back({g.h, g.mass, 0.0});
  return EmpiricalDistribution::from_atoms(std::move(atoms));
}

MetricReport cb_exact(const GroupedBenefit& grouped) {
  MetricReport report;
  double cum = 0.0;
  for (const auto& g : grouped.groups()) {
    cum += g.mass;
    const double eta = 2.0 * cum - g.mass;
    report.tau_star += g.mass * g.mean_b;
    report.maxlike += g.mass * g.mean_b * eta;
  }
  if (report.tau_star == 0.0)
    throw CbUndefinedError("C_b undefined: E[B] = 0", report.maxlike);
  if (report.maxlike == 0.0)
    throw CbUndefinedError("C_b undefined: treat-greater-H expectation is 0", report.maxlike);
  if (report.tau_star < 0.0) report.flags.push_back("E[B] > 0 assumed");
  report.cb = 1.0 - report.tau_star / report.maxlike;
  report.gini_b = (report.maxlike - report.tau_star) / report.tau_star;
  return report;
}

MetricReport cb_plug_in(std::span<const double> tau_hat, std::span<const double> h) {
  check_equal_lengths(tau_hat.size(), h.size());
  if (tau_hat.size() < 2) throw std::invalid_argument("need at least 2 records");
  MetricReport report = cb_exact(GroupedBenefit::from_records(tau_hat, h));
  report.n = tau_hat.size();
  return report;
}

namespace {

double pairwise_row(std::span<const double> b, std::span<const double> h, std::size_t i) {
  double s = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (h[i] > h[j])
      s += b[i];
    else if (h[i] < h[j])
      s += b[j];
    else
      s += 0.5 * (b[i] + b[j]);
  }
  return s;
}

}  // namespace

double pairwise_maxlike_oracle_serial(std::span<const double> b, std::span<const double> h) {
  check_equal_lengths(b.size(), h.size());
  if (b.size() < 2) throw std::invalid_argument("need at least 2 records");
  const std::size_t n = b.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += pairwise_row(b, h, i);
  return total / (static_cast<double>(n) * static_cast<double>(n));
}

double pairwise_maxlike_oracle(std::span<const double> b, std::span<const double> h) {
  check_equal_lengths(b.size(), h.size());
  if (b.size() < 2) throw std::invalid_argument("need at least 2 records");
  const std::size_t n = b.size();

  // Row sums are accumulated independently and combined in index order, so
  // the result is bit-identical for any worker count.
  std::vector<double> rows(n);
  [[maybe_unused]] const int workers = max_workers();
#pragma omp parallel for schedule(static) num_threads(workers)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
    rows[static_cast<std::size_t>(i)] = pairwise_row(b, h, static_cast<std::size_t>(i));

  double total = 0.0;
  for (double r : rows) total += r;
  return total / (static_cast<double>(n) * static_cast<double>(n));
}

CurvePoints rcc_from_groups(const GroupedBenefit& grouped) {
  const double total = grouped.tau_star();
  if (!(total > 0.0))
    throw std::domain_error("RCC normalization undefined: mean benefit must be positive");

  CurvePoints curve;
  curve.kind = CurveKind::rcc;
  curve.points.reserve(grouped.groups().size() + 1);
  curve.points.emplace_back(0.0, 0.0);
  double cum_mass = 0.0, cum_benefit = 0.0;
  for (const auto& g : grouped.groups()) {
    cum_mass += g.mass;
    cum_benefit += g.mass * g.mean_b;
    curve.points.emplace_back(cum_mass, cum_benefit / total);
  }
  // guard against drift in the cumulative sums
  curve.points.back().first = 1.0;
  curve.points.back().second = 1.0;
  return curve;
}

CurvePoints rcc(std::span<const double> tau_hat, std::span<const double> h) {
  return rcc_from_groups(GroupedBenefit::from_records(tau_hat, h));
}

double gini_from_rcc(const CurvePoints& curve) {
  if (curve.kind != CurveKind::rcc) throw std::invalid_argument("curve is not an RCC");
  if (curve.points.size() < 2) throw std::invalid_argument("RCC needs at least 2 points");
  double twice_area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& [x0, y0] = curve.points[i - 1];
    const auto& [x1, y1] = curve.points[i];
    twice_area += (x1 - x0) * ((x0 + x1) - (y0 + y1));
  }
  return twice_area;
}

CurvePoints calibration_curve(std::span<const double> tau_hat, std::span<const double> h,
                              const Binning& binning) {
  check_equal_lengths(tau_hat.size(), h.size());
  if (h.empty()) throw std::invalid_argument("empty sample");

  CurvePoints curve;
  curve.kind = CurveKind::calibration;

  if (binning.mode == Binning::Mode::by_level) {
    const auto grouped = GroupedBenefit::from_records(tau_hat, h);
    for (const auto& g : grouped.groups()) curve.points.emplace_back(g.h, g.mean_b);
    return curve;
  }

  const std::size_t n = h.size();
  const int k = binning.bins;
  if (k < 2) throw std::invalid_argument("equal-frequency binning needs k >= 2");
  if (static_cast<std::size_t>(k) > n)
    throw std::invalid_argument("equal-frequency binning needs k <= n");

  const auto idx = order_by(h);
  std::size_t distinct = 1;
  for (std::size_t i = 1; i < n; ++i)
    if (h[idx[i]] != h[idx[i - 1]]) ++distinct;
  if (static_cast<std::size_t>(k) > distinct)
    throw std::invalid_argument("insufficient distinct predictions");

  // Quantile cuts, nudged right so tied predictions stay in one bin.
  std::size_t start = 0;
  for (int bin = 1; bin <= k; ++bin) {
    std::size_t end = (n * static_cast<std::size_t>(bin)) / static_cast<std::size_t>(k);
    while (end < n && h[idx[end]] == h[idx[end - 1]]) ++end;
    if (bin == k) end = n;
    if (end <= start) continue;  // bin swallowed by a tie run
    double sum_h = 0.0, sum_t = 0.0;
    for (std::size_t i = start; i < end; ++i) {
      sum_h += h[idx[i]];
      sum_t += tau_hat[idx[i]];
    }
    const double count = static_cast<double>(end - start);
    curve.points.emplace_back(sum_h / count, sum_t / count);
    start = end;
  }
  return curve;
}

}  // namespace tbp
